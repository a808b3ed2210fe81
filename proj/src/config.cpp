#include "levyfbsde/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/expr.hpp"

namespace levyfbsde {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.sections_[section].count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> KeyValueConfig::get(const std::string& section,
                                               const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    mark_known(section, key);
    return k->second;
}

std::string KeyValueConfig::require(const std::string& section, const std::string& key) const {
    const auto v = get(section, key);
    if (!v) throw ConfigError("config: missing [" + section + "] " + key);
    return *v;
}

double KeyValueConfig::require_double(const std::string& section, const std::string& key) const {
    const std::string v = require(section, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " = '" + v + "' is not a number");
    }
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
    return has(section, key) ? require_double(section, key) : fallback;
}

int KeyValueConfig::require_int(const std::string& section, const std::string& key) const {
    const double d = require_double(section, key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config: [" + section + "] " + key + " must be an integer");
    return i;
}

int KeyValueConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? require_int(section, key) : fallback;
}

std::uint64_t KeyValueConfig::require_u64(const std::string& section, const std::string& key) const {
    const std::string v = require(section, key);
    try {
        std::size_t used = 0;
        const unsigned long long u = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(u);
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " = '" + v +
                          "' is not an unsigned integer");
    }
}

void KeyValueConfig::mark_known(const std::string& section, const std::string& key) const {
    seen_[section][key] = true;
}

void KeyValueConfig::reject_unknown() const {
    for (const auto& [section, kv] : sections_) {
        for (const auto& [key, value] : kv) {
            (void)value;
            const auto s = seen_.find(section);
            if (s == seen_.end() || !s->second.count(key))
                throw ConfigError("config: unknown key [" + section + "] " + key);
        }
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& context) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(context + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(context + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& context) {
    std::vector<int> out;
    for (double d : parse_double_list(text, context)) {
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d) throw ConfigError(context + ": expected integers");
        out.push_back(i);
    }
    return out;
}

namespace {

std::vector<Atom> parse_atoms(const std::string& text) {
    std::vector<Atom> atoms;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("config: atom '" + item + "' must be size:weight");
        try {
            atoms.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError("config: malformed atom '" + item + "'");
        }
    }
    if (atoms.empty()) throw ConfigError("config: empty atom list");
    return atoms;
}

LevyModel model_from(const KeyValueConfig& kv) {
    const std::string kind = kv.require("model", "kind");
    const double p = kv.get_double("model", "p", 2.0);
    if (kind == "gamma")
        return LevyModel::gamma_process(kv.require_double("model", "alpha"),
                                        kv.require_double("model", "beta"), p);
    if (kind == "tempered_stable")
        return LevyModel::tempered_stable(kv.require_double("model", "stability"),
                                          kv.require_double("model", "intensity"),
                                          kv.require_double("model", "tempering"), p);
    if (kind == "compound_poisson")
        return LevyModel::compound_poisson(parse_atoms(kv.require("model", "atoms")), p);
    throw ConfigError("config: unknown model kind '" + kind + "'");
}

Coefficient coefficient_expr(const std::string& text) {
    const Expression e = Expression::parse(text, {"t", "x"});
    return [e](double t, double x) { return e.eval(std::array<double, 2>{t, x}); };
}

FbsdeProblem custom_problem(const KeyValueConfig& kv) {
    FbsdeProblem p;
    p.name = "custom";
    p.b = coefficient_expr(kv.require("problem", "b"));
    p.a = coefficient_expr(kv.require("problem", "a"));
    p.h = coefficient_expr(kv.require("problem", "h"));
    if (kv.has("problem", "hx")) p.hx = coefficient_expr(kv.require("problem", "hx"));
    const Expression f = Expression::parse(kv.require("problem", "f"), {"t", "x", "y", "z", "q"});
    p.f = [f](double t, double x, double y, double z, double q) {
        return f.eval(std::array<double, 5>{t, x, y, z, q});
    };
    const Expression g = Expression::parse(kv.require("problem", "g"), {"x"});
    p.g = [g](double x) { return g.eval(std::array<double, 1>{x}); };
    const Expression rho = Expression::parse(kv.require("problem", "rho"), {"e"});
    p.rho = [rho](double e) { return rho.eval(std::array<double, 1>{e}); };
    p.x0 = kv.require_double("problem", "x0");
    p.horizon = kv.require_double("problem", "T");
    p.lipschitz_K = kv.require_double("problem", "K");
    p.validate();
    return p;
}

}  // namespace

StudyConfig load_study_config(const std::string& text) {
    const KeyValueConfig kv = KeyValueConfig::parse(text);
    StudyConfig cfg;
    cfg.raw_text = text;

    const std::string type = kv.require("study", "type");
    if (type == "study") cfg.kind = StudyKind::Backward;
    else if (type == "forward_rate") cfg.kind = StudyKind::ForwardRate;
    else if (type == "moments") cfg.kind = StudyKind::Moments;
    else throw ConfigError("config: unknown study type '" + type + "'");

    cfg.id = kv.get("study", "id").value_or("study");
    cfg.output_dir = kv.get("study", "output").value_or(".");
    cfg.seed = kv.require_u64("study", "seed");

    cfg.model = model_from(kv);
    for (const std::string& name :
         [&] {
             std::vector<std::string> names;
             std::istringstream in(kv.require("model", "representation"));
             std::string item;
             while (std::getline(in, item, ',')) {
                 item = trim(item);
                 if (!item.empty()) names.push_back(item);
             }
             return names;
         }())
        cfg.methods.push_back(series_method_from_string(name));
    if (cfg.methods.empty()) throw ConfigError("config: no representation given");
    if (cfg.kind != StudyKind::Moments && cfg.methods.size() != 1)
        throw ConfigError("config: simulation studies take exactly one representation");

    if (cfg.kind != StudyKind::Moments) {
        const std::string pname = kv.require("problem", "name");
        if (pname == "custom") {
            cfg.problem = custom_problem(kv);
        } else {
            std::optional<BenchmarkProblem> bm;
            if (pname == "b1")
                bm = benchmark_b1(kv.get_double("problem", "b0", 0.1),
                                  kv.get_double("problem", "a0", 0.3),
                                  kv.get_double("problem", "h0", 0.5),
                                  kv.get_double("problem", "x0", 1.0),
                                  kv.get_double("problem", "T", 1.0));
            else if (pname == "b2")
                bm = benchmark_b2(kv.get_double("problem", "r", 0.5),
                                  kv.get_double("problem", "b0", 0.1),
                                  kv.get_double("problem", "a0", 0.3),
                                  kv.get_double("problem", "h0", 0.5),
                                  kv.get_double("problem", "x0", 1.0),
                                  kv.get_double("problem", "T", 1.0));
            else if (pname == "b3")
                bm = benchmark_b3(kv.get_double("problem", "T", 1.0));
            else
                throw ConfigError("config: unknown problem '" + pname + "'");
            cfg.benchmark = bm;
            cfg.problem = bm->problem;
        }
    }

    if (cfg.kind == StudyKind::Moments) {
        cfg.n_list = parse_double_list(kv.require("scheme", "n"), "config: [scheme] n");
        for (double n : cfg.n_list)
            if (n < 0.0) throw ConfigError("config: truncation levels must be nonnegative");
    } else {
        cfg.n_list = parse_double_list(kv.require("scheme", "n"), "config: [scheme] n");
        cfg.N_list = parse_int_list(kv.require("scheme", "N"), "config: [scheme] N");
        cfg.paths = kv.require_int("scheme", "M");
        cfg.p = kv.get_double("scheme", "p", cfg.model.moment_order_p);
        for (double n : cfg.n_list)
            if (!(n > 0.0)) throw ConfigError("config: truncation levels must be positive");
        for (int N : cfg.N_list)
            if (N < 1) throw ConfigError("config: step counts must be positive");
        if (cfg.paths < 1) throw ConfigError("config: M must be positive");

        const std::string basis = kv.get("scheme", "basis").value_or("poly");
        if (basis == "poly") cfg.regression.basis = RegressionBasis::GlobalPolynomial;
        else if (basis == "partition") cfg.regression.basis = RegressionBasis::PartitionedLinear;
        else throw ConfigError("config: unknown basis '" + basis + "'");
        cfg.regression.degree = kv.get_int("scheme", "degree", 3);
        cfg.regression.bins = kv.get_int("scheme", "bins", 8);
        cfg.regression.state_lo = kv.get_double("scheme", "state_lo", -5.0);
        cfg.regression.state_hi = kv.get_double("scheme", "state_hi", 5.0);
        cfg.regression.ridge = kv.get_double("scheme", "ridge", 0.0);
        if (kv.has("scheme", "truncation_bound"))
            cfg.regression.truncation_bound = kv.require_double("scheme", "truncation_bound");
        cfg.regression.validate();

        const std::string mode = kv.get("reference", "mode").value_or("self");
        if (mode == "closed_form") {
            if (!cfg.benchmark)
                throw ConfigError("config: closed-form reference needs a named benchmark problem");
            cfg.reference = ReferenceMode::ClosedForm;
        } else if (mode == "fine") {
            cfg.reference = ReferenceMode::FineDiscretization;
            cfg.reference_cell.N = kv.require_int("reference", "N");
            cfg.reference_cell.n = kv.require_double("reference", "n");
        } else if (mode == "self") {
            cfg.reference = ReferenceMode::SelfOnly;
        } else {
            throw ConfigError("config: unknown reference mode '" + mode + "'");
        }
    }

    kv.reject_unknown();
    return cfg;
}

StudyConfig load_study_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_study_config(buf.str());
}

StudySetup make_study_setup(const StudyConfig& cfg) {
    if (cfg.kind != StudyKind::Backward)
        throw ConfigError("make_study_setup: not a backward study configuration");
    StudySetup setup;
    setup.model = cfg.model;
    setup.method = cfg.methods.front();
    setup.problem = cfg.problem;
    setup.benchmark = cfg.benchmark;
    for (double n : cfg.n_list)
        for (int N : cfg.N_list) setup.cells.push_back({n, N});
    setup.reference = cfg.reference;
    setup.reference_cell = cfg.reference_cell;
    setup.paths = cfg.paths;
    setup.p = cfg.p;
    setup.seed = cfg.seed;
    setup.regression = cfg.regression;
    setup.id = cfg.id;
    return setup;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace levyfbsde
