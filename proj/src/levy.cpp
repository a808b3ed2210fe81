#include "levyfbsde/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/quadrature.hpp"
#include "levyfbsde/special.hpp"

namespace levyfbsde {

std::string to_string(LevyKind k) {
    switch (k) {
        case LevyKind::GammaProcess: return "gamma";
        case LevyKind::TemperedStableSubordinator: return "tempered_stable";
        case LevyKind::CompoundPoissonTest: return "compound_poisson";
    }
    return "?";
}

std::string to_string(SeriesMethod m) {
    switch (m) {
        case SeriesMethod::InverseLevy: return "inverse_levy";
        case SeriesMethod::Rejection: return "rejection";
        case SeriesMethod::Thinning: return "thinning";
        case SeriesMethod::Bondesson: return "bondesson";
        case SeriesMethod::RosinskiTemperedStable: return "rosinski";
    }
    return "?";
}

SeriesMethod series_method_from_string(const std::string& name) {
    if (name == "inverse_levy") return SeriesMethod::InverseLevy;
    if (name == "rejection") return SeriesMethod::Rejection;
    if (name == "thinning") return SeriesMethod::Thinning;
    if (name == "bondesson") return SeriesMethod::Bondesson;
    if (name == "rosinski") return SeriesMethod::RosinskiTemperedStable;
    throw ConfigError("unknown series representation: " + name);
}

LevyModel LevyModel::gamma_process(double alpha, double beta, double p) {
    LevyModel m;
    m.kind = LevyKind::GammaProcess;
    m.alpha = alpha;
    m.beta = beta;
    m.moment_order_p = p;
    m.validate();
    return m;
}

LevyModel LevyModel::tempered_stable(double stability, double intensity, double tempering, double p) {
    LevyModel m;
    m.kind = LevyKind::TemperedStableSubordinator;
    m.ts_stability = stability;
    m.ts_intensity = intensity;
    m.ts_tempering = tempering;
    m.moment_order_p = p;
    m.validate();
    return m;
}

LevyModel LevyModel::compound_poisson(std::vector<Atom> atoms, double p) {
    LevyModel m;
    m.kind = LevyKind::CompoundPoissonTest;
    m.atoms = std::move(atoms);
    m.moment_order_p = p;
    m.validate();
    return m;
}

void LevyModel::validate() const {
    if (!(moment_order_p >= 2.0))
        throw std::invalid_argument("LevyModel: moment order p must be >= 2");
    switch (kind) {
        case LevyKind::GammaProcess:
            if (!(alpha > 0.0) || !(beta > 0.0))
                throw std::invalid_argument("gamma process: alpha and beta must be positive");
            break;
        case LevyKind::TemperedStableSubordinator:
            if (!(ts_stability > 0.0) || !(ts_stability < 1.0))
                throw std::invalid_argument("tempered stable: stability must lie inside (0,1)");
            if (!(ts_intensity > 0.0) || !(ts_tempering > 0.0))
                throw std::invalid_argument("tempered stable: intensity and tempering must be positive");
            break;
        case LevyKind::CompoundPoissonTest: {
            if (atoms.empty())
                throw std::invalid_argument("compound poisson: needs at least one atom");
            double m2 = 0.0;
            for (const Atom& a : atoms) {
                if (!(a.weight > 0.0))
                    throw std::invalid_argument("compound poisson: atom weights must be positive");
                if (!std::isfinite(a.size))
                    throw std::invalid_argument("compound poisson: atom sizes must be finite");
                m2 += a.weight * std::min(1.0, a.size * a.size);
            }
            if (!std::isfinite(m2))
                throw std::invalid_argument("compound poisson: min(1,e^2) mass must be finite");
            break;
        }
    }
}

double LevyModel::full_moment(double q) const {
    switch (kind) {
        case LevyKind::GammaProcess:
            return alpha * std::tgamma(q) / std::pow(beta, q);
        case LevyKind::TemperedStableSubordinator:
            if (q <= ts_stability)
                throw std::domain_error("tempered stable: moment order must exceed the stability index");
            return ts_intensity * std::tgamma(q - ts_stability) *
                   std::pow(ts_tempering, ts_stability - q);
        case LevyKind::CompoundPoissonTest: {
            double s = 0.0;
            for (const Atom& a : atoms) s += a.weight * std::pow(std::abs(a.size), q);
            return s;
        }
    }
    return 0.0;
}

double LevyModel::full_signed_first_moment() const {
    if (kind == LevyKind::CompoundPoissonTest) {
        double s = 0.0;
        for (const Atom& a : atoms) s += a.weight * a.size;
        return s;
    }
    return full_moment(1.0);  // nonnegative jumps
}

std::string LevyModel::id() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case LevyKind::GammaProcess: os << "(" << alpha << "," << beta << ")"; break;
        case LevyKind::TemperedStableSubordinator:
            os << "(" << ts_stability << "," << ts_intensity << "," << ts_tempering << ")";
            break;
        case LevyKind::CompoundPoissonTest: os << "(" << atoms.size() << " atoms)"; break;
    }
    return os.str();
}

std::vector<double> SeriesRepresentation::support_samples(double n, int r_count,
                                                          const std::vector<double>& mark_quantiles) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(r_count) * mark_quantiles.size());
    // Log-spaced epoch coordinates; small r carries the large jumps.
    const double r_min = std::max(n * 1e-7, 1e-12);
    for (int i = 0; i < r_count; ++i) {
        const double frac = static_cast<double>(i) / std::max(1, r_count - 1);
        const double r = r_min * std::pow(n / r_min, frac);
        for (double u : mark_quantiles) {
            const double e = quantile_proxy(r, u);
            if (e != 0.0) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

QuadratureOptions mark_quad_options(const std::string& label) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-16;
    opt.label = label;
    return opt;
}

// --- gamma process -------------------------------------------------------

class BondessonRep final : public SeriesRepresentation {
  public:
    BondessonRep(double alpha, double beta)
        : SeriesRepresentation(SeriesMethod::Bondesson), alpha_(alpha), beta_(beta) {}

    double jump_size(double r, RngStream& marks) const override {
        return std::exp(-r / alpha_) / beta_ * marks.exponential();
    }
    double abs_moment(double r, double q) const override {
        const double c = std::exp(-r / alpha_) / beta_;
        return std::pow(c, q) * std::tgamma(q + 1.0);
    }
    double signed_mean(double r) const override { return std::exp(-r / alpha_) / beta_; }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        const double c = std::exp(-r / alpha_) / beta_;
        // E[w(cV) cV] for V ~ Exp(1); the exp weight kills the tail fast.
        return integrate(
            [&](double v) { return w(c * v) * c * v * std::exp(-v); }, 0.0, 40.0,
            mark_quad_options("bondesson mark expectation"));
    }
    double quantile_proxy(double r, double u) const override {
        return -std::exp(-r / alpha_) / beta_ * std::log1p(-u);
    }

  private:
    double alpha_, beta_;
};

class InverseLevyGammaRep final : public SeriesRepresentation {
  public:
    InverseLevyGammaRep(double alpha, double beta)
        : SeriesRepresentation(SeriesMethod::InverseLevy), alpha_(alpha), beta_(beta) {}

    double jump_size(double r, RngStream&) const override { return size_at(r); }
    double abs_moment(double r, double q) const override { return std::pow(size_at(r), q); }
    double signed_mean(double r) const override { return size_at(r); }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        const double e = size_at(r);
        return w(e) * e;
    }
    double quantile_proxy(double r, double /*u*/) const override { return size_at(r); }

  private:
    double size_at(double r) const { return expint_e1_inv(r / alpha_) / beta_; }
    double alpha_, beta_;
};

class RejectionGammaRep final : public SeriesRepresentation {
  public:
    RejectionGammaRep(double alpha, double beta)
        : SeriesRepresentation(SeriesMethod::Rejection), alpha_(alpha), beta_(beta) {}

    double jump_size(double r, RngStream& marks) const override {
        const double u = marks.uniform();
        const double cand = candidate(r);
        return u <= acceptance(r) ? cand : 0.0;
    }
    double abs_moment(double r, double q) const override {
        if (rejected_for_sure(r)) return 0.0;
        return std::pow(candidate(r), q) * acceptance(r);
    }
    double signed_mean(double r) const override {
        if (rejected_for_sure(r)) return 0.0;
        return candidate(r) * acceptance(r);
    }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        if (rejected_for_sure(r)) return 0.0;
        const double cand = candidate(r);
        return w(cand) * cand * acceptance(r);
    }
    double quantile_proxy(double r, double /*u*/) const override { return candidate(r); }
    bool can_reject() const override { return true; }

  private:
    // Proposal from the dominating measure alpha/(x(1+beta x)) dx; the
    // acceptance ratio (1+beta x) exp(-beta x) restores the gamma tail.
    double candidate(double r) const { return 1.0 / (beta_ * std::expm1(r / alpha_)); }
    double acceptance(double r) const {
        const double bx = 1.0 / std::expm1(r / alpha_);
        return bx > 700.0 ? 0.0 : (1.0 + bx) * std::exp(-bx);
    }
    bool rejected_for_sure(double r) const { return 1.0 / std::expm1(r / alpha_) > 700.0; }
    double alpha_, beta_;
};

class ThinningGammaRep final : public SeriesRepresentation {
  public:
    ThinningGammaRep(double alpha, double beta)
        : SeriesRepresentation(SeriesMethod::Thinning), alpha_(alpha), beta_(beta) {}

    double jump_size(double r, RngStream& marks) const override {
        const double v = marks.exponential();
        return v <= alpha_ / r ? v / beta_ : 0.0;
    }
    double abs_moment(double r, double q) const override {
        return lower_incomplete_gamma(q + 1.0, alpha_ / r) / std::pow(beta_, q);
    }
    double signed_mean(double r) const override {
        return lower_incomplete_gamma(2.0, alpha_ / r) / beta_;
    }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        const double cap = alpha_ / r;
        const double hi = std::min(cap, 40.0);
        if (hi <= 0.0) return 0.0;
        return integrate(
            [&](double v) { return w(v / beta_) * (v / beta_) * std::exp(-v); }, 0.0, hi,
            mark_quad_options("thinning mark expectation"));
    }
    double quantile_proxy(double r, double u) const override {
        // Quantile of V | V <= alpha/r for V ~ Exp(1).
        const double cap = alpha_ / r;
        const double mass = -std::expm1(-cap);
        return -std::log1p(-u * mass) / beta_;
    }
    bool can_reject() const override { return true; }

  private:
    double alpha_, beta_;
};

// --- classical tempered stable subordinator ------------------------------

class RosinskiTsRep final : public SeriesRepresentation {
  public:
    RosinskiTsRep(double stability, double intensity, double tempering)
        : SeriesRepresentation(SeriesMethod::RosinskiTemperedStable),
          a_(stability), d_(intensity), l_(tempering) {}

    double jump_size(double r, RngStream& marks) const override {
        const double v = marks.exponential();
        const double u = marks.uniform();
        return std::min(cap(r), v * std::pow(u, 1.0 / a_) / l_);
    }

    // E[min(c, W)^q] with W = V U^(1/a) / l, split at the cap:
    // E[W^q 1(W<c)] + c^q P[W >= c], both reduced to one-dimensional
    // integrals over the uniform mark.
    double abs_moment(double r, double q) const override {
        const double c = cap(r);
        const double below = integrate(
            [&](double u) {
                const double s = std::pow(u, 1.0 / a_) / l_;
                return std::pow(s, q) * lower_incomplete_gamma(q + 1.0, c / s);
            },
            0.0, 1.0, mark_quad_options("ts mark expectation"));
        const double above = std::pow(c, q) * survival_given_cap(c);
        return below + above;
    }
    double signed_mean(double r) const override { return abs_moment(r, 1.0); }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        const double c = cap(r);
        return integrate(
            [&](double u) {
                const double s = std::pow(u, 1.0 / a_) / l_;
                const double vstar = c / s;
                double inner = w(c) * c * std::exp(-std::min(vstar, 700.0));
                if (vstar > 0.0) {
                    inner += integrate(
                        [&](double v) { return w(s * v) * s * v * std::exp(-v); }, 0.0,
                        std::min(vstar, 40.0), mark_quad_options("ts weighted inner"));
                }
                return inner;
            },
            0.0, 1.0, mark_quad_options("ts weighted expectation"));
    }
    double quantile_proxy(double r, double u) const override {
        // Median-uniform proxy for the product mark.
        return std::min(cap(r), -std::log1p(-u) * std::pow(0.5, 1.0 / a_) / l_);
    }

  private:
    double cap(double r) const { return std::pow(a_ * r / d_, -1.0 / a_); }
    double survival_given_cap(double c) const {
        return integrate(
            [&](double u) { return std::exp(-std::min(l_ * c * std::pow(u, -1.0 / a_), 700.0)); },
            0.0, 1.0, mark_quad_options("ts survival"));
    }
    double a_, d_, l_;
};

// --- finite atomic test measure ------------------------------------------

// Atoms ordered by decreasing |size| behave as an exact inverse-tail map:
// H(r) is the atom whose cumulative-weight cell contains r, zero past the
// total mass. All moments reduce to finite sums.
class AtomicRep final : public SeriesRepresentation {
  public:
    explicit AtomicRep(std::vector<Atom> atoms)
        : SeriesRepresentation(SeriesMethod::InverseLevy), atoms_(std::move(atoms)) {
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return std::abs(x.size) > std::abs(y.size); });
        cum_.resize(atoms_.size() + 1, 0.0);
        for (std::size_t i = 0; i < atoms_.size(); ++i) cum_[i + 1] = cum_[i] + atoms_[i].weight;
    }

    double jump_size(double r, RngStream&) const override { return size_at(r); }
    double abs_moment(double r, double q) const override {
        return std::pow(std::abs(size_at(r)), q);
    }
    double signed_mean(double r) const override { return size_at(r); }
    double weighted_mean(double r, const std::function<double(double)>& w) const override {
        const double e = size_at(r);
        return w(e) * e;
    }
    double quantile_proxy(double r, double /*u*/) const override { return size_at(r); }

    bool has_exact_moments() const override { return true; }
    double exact_retained_abs_moment(double n, double q) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += retained_weight(i, n) * std::pow(std::abs(atoms_[i].size), q);
        return s;
    }
    double exact_discarded_abs_moment(double n, double q) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += (atoms_[i].weight - retained_weight(i, n)) * std::pow(std::abs(atoms_[i].size), q);
        return s;
    }
    double exact_retained_signed_moment(double n) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += retained_weight(i, n) * atoms_[i].size;
        return s;
    }
    double exact_retained_weighted_moment(double n,
                                          const std::function<double(double)>& w) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            s += retained_weight(i, n) * w(atoms_[i].size) * atoms_[i].size;
        return s;
    }

    std::vector<double> support_samples(double n, int /*r_count*/,
                                        const std::vector<double>& /*mark_quantiles*/) const override {
        std::vector<double> out;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (retained_weight(i, n) > 0.0) out.push_back(atoms_[i].size);
        return out;
    }

  private:
    double size_at(double r) const {
        const auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), r);
        const std::size_t idx = static_cast<std::size_t>(it - cum_.begin()) - 1;
        return idx < atoms_.size() ? atoms_[idx].size : 0.0;
    }
    double retained_weight(std::size_t i, double n) const {
        return std::clamp(n - cum_[i], 0.0, atoms_[i].weight);
    }
    std::vector<Atom> atoms_;
    std::vector<double> cum_;
};

}  // namespace

std::unique_ptr<SeriesRepresentation> make_representation(const LevyModel& model, SeriesMethod method) {
    model.validate();
    switch (model.kind) {
        case LevyKind::GammaProcess:
            switch (method) {
                case SeriesMethod::Bondesson:
                    return std::make_unique<BondessonRep>(model.alpha, model.beta);
                case SeriesMethod::InverseLevy:
                    return std::make_unique<InverseLevyGammaRep>(model.alpha, model.beta);
                case SeriesMethod::Rejection:
                    return std::make_unique<RejectionGammaRep>(model.alpha, model.beta);
                case SeriesMethod::Thinning:
                    return std::make_unique<ThinningGammaRep>(model.alpha, model.beta);
                default: break;
            }
            throw ConfigError("gamma process: unsupported representation " + to_string(method));
        case LevyKind::TemperedStableSubordinator:
            if (method == SeriesMethod::RosinskiTemperedStable)
                return std::make_unique<RosinskiTsRep>(model.ts_stability, model.ts_intensity,
                                                       model.ts_tempering);
            throw ConfigError("tempered stable: unsupported representation " + to_string(method));
        case LevyKind::CompoundPoissonTest:
            if (method == SeriesMethod::InverseLevy)
                return std::make_unique<AtomicRep>(model.atoms);
            throw ConfigError("compound poisson: unsupported representation " + to_string(method));
    }
    throw ConfigError("unknown model kind");
}

double truncated_measure_mass(const LevyModel& model, double n) {
    model.validate();
    if (!(n > 0.0)) throw std::domain_error("truncated_measure_mass: level must be positive");
    return n;
}

namespace {

QuadratureOptions level_quad_options(const std::string& label) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-15;
    opt.label = label;
    return opt;
}

}  // namespace

double discarded_moment(const LevyModel& model, const SeriesRepresentation& rep, double n, double q) {
    model.validate();
    if (!(q >= 1.0)) throw std::domain_error("discarded_moment: order must be >= 1");
    if (n < 0.0) throw std::domain_error("discarded_moment: level must be nonnegative");
    if (rep.has_exact_moments()) return rep.exact_discarded_abs_moment(n, q);
    return integrate_to_infinity([&](double r) { return rep.abs_moment(r, q); }, n,
                                 level_quad_options("discarded moment"));
}

double retained_moment(const LevyModel& model, const SeriesRepresentation& rep, double n, double q) {
    model.validate();
    if (!(q >= 1.0)) throw std::domain_error("retained_moment: order must be >= 1");
    if (n < 0.0) throw std::domain_error("retained_moment: level must be nonnegative");
    if (n == 0.0) return 0.0;
    if (rep.has_exact_moments()) return rep.exact_retained_abs_moment(n, q);
    return integrate([&](double r) { return rep.abs_moment(r, q); }, 0.0, n,
                     level_quad_options("retained moment"));
}

double retained_signed_first_moment(const LevyModel& model, const SeriesRepresentation& rep, double n) {
    model.validate();
    if (n < 0.0) throw std::domain_error("retained_signed_first_moment: level must be nonnegative");
    if (n == 0.0) return 0.0;
    if (rep.has_exact_moments()) return rep.exact_retained_signed_moment(n);
    return integrate([&](double r) { return rep.signed_mean(r); }, 0.0, n,
                     level_quad_options("retained signed moment"));
}

double retained_weighted_first_moment(const LevyModel& model, const SeriesRepresentation& rep,
                                      double n, const std::function<double(double)>& rho) {
    model.validate();
    if (n < 0.0) throw std::domain_error("retained_weighted_first_moment: level must be nonnegative");
    if (n == 0.0) return 0.0;
    if (rep.has_exact_moments()) return rep.exact_retained_weighted_moment(n, rho);
    return integrate([&](double r) { return rep.weighted_mean(r, rho); }, 0.0, n,
                     level_quad_options("retained weighted moment"));
}

TruncationMoments compute_truncation_moments(const LevyModel& model, const SeriesRepresentation& rep,
                                             double n) {
    TruncationMoments tm;
    tm.n = n;
    tm.sigma2 = discarded_moment(model, rep, n, 2.0);
    tm.sigma_p = discarded_moment(model, rep, n, model.moment_order_p);
    tm.m1_abs = retained_moment(model, rep, n, 1.0);
    tm.m_p = retained_moment(model, rep, n, model.moment_order_p);
    tm.zeta1 = retained_signed_first_moment(model, rep, n);
    return tm;
}

}  // namespace levyfbsde
