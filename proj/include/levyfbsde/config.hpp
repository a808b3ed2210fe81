#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levyfbsde/study.hpp"

namespace levyfbsde {

// Sectioned key-value text:  [section] lines, key = value pairs, '#'
// comments. Unknown keys are rejected so typos fail loudly.
class KeyValueConfig {
  public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string require(const std::string& section, const std::string& key) const;

    double require_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int require_int(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t require_u64(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

    // Keys actually read; used to reject unknown entries.
    void mark_known(const std::string& section, const std::string& key) const;
    void reject_unknown() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    mutable std::map<std::string, std::map<std::string, bool>> seen_;
};

std::vector<double> parse_double_list(const std::string& text, const std::string& context);
std::vector<int> parse_int_list(const std::string& text, const std::string& context);

enum class StudyKind { Backward, ForwardRate, Moments };

struct StudyConfig {
    StudyKind kind = StudyKind::Backward;
    std::string id = "study";
    std::string output_dir = ".";
    std::uint64_t seed = 0;

    LevyModel model;
    std::vector<SeriesMethod> methods;  // one for simulations, possibly several for moments

    FbsdeProblem problem;
    std::optional<BenchmarkProblem> benchmark;

    std::vector<double> n_list;
    std::vector<int> N_list;
    int paths = 0;
    double p = 2.0;
    RegressionSpec regression;

    ReferenceMode reference = ReferenceMode::SelfOnly;
    StudyCell reference_cell;

    std::string raw_text;  // for the manifest hash
};

StudyConfig load_study_config(const std::string& text);
StudyConfig load_study_config_file(const std::string& path);

// Assembles the runnable setup from a parsed configuration.
StudySetup make_study_setup(const StudyConfig& cfg);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace levyfbsde
