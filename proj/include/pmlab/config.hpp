#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pmlab/experiments.hpp"

namespace pmlab {

// One YAML mapping with typed lookups. Errors name the source and line of the offending key.
class ConfigSection {
public:
    ConfigSection() = default;
    ConfigSection(YAML::Node node, std::string source);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    double positive(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<std::vector<double>> matrix(const std::string& key,
                                            const std::vector<std::vector<double>>& fallback) const;
    ConfigSection section(const std::string& key) const;

    // Throws on keys outside `known`.
    void reject_unknown(const std::set<std::string>& known) const;
    std::string where(const std::string& key) const;

private:
    YAML::Node node_;
    std::string source_;
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;
};

// Top-level file: `command`, global `seed`, `workers`, `output`, and a `params` table.
struct ExperimentConfig {
    std::string command;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string output;
    ConfigSection params;
    std::string source;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

// Parameter readers; missing keys keep the defaults, unknown keys are rejected.
ConeExampleParams read_cone_params(const ConfigSection& s);
RestartParams read_restart_params(const ConfigSection& s);
RegularityParams read_regularity_params(const ConfigSection& s);
TailParams read_tail_params(const ConfigSection& s);
OracleParams read_oracle_params(const ConfigSection& s);
NonlinParams read_nonlin_params(const ConfigSection& s);
CascadeParams read_cascade_params(const ConfigSection& s);
ComparisonParams read_comparison_params(const ConfigSection& s);
ShjbParams read_shjb_params(const ConfigSection& s);
IsaacsParams read_isaacs_params(const ConfigSection& s);

}  // namespace pmlab
