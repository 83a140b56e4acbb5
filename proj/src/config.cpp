#include "pmlab/config.hpp"

#include <fstream>
#include <sstream>

#include "pmlab/errors.hpp"

namespace pmlab {

ConfigSection::ConfigSection(YAML::Node node, std::string source)
    : node_(std::move(node)), source_(std::move(source)) {}

std::string ConfigSection::where(const std::string& key) const {
    YAML::Mark mark = node_.Mark();
    if (node_ && node_.IsMap())
        for (const auto& kv : node_)
            if (kv.first.as<std::string>() == key) mark = kv.first.Mark();
    if (mark.line < 0) return source_;
    return source_ + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
}

void ConfigSection::fail(const std::string& key, const std::string& msg) const {
    throw ConfigurationError(where(key) + ": '" + key + "' " + msg);
}

bool ConfigSection::has(const std::string& key) const {
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
}

double ConfigSection::number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
        return node_[key].as<double>();
    } catch (const YAML::Exception&) {
        fail(key, "must be a number");
    }
}

double ConfigSection::positive(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
}

std::size_t ConfigSection::count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key, 0.0);
    if (!(v >= 1.0) || v != std::floor(v)) fail(key, "must be a positive integer");
    return std::size_t(v);
}

int ConfigSection::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    try {
        return node_[key].as<int>();
    } catch (const YAML::Exception&) {
        fail(key, "must be an integer");
    }
}

std::uint64_t ConfigSection::seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    try {
        return node_[key].as<std::uint64_t>();
    } catch (const YAML::Exception&) {
        fail(key, "must be a nonnegative integer");
    }
}

std::string ConfigSection::text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    try {
        return node_[key].as<std::string>();
    } catch (const YAML::Exception&) {
        fail(key, "must be a string");
    }
}

std::vector<double> ConfigSection::numbers(const std::string& key,
                                           const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    try {
        auto v = node_[key].as<std::vector<double>>();
        if (v.empty()) fail(key, "must not be empty");
        return v;
    } catch (const YAML::Exception&) {
        fail(key, "must be a list of numbers");
    }
}

std::vector<int> ConfigSection::integers(const std::string& key,
                                         const std::vector<int>& fallback) const {
    if (!has(key)) return fallback;
    try {
        auto v = node_[key].as<std::vector<int>>();
        if (v.empty()) fail(key, "must not be empty");
        return v;
    } catch (const YAML::Exception&) {
        fail(key, "must be a list of integers");
    }
}

std::vector<std::vector<double>> ConfigSection::matrix(
    const std::string& key, const std::vector<std::vector<double>>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<std::vector<double>> m;
    try {
        m = node_[key].as<std::vector<std::vector<double>>>();
    } catch (const YAML::Exception&) {
        fail(key, "must be a list of numeric rows");
    }
    if (m.empty() || m[0].empty()) fail(key, "must not be empty");
    for (const auto& row : m)
        if (row.size() != m[0].size()) fail(key, "rows must have equal length");
    return m;
}

ConfigSection ConfigSection::section(const std::string& key) const {
    if (!has(key)) return ConfigSection(YAML::Node(YAML::NodeType::Map), source_);
    if (!node_[key].IsMap()) fail(key, "must be a table");
    return ConfigSection(node_[key], source_);
}

void ConfigSection::reject_unknown(const std::set<std::string>& known) const {
    if (!node_ || node_.IsNull()) return;
    if (!node_.IsMap()) {
        const auto m = node_.Mark();
        throw ConfigurationError(source_ + ":" + std::to_string(m.line + 1) + ": expected a table");
    }
    for (const auto& kv : node_) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) fail(key, "is not a known key");
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigurationError(source + ":" + std::to_string(e.mark.line + 1) + ":" +
                                 std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    ConfigSection top(root, source);
    top.reject_unknown({"command", "seed", "workers", "output", "params"});
    ExperimentConfig cfg;
    cfg.source = source;
    cfg.command = top.text("command", "");
    if (top.has("seed")) cfg.seed = top.seed("seed", 0);
    cfg.workers = top.integer("workers", 0);
    if (cfg.workers < 0) throw ConfigurationError(top.where("workers") + ": 'workers' must be >= 0");
    cfg.output = top.text("output", "");
    cfg.params = top.section("params");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

ConeExampleParams read_cone_params(const ConfigSection& s) {
    s.reject_unknown({"epsilon", "L1", "dx"});
    ConeExampleParams p;
    p.epsilon = s.positive("epsilon", p.epsilon);
    p.L1 = s.positive("L1", p.L1);
    p.dx = s.positive("dx", p.dx);
    return p;
}

RestartParams read_restart_params(const ConfigSection& s) {
    s.reject_unknown({"cases"});
    RestartParams p;
    p.cases = s.count("cases", p.cases);
    return p;
}

RegularityParams read_regularity_params(const ConfigSection& s) {
    s.reject_unknown({"L", "pairs", "samples", "step"});
    RegularityParams p;
    p.L = s.positive("L", p.L);
    p.pairs = s.count("pairs", p.pairs);
    p.samples = s.count("samples", p.samples);
    p.step = s.positive("step", p.step);
    return p;
}

TailParams read_tail_params(const ConfigSection& s) {
    s.reject_unknown({"epsilons", "L", "horizon", "samples", "step", "n_max"});
    TailParams p;
    p.epsilons = s.numbers("epsilons", p.epsilons);
    for (double e : p.epsilons)
        if (!(e > 0.0)) throw ConfigurationError(s.where("epsilons") + ": 'epsilons' must be positive");
    p.L = s.positive("L", p.L);
    p.horizon = s.positive("horizon", p.horizon);
    p.samples = s.count("samples", p.samples);
    p.step = s.positive("step", p.step);
    p.n_max = int(s.count("n_max", std::size_t(p.n_max)));
    return p;
}

OracleParams read_oracle_params(const ConfigSection& s) {
    s.reject_unknown({"epsilon", "L", "L1", "dx", "samples", "step", "tolerance"});
    OracleParams p;
    p.epsilon = s.positive("epsilon", p.epsilon);
    p.L = s.positive("L", p.L);
    p.L1 = s.positive("L1", p.L1);
    p.dx = s.positive("dx", p.dx);
    p.samples = s.count("samples", p.samples);
    p.step = s.positive("step", p.step);
    p.tolerance = s.positive("tolerance", p.tolerance);
    return p;
}

NonlinParams read_nonlin_params(const ConfigSection& s) {
    s.reject_unknown({"L", "horizon", "samples", "step", "grid_nodes", "grid_half_width"});
    NonlinParams p;
    p.L = s.positive("L", p.L);
    p.horizon = s.positive("horizon", p.horizon);
    p.samples = s.count("samples", p.samples);
    p.step = s.positive("step", p.step);
    p.grid_nodes = s.count("grid_nodes", p.grid_nodes);
    p.grid_half_width = s.positive("grid_half_width", p.grid_half_width);
    return p;
}

CascadeParams read_cascade_params(const ConfigSection& s) {
    s.reject_unknown({"epsilon", "horizon", "levels", "samples", "dx", "mc_step", "root_tolerance"});
    CascadeParams p;
    p.epsilon = s.positive("epsilon", p.epsilon);
    p.horizon = s.positive("horizon", p.horizon);
    p.levels = s.integers("levels", p.levels);
    for (int m : p.levels)
        if (m < 1) throw ConfigurationError(s.where("levels") + ": 'levels' must be >= 1");
    p.samples = s.count("samples", p.samples);
    p.dx = s.positive("dx", p.dx);
    p.mc_step = s.positive("mc_step", p.mc_step);
    p.root_tolerance = s.positive("root_tolerance", p.root_tolerance);
    return p;
}

ComparisonParams read_comparison_params(const ConfigSection& s) {
    s.reject_unknown({"epsilon", "horizon", "m", "points", "samples"});
    ComparisonParams p;
    p.epsilon = s.positive("epsilon", p.epsilon);
    p.horizon = s.positive("horizon", p.horizon);
    p.m = int(s.count("m", std::size_t(p.m)));
    p.points = s.count("points", p.points);
    p.samples = s.count("samples", p.samples);
    return p;
}

ShjbParams read_shjb_params(const ConfigSection& s) {
    s.reject_unknown({"samples", "step", "discount", "epsilons"});
    ShjbParams p;
    p.samples = s.count("samples", p.samples);
    p.step = s.positive("step", p.step);
    p.discount = s.number("discount", p.discount);
    p.epsilons = s.numbers("epsilons", p.epsilons);
    return p;
}

IsaacsParams read_isaacs_params(const ConfigSection& s) {
    s.reject_unknown({"stages", "substeps", "samples", "epsilon", "sigma", "payoff"});
    IsaacsParams p;
    p.stages = int(s.count("stages", std::size_t(p.stages)));
    p.substeps = int(s.count("substeps", std::size_t(p.substeps)));
    p.samples = s.count("samples", p.samples);
    p.epsilon = s.positive("epsilon", p.epsilon);
    p.sigma = s.positive("sigma", p.sigma);
    p.payoff = s.matrix("payoff", p.payoff);
    return p;
}

}  // namespace pmlab
