#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pmlab/config.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/parallel.hpp"

using namespace pmlab;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string output;
    std::string config;
    std::string csv;
};

ExperimentConfig resolve(const Globals& g, const std::string& command) {
    ExperimentConfig cfg = g.config.empty() ? parse_config("") : load_config(g.config);
    if (!cfg.command.empty() && cfg.command != command)
        throw ConfigurationError(cfg.source + ": config is for '" + cfg.command + "', not '" + command + "'");
    if (g.seed) cfg.seed = g.seed;
    if (g.workers > 0) cfg.workers = g.workers;
    if (!g.output.empty()) cfg.output = g.output;
    if (cfg.workers > 0) set_worker_count(cfg.workers);
    return cfg;
}

std::uint64_t require_seed(const ExperimentConfig& cfg, const std::string& command) {
    if (!cfg.seed) throw ConfigurationError(command + ": a seed is required (--seed or 'seed' in the config)");
    return *cfg.seed;
}

void emit(const ExperimentConfig& cfg, const Json& j) {
    const std::string text = j.dump(2) + "\n";
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output);
    if (!out) throw ConfigurationError(cfg.output + ": cannot write");
    out << text;
}

void write_tail_csv(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigurationError(path + ": cannot write");
    out << "epsilon,n,P,stderr,bound\n";
    for (const auto& e : j["epsilons"])
        for (const auto& r : e["rows"])
            out << e["epsilon"].dump() << ',' << r["n"].dump() << ',' << r["P"].dump() << ','
                << r["stderr"].dump() << ',' << r["bound"].dump() << '\n';
}

Json verify_suite(const std::string& suite, std::uint64_t seed) {
    Json checks;
    auto run_hitting = [&] {
        RestartParams r;
        r.seed = seed;
        checks["markov_restart"] = markov_restart_suite(r);
        RegularityParams g;
        g.pairs = 5;
        g.samples = 2000;
        g.seed = seed;
        checks["regularity"] = hitting_regularity(g);
        TailParams t;
        t.samples = 2000;
        t.seed = seed;
        checks["tails"] = hitting_tails(t);
    };
    auto run_nonlin = [&] {
        NonlinParams p;
        p.samples = 5000;
        p.seed = seed;
        checks["nonlinear_1d"] = nonlinear_1d(p);
    };
    auto run_cone = [&] {
        checks["cone_example"] = cone_example({});
        OracleParams o;
        o.samples = 20000;
        o.seed = seed;
        checks["oracle_equivalence"] = oracle_equivalence(o);
    };
    auto run_cascade = [&] {
        CascadeParams c;
        c.levels = {1, 2, 3};
        c.seed = seed;
        checks["cascade_heat"] = cascade_heat(c);
        ComparisonParams q;
        q.points = 4;
        q.seed = seed;
        checks["comparison"] = cascade_comparison(q);
    };
    auto run_shjb = [&] {
        ShjbParams p;
        p.seed = seed;
        checks["shjb"] = shjb_checks(p);
    };
    auto run_isaacs = [&] {
        IsaacsParams p;
        p.seed = seed;
        checks["isaacs"] = isaacs_checks(p);
    };
    if (suite == "path" || suite == "hitting") {
        run_hitting();
    } else if (suite == "nonlinear_expectation") {
        run_nonlin();
    } else if (suite == "cone_pde") {
        run_cone();
    } else if (suite == "cascade") {
        run_cascade();
    } else if (suite == "shjb") {
        run_shjb();
    } else if (suite == "isaacs") {
        run_isaacs();
    } else if (suite == "all") {
        run_hitting();
        run_nonlin();
        run_cone();
        run_cascade();
        run_shjb();
        run_isaacs();
    } else {
        throw ConfigurationError("verify: unknown suite '" + suite + "'");
    }
    bool pass = true;
    for (const auto& kv : checks.items()) pass = pass && kv.value()["pass"].get<bool>();
    Json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["checks"] = checks;
    j["pass"] = pass;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pmlab: path-dependent PDE experiments"};
    app.require_subcommand(1);
    Globals g;
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--seed", g.seed, "RNG seed (required for stochastic runs)");
        sub->add_option("--workers", g.workers, "worker threads (default PMLAB_WORKERS or all cores)");
        sub->add_option("--output,-o", g.output, "write the JSON summary here instead of stdout");
        sub->add_option("--config,-c", g.config, "YAML config file");
    };

    auto* hs = app.add_subcommand("hitting-stats", "tail frequencies of the hitting sequence");
    add_globals(hs);
    hs->add_option("--csv", g.csv, "also write the (epsilon, n, P) table as CSV");

    auto* ne = app.add_subcommand("nonlin-exp", "1-d upper expectations against the HJB oracle");
    add_globals(ne);

    auto* sc = app.add_subcommand("solve-cone", "cone PDE example, or the Monte Carlo cross-check");
    add_globals(sc);
    bool oracle = false;
    sc->add_flag("--oracle", oracle, "compare with mc_bounding_value");

    auto* ca = app.add_subcommand("cascade", "cascade bounds for the heat problem");
    add_globals(ca);
    bool comparison = false;
    ca->add_flag("--comparison", comparison, "run the comparison check instead of the sandwich");

    auto* sh = app.add_subcommand("shjb", "SHJB closed-form and freezing checks");
    add_globals(sh);

    auto* is = app.add_subcommand("isaacs", "matrix game values and the Isaacs condition");
    add_globals(is);

    auto* ve = app.add_subcommand("verify", "bundled property suites");
    add_globals(ve);
    std::string suite = "all";
    ve->add_option("--suite", suite, "path|hitting|nonlinear_expectation|cone_pde|cascade|shjb|isaacs|all");

    CLI11_PARSE(app, argc, argv);

    try {
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        const auto cfg = resolve(g, name);
        Json result;
        if (name == "hitting-stats") {
            auto p = read_tail_params(cfg.params);
            p.seed = require_seed(cfg, name);
            result = hitting_tails(p);
            if (!g.csv.empty()) write_tail_csv(g.csv, result);
        } else if (name == "nonlin-exp") {
            auto p = read_nonlin_params(cfg.params);
            p.seed = require_seed(cfg, name);
            result = nonlinear_1d(p);
        } else if (name == "solve-cone") {
            if (oracle) {
                auto p = read_oracle_params(cfg.params);
                p.seed = require_seed(cfg, name);
                result = oracle_equivalence(p);
            } else {
                result = cone_example(read_cone_params(cfg.params));
            }
        } else if (name == "cascade") {
            if (comparison) {
                auto p = read_comparison_params(cfg.params);
                p.seed = require_seed(cfg, name);
                result = cascade_comparison(p);
            } else {
                auto p = read_cascade_params(cfg.params);
                p.seed = require_seed(cfg, name);
                result = cascade_heat(p);
            }
        } else if (name == "shjb") {
            auto p = read_shjb_params(cfg.params);
            p.seed = require_seed(cfg, name);
            result = shjb_checks(p);
        } else if (name == "isaacs") {
            auto p = read_isaacs_params(cfg.params);
            p.seed = require_seed(cfg, name);
            result = isaacs_checks(p);
        } else {
            cfg.params.reject_unknown({});
            result = verify_suite(suite, require_seed(cfg, name));
        }
        emit(cfg, result);
        return result["pass"].get<bool>() ? 0 : 1;
    } catch (const ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
