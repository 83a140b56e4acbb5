#include <doctest.h>

#include <string>

#include "pmlab/config.hpp"
#include "pmlab/errors.hpp"

using namespace pmlab;

namespace {

std::string message_of(const std::string& text) {
    try {
        const auto cfg = parse_config(text, "run.yaml");
        read_cascade_params(cfg.params);
    } catch (const ConfigurationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config: globals and defaults") {
    const auto cfg = parse_config("command: cascade\nseed: 9\nworkers: 2\nparams:\n  samples: 50\n");
    CHECK(cfg.command == "cascade");
    REQUIRE(cfg.seed.has_value());
    CHECK(*cfg.seed == 9u);
    CHECK(cfg.workers == 2);
    const auto p = read_cascade_params(cfg.params);
    CHECK(p.samples == 50u);
    CHECK(p.epsilon == CascadeParams{}.epsilon);
    CHECK(p.levels == CascadeParams{}.levels);
}

TEST_CASE("config: empty text keeps every default and has no seed") {
    const auto cfg = parse_config("");
    CHECK_FALSE(cfg.seed.has_value());
    CHECK(read_shjb_params(cfg.params).samples == ShjbParams{}.samples);
}

TEST_CASE("config: unknown key names its line") {
    const auto msg = message_of("command: cascade\nparams:\n  epsilon: 0.25\n  sampels: 10\n");
    CHECK(msg.find("run.yaml:4:") != std::string::npos);
    CHECK(msg.find("sampels") != std::string::npos);
}

TEST_CASE("config: physical parameters must be positive") {
    const auto msg = message_of("params:\n  epsilon: -0.25\n");
    CHECK(msg.find("run.yaml:2:") != std::string::npos);
    CHECK(msg.find("positive") != std::string::npos);
    CHECK(message_of("params:\n  samples: 2.5\n").find("integer") != std::string::npos);
    CHECK(message_of("params:\n  levels: [1, 0]\n").find("levels") != std::string::npos);
}

TEST_CASE("config: type errors and syntax errors carry positions") {
    CHECK(message_of("params:\n  dx: fine\n").find("run.yaml:2:") != std::string::npos);
    const auto msg = message_of("params:\n  dx: [0.1\n");
    CHECK(msg.find("run.yaml:") == 0);
    CHECK_THROWS_AS(parse_config("seed: -1\n"), ConfigurationError);
    CHECK_THROWS_AS(parse_config("colour: red\n"), ConfigurationError);
}

TEST_CASE("config: payoff rows must be rectangular") {
    const auto cfg = parse_config("params:\n  payoff: [[1, 2], [3]]\n");
    CHECK_THROWS_AS(read_isaacs_params(cfg.params), ConfigurationError);
    const auto ok = parse_config("params:\n  payoff: [[1, 2], [3, 4]]\n");
    CHECK(read_isaacs_params(ok.params).payoff[1][0] == 3.0);
}
