#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pmlab {

// Pipelines behind the command line, the acceptance binary and the Python module. Every
// result is an ordered JSON object with a boolean "pass"; wall-clock times are never part of it.
using Json = nlohmann::ordered_json;

struct ConeExampleParams {
    double epsilon = 0.5;
    double L1 = 1.0;
    double dx = 1.0 / 200.0;
};
Json cone_example(const ConeExampleParams& p);

struct RestartParams {
    std::size_t cases = 1000;
    std::uint64_t seed = 1;
};
Json markov_restart_suite(const RestartParams& p);

struct RegularityParams {
    double L = 1.0;
    std::size_t pairs = 20;
    std::size_t samples = 10000;
    double step = 1e-3;
    std::uint64_t seed = 1;
};
// Upper expectation of |H^{0,x1,R1} - H^{0,x2,R2}| against |dx| + |dR|.
Json hitting_regularity(const RegularityParams& p);

struct TailParams {
    std::vector<double> epsilons{0.2, 0.4};
    double L = 0.5;
    double horizon = 1.0;
    std::size_t samples = 10000;
    double step = 1e-3;
    int n_max = 20;
    std::uint64_t seed = 1;
};
// Wiener-measure frequencies of {H_n < T} with c fitted at n = 1, plus the hitting variants.
// "pass" gates monotonicity and termination; "tail_bound_holds" reports the fitted bound.
Json hitting_tails(const TailParams& p);

struct OracleParams {
    double epsilon = 0.5;
    double L = 1.0;
    double L1 = 2.0;
    double dx = 0.01;
    std::size_t samples = 100000;
    double step = 1e-3;
    double tolerance = 5e-2;
    std::uint64_t seed = 1;
};
// mc_bounding_value against solve_cone(gbar) for h = 1, s, |x|.
Json oracle_equivalence(const OracleParams& p);

struct NonlinParams {
    double L = 1.0;
    double horizon = 1.0;
    std::size_t samples = 20000;
    double step = 1e-3;
    std::size_t grid_nodes = 601;
    double grid_half_width = 6.0;
    std::uint64_t seed = 1;
};
Json nonlinear_1d(const NonlinParams& p);

struct CascadeParams {
    double epsilon = 0.25;
    double horizon = 0.15;
    std::vector<int> levels{1, 2, 3, 4};
    std::size_t samples = 1000;
    double dx = 0.025;
    double mc_step = 5e-3;
    double root_tolerance = 0.1;
    std::uint64_t seed = 1;
};
// Heat problem with xi = omega_T^2: sandwich across levels and the root at the checked level.
Json cascade_heat(const CascadeParams& p);

struct ComparisonParams {
    double epsilon = 0.25;
    double horizon = 0.15;
    int m = 2;
    std::size_t points = 10;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
};
Json cascade_comparison(const ComparisonParams& p);

struct ShjbParams {
    std::size_t samples = 4000;
    double step = 1e-2;
    double discount = 0.8;
    std::vector<double> epsilons{0.4, 0.2, 0.1};
    std::uint64_t seed = 1;
};
Json shjb_checks(const ShjbParams& p);

struct IsaacsParams {
    int stages = 3;
    int substeps = 8;
    std::size_t samples = 64;
    double epsilon = 0.2;
    double sigma = 0.8;
    std::vector<std::vector<double>> payoff{{3.0, 1.0}, {4.0, 2.0}};
    std::uint64_t seed = 1;
};
// Value of the matrix game (direct and frozen), Isaacs gap, and the matching-pennies control.
Json isaacs_checks(const IsaacsParams& p);

}  // namespace pmlab
