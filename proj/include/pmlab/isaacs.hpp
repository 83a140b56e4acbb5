#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pmlab/nonlinear_expectation.hpp"
#include "pmlab/path.hpp"
#include "pmlab/shjb.hpp"

namespace pmlab {

// Zero-sum game on a scalar state X_s = omega_t + int sigma dB. alpha in U maximizes, beta in V
// minimizes; Y solves the BSDE with driver f and terminal xi(X).
struct GameSpec {
    std::string name;
    std::vector<double> U{0.0};
    std::vector<double> V{0.0};
    double horizon = 1.0;
    std::function<double(double t, const PathView& w, double a, double b)> sigma;
    std::function<double(double t, const PathView& w, double y, double z, double a, double b)> f;
    std::function<double(const PathView& w)> xi;
    // declared bounds: |sigma| <= sigma_bound, |f(.,0,0,.,.)| <= f_bound, |xi| <= xi_bound,
    // f Lipschitz in (y, z) with constant lipschitz
    double sigma_bound = 1.0;
    double f_bound = 1.0;
    double xi_bound = 1.0;
    double lipschitz = 0.0;

    double sigma_at(double t, const PathView& w, double a, double b) const;
    double f_at(double t, const PathView& w, double y, double z, double a, double b) const;
    void validate() const;
};

struct GameConfig {
    int stages = 2;        // equal time stages, each branching on a 3-point quadrature
    int depth = 0;         // decision stages of the strategy player, 0 means all stages
    int substeps = 8;      // Euler steps per stage
    std::size_t samples = 64;  // Brownian-bridge shapes inside stages
    double epsilon = 0.2;  // cascade cones
    double L1 = 2.0;
    double max_leaves = 2e6;  // per-sample tree budget

    int decision_depth() const { return depth > 0 ? depth : stages; }
    void validate(const GameSpec& spec) const;
};

// Decision times of the strategy player. The move at stage k may read the opponent moves
// b_0..b_k (the current one included) and the quadrature branches j_0..j_{k-1}.
class StrategyMesh {
public:
    StrategyMesh(int depth, std::size_t n_own, std::size_t n_opp);

    int depth() const { return depth_; }
    std::size_t info_sets(int k) const;
    std::size_t index(int k, std::span<const int> opp, std::span<const int> branch) const;
    // log of the number of pure strategies, base n_own
    double log_strategy_count() const;

    using Strategy = std::vector<std::vector<int>>;  // [stage][info set] -> own move
    Strategy decode(std::uint64_t code) const;
    // Histories may be longer than k + 1 (resp. k); entries past the decision time are ignored.
    int move(const Strategy& s, int k, std::span<const int> opp, std::span<const int> branch) const;

private:
    int depth_;
    std::size_t n_own_, n_opp_;
};

struct GameEstimate {
    MCEstimate upper;
    MCEstimate lower;
    // cascade runs only: sup_s |X_s - frozen path at s| over every simulated branch, and the
    // same distance to the interpolation of the hitting knots
    double freeze_error = 0.0;
    double interp_error = 0.0;
    std::size_t freeze_violations = 0;  // branches with freeze_error > epsilon
    std::size_t branches = 0;
};

GameEstimate game_values(const GameSpec& spec, double t, const SampledPath& omega,
                         const GameConfig& config, std::uint64_t seed);
MCEstimate game_value_upper(const GameSpec& spec, double t, const SampledPath& omega,
                            const GameConfig& config, std::uint64_t seed);
MCEstimate game_value_lower(const GameSpec& spec, double t, const SampledPath& omega,
                            const GameConfig& config, std::uint64_t seed);

// Tree values for one bridge sample, by backward induction.
struct TreeValue {
    double upper = 0.0;
    double lower = 0.0;
};
TreeValue game_tree_value(const GameSpec& spec, double t, const SampledPath& omega,
                          const GameConfig& config, std::uint64_t seed, std::size_t sample);

// Same sample by enumerating every mesh strategy against every adapted opponent control.
// Exponential; for small trees only.
TreeValue game_tree_value_enumerated(const GameSpec& spec, double t, const SampledPath& omega,
                                     const GameConfig& config, std::uint64_t seed,
                                     std::size_t sample);

// Frozen-path version at (pi; t, x): sigma and f see the interpolation stopped at the last cone
// exit, xi sees the interpolation of the exit knots.
GameEstimate game_cascade_value(const GameSpec& spec, const Partition& pi, double t, double x,
                                const GameConfig& config, std::uint64_t seed);

struct IsaacsPoint {
    double t = 0.0;
    SampledPath omega;
    double y = 0.0;
    double z = 0.0;
    double gamma = 0.0;
};

struct IsaacsReport {
    double max_gap = 0.0;  // inf_b sup_a H - sup_a inf_b H, always >= 0
    std::size_t worst = 0;
    std::size_t points = 0;
    double tolerance = 1e-12;
    bool holds = true;
};

std::vector<IsaacsPoint> random_isaacs_points(std::size_t n, double horizon, std::uint64_t seed);
IsaacsReport isaacs_condition_check(const GameSpec& spec, const std::vector<IsaacsPoint>& points,
                                    double tolerance = 1e-12);

struct ValueEqualityReport {
    double upper = 0.0;
    double lower = 0.0;
    double upper_se = 0.0;
    double lower_se = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    double isaacs_gap = 0.0;
    bool isaacs_holds = false;
    bool equal = false;     // |gap| <= tolerance
    bool asserted = false;  // equality is only claimed when the Isaacs condition holds
    bool passed = true;     // !asserted || equal
};

ValueEqualityReport value_equality_check(const GameSpec& spec, double t, const SampledPath& omega,
                                         const GameConfig& config, std::uint64_t seed,
                                         const std::vector<IsaacsPoint>& points);

// Matrix games used by the tests and the CLI: sigma = s, f = r(alpha, beta) on index grids.
GameSpec matrix_game(std::vector<std::vector<double>> payoff, double sigma, double horizon);

}  // namespace pmlab
