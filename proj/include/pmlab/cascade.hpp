#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pmlab/cone_pde.hpp"
#include "pmlab/hitting.hpp"
#include "pmlab/nonlinear_expectation.hpp"
#include "pmlab/path.hpp"

namespace pmlab {

// markovian_features: xi and G see the path only through its current and terminal values,
// so v_n depends on pi_n only through (t_n, sum of increments).
enum class ProblemClass { markovian_features, path_dependent };

const char* to_string(ProblemClass c);

// What the generator sees of the frozen path: omega^{pi_n} ends at value `sum` at time t_n.
// The x argument of the generator is the increment since t_n.
struct FrozenPath {
    double t_n = 0.0;
    double sum = 0.0;
    const Partition* pi = nullptr;  // path_dependent mode only
};

struct FrozenProblem {
    std::string name;
    ProblemClass cls = ProblemClass::markovian_features;
    double L = 0.5;
    double C0 = 0.0;
    double horizon = 1.0;
    std::function<Generator(const FrozenPath&)> generator;
    std::function<double(double)> terminal;  // features: xi = terminal(omega_T)
    PathFunctional xi;                       // path_dependent: xi(omega)

    double slope() const { return L + 1.0; }
    double xi_of(const SampledPath& omega) const;
    void validate() const;
};

// d = 1 heat problem: G = gamma / 2, xi = terminal(omega_T).
FrozenProblem heat_problem(std::function<double(double)> terminal, double horizon);

struct CascadeConfig {
    double epsilon = 0.25;
    int m = 3;
    double dx = 0.025;
    double dt = 0.0;  // 0 picks the CFL default
    double dtau = 0.01;
    double dS = 0.025;
    int boundary_samples = 4;  // per lateral side, path_dependent mode
    double quantum = 0.0;      // memo key rounding, 0 means dx / 4
    std::vector<double> discounts;  // base-layer discount catalog, empty means {-L, 0, L}
    std::size_t samples = 1000;
    double mc_step = 5e-3;
    std::uint64_t seed = 1;
    std::size_t max_solves = 200000;

    void validate() const;
    double q() const { return quantum > 0.0 ? quantum : dx / 4.0; }
    double grid_tolerance() const { return 2.0 * std::max(dx, dS); }
};

enum class Bound { upper, lower };

const char* to_string(Bound b);

struct BaseEstimate {
    double upper = 0.0;
    double lower = 0.0;
    double upper_se = 0.0;
    double lower_se = 0.0;
    std::string upper_arg;
    std::string lower_arg;
};

// Both bounding representations at (pi, t, x) from one simulation pass.
BaseEstimate theta_base(const Partition& pi, double t, double x, const FrozenProblem& problem,
                        const CascadeConfig& config, std::uint64_t seed);
MCEstimate theta_base_upper(const Partition& pi, double t, double x, const FrozenProblem& problem,
                            const CascadeConfig& config, std::uint64_t seed);
MCEstimate theta_base_lower(const Partition& pi, double t, double x, const FrozenProblem& problem,
                            const CascadeConfig& config, std::uint64_t seed);

struct LevelStats {
    int level = 0;
    std::size_t solves = 0;
    double max_gap = 0.0;  // over nodes evaluated for both bounds
};

struct BaseTable;
struct CascadeState;

class CascadeSolution {
public:
    double root(Bound b) const;
    double upper_root() const { return root(Bound::upper); }
    double lower_root() const { return root(Bound::lower); }
    double gap() const { return upper_root() - lower_root(); }
    // Base-layer stderr carried through the comparison bound e^{L T}.
    double root_stderr(Bound b) const;
    double max_base_stderr(Bound b) const;

    // theta_i^{eps,m}(pi_i; t, x) with i = pi.size(); levels past m fall back to the base layer.
    double theta(Bound b, const Partition& pi, double t, double x) const;
    // u^eps(t, omega): locate the active cone of omega at t and evaluate its level.
    double evaluate_u_eps(Bound b, double t, const SampledPath& omega) const;

    std::vector<LevelStats> level_stats() const;
    std::size_t solves() const;
    const FrozenProblem& problem() const;
    const CascadeConfig& config() const;
    std::shared_ptr<BaseTable> base_table() const;

private:
    friend CascadeSolution cascade_solve(const FrozenProblem&, const CascadeConfig&,
                                         std::shared_ptr<BaseTable>);
    std::shared_ptr<CascadeState> state_;
};

// Pass the base table of an earlier solve (same problem and base parameters) to reuse it.
CascadeSolution cascade_solve(const FrozenProblem& problem, const CascadeConfig& config,
                              std::shared_ptr<BaseTable> base = nullptr);

struct ComparisonPoint {
    double t = 0.0;
    SampledPath omega;
};

struct ComparisonReport {
    double worst_margin = 0.0;  // min over points and bounds of high - low (+ tolerance)
    std::size_t violations = 0;
    std::size_t checked = 0;
    double tolerance = 0.0;
    double root_diff_upper = 0.0;
    double root_diff_lower = 0.0;
};

ComparisonReport verify_comparison(const FrozenProblem& low, const FrozenProblem& high,
                                   const CascadeConfig& config,
                                   const std::vector<ComparisonPoint>& points);

// u^eps - rho (T - t) and the matching shifted theta_n.
class ShiftedSolution {
public:
    ShiftedSolution(CascadeSolution base, double rho);
    double theta(Bound b, const Partition& pi, double t, double x) const;
    double evaluate_u_eps(Bound b, double t, const SampledPath& omega) const;
    double rho() const { return rho_; }

private:
    CascadeSolution base_;
    double rho_;
};

ShiftedSolution modulus_shift(const CascadeSolution& solution, double rho);

struct CompatibilityReport {
    double max_deviation = 0.0;
    std::size_t points = 0;
};

// |v_n(pi; s, xbar) - v_{n+1}(pi + (s, xbar); s, 0)| at sampled lateral boundary points.
using ThetaFn = std::function<double(const Partition&, double, double)>;
CompatibilityReport compatibility_check(const ThetaFn& theta, int level, double epsilon, double L1,
                                        double horizon, std::size_t n_points, std::uint64_t seed);

}  // namespace pmlab
