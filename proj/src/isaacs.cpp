#include "pmlab/isaacs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pmlab/errors.hpp"
#include "pmlab/hitting.hpp"
#include "pmlab/parallel.hpp"

namespace pmlab {

double GameSpec::sigma_at(double t, const PathView& w, double a, double b) const {
    return sigma ? sigma(t, w, a, b) : 0.0;
}

double GameSpec::f_at(double t, const PathView& w, double y, double z, double a, double b) const {
    return f ? f(t, w, y, z, a, b) : 0.0;
}

void GameSpec::validate() const {
    PMLAB_REQUIRE(!U.empty() && !V.empty(), PreconditionError, "game: empty control set");
    PMLAB_REQUIRE(horizon > 0.0, PreconditionError, "game: horizon must be positive");
    PMLAB_REQUIRE(static_cast<bool>(xi), PreconditionError, "game: terminal functional missing");
    PMLAB_REQUIRE(sigma_bound >= 0.0 && f_bound >= 0.0 && xi_bound >= 0.0 && lipschitz >= 0.0,
                  PreconditionError, "game: bounds must be nonnegative");
}

void GameConfig::validate(const GameSpec& spec) const {
    PMLAB_REQUIRE(stages >= 1, ConfigurationError, "game: stages must be >= 1");
    PMLAB_REQUIRE(depth >= 0 && depth <= stages, ConfigurationError,
                  "game: depth must lie in [0, stages]");
    PMLAB_REQUIRE(substeps >= 1, ConfigurationError, "game: substeps must be >= 1");
    PMLAB_REQUIRE(samples >= 1, ConfigurationError, "game: samples must be >= 1");
    PMLAB_REQUIRE(epsilon > 0.0 && L1 > 0.0, ConfigurationError,
                  "game: epsilon and L1 must be positive");
    PMLAB_REQUIRE(max_leaves >= 1.0, ConfigurationError, "game: max_leaves must be >= 1");
    spec.validate();
}

StrategyMesh::StrategyMesh(int depth, std::size_t n_own, std::size_t n_opp)
    : depth_(depth), n_own_(n_own), n_opp_(n_opp) {
    PMLAB_REQUIRE(depth >= 1 && n_own >= 1 && n_opp >= 1, PreconditionError,
                  "strategy mesh: depth and set sizes must be >= 1");
}

std::size_t StrategyMesh::info_sets(int k) const {
    std::size_t n = 1;
    for (int i = 0; i <= k; ++i) n *= n_opp_;
    for (int i = 0; i < k; ++i) n *= 3;
    return n;
}

std::size_t StrategyMesh::index(int k, std::span<const int> opp, std::span<const int> branch) const {
    PMLAB_REQUIRE(k >= 0 && k < depth_, DomainError, "strategy mesh: stage out of range");
    PMLAB_REQUIRE(opp.size() >= std::size_t(k + 1) && branch.size() >= std::size_t(k),
                  DomainError, "strategy mesh: history too short");
    std::size_t idx = 0;
    for (int i = 0; i <= k; ++i) idx = idx * n_opp_ + std::size_t(opp[std::size_t(i)]);
    for (int i = 0; i < k; ++i) idx = idx * 3 + std::size_t(branch[std::size_t(i)]);
    return idx;
}

double StrategyMesh::log_strategy_count() const {
    double total = 0.0;
    for (int k = 0; k < depth_; ++k) total += double(info_sets(k));
    return total;
}

StrategyMesh::Strategy StrategyMesh::decode(std::uint64_t code) const {
    Strategy s(static_cast<std::size_t>(depth_));
    for (int k = 0; k < depth_; ++k) {
        s[std::size_t(k)].resize(info_sets(k));
        for (auto& m : s[std::size_t(k)]) {
            m = int(code % n_own_);
            code /= n_own_;
        }
    }
    return s;
}

int StrategyMesh::move(const Strategy& s, int k, std::span<const int> opp,
                       std::span<const int> branch) const {
    return s[std::size_t(k)][index(k, opp, branch)];
}

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kZeta[3] = {-kSqrt3, 0.0, kSqrt3};
const double kWeight[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};

// Controlled path. Direct mode hands the coefficients the simulated path itself; frozen mode
// hands them the knots (history, cone exits) flat after the last exit.
struct Walker {
    bool frozen = false;
    std::vector<double> times, values;
    std::vector<double> fine_t, fine_x;  // frozen mode: the simulated path, for diagnostics
    double X = 0.0;
    double r = 0.0;
    double at = 0.0, ax = 0.0;  // anchor of the active cone
    double eps = 0.0, L1 = 0.0;
    double freeze_err = 0.0;

    PathView view() const { return {&times, &values}; }

    void push(double s, double x) {
        if (s <= times.back()) {
            values.back() = x;
        } else {
            times.push_back(s);
            values.push_back(x);
        }
    }

    // Move X by dX linearly over [r, r + h].
    void step(double h, double dX) {
        const double end = r + h;
        if (!frozen) {
            X += dX;
            r = end;
            times.push_back(r);
            values.push_back(X);
            return;
        }
        const double vel = dX / h;
        double s = r;
        double y = X - ax;
        for (int guard = 0; guard < 100000; ++guard) {
            const double left = end - s;
            const double yn = y + vel * left;
            if (std::fabs(yn) + L1 * (end - at) < eps) break;
            const double c = eps - L1 * (s - at);
            const double u = c <= std::fabs(y) ? 0.0 : segment_crossing(&y, &vel, 1, c, L1, 0.0, left);
            const double H = s + u;
            const double xh = ax + y + vel * u;
            freeze_err = std::max(freeze_err, std::fabs(xh - ax));
            push(H, xh);
            at = H;
            ax = xh;
            y = 0.0;
            s = H;
            if (end - s <= 0.0) break;
        }
        X += dX;
        r = end;
        freeze_err = std::max(freeze_err, std::fabs(X - ax));
        fine_t.push_back(r);
        fine_x.push_back(X);
    }

    // Path handed to xi. Frozen mode closes the exit knots with (T, X_T).
    PathView terminal(double T) {
        if (frozen) push(T, X);
        return view();
    }

    // sup |X - interpolation of the exit knots| over the fine knots.
    double interp_error() const {
        double worst = 0.0;
        PathView v{&times, &values};
        for (std::size_t i = 0; i < fine_t.size(); ++i)
            worst = std::max(worst, std::fabs(fine_x[i] - v.value(fine_t[i])));
        return worst;
    }
};

struct Stats {
    double freeze = 0.0;
    double interp = 0.0;
    std::size_t violations = 0;
    std::size_t branches = 0;
};

enum class Role { upper, lower };

// One bridge sample: the tree game on that sample.
class Tree {
public:
    Tree(const GameSpec& spec, const GameConfig& cfg, double t, std::vector<double> bridge)
        : spec_(spec), cfg_(cfg), t_(t), K_(cfg.stages), m_(cfg.decision_depth()),
          n_(cfg.substeps), dt_((spec.horizon - t) / double(cfg.stages)),
          bridge_(std::move(bridge)) {}

    // Strategy player: alpha for upper, beta for lower. It may change its move only on the
    // first m stages and holds it afterwards.
    double solve(Role role, const Walker& w, Stats* stats) {
        stats_ = stats;
        return node(role, 0, w, -1);
    }

    // Fixed strategy against a fixed adapted control (enumeration oracle).
    double evaluate(Role role, const Walker& w, const StrategyMesh& mesh,
                    const StrategyMesh::Strategy& strategy, const std::vector<int>& control) {
        std::vector<int> opp, branch;
        return fixed(role, 0, w, mesh, strategy, control, opp, branch, -1, 0);
    }

    std::size_t own_size(Role role) const { return role == Role::upper ? spec_.U.size() : spec_.V.size(); }
    std::size_t opp_size(Role role) const { return role == Role::upper ? spec_.V.size() : spec_.U.size(); }

private:
    Walker advance(const Walker& w, int k, int j, double a, double b) const {
        Walker c = w;
        const double h = dt_ / double(n_);
        const double drift = kZeta[j] * std::sqrt(dt_) / double(n_);
        for (int i = 0; i < n_; ++i) {
            const double dB = drift + bridge_[std::size_t(k * n_ + i)];
            const double sig = spec_.sigma_at(c.r, c.view(), a, b);
            c.step(h, sig * dB);
        }
        return c;
    }

    double leaf(Walker& w) {
        if (stats_ && w.frozen) {
            stats_->freeze = std::max(stats_->freeze, w.freeze_err);
            if (w.freeze_err > w.eps * (1.0 + 1e-12)) ++stats_->violations;
        }
        const double T = spec_.horizon;
        const PathView v = w.terminal(T);
        if (stats_) {
            ++stats_->branches;
            if (w.frozen) stats_->interp = std::max(stats_->interp, w.interp_error());
        }
        return spec_.xi(v);
    }

    // Stage value for the pair (a, b) given the three child values.
    double combine(int k, const Walker& w, const double* child, double a, double b) const {
        double mean = 0.0, z = 0.0;
        for (int j = 0; j < 3; ++j) {
            mean += kWeight[j] * child[j];
            z += kWeight[j] * kZeta[j] * child[j];
        }
        z /= std::sqrt(dt_);
        const double s = t_ + double(k) * dt_;
        return mean + dt_ * spec_.f_at(s, w.view(), mean, z, a, b);
    }

    double control(Role role, std::size_t own, std::size_t opp, bool a_side) const {
        const bool own_is_alpha = role == Role::upper;
        if (a_side) return own_is_alpha ? spec_.U[own] : spec_.U[opp];
        return own_is_alpha ? spec_.V[opp] : spec_.V[own];
    }

    double node(Role role, int k, const Walker& w, int held) {
        if (k == K_) {
            Walker c = w;
            return leaf(c);
        }
        const std::size_t no = own_size(role), np = opp_size(role);
        // upper: min over beta of max over alpha; lower: max over alpha of min over beta
        const double sign = role == Role::upper ? 1.0 : -1.0;
        double outer = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < np; ++p) {
            double inner = -std::numeric_limits<double>::infinity();
            for (std::size_t o = 0; o < no; ++o) {
                if (k >= m_ && int(o) != held) continue;
                const double a = control(role, o, p, true), b = control(role, o, p, false);
                double child[3];
                for (int j = 0; j < 3; ++j) child[j] = node(role, k + 1, advance(w, k, j, a, b), int(o));
                inner = std::max(inner, sign * combine(k, w, child, a, b));
            }
            outer = std::min(outer, inner);
        }
        return sign * outer;
    }

    double fixed(Role role, int k, const Walker& w, const StrategyMesh& mesh,
                 const StrategyMesh::Strategy& strategy, const std::vector<int>& ctl,
                 std::vector<int>& opp, std::vector<int>& branch, int held, std::size_t bidx) {
        if (k == K_) {
            Walker c = w;
            return leaf(c);
        }
        // ctl is laid out stage by stage, 3^k entries for stage k
        std::size_t offset = 0, width = 1;
        for (int i = 0; i < k; ++i) {
            offset += width;
            width *= 3;
        }
        const int p = ctl[offset + bidx];
        opp.push_back(p);
        const int o = k < m_ ? mesh.move(strategy, k, opp, branch) : held;
        const double a = control(role, std::size_t(o), std::size_t(p), true);
        const double b = control(role, std::size_t(o), std::size_t(p), false);
        double child[3];
        for (int j = 0; j < 3; ++j) {
            branch.push_back(j);
            child[j] = fixed(role, k + 1, advance(w, k, j, a, b), mesh, strategy, ctl, opp, branch, o,
                             bidx * 3 + std::size_t(j));
            branch.pop_back();
        }
        opp.pop_back();
        return combine(k, w, child, a, b);
    }

    const GameSpec& spec_;
    const GameConfig& cfg_;
    double t_;
    int K_, m_, n_;
    double dt_;
    std::vector<double> bridge_;
    Stats* stats_ = nullptr;
};

// Brownian-bridge increments inside each stage: they sum to zero over a stage.
std::vector<double> bridge_increments(const GameConfig& cfg, double dt, std::uint64_t seed,
                                      std::size_t sample) {
    const int K = cfg.stages, n = cfg.substeps;
    std::vector<double> out(std::size_t(K * n), 0.0);
    if (n == 1) return out;
    Rng rng = sample_rng(seed, sample);
    std::normal_distribution<double> normal;
    const double sq = std::sqrt(dt / double(n));
    std::vector<double> W(std::size_t(n) + 1);
    for (int k = 0; k < K; ++k) {
        W[0] = 0.0;
        for (int i = 0; i < n; ++i) W[std::size_t(i) + 1] = W[std::size_t(i)] + sq * normal(rng);
        const double end = W[std::size_t(n)];
        double prev = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double b = W[std::size_t(i)] - double(i) / double(n) * end;
            out[std::size_t(k * n + i - 1)] = b - prev;
            prev = b;
        }
    }
    return out;
}

double log_leaves(std::size_t own, std::size_t opp, int K, int m) {
    return double(m) * std::log(3.0 * double(own * opp)) + double(K - m) * std::log(3.0 * double(opp));
}

void check_budget(const GameSpec& spec, const GameConfig& cfg) {
    const std::size_t nu = spec.U.size(), nv = spec.V.size();
    auto worst = [&](int m) {
        return std::max(log_leaves(nu, nv, cfg.stages, m), log_leaves(nv, nu, cfg.stages, m));
    };
    const double cap = std::log(cfg.max_leaves);
    if (worst(cfg.decision_depth()) <= cap + 1e-9) return;
    int admissible = 0;
    for (int m = 1; m <= cfg.stages; ++m)
        if (worst(m) <= cap + 1e-9) admissible = m;
    throw BudgetError("game: tree exceeds max_leaves; admissible depth " + std::to_string(admissible),
                      admissible);
}

Walker direct_walker(const SampledPath& omega, double t) {
    PMLAB_REQUIRE(omega.dim() == 1, DimensionError, "game: scalar paths only");
    Walker w;
    for (std::size_t i = 0; i < omega.knot_count() && omega.knot_time(i) < t; ++i) {
        w.times.push_back(omega.knot_time(i));
        w.values.push_back(omega.knot_value(i)[0]);
    }
    w.X = omega.value1(t);
    w.r = t;
    w.times.push_back(t);
    w.values.push_back(w.X);
    return w;
}

Walker frozen_walker(const Partition& pi, double t, double x, double eps, double L1) {
    Walker w;
    w.frozen = true;
    w.times.push_back(0.0);
    w.values.push_back(0.0);
    double S = 0.0;
    for (const auto& p : pi.points) {
        S += p.increment[0];
        w.push(p.time, S);
    }
    w.at = pi.last_time(0.0);
    w.ax = S;
    w.X = S + x;
    w.r = t;
    w.eps = eps;
    w.L1 = L1;
    w.freeze_err = std::fabs(x);
    return w;
}

std::string root_choice(const GameSpec& spec) {
    std::ostringstream os;
    os << "U=" << spec.U.size() << ",V=" << spec.V.size();
    return os.str();
}

GameEstimate run(const GameSpec& spec, double t, const GameConfig& cfg, std::uint64_t seed,
                 const Walker& start) {
    cfg.validate(spec);
    PMLAB_REQUIRE(t >= 0.0 && t < spec.horizon, DomainError, "game: t must lie in [0, T)");
    check_budget(spec, cfg);
    const double dt = (spec.horizon - t) / double(cfg.stages);
    auto mom = chunked_moments(cfg.samples, 6, [&](std::size_t i, double* out) {
        Tree tree(spec, cfg, t, bridge_increments(cfg, dt, seed, i));
        Stats su, sl;
        out[0] = tree.solve(Role::upper, start, &su);
        out[1] = tree.solve(Role::lower, start, &sl);
        out[2] = std::max(su.freeze, sl.freeze);
        out[3] = std::max(su.interp, sl.interp);
        out[4] = double(su.violations + sl.violations);
        out[5] = double(su.branches + sl.branches);
    });
    GameEstimate e;
    e.upper = {mom[0].mean(), mom[0].stderr_of_mean(), cfg.samples, root_choice(spec)};
    e.lower = {mom[1].mean(), mom[1].stderr_of_mean(), cfg.samples, root_choice(spec)};
    e.freeze_error = mom[2].hi;
    e.interp_error = mom[3].hi;
    e.freeze_violations = std::size_t(std::llround(mom[4].sum));
    e.branches = std::size_t(std::llround(mom[5].sum));
    return e;
}

}  // namespace

GameEstimate game_values(const GameSpec& spec, double t, const SampledPath& omega,
                         const GameConfig& config, std::uint64_t seed) {
    return run(spec, t, config, seed, direct_walker(omega, t));
}

MCEstimate game_value_upper(const GameSpec& spec, double t, const SampledPath& omega,
                            const GameConfig& config, std::uint64_t seed) {
    return game_values(spec, t, omega, config, seed).upper;
}

MCEstimate game_value_lower(const GameSpec& spec, double t, const SampledPath& omega,
                            const GameConfig& config, std::uint64_t seed) {
    return game_values(spec, t, omega, config, seed).lower;
}

TreeValue game_tree_value(const GameSpec& spec, double t, const SampledPath& omega,
                          const GameConfig& config, std::uint64_t seed, std::size_t sample) {
    config.validate(spec);
    check_budget(spec, config);
    const double dt = (spec.horizon - t) / double(config.stages);
    Tree tree(spec, config, t, bridge_increments(config, dt, seed, sample));
    const Walker w = direct_walker(omega, t);
    return {tree.solve(Role::upper, w, nullptr), tree.solve(Role::lower, w, nullptr)};
}

TreeValue game_tree_value_enumerated(const GameSpec& spec, double t, const SampledPath& omega,
                                     const GameConfig& config, std::uint64_t seed,
                                     std::size_t sample) {
    config.validate(spec);
    const double dt = (spec.horizon - t) / double(config.stages);
    Tree tree(spec, config, t, bridge_increments(config, dt, seed, sample));
    const Walker w = direct_walker(omega, t);
    const int K = config.stages, m = config.decision_depth();

    auto solve = [&](Role role) {
        const std::size_t no = tree.own_size(role), np = tree.opp_size(role);
        StrategyMesh mesh(m, no, np);
        std::size_t slots = 0, width = 1;
        for (int k = 0; k < K; ++k) {
            slots += width;
            width *= 3;
        }
        const double log_s = mesh.log_strategy_count() * std::log(double(no));
        const double log_c = double(slots) * std::log(double(np));
        if (log_s + log_c > std::log(5e7)) throw BudgetError("game: enumeration too large", 0);
        const auto n_strat = std::uint64_t(std::llround(std::exp(log_s)));
        const auto n_ctl = std::uint64_t(std::llround(std::exp(log_c)));
        // upper: sup over strategies of inf over controls; lower: inf of sup
        const double sign = role == Role::upper ? 1.0 : -1.0;
        double best = -std::numeric_limits<double>::infinity();
        std::vector<int> ctl(slots);
        for (std::uint64_t s = 0; s < n_strat; ++s) {
            const auto strat = mesh.decode(s);
            double worst = std::numeric_limits<double>::infinity();
            for (std::uint64_t c = 0; c < n_ctl; ++c) {
                std::uint64_t code = c;
                for (auto& v : ctl) {
                    v = int(code % np);
                    code /= np;
                }
                worst = std::min(worst, sign * tree.evaluate(role, w, mesh, strat, ctl));
            }
            best = std::max(best, worst);
        }
        return sign * best;
    };
    return {solve(Role::upper), solve(Role::lower)};
}

GameEstimate game_cascade_value(const GameSpec& spec, const Partition& pi, double t, double x,
                                const GameConfig& config, std::uint64_t seed) {
    const double tn = pi.last_time(0.0);
    PMLAB_REQUIRE(t >= tn, DomainError, "game cascade: t precedes the last partition time");
    PMLAB_REQUIRE(std::fabs(x) + config.L1 * (t - tn) < config.epsilon, DomainError,
                  "game cascade: (t, x) outside the active cone");
    return run(spec, t, config, seed, frozen_walker(pi, t, x, config.epsilon, config.L1));
}

std::vector<IsaacsPoint> random_isaacs_points(std::size_t n, double horizon, std::uint64_t seed) {
    std::vector<IsaacsPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = sample_rng(seed, i, 0x15aac5);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal;
        IsaacsPoint p;
        p.t = horizon * unif(rng);
        const int knots = 8;
        std::vector<double> times, values;
        double v = 0.0;
        for (int k = 0; k <= knots; ++k) {
            const double s = horizon * double(k) / knots;
            if (k > 0) v += std::sqrt(horizon / knots) * normal(rng);
            times.push_back(s);
            values.push_back(v);
        }
        p.omega = SampledPath(1, 0.0, horizon, times, values).truncated(p.t);
        p.y = 2.0 * normal(rng);
        p.z = 2.0 * normal(rng);
        p.gamma = 2.0 * normal(rng);
        pts.push_back(std::move(p));
    }
    return pts;
}

IsaacsReport isaacs_condition_check(const GameSpec& spec, const std::vector<IsaacsPoint>& points,
                                    double tolerance) {
    spec.validate();
    IsaacsReport rep;
    rep.tolerance = tolerance;
    rep.points = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        PMLAB_REQUIRE(p.omega.dim() == 1, DimensionError, "isaacs: scalar paths only");
        std::vector<double> times, values;
        for (std::size_t k = 0; k < p.omega.knot_count(); ++k) {
            times.push_back(p.omega.knot_time(k));
            values.push_back(p.omega.knot_value(k)[0]);
        }
        const PathView w{&times, &values};
        std::vector<double> H(spec.U.size() * spec.V.size());
        for (std::size_t a = 0; a < spec.U.size(); ++a)
            for (std::size_t b = 0; b < spec.V.size(); ++b) {
                const double s = spec.sigma_at(p.t, w, spec.U[a], spec.V[b]);
                H[a * spec.V.size() + b] = 0.5 * s * s * p.gamma +
                                           spec.f_at(p.t, w, p.y, p.z * s, spec.U[a], spec.V[b]);
            }
        double inf_sup = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < spec.V.size(); ++b) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < spec.U.size(); ++a) m = std::max(m, H[a * spec.V.size() + b]);
            inf_sup = std::min(inf_sup, m);
        }
        double sup_inf = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < spec.U.size(); ++a) {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < spec.V.size(); ++b) m = std::min(m, H[a * spec.V.size() + b]);
            sup_inf = std::max(sup_inf, m);
        }
        const double gap = inf_sup - sup_inf;
        if (i == 0 || gap > rep.max_gap) {
            rep.max_gap = gap;
            rep.worst = i;
        }
    }
    rep.holds = rep.max_gap <= tolerance;
    return rep;
}

ValueEqualityReport value_equality_check(const GameSpec& spec, double t, const SampledPath& omega,
                                         const GameConfig& config, std::uint64_t seed,
                                         const std::vector<IsaacsPoint>& points) {
    ValueEqualityReport rep;
    const auto iso = isaacs_condition_check(spec, points);
    rep.isaacs_gap = iso.max_gap;
    rep.isaacs_holds = iso.holds;
    const auto e = game_values(spec, t, omega, config, seed);
    rep.upper = e.upper.value;
    rep.lower = e.lower.value;
    rep.upper_se = e.upper.stderr;
    rep.lower_se = e.lower.stderr;
    rep.gap = rep.upper - rep.lower;
    const double scale = std::max({1.0, std::fabs(rep.upper), std::fabs(rep.lower)});
    rep.tolerance = 3.0 * (rep.upper_se + rep.lower_se) + 1e-12 * scale;
    rep.equal = std::fabs(rep.gap) <= rep.tolerance;
    rep.asserted = rep.isaacs_holds;
    rep.passed = !rep.asserted || rep.equal;
    return rep;
}

GameSpec matrix_game(std::vector<std::vector<double>> payoff, double sigma, double horizon) {
    PMLAB_REQUIRE(!payoff.empty() && !payoff[0].empty(), PreconditionError, "matrix game: empty payoff");
    GameSpec g;
    g.name = "matrix";
    g.horizon = horizon;
    g.U.clear();
    g.V.clear();
    double bound = 0.0;
    for (std::size_t a = 0; a < payoff.size(); ++a) {
        PMLAB_REQUIRE(payoff[a].size() == payoff[0].size(), PreconditionError,
                      "matrix game: ragged payoff");
        g.U.push_back(double(a));
        for (double v : payoff[a]) bound = std::max(bound, std::fabs(v));
    }
    for (std::size_t b = 0; b < payoff[0].size(); ++b) g.V.push_back(double(b));
    g.sigma = [sigma](double, const PathView&, double, double) { return sigma; };
    g.f = [payoff](double, const PathView&, double, double, double a, double b) {
        return payoff[std::size_t(a)][std::size_t(b)];
    };
    g.xi = [](const PathView& w) { return w.current(); };
    g.sigma_bound = std::fabs(sigma);
    g.xi_bound = std::numeric_limits<double>::infinity();  // xi = X_T
    g.f_bound = bound;
    return g;
}

}  // namespace pmlab
