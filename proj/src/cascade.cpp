#include "pmlab/cascade.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <unordered_map>

#include "pmlab/errors.hpp"
#include "pmlab/parallel.hpp"

namespace pmlab {

const char* to_string(ProblemClass c) {
    return c == ProblemClass::markovian_features ? "markovian-features" : "path-dependent";
}

const char* to_string(Bound b) { return b == Bound::upper ? "upper" : "lower"; }

double FrozenProblem::xi_of(const SampledPath& omega) const {
    if (cls == ProblemClass::markovian_features) return terminal(omega.value1(horizon));
    return xi(omega);
}

void FrozenProblem::validate() const {
    PMLAB_REQUIRE(L > 0.0 && C0 >= 0.0, PreconditionError, "problem needs L > 0 and C0 >= 0");
    PMLAB_REQUIRE(horizon > 0.0, PreconditionError, "problem horizon must be positive");
    PMLAB_REQUIRE(bool(generator), ConfigurationError, "problem has no generator factory");
    if (cls == ProblemClass::markovian_features)
        PMLAB_REQUIRE(bool(terminal), ConfigurationError, "feature problem needs a terminal function");
    else
        PMLAB_REQUIRE(bool(xi), ConfigurationError, "path-dependent problem needs xi");
}

FrozenProblem heat_problem(std::function<double(double)> terminal, double horizon) {
    FrozenProblem p;
    p.name = "heat";
    p.L = 0.5;
    p.C0 = 0.0;
    p.horizon = horizon;
    p.generator = [](const FrozenPath&) { return heat_generator(0.5); };
    p.terminal = std::move(terminal);
    return p;
}

void CascadeConfig::validate() const {
    PMLAB_REQUIRE(epsilon > 0.0, ConfigurationError, "cascade epsilon must be positive");
    PMLAB_REQUIRE(m >= 1, ConfigurationError, "cascade truncation m must be at least 1");
    PMLAB_REQUIRE(dx > 0.0 && dtau > 0.0 && dS > 0.0, ConfigurationError, "cascade steps must be positive");
    PMLAB_REQUIRE(q() <= dx / 2.0, ConfigurationError, "memo quantum must not exceed dx / 2");
    PMLAB_REQUIRE(boundary_samples >= 1, ConfigurationError, "need at least one boundary sample per side");
    PMLAB_REQUIRE(samples >= 2 && mc_step > 0.0, ConfigurationError, "base layer needs samples and a step");
    for (double b : discounts) PMLAB_REQUIRE(std::isfinite(b), ConfigurationError, "discount must be finite");
}

namespace {

// omega^{pi} followed by the re-anchored cone exits of the suffix X (X(t) = 0).
SampledPath assemble_path(const Partition& pi, double t, double x, const SampledPath& X, double eps,
                          double L1, double T) {
    std::vector<double> times{0.0}, values{0.0};
    double S = 0.0;
    for (const auto& p : pi.points) {
        S += p.increment[0];
        times.push_back(p.time);
        values.push_back(S);
    }
    const double tn = pi.last_time(0.0);
    auto push = [&](double time, double v) {
        if (time <= times.back()) {
            values.back() = v;
        } else {
            times.push_back(time);
            values.push_back(v);
        }
    };
    double xs[1] = {x};
    HittingResult h = hit_cone(X, t, xs, eps - L1 * (t - tn), L1, T);
    push(h.time, S + h.location[0]);
    const double zero[1] = {0.0};
    while (h.time < T) {
        double base = values.back();
        HittingResult next = hit_cone(X, h.time, zero, eps, L1, T);
        PMLAB_REQUIRE(next.time > h.time || next.time >= T, DomainError, "assemble_path: no progress");
        push(next.time, base + next.location[0]);
        h = next;
    }
    return SampledPath(1, 0.0, T, std::move(times), std::move(values));
}

SampledPath terminal_path(const Partition& pi, double x, double T) {
    std::vector<double> times{0.0}, values{0.0};
    double S = 0.0;
    for (const auto& p : pi.points) {
        S += p.increment[0];
        times.push_back(p.time);
        values.push_back(S);
    }
    if (T > times.back()) {
        times.push_back(T);
        values.push_back(S + x);
    } else {
        values.back() = S + x;
    }
    return SampledPath(1, 0.0, T, std::move(times), std::move(values));
}

double partition_sum(const Partition& pi) { return pi.points.empty() ? 0.0 : pi.sum()[0]; }

BaseEstimate base_impl(const Partition& pi, double t, double x, const FrozenProblem& problem,
                       const CascadeConfig& config, std::uint64_t seed) {
    const double T = problem.horizon;
    const double L = problem.L;
    const double S = partition_sum(pi);
    BaseEstimate est;
    if (t >= T) {
        double v = problem.cls == ProblemClass::markovian_features
                       ? problem.terminal(S + x)
                       : problem.xi(terminal_path(pi, x, T));
        est.upper = est.lower = v;
        est.upper_arg = est.lower_arg = "terminal";
        return est;
    }
    MeasureFamilySpec spec;
    spec.L = L;
    spec.dim = 1;
    spec.t_start = t;
    spec.t_end = T;
    spec.step = config.mc_step;
    spec.state_offset = {S + x};
    std::vector<ControlLaw> laws;
    for (const auto& a : ControlFamily::standard_catalog(L, 1)) {
        ControlLaw law;
        law.pieces = {a};
        char buf[64];
        std::snprintf(buf, sizeof buf, "const[b=%.6g,s=%.6g]", a.drift[0], a.vol);
        law.id = buf;
        laws.push_back(law);
    }
    for (auto& f : ControlFamily::feedback_laws(L, 1)) laws.push_back(f);
    const std::vector<double> disc = config.discounts.empty() ? std::vector<double>{-L, 0.0, L} : config.discounts;
    const std::size_t nd = disc.size();
    const double tau = T - t;
    std::vector<double> factor(nd), run(nd);
    for (std::size_t k = 0; k < nd; ++k) {
        factor[k] = std::exp(disc[k] * tau);
        run[k] = disc[k] == 0.0 ? tau : (factor[k] - 1.0) / disc[k];
    }
    const bool features = problem.cls == ProblemClass::markovian_features;
    const double eps = config.epsilon, L1 = problem.slope();
    auto moments = evaluate_laws(laws, spec, config.samples, seed, nd, [&](const SampledPath& X, double* out) {
        double v = features ? problem.terminal(S + x + X.value1(T))
                            : problem.xi(assemble_path(pi, t, x, X, eps, L1, T));
        for (std::size_t k = 0; k < nd; ++k) out[k] = factor[k] * v;
    });
    bool first = true;
    for (std::size_t l = 0; l < laws.size(); ++l)
        for (std::size_t k = 0; k < nd; ++k) {
            const Moments& m = moments[l * nd + k];
            double up = m.mean() + problem.C0 * run[k];
            double lo = m.mean() - problem.C0 * run[k];
            char tag[32];
            std::snprintf(tag, sizeof tag, "|discount=%.6g", disc[k]);
            if (first || up > est.upper) {
                est.upper = up;
                est.upper_se = m.stderr_of_mean();
                est.upper_arg = laws[l].id + tag;
            }
            if (first || lo < est.lower) {
                est.lower = lo;
                est.lower_se = m.stderr_of_mean();
                est.lower_arg = laws[l].id + tag;
            }
            first = false;
        }
    return est;
}

void check_domain(const Partition& pi, double t, double x, double eps, double L1, double T) {
    const double tn = pi.last_time(0.0);
    PMLAB_REQUIRE(t >= tn && t <= T, DomainError, "point before the last partition time or after T");
    if (t < T)
        PMLAB_REQUIRE(std::fabs(x) + L1 * (t - tn) <= eps * (1.0 + 1e-12), DomainError,
                      "point outside the cone of the last partition time");
}

std::int64_t quant(double v, double q) { return std::int64_t(std::llround(v / q)); }

}  // namespace

BaseEstimate theta_base(const Partition& pi, double t, double x, const FrozenProblem& problem,
                        const CascadeConfig& config, std::uint64_t seed) {
    problem.validate();
    config.validate();
    for (double b : config.discounts) PMLAB_REQUIRE(std::fabs(b) <= problem.L, BoundError, "discount exceeds L");
    check_domain(pi, t, x, config.epsilon, problem.slope(), problem.horizon);
    return base_impl(pi, t, x, problem, config, seed);
}

MCEstimate theta_base_upper(const Partition& pi, double t, double x, const FrozenProblem& problem,
                            const CascadeConfig& config, std::uint64_t seed) {
    auto b = theta_base(pi, t, x, problem, config, seed);
    return {b.upper, b.upper_se, config.samples, b.upper_arg};
}

MCEstimate theta_base_lower(const Partition& pi, double t, double x, const FrozenProblem& problem,
                            const CascadeConfig& config, std::uint64_t seed) {
    auto b = theta_base(pi, t, x, problem, config, seed);
    return {b.lower, b.lower_se, config.samples, b.lower_arg};
}

struct BaseTable {
    FrozenProblem problem;
    CascadeConfig config;
    std::recursive_mutex mu;
    std::unordered_map<std::uint64_t, BaseEstimate> nodes;   // features: (j, k)
    std::map<std::vector<std::int64_t>, BaseEstimate> exact;  // quantized (pi, t, x)
    double max_se[2] = {0.0, 0.0};

    void note(const BaseEstimate& e) {
        max_se[0] = std::max(max_se[0], e.upper_se);
        max_se[1] = std::max(max_se[1], e.lower_se);
    }
};

struct CascadeState {
    FrozenProblem problem;
    CascadeConfig config;
    std::shared_ptr<BaseTable> base;
    std::recursive_mutex mu;
    std::size_t J = 0;  // tau nodes 0..J, tau_J = T
    std::unordered_map<std::uint64_t, double> nodes[2];
    std::map<std::vector<std::int64_t>, double> path_nodes[2];
    std::map<std::vector<std::int64_t>, std::shared_ptr<ValueField>> fields;
    std::vector<LevelStats> stats;
    std::map<std::pair<int, std::uint64_t>, double> gap_seen[2];
    std::size_t solves = 0;
    int deepest = 0;

    double T() const { return problem.horizon; }
    double L1() const { return problem.slope(); }
    double tau(std::size_t j) const { return j >= J ? T() : double(j) * config.dtau; }

    static std::uint64_t key(std::size_t j, std::int64_t k, int level = 0) {
        return (std::uint64_t(level) << 56) ^ (std::uint64_t(j) << 32) ^ std::uint64_t(std::uint32_t(k));
    }

    void count_solve(int level) {
        ++solves;
        deepest = std::max(deepest, level);
        if (std::size_t(level) >= stats.size())
            for (int l = int(stats.size()); l <= level; ++l) stats.push_back({l, 0, 0.0});
        ++stats[std::size_t(level)].solves;
        if (solves > config.max_solves)
            throw BudgetError("cascade: cone-solve budget exceeded", deepest);
    }

    void record_gap(int level, std::uint64_t k, Bound b, double v) {
        int bi = b == Bound::upper ? 0 : 1;
        gap_seen[bi][{level, k}] = v;
        auto it = gap_seen[1 - bi].find({level, k});
        if (it == gap_seen[1 - bi].end()) return;
        double gap = b == Bound::upper ? v - it->second : it->second - v;
        if (std::size_t(level) >= stats.size())
            for (int l = int(stats.size()); l <= level; ++l) stats.push_back({l, 0, 0.0});
        stats[std::size_t(level)].max_gap = std::max(stats[std::size_t(level)].max_gap, gap);
    }

    // Base layer on the (tau, y) lattice, features mode.
    const BaseEstimate& base_node(std::size_t j, std::int64_t k) {
        std::lock_guard<std::recursive_mutex> lock(base->mu);
        auto kk = key(j, k);
        auto it = base->nodes.find(kk);
        if (it != base->nodes.end()) return it->second;
        Partition empty;
        empty.epsilon = config.epsilon;
        empty.L1 = L1();
        auto seed = stream_seed(config.seed, kk, 0xba5e);
        auto est = base_impl(empty, tau(j), double(k) * config.dS, problem, config, seed);
        base->note(est);
        return base->nodes.emplace(kk, est).first->second;
    }

    template <class F>
    double bilinear(double s, double y, F&& node) {
        double pj = s / config.dtau;
        auto j0 = std::size_t(std::floor(pj));
        if (j0 >= J) return node(J, std::int64_t(std::llround(y / config.dS)), y, true);
        double wj = pj - double(j0);
        std::size_t j1 = j0 + 1;
        if (j1 == J) wj = (s - tau(j0)) / (T() - tau(j0));
        wj = std::clamp(wj, 0.0, 1.0);
        double pk = y / config.dS;
        auto k0 = std::int64_t(std::floor(pk));
        double wk = pk - double(k0);
        double v = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) {
                double w = (a ? wj : 1.0 - wj) * (c ? wk : 1.0 - wk);
                if (w == 0.0) continue;
                v += w * node(a ? j1 : j0, k0 + c, y, false);
            }
        return v;
    }

    double base_at(Bound b, double s, double y) {
        if (s >= T()) return problem.terminal(y);
        return bilinear(s, y, [&](std::size_t j, std::int64_t k, double yy, bool top) {
            if (top) return problem.terminal(yy);
            if (j >= J) return problem.terminal(double(k) * config.dS);
            const auto& e = base_node(j, k);
            return b == Bound::upper ? e.upper : e.lower;
        });
    }

    // theta_level(pi; s, 0) for any pi ending at time s with sum y, features mode.
    double level_at(int level, Bound b, double s, double y) {
        if (s >= T()) return problem.terminal(y);
        if (level >= config.m) return base_at(b, s, y);
        return bilinear(s, y, [&](std::size_t j, std::int64_t k, double yy, bool top) {
            if (top || j >= J) return problem.terminal(top ? yy : double(k) * config.dS);
            return level_node(level, b, j, k);
        });
    }

    ValueField solve_features(int level, Bound b, double tn, double S, bool keep) {
        count_solve(level);
        ConeSpec spec{tn, config.epsilon, L1(), T()};
        Generator g = problem.generator(FrozenPath{tn, S, nullptr});
        auto grid = ConeGrid::make(spec, 1, config.dx, g, config.dt);
        BoundaryData h = [this, level, b, S](double s, const Vec& x) {
            return level_at(level + 1, b, s, S + x(0));
        };
        return solve_cone(g, grid, h, keep);
    }

    double level_node(int level, Bound b, std::size_t j, std::int64_t k) {
        std::lock_guard<std::recursive_mutex> lock(mu);
        int bi = b == Bound::upper ? 0 : 1;
        auto kk = key(j, k, level);
        auto it = nodes[bi].find(kk);
        if (it != nodes[bi].end()) return it->second;
        double v;
        if (tau(j) >= T())
            v = problem.terminal(double(k) * config.dS);
        else
            v = solve_features(level, b, tau(j), double(k) * config.dS, false).apex();
        nodes[bi].emplace(kk, v);
        record_gap(level, kk, b, v);
        return v;
    }

    // Path-dependent mode.
    std::vector<std::int64_t> path_key(int level, const Partition& pi) const {
        std::vector<std::int64_t> k{level};
        for (const auto& p : pi.points) {
            k.push_back(quant(p.time, config.q()));
            k.push_back(quant(p.increment[0], config.q()));
        }
        return k;
    }

    const BaseEstimate& base_exact(const Partition& pi, double t, double x) {
        std::lock_guard<std::recursive_mutex> lock(base->mu);
        auto k = path_key(-1, pi);
        k.push_back(quant(t, config.q()));
        k.push_back(quant(x, config.q()));
        auto it = base->exact.find(k);
        if (it != base->exact.end()) return it->second;
        std::uint64_t h = 0;
        for (auto v : k) h = hash_combine(h, std::uint64_t(v));
        auto est = base_impl(pi, t, x, problem, config, stream_seed(config.seed, h, 0xba5e));
        base->note(est);
        return base->exact.emplace(k, est).first->second;
    }

    double xi_terminal(const Partition& pi, double x) {
        if (problem.cls == ProblemClass::markovian_features) return problem.terminal(partition_sum(pi) + x);
        return problem.xi(terminal_path(pi, x, T()));
    }

    ValueField solve_path(int level, Bound b, const Partition& pi, bool keep) {
        const double tn = pi.last_time(0.0);
        const double eps = config.epsilon;
        const double top = std::min(tn + eps / L1(), T());
        const int K = config.boundary_samples;
        // lateral samples per side: K midpoints then the top
        std::vector<double> s_q;
        for (int q = 0; q < K; ++q) s_q.push_back(tn + (top - tn) * (q + 0.5) / K);
        s_q.push_back(top);
        std::vector<double> side[2];
        for (int sd = 0; sd < 2; ++sd) {
            double sign = sd == 0 ? 1.0 : -1.0;
            for (double s : s_q) {
                double xb = sign * std::max(0.0, eps - L1() * (s - tn));
                if (s >= T())
                    side[sd].push_back(xi_terminal(pi, xb));
                else
                    side[sd].push_back(path_apex(level + 1, b, pi.extended(s, {xb})));
            }
        }
        count_solve(level);
        ConeSpec spec{tn, eps, L1(), T()};
        Generator g = problem.generator(FrozenPath{tn, partition_sum(pi), &pi});
        auto grid = ConeGrid::make(spec, 1, config.dx, g, config.dt);
        BoundaryData h = [this, pi, s_q, side, top](double s, const Vec& x) {
            if (s >= T()) return xi_terminal(pi, x(0));
            const auto& vals = side[x(0) >= 0.0 ? 0 : 1];
            if (s <= s_q.front()) return vals.front();
            if (s >= top) return vals.back();
            auto it = std::upper_bound(s_q.begin(), s_q.end(), s);
            std::size_t i = std::size_t(it - s_q.begin());
            double w = (s - s_q[i - 1]) / (s_q[i] - s_q[i - 1]);
            return (1.0 - w) * vals[i - 1] + w * vals[i];
        };
        return solve_cone(g, grid, h, keep);
    }

    double path_apex(int level, Bound b, const Partition& pi) {
        const double tn = pi.last_time(0.0);
        if (tn >= T()) return xi_terminal(pi, 0.0);
        if (level >= config.m) {
            const auto& e = base_exact(pi, tn, 0.0);
            return b == Bound::upper ? e.upper : e.lower;
        }
        std::lock_guard<std::recursive_mutex> lock(mu);
        int bi = b == Bound::upper ? 0 : 1;
        auto k = path_key(level, pi);
        auto it = path_nodes[bi].find(k);
        if (it != path_nodes[bi].end()) return it->second;
        double v = solve_path(level, b, pi, false).apex();
        path_nodes[bi].emplace(k, v);
        std::uint64_t h = 0;
        for (auto e : k) h = hash_combine(h, std::uint64_t(e));
        record_gap(level, h, b, v);
        return v;
    }

    std::shared_ptr<ValueField> field(int level, Bound b, const Partition& pi) {
        std::lock_guard<std::recursive_mutex> lock(mu);
        // exact key: a field is only valid for its own cone
        std::vector<std::int64_t> k{level, b == Bound::upper ? 0 : 1};
        for (const auto& p : pi.points) {
            k.push_back(std::bit_cast<std::int64_t>(p.time));
            k.push_back(std::bit_cast<std::int64_t>(p.increment[0]));
        }
        if (problem.cls == ProblemClass::markovian_features) {
            k.resize(2);
            k.push_back(std::bit_cast<std::int64_t>(pi.last_time(0.0)));
            k.push_back(std::bit_cast<std::int64_t>(partition_sum(pi)));
        }
        auto it = fields.find(k);
        if (it != fields.end()) return it->second;
        auto f = std::make_shared<ValueField>(
            problem.cls == ProblemClass::markovian_features
                ? solve_features(level, b, pi.last_time(0.0), partition_sum(pi), true)
                : solve_path(level, b, pi, true));
        fields.emplace(k, f);
        return f;
    }

    double theta(Bound b, const Partition& pi, double t, double x) {
        check_domain(pi, t, x, config.epsilon, L1(), T());
        const int level = int(pi.size());
        if (t >= T()) return xi_terminal(pi, x);
        if (level >= config.m) {
            if (problem.cls == ProblemClass::markovian_features) return base_at(b, t, partition_sum(pi) + x);
            const auto& e = base_exact(pi, t, x);
            return b == Bound::upper ? e.upper : e.lower;
        }
        Vec p(1);
        p(0) = x;
        return field(level, b, pi)->evaluate(t, p);
    }
};

double CascadeSolution::root(Bound b) const {
    auto& st = *state_;
    if (st.problem.cls == ProblemClass::markovian_features) return st.level_node(0, b, 0, 0);
    Partition empty;
    empty.epsilon = st.config.epsilon;
    empty.L1 = st.L1();
    return st.path_apex(0, b, empty);
}

double CascadeSolution::max_base_stderr(Bound b) const {
    return state_->base->max_se[b == Bound::upper ? 0 : 1];
}

double CascadeSolution::root_stderr(Bound b) const {
    return max_base_stderr(b) * std::exp(state_->problem.L * state_->T());
}

double CascadeSolution::theta(Bound b, const Partition& pi, double t, double x) const {
    return state_->theta(b, pi, t, x);
}

double CascadeSolution::evaluate_u_eps(Bound b, double t, const SampledPath& omega) const {
    auto& st = *state_;
    const double T = st.T();
    PMLAB_REQUIRE(omega.dim() == 1, DimensionError, "evaluate_u_eps: cascade paths are one-dimensional");
    PMLAB_REQUIRE(t >= omega.t_start() && t <= T, DomainError, "evaluate_u_eps: t outside [0, T]");
    PMLAB_REQUIRE(omega.t_end() >= t, DomainError, "evaluate_u_eps: path does not cover [0, t]");
    // stopped path omega_{. ^ t} on [0, T]
    std::vector<double> times, values;
    for (std::size_t i = 0; i < omega.knot_count() && omega.knot_time(i) < t; ++i) {
        times.push_back(omega.knot_time(i));
        values.push_back(omega.knot_value(i)[0]);
    }
    const double wt = omega.value1(t);
    if (times.empty() || times.back() < t) {
        times.push_back(t);
        values.push_back(wt);
    }
    SampledPath stopped(1, omega.t_start(), T, std::move(times), std::move(values));
    Partition full = hitting_sequence(stopped, st.config.epsilon, st.L1());
    Partition pi = full;
    pi.points.clear();
    pi.terminal = false;
    for (const auto& p : full.points) {
        if (p.time > t) break;
        pi.points.push_back(p);
    }
    const double anchor = stopped.value1(pi.last_time(omega.t_start()));
    return st.theta(b, pi, t, wt - anchor);
}

std::vector<LevelStats> CascadeSolution::level_stats() const { return state_->stats; }
std::size_t CascadeSolution::solves() const { return state_->solves; }
const FrozenProblem& CascadeSolution::problem() const { return state_->problem; }
const CascadeConfig& CascadeSolution::config() const { return state_->config; }
std::shared_ptr<BaseTable> CascadeSolution::base_table() const { return state_->base; }

CascadeSolution cascade_solve(const FrozenProblem& problem, const CascadeConfig& config,
                              std::shared_ptr<BaseTable> base) {
    problem.validate();
    config.validate();
    for (double b : config.discounts) PMLAB_REQUIRE(std::fabs(b) <= problem.L, BoundError, "discount exceeds L");
    auto st = std::make_shared<CascadeState>();
    st->problem = problem;
    st->config = config;
    st->J = std::size_t(std::ceil(problem.horizon / config.dtau - 1e-9));
    if (base) {
        PMLAB_REQUIRE(base->problem.name == problem.name && base->config.seed == config.seed &&
                          base->config.samples == config.samples && base->config.mc_step == config.mc_step &&
                          base->config.dtau == config.dtau && base->config.dS == config.dS &&
                          base->config.epsilon == config.epsilon && base->config.discounts == config.discounts,
                      ConfigurationError, "cascade_solve: base table built for another setup");
        st->base = std::move(base);
    } else {
        st->base = std::make_shared<BaseTable>();
        st->base->problem = problem;
        st->base->config = config;
    }
    CascadeSolution sol;
    sol.state_ = st;
    sol.root(Bound::upper);
    sol.root(Bound::lower);
    return sol;
}

ComparisonReport verify_comparison(const FrozenProblem& low, const FrozenProblem& high,
                                   const CascadeConfig& config,
                                   const std::vector<ComparisonPoint>& points) {
    auto a = cascade_solve(low, config);
    auto b = cascade_solve(high, config);
    ComparisonReport rep;
    rep.tolerance = 3.0 * (std::max(a.root_stderr(Bound::upper), a.root_stderr(Bound::lower)) +
                           std::max(b.root_stderr(Bound::upper), b.root_stderr(Bound::lower))) +
                    config.grid_tolerance();
    rep.root_diff_upper = b.upper_root() - a.upper_root();
    rep.root_diff_lower = b.lower_root() - a.lower_root();
    rep.worst_margin = std::min(rep.root_diff_upper, rep.root_diff_lower);
    rep.checked = 2;
    rep.violations = (rep.root_diff_upper < -rep.tolerance) + (rep.root_diff_lower < -rep.tolerance);
    for (const auto& p : points)
        for (Bound bd : {Bound::upper, Bound::lower}) {
            double margin = b.evaluate_u_eps(bd, p.t, p.omega) - a.evaluate_u_eps(bd, p.t, p.omega);
            rep.worst_margin = std::min(rep.worst_margin, margin);
            ++rep.checked;
            if (margin < -rep.tolerance) ++rep.violations;
        }
    return rep;
}

ShiftedSolution::ShiftedSolution(CascadeSolution base, double rho) : base_(std::move(base)), rho_(rho) {
    PMLAB_REQUIRE(rho >= 0.0, PreconditionError, "modulus shift needs rho >= 0");
}

double ShiftedSolution::theta(Bound b, const Partition& pi, double t, double x) const {
    return base_.theta(b, pi, t, x) - rho_ * (base_.problem().horizon - t);
}

double ShiftedSolution::evaluate_u_eps(Bound b, double t, const SampledPath& omega) const {
    return base_.evaluate_u_eps(b, t, omega) - rho_ * (base_.problem().horizon - t);
}

ShiftedSolution modulus_shift(const CascadeSolution& solution, double rho) {
    return ShiftedSolution(solution, rho);
}

CompatibilityReport compatibility_check(const ThetaFn& theta, int level, double epsilon, double L1,
                                        double horizon, std::size_t n_points, std::uint64_t seed) {
    PMLAB_REQUIRE(level >= 0, PreconditionError, "compatibility_check: level must be nonnegative");
    CompatibilityReport rep;
    Rng rng(stream_seed(seed, std::uint64_t(level), 0xc0de));
    std::uniform_real_distribution<double> U(0.05, 0.95);
    std::size_t attempts = 0;
    while (rep.points < n_points && attempts < 100 * n_points) {
        ++attempts;
        Partition pi;
        pi.epsilon = epsilon;
        pi.L1 = L1;
        double t = 0.0;
        for (int i = 0; i < level; ++i) {
            double dt = U(rng) * epsilon / L1;
            double x = (U(rng) < 0.5 ? -1.0 : 1.0) * (epsilon - L1 * dt);
            t += dt;
            pi.points.push_back({t, {x}});
        }
        double top = std::min(t + epsilon / L1, horizon);
        double s = t + U(rng) * (top - t);
        if (t >= horizon || s >= horizon) continue;
        double xb = (U(rng) < 0.5 ? -1.0 : 1.0) * (epsilon - L1 * (s - t));
        double left = theta(pi, s, xb);
        double right = theta(pi.extended(s, {xb}), s, 0.0);
        rep.max_deviation = std::max(rep.max_deviation, std::fabs(left - right));
        ++rep.points;
    }
    return rep;
}

}  // namespace pmlab
