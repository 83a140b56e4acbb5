#include "pmlab/shjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pmlab/errors.hpp"
#include "pmlab/hitting.hpp"
#include "pmlab/parallel.hpp"

namespace pmlab {

double PathView::value(double s) const {
    const auto& ts = *times;
    const auto& vs = *values;
    if (s >= ts.back()) return vs.back();
    if (s <= ts.front()) return vs.front();
    auto it = std::upper_bound(ts.begin(), ts.end(), s);
    std::size_t i = std::size_t(it - ts.begin());
    double w = (s - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return vs[i - 1] + w * (vs[i] - vs[i - 1]);
}

double SHJBProblem::driver_value(double t, const PathView& w, double x, double y, double z, double a) const {
    if (driver == DriverClass::general) return f(t, w, x, y, z, a);
    double v = f0 ? f0(t, w, x, a) : 0.0;
    if (fy) v += fy(t, w, x, a) * y;
    if (fz) v += fz(t, w, x, a) * z;
    return v;
}

void SHJBProblem::validate() const {
    PMLAB_REQUIRE(!controls.empty(), ConfigurationError, "shjb: empty control set");
    PMLAB_REQUIRE(horizon > 0.0, PreconditionError, "shjb: horizon must be positive");
    PMLAB_REQUIRE(bool(g), ConfigurationError, "shjb: terminal g is missing");
    if (driver == DriverClass::general)
        PMLAB_REQUIRE(bool(f), ConfigurationError, "shjb: general driver needs f");
}

void SHJBConfig::validate(std::size_t n_controls) const {
    PMLAB_REQUIRE(step > 0.0 && intervals >= 1 && samples >= 2, ConfigurationError,
                  "shjb: step, intervals and samples must be positive");
    PMLAB_REQUIRE(std::pow(double(n_controls), double(intervals)) <= kExhaustiveLimit, ConfigurationError,
                  "shjb: open-loop catalog too large");
    PMLAB_REQUIRE(epsilon > 0.0 && L1 >= 1.0, ConfigurationError, "shjb: cone parameters invalid");
    PMLAB_REQUIRE(picard_depth >= 1 && picard_depth <= 3, ConfigurationError, "shjb: Picard depth must be 1..3");
    PMLAB_REQUIRE(inner_samples >= 2 && inner_steps >= 1, ConfigurationError, "shjb: inner Picard sizes");
}

namespace {

// What the coefficients see of the path while the simulation advances.
class Tracker {
public:
    static Tracker direct(const SampledPath& omega, double t) {
        Tracker tr;
        for (std::size_t i = 0; i < omega.knot_count() && omega.knot_time(i) < t; ++i) {
            tr.times_.push_back(omega.knot_time(i));
            tr.values_.push_back(omega.knot_value(i)[0]);
        }
        tr.times_.push_back(t);
        tr.values_.push_back(omega.value1(t));
        tr.base_ = omega.value1(t);
        return tr;
    }

    static Tracker frozen(const Partition& pi, double xbar, double eps, double L1) {
        Tracker tr;
        tr.frozen_ = true;
        tr.times_.push_back(0.0);
        tr.values_.push_back(0.0);
        double S = 0.0;
        for (const auto& p : pi.points) {
            S += p.increment[0];
            tr.times_.push_back(p.time);
            tr.values_.push_back(S);
        }
        tr.base_ = S + xbar;
        tr.anchor_ = pi.last_time(0.0);
        tr.y_ = xbar;
        tr.eps_ = eps;
        tr.L1_ = L1;
        return tr;
    }

    void step(double r, double h, double dB) {
        b_ += dB;
        if (!frozen_) {
            times_.push_back(r + h);
            values_.push_back(base_ + b_);
            return;
        }
        double vel = dB / h;
        double s = r;  // segment start
        double y = y_;
        double left = h;
        for (int guard = 0; guard < 1000; ++guard) {
            double yn = y + vel * left;
            if (std::fabs(yn) + L1_ * (s + left - anchor_) < eps_) {
                y = yn;
                break;
            }
            double c = eps_ - L1_ * (s - anchor_);
            double u = c <= std::fabs(y) ? 0.0 : segment_crossing(&y, &vel, 1, c, L1_, 0.0, left);
            double H = s + u;
            double bh = b_ - dB + vel * (H - r);
            double v = base_ + bh;  // S + xbar + B_H
            if (H <= times_.back()) {
                values_.back() = v;
            } else {
                times_.push_back(H);
                values_.push_back(v);
            }
            anchor_ = H;
            y = 0.0;
            s = H;
            left = r + h - H;
            if (left <= 0.0) break;
        }
        y_ = y;
    }

    PathView view() const { return {&times_, &values_}; }

    // Path handed to g: the frozen interpolation closes with (T, current value).
    PathView finish(double T) {
        if (frozen_) {
            double v = base_ + b_;
            if (T <= times_.back()) {
                values_.back() = v;
            } else {
                times_.push_back(T);
                values_.push_back(v);
            }
        }
        return view();
    }

private:
    bool frozen_ = false;
    std::vector<double> times_, values_;
    double base_ = 0.0;  // path value at t (S + xbar when frozen)
    double b_ = 0.0;     // B^t
    double anchor_ = 0.0, y_ = 0.0, eps_ = 0.0, L1_ = 1.0;
};

using TrackerFactory = std::function<Tracker()>;

double coef(const std::function<double(double, const PathView&, double, double)>& fn, double t,
            const PathView& w, double x, double a) {
    return fn ? fn(t, w, x, a) : 0.0;
}

std::vector<std::vector<int>> enumerate_choices(std::size_t n, int J) {
    std::vector<std::vector<int>> out;
    std::vector<int> c(static_cast<std::size_t>(J), 0);
    for (;;) {
        out.push_back(c);
        int i = 0;
        for (; i < J; ++i) {
            if (++c[std::size_t(i)] < int(n)) break;
            c[std::size_t(i)] = 0;
        }
        if (i == J) break;
    }
    return out;
}

// Affine driver: exact weight Gamma = exp(int fy + int fz dB - 1/2 int fz^2).
double affine_path(const SHJBProblem& p, Tracker tr, double t, double x, const std::vector<int>& choice,
                   std::size_t steps, const double* z) {
    const double T = p.horizon;
    const double h = (T - t) / double(steps);
    const double sq = std::sqrt(h);
    const std::size_t J = choice.size();
    double X = x, logG = 0.0, run = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double r = t + double(k) * h;
        const double a = p.controls[std::size_t(choice[std::min(J - 1, k * J / steps)])];
        const PathView w = tr.view();
        const double f0 = coef(p.f0, r, w, X, a);
        const double fy = coef(p.fy, r, w, X, a);
        const double fz = coef(p.fz, r, w, X, a);
        run += std::exp(logG) * f0 * h;
        const double dB = sq * z[k];
        const double Xn = X + coef(p.b, r, w, X, a) * h + coef(p.sigma, r, w, X, a) * dB;
        logG += fy * h + fz * dB - 0.5 * fz * fz * h;
        tr.step(r, h, dB);
        X = Xn;
    }
    return std::exp(logG) * p.g(tr.finish(T), X) + run;
}

struct PicardContext {
    const SHJBProblem* p;
    const SHJBConfig* cfg;
    const std::vector<int>* choice;
    double t0;  // start of the control horizon
};

double control_at(const PicardContext& c, double r) {
    const double T = c.p->horizon;
    const std::size_t J = c.choice->size();
    auto piece = std::size_t(std::floor((r - c.t0) / (T - c.t0) * double(J)));
    return c.p->controls[std::size_t((*c.choice)[std::min(J - 1, piece)])];
}

// (Y, Z) of Picard iterate k at (s, tracker state, x) by nested simulation.
std::pair<double, double> picard(const PicardContext& c, int k, double s, const Tracker& tr, double x,
                                 std::size_t n, std::uint64_t seed) {
    if (k == 0) return {0.0, 0.0};
    const SHJBProblem& p = *c.p;
    const double T = p.horizon;
    const int M = c.cfg->inner_steps;
    const double h = (T - s) / double(M);
    if (h <= 0.0) {
        Tracker end = tr;
        return {p.g(end.finish(T), x), 0.0};
    }
    const double sq = std::sqrt(h);
    double sum = 0.0, sumz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = sample_rng(seed, i);
        std::normal_distribution<double> nd;
        Tracker cur = tr;
        double X = x, phi = 0.0, dB0 = 0.0;
        for (int j = 0; j < M; ++j) {
            const double r = s + double(j) * h;
            const double a = control_at(c, r);
            auto yz = picard(c, k - 1, r, cur, X, c.cfg->inner_samples, stream_seed(seed, i, std::uint64_t(j + 1)));
            const PathView w = cur.view();
            phi += p.driver_value(r, w, X, yz.first, yz.second, a) * h;
            const double dB = sq * nd(rng);
            if (j == 0) dB0 = dB;
            const double Xn = X + coef(p.b, r, w, X, a) * h + coef(p.sigma, r, w, X, a) * dB;
            cur.step(r, h, dB);
            X = Xn;
        }
        phi += p.g(cur.finish(T), X);
        sum += phi;
        sumz += phi * dB0;
    }
    return {sum / double(n), sumz / double(n) / h};
}

SHJBEstimate solve_value(const SHJBProblem& p, double t, double x, const SHJBConfig& cfg, std::uint64_t seed,
                         const TrackerFactory& make) {
    p.validate();
    cfg.validate(p.controls.size());
    const double T = p.horizon;
    PMLAB_REQUIRE(t <= T, DomainError, "shjb: t after the horizon");
    auto choices = enumerate_choices(p.controls.size(), cfg.intervals);
    SHJBEstimate best;
    if (t >= T) {
        Tracker tr = make();
        best.value = p.g(tr.finish(T), x);
        best.n_samples = cfg.samples;
        best.control = choices.front();
        return best;
    }
    if (p.driver == DriverClass::affine) {
        const auto steps = std::size_t(std::max(1.0, std::ceil((T - t) / cfg.step - 1e-9)));
        auto moments = chunked_moments(cfg.samples, choices.size(), [&](std::size_t i, double* out) {
            thread_local std::vector<double> z;
            z.resize(steps);
            draw_normals(seed, i, steps, z.data());
            for (std::size_t l = 0; l < choices.size(); ++l)
                out[l] = affine_path(p, make(), t, x, choices[l], steps, z.data());
        });
        for (std::size_t l = 0; l < choices.size(); ++l)
            if (l == 0 || moments[l].mean() > best.value) {
                best.value = moments[l].mean();
                best.stderr = moments[l].stderr_of_mean();
                best.control = choices[l];
            }
        best.n_samples = cfg.samples;
        return best;
    }
    // general driver: nested Picard, top level with cfg.samples paths
    bool first = true;
    for (const auto& choice : choices) {
        PicardContext c{&p, &cfg, &choice, t};
        std::vector<double> iterates;
        Moments last;
        for (int k = 1; k <= cfg.picard_depth; ++k) {
            auto m = chunked_moments(cfg.samples, 1, [&](std::size_t i, double* out) {
                // one top-level path: reuse picard with a single sample on its own stream
                out[0] = picard(c, k, t, make(), x, 1, stream_seed(seed, i, 0x91ca)).first;
            });
            iterates.push_back(m[0].mean());
            last = m[0];
        }
        for (std::size_t k = 2; k < iterates.size(); ++k) {
            double g1 = std::fabs(iterates[k - 1] - iterates[k - 2]);
            double g2 = std::fabs(iterates[k] - iterates[k - 1]);
            if (g2 > g1 && g1 > 1e-12)
                throw ConvergenceError("shjb: Picard iterates are not converging");
        }
        if (first || iterates.back() > best.value) {
            first = false;
            best.value = iterates.back();
            best.stderr = last.stderr_of_mean();
            best.control = choice;
            best.picard = iterates;
        }
    }
    best.n_samples = cfg.samples;
    return best;
}

}  // namespace

SHJBEstimate simulate_value_direct(const SHJBProblem& problem, double t, const SampledPath& omega,
                                   double x, const SHJBConfig& config, std::uint64_t seed) {
    PMLAB_REQUIRE(omega.dim() == 1, DimensionError, "shjb: paths are one-dimensional");
    PMLAB_REQUIRE(t >= omega.t_start() && omega.t_end() >= t, DomainError, "shjb: path does not cover [0, t]");
    return solve_value(problem, t, x, config, seed, [&] { return Tracker::direct(omega, t); });
}

SHJBEstimate shjb_cascade_value(const SHJBProblem& problem, const Partition& pi, double t,
                                double x_bar, double x, const SHJBConfig& config,
                                std::uint64_t seed) {
    const double tn = pi.last_time(0.0);
    PMLAB_REQUIRE(t >= tn, DomainError, "shjb: t before the last partition time");
    PMLAB_REQUIRE(std::fabs(x_bar) + config.L1 * (t - tn) < config.epsilon || t >= problem.horizon,
                  DomainError, "shjb: (t, x_bar) outside the cone");
    return solve_value(problem, t, x, config, seed,
                       [&] { return Tracker::frozen(pi, x_bar, config.epsilon, config.L1); });
}

ValueSlice ValueSlice::sample(const std::function<double(double, double, double)>& v, double t,
                              double xbar, double x, double ht, double hxbar, double hx) {
    ValueSlice s{t, xbar, x, ht, hxbar, hx, {}};
    s.values.resize(18);
    for (int it = 0; it < 2; ++it)
        for (int ib = -1; ib <= 1; ++ib)
            for (int ix = -1; ix <= 1; ++ix)
                s.values[std::size_t(it * 9 + (ib + 1) * 3 + (ix + 1))] = v(t + it * ht, xbar + ib * hxbar, x + ix * hx);
    return s;
}

double shjb_ppde_residual(const SHJBProblem& problem, const Partition& pi, const ValueSlice& s) {
    PMLAB_REQUIRE(s.values.size() == 18, StencilError, "residual needs a 2 x 3 x 3 stencil");
    PMLAB_REQUIRE(s.ht > 0.0 && s.hxbar > 0.0 && s.hx > 0.0, StencilError, "residual stencil steps must be positive");
    problem.validate();
    // frozen path: (0,0), partition knots, constant to T
    std::vector<double> times{0.0}, values{0.0};
    double S = 0.0;
    for (const auto& p : pi.points) {
        S += p.increment[0];
        times.push_back(p.time);
        values.push_back(S);
    }
    PathView w{&times, &values};
    const double u = s.at(0, 0, 0);
    const double ut = (s.at(1, 0, 0) - u) / s.ht;
    const double ub = (s.at(0, 1, 0) - s.at(0, -1, 0)) / (2 * s.hxbar);
    const double ubb = (s.at(0, 1, 0) - 2 * u + s.at(0, -1, 0)) / (s.hxbar * s.hxbar);
    const double ux = (s.at(0, 0, 1) - s.at(0, 0, -1)) / (2 * s.hx);
    const double uxx = (s.at(0, 0, 1) - 2 * u + s.at(0, 0, -1)) / (s.hx * s.hx);
    const double uxb = (s.at(0, 1, 1) - s.at(0, 1, -1) - s.at(0, -1, 1) + s.at(0, -1, -1)) / (4 * s.hx * s.hxbar);
    double best = -std::numeric_limits<double>::infinity();
    for (double a : problem.controls) {
        const double sig = coef(problem.sigma, s.t, w, s.x, a);
        double h = 0.5 * sig * sig * uxx + sig * uxb + coef(problem.b, s.t, w, s.x, a) * ux +
                   problem.driver_value(s.t, w, s.x, u, ub + ux * sig, a);
        best = std::max(best, h);
    }
    return ut + 0.5 * ubb + best;
}

}  // namespace pmlab
