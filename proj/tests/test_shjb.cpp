#include <doctest.h>

#include <cmath>
#include <random>

#include "pmlab/errors.hpp"
#include "pmlab/hitting.hpp"
#include "pmlab/shjb.hpp"

using namespace pmlab;

namespace {

SHJBProblem drift_problem(std::vector<double> controls, double sigma) {
    SHJBProblem p;
    p.name = "drift";
    p.controls = std::move(controls);
    p.horizon = 1.0;
    p.b = [](double, const PathView&, double, double a) { return a; };
    p.sigma = [sigma](double, const PathView&, double, double) { return sigma; };
    p.g = [](const PathView&, double x) { return x; };
    return p;
}

Partition empty_pi(double eps, double L1) {
    Partition pi;
    pi.epsilon = eps;
    pi.L1 = L1;
    return pi;
}

// b = a + cos(2 w_t): depends on the path only through its current value
SHJBProblem path_problem() {
    SHJBProblem p = drift_problem({-1.0, 1.0}, 0.5);
    p.name = "cos-drift";
    p.b = [](double t, const PathView& w, double, double a) { return a + std::cos(2.0 * w.value(t)); };
    return p;
}

}  // namespace

TEST_CASE("degenerate dynamics return x") {
    SHJBProblem p = drift_problem({0.0}, 0.0);
    SHJBConfig cfg;
    cfg.samples = 10;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    auto v = simulate_value_direct(p, 0.0, w, 0.37, cfg, 1);
    CHECK(v.value == 0.37);
    CHECK(v.stderr == 0.0);
}

TEST_CASE("drift control picks the upward control") {
    auto w = SampledPath::zero(1, 0.0, 1.0);
    SHJBConfig cfg;
    cfg.samples = 4000;
    auto det = simulate_value_direct(drift_problem({-1.0, 1.0}, 0.0), 0.0, w, 0.2, cfg, 2);
    CHECK(det.value == doctest::Approx(1.2).epsilon(1e-12));
    REQUIRE(det.control.size() == 1);
    CHECK(det.control[0] == 1);
    auto noisy = simulate_value_direct(drift_problem({-1.0, 1.0}, 1.0), 0.0, w, 0.2, cfg, 2);
    CHECK(std::fabs(noisy.value - 1.2) <= 3 * noisy.stderr);
}

TEST_CASE("linear discount closed form") {
    const double c = 0.8;
    SHJBProblem p;
    p.horizon = 1.0;
    p.g = [](const PathView&, double) { return 1.0; };
    p.fy = [c](double, const PathView&, double, double) { return -c; };
    p.sigma = [](double, const PathView&, double, double) { return 1.0; };
    SHJBConfig cfg;
    cfg.samples = 200;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    for (double t : {0.0, 0.3, 0.75}) {
        auto v = simulate_value_direct(p, t, w, 0.0, cfg, 3);
        CHECK(std::fabs(v.value - std::exp(-c * (1.0 - t))) <= std::max(3 * v.stderr, 1e-12));
    }
}

TEST_CASE("z-dependent affine driver uses the exact weight") {
    // f = k z with g = B_T: Y_0 = E[B_T exp(k B_T - k^2 T / 2)] = k T
    const double k = 0.6;
    SHJBProblem p;
    p.horizon = 1.0;
    p.g = [](const PathView& w, double) { return w.current(); };
    p.fz = [k](double, const PathView&, double, double) { return k; };
    SHJBConfig cfg;
    cfg.samples = 20000;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    auto v = simulate_value_direct(p, 0.0, w, 0.0, cfg, 4);
    CHECK(std::fabs(v.value - k) <= 4 * v.stderr);
}

TEST_CASE("freezing is a no-op for path-independent coefficients") {
    SHJBProblem p = drift_problem({-1.0, 0.0, 1.0}, 0.7);
    p.f0 = [](double t, const PathView&, double x, double a) { return std::sin(x) * t - 0.1 * a * a; };
    p.fy = [](double, const PathView&, double x, double) { return -0.3 * std::cos(x); };
    SHJBConfig cfg;
    cfg.samples = 300;
    cfg.intervals = 2;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    auto direct = simulate_value_direct(p, 0.0, w, 0.1, cfg, 9);
    auto frozen = shjb_cascade_value(p, empty_pi(cfg.epsilon, cfg.L1), 0.0, 0.0, 0.1, cfg, 9);
    CHECK(direct.value == frozen.value);
    CHECK(direct.stderr == frozen.stderr);
    CHECK(direct.control == frozen.control);
}

TEST_CASE("control enrichment never lowers the value") {
    auto w = SampledPath::zero(1, 0.0, 1.0);
    SHJBConfig cfg;
    cfg.samples = 500;
    SHJBProblem small = path_problem();
    small.controls = {0.0};
    SHJBProblem big = path_problem();
    big.controls = {0.0, -0.5, 0.5};
    auto a = simulate_value_direct(small, 0.0, w, 0.0, cfg, 5);
    auto b = simulate_value_direct(big, 0.0, w, 0.0, cfg, 5);
    CHECK(b.value >= a.value);
    cfg.intervals = 2;
    auto c = simulate_value_direct(big, 0.0, w, 0.0, cfg, 5);
    CHECK(c.value >= b.value - 1e-12);
}

TEST_CASE("value bound") {
    SHJBProblem p = path_problem();
    p.g = [](const PathView& w, double x) { return std::tanh(x + w.current()); };
    p.f0 = [](double, const PathView&, double, double a) { return 0.5 * a; };
    p.fy = [](double, const PathView&, double, double) { return 0.4; };
    const double L = 0.4, gmax = 1.0, fmax = 0.5;
    SHJBConfig cfg;
    cfg.samples = 300;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    for (double x : {-2.0, 0.0, 1.5}) {
        auto v = simulate_value_direct(p, 0.0, w, x, cfg, 6);
        CHECK(std::fabs(v.value) <= std::exp(L) * (gmax + fmax) + 1e-12);
    }
}

TEST_CASE("cascade approaches the direct value as epsilon shrinks") {
    SHJBProblem p = path_problem();
    auto w = SampledPath::zero(1, 0.0, 1.0);
    SHJBConfig cfg;
    cfg.samples = 2000;
    cfg.step = 5e-3;
    auto direct = simulate_value_direct(p, 0.0, w, 0.0, cfg, 8);
    double prev = 1e9;
    for (double eps : {0.4, 0.2, 0.1}) {
        cfg.epsilon = eps;
        auto c = shjb_cascade_value(p, empty_pi(eps, cfg.L1), 0.0, 0.0, 0.0, cfg, 8);
        double gap = std::fabs(c.value - direct.value);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("cascade value with a nonempty partition") {
    SHJBProblem p = path_problem();
    SHJBConfig cfg;
    cfg.samples = 200;
    Partition pi = empty_pi(cfg.epsilon, cfg.L1).extended(0.05, {0.1});
    auto v = shjb_cascade_value(p, pi, 0.07, 0.02, 0.0, cfg, 1);
    CHECK(std::isfinite(v.value));
    CHECK_THROWS_AS(shjb_cascade_value(p, pi, 0.07, 0.2, 0.0, cfg, 1), DomainError);
    CHECK_THROWS_AS(shjb_cascade_value(p, pi, 0.01, 0.0, 0.0, cfg, 1), DomainError);
}

TEST_CASE("general driver Picard iteration") {
    SHJBProblem p;
    p.horizon = 1.0;
    p.driver = DriverClass::general;
    p.g = [](const PathView&, double) { return 1.0; };
    const double c = 0.5;
    p.f = [c](double, const PathView&, double, double y, double, double) { return -c * y; };
    SHJBConfig cfg;
    cfg.samples = 20;
    cfg.inner_samples = 4;
    auto w = SampledPath::zero(1, 0.0, 1.0);
    auto v = simulate_value_direct(p, 0.0, w, 0.0, cfg, 1);
    REQUIRE(v.picard.size() == 3);
    CHECK(v.picard[0] == doctest::Approx(1.0));
    CHECK(v.picard[1] == doctest::Approx(1.0 - c));
    CHECK(std::fabs(v.value - std::exp(-c)) <= 0.05);
    p.f = [](double, const PathView&, double, double y, double, double) { return -5.0 * y; };
    CHECK_THROWS_AS(simulate_value_direct(p, 0.0, w, 0.0, cfg, 1), ConvergenceError);
}

TEST_CASE("lifted residual") {
    SHJBProblem p;
    p.horizon = 1.0;
    p.g = [](const PathView& w, double) { return w.current() * w.current(); };
    Partition pi = empty_pi(0.2, 2.0);
    auto heat = [](double t, double xb, double) { return xb * xb + (1.0 - t); };
    auto s = ValueSlice::sample(heat, 0.3, 0.05, 0.0, 1e-3, 1e-2, 1e-2);
    CHECK(std::fabs(shjb_ppde_residual(p, pi, s)) <= 1e-9);
    auto cst = ValueSlice::sample([](double, double, double) { return 2.0; }, 0.3, 0.0, 0.0, 1e-3, 1e-2, 1e-2);
    CHECK(shjb_ppde_residual(p, pi, cst) == 0.0);

    // polynomial against the hand-computed operator
    SHJBProblem q = path_problem();
    q.f0 = [](double, const PathView&, double x, double) { return x; };
    q.fy = [](double, const PathView&, double, double) { return -0.5; };
    q.fz = [](double, const PathView&, double, double) { return 0.25; };
    auto poly = [](double t, double xb, double x) { return t * xb * x + xb * xb * x + 0.5 * x * x * x - t * t; };
    const double t = 0.4, xb = 0.1, x = 0.3;
    for (double h : {1e-2, 5e-3}) {
        auto sl = ValueSlice::sample(poly, t, xb, x, h * h, h, h);
        double u = poly(t, xb, x);
        double ut = xb * x - 2 * t, ub = t * x + 2 * xb * x, ubb = 2 * x;
        double ux = t * xb + xb * xb + 1.5 * x * x, uxx = 3 * x, uxb = t + 2 * xb;
        double best = -1e300;
        PathView w0;
        std::vector<double> tt{0.0}, vv{0.0};
        w0.times = &tt;
        w0.values = &vv;
        for (double a : q.controls) {
            double sig = 0.5, b = a + std::cos(0.0);
            best = std::max(best, 0.5 * sig * sig * uxx + sig * uxb + b * ux + x - 0.5 * u + 0.25 * (ub + ux * sig));
        }
        double exact = ut + 0.5 * ubb + best;
        CHECK(std::fabs(shjb_ppde_residual(q, pi, sl) - exact) <= 20 * h);
    }
    ValueSlice bad;
    CHECK_THROWS_AS(shjb_ppde_residual(p, pi, bad), StencilError);
}
