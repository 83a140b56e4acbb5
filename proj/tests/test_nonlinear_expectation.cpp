#include <doctest.h>

#include <cmath>

#include "pmlab/errors.hpp"
#include "pmlab/nonlinear_expectation.hpp"

using namespace pmlab;

namespace {

MeasureFamilySpec spec1(double L = 1.0, double T = 1.0, double h = 1e-2) {
    MeasureFamilySpec s;
    s.L = L;
    s.t_end = T;
    s.step = h;
    return s;
}

ControlLaw constant_law(double b, double vol) {
    ControlLaw law;
    law.pieces = {{Point{b}, vol}};
    law.id = "c";
    return law;
}

double endpoint(const SampledPath& p) { return p.knot_value(p.knot_count() - 1)[0]; }

}  // namespace

TEST_CASE("simulate_controlled examples") {
    auto s = spec1();
    for (const auto& p : simulate_controlled(constant_law(0.0, 0.0), s, 1, 10))
        for (double v : p.values()) CHECK(v == 0.0);
    for (const auto& p : simulate_controlled(constant_law(1.0, 0.0), s, 1, 3))
        CHECK(endpoint(p) == doctest::Approx(1.0).epsilon(1e-12));
    auto paths = simulate_controlled(constant_law(0.0, 1.0), s, 7, 20000);
    double m = 0, m2 = 0, m4 = 0;
    for (const auto& p : paths) {
        double x = endpoint(p);
        m += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    double n = double(paths.size());
    double var = m2 / n - (m / n) * (m / n);
    double se = std::sqrt((m4 / n - (m2 / n) * (m2 / n)) / n);
    CHECK(std::fabs(var - 1.0) <= 3.0 * se);
    CHECK_THROWS_AS(simulate_controlled(constant_law(1.5, 0.0), s, 1, 2), BoundError);
    CHECK_THROWS_AS(simulate_controlled(constant_law(0.0, 1.5), s, 1, 2), BoundError);
}

TEST_CASE("simulation is deterministic and independent of the worker count") {
    auto s = spec1();
    set_worker_count(1);
    auto a = simulate_controlled(constant_law(0.5, 1.0), s, 99, 50);
    set_worker_count(3);
    auto b = simulate_controlled(constant_law(0.5, 1.0), s, 99, 50);
    set_worker_count(0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    auto fam = ControlFamily::constant(1.0, 1);
    PathFunctional xi = [](const SampledPath& p) { return std::sin(endpoint(p)); };
    set_worker_count(1);
    auto e1 = upper_expectation(xi, s, fam, 1000, 5);
    set_worker_count(4);
    auto e2 = upper_expectation(xi, s, fam, 1000, 5);
    set_worker_count(0);
    CHECK(e1.value == e2.value);
    CHECK(e1.stderr == e2.stderr);
}

TEST_CASE("upper expectation examples") {
    auto s = spec1();
    auto fam = ControlFamily::piecewise(1.0, 1, 8, true);
    auto c = upper_expectation([](const SampledPath&) { return 0.7; }, s, fam, 500, 1);
    CHECK(c.value == 0.7);
    CHECK(c.stderr == 0.0);

    auto lin = upper_expectation(endpoint, s, ControlFamily::constant(1.0, 1), 4000, 2);
    CHECK(std::fabs(lin.value - 1.0) <= 3.0 * lin.stderr + 1e-12);
    CHECK(lin.argmax.find("b=(1)") != std::string::npos);

    CHECK_THROWS_AS(upper_expectation(endpoint, s, ControlFamily{}, 10, 1), ConfigurationError);
}

TEST_CASE("open-loop controls reach (LT)^2 + 2LT for the squared endpoint") {
    auto s = spec1();
    auto fam = ControlFamily::piecewise(1.0, 1, 8, false);
    auto e = upper_expectation([](const SampledPath& p) { double x = endpoint(p); return x * x; },
                               s, fam, 4000, 3);
    CHECK(std::fabs(e.value - 3.0) <= 3.0 * e.stderr);
}

TEST_CASE("lower expectation is the mirror of the upper one") {
    auto s = spec1();
    auto fam = ControlFamily::constant(1.0, 1);
    PathFunctional xi = [](const SampledPath& p) { return std::cos(endpoint(p)); };
    auto lo = lower_expectation(xi, s, fam, 2000, 4);
    auto up = upper_expectation([&](const SampledPath& p) { return -xi(p); }, s, fam, 2000, 4);
    CHECK(lo.value == -up.value);
    CHECK(lo.value <= upper_expectation(xi, s, fam, 2000, 4).value);
}

TEST_CASE("monotonicity, sub-additivity and Wiener dominance") {
    auto s = spec1(1.0, 1.0, 2e-2);
    auto fam = ControlFamily::constant(1.0, 1);
    PathFunctional xi = [](const SampledPath& p) { return std::tanh(endpoint(p)); };
    PathFunctional eta = [](const SampledPath& p) { return std::tanh(endpoint(p)) + 0.1 * std::fabs(p.value1(0.5)); };
    PathFunctional zeta = [](const SampledPath& p) { return std::cos(3.0 * endpoint(p)); };
    auto ex = upper_expectation(xi, s, fam, 3000, 8);
    auto ee = upper_expectation(eta, s, fam, 3000, 8);
    CHECK(ex.value <= ee.value);
    auto ez = upper_expectation(zeta, s, fam, 3000, 8);
    auto sum = upper_expectation([&](const SampledPath& p) { return xi(p) + zeta(p); }, s, fam, 3000, 8);
    CHECK(sum.value <= ex.value + ez.value + 6.0 * std::max({sum.stderr, ex.stderr, ez.stderr}));
    auto s2 = s;
    s2.needs_wiener = true;
    auto w = upper_expectation(zeta, s2, ControlFamily::wiener(1), 3000, 8);
    CHECK(ez.value >= w.value - 3.0 * w.stderr);
    auto bad = s;
    bad.L = 0.3;
    bad.needs_wiener = true;
    CHECK_THROWS_AS(upper_expectation(zeta, bad, ControlFamily::wiener(1), 10, 1), ConfigurationError);
}

TEST_CASE("coordinate ascent never loses to the constant laws it starts from") {
    auto s = spec1(1.0, 1.0, 2e-2);
    PathFunctional xi = [](const SampledPath& p) { return 2.0 * p.value1(0.5) - p.value1(1.0); };
    auto c = upper_expectation(xi, s, ControlFamily::constant(1.0, 1, false), 500, 6);
    auto pw = upper_expectation(xi, s, ControlFamily::piecewise(1.0, 1, 8, false), 500, 6);
    CHECK(pw.value >= c.value);
    CHECK(pw.value == doctest::Approx(1.0).epsilon(0.05));  // +L then -L
}

TEST_CASE("hjb oracle examples") {
    Grid1d g{-4.0, 4.0, 401};
    double dx = g.step();
    std::size_t nt = std::size_t(std::ceil(1.0 / (dx * dx / (2.0 + dx))));
    CHECK(hjb_oracle_1d([](double) { return 0.3; }, 1.0, 1.0, g, nt) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::fabs(hjb_oracle_1d([](double x) { return x; }, 1.0, 1.0, g, nt) - 1.0) <= 2.0 * dx);
    CHECK_THROWS_AS(hjb_oracle_1d([](double x) { return x; }, 1.0, 1.0, g, 10), ConfigurationError);
}

TEST_CASE("hjb oracle and feedback Monte Carlo agree on the squared endpoint") {
    // Feedback drift away from the origin beats every open-loop law, so the value exceeds 3.
    Grid1d g{-6.0, 6.0, 601};
    double dx = g.step();
    std::size_t nt = std::size_t(std::ceil(1.0 / (dx * dx / (2.0 + dx))));
    double v = hjb_oracle_1d([](double x) { return x * x; }, 1.0, 1.0, g, nt);
    CHECK(v > 3.5);
    auto e = upper_expectation([](const SampledPath& p) { double x = endpoint(p); return x * x; },
                               spec1(1.0, 1.0, 1e-3), ControlFamily::constant(1.0, 1, true), 20000, 10);
    CHECK(std::fabs(e.value - v) <= std::max(3.0 * e.stderr, 2.0 * dx) + 0.05);
    CHECK(e.argmax.find("fb_out") != std::string::npos);
}
