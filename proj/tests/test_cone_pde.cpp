#include <doctest.h>

#include <cmath>
#include <random>

#include "pmlab/cone_pde.hpp"
#include "pmlab/errors.hpp"

using namespace pmlab;

namespace {

Vec vec1(double x) {
    Vec v(1);
    v(0) = x;
    return v;
}

ConeSpec example_cone(double eps) { return ConeSpec{0.0, eps, 1.0, 1.0}; }

}  // namespace

TEST_CASE("bounding generator values") {
    const double L = 0.7, C0 = 0.3;
    auto g = make_upper_bounding(L, C0);
    for (int d = 1; d <= 3; ++d) {
        Vec z = Vec::Zero(d);
        Mat I = Mat::Identity(d, d);
        CHECK(g(0.0, z, 0.0, z, Mat::Zero(d, d)) == doctest::Approx(C0));
        CHECK(g(0.0, z, 0.0, z, -I) == doctest::Approx(C0));
        CHECK(g(0.0, z, 0.0, z, I) == doctest::Approx(L * d + C0));
    }
    // grid search over diagonal sigma in [0, sqrt(2L)] for Gamma = I in d = 2
    double best = 0.0;
    for (int a = 0; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b) {
            double s1 = std::sqrt(2 * L) * a / 20.0, s2 = std::sqrt(2 * L) * b / 20.0;
            best = std::max(best, 0.5 * (s1 * s1 + s2 * s2));
        }
    CHECK(best == doctest::Approx(2 * L));
    auto lo = make_lower_bounding(L, C0);
    Vec z = Vec::Zero(2);
    CHECK(lo(0.0, z, 0.0, z, Mat::Identity(2, 2)) == doctest::Approx(-C0));
    CHECK(lo(0.0, z, 0.0, z, -Mat::Identity(2, 2)) == doctest::Approx(-2 * L - C0));
    CHECK_THROWS_AS(make_upper_bounding(0.0, 1.0), PreconditionError);
}

TEST_CASE("generator sandwich on random arguments") {
    const double L = 1.0, C0 = 0.5;
    auto up = make_upper_bounding(L, C0);
    auto lo = make_lower_bounding(L, C0);
    // an admissible generator: Lipschitz L in (y, z, Gamma), monotone in Gamma, |g(0)| <= C0
    auto g = [&](double y, const Vec& z, const Mat& G) {
        return 0.5 * L * positive_eigen_sum(G) - 0.3 * L * negative_eigen_sum(G) + 0.4 * L * std::sin(y) +
               0.3 * L * z.sum() / std::sqrt(double(z.size())) - 0.5 * C0;
    };
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 500; ++trial) {
        int d = 1 + trial % 3;
        Vec z(d);
        Mat A(d, d);
        for (int i = 0; i < d; ++i) {
            z(i) = nd(rng);
            for (int j = 0; j < d; ++j) A(i, j) = nd(rng);
        }
        Mat G = 0.5 * (A + A.transpose());
        double y = nd(rng);
        double v = g(y, z, G);
        CHECK(lo(0.0, z, y, z, G) <= v + 1e-12);
        CHECK(v <= up(0.0, z, y, z, G) + 1e-12);
    }
}

TEST_CASE("cfl and grid validation") {
    auto spec = example_cone(0.5);
    auto g = make_upper_bounding(1.0, 0.0);
    auto grid = ConeGrid::make(spec, 1, 0.01, g);
    CHECK(grid.dt <= grid.cfl_limit(1.0));
    ConeGrid bad = grid;
    bad.dt = 2.0 * grid.cfl_limit(1.0);
    CHECK_THROWS_AS(solve_cone(g, bad, [](double, const Vec&) { return 0.0; }), ConfigurationError);
    ConeGrid coarse = grid;
    coarse.dx = 0.4;
    CHECK_THROWS_AS(coarse.validate(zero_generator()), ConfigurationError);
}

TEST_CASE("cone example: degenerate equation solved by eps - |x|") {
    const double eps = 0.5, dx = 1.0 / 200.0;
    auto g = zero_generator();
    auto grid = ConeGrid::make(example_cone(eps), 1, dx, g);
    auto f = solve_cone(g, grid, [](double s, const Vec&) { return s; });
    double err = 0.0;
    for (int i = -99; i <= 99; ++i) {
        double x = i * dx;
        err = std::max(err, std::fabs(f.node(0, {i}) - (eps - std::fabs(x))));
    }
    CHECK(err <= 2 * dx);
    CHECK(f.apex() == doctest::Approx(eps).epsilon(1e-12));
    // interior at later times too
    for (double s : {0.1, 0.2, 0.3})
        for (double x : {-0.1, 0.0, 0.05})
            if (f.is_interior(s, vec1(x))) CHECK(std::fabs(f.evaluate(s, vec1(x)) - (eps - std::fabs(x))) <= 2 * dx);
}

TEST_CASE("cylinder example exhibits the boundary jump") {
    const double eps = 0.5, dx = 1.0 / 200.0;
    auto g = zero_generator();
    auto grid = ConeGrid::make(example_cone(eps), 1, dx, g, 0.0, DomainShape::cylinder);
    auto f = solve_cone(g, grid, [](double s, const Vec&) { return s; });
    const double t = eps - 4 * f.grid().dt;
    double inside = f.evaluate(t, vec1(eps - dx));
    double edge = f.boundary_value(t, vec1(eps));
    CHECK(inside - edge >= (eps - t) / 2);
    // the cone version is continuous there
    auto gc = ConeGrid::make(example_cone(eps), 1, dx, g);
    auto fc = solve_cone(g, gc, [](double s, const Vec&) { return s; });
    double r = eps - t;
    CHECK(std::fabs(fc.evaluate(t, vec1(r - 1e-9)) - fc.boundary_value(t, vec1(r))) <= 2 * dx);
}

TEST_CASE("constant boundary is a fixed point") {
    for (int d = 1; d <= 2; ++d) {
        auto g = make_upper_bounding(1.0, 0.0);
        ConeSpec spec{0.0, 0.3, 2.0, 1.0};
        auto grid = ConeGrid::make(spec, d, 0.05, zero_generator());
        auto f0 = solve_cone(zero_generator(), grid, [](double, const Vec&) { return 0.625; });
        CHECK(f0.apex() == 0.625);
        auto fh = solve_cone(heat_generator(), ConeGrid::make(spec, d, 0.05, heat_generator()),
                             [](double, const Vec&) { return -1.25; });
        CHECK(fh.apex() == -1.25);
        (void)g;
    }
}

TEST_CASE("heat residual against an exact classical solution") {
    for (int d = 1; d <= 2; ++d) {
        ConeSpec spec{0.0, 0.5, 1.5, 1.0};
        const double S = spec.top();
        auto w = [d, S](double s, const Vec& x) { return x.squaredNorm() + d * (S - s); };
        auto g = heat_generator();
        double dx = d == 1 ? 0.01 : 0.025;
        auto grid = ConeGrid::make(spec, d, dx, g);
        auto proj = solve_cone(g, grid, w);
        grid.ghost = GhostRule::extension;
        auto f = solve_cone(g, grid, w);
        double err = 0.0, err_proj = 0.0;
        for (double s : {0.0, 0.05, 0.1})
            for (double x : {0.0, 0.1, -0.2}) {
                Vec p = Vec::Zero(d);
                p(0) = x;
                if (d == 2) p(1) = 0.5 * x;
                if (!f.is_interior(s, p)) continue;
                err = std::max(err, std::fabs(f.evaluate(s, p) - w(s, p)));
                err_proj = std::max(err_proj, std::fabs(proj.evaluate(s, p) - w(s, p)));
            }
        // quadratics are reproduced by the stencil; what is left is interpolation error
        CHECK(err <= dx * dx + f.grid().dt);
        // projected ghosts cost one order
        CHECK(err_proj <= 2.0 * dx);
    }
}

TEST_CASE("scheme monotone in every stencil input") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto g = make_upper_bounding(0.8, 0.2);
    for (int trial = 0; trial < 300; ++trial) {
        int d = 1 + trial % 3;
        double dx = 0.05;
        ConeGrid grid;
        grid.dim = d;
        grid.dx = dx;
        double dt = 0.999 * grid.cfl_limit(g.lipschitz);
        Stencil st{};
        st.center = U(rng);
        for (int i = 0; i < d; ++i) {
            st.plus[i] = st.center + dx * U(rng);
            st.minus[i] = st.center + dx * U(rng);
            for (int j = 0; j < d; ++j) st.cross[i][j] = dx * dx * U(rng) * 0.1;
        }
        Vec x = Vec::Zero(d);
        double base = explicit_update(g, 0.0, x, st, d, dx, dt);
        const double bump = 1e-3;
        Stencil up = st;
        up.center += bump;
        CHECK(explicit_update(g, 0.0, x, up, d, dx, dt) >= base - 1e-12);
        for (int i = 0; i < d; ++i) {
            up = st;
            up.plus[i] += bump;
            CHECK(explicit_update(g, 0.0, x, up, d, dx, dt) >= base - 1e-12);
            up = st;
            up.minus[i] += bump;
            CHECK(explicit_update(g, 0.0, x, up, d, dx, dt) >= base - 1e-12);
        }
    }
}

TEST_CASE("discrete comparison for ordered boundary data") {
    ConeSpec spec{0.0, 0.4, 2.0, 1.0};
    auto g = make_upper_bounding(1.0, 0.1);
    auto grid = ConeGrid::make(spec, 1, 0.02, g);
    auto lo = [](double s, const Vec& x) { return std::sin(3 * x(0)) + s; };
    auto hi = [](double s, const Vec& x) { return std::sin(3 * x(0)) + s + 0.05 * (1 + x(0) * x(0)); };
    auto f1 = solve_cone(g, grid, lo);
    auto f2 = solve_cone(g, grid, hi);
    for (std::size_t k = 0; k < f1.slice_count(); ++k)
        for (int i = -22; i <= 22; ++i) {
            double a = f1.node(k, {i}), b = f2.node(k, {i});
            if (!std::isnan(a)) CHECK(a <= b);
        }
}

TEST_CASE("consistency on a quadratic") {
    auto g = make_upper_bounding(1.0, 0.0);
    for (int d = 1; d <= 3; ++d) {
        Mat A(d, d);
        A.setConstant(0.3);
        A.diagonal().setConstant(1.0);
        Vec b = Vec::LinSpaced(d, 0.5, -0.5);
        auto q = [&](const Vec& x) { return 0.5 * x.dot(A * x) + b.dot(x) + 0.2; };
        Vec x0 = Vec::Constant(d, 0.1);
        for (double dx : {0.02, 0.01}) {
            Stencil st{};
            st.center = q(x0);
            for (int i = 0; i < d; ++i) {
                Vec e = Vec::Zero(d);
                e(i) = dx;
                st.plus[i] = q(x0 + e);
                st.minus[i] = q(x0 - e);
                for (int j = i + 1; j < d; ++j) {
                    Vec f = Vec::Zero(d);
                    f(j) = dx;
                    st.cross[i][j] = q(x0 + e + f) - q(x0 + e - f) - q(x0 - e + f) + q(x0 - e - f);
                }
            }
            double exact = g(0.0, x0, q(x0), Vec(A * x0 + b), A);
            CHECK(std::fabs(discrete_operator(g, 0.0, x0, st, d, dx) - exact) <= 2.0 * d * dx);
        }
    }
}

TEST_CASE("probabilistic bounding value examples") {
    ConeSpec spec{0.0, 0.5, 2.0, 1.0};
    BoundingMCOptions opt;
    opt.step = 1e-2;
    auto z = mc_bounding_value([](double, const Vec&) { return 0.0; }, spec, 1.0, 0.0, 200, 1, opt);
    CHECK(z.value == 0.0);
    const double L = 0.1;
    auto one = mc_bounding_value([](double, const Vec&) { return 1.0; }, spec, L, 0.0, 500, 2, opt);
    const double tau = spec.radius / spec.slope;
    CHECK(one.value >= std::exp(-L * tau) - 1e-12);
    CHECK(one.value <= std::exp(L * tau) + 1e-12);
    CHECK(one.value >= 1.0);
}

TEST_CASE("probabilistic value agrees with the bounding PDE on the example cone") {
    const double eps = 0.5;
    ConeSpec spec = example_cone(eps);
    const double L = 0.5;
    auto h = [](double s, const Vec&) { return s; };
    auto g = make_upper_bounding(L, 0.0);
    auto f = solve_cone(g, ConeGrid::make(spec, 1, 0.01, g), h, false);
    BoundingMCOptions opt;
    opt.step = 2e-3;
    auto full = mc_bounding_value(h, spec, L, 0.0, 4000, 11, opt);
    CHECK(std::fabs(full.value - f.apex()) <= 5e-2);
    // h = s is concave across the cone, so the degenerate control is the maximizer
    opt.discounts = {0.0};
    opt.zero_vol = false;
    auto diffusive = mc_bounding_value(h, spec, L, 0.0, 4000, 11, opt);
    CHECK(diffusive.value < full.value);
}

TEST_CASE("field csv and divergence") {
    ConeSpec spec{0.0, 0.1, 1.0, 1.0};
    auto g = zero_generator();
    auto f = solve_cone(g, ConeGrid::make(spec, 1, 0.02, g), [](double s, const Vec&) { return s; });
    auto csv = f.to_csv();
    CHECK(csv.rfind("s,x1,v\n", 0) == 0);
    Generator blow;
    blow.fn = [](double, const Vec&, double, const Vec&, const Mat&) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(solve_cone(blow, ConeGrid::make(spec, 1, 0.02, blow), [](double, const Vec&) { return 0.0; }),
                    DivergenceError);
}
