#include "pmlab/cone_pde.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "pmlab/errors.hpp"

namespace pmlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEigenClamp = 1e-12;

}  // namespace

double positive_eigen_sum(const Mat& gamma) {
    double s = 0.0;
    if (gamma.rows() == 1) {
        double l = gamma(0, 0);
        return l > kEigenClamp ? l : 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(gamma, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > kEigenClamp) s += es.eigenvalues()(i);
    return s;
}

double negative_eigen_sum(const Mat& gamma) {
    double s = 0.0;
    if (gamma.rows() == 1) {
        double l = gamma(0, 0);
        return l < -kEigenClamp ? -l : 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(gamma, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < -kEigenClamp) s -= es.eigenvalues()(i);
    return s;
}

Generator zero_generator() {
    Generator g;
    g.fn = [](double, const Vec&, double, const Vec&, const Mat&) { return 0.0; };
    g.name = "zero";
    return g;
}

Generator heat_generator(double scale) {
    Generator g;
    g.fn = [scale](double, const Vec&, double, const Vec&, const Mat& gamma) { return scale * gamma.trace(); };
    g.lipschitz = scale;
    g.name = "heat";
    return g;
}

Generator make_upper_bounding(double L, double C0) {
    PMLAB_REQUIRE(L > 0.0 && C0 >= 0.0, PreconditionError, "bounding generator needs L > 0, C0 >= 0");
    Generator g;
    g.fn = [L, C0](double, const Vec&, double y, const Vec& z, const Mat& gamma) {
        return L * positive_eigen_sum(gamma) + L * (std::fabs(y) + z.norm()) + C0;
    };
    g.lipschitz = L;
    g.z_lipschitz = L;
    g.name = "upper";
    return g;
}

Generator make_lower_bounding(double L, double C0) {
    PMLAB_REQUIRE(L > 0.0 && C0 >= 0.0, PreconditionError, "bounding generator needs L > 0, C0 >= 0");
    Generator g;
    g.fn = [L, C0](double, const Vec&, double y, const Vec& z, const Mat& gamma) {
        return -L * negative_eigen_sum(gamma) - L * (std::fabs(y) + z.norm()) - C0;
    };
    g.lipschitz = L;
    g.z_lipschitz = L;
    g.name = "lower";
    return g;
}

double ConeGrid::cfl_limit(double lipschitz) const {
    if (lipschitz <= 0.0) return std::numeric_limits<double>::infinity();
    double d = double(dim);
    return 1.0 / (2.0 * lipschitz * d / (dx * dx) + lipschitz * d / dx + lipschitz);
}

ConeGrid ConeGrid::make(const ConeSpec& spec, int dim, double dx, const Generator& g, double dt,
                        DomainShape shape) {
    ConeGrid grid;
    grid.spec = spec;
    grid.dim = dim;
    grid.dx = dx;
    grid.shape = shape;
    grid.dt = dt > 0.0 ? dt : std::min(dx, 0.9 * grid.cfl_limit(g.lipschitz));
    return grid;
}

void ConeGrid::validate(const Generator& g) const {
    spec.validate();
    PMLAB_REQUIRE(dim >= 1 && dim <= 3, ConfigurationError, "cone grid supports 1 <= d <= 3");
    PMLAB_REQUIRE(dx > 0.0 && dt > 0.0, ConfigurationError, "cone grid steps must be positive");
    PMLAB_REQUIRE(dt <= cfl_limit(g.lipschitz) * (1.0 + 1e-12), ConfigurationError,
                  "cone grid violates the CFL condition");
    PMLAB_REQUIRE(2.0 * spec.radius / dx >= 3.0, ConfigurationError,
                  "cone grid needs at least 3 interior nodes per axis at the base");
}

double discrete_operator(const Generator& g, double s, const Vec& x, const Stencil& st, int dim,
                         double dx) {
    Vec z(dim);
    Mat gamma(dim, dim);
    double lf = 0.0;
    for (int i = 0; i < dim; ++i) {
        z(i) = (st.plus[i] - st.minus[i]) / (2.0 * dx);
        double second = st.plus[i] - 2.0 * st.center + st.minus[i];
        gamma(i, i) = second / (dx * dx);
        lf += second;
        for (int j = i + 1; j < dim; ++j) {
            gamma(i, j) = gamma(j, i) = st.cross[i][j] / (4.0 * dx * dx);
        }
    }
    return g(s, x, st.center, z, gamma) + g.z_lipschitz / (2.0 * dx) * lf;
}

double explicit_update(const Generator& g, double s, const Vec& x, const Stencil& st, int dim,
                       double dx, double dt) {
    return st.center + dt * discrete_operator(g, s, x, st, dim, dx);
}

double ValueField::radius_at(double s) const {
    const auto& sp = grid_.spec;
    if (grid_.shape == DomainShape::cylinder) return sp.radius;
    return std::max(0.0, sp.radius - sp.slope * (s - sp.t0));
}

bool ValueField::is_interior(double s, const Vec& x) const {
    return s >= grid_.spec.t0 && s < top_ && x.norm() < radius_at(s);
}

double ValueField::boundary_value(double s, const Vec& x) const {
    const auto& sp = grid_.spec;
    const double r = x.norm();
    if (grid_.shape == DomainShape::cylinder) {
        if (s >= top_ && r <= sp.radius) return boundary_(top_, x);
        if (r == 0.0) return boundary_(s, x);
        return boundary_(s, Vec(x * (sp.radius / r)));
    }
    const double rs = radius_at(s);
    if (s >= top_ && r <= rs) return boundary_(top_, x);
    if (r <= sp.radius) {
        // lateral point with the same spatial position
        double hit = sp.t0 + (sp.radius - r) / sp.slope;
        return boundary_(std::min(hit, s), x);
    }
    if (rs <= 0.0) return boundary_(s, Vec(Vec::Zero(x.size())));
    return boundary_(s, Vec(x * (rs / r)));
}

double ValueField::slice_time(std::size_t k) const {
    return k + 1 == slices_ ? top_ : grid_.spec.t0 + double(k) * dt_;
}

const double* ValueField::slice_ptr(std::size_t k) const {
    PMLAB_REQUIRE(keep_ || k == 0, PreconditionError, "value field keeps only the first slice");
    return values_.data() + (keep_ ? k * nodes_ : 0);
}

double ValueField::node(std::size_t slice, const std::vector<int>& offset) const {
    PMLAB_REQUIRE(int(offset.size()) == grid_.dim, DimensionError, "node offset has wrong dimension");
    std::size_t idx = 0, stride = 1;
    for (int i = 0; i < grid_.dim; ++i) {
        int o = offset[std::size_t(i)];
        PMLAB_REQUIRE(o >= -K_ && o <= K_, DomainError, "node offset outside the lattice");
        idx += std::size_t(o + K_) * stride;
        stride *= n_axis_;
    }
    return slice_ptr(slice)[idx];
}

double ValueField::apex() const {
    return node(0, std::vector<int>(static_cast<std::size_t>(grid_.dim), 0));
}

double ValueField::slice_interp(std::size_t k, const Vec& x) const {
    const int d = grid_.dim;
    const double* v = slice_ptr(k);
    std::size_t base = 0, stride = 1;
    double w[3];
    std::size_t strides[3];
    int i0s[3];
    for (int i = 0; i < d; ++i) {
        double pos = x(i) / grid_.dx + double(K_);
        int i0 = int(std::floor(pos));
        i0 = std::clamp(i0, 0, int(n_axis_) - 2);
        w[i] = pos - double(i0);
        i0s[i] = i0;
        base += std::size_t(i0) * stride;
        strides[i] = stride;
        stride *= n_axis_;
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        std::size_t idx = base;
        double weight = 1.0;
        for (int i = 0; i < d; ++i) {
            bool up = (corner >> i) & 1;
            idx += up ? strides[i] : 0;
            weight *= up ? w[i] : 1.0 - w[i];
        }
        if (weight == 0.0) continue;
        double val = v[idx];
        if (std::isnan(val)) {
            Vec c(d);
            for (int i = 0; i < d; ++i) c(i) = (double(i0s[i] + ((corner >> i) & 1)) - double(K_)) * grid_.dx;
            val = boundary_value(slice_time(k), c);
        }
        acc += weight * val;
    }
    return acc;
}

double ValueField::evaluate(double s, const Vec& x) const {
    PMLAB_REQUIRE(x.size() == grid_.dim, DimensionError, "evaluate: point has wrong dimension");
    PMLAB_REQUIRE(s >= grid_.spec.t0, DomainError, "evaluate: time before the cone");
    if (!is_interior(s, x)) return boundary_value(s, x);
    if (!keep_) {
        PMLAB_REQUIRE(s == grid_.spec.t0, PreconditionError,
                      "evaluate: field without slices can only be read at t0");
        return slice_interp(0, x);
    }
    auto k = std::size_t(std::floor((s - grid_.spec.t0) / dt_));
    if (k + 1 >= slices_) k = slices_ - 2;
    double w = (s - slice_time(k)) / (slice_time(k + 1) - slice_time(k));
    w = std::clamp(w, 0.0, 1.0);
    double a = slice_interp(k, x);
    if (w == 0.0) return a;
    return (1.0 - w) * a + w * slice_interp(k + 1, x);
}

std::string ValueField::to_csv() const {
    std::string out = "s";
    for (int i = 0; i < grid_.dim; ++i) out += ",x" + std::to_string(i + 1);
    out += ",v\n";
    char buf[64];
    std::size_t count = keep_ ? slices_ : 1;
    for (std::size_t k = 0; k < count; ++k) {
        const double* v = slice_ptr(k);
        for (std::size_t n = 0; n < nodes_; ++n) {
            if (std::isnan(v[n])) continue;
            std::snprintf(buf, sizeof buf, "%.17g", slice_time(k));
            out += buf;
            std::size_t r = n;
            for (int i = 0; i < grid_.dim; ++i) {
                std::snprintf(buf, sizeof buf, ",%.17g", (double(r % n_axis_) - double(K_)) * grid_.dx);
                out += buf;
                r /= n_axis_;
            }
            std::snprintf(buf, sizeof buf, ",%.17g\n", v[n]);
            out += buf;
        }
    }
    return out;
}

ValueField solve_cone(const Generator& g, const ConeGrid& grid, const BoundaryData& boundary,
                      bool keep_slices) {
    grid.validate(g);
    ValueField f;
    f.grid_ = grid;
    f.boundary_ = boundary;
    f.keep_ = keep_slices;
    const auto& sp = grid.spec;
    const int d = grid.dim;
    const double dx = grid.dx;
    f.top_ = std::min(sp.t0 + sp.radius / sp.slope, sp.horizon);
    auto nt = std::size_t(std::max(1.0, std::ceil((f.top_ - sp.t0) / grid.dt - 1e-9)));
    f.dt_ = (f.top_ - sp.t0) / double(nt);
    f.slices_ = nt + 1;
    f.K_ = int(std::ceil(sp.radius / dx - 1e-9)) + 2;
    f.n_axis_ = std::size_t(2 * f.K_ + 1);
    f.nodes_ = 1;
    for (int i = 0; i < d; ++i) f.nodes_ *= f.n_axis_;

    std::vector<Vec> coord(f.nodes_, Vec(d));
    std::vector<double> radius(f.nodes_);
    std::size_t strides[3] = {1, f.n_axis_, f.n_axis_ * f.n_axis_};
    for (std::size_t n = 0; n < f.nodes_; ++n) {
        std::size_t r = n;
        for (int i = 0; i < d; ++i) {
            coord[n](i) = (double(r % f.n_axis_) - double(f.K_)) * dx;
            r /= f.n_axis_;
        }
        radius[n] = coord[n].norm();
    }
    const double band = sp.slope * f.dt_ + (2.0 * std::sqrt(double(d)) + 1.0) * dx;
    // nodes whose stencil stays inside the lattice
    auto inner = [&](std::size_t n) {
        std::size_t r = n;
        for (int i = 0; i < d; ++i) {
            std::size_t c = r % f.n_axis_;
            if (c == 0 || c + 1 == f.n_axis_) return false;
            r /= f.n_axis_;
        }
        return true;
    };

    const bool extend = grid.ghost == GhostRule::extension;
    std::vector<double> next(f.nodes_, kNaN), cur(f.nodes_, kNaN);
    if (keep_slices)
        f.values_.assign(f.slices_ * f.nodes_, kNaN);
    else
        f.values_.assign(f.nodes_, kNaN);

    const double s_top = f.top_;
    const double r_top = f.radius_at(s_top);
    for (std::size_t n = 0; n < f.nodes_; ++n)
        if (radius[n] < r_top + band)
            next[n] = extend ? boundary(s_top, coord[n]) : f.boundary_value(s_top, coord[n]);
    if (keep_slices) std::copy(next.begin(), next.end(), f.values_.begin() + long(nt * f.nodes_));
    if (nt == 0) return f;

    for (std::size_t k = nt; k-- > 0;) {
        const double s = f.slice_time(k);
        const double rk = f.radius_at(s);
        for (std::size_t n = 0; n < f.nodes_; ++n) {
            if (radius[n] < rk && inner(n)) {
                Stencil st;
                st.center = next[n];
                for (int i = 0; i < d; ++i) {
                    st.plus[i] = next[n + strides[i]];
                    st.minus[i] = next[n - strides[i]];
                    for (int j = i + 1; j < d; ++j)
                        st.cross[i][j] = next[n + strides[i] + strides[j]] - next[n + strides[i] - strides[j]] -
                                         next[n - strides[i] + strides[j]] + next[n - strides[i] - strides[j]];
                }
                double v = explicit_update(g, s, coord[n], st, d, dx, f.dt_);
                if (!std::isfinite(v))
                    throw DivergenceError("solve_cone: non-finite value at slice " + std::to_string(k), long(k));
                cur[n] = v;
            } else if (radius[n] < rk + band) {
                cur[n] = extend ? boundary(s, coord[n]) : f.boundary_value(s, coord[n]);
            } else {
                cur[n] = kNaN;
            }
        }
        if (keep_slices)
            std::copy(cur.begin(), cur.end(), f.values_.begin() + long(k * f.nodes_));
        else if (k == 0)
            f.values_ = cur;
        std::swap(cur, next);
    }
    return f;
}

MCEstimate mc_bounding_value(const BoundaryData& h, const ConeSpec& spec, double L, double C0,
                             std::size_t n, std::uint64_t seed, const BoundingMCOptions& opts) {
    spec.validate();
    PMLAB_REQUIRE(L > 0.0 && C0 >= 0.0, PreconditionError, "mc_bounding_value needs L > 0, C0 >= 0");
    PMLAB_REQUIRE(n >= 2, ConfigurationError, "mc_bounding_value needs at least two samples");
    const int d = opts.dim;
    const double t = opts.t < 0.0 ? spec.t0 : opts.t;
    Point x0 = opts.x.empty() ? Point(static_cast<std::size_t>(d), 0.0) : opts.x;
    PMLAB_REQUIRE(int(x0.size()) == d, DimensionError, "mc_bounding_value: start point dimension");
    PMLAB_REQUIRE(norm(x0) + spec.slope * (t - spec.t0) < spec.radius, PreconditionError,
                  "mc_bounding_value: start point not inside the cone");
    std::vector<double> disc = opts.discounts.empty() ? std::vector<double>{-L, 0.0, L} : opts.discounts;
    for (double b : disc) PMLAB_REQUIRE(std::fabs(b) <= L, BoundError, "discount exceeds L");

    std::vector<ControlLaw> laws;
    for (const auto& a : ControlFamily::standard_catalog(L, d, opts.zero_vol)) {
        ControlLaw law;
        law.pieces = {a};
        law.id = "const";
        laws.push_back(law);
    }
    if (opts.feedback) {
        auto fb = ControlFamily::feedback_laws(L, d, opts.zero_vol);
        laws.insert(laws.end(), fb.begin(), fb.end());
    }
    const double top = spec.top();
    auto steps = std::size_t(std::max(1.0, std::ceil((top - t) / opts.step - 1e-9)));
    const double h_step = (top - t) / double(steps);
    const double sq = std::sqrt(h_step);
    const std::size_t outputs = disc.size();
    const double sign = opts.lower ? -1.0 : 1.0;

    auto moments = chunked_moments(n, laws.size() * outputs, [&](std::size_t i, double* out) {
        thread_local std::vector<double> z;
        z.resize(steps * std::size_t(d));
        draw_normals(seed, i, z.size(), z.data());
        Vec X(d), Xn(d), loc(d);
        double vel[3];
        for (std::size_t l = 0; l < laws.size(); ++l) {
            const ControlLaw& law = laws[l];
            const ControlAction& a = law.pieces[0];
            for (int j = 0; j < d; ++j) X(j) = x0[std::size_t(j)];
            double H = top;
            bool done = false;
            for (std::size_t k = 0; k < steps && !done; ++k) {
                const double s = t + double(k) * h_step;
                const double sn = k + 1 == steps ? top : s + h_step;
                for (int j = 0; j < d; ++j) {
                    double b = a.drift[std::size_t(j)];
                    if (law.feedback != Feedback::none) {
                        double sg = X(j) > 0 ? 1.0 : (X(j) < 0 ? -1.0 : (law.feedback == Feedback::outward ? 1.0 : 0.0));
                        b = (law.feedback == Feedback::outward ? 1.0 : -1.0) * L * sg;
                    }
                    Xn(j) = X(j) + b * h_step + a.vol * sq * z[k * std::size_t(d) + std::size_t(j)];
                }
                const double fend = Xn.norm() + spec.slope * (sn - spec.t0) - spec.radius;
                if (fend >= 0.0) {
                    for (int j = 0; j < d; ++j) vel[j] = (Xn(j) - X(j)) / h_step;
                    double c = spec.radius - spec.slope * (s - spec.t0);
                    double u = segment_crossing(X.data(), vel, d, c, spec.slope, 0.0, sn - s);
                    H = s + u;
                    for (int j = 0; j < d; ++j) loc(j) = X(j) + u * vel[j];
                    done = true;
                } else {
                    X = Xn;
                }
            }
            if (!done) loc = X;  // terminal at top = T
            const double hv = h(H, loc);
            const double tau = H - t;
            for (std::size_t k = 0; k < outputs; ++k) {
                const double b = disc[k];
                const double e = std::exp(b * tau);
                const double run = b == 0.0 ? tau : (e - 1.0) / b;
                out[l * outputs + k] = e * hv + sign * C0 * run;
            }
        }
    });
    MCEstimate best;
    bool first = true;
    for (std::size_t l = 0; l < laws.size(); ++l)
        for (std::size_t k = 0; k < outputs; ++k) {
            const Moments& m = moments[l * outputs + k];
            double v = m.mean();
            if (first || (opts.lower ? v < best.value : v > best.value)) {
                first = false;
                best.value = v;
                best.stderr = m.stderr_of_mean();
                best.n_samples = m.n;
                char buf[96];
                std::snprintf(buf, sizeof buf, "|discount=%.6g", disc[k]);
                best.argmax = (laws[l].feedback == Feedback::none
                                   ? "const[b=" + std::to_string(laws[l].pieces[0].drift[0]) +
                                         ",s=" + std::to_string(laws[l].pieces[0].vol) + "]"
                                   : laws[l].id) +
                              buf;
            }
        }
    return best;
}

}  // namespace pmlab
