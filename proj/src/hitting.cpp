#include "pmlab/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmlab/errors.hpp"

namespace pmlab {

void ConeSpec::validate() const {
    PMLAB_REQUIRE(radius > 0.0, PreconditionError, "cone radius must be positive");
    PMLAB_REQUIRE(slope >= 1.0, PreconditionError, "cone slope L1 must be at least 1");
    PMLAB_REQUIRE(t0 < horizon, PreconditionError, "cone start must precede the horizon");
}

double ConeSpec::top() const { return std::min(t0 + radius / slope, horizon); }

const char* to_string(ConeRegion r) {
    switch (r) {
        case ConeRegion::interior: return "interior";
        case ConeRegion::lateral_boundary: return "lateral_boundary";
        case ConeRegion::terminal_boundary: return "terminal_boundary";
        case ConeRegion::outside: return "outside";
    }
    return "outside";
}

namespace {

double excess(const double* y, int d, double c, double L1, double u, const double* v) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double w = y[i] + u * v[i];
        s += w * w;
    }
    return std::sqrt(s) + L1 * u - c;
}

}  // namespace

double segment_crossing(const double* ya, const double* v, int d, double c, double L1, double ua,
                        double ub) {
    double vv = 0.0, yv = 0.0, yy = 0.0;
    for (int i = 0; i < d; ++i) {
        vv += v[i] * v[i];
        yv += ya[i] * v[i];
        yy += ya[i] * ya[i];
    }
    double A = vv - L1 * L1;
    double B = yv + c * L1;
    double C = yy - c * c;
    double roots[2];
    int nroots = 0;
    double scale = vv + L1 * L1;
    if (std::fabs(A) <= 1e-14 * scale) {
        if (B != 0.0) roots[nroots++] = -C / (2.0 * B);
    } else {
        double disc = B * B - A * C;
        if (disc < 0.0) disc = 0.0;
        double q = -(B + std::copysign(std::sqrt(disc), B));
        if (q != 0.0) {
            roots[nroots++] = q / A;
            roots[nroots++] = C / q;
        } else {
            roots[nroots++] = 0.0;
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < nroots; ++k) {
        double u = roots[k];
        if (!std::isfinite(u)) continue;
        double slack = 1e-12 * (std::fabs(c) + L1 * std::fabs(u) + 1e-300);
        if (c - L1 * u < -slack) continue;  // spurious root of the squared equation
        best = std::max(best, u);
    }
    if (!(best >= ua - 1e-9 * (1.0 + std::fabs(ua)) && best <= ub + 1e-9 * (1.0 + std::fabs(ub)))) {
        // roundoff fallback
        double lo = ua, hi = ub;
        for (int it = 0; it < 200 && hi > lo; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (excess(ya, d, c, L1, mid, v) >= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        best = hi;
    }
    return std::clamp(best, ua, ub);
}

HittingResult hit_cone(const SampledPath& path, double t, std::span<const double> x, double R,
                       double L1, double T) {
    const int d = path.dim();
    PMLAB_REQUIRE(int(x.size()) == d, DimensionError, "hitting: start point has wrong dimension");
    PMLAB_REQUIRE(t >= path.t_start(), DomainError, "hitting: start time before the path");
    PMLAB_REQUIRE(path.t_end() >= T, DomainError, "hitting: path does not cover [t, T]");
    HittingResult res;
    res.location.assign(std::size_t(d), 0.0);
    Point pt = path.value(t);
    Point ya(static_cast<std::size_t>(d)), yb(static_cast<std::size_t>(d)), vel(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) res.location[std::size_t(i)] = x[std::size_t(i)];
    // ties within roundoff count as hits: the infimum picks the earliest such time
    const double tie = 1e-12 * std::max(1.0, R);
    if (norm(x) >= R - tie) {
        res.time = t;
        res.kind = HitKind::lateral;
        return res;
    }
    if (t >= T) {
        res.time = T;
        res.kind = HitKind::terminal;
        return res;
    }
    const std::size_t n = path.knot_count();
    for (std::size_t k = path.segment_index(t);; ++k) {
        const double sk = path.knot_time(k);
        auto pk = path.knot_value(k);
        const bool last = (k + 1 >= n);
        const double a = std::max(t, sk);
        double b;
        bool at_knot;
        if (last) {
            b = T;
            at_knot = false;
            std::fill(vel.begin(), vel.end(), 0.0);
        } else {
            const double sn = path.knot_time(k + 1);
            auto pn = path.knot_value(k + 1);
            for (int i = 0; i < d; ++i) vel[std::size_t(i)] = (pn[std::size_t(i)] - pk[std::size_t(i)]) / (sn - sk);
            at_knot = sn <= T;
            b = at_knot ? sn : T;
        }
        for (int i = 0; i < d; ++i) ya[std::size_t(i)] = x[std::size_t(i)] + (pk[std::size_t(i)] - pt[std::size_t(i)]);
        const double c = R - L1 * (sk - t);
        if (at_knot) {
            auto pn = path.knot_value(k + 1);
            for (int i = 0; i < d; ++i) yb[std::size_t(i)] = x[std::size_t(i)] + (pn[std::size_t(i)] - pt[std::size_t(i)]);
        } else {
            for (int i = 0; i < d; ++i) yb[std::size_t(i)] = ya[std::size_t(i)] + (b - sk) * vel[std::size_t(i)];
        }
        const double fb = norm(yb) + L1 * (b - t) - R;
        if (fb >= -tie) {
            const double ua = a - sk, ub = b - sk;
            double u = segment_crossing(ya.data(), vel.data(), d, c, L1, ua, ub);
            if (ub - u <= 1e-14 * std::max(1.0, std::fabs(b))) {
                res.time = b;
                res.location = yb;
            } else {
                res.time = std::max(t, sk + u);
                for (int i = 0; i < d; ++i) res.location[std::size_t(i)] = ya[std::size_t(i)] + u * vel[std::size_t(i)];
            }
            res.kind = HitKind::lateral;
            return res;
        }
        if (b >= T) {
            res.time = T;
            res.kind = HitKind::terminal;
            res.location = yb;
            return res;
        }
    }
}

HittingResult hitting_time(const SampledPath& path, double t, std::span<const double> x,
                           const ConeSpec& spec) {
    spec.validate();
    PMLAB_REQUIRE(norm(x) <= spec.radius, PreconditionError, "hitting: |x| exceeds the radius");
    PMLAB_REQUIRE(t >= spec.t0, PreconditionError, "hitting: start before the cone apex time");
    return hit_cone(path, t, x, spec.radius, spec.slope, spec.horizon);
}

Partition hitting_sequence(const SampledPath& path, double epsilon, double L1) {
    PMLAB_REQUIRE(epsilon > 0.0, PreconditionError, "hitting_sequence: epsilon must be positive");
    PMLAB_REQUIRE(L1 > 0.0, PreconditionError, "hitting_sequence: L1 must be positive");
    Partition pi;
    pi.epsilon = epsilon;
    pi.L1 = L1;
    pi.dim = path.dim();
    const double T = path.t_end();
    Point origin(std::size_t(path.dim()), 0.0);
    double H = path.t_start();
    for (;;) {
        HittingResult r = hit_cone(path, H, origin, epsilon, L1, T);
        if (r.time >= T) {
            pi.terminal = true;
            return pi;
        }
        if (!(r.time > H)) throw DomainError("hitting_sequence: no progress at t=" + std::to_string(H));
        pi.points.push_back({r.time, r.location});
        H = r.time;
    }
}

ConeRegion cone_classify(const ConeSpec& spec, double s, std::span<const double> x) {
    if (s < spec.t0 || s > spec.horizon) return ConeRegion::outside;
    const double r = norm(x) + spec.slope * (s - spec.t0);
    if (r < spec.radius && s < spec.top()) return ConeRegion::interior;
    if (r == spec.radius) return ConeRegion::lateral_boundary;
    if (s == spec.horizon && r <= spec.radius) return ConeRegion::terminal_boundary;
    return ConeRegion::outside;
}

bool markov_restart_check(const SampledPath& path, double t, std::span<const double> x,
                          const ConeSpec& spec, double tau) {
    HittingResult h = hitting_time(path, t, x, spec);
    PMLAB_REQUIRE(tau >= t && tau <= h.time, PreconditionError,
                  "markov_restart_check: tau must lie in [t, hit time]");
    Point pt = path.value(t), ptau = path.value(tau);
    Point xr(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xr[i] = x[i] + (ptau[i] - pt[i]);
    const double Rr = spec.radius - spec.slope * (tau - t);
    HittingResult h2 = hit_cone(path, tau, xr, Rr, spec.slope, spec.horizon);
    return h2.time == h.time;
}

HittingVariants hitting_variants(const SampledPath& path, double t, double epsilon) {
    PMLAB_REQUIRE(epsilon > 0.0, PreconditionError, "hitting_variants: epsilon must be positive");
    const double T = path.t_end();
    const int d = path.dim();
    Point origin(std::size_t(d), 0.0);
    HittingVariants out{};
    out.ball_exit = hit_cone(path, t, origin, epsilon, 0.0, std::min(t + epsilon, T)).time;

    Point pt = path.value(t);
    Point ya(static_cast<std::size_t>(d)), yb(static_cast<std::size_t>(d)), vel(static_cast<std::size_t>(d));
    double M = 0.0;
    const std::size_t n = path.knot_count();
    out.star = T;
    if (t >= T) return out;
    for (std::size_t k = path.segment_index(t);; ++k) {
        const double sk = path.knot_time(k);
        auto pk = path.knot_value(k);
        const bool last = (k + 1 >= n);
        const double a = std::max(t, sk);
        double b = last ? T : std::min(path.knot_time(k + 1), T);
        if (last) {
            std::fill(vel.begin(), vel.end(), 0.0);
        } else {
            auto pn = path.knot_value(k + 1);
            double sn = path.knot_time(k + 1);
            for (int i = 0; i < d; ++i) vel[std::size_t(i)] = (pn[std::size_t(i)] - pk[std::size_t(i)]) / (sn - sk);
        }
        for (int i = 0; i < d; ++i) {
            ya[std::size_t(i)] = pk[std::size_t(i)] - pt[std::size_t(i)];
            yb[std::size_t(i)] = ya[std::size_t(i)] + (b - sk) * vel[std::size_t(i)];
        }
        double best = std::numeric_limits<double>::infinity();
        double s_clock = t + epsilon - M;
        if (s_clock <= b) best = std::max(s_clock, a);
        if (norm(yb) + (b - t) >= epsilon) {
            double u = segment_crossing(ya.data(), vel.data(), d, epsilon - (sk - t), 1.0, a - sk, b - sk);
            best = std::min(best, sk + u);
        }
        if (best <= b) {
            out.star = std::min(best, T);
            return out;
        }
        M = std::max(M, norm(yb));
        if (b >= T) return out;
    }
}

}  // namespace pmlab
