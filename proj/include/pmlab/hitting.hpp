#pragma once

#include <span>

#include "pmlab/path.hpp"

namespace pmlab {

struct ConeSpec {
    double t0 = 0.0;
    double radius = 1.0;
    double slope = 1.0;  // L1
    double horizon = 1.0;

    void validate() const;
    // Closing time of the cone, clamped at the horizon.
    double top() const;
};

enum class HitKind { lateral, terminal };

struct HittingResult {
    double time = 0.0;
    HitKind kind = HitKind::terminal;
    Point location;  // x + path(time) - path(t)
};

enum class ConeRegion { interior, lateral_boundary, terminal_boundary, outside };

const char* to_string(ConeRegion r);

// Largest root u of |ya + u v| + L1 u = c, clamped to [ua, ub]. The caller guarantees a
// sign change of |ya + u v| + L1 u - c over (ua, ub].
double segment_crossing(const double* ya, const double* v, int d, double c, double L1, double ua,
                        double ub);

// First s >= t with |x + path(s) - path(t)| + L1 (s - t) >= R, clamped at T.
HittingResult hit_cone(const SampledPath& path, double t, std::span<const double> x, double R,
                       double L1, double T);

HittingResult hitting_time(const SampledPath& path, double t, std::span<const double> x,
                           const ConeSpec& spec);

// H_0 = t_start, H_{n+1} the exit of the (H_n, 0, epsilon) cone. Points with H_i < T only.
Partition hitting_sequence(const SampledPath& path, double epsilon, double L1);

ConeRegion cone_classify(const ConeSpec& spec, double s, std::span<const double> x);

bool markov_restart_check(const SampledPath& path, double t, std::span<const double> x,
                          const ConeSpec& spec, double tau);

struct HittingVariants {
    double ball_exit;  // first exit of the epsilon ball, capped at (t + epsilon) ^ T
    double star;       // first s with (s - t) + running max >= epsilon, capped at T
};

HittingVariants hitting_variants(const SampledPath& path, double t, double epsilon);

}  // namespace pmlab
