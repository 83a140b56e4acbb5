#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pmlab/path.hpp"

namespace pmlab::testing {

// Gaussian random walk sampled on n uniform knots.
inline SampledPath random_walk(std::mt19937_64& rng, int dim, double T, std::size_t n, double vol = 1.0) {
    std::normal_distribution<double> nd;
    std::vector<double> values(std::size_t(dim) * (n + 1), 0.0);
    double sq = std::sqrt(T / double(n));
    for (std::size_t k = 1; k <= n; ++k)
        for (int i = 0; i < dim; ++i)
            values[k * std::size_t(dim) + std::size_t(i)] =
                values[(k - 1) * std::size_t(dim) + std::size_t(i)] + vol * sq * nd(rng);
    return SampledPath::from_uniform(dim, 0.0, T, std::move(values));
}

// Knot spacing 1/64, values multiples of 2^-10: restart arithmetic stays exact.
inline SampledPath dyadic_walk(std::mt19937_64& rng, double T, int dim = 1) {
    std::uniform_int_distribution<int> step(-48, 48);
    std::size_t n = std::size_t(T * 64.0);
    std::vector<double> times(n + 1), values((n + 1) * std::size_t(dim), 0.0);
    for (std::size_t k = 0; k <= n; ++k) times[k] = double(k) / 64.0;
    for (std::size_t k = 1; k <= n; ++k)
        for (int i = 0; i < dim; ++i)
            values[k * std::size_t(dim) + std::size_t(i)] =
                values[(k - 1) * std::size_t(dim) + std::size_t(i)] + std::ldexp(double(step(rng)), -10);
    return SampledPath(dim, 0.0, T, std::move(times), std::move(values));
}

// First grid time s in [t, T] with |x + p(s) - p(t)| + L1 (s - t) >= R.
inline double scan_exit(const SampledPath& p, double t, const Point& x, double R, double L1, double T,
                        double step) {
    Point pt = p.value(t);
    for (double s = t;; s += step) {
        if (s >= T) return T;
        Point ps = p.value(s);
        double r = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double v = x[i] + ps[i] - pt[i];
            r += v * v;
        }
        if (std::sqrt(r) + L1 * (s - t) >= R - 1e-9) return s;
    }
}

}  // namespace pmlab::testing
