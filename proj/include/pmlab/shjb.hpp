#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pmlab/nonlinear_expectation.hpp"
#include "pmlab/path.hpp"

namespace pmlab {

// Piecewise-linear view of a one-dimensional path, constant after its last knot.
struct PathView {
    const std::vector<double>* times = nullptr;
    const std::vector<double>* values = nullptr;

    double value(double s) const;
    double current() const { return values->back(); }
    double last_time() const { return times->back(); }
};

enum class DriverClass { affine, general };

// Scalar state X, scalar Brownian motion, finite control set.
struct SHJBProblem {
    std::string name;
    std::vector<double> controls{0.0};
    double horizon = 1.0;
    std::function<double(double t, const PathView& w, double x, double a)> b;
    std::function<double(double t, const PathView& w, double x, double a)> sigma;
    std::function<double(const PathView& w, double x)> g;
    DriverClass driver = DriverClass::affine;
    // affine driver: f = f0 + fy y + fz z
    std::function<double(double t, const PathView& w, double x, double a)> f0, fy, fz;
    // general driver
    std::function<double(double t, const PathView& w, double x, double y, double z, double a)> f;

    double driver_value(double t, const PathView& w, double x, double y, double z, double a) const;
    void validate() const;
};

struct SHJBConfig {
    double step = 1e-2;
    int intervals = 1;  // open-loop controls are constant on this many equal pieces
    std::size_t samples = 2000;
    double epsilon = 0.2;  // cascade cones
    double L1 = 2.0;
    int picard_depth = 3;
    std::size_t inner_samples = 16;
    int inner_steps = 4;

    void validate(std::size_t n_controls) const;
};

struct SHJBEstimate {
    double value = 0.0;
    double stderr = 0.0;
    std::size_t n_samples = 0;
    std::vector<int> control;  // argmax, one index into controls per piece
    std::vector<double> picard;  // iterates Y_1..Y_k for the chosen control (general driver)
};

SHJBEstimate simulate_value_direct(const SHJBProblem& problem, double t, const SampledPath& omega,
                                   double x, const SHJBConfig& config, std::uint64_t seed);

// Same machinery with the path replaced by the frozen interpolation stopped at successive cone
// exits, for the state (pi, t, x_bar).
SHJBEstimate shjb_cascade_value(const SHJBProblem& problem, const Partition& pi, double t,
                                double x_bar, double x, const SHJBConfig& config,
                                std::uint64_t seed);

// Values on the stencil {t, t+ht} x {xbar-h, xbar, xbar+h} x {x-h, x, x+h}, time-major.
struct ValueSlice {
    double t = 0.0, xbar = 0.0, x = 0.0;
    double ht = 0.0, hxbar = 0.0, hx = 0.0;
    std::vector<double> values;

    double at(int it, int ib, int ix) const { return values[std::size_t(it * 9 + (ib + 1) * 3 + (ix + 1))]; }
    static ValueSlice sample(const std::function<double(double, double, double)>& v, double t,
                             double xbar, double x, double ht, double hxbar, double hx);
};

// Discrete residual of the lifted equation at (pi; slice.t, slice.xbar, slice.x).
double shjb_ppde_residual(const SHJBProblem& problem, const Partition& pi, const ValueSlice& slice);

}  // namespace pmlab
