#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pmlab/parallel.hpp"
#include "pmlab/path.hpp"

namespace pmlab {

struct MeasureFamilySpec {
    double L = 1.0;
    int dim = 1;
    double t_start = 0.0;
    double t_end = 1.0;
    double step = 1e-3;
    Point state_offset;  // feedback laws act on state_offset + X
    bool needs_wiener = false;

    void validate() const;
    std::size_t steps() const;
    double dt() const { return (t_end - t_start) / double(steps()); }
};

struct ControlAction {
    Point drift;
    double vol = 0.0;  // diffusion vol * I
};

// Bang-bang feedback on the sign of the state: outward drift = +L sign, inward = -L sign.
enum class Feedback { none, outward, inward };

struct ControlLaw {
    std::vector<ControlAction> pieces;  // equal pieces of the horizon
    Feedback feedback = Feedback::none;
    std::string id;

    void validate(double L, int dim) const;
};

struct MCEstimate {
    double value = 0.0;
    double stderr = 0.0;
    std::size_t n_samples = 0;
    std::string argmax;
};

struct ControlFamily {
    std::vector<ControlAction> catalog;
    int intervals = 1;
    std::vector<ControlLaw> extra;  // feedback or hand-built laws

    // drift in {-L,0,L}^d, vol in {0, sqrt(L), sqrt(2L)}
    static std::vector<ControlAction> standard_catalog(double L, int dim, bool with_zero_vol = true);
    static std::vector<ControlLaw> feedback_laws(double L, int dim, bool with_zero_vol = true);
    static ControlFamily constant(double L, int dim, bool with_feedback = true);
    static ControlFamily piecewise(double L, int dim, int intervals = 8, bool with_feedback = true);
    static ControlFamily single(const ControlLaw& law);
    static ControlFamily wiener(int dim);

    double size() const;  // may be astronomically large
    ControlLaw law(const std::vector<int>& choice) const;
    std::vector<ControlLaw> enumerate() const;
};

constexpr double kExhaustiveLimit = 1e4;

using PathFunctional = std::function<double(const SampledPath&)>;
// Writes several outputs per path (e.g. one per discount choice).
using MultiFunctional = std::function<void(const SampledPath&, double*)>;

void draw_normals(std::uint64_t seed, std::uint64_t index, std::size_t count, double* out);

// Euler paths with the given normals (steps * dim entries). values has (steps+1)*dim entries.
void simulate_into(const ControlLaw& law, const MeasureFamilySpec& spec, const double* normals,
                   double* values);

std::vector<SampledPath> simulate_controlled(const ControlLaw& law, const MeasureFamilySpec& spec,
                                             std::uint64_t seed, std::size_t n);

// Moments for every (law, output) pair with common random numbers; index law * outputs + k.
std::vector<Moments> evaluate_laws(const std::vector<ControlLaw>& laws,
                                   const MeasureFamilySpec& spec, std::size_t n,
                                   std::uint64_t seed, std::size_t outputs,
                                   const MultiFunctional& fn);

enum class Sense { maximize, minimize };

struct FamilySearch {
    std::vector<ControlLaw> laws;
    std::vector<Moments> moments;  // laws.size() * outputs
    std::size_t outputs = 1;

    MCEstimate best(Sense sense) const;
};

struct SearchOptions {
    int restarts = 2;
    int max_sweeps = 2;
};

FamilySearch search_family(const MultiFunctional& fn, std::size_t outputs,
                           const MeasureFamilySpec& spec, const ControlFamily& family,
                           std::size_t n, std::uint64_t seed, Sense sense,
                           const SearchOptions& opts = {});

MCEstimate upper_expectation(const PathFunctional& xi, const MeasureFamilySpec& spec,
                             const ControlFamily& family, std::size_t n, std::uint64_t seed);
MCEstimate lower_expectation(const PathFunctional& xi, const MeasureFamilySpec& spec,
                             const ControlFamily& family, std::size_t n, std::uint64_t seed);

struct Grid1d {
    double lo = -5.0;
    double hi = 5.0;
    std::size_t nodes = 1001;
    double step() const { return (hi - lo) / double(nodes - 1); }
};

// v(0,0) for v_t + L|v_x| + L (v_xx)^+ = 0, v(T) = terminal.
double hjb_oracle_1d(const std::function<double(double)>& terminal, double L, double T,
                     const Grid1d& space, std::size_t time_steps);

}  // namespace pmlab
