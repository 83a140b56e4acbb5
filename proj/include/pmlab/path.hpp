#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pmlab {

using Point = std::vector<double>;

double norm(std::span<const double> x);

// Piecewise-linear path with explicit knots. Constant extension after the last knot.
class SampledPath {
  public:
    SampledPath() = default;
    // values holds knot_count * dim entries, row-major by knot.
    SampledPath(int dim, double t_start, double t_end, std::vector<double> times,
                std::vector<double> values);

    static SampledPath zero(int dim, double t_start, double t_end);
    // Uniform knots t_start + k*step (last knot clamped to t_end).
    static SampledPath from_uniform(int dim, double t_start, double t_end,
                                    std::vector<double> values);

    int dim() const { return dim_; }
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    std::size_t knot_count() const { return times_.size(); }
    double knot_time(std::size_t i) const { return times_[i]; }
    std::span<const double> knot_value(std::size_t i) const {
        return {values_.data() + i * std::size_t(dim_), std::size_t(dim_)};
    }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    double last_knot_time() const { return times_.back(); }

    // Index k with times[k] <= t < times[k+1]; the last knot for t at or past it.
    std::size_t segment_index(double t) const;

    void value_into(double t, double* out) const;
    Point value(double t) const;
    double value1(double t) const;  // first coordinate

    // Knots restricted to [t_start, t] with a knot added at t. t_end becomes t.
    SampledPath truncated(double t) const;

    std::string to_csv() const;
    static SampledPath from_csv(const std::string& text, double t_end);
    nlohmann::json to_json() const;
    static SampledPath from_json(const nlohmann::json& j);

    bool operator==(const SampledPath& o) const;

    // Simulation buffers only: overwrite knot values in place, keeping the knot times.
    double* mutable_values() { return values_.data(); }

  private:
    void validate() const;

    int dim_ = 1;
    double t_start_ = 0.0;
    double t_end_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

struct PathPoint {
    double t;
    SampledPath omega;
};

// Partition point (H_i, increment x_i).
struct PartitionPoint {
    double time;
    Point increment;
};

struct Partition {
    std::vector<PartitionPoint> points;
    double epsilon = 0.0;
    double L1 = 1.0;
    bool terminal = false;  // true once the sequence reached H_N = T
    int dim = 1;

    std::size_t size() const { return points.size(); }
    double last_time(double t0) const { return points.empty() ? t0 : points.back().time; }
    Point sum() const;
    Partition prefix(std::size_t n) const;
    Partition extended(double time, const Point& increment) const;
};

double sup_norm(const SampledPath& path, double t);
double d_infinity(const PathPoint& a, const PathPoint& b);
SampledPath concatenate(const SampledPath& prefix, double t, const SampledPath& suffix);
SampledPath interpolate_partition(const Partition& pi, double t0, double T);

}  // namespace pmlab
