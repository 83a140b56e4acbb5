#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmlab/hitting.hpp"
#include "pmlab/nonlinear_expectation.hpp"

namespace pmlab {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

struct Generator {
    std::function<double(double s, const Vec& x, double y, const Vec& z, const Mat& gamma)> fn;
    double lipschitz = 0.0;    // in (y, z, gamma); enters the CFL bound
    double z_lipschitz = 0.0;  // Lax-Friedrichs dissipation coefficient
    std::string name;

    double operator()(double s, const Vec& x, double y, const Vec& z, const Mat& gamma) const {
        return fn(s, x, y, z, gamma);
    }
};

Generator zero_generator();
// scale * tr(gamma)
Generator heat_generator(double scale = 0.5);
Generator make_upper_bounding(double L, double C0);
Generator make_lower_bounding(double L, double C0);

// Sum of positive (negative) parts of the eigenvalues; |lambda| <= 1e-12 counts as 0.
double positive_eigen_sum(const Mat& gamma);
double negative_eigen_sum(const Mat& gamma);

enum class DomainShape { cone, cylinder };

// How nodes just outside the domain get their values: projection onto the boundary, or
// the boundary function evaluated at the node itself (needs a smooth extension of h).
enum class GhostRule { projection, extension };

struct ConeGrid {
    ConeSpec spec;
    int dim = 1;
    double dx = 0.01;
    double dt = 0.01;
    DomainShape shape = DomainShape::cone;
    GhostRule ghost = GhostRule::projection;

    // dt defaults to min(dx, 0.9 * CFL limit).
    static ConeGrid make(const ConeSpec& spec, int dim, double dx, const Generator& g, double dt = 0.0,
                         DomainShape shape = DomainShape::cone);
    double cfl_limit(double lipschitz) const;
    void validate(const Generator& g) const;
};

using BoundaryData = std::function<double(double s, const Vec& x)>;

// Values around one node: plus[i] = v(x + e_i dx), cross(i, j) the 4-point mixed stencil sum
// v(x+ei+ej) - v(x+ei-ej) - v(x-ei+ej) + v(x-ei-ej) for i < j.
struct Stencil {
    double center = 0.0;
    double plus[3] = {0, 0, 0};
    double minus[3] = {0, 0, 0};
    double cross[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
};

// g(s, x, y, Dv, D2v) plus the dissipation term, from central differences.
double discrete_operator(const Generator& g, double s, const Vec& x, const Stencil& st, int dim,
                         double dx);
double explicit_update(const Generator& g, double s, const Vec& x, const Stencil& st, int dim,
                       double dx, double dt);

class ValueField {
  public:
    double apex() const;
    double evaluate(double s, const Vec& x) const;
    double boundary_value(double s, const Vec& x) const;
    bool is_interior(double s, const Vec& x) const;

    std::size_t slice_count() const { return slices_; }
    double slice_time(std::size_t k) const;
    double top() const { return top_; }
    int half_width() const { return K_; }
    int dim() const { return grid_.dim; }
    const ConeGrid& grid() const { return grid_; }
    bool has_all_slices() const { return keep_; }
    // NaN where the node was never needed.
    double node(std::size_t slice, const std::vector<int>& offset) const;
    std::string to_csv() const;

  private:
    friend ValueField solve_cone(const Generator&, const ConeGrid&, const BoundaryData&, bool);
    double radius_at(double s) const;
    double slice_interp(std::size_t k, const Vec& x) const;
    const double* slice_ptr(std::size_t k) const;

    ConeGrid grid_;
    BoundaryData boundary_;
    int K_ = 0;
    std::size_t n_axis_ = 0;
    std::size_t nodes_ = 0;
    std::size_t slices_ = 0;  // number of time levels (n_t + 1)
    double dt_ = 0.0;
    double top_ = 0.0;
    bool keep_ = true;
    std::vector<double> values_;
};

ValueField solve_cone(const Generator& g, const ConeGrid& grid, const BoundaryData& boundary,
                      bool keep_slices = true);

struct BoundingMCOptions {
    int dim = 1;
    double t = -1.0;  // start time; negative means the cone's t0
    Point x;           // start point; empty means the origin
    double step = 1e-3;
    std::vector<double> discounts;  // empty means {-L, 0, L}
    bool feedback = true;
    bool zero_vol = true;
    bool lower = false;  // inf and -C0 instead of sup and +C0
};

MCEstimate mc_bounding_value(const BoundaryData& h, const ConeSpec& spec, double L, double C0,
                             std::size_t n, std::uint64_t seed, const BoundingMCOptions& opts = {});

}  // namespace pmlab
