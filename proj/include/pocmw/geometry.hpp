#pragma once

#include <span>
#include <vector>

#include "pocmw/random.hpp"

namespace pocmw {

using Point = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> x);
double norm(std::span<const double> x);
double distance(std::span<const double> a, std::span<const double> b);

// Halfspace a.x <= b.
struct Halfspace {
  std::vector<double> a;
  double b = 0.0;
};

// Convex compact decision set. Full-dimensional with the origin inside,
// checked at construction. Immutable afterwards, safe to share across
// threads.
class ConvexBody {
 public:
  enum class Kind { box, ball, polytope };

  static ConvexBody box(std::vector<double> lower, std::vector<double> upper);
  static ConvexBody ball(std::vector<double> center, double radius);
  // Polytope as an intersection of halfspaces, restricted to an explicit
  // bounding box (also enforced as constraints). Requires b_i > 0 so the
  // origin is interior.
  static ConvexBody polytope(std::vector<Halfspace> faces,
                             std::vector<double> bbox_lower,
                             std::vector<double> bbox_upper);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double diameter() const { return diameter_; }

  bool contains(std::span<const double> x, double tol = 1e-9) const;

  // Euclidean projection; exact for box/ball, Dykstra alternating halfspace
  // projections for polytopes (<= 10000 sweeps, feasibility 1e-7).
  Point project(std::span<const double> x) const;

  struct GridNode {
    Point x;
    double weight;  // cell volume
  };
  // Midpoint-rule quadrature nodes of the bounding box filtered by
  // membership. Supported for dimension <= 3.
  std::vector<GridNode> grid_points(int cells_per_axis) const;

  const std::vector<double>& bbox_lower() const { return bbox_lo_; }
  const std::vector<double>& bbox_upper() const { return bbox_hi_; }

 private:
  ConvexBody() = default;

  Kind kind_ = Kind::box;
  int dim_ = 0;
  double diameter_ = 0.0;
  std::vector<double> bbox_lo_, bbox_hi_;
  // box: bbox is the box itself; ball: center_/radius_; polytope: faces_.
  std::vector<double> center_;
  double radius_ = 0.0;
  std::vector<Halfspace> faces_;
};

// Uniform-ish member point: rejection sampling from the bounding box with a
// projection fallback. Deterministic given the stream.
Point random_point(const ConvexBody& body, RandomStream& rng);

}  // namespace pocmw
