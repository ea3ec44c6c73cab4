#include "pocmw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pocmw {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_dim(const ConvexBody& body, std::span<const double> x) {
  if (static_cast<int>(x.size()) != body.dimension())
    throw std::invalid_argument("point dimension does not match body");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
}

}  // namespace

ConvexBody ConvexBody::box(std::vector<double> lower, std::vector<double> upper) {
  require(!lower.empty() && lower.size() == upper.size(), "box: bad bounds");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]), "box: non-finite bound");
    require(lower[i] < upper[i], "box: degenerate axis");
    require(lower[i] <= 0.0 && 0.0 <= upper[i], "box: origin not contained");
  }
  ConvexBody b;
  b.kind_ = Kind::box;
  b.dim_ = static_cast<int>(lower.size());
  b.bbox_lo_ = std::move(lower);
  b.bbox_hi_ = std::move(upper);
  double s = 0.0;
  for (std::size_t i = 0; i < b.bbox_lo_.size(); ++i) {
    double w = b.bbox_hi_[i] - b.bbox_lo_[i];
    s += w * w;
  }
  b.diameter_ = std::sqrt(s);
  return b;
}

ConvexBody ConvexBody::ball(std::vector<double> center, double radius) {
  require(!center.empty(), "ball: empty center");
  require(std::isfinite(radius) && radius > 0.0, "ball: radius must be positive");
  require(norm(center) <= radius, "ball: origin not contained");
  ConvexBody b;
  b.kind_ = Kind::ball;
  b.dim_ = static_cast<int>(center.size());
  b.radius_ = radius;
  b.diameter_ = 2.0 * radius;
  b.bbox_lo_.resize(center.size());
  b.bbox_hi_.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    b.bbox_lo_[i] = center[i] - radius;
    b.bbox_hi_[i] = center[i] + radius;
  }
  b.center_ = std::move(center);
  return b;
}

ConvexBody ConvexBody::polytope(std::vector<Halfspace> faces,
                                std::vector<double> bbox_lower,
                                std::vector<double> bbox_upper) {
  require(!bbox_lower.empty() && bbox_lower.size() == bbox_upper.size(),
          "polytope: bad bounding box");
  const std::size_t d = bbox_lower.size();
  for (std::size_t i = 0; i < d; ++i) {
    require(bbox_lower[i] < bbox_upper[i], "polytope: degenerate bounding box axis");
    require(bbox_lower[i] <= 0.0 && 0.0 <= bbox_upper[i],
            "polytope: bounding box must contain the origin");
  }
  for (const auto& h : faces) {
    require(h.a.size() == d, "polytope: face dimension mismatch");
    require(norm(h.a) > 0.0, "polytope: zero normal");
    require(h.b > 0.0, "polytope: origin must be interior (b > 0)");
  }
  ConvexBody b;
  b.kind_ = Kind::polytope;
  b.dim_ = static_cast<int>(d);
  b.faces_ = std::move(faces);
  b.bbox_lo_ = std::move(bbox_lower);
  b.bbox_hi_ = std::move(bbox_upper);
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double w = b.bbox_hi_[i] - b.bbox_lo_[i];
    s += w * w;
  }
  b.diameter_ = std::sqrt(s);  // bounding-box upper bound
  return b;
}

bool ConvexBody::contains(std::span<const double> x, double tol) const {
  check_dim(*this, x);
  switch (kind_) {
    case Kind::box: {
      for (int i = 0; i < dim_; ++i)
        if (x[i] < bbox_lo_[i] - tol || x[i] > bbox_hi_[i] + tol) return false;
      return true;
    }
    case Kind::ball:
      return distance(x, center_) <= radius_ + tol;
    case Kind::polytope: {
      for (int i = 0; i < dim_; ++i)
        if (x[i] < bbox_lo_[i] - tol || x[i] > bbox_hi_[i] + tol) return false;
      for (const auto& h : faces_)
        if (dot(h.a, x) > h.b + tol * norm(h.a)) return false;
      return true;
    }
  }
  return false;
}

Point ConvexBody::project(std::span<const double> x) const {
  check_dim(*this, x);
  switch (kind_) {
    case Kind::box: {
      Point p(x.begin(), x.end());
      for (int i = 0; i < dim_; ++i)
        p[i] = std::clamp(p[i], bbox_lo_[i], bbox_hi_[i]);
      return p;
    }
    case Kind::ball: {
      Point p(x.begin(), x.end());
      double dist = distance(p, center_);
      if (dist <= radius_) return p;
      double scale = radius_ / dist;
      for (int i = 0; i < dim_; ++i)
        p[i] = center_[i] + scale * (p[i] - center_[i]);
      return p;
    }
    case Kind::polytope: {
      // Dykstra's alternating projections over halfspaces + box axes.
      const int max_sweeps = 10000;
      const double feas_tol = 1e-7;
      const std::size_t m = faces_.size();
      Point p(x.begin(), x.end());
      std::vector<Point> corr(m + 1, Point(static_cast<std::size_t>(dim_), 0.0));
      for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t k = 0; k <= m; ++k) {
          Point y(static_cast<std::size_t>(dim_));
          for (int i = 0; i < dim_; ++i) y[i] = p[i] + corr[k][i];
          Point z;
          if (k < m) {
            const auto& h = faces_[k];
            double viol = dot(h.a, y) - h.b;
            z = y;
            if (viol > 0.0) {
              double s = viol / squared_norm(h.a);
              for (int i = 0; i < dim_; ++i) z[i] -= s * h.a[i];
            }
          } else {
            z = y;
            for (int i = 0; i < dim_; ++i)
              z[i] = std::clamp(z[i], bbox_lo_[i], bbox_hi_[i]);
          }
          for (int i = 0; i < dim_; ++i) {
            corr[k][i] = y[i] - z[i];
            moved += std::abs(p[i] - z[i]);
          }
          p = std::move(z);
        }
        if (contains(p, feas_tol) && moved < 1e-12) break;
      }
      return p;
    }
  }
  return Point(x.begin(), x.end());
}

std::vector<ConvexBody::GridNode> ConvexBody::grid_points(int cells_per_axis) const {
  if (dim_ > 3) throw std::domain_error("grid_points: unsupported dimension > 3");
  require(cells_per_axis >= 2, "grid_points: need at least 2 cells per axis");
  const int n = cells_per_axis;
  std::vector<double> h(static_cast<std::size_t>(dim_));
  double cell_volume = 1.0;
  for (int i = 0; i < dim_; ++i) {
    h[i] = (bbox_hi_[i] - bbox_lo_[i]) / n;
    cell_volume *= h[i];
  }
  std::vector<GridNode> nodes;
  std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
  Point x(static_cast<std::size_t>(dim_));
  while (true) {
    for (int i = 0; i < dim_; ++i)
      x[i] = bbox_lo_[i] + (idx[i] + 0.5) * h[i];
    if (contains(x)) nodes.push_back({x, cell_volume});
    int axis = 0;
    while (axis < dim_ && ++idx[axis] == n) idx[axis++] = 0;
    if (axis == dim_) break;
  }
  return nodes;
}

Point random_point(const ConvexBody& body, RandomStream& rng) {
  const int d = body.dimension();
  Point x(static_cast<std::size_t>(d));
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int i = 0; i < d; ++i)
      x[i] = rng.uniform_in(body.bbox_lower()[i], body.bbox_upper()[i]);
    if (body.contains(x)) return x;
  }
  return body.project(x);
}

}  // namespace pocmw
