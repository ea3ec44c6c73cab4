#include "pocmw/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pocmw {

double logsumexp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> v) {
  double lz = logsumexp(v);
  std::vector<double> p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = std::exp(v[i] - lz);
  return p;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw std::invalid_argument("kl_divergence: absolute continuity violated");
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

double expectation(std::span<const double> p, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * f[i];
  return s;
}

bool is_distribution(std::span<const double> p, double tol) {
  double s = 0.0;
  for (double x : p) {
    if (x < 0.0) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= tol;
}

}  // namespace pocmw
