#include "pocmw/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pocmw {

void SamplerSpec::validate(int dimension) const {
  if (const auto* g = std::get_if<GridSamplerSpec>(&kind)) {
    if (g->cells < 16) throw std::invalid_argument("grid sampler: cells must be >= 16");
    if (dimension > 2)
      throw std::domain_error("grid sampler: unsupported in dimension > 2");
  } else {
    const auto& l = std::get<LangevinSamplerSpec>(kind);
    if (!(l.step_size > 0.0))
      throw std::invalid_argument("langevin sampler: step_size must be positive");
    if (l.burn_in < 0 || l.num_steps < l.burn_in)
      throw std::invalid_argument("langevin sampler: need num_steps >= burn_in >= 0");
  }
}

double default_langevin_step(const GibbsState& state) {
  double g_sum = 0.0;
  for (const auto& l : state.potential_losses()) g_sum += l.lipschitz();
  const auto& p = state.params();
  double denom = p.beta * p.lambda + p.beta * g_sum;
  if (denom <= 0.0) return 1e-3;
  return std::min(1e-3, 1.0 / denom);
}

std::vector<double> langevin_drift(const GibbsState& state, std::span<const double> x) {
  const auto& p = state.params();
  std::vector<double> drift(x.size(), 0.0);
  for (const auto& l : state.potential_losses()) {
    auto [v, sub] = l.eval_and_subgradient(x);
    (void)v;
    for (std::size_t i = 0; i < drift.size(); ++i) drift[i] += sub[i];
  }
  for (std::size_t i = 0; i < drift.size(); ++i)
    drift[i] = -p.beta * (drift[i] + p.lambda * x[i]);
  return drift;
}

Point langevin_step(std::span<const double> x, const GibbsState& state,
                    const ConvexBody& body, double step_size,
                    std::span<const double> noise) {
  if (noise.size() != x.size())
    throw std::invalid_argument("langevin_step: noise dimension mismatch");
  std::vector<double> drift = langevin_drift(state, x);
  const double noise_scale = std::sqrt(2.0 * step_size);
  Point y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] + step_size * drift[i] + noise_scale * noise[i];
  return body.project(y);
}

Point sample(const GibbsState& state, const ConvexBody& body,
             const SamplerSpec& spec, RandomStream& rng) {
  spec.validate(body.dimension());
  if (spec.is_grid()) {
    GridDensity grid(body, state.params(), spec.grid().cells);
    for (const auto& l : state.potential_losses()) grid.append(l);
    return grid.sample_point(rng);
  }
  const auto& ls = spec.langevin();
  Point x = body.project(Point(static_cast<std::size_t>(body.dimension()), 0.0));
  std::vector<double> noise(x.size());
  for (int k = 0; k < ls.num_steps; ++k) {
    for (auto& z : noise) z = rng.normal();
    x = langevin_step(x, state, body, ls.step_size, noise);
  }
  return x;
}

std::pair<Point, Point> coupled_sample(const GibbsState& state,
                                       const GibbsState& state_prime,
                                       const ConvexBody& body,
                                       const LangevinSamplerSpec& spec,
                                       RandomStream& rng) {
  const auto& a = state.params();
  const auto& b = state_prime.params();
  if (a.beta != b.beta || a.lambda != b.lambda)
    throw std::invalid_argument("coupled_sample: states must share (beta, lambda)");
  if (!(a.lambda > 0.0))
    throw std::invalid_argument("coupled_sample: lambda must be positive");
  SamplerSpec wrapped{spec};
  wrapped.validate(body.dimension());
  Point x = body.project(Point(static_cast<std::size_t>(body.dimension()), 0.0));
  Point x_prime = x;
  std::vector<double> noise(x.size());
  for (int k = 0; k < spec.num_steps; ++k) {
    for (auto& z : noise) z = rng.normal();
    x = langevin_step(x, state, body, spec.step_size, noise);
    x_prime = langevin_step(x_prime, state_prime, body, spec.step_size, noise);
  }
  return {x, x_prime};
}

}  // namespace pocmw
