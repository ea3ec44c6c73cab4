#pragma once

#include <span>
#include <variant>
#include <vector>

#include "pocmw/geometry.hpp"
#include "pocmw/gibbs.hpp"
#include "pocmw/random.hpp"

namespace pocmw {

// Exact inverse-CDF draw from the membership-filtered grid density (d <= 2).
struct GridSamplerSpec {
  int cells = 512;
};

// Euler-Maruyama discretization of the projected Langevin diffusion
//   X_{k+1} = Proj( X_k - eta * beta * grad L(X_k) + sqrt(2 eta) xi_k ).
struct LangevinSamplerSpec {
  double step_size = 1e-3;
  int num_steps = 20000;
  int burn_in = 10000;
};

struct SamplerSpec {
  std::variant<GridSamplerSpec, LangevinSamplerSpec> kind = GridSamplerSpec{};

  bool is_grid() const { return std::holds_alternative<GridSamplerSpec>(kind); }
  const GridSamplerSpec& grid() const { return std::get<GridSamplerSpec>(kind); }
  const LangevinSamplerSpec& langevin() const {
    return std::get<LangevinSamplerSpec>(kind);
  }
  void validate(int dimension) const;
};

// Stability heuristic: min(1e-3, 1 / (beta*lambda + beta*G_sum)) where G_sum
// sums the Lipschitz constants of the accumulated losses.
double default_langevin_step(const GibbsState& state);

// drift: -beta * (sum_tau subgrad l_tau(x) + lambda x)
std::vector<double> langevin_drift(const GibbsState& state, std::span<const double> x);

// One Euler step then projection; noise is a standard normal vector, scaled
// internally by sqrt(2 * step_size).
Point langevin_step(std::span<const double> x, const GibbsState& state,
                    const ConvexBody& body, double step_size,
                    std::span<const double> noise);

Point sample(const GibbsState& state, const ConvexBody& body,
             const SamplerSpec& spec, RandomStream& rng);

// Two Langevin chains advanced with identical noise; both states must share
// (beta, lambda) with lambda > 0. Returns the terminal points.
std::pair<Point, Point> coupled_sample(const GibbsState& state,
                                       const GibbsState& state_prime,
                                       const ConvexBody& body,
                                       const LangevinSamplerSpec& spec,
                                       RandomStream& rng);

}  // namespace pocmw
