#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pocmw/samplers.hpp"

using namespace pocmw;

namespace {

// Kolmogorov-Smirnov distance between draws and the grid CDF (mass spread
// uniformly within each cell).
double ks_distance(std::vector<double> draws, const GridDensity& grid,
                   const std::vector<double>& mass, double lo) {
  std::sort(draws.begin(), draws.end());
  const double h = 2.0 * grid.cell_half_width(0);
  std::vector<double> cdf(mass.size() + 1, 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) cdf[i + 1] = cdf[i] + mass[i];
  auto grid_cdf = [&](double x) {
    double rel = (x - lo) / h;
    long cell = std::clamp(static_cast<long>(std::floor(rel)), 0l,
                           static_cast<long>(mass.size()) - 1);
    double frac = std::clamp(rel - cell, 0.0, 1.0);
    return cdf[static_cast<std::size_t>(cell)] +
           frac * mass[static_cast<std::size_t>(cell)];
  };
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    double f = grid_cdf(draws[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("uniform grid draws have the right mean") {
  auto body = ConvexBody::box({0.0}, {1.0});
  GibbsState state({1.7, 0.0});
  SamplerSpec spec;
  spec.kind = GridSamplerSpec{256};
  RandomStream rng(9);
  GridDensity grid(body, state.params(), 256);
  double sum = 0.0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) sum += grid.sample_point(rng)[0];
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("grid sampling is deterministic in the stream") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState state({1.0, 2.0}, {LossFunction(LinearLoss{{0.5}})});
  SamplerSpec spec;
  spec.kind = GridSamplerSpec{128};
  RandomStream a(42), b(42);
  Point pa = sample(state, body, spec, a);
  Point pb = sample(state, body, spec, b);
  CHECK(pa == pb);
}

TEST_CASE("grid draws match the grid CDF in KS distance") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  RandomStream seeds(7);
  for (int rep = 0; rep < 5; ++rep) {
    double beta = seeds.uniform_in(0.5, 2.0);
    double lambda = seeds.uniform_in(1.0, 4.0);
    GridDensity grid(body, {beta, lambda}, 512);
    int extra = static_cast<int>(seeds.index(3));
    for (int k = 0; k < extra; ++k)
      grid.append(LossFunction(AbsDeviationLoss{{1.0}, seeds.uniform_in(-0.5, 0.5), 1.0}));
    std::vector<double> mass = grid.cell_masses();
    RandomStream rng = seeds.derive(static_cast<std::uint64_t>(rep));
    std::vector<double> draws;
    draws.reserve(100000);
    for (long i = 0; i < 100000; ++i) draws.push_back(grid.sample_point(rng)[0]);
    CHECK(ks_distance(std::move(draws), grid, mass, -1.0) < 0.02);
  }
}

TEST_CASE("grid sampler refuses high dimensions") {
  auto body = ConvexBody::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  SamplerSpec spec;
  spec.kind = GridSamplerSpec{32};
  CHECK_THROWS_AS(spec.validate(body.dimension()), std::domain_error);
}

TEST_CASE("langevin step: zero drift and zero noise keep interior points") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState flat({0.0, 0.0});
  Point x{0.25};
  Point y = langevin_step(x, flat, body, 1e-3, Point{0.0});
  CHECK(y[0] == doctest::Approx(0.25));
}

TEST_CASE("langevin step moves along the negative potential gradient") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState state({2.0, 0.0}, {LossFunction(LinearLoss{{1.0}})});
  Point x{0.0};
  Point y = langevin_step(x, state, body, 1e-3, Point{0.0});
  CHECK(y[0] < 0.0);  // drift is -beta * 1
  CHECK(y[0] == doctest::Approx(-2e-3));
}

TEST_CASE("noiseless langevin iteration converges to the constrained minimizer") {
  // potential lambda/2 x^2 + g x over [0.2, 1]: unconstrained minimizer at
  // -g/lambda < 0.2, so the chain settles on the boundary
  auto body = ConvexBody::box({-0.2}, {1.0});
  const double lambda = 4.0, g = 2.0;
  GibbsState state({1.0, lambda}, {LossFunction(LinearLoss{{g}})});
  Point x{1.0};
  Point zero{0.0};
  for (int k = 0; k < 20000; ++k) x = langevin_step(x, state, body, 1e-3, zero);
  CHECK(std::abs(x[0] - (-0.2)) < 1e-6);

  // interior case: minimizer -g/lambda = -0.125 inside [-0.2, 1]
  GibbsState interior({1.0, 8.0}, {LossFunction(LinearLoss{{1.0}})});
  Point z{1.0};
  for (int k = 0; k < 20000; ++k) z = langevin_step(z, interior, body, 1e-3, zero);
  CHECK(std::abs(z[0] - (-0.125)) < 1e-6);
}

TEST_CASE("langevin draws match the grid mean and spread") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState state({1.0, 6.0}, {LossFunction(LinearLoss{{1.5}})});
  GridDensity grid(body, state.params(), 512);
  grid.append(state.potential_losses().front());
  std::vector<double> mass = grid.cell_masses();
  double mean = 0.0, second = 0.0;
  for (int i = 0; i < grid.cell_count(); ++i) {
    double x = grid.node(i)[0];
    mean += mass[static_cast<std::size_t>(i)] * x;
    second += mass[static_cast<std::size_t>(i)] * x * x;
  }
  double sd = std::sqrt(second - mean * mean);

  SamplerSpec spec;
  spec.kind = LangevinSamplerSpec{2e-4, 6000, 3000};
  RandomStream rng(71);
  const int n = 400;
  double emp_mean = 0.0, emp_second = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream chain = rng.derive(static_cast<std::uint64_t>(i));
    double x = sample(state, body, spec, chain)[0];
    emp_mean += x;
    emp_second += x * x;
  }
  emp_mean /= n;
  emp_second /= n;
  double emp_sd = std::sqrt(std::max(0.0, emp_second - emp_mean * emp_mean));
  // best-effort sampler: loose sanity on the first two moments
  CHECK(std::abs(emp_mean - mean) < 0.1);
  CHECK(std::abs(emp_sd - sd) < 0.15);
}

TEST_CASE("identical coupled states stay identical") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState state({1.0, 2.0}, {LossFunction(LinearLoss{{0.7}})});
  LangevinSamplerSpec spec{1e-3, 2000, 0};
  RandomStream rng(3);
  auto [x, y] = coupled_sample(state, state, body, spec, rng);
  CHECK(x == y);
}

TEST_CASE("coupled chains respect the Wasserstein displacement bound") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  const double G = 1.0;
  RandomStream rng(17);
  double prev_median = 1e9;
  for (double lambda : {1.0, 4.0, 16.0}) {
    const double eta = 1e-3;
    GibbsState base({1.0, lambda});
    GibbsState shifted({1.0, lambda}, {LossFunction(LinearLoss{{G}})});
    std::vector<double> gaps;
    const int trials = 400;
    int ok = 0;
    for (int i = 0; i < trials; ++i) {
      RandomStream chain = rng.derive(static_cast<std::uint64_t>(lambda * 1000 + i));
      auto [x, y] = coupled_sample(base, shifted, body, {eta, 4000, 0}, chain);
      double gap = std::abs(x[0] - y[0]);
      gaps.push_back(gap);
      if (gap <= G / lambda + 3.0 * std::sqrt(eta)) ++ok;
    }
    CHECK(static_cast<double>(ok) / trials >= 0.99);
    std::nth_element(gaps.begin(), gaps.begin() + trials / 2, gaps.end());
    double median = gaps[trials / 2];
    CHECK(median <= prev_median + 1e-9);
    prev_median = median;
  }
}

TEST_CASE("coupled sampling rejects mismatched parameters") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  GibbsState a({1.0, 2.0});
  GibbsState b({1.0, 3.0});
  RandomStream rng(1);
  CHECK_THROWS_AS(coupled_sample(a, b, body, {1e-3, 10, 0}, rng),
                  std::invalid_argument);
  GibbsState c({1.0, 0.0});
  CHECK_THROWS_AS(coupled_sample(c, c, body, {1e-3, 10, 0}, rng),
                  std::invalid_argument);
}

TEST_CASE("default langevin step follows the stability heuristic") {
  GibbsState flat({1.0, 0.0});
  CHECK(default_langevin_step(flat) == doctest::Approx(1e-3));
  GibbsState stiff({2.0, 1000.0}, {LossFunction(LinearLoss{{3.0}})});
  CHECK(default_langevin_step(stiff) == doctest::Approx(1.0 / (2.0 * 1000.0 + 2.0 * 3.0)));
}

TEST_CASE("sampler spec validation") {
  SamplerSpec bad_cells;
  bad_cells.kind = GridSamplerSpec{8};
  CHECK_THROWS_AS(bad_cells.validate(1), std::invalid_argument);
  SamplerSpec bad_step;
  bad_step.kind = LangevinSamplerSpec{0.0, 100, 10};
  CHECK_THROWS_AS(bad_step.validate(1), std::invalid_argument);
  SamplerSpec bad_burn;
  bad_burn.kind = LangevinSamplerSpec{1e-3, 5, 10};
  CHECK_THROWS_AS(bad_burn.validate(1), std::invalid_argument);
}
