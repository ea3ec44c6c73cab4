#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pocmw/gibbs.hpp"

using namespace pocmw;

namespace {

GibbsState state_on(GibbsParams params, std::vector<LossFunction> losses = {}) {
  return GibbsState(params, std::move(losses));
}

}  // namespace

TEST_CASE("unnormalized log density arithmetic") {
  // two unit-slope linear losses sum to 2 at x = 1
  auto state = state_on({0.5, 2.0}, {LossFunction(LinearLoss{{1.0}}),
                                     LossFunction(LinearLoss{{1.0}})});
  CHECK(unnormalized_log_density(state, Point{1.0}) == doctest::Approx(-1.5));

  auto zero_temp = state_on({0.0, 3.0}, {LossFunction(LinearLoss{{2.0}})});
  CHECK(unnormalized_log_density(zero_temp, Point{0.7}) == doctest::Approx(0.0));

  auto flat = state_on({1.0, 0.0});
  CHECK(unnormalized_log_density(flat, Point{0.3}) == doctest::Approx(0.0));
}

TEST_CASE("log partition on the unit interval") {
  auto body = ConvexBody::box({0.0}, {1.0});

  // zero potential: Z = 1
  auto uniform = state_on({1.0, 0.0});
  CHECK(log_partition(uniform, body, 512).log_z == doctest::Approx(0.0).epsilon(1e-9));

  // f(x) = x: Z = integral of e^{-x} = 1 - e^{-1}
  auto slope = state_on({1.0, 0.0}, {LossFunction(LinearLoss{{1.0}})});
  PartitionEstimate est = log_partition(slope, body, 512);
  double analytic = std::log(1.0 - std::exp(-1.0));
  CHECK(std::abs(est.log_z - analytic) < 1e-5);

  // resolution doubling moves the estimate by < 1e-4
  PartitionEstimate coarse = log_partition(slope, body, 512);
  PartitionEstimate fine = log_partition(slope, body, 1024);
  CHECK(std::abs(coarse.log_z - fine.log_z) < 1e-4);
  CHECK(coarse.error_hint == doctest::Approx(std::abs(coarse.log_z - fine.log_z)));
}

TEST_CASE("normalized density integrates to one") {
  auto body = ConvexBody::box({0.0}, {1.0});

  auto uniform = state_on({1.0, 0.0});
  PartitionEstimate zu = log_partition(uniform, body, 256);
  for (double x : {0.1, 0.5, 0.9})
    CHECK(std::exp(normalized_log_density(uniform, Point{x}, zu)) ==
          doctest::Approx(1.0).epsilon(1e-6));

  auto slope = state_on({1.0, 0.0}, {LossFunction(LinearLoss{{1.0}})});
  PartitionEstimate zs = log_partition(slope, body, 512);
  double integral = 0.0;
  for (const auto& n : body.grid_points(512))
    integral += n.weight * std::exp(normalized_log_density(slope, n.x, zs));
  CHECK(std::abs(integral - 1.0) < 1e-3);

  // normalization cancels in ratios of the same state
  double lr = normalized_log_density(slope, Point{0.2}, zs) -
              normalized_log_density(slope, Point{0.7}, zs);
  CHECK(lr == doctest::Approx(-1.0 * (0.2 - 0.7)));
}

TEST_CASE("sampled log partition agrees with the grid in low dimension") {
  auto body = ConvexBody::box({0.0}, {1.0});
  auto slope = state_on({1.0, 0.0}, {LossFunction(LinearLoss{{1.0}})});
  RandomStream rng(90);
  PartitionEstimate mc = log_partition_sampled(slope, body, 200000, rng);
  double analytic = std::log(1.0 - std::exp(-1.0));
  CHECK(mc.method == PartitionEstimate::Method::sample_estimate);
  CHECK(std::abs(mc.log_z - analytic) <= mc.error_hint);
  CHECK(std::abs(mc.log_z - analytic) < 5e-3);

  // three dimensions: zero potential over the unit ball, Z = 4 pi / 3
  auto ball = ConvexBody::ball({0.0, 0.0, 0.0}, 1.0);
  auto flat = state_on({1.0, 0.0});
  PartitionEstimate vol = log_partition_sampled(flat, ball, 200000, rng);
  CHECK(std::abs(std::exp(vol.log_z) - 4.0 * M_PI / 3.0) < 0.03);

  // the grid-exact route refuses d > 2
  CHECK_THROWS_AS(log_partition(flat, ball, 32), std::domain_error);
}

TEST_CASE("density ratio step: constants cancel") {
  auto body = ConvexBody::box({0.0}, {1.0});
  auto state = state_on({1.3, 2.0}, {LossFunction(LinearLoss{{0.4}})});
  // constant loss via max-linear with a single flat piece
  LossFunction constant(MaxLinearLoss{{{0.0}}, {0.8}});
  RatioEstimate est = log_density_ratio_step(state, constant, Point{0.25}, body, 256);
  CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.lower == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.upper == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("density ratio step agrees with the direct density quotient") {
  auto body = ConvexBody::box({0.0}, {1.0});
  auto state = state_on({0.9, 1.5}, {LossFunction(AbsDeviationLoss{{1.0}, 0.4, 1.0})});
  LossFunction l_t(LinearLoss{{0.7}});
  Point x{0.3};
  RatioEstimate est = log_density_ratio_step(state, l_t, x, body, 512);

  auto next = state.appended(l_t);
  double direct = normalized_log_density(next, x, log_partition(next, body, 512)) -
                  normalized_log_density(state, x, log_partition(state, body, 512));
  CHECK(est.value == doctest::Approx(direct).epsilon(1e-6));
  CHECK(est.lower <= est.value + 1e-12);
  CHECK(est.value <= est.upper + 1e-12);
}

TEST_CASE("sampled bracket contains the grid value on random instances") {
  auto body = ConvexBody::box({0.0}, {1.0});
  RandomStream rng(2024);
  SampleFn draw = [&](const GibbsState& s, RandomStream& r) {
    GridDensity grid(body, s.params(), 256);
    for (const auto& l : s.potential_losses()) grid.append(l);
    return grid.sample_point(r);
  };
  for (int i = 0; i < 100; ++i) {
    double beta = rng.uniform_in(0.8, 1.5);
    double lambda = rng.uniform_in(0.5, 2.0);
    std::vector<LossFunction> potential;
    int n_prev = static_cast<int>(rng.index(3));
    for (int k = 0; k < n_prev; ++k)
      potential.emplace_back(LinearLoss{{rng.uniform_in(-1.0, 1.0)}});
    auto state = state_on({beta, lambda}, potential);
    double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    LossFunction l_t(LinearLoss{{sign * rng.uniform_in(0.5, 1.0)}});
    Point x{rng.uniform_in(0.0, 1.0)};

    RatioEstimate grid_est = log_density_ratio_step(state, l_t, x, body, 512);
    RatioEstimate sampled =
        log_density_ratio_step_sampled(state, l_t, x, draw, 4000, rng);
    CHECK(sampled.lower <= grid_est.value);
    CHECK(grid_est.value <= sampled.upper);
  }
}

TEST_CASE("sampled ratio rejects tiny sample counts") {
  auto body = ConvexBody::box({0.0}, {1.0});
  auto state = state_on({1.0, 1.0});
  LossFunction l(LinearLoss{{1.0}});
  RandomStream rng(1);
  SampleFn draw = [&](const GibbsState&, RandomStream&) { return Point{0.5}; };
  CHECK_THROWS_AS(log_density_ratio_step_sampled(state, l, Point{0.5}, draw, 99, rng),
                  std::invalid_argument);
}

TEST_CASE("phi bound closed form") {
  CHECK(phi_bound(0.0, 1.0, 1.0, 0.5) == doctest::Approx(1.0));
  CHECK(phi_bound(1.0, 1.0, 0.0, 0.5) == doctest::Approx(1.0));
  double phi = phi_bound(1.0, 1.0, 1.0, 2.0 / std::exp(1.0));
  CHECK(phi == doctest::Approx(std::exp(2.0 + std::sqrt(8.0))).epsilon(1e-12));
  CHECK(phi == doctest::Approx(125.0).epsilon(1e-3));
  CHECK_THROWS_AS(phi_bound(1.0, 0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("lsi constant and herbst tail") {
  CHECK(lsi_constant(2.0, 3.0) == doctest::Approx(6.0));
  CHECK(herbst_tail(2.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(herbst_tail(2.0, 1.0, 2.0) == doctest::Approx(2.0 * std::exp(-4.0)).epsilon(1e-12));
  CHECK(herbst_tail(2.0, 1.0, 2.0) == doctest::Approx(0.03663).epsilon(1e-3));
}

TEST_CASE("variational principle on a two-point grid") {
  std::vector<double> prior{0.5, 0.5};
  std::vector<double> f{0.0, std::log(2.0)};
  VariationalResult res = variational_check(prior, f, 1.0);
  CHECK(res.gibbs[0] == doctest::Approx(2.0 / 3.0));
  CHECK(res.gibbs[1] == doctest::Approx(1.0 / 3.0));

  // analytic identity: the optimum value is -log E_prior[e^{-beta f}]
  double z = 0.5 * 1.0 + 0.5 * 0.5;
  CHECK(res.objective == doctest::Approx(-std::log(z)).epsilon(1e-12));
}

TEST_CASE("constant potential keeps the prior") {
  std::vector<double> prior{0.1, 0.2, 0.3, 0.4};
  std::vector<double> f{2.0, 2.0, 2.0, 2.0};
  VariationalResult res = variational_check(prior, f, 1.5);
  for (std::size_t i = 0; i < prior.size(); ++i)
    CHECK(res.gibbs[i] == doctest::Approx(prior[i]));
  CHECK(res.objective == doctest::Approx(1.5 * 2.0));
}

TEST_CASE("variational optimum beats random competitors") {
  RandomStream rng(77);
  std::vector<double> prior(16), f(16);
  double s = 0.0;
  for (auto& v : prior) {
    v = 0.05 + rng.uniform();
    s += v;
  }
  for (auto& v : prior) v /= s;
  for (auto& v : f) v = rng.uniform_in(-2.0, 2.0);
  VariationalResult res = variational_check(prior, f, 1.0);
  for (int c = 0; c < 1000; ++c) {
    std::vector<double> mu(16);
    double t = 0.0;
    for (auto& v : mu) {
      v = 0.01 + rng.uniform();
      t += v;
    }
    for (auto& v : mu) v /= t;
    CHECK(variational_objective(mu, prior, f, 1.0) >= res.objective - 1e-12);
  }
}

TEST_CASE("variational rejects an unnormalized prior") {
  std::vector<double> prior{0.5, 0.6};
  std::vector<double> f{0.0, 0.0};
  CHECK_THROWS_AS(variational_check(prior, f, 1.0), std::invalid_argument);
}

TEST_CASE("log partition derivative against central differences") {
  std::vector<double> zero(64, 0.0), f(64);
  RandomStream rng(31);
  for (auto& v : f) v = rng.uniform_in(-2.0, 2.0);

  DerivativeCheck none = log_partition_derivative_check(f, zero, 0.2, 1e-4);
  CHECK(none.analytic == doctest::Approx(0.0));
  CHECK(none.finite_diff == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> constant(64, 1.7);
  DerivativeCheck cst = log_partition_derivative_check(f, constant, 0.2, 1e-4);
  CHECK(cst.analytic == doctest::Approx(-1.7));
  CHECK(std::abs(cst.finite_diff + 1.7) < 1e-9);

  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> fr(256), gr(256);
    for (auto& v : fr) v = rng.uniform_in(-2.0, 2.0);
    for (auto& v : gr) v = rng.uniform_in(-2.0, 2.0);
    DerivativeCheck chk =
        log_partition_derivative_check(fr, gr, rng.uniform_in(-0.5, 0.5), 1e-4);
    CHECK(std::abs(chk.analytic - chk.finite_diff) < 1e-5);
  }
}

TEST_CASE("log partition is convex in the interpolation parameter") {
  RandomStream rng(41);
  const double h = 1e-3;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> f(128), g(128);
    for (auto& v : f) v = rng.uniform_in(-2.0, 2.0);
    for (auto& v : g) v = rng.uniform_in(-2.0, 2.0);
    double t = rng.uniform_in(-0.5, 0.5);
    double second = (discrete_log_partition(f, g, t + h) -
                     2.0 * discrete_log_partition(f, g, t) +
                     discrete_log_partition(f, g, t - h)) /
                    (h * h);
    CHECK(second >= -1e-6);
  }
}

TEST_CASE("herbst tail dominates the empirical norm tail") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  const double beta = 2.0, lambda = 4.0;
  GridDensity grid(body, {beta, lambda}, 512);
  std::vector<double> mass = grid.cell_masses();

  double mean_f = 0.0;
  for (int i = 0; i < grid.cell_count(); ++i)
    mean_f += mass[static_cast<std::size_t>(i)] * std::abs(grid.node(i)[0]);

  const double c = lsi_constant(beta, lambda);
  const long n = 100000;
  RandomStream rng(55);
  std::vector<double> devs;
  devs.reserve(n);
  for (long i = 0; i < n; ++i) {
    Point x = grid.sample_point(rng);
    devs.push_back(std::abs(std::abs(x[0]) - mean_f));
  }
  for (double scale : {0.5, 1.0, 2.0}) {
    double r = scale * std::sqrt(2.0 / c);
    long count = 0;
    for (double d : devs)
      if (d >= r) ++count;
    double p_hat = static_cast<double>(count) / n;
    double sigma = std::sqrt(std::max(p_hat, 1e-6) * (1.0 - std::max(p_hat, 1e-6)) / n);
    CHECK(p_hat <= herbst_tail(c, 1.0, r) + 3.0 * sigma + 1e-9);
  }
}

TEST_CASE("consecutive states are empirically (phi, delta)-close") {
  auto body = ConvexBody::box({-1.0}, {1.0});
  const double beta = 0.8, lambda = 2.0, G = 1.0, delta = 0.05;
  const double phi = phi_bound(beta, lambda, G, delta);
  RandomStream rng(123);

  GridDensity grid(body, {beta, lambda}, 512);
  grid.append(LossFunction(AbsDeviationLoss{{1.0}, 0.3, G}));
  std::vector<double> before = grid.cell_masses();
  int cells = grid.cell_count();
  std::vector<double> cdf(before.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < before.size(); ++j) {
    acc += before[j];
    cdf[j] = acc;
  }
  grid.append(LossFunction(LinearLoss{{G}}));
  std::vector<double> after = grid.cell_masses();

  const long n = 100000;
  long inside = 0;
  for (long i = 0; i < n; ++i) {
    double u = rng.uniform();
    int cell = static_cast<int>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (cell >= cells) cell = cells - 1;
    double ratio = before[static_cast<std::size_t>(cell)] /
                   after[static_cast<std::size_t>(cell)];
    if (ratio >= 1.0 / phi && ratio <= phi) ++inside;
  }
  double p_in = static_cast<double>(inside) / n;
  double sigma = std::sqrt(0.5 / n);
  CHECK(p_in >= 1.0 - delta - 3.0 * sigma);
}
