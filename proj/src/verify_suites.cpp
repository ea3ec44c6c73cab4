#include "pocmw/verify_suites.hpp"

#include <cmath>
#include <vector>

#include "pocmw/discrete.hpp"
#include "pocmw/gibbs.hpp"
#include "pocmw/metrics.hpp"
#include "pocmw/random.hpp"

namespace pocmw {

namespace {

std::vector<double> random_distribution(int n, RandomStream& rng) {
  std::vector<double> p(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& v : p) {
    v = 0.05 + rng.uniform();  // bounded away from zero
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

std::vector<double> random_values(int n, double scale, RandomStream& rng) {
  std::vector<double> f(static_cast<std::size_t>(n));
  for (auto& v : f) v = rng.uniform_in(-scale, scale);
  return f;
}

bool check_variational(bool quick, RandomStream& rng) {
  const int competitors = quick ? 100 : 1000;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> prior = random_distribution(16, rng);
    std::vector<double> f = random_values(16, 2.0, rng);
    double beta = rng.uniform_in(0.1, 3.0);
    VariationalResult res = variational_check(prior, f, beta);
    for (int c = 0; c < competitors; ++c) {
      std::vector<double> mu = random_distribution(16, rng);
      if (variational_objective(mu, prior, f, beta) < res.objective - 1e-12)
        return false;
    }
  }
  return true;
}

bool check_derivative(bool quick, RandomStream& rng) {
  const int reps = quick ? 20 : 100;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> f = random_values(256, 2.0, rng);
    std::vector<double> g = random_values(256, 2.0, rng);
    double t = rng.uniform_in(-0.5, 0.5);
    DerivativeCheck chk = log_partition_derivative_check(f, g, t, 1e-4);
    if (std::abs(chk.analytic - chk.finite_diff) >= 1e-5) return false;
  }
  return true;
}

bool check_convexity(bool quick, RandomStream& rng) {
  const int reps = quick ? 20 : 100;
  const double h = 1e-3;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> f = random_values(128, 2.0, rng);
    std::vector<double> g = random_values(128, 2.0, rng);
    double t = rng.uniform_in(-0.5, 0.5);
    double second = (discrete_log_partition(f, g, t + h) -
                     2.0 * discrete_log_partition(f, g, t) +
                     discrete_log_partition(f, g, t - h)) /
                    (h * h);
    if (second < -1e-6) return false;
  }
  return true;
}

bool check_tv_expectation(bool quick, RandomStream& rng) {
  const int reps = quick ? 100 : 1000;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> mu = random_distribution(32, rng);
    std::vector<double> nu = random_distribution(32, rng);
    std::vector<double> f = random_values(32, 5.0, rng);
    TvExpectationCheck chk = tv_expectation_check(mu, nu, f);
    if (chk.lhs > chk.rhs + 1e-12) return false;
  }
  return true;
}

bool check_ftl_btl(bool quick, RandomStream& rng) {
  const int reps = quick ? 100 : 1000;
  for (int rep = 0; rep < reps; ++rep) {
    int rounds = 2 + static_cast<int>(rng.index(12));
    std::vector<std::vector<double>> losses;
    losses.reserve(static_cast<std::size_t>(rounds));
    for (int t = 0; t < rounds; ++t) losses.push_back(random_values(64, 1.0, rng));
    if (!btl_check(losses)) return false;
  }
  return true;
}

}  // namespace

VerifyResult verify_suites(bool quick) {
  VerifyResult res;
  RandomStream rng(0xb10cada);
  res.variational = check_variational(quick, rng);
  res.log_partition_derivative = check_derivative(quick, rng);
  res.log_partition_convexity = check_convexity(quick, rng);
  res.tv_expectation = check_tv_expectation(quick, rng);
  res.ftl_btl = check_ftl_btl(quick, rng);
  return res;
}

bool run_verify_suites(std::FILE* out, bool quick) {
  VerifyResult res = verify_suites(quick);
  auto line = [out](const char* name, bool ok) {
    std::fprintf(out, "[%s] %s\n", ok ? "PASS" : "FAIL", name);
  };
  line("variational principle (16-point grids, random competitors)", res.variational);
  line("log-partition derivative vs central differences", res.log_partition_derivative);
  line("log-partition second derivative nonnegative", res.log_partition_convexity);
  line("tv-expectation inequality", res.tv_expectation);
  line("ftl-btl inequality", res.ftl_btl);
  return res.all();
}

}  // namespace pocmw
