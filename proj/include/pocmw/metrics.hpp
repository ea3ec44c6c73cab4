#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pocmw/algorithm.hpp"
#include "pocmw/geometry.hpp"
#include "pocmw/losses.hpp"

namespace pocmw {

struct RegretReport {
  double cumulative_loss = 0.0;
  double best_fixed_value = 0.0;
  Point best_fixed_point;
  double regret = 0.0;
  long long resample_count = 0;      // sum of zeta bits
  long long value_switch_count = 0;  // rounds with x_t != x_{t-1}
};

struct BoundReport {
  double regret_bound = 0.0;
  double switch_mean_bound = 0.0;  // p_tilde * T
  double switch_tail_bound = 0.0;  // exp(-p_tilde * T)
  std::vector<double> drift_bounds;  // per round t = 1..T
  std::optional<double> lazy_regret_bound;  // filled when a switch budget S is given
};

// Hindsight optimum of the aggregate loss: grid argmin plus projected
// subgradient refinement in d <= 2, pure subgradient descent with averaging
// otherwise. The value is certified against 100 random member points.
std::pair<Point, double> best_fixed_point(const LossSequence& seq,
                                          const ConvexBody& body);

RegretReport regret_and_switches(const RunTrace& trace, const LossSequence& seq,
                                 const ConvexBody& body);

// GD sqrt(2T) + 16 GD log(T) sqrt(d) T / S + 13 GD
double lazy_regret_bound(long long S, long long T, double G, double D, int d);

// e^{-p_tilde T} (budgeted) + 3 delta (t-1)
double drift_bound(int t, double delta_close, double p_tilde, long long T,
                   bool budgeted);

BoundReport theoretical_bounds(const PocmwParams& params, long long T, double G,
                               double D, int d, double delta_close, bool budgeted,
                               std::optional<long long> lazy_S = std::nullopt);

struct TvExpectationCheck {
  double lhs = 0.0;  // |E_mu f - E_nu f|
  double rhs = 0.0;  // 2 TV(mu, nu) max |f|
};

TvExpectationCheck tv_expectation_check(std::span<const double> mu,
                                        std::span<const double> nu,
                                        std::span<const double> f);

// Be-the-leader check over a finite grid: losses[t][j] is the value of loss t
// at grid point j (losses[0] may be a regularizer). y_{t+1} minimizes the
// prefix sum through round t, ties to the lowest index. True iff
// sum_t losses[t][y_{t+1}] <= sum_t losses[t][j] for every j.
bool btl_check(const std::vector<std::vector<double>>& losses);

}  // namespace pocmw
