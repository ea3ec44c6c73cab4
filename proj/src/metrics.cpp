#include "pocmw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pocmw {

namespace {

double aggregate_loss(const LossSequence& seq, std::span<const double> x) {
  double s = 0.0;
  for (const auto& l : seq.losses) s += l.eval(x);
  return s;
}

std::vector<double> aggregate_subgradient(const LossSequence& seq,
                                          std::span<const double> x) {
  std::vector<double> g(x.size(), 0.0);
  for (const auto& l : seq.losses) {
    auto [v, sub] = l.eval_and_subgradient(x);
    (void)v;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += sub[i];
  }
  return g;
}

// Projected subgradient descent on the aggregate loss, tracking the best
// visited point.
void refine_descent(const LossSequence& seq, const ConvexBody& body, Point& best,
                    double& best_value, int iterations) {
  double g_sum = 0.0;
  for (const auto& l : seq.losses) g_sum += l.lipschitz();
  if (g_sum <= 0.0) return;
  const double scale = body.diameter() / g_sum;
  Point x = best;
  Point avg(x.size(), 0.0);
  for (int k = 1; k <= iterations; ++k) {
    std::vector<double> g = aggregate_subgradient(seq, x);
    double step = scale / std::sqrt(static_cast<double>(k));
    Point y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - step * g[i];
    x = body.project(y);
    for (std::size_t i = 0; i < x.size(); ++i) avg[i] += x[i];
    double v = aggregate_loss(seq, x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }
  for (auto& v : avg) v /= iterations;
  avg = body.project(avg);
  double v = aggregate_loss(seq, avg);
  if (v < best_value) {
    best_value = v;
    best = avg;
  }
}

}  // namespace

std::pair<Point, double> best_fixed_point(const LossSequence& seq,
                                          const ConvexBody& body) {
  const int d = body.dimension();
  Point best(static_cast<std::size_t>(d), 0.0);
  best = body.project(best);
  double best_value = aggregate_loss(seq, best);

  if (d <= 2) {
    const int cells = (d == 1) ? 2048 : 128;
    auto nodes = body.grid_points(cells);
    for (const auto& n : nodes) {
      double v = aggregate_loss(seq, n.x);
      // lexicographically smallest wins ties; nodes enumerate in that order
      // along the first axis, so strict improvement keeps the first argmin
      if (v < best_value) {
        best_value = v;
        best = n.x;
      }
    }
    refine_descent(seq, body, best, best_value, 500);
  } else {
    refine_descent(seq, body, best, best_value, 10000);
  }

  // certification against random member points
  RandomStream rng(0x9e3779b9u ^ seq.seed);
  for (int i = 0; i < 100; ++i) {
    Point x = random_point(body, rng);
    double v = aggregate_loss(seq, x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }
  return {best, best_value};
}

RegretReport regret_and_switches(const RunTrace& trace, const LossSequence& seq,
                                 const ConvexBody& body) {
  if (static_cast<int>(trace.records.size()) != seq.horizon())
    throw std::invalid_argument("regret_and_switches: trace/sequence length mismatch");
  RegretReport report;
  for (const auto& r : trace.records) report.cumulative_loss += r.loss_value;
  auto [pt, value] = best_fixed_point(seq, body);
  report.best_fixed_point = std::move(pt);
  report.best_fixed_value = value;
  report.regret = report.cumulative_loss - report.best_fixed_value;
  report.resample_count = trace.resample_count();
  report.value_switch_count = trace.value_switch_count();
  return report;
}

double lazy_regret_bound(long long S, long long T, double G, double D, int d) {
  const double t_d = static_cast<double>(T);
  return G * D * std::sqrt(2.0 * t_d) +
         16.0 * G * D * std::log(t_d) * std::sqrt(static_cast<double>(d)) * t_d /
             static_cast<double>(S) +
         13.0 * G * D;
}

double drift_bound(int t, double delta_close, double p_tilde, long long T,
                   bool budgeted) {
  if (t < 1) throw std::invalid_argument("drift_bound: t must be >= 1");
  double bound = 3.0 * delta_close * (t - 1);
  if (budgeted) bound += std::exp(-p_tilde * static_cast<double>(T));
  return bound;
}

BoundReport theoretical_bounds(const PocmwParams& params, long long T, double G,
                               double D, int d, double delta_close, bool budgeted,
                               std::optional<long long> lazy_S) {
  const double t_d = static_cast<double>(T);
  BoundReport report;
  double base = params.lambda * D * D / 2.0 + G * G * t_d / params.lambda +
                d * std::log(t_d) / params.beta;
  if (budgeted) {
    report.regret_bound =
        base +
        2.0 * G * D * t_d *
            (std::exp(-params.p_tilde * t_d) + 3.0 * delta_close * t_d) +
        G * D;
  } else {
    report.regret_bound = base + G * D + 6.0 * G * D * delta_close * t_d * t_d;
  }
  report.switch_mean_bound = params.p_tilde * t_d;
  report.switch_tail_bound = std::exp(-params.p_tilde * t_d);
  report.drift_bounds.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t)
    report.drift_bounds.push_back(
        drift_bound(t, delta_close, params.p_tilde, T, budgeted));
  if (lazy_S.has_value())
    report.lazy_regret_bound = lazy_regret_bound(*lazy_S, T, G, D, d);
  return report;
}

TvExpectationCheck tv_expectation_check(std::span<const double> mu,
                                        std::span<const double> nu,
                                        std::span<const double> f) {
  if (mu.size() != nu.size() || mu.size() != f.size())
    throw std::invalid_argument("tv_expectation_check: size mismatch");
  TvExpectationCheck out;
  out.lhs = std::abs(expectation(mu, f) - expectation(nu, f));
  double max_abs = 0.0;
  for (double v : f) max_abs = std::max(max_abs, std::abs(v));
  out.rhs = 2.0 * tv_distance(mu, nu) * max_abs;
  return out;
}

bool btl_check(const std::vector<std::vector<double>>& losses) {
  if (losses.empty()) return true;
  const std::size_t n = losses.front().size();
  for (const auto& l : losses)
    if (l.size() != n) throw std::invalid_argument("btl_check: ragged loss grid");

  std::vector<double> prefix(n, 0.0);
  double leader_total = 0.0;  // sum_t losses[t][y_{t+1}]
  for (const auto& l : losses) {
    for (std::size_t j = 0; j < n; ++j) prefix[j] += l[j];
    std::size_t y_next = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (prefix[j] < prefix[y_next]) y_next = j;
    leader_total += l[y_next];
  }
  double best = *std::min_element(prefix.begin(), prefix.end());
  return leader_total <= best + 1e-9;
}

}  // namespace pocmw
