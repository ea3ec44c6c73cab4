#include "pocmw/privacy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pocmw {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::vector<double> per_round_epsilons(long long T, int t0, double phi, double p,
                                       double G, double beta, double lambda,
                                       const std::vector<int>& zeta_schedule,
                                       const std::vector<int>& budget_open) {
  require(T >= 1 && t0 >= 1 && t0 <= T, "per_round_epsilons: bad horizon or t0");
  require(p > 0.0, "per_round_epsilons: p must be positive");
  require(phi >= 1.0, "per_round_epsilons: phi must be >= 1");
  require(lambda > 0.0, "per_round_epsilons: lambda must be positive");
  require(zeta_schedule.empty() || static_cast<long long>(zeta_schedule.size()) == T,
          "per_round_epsilons: zeta schedule length");
  require(budget_open.empty() || static_cast<long long>(budget_open.size()) == T,
          "per_round_epsilons: budget schedule length");
  const double log_phi = std::log(phi);
  const double post_term = (2.0 * G * G * beta / lambda) / p;
  std::vector<double> eps(static_cast<std::size_t>(T), 0.0);
  for (long long t = 1; t <= T; ++t) {
    std::size_t i = static_cast<std::size_t>(t - 1);
    if (t < t0) continue;
    bool open = budget_open.empty() || budget_open[i] != 0;
    if (!open) continue;
    if (t == t0) {
      eps[i] = 2.0 * log_phi / p;
    } else {
      int zeta_prev = zeta_schedule.empty() ? 1 : zeta_schedule[static_cast<std::size_t>(t - 2)];
      eps[i] = zeta_prev * log_phi + post_term;
    }
  }
  return eps;
}

std::pair<double, double> strong_composition(const std::vector<double>& eps,
                                             const std::vector<double>& deltas,
                                             double delta_double_prime) {
  require(delta_double_prime > 0.0 && delta_double_prime < 1.0,
          "strong_composition: delta'' must be in (0, 1)");
  double sum_sq = 0.0;
  for (double e : eps) {
    require(e >= 0.0, "strong_composition: negative epsilon");
    sum_sq += e * e;
  }
  double sum_delta = 0.0;
  for (double d : deltas) {
    require(d >= 0.0, "strong_composition: negative delta");
    sum_delta += d;
  }
  double eps_prime =
      1.5 * sum_sq + std::sqrt(6.0 * sum_sq * std::log(1.0 / delta_double_prime));
  return {eps_prime, delta_double_prime + sum_delta};
}

double epsilon_prime_closed_form(long long T, double phi, double G, double beta,
                                 double lambda) {
  require(T >= 1, "epsilon_prime_closed_form: T must be >= 1");
  require(phi >= 1.0, "epsilon_prime_closed_form: phi must be >= 1");
  require(lambda > 0.0, "epsilon_prime_closed_form: lambda must be positive");
  const double t_d = static_cast<double>(T);
  const double log_phi = std::log(phi);
  return 7.0 * std::pow(t_d, 2.0 / 3.0) * log_phi * log_phi +
         12.0 * log_phi * log_phi * log_phi * t_d +
         11.0 * std::cbrt(std::pow(G, 4) * beta * beta / (lambda * lambda)) *
             std::pow(log_phi, 4.0 / 3.0) * t_d;
}

double total_epsilon(double eps_prime, double delta) {
  require(eps_prime >= 0.0, "total_epsilon: eps' must be nonnegative");
  require(delta > 0.0 && delta < 2.0, "total_epsilon: delta must be in (0, 2)");
  return 1.5 * eps_prime +
         std::sqrt(6.0 * eps_prime) * std::sqrt(std::log(2.0 / delta));
}

PrivacyLedger build_ledger(long long T, int t0, const PocmwParams& params,
                           double G, double delta) {
  require(delta > 0.0 && delta <= 0.5, "build_ledger: delta must be in (0, 1/2]");
  PrivacyLedger ledger;
  const double t_d = static_cast<double>(T);
  const double delta_prime = delta / (60.0 * t_d * t_d);
  std::vector<double> eps = per_round_epsilons(T, t0, params.phi, params.p, G,
                                               params.beta, params.lambda);
  const double delta_t =
      4.0 * delta_prime + 9.0 * delta_prime * t_d + 3.0 * std::exp(-params.p_tilde * t_d);
  std::vector<double> deltas(static_cast<std::size_t>(T), 0.0);
  for (long long t = t0; t <= T; ++t)
    deltas[static_cast<std::size_t>(t - 1)] = delta_t;
  ledger.per_round.reserve(static_cast<std::size_t>(T));
  for (long long t = 0; t < T; ++t)
    ledger.per_round.emplace_back(eps[static_cast<std::size_t>(t)],
                                  deltas[static_cast<std::size_t>(t)]);
  ledger.delta_double_prime = delta / 2.0;
  ledger.composed = strong_composition(eps, deltas, ledger.delta_double_prime);
  double eps_prime = epsilon_prime_closed_form(T, params.phi, G, params.beta,
                                               params.lambda);
  ledger.budget_tail_addend =
      3.0 * t_d * std::exp(-(1.0 - 1.0 / (params.phi * params.phi)) * t_d);
  ledger.total = {total_epsilon(eps_prime, delta), delta + ledger.budget_tail_addend};
  return ledger;
}

namespace {

struct EventCounts {
  // counts[t][bin][zeta]
  std::vector<std::vector<std::array<long long, 2>>> counts;
  long long trials = 0;
};

EventCounts collect(const ConvexBody& body, const LossSequence& seq,
                    const PocmwParams& params, const SamplerSpec& sampler,
                    long long trials, int bins, RandomStream& rng,
                    std::uint64_t stream_salt) {
  const int T = seq.horizon();
  const double lo = body.bbox_lower()[0];
  const double hi = body.bbox_upper()[0];
  EventCounts ev;
  ev.trials = trials;
  ev.counts.assign(static_cast<std::size_t>(T),
                   std::vector<std::array<long long, 2>>(
                       static_cast<std::size_t>(bins), {0, 0}));
  for (long long i = 0; i < trials; ++i) {
    RandomStream trial_rng = rng.derive(stream_salt).derive(static_cast<std::uint64_t>(i));
    RunTrace trace = run_pocmw(body, seq, params, sampler, trial_rng);
    for (int t = 0; t < T; ++t) {
      const auto& rec = trace.records[static_cast<std::size_t>(t)];
      int bin = static_cast<int>((rec.x[0] - lo) / (hi - lo) * bins);
      bin = std::clamp(bin, 0, bins - 1);
      ev.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(bin)]
               [static_cast<std::size_t>(rec.zeta)]++;
    }
  }
  return ev;
}

}  // namespace

AuditReport empirical_audit(const ConvexBody& body, const LossSequence& seq,
                            const LossSequence& seq_neighbor,
                            const PocmwParams& params, const SamplerSpec& sampler,
                            long long trials, int bins, double delta_level,
                            RandomStream& rng) {
  require(body.dimension() == 1, "empirical_audit: supports d = 1 only");
  require(seq.horizon() <= 8, "empirical_audit: supports T <= 8 only");
  require(seq.horizon() == seq_neighbor.horizon(), "empirical_audit: horizon mismatch");
  require(sampler.is_grid(), "empirical_audit: requires the exact grid sampler");
  require(trials >= 10000, "empirical_audit: need at least 10^4 trials");
  require(bins >= 2, "empirical_audit: need at least 2 bins");
  require(delta_level >= 0.0 && delta_level < 1.0, "empirical_audit: bad delta level");
  if (static_cast<double>(trials) / (2.0 * bins) < 20.0)
    throw std::invalid_argument("empirical_audit: bins too fine for the trial count");

  EventCounts a = collect(body, seq, params, sampler, trials, bins, rng, 1);
  EventCounts b = collect(body, seq_neighbor, params, sampler, trials, bins, rng, 2);

  const double n = static_cast<double>(trials);
  AuditReport report;
  report.delta_level = delta_level;
  report.trials = trials;
  report.eps_hat = -std::numeric_limits<double>::infinity();
  const double floor_mass = 0.5 / n;  // never divide by an exactly-zero estimate

  auto consider = [&](double p_hat, double q_hat) {
    if (p_hat < 0.01) return;
    ++report.event_count;
    double numer = std::max(p_hat - delta_level, floor_mass);
    double denom = std::max(q_hat, floor_mass);
    double eps = std::log(numer / denom);
    if (eps > report.eps_hat) {
      report.eps_hat = eps;
      double sp = 3.0 * std::sqrt(p_hat * (1.0 - p_hat) / n);
      double sq = 3.0 * std::sqrt(denom * (1.0 - denom) / n);
      report.mc_slack = sp / numer + sq / denom;
    }
  };

  const int T = seq.horizon();
  for (int t = 0; t < T; ++t) {
    for (int bin = 0; bin < bins; ++bin) {
      for (int z = 0; z < 2; ++z) {
        double p_hat = a.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(bin)]
                               [static_cast<std::size_t>(z)] / n;
        double q_hat = b.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(bin)]
                               [static_cast<std::size_t>(z)] / n;
        consider(p_hat, q_hat);
        consider(q_hat, p_hat);
      }
    }
  }
  if (!std::isfinite(report.eps_hat)) report.eps_hat = 0.0;
  return report;
}

}  // namespace pocmw
