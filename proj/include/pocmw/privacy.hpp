#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pocmw/algorithm.hpp"
#include "pocmw/losses.hpp"
#include "pocmw/samplers.hpp"

namespace pocmw {

// Per-round privacy loss of the iterate/coin pair under a change of the loss
// at round t0 (1-based): zero before t0, 2 log(phi)/p at t0, and
// zeta_{t-1} log(phi) + (2 G^2 beta / lambda) / p afterwards, all gated on the
// switching budget still being open. Empty schedules mean the worst case
// (every zeta = 1, budget open at every round).
std::vector<double> per_round_epsilons(long long T, int t0, double phi, double p,
                                       double G, double beta, double lambda,
                                       const std::vector<int>& zeta_schedule = {},
                                       const std::vector<int>& budget_open = {});

// Adaptive strong composition:
//   eps' = 3/2 sum eps_t^2 + sqrt(6 sum eps_t^2 log(1/delta'')),
//   delta' = delta'' + sum delta_t.
std::pair<double, double> strong_composition(const std::vector<double>& eps,
                                             const std::vector<double>& deltas,
                                             double delta_double_prime);

// 7 T^{2/3} log^2 phi + 12 log^3 phi T + 11 (G^4 beta^2/lambda^2)^{1/3} log^{4/3} phi T
double epsilon_prime_closed_form(long long T, double phi, double G, double beta,
                                 double lambda);

// 3 eps'/2 + sqrt(6 eps') sqrt(log(2/delta))
double total_epsilon(double eps_prime, double delta);

struct PrivacyLedger {
  std::vector<std::pair<double, double>> per_round;  // (eps_t, delta_t)
  double delta_double_prime = 0.0;
  std::pair<double, double> composed;  // strong composition of per_round
  std::pair<double, double> total;     // closed-form route of the private schedule
  double budget_tail_addend = 0.0;     // 3 T exp(-(1 - phi^-2) T), reported separately
};

// Worst-case ledger for a change at round t0: schedule from per_round_epsilons,
// delta_t = 4 delta' + 9 delta' T + 3 e^{-p_tilde T} from t0 on, composition
// with delta'' = delta/2, and the closed-form totals alongside.
PrivacyLedger build_ledger(long long T, int t0, const PocmwParams& params,
                           double G, double delta);

struct AuditReport {
  double eps_hat = 0.0;
  double delta_level = 0.0;
  long long trials = 0;
  long long event_count = 0;
  double mc_slack = 0.0;
};

// Monte Carlo distinguishing audit on neighboring sequences: traces are
// discretized per round into (bin, zeta) cells and eps_hat maximizes the
// symmetrized log ((P(O) - delta_level) / P'(O)) over cells with mass >= 0.01.
// Requires d = 1, T <= 8, a grid sampler and >= 10^4 trials.
AuditReport empirical_audit(const ConvexBody& body, const LossSequence& seq,
                            const LossSequence& seq_neighbor,
                            const PocmwParams& params, const SamplerSpec& sampler,
                            long long trials, int bins, double delta_level,
                            RandomStream& rng);

}  // namespace pocmw
