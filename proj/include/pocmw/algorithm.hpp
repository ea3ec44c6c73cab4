#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pocmw/geometry.hpp"
#include "pocmw/gibbs.hpp"
#include "pocmw/losses.hpp"
#include "pocmw/samplers.hpp"

namespace pocmw {

struct PocmwParams {
  double beta = 0.0;
  double lambda = 0.0;
  double p = 0.0;    // switching rate in [0, 1]
  double phi = 1.0;  // clamp scale, >= 1
  std::optional<long long> budget;  // nullopt = infinite
  double p_tilde = 0.0;             // p + 1 - phi^-2

  static PocmwParams make(double beta, double lambda, double p, double phi,
                          std::optional<long long> budget);
  void validate() const;
  bool budget_open(long long used) const {
    return !budget.has_value() || used < *budget;
  }
};

// min(1, max(phi^-2, r))
double clamp_pi(double r, double phi);

struct RoundRecord {
  int t = 0;
  Point x;
  double loss_value = 0.0;
  int s = 0;        // retention coin S_t
  int s_prime = 0;  // lazy coin S'_t
  int zeta = 0;     // 1 - s * s_prime
  long long b = 0;  // resamples through round t
};

struct RunTrace {
  std::vector<RoundRecord> records;
  PocmwParams params;
  std::uint64_t seed = 0;
  // Per-round bracket widths of the partition-ratio estimate; only filled
  // when the ratio is sample-estimated (d > 2).
  std::vector<double> ratio_error_hints;

  long long resample_count() const;      // sum of zeta bits
  long long value_switch_count() const;  // rounds with x_t != x_{t-1}, bit-exact
};

struct RunOptions {
  int ratio_cells = 512;    // grid resolution for exact ratios in d <= 2
  int ratio_samples = 128;  // draws per side for sampled ratios in d > 2
};

RunTrace run_pocmw(const ConvexBody& body, const LossSequence& seq,
                   const PocmwParams& params, const SamplerSpec& sampler,
                   RandomStream& rng, const RunOptions& options = {});

// Parameter schedule plus the closeness level it certifies.
struct Schedule {
  PocmwParams params;
  double delta_close = 0.0;  // consecutive states are (phi, delta_close)-close
  double phi_prime = 1.0;    // dp schedules only
  double delta_prime = 0.0;  // dp schedules only
};

// Switching-budget schedule: p = 0, B = infinite, delta = 2/T^2,
// lambda/beta/phi chosen so the expected number of resamples is at most S.
Schedule lazy_params(long long S, long long T, double G, double D, int d);

struct DpRuntime {
  double phi = 1.0;
  double p = 0.0;
  double p_tilde = 0.0;
  long long budget = 0;
  double phi_prime = 1.0;
  double delta_prime = 0.0;
};

// Runtime knobs of the private schedule for given (beta, lambda):
// phi' at closeness level delta/(60 T^2) with 3G-Lipschitz differences,
// phi = phi'^2, p = max(T^{-1/3}, (G^4 beta^2 / (lambda^2 log^2 phi))^{1/3}),
// B = ceil(3 p_tilde T).
DpRuntime dp_runtime_params(double beta, double lambda, double G, double delta,
                            long long T);

// Full private schedule for a target (epsilon, delta).
Schedule dpoco_params(double epsilon, double delta, long long T, double G,
                      double D, int d);

// Projected gradient baseline with isotropic normal noise on the gradient.
RunTrace run_noisy_ogd(const ConvexBody& body, const LossSequence& seq,
                       double eta, double sigma, RandomStream& rng,
                       std::optional<Point> x0 = std::nullopt);

}  // namespace pocmw
