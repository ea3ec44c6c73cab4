#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pocmw/discrete.hpp"
#include "pocmw/geometry.hpp"
#include "pocmw/losses.hpp"
#include "pocmw/random.hpp"

namespace pocmw {

struct GibbsParams {
  double beta = 0.0;    // temperature
  double lambda = 0.0;  // strong-convexity weight of the quadratic regularizer
};

// State after observing losses l_1..l_{t-1}: the density over the body is
// proportional to exp(-beta * (sum_tau l_tau(x) + lambda/2 |x|^2)).
// Immutable; appended() shares nothing mutable with the source.
class GibbsState {
 public:
  explicit GibbsState(GibbsParams params, std::vector<LossFunction> potential = {})
      : params_(params), potential_(std::move(potential)) {}

  const GibbsParams& params() const { return params_; }
  int round() const { return static_cast<int>(potential_.size()) + 1; }
  const std::vector<LossFunction>& potential_losses() const { return potential_; }

  // sum_tau l_tau(x), regularizer excluded
  double potential(std::span<const double> x) const;

  GibbsState appended(LossFunction l) const;

 private:
  GibbsParams params_;
  std::vector<LossFunction> potential_;
};

// -beta * (sum_tau l_tau(x) + lambda/2 |x|^2)
double unnormalized_log_density(const GibbsState& state, std::span<const double> x);

struct PartitionEstimate {
  enum class Method { grid_exact, sample_estimate };
  double log_z = 0.0;
  Method method = Method::grid_exact;
  double error_hint = 0.0;
};

// Midpoint-rule log partition function over the body; d <= 2. The error hint
// compares against a doubled resolution.
PartitionEstimate log_partition(const GibbsState& state, const ConvexBody& body,
                                int cells_per_axis);

// Monte Carlo log partition for any dimension: bounding-box rejection
// sampling of vol(box) * E[1{x in K} e^{log density}]. The error hint is
// three standard errors propagated through the log.
PartitionEstimate log_partition_sampled(const GibbsState& state,
                                        const ConvexBody& body, long num_samples,
                                        RandomStream& rng);

double normalized_log_density(const GibbsState& state, std::span<const double> x,
                              const PartitionEstimate& logz);

struct RatioEstimate {
  double value = 0.0;  // log( mu_bar_{t+1}(x) / mu_bar_t(x) )
  double lower = 0.0;  // -beta l_t(x) + E_{mu_{t+1}}[beta l_t]
  double upper = 0.0;  // -beta l_t(x) + E_{mu_t}[beta l_t]
};

// One-step density ratio with exact grid partition functions (d <= 2);
// lower/upper are the convexity brackets of the log-partition increment,
// also computed on the grid.
RatioEstimate log_density_ratio_step(const GibbsState& state_t,
                                     const LossFunction& l_t,
                                     std::span<const double> x,
                                     const ConvexBody& body, int cells_per_axis);

// Same quantity from sampler draws: value uses log E_{mu_t}[e^{-beta l_t}],
// the brackets use sample means under mu_t and mu_{t+1}. Needs >= 100 samples.
using SampleFn = std::function<Point(const GibbsState&, RandomStream&)>;
RatioEstimate log_density_ratio_step_sampled(const GibbsState& state_t,
                                             const LossFunction& l_t,
                                             std::span<const double> x,
                                             const SampleFn& draw,
                                             int num_samples, RandomStream& rng);

// exp( 2 beta G^2 / lambda + sqrt(8 beta G^2 log(2/delta) / lambda) )
double phi_bound(double beta, double lambda, double G, double delta);

// beta * strong_convexity
double lsi_constant(double beta, double strong_convexity);

// min(1, 2 exp(-c r^2 / (2 L^2)))
double herbst_tail(double c, double L, double r);

struct VariationalResult {
  std::vector<double> gibbs;  // distribution proportional to prior * e^{-beta f}
  double objective = 0.0;     // E_gibbs[beta f] + KL(gibbs || prior)
};

// Discrete Gibbs variational principle: the returned distribution minimizes
// E_mu[beta f] + KL(mu || prior) over distributions on the grid.
VariationalResult variational_check(std::span<const double> prior,
                                    std::span<const double> f, double beta);

double variational_objective(std::span<const double> mu,
                             std::span<const double> prior,
                             std::span<const double> f, double beta);

// Discrete log-partition p(t) = log sum_i exp(-(f_i + t g_i)).
double discrete_log_partition(std::span<const double> f, std::span<const double> g,
                              double t);

struct DerivativeCheck {
  double analytic = 0.0;     // E_{mu(t)}[-g]
  double finite_diff = 0.0;  // (p(t+h) - p(t-h)) / (2h)
};

DerivativeCheck log_partition_derivative_check(std::span<const double> f,
                                               std::span<const double> g,
                                               double t, double h);

// Incremental discretized Gibbs state over a fixed membership-filtered grid.
// The run loop appends one loss per round in O(cells); partition values,
// cell masses and exact draws come from the accumulated node potentials.
class GridDensity {
 public:
  GridDensity(const ConvexBody& body, GibbsParams params, int cells_per_axis);

  int cell_count() const { return static_cast<int>(potential_.size()); }
  int dimension() const { return dim_; }
  const GibbsParams& params() const { return params_; }

  std::span<const double> node(int cell) const {
    return {nodes_.data() + static_cast<std::size_t>(cell) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  double cell_half_width(int axis) const { return 0.5 * h_[static_cast<std::size_t>(axis)]; }

  void append(const LossFunction& l);

  double log_partition() const;           // includes the cell-volume factor
  double log_mass(int cell) const;        // normalized log cell mass
  std::vector<double> cell_masses() const;

  int sample_cell(RandomStream& rng) const;
  Point sample_point(RandomStream& rng) const;  // node + uniform jitter
  Point jitter(int cell, RandomStream& rng) const;
  int cell_of(std::span<const double> x) const;   // -1 if outside every cell
  int nearest_cell(std::span<const double> x) const;  // always a valid cell

 private:
  void refresh_cdf() const;
  std::size_t lattice_size() const;
  std::size_t lattice_index(std::span<const double> x) const;

  int dim_;
  GibbsParams params_;
  std::vector<double> h_;          // cell widths per axis
  double log_cell_volume_ = 0.0;
  std::vector<double> nodes_;      // flat, cells x dim
  std::vector<double> potential_;  // sum_tau l_tau(node) + lambda/2 |node|^2
  std::vector<double> bbox_lo_;
  int cells_per_axis_ = 0;
  std::vector<int> lattice_to_cell_;
  mutable std::vector<double> cdf_;
  mutable bool cdf_dirty_ = true;
  mutable std::vector<double> scratch_;
};

}  // namespace pocmw
