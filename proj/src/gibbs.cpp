#include "pocmw/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pocmw {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

double GibbsState::potential(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& l : potential_) s += l.eval(x);
  return s;
}

GibbsState GibbsState::appended(LossFunction l) const {
  std::vector<LossFunction> next = potential_;
  next.push_back(std::move(l));
  return GibbsState(params_, std::move(next));
}

double unnormalized_log_density(const GibbsState& state, std::span<const double> x) {
  const auto& p = state.params();
  return -p.beta * (state.potential(x) + 0.5 * p.lambda * squared_norm(x));
}

namespace {

double grid_log_partition(const GibbsState& state, const ConvexBody& body, int cells) {
  GridDensity grid(body, state.params(), cells);
  for (const auto& l : state.potential_losses()) grid.append(l);
  return grid.log_partition();
}

}  // namespace

PartitionEstimate log_partition(const GibbsState& state, const ConvexBody& body,
                                int cells_per_axis) {
  if (body.dimension() > 2)
    throw std::domain_error("log_partition: grid-exact supports d <= 2");
  require(cells_per_axis >= 2, "log_partition: need at least 2 cells per axis");
  PartitionEstimate est;
  est.method = PartitionEstimate::Method::grid_exact;
  est.log_z = grid_log_partition(state, body, cells_per_axis);
  double refined = grid_log_partition(state, body, 2 * cells_per_axis);
  est.error_hint = std::abs(est.log_z - refined);
  return est;
}

PartitionEstimate log_partition_sampled(const GibbsState& state,
                                        const ConvexBody& body, long num_samples,
                                        RandomStream& rng) {
  require(num_samples >= 100, "log_partition_sampled: need >= 100 samples");
  const int d = body.dimension();
  double log_box_volume = 0.0;
  for (int i = 0; i < d; ++i)
    log_box_volume += std::log(body.bbox_upper()[static_cast<std::size_t>(i)] -
                               body.bbox_lower()[static_cast<std::size_t>(i)]);
  Point x(static_cast<std::size_t>(d));
  std::vector<double> values;  // e^{uld(x)} for members, 0 outside
  values.reserve(static_cast<std::size_t>(num_samples));
  double max_uld = -std::numeric_limits<double>::infinity();
  std::vector<double> ulds(static_cast<std::size_t>(num_samples),
                           -std::numeric_limits<double>::infinity());
  for (long i = 0; i < num_samples; ++i) {
    for (int k = 0; k < d; ++k)
      x[static_cast<std::size_t>(k)] = rng.uniform_in(
          body.bbox_lower()[static_cast<std::size_t>(k)],
          body.bbox_upper()[static_cast<std::size_t>(k)]);
    if (!body.contains(x)) continue;
    double u = unnormalized_log_density(state, x);
    ulds[static_cast<std::size_t>(i)] = u;
    max_uld = std::max(max_uld, u);
  }
  if (!std::isfinite(max_uld))
    throw std::invalid_argument("log_partition_sampled: no sample hit the body");
  double sum = 0.0, sum_sq = 0.0;
  for (double u : ulds) {
    double v = std::isfinite(u) ? std::exp(u - max_uld) : 0.0;
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(num_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  PartitionEstimate est;
  est.method = PartitionEstimate::Method::sample_estimate;
  est.log_z = log_box_volume + max_uld + std::log(mean);
  est.error_hint = 3.0 * std::sqrt(var / n) / mean;
  return est;
}

double normalized_log_density(const GibbsState& state, std::span<const double> x,
                              const PartitionEstimate& logz) {
  return unnormalized_log_density(state, x) - logz.log_z;
}

RatioEstimate log_density_ratio_step(const GibbsState& state_t,
                                     const LossFunction& l_t,
                                     std::span<const double> x,
                                     const ConvexBody& body, int cells_per_axis) {
  if (body.dimension() > 2)
    throw std::domain_error("log_density_ratio_step: grid mode supports d <= 2");
  const double beta = state_t.params().beta;
  GridDensity grid(body, state_t.params(), cells_per_axis);
  for (const auto& l : state_t.potential_losses()) grid.append(l);
  const double log_z_t = grid.log_partition();
  std::vector<double> mass_t = grid.cell_masses();
  grid.append(l_t);
  const double log_z_next = grid.log_partition();
  std::vector<double> mass_next = grid.cell_masses();

  double e_t = 0.0, e_next = 0.0;
  for (int i = 0; i < grid.cell_count(); ++i) {
    double v = l_t.eval(grid.node(i));
    e_t += mass_t[static_cast<std::size_t>(i)] * v;
    e_next += mass_next[static_cast<std::size_t>(i)] * v;
  }
  RatioEstimate est;
  est.value = -beta * l_t.eval(x) + log_z_t - log_z_next;
  est.lower = -beta * l_t.eval(x) + beta * e_next;
  est.upper = -beta * l_t.eval(x) + beta * e_t;
  return est;
}

RatioEstimate log_density_ratio_step_sampled(const GibbsState& state_t,
                                             const LossFunction& l_t,
                                             std::span<const double> x,
                                             const SampleFn& draw,
                                             int num_samples, RandomStream& rng) {
  require(num_samples >= 100, "log_density_ratio_step_sampled: need >= 100 samples");
  const double beta = state_t.params().beta;
  GibbsState state_next = state_t.appended(l_t);

  std::vector<double> neg_beta_l(static_cast<std::size_t>(num_samples));
  double mean_t = 0.0;
  for (int j = 0; j < num_samples; ++j) {
    Point p = draw(state_t, rng);
    double v = l_t.eval(p);
    mean_t += v;
    neg_beta_l[static_cast<std::size_t>(j)] = -beta * v;
  }
  mean_t /= num_samples;
  double mean_next = 0.0;
  for (int j = 0; j < num_samples; ++j) {
    Point p = draw(state_next, rng);
    mean_next += l_t.eval(p);
  }
  mean_next /= num_samples;

  // log(Z_t / Z_{t+1}) = -log E_{mu_t}[exp(-beta l_t)]
  double log_ratio_z = -(logsumexp(neg_beta_l) - std::log(static_cast<double>(num_samples)));
  RatioEstimate est;
  est.value = -beta * l_t.eval(x) + log_ratio_z;
  est.lower = -beta * l_t.eval(x) + beta * mean_next;
  est.upper = -beta * l_t.eval(x) + beta * mean_t;
  return est;
}

double phi_bound(double beta, double lambda, double G, double delta) {
  require(lambda > 0.0, "phi_bound: lambda must be positive");
  require(beta >= 0.0 && G >= 0.0, "phi_bound: beta, G must be nonnegative");
  require(delta > 0.0 && delta <= 1.0, "phi_bound: delta must be in (0, 1]");
  double a = 2.0 * beta * G * G / lambda;
  double b = std::sqrt(8.0 * beta * G * G * std::log(2.0 / delta) / lambda);
  return std::exp(a + b);
}

double lsi_constant(double beta, double strong_convexity) {
  require(beta >= 0.0 && strong_convexity >= 0.0, "lsi_constant: nonnegative arguments");
  return beta * strong_convexity;
}

double herbst_tail(double c, double L, double r) {
  require(c > 0.0 && L > 0.0, "herbst_tail: c and L must be positive");
  require(r >= 0.0, "herbst_tail: r must be nonnegative");
  return std::min(1.0, 2.0 * std::exp(-c * r * r / (2.0 * L * L)));
}

double variational_objective(std::span<const double> mu,
                             std::span<const double> prior,
                             std::span<const double> f, double beta) {
  return beta * expectation(mu, f) + kl_divergence(mu, prior);
}

VariationalResult variational_check(std::span<const double> prior,
                                    std::span<const double> f, double beta) {
  require(prior.size() == f.size() && !prior.empty(), "variational_check: size mismatch");
  require(is_distribution(prior), "variational_check: prior must be normalized");
  for (double p : prior) require(p > 0.0, "variational_check: prior must be strictly positive");
  std::vector<double> logw(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i)
    logw[i] = std::log(prior[i]) - beta * f[i];
  VariationalResult out;
  out.gibbs = normalize_log_weights(logw);
  out.objective = variational_objective(out.gibbs, prior, f, beta);
  return out;
}

double discrete_log_partition(std::span<const double> f, std::span<const double> g,
                              double t) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = -(f[i] + t * g[i]);
  return logsumexp(v);
}

DerivativeCheck log_partition_derivative_check(std::span<const double> f,
                                               std::span<const double> g,
                                               double t, double h) {
  require(f.size() == g.size() && !f.empty(), "derivative check: size mismatch");
  require(h > 0.0 && h <= 0.1, "derivative check: h must be in (0, 0.1]");
  std::vector<double> logw(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) logw[i] = -(f[i] + t * g[i]);
  std::vector<double> mu = normalize_log_weights(logw);
  DerivativeCheck out;
  out.analytic = -expectation(mu, g);
  out.finite_diff =
      (discrete_log_partition(f, g, t + h) - discrete_log_partition(f, g, t - h)) /
      (2.0 * h);
  return out;
}

GridDensity::GridDensity(const ConvexBody& body, GibbsParams params, int cells_per_axis)
    : dim_(body.dimension()), params_(params) {
  auto nodes = body.grid_points(cells_per_axis);
  require(!nodes.empty(), "GridDensity: empty grid");
  h_.resize(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i)
    h_[static_cast<std::size_t>(i)] =
        (body.bbox_upper()[static_cast<std::size_t>(i)] -
         body.bbox_lower()[static_cast<std::size_t>(i)]) /
        cells_per_axis;
  log_cell_volume_ = std::log(nodes.front().weight);
  nodes_.reserve(nodes.size() * static_cast<std::size_t>(dim_));
  potential_.reserve(nodes.size());
  for (const auto& n : nodes) {
    nodes_.insert(nodes_.end(), n.x.begin(), n.x.end());
    potential_.push_back(0.5 * params_.lambda * squared_norm(n.x));
  }
  bbox_lo_ = body.bbox_lower();
  cells_per_axis_ = cells_per_axis;
  lattice_to_cell_.assign(lattice_size(), -1);
  for (std::size_t c = 0; c < potential_.size(); ++c)
    lattice_to_cell_[lattice_index(node(static_cast<int>(c)))] = static_cast<int>(c);
}

void GridDensity::append(const LossFunction& l) {
  const int n = cell_count();
  for (int i = 0; i < n; ++i) potential_[static_cast<std::size_t>(i)] += l.eval(node(i));
  cdf_dirty_ = true;
}

double GridDensity::log_partition() const {
  std::vector<double>& v = scratch_;
  v.resize(potential_.size());
  for (std::size_t i = 0; i < potential_.size(); ++i)
    v[i] = -params_.beta * potential_[i];
  return logsumexp(v) + log_cell_volume_;
}

double GridDensity::log_mass(int cell) const {
  return -params_.beta * potential_[static_cast<std::size_t>(cell)] + log_cell_volume_ -
         log_partition();
}

std::vector<double> GridDensity::cell_masses() const {
  std::vector<double> v(potential_.size());
  for (std::size_t i = 0; i < potential_.size(); ++i)
    v[i] = -params_.beta * potential_[i];
  return normalize_log_weights(v);
}

void GridDensity::refresh_cdf() const {
  if (!cdf_dirty_) return;
  std::vector<double> mass = cell_masses();
  cdf_.resize(mass.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    acc += mass[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
  cdf_dirty_ = false;
}

int GridDensity::sample_cell(RandomStream& rng) const {
  refresh_cdf();
  double u = rng.uniform();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<int>(it - cdf_.begin());
}

Point GridDensity::jitter(int cell, RandomStream& rng) const {
  auto n = node(cell);
  Point x(n.begin(), n.end());
  for (int i = 0; i < dim_; ++i)
    x[static_cast<std::size_t>(i)] +=
        rng.uniform_in(-cell_half_width(i), cell_half_width(i));
  return x;
}

Point GridDensity::sample_point(RandomStream& rng) const {
  return jitter(sample_cell(rng), rng);
}

std::size_t GridDensity::lattice_size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim_; ++i) s *= static_cast<std::size_t>(cells_per_axis_);
  return s;
}

std::size_t GridDensity::lattice_index(std::span<const double> x) const {
  std::size_t idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    double rel = (x[static_cast<std::size_t>(i)] - bbox_lo_[static_cast<std::size_t>(i)]) /
                 h_[static_cast<std::size_t>(i)];
    long k = std::lround(std::floor(rel));
    k = std::clamp(k, 0l, static_cast<long>(cells_per_axis_ - 1));
    idx = idx * static_cast<std::size_t>(cells_per_axis_) + static_cast<std::size_t>(k);
  }
  return idx;
}

int GridDensity::cell_of(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) return -1;
  return lattice_to_cell_[lattice_index(x)];
}

int GridDensity::nearest_cell(std::span<const double> x) const {
  int direct = cell_of(x);
  if (direct >= 0) return direct;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < cell_count(); ++c) {
    double d = 0.0;
    auto n = node(c);
    for (int i = 0; i < dim_; ++i) {
      double diff = n[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace pocmw
