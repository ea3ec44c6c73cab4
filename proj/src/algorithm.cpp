#include "pocmw/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pocmw {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

PocmwParams PocmwParams::make(double beta, double lambda, double p, double phi,
                              std::optional<long long> budget) {
  PocmwParams params;
  params.beta = beta;
  params.lambda = lambda;
  params.p = p;
  params.phi = phi;
  params.budget = budget;
  params.p_tilde = p + 1.0 - 1.0 / (phi * phi);
  params.validate();
  return params;
}

void PocmwParams::validate() const {
  require(beta >= 0.0 && std::isfinite(beta), "params: beta must be nonnegative");
  require(lambda >= 0.0 && std::isfinite(lambda), "params: lambda must be nonnegative");
  require(p >= 0.0 && p <= 1.0, "params: p must be in [0, 1]");
  require(phi >= 1.0, "params: phi must be >= 1");
  require(!budget.has_value() || *budget >= 0, "params: budget must be nonnegative");
  require(std::abs(p_tilde - (p + 1.0 - 1.0 / (phi * phi))) <= 1e-12,
          "params: p_tilde inconsistent with (p, phi)");
}

double clamp_pi(double r, double phi) {
  require(phi >= 1.0, "clamp_pi: phi must be >= 1");
  return std::min(1.0, std::max(1.0 / (phi * phi), r));
}

long long RunTrace::resample_count() const {
  long long n = 0;
  for (const auto& r : records) n += r.zeta;
  return n;
}

long long RunTrace::value_switch_count() const {
  long long n = 0;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].x != records[i - 1].x) ++n;
  return n;
}

namespace {

// Exact-ratio run in d <= 2: the grid density tracks the cumulative potential
// incrementally and supplies the retention ratio as a cell-mass ratio. With
// the grid sampler this is a faithful run of the algorithm on the discretized
// measure; with a Langevin sampler the draws come from the chain and the grid
// only serves the ratio.
RunTrace run_low_dim(const ConvexBody& body, const LossSequence& seq,
                     const PocmwParams& params, const SamplerSpec& sampler,
                     int cells, RandomStream& rng) {
  const int T = seq.horizon();
  GridDensity grid(body, {params.beta, params.lambda}, cells);
  const double log_phi = std::log(params.phi);
  const bool grid_draws = sampler.is_grid();

  std::vector<LossFunction> seen;
  auto draw = [&](RandomStream& r) -> std::pair<Point, int> {
    if (grid_draws) {
      int cell = grid.sample_cell(r);
      return {grid.jitter(cell, r), cell};
    }
    GibbsState state({params.beta, params.lambda}, seen);
    Point pt = sample(state, body, sampler, r);
    int cell = grid.nearest_cell(pt);
    return {pt, cell};
  };

  RunTrace trace;
  trace.params = params;
  trace.seed = rng.seed();
  trace.records.reserve(static_cast<std::size_t>(T));

  auto [x, cell] = draw(rng);
  long long used = 0;

  for (int t = 1; t <= T; ++t) {
    const LossFunction& l_t = seq.at(t);
    RoundRecord rec;
    rec.t = t;
    rec.x = x;
    rec.loss_value = l_t.eval(x);

    double log_z_t = grid.log_partition();
    grid.append(l_t);
    double log_z_next = grid.log_partition();
    double log_ratio = -params.beta * l_t.eval(grid.node(cell)) + log_z_t - log_z_next;
    double retain = clamp_pi(std::exp(log_ratio - log_phi), params.phi);

    rec.s = rng.bernoulli(retain) ? 1 : 0;
    rec.s_prime = rng.bernoulli(1.0 - params.p) ? 1 : 0;
    rec.zeta = 1 - rec.s * rec.s_prime;

    if (!grid_draws) seen.push_back(l_t);
    if (rec.zeta == 1 && params.budget_open(used)) {
      ++used;
      auto next = draw(rng);
      x = std::move(next.first);
      cell = next.second;
    }
    rec.b = used;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

RunTrace run_with_sampled_ratio(const ConvexBody& body, const LossSequence& seq,
                                const PocmwParams& params, const SamplerSpec& sampler,
                                RandomStream& rng, const RunOptions& options) {
  const int T = seq.horizon();
  const double log_phi = std::log(params.phi);
  GibbsState state({params.beta, params.lambda});
  SampleFn draw = [&](const GibbsState& s, RandomStream& r) {
    return sample(s, body, sampler, r);
  };

  RunTrace trace;
  trace.params = params;
  trace.seed = rng.seed();
  trace.records.reserve(static_cast<std::size_t>(T));
  trace.ratio_error_hints.reserve(static_cast<std::size_t>(T));

  Point x = sample(state, body, sampler, rng);
  long long used = 0;

  for (int t = 1; t <= T; ++t) {
    const LossFunction& l_t = seq.at(t);
    RoundRecord rec;
    rec.t = t;
    rec.x = x;
    rec.loss_value = l_t.eval(x);

    RatioEstimate est = log_density_ratio_step_sampled(state, l_t, x, draw,
                                                       options.ratio_samples, rng);
    trace.ratio_error_hints.push_back(est.upper - est.lower);
    double retain = clamp_pi(std::exp(est.value - log_phi), params.phi);

    rec.s = rng.bernoulli(retain) ? 1 : 0;
    rec.s_prime = rng.bernoulli(1.0 - params.p) ? 1 : 0;
    rec.zeta = 1 - rec.s * rec.s_prime;

    state = state.appended(l_t);
    if (rec.zeta == 1 && params.budget_open(used)) {
      ++used;
      x = sample(state, body, sampler, rng);
    }
    rec.b = used;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace

RunTrace run_pocmw(const ConvexBody& body, const LossSequence& seq,
                   const PocmwParams& params, const SamplerSpec& sampler,
                   RandomStream& rng, const RunOptions& options) {
  params.validate();
  sampler.validate(body.dimension());
  require(seq.horizon() >= 1, "run_pocmw: empty loss sequence");
  if (body.dimension() <= 2) {
    int cells = sampler.is_grid() ? sampler.grid().cells : options.ratio_cells;
    return run_low_dim(body, seq, params, sampler, cells, rng);
  }
  return run_with_sampled_ratio(body, seq, params, sampler, rng, options);
}

Schedule lazy_params(long long S, long long T, double G, double D, int d) {
  require(T >= 3, "lazy_params: T must be >= 3");
  require(S >= 1 && S <= T, "lazy_params: need 1 <= S <= T");
  require(G > 0.0 && D > 0.0 && d >= 1, "lazy_params: positive G, D, d");
  const double delta = 2.0 / (static_cast<double>(T) * static_cast<double>(T));
  const double log_t = std::log(static_cast<double>(T));
  const double lambda =
      std::max(G * std::sqrt(2.0 * static_cast<double>(T)) / D,
               std::sqrt(512.0 * d) * G * log_t / D * (static_cast<double>(T) / S));
  const double beta = lambda / (256.0 * G * G * log_t) *
                      (static_cast<double>(S) * S / (static_cast<double>(T) * T));
  const double phi = phi_bound(beta, lambda, G, delta);
  Schedule sched;
  sched.params = PocmwParams::make(beta, lambda, /*p=*/0.0, phi, std::nullopt);
  sched.delta_close = delta;
  return sched;
}

DpRuntime dp_runtime_params(double beta, double lambda, double G, double delta,
                            long long T) {
  require(delta > 0.0 && delta <= 0.5, "dp_runtime_params: delta must be in (0, 1/2]");
  require(static_cast<double>(T) >= 12.0 * std::log(1.0 / delta),
          "dp_runtime_params: T must be >= 12 log(1/delta)");
  require(beta >= 0.0 && lambda > 0.0 && G >= 0.0, "dp_runtime_params: bad parameters");
  DpRuntime rt;
  rt.delta_prime = delta / (60.0 * static_cast<double>(T) * static_cast<double>(T));
  rt.phi_prime = phi_bound(beta, lambda, 3.0 * G, rt.delta_prime);
  rt.phi = rt.phi_prime * rt.phi_prime;
  const double log_phi = std::log(rt.phi);
  const double numer = std::pow(G, 4) * beta * beta;
  double second = 0.0;
  if (numer > 0.0)
    second = std::cbrt(numer / (lambda * lambda * log_phi * log_phi));
  rt.p = std::max(std::pow(static_cast<double>(T), -1.0 / 3.0), second);
  rt.p = std::min(rt.p, 1.0);
  rt.p_tilde = rt.p + 1.0 - 1.0 / (rt.phi * rt.phi);
  rt.budget = static_cast<long long>(std::ceil(3.0 * rt.p_tilde * static_cast<double>(T)));
  return rt;
}

Schedule dpoco_params(double epsilon, double delta, long long T, double G,
                      double D, int d) {
  require(epsilon > 0.0 && epsilon <= 1.0, "dpoco_params: epsilon must be in (0, 1]");
  require(delta > 0.0 && delta <= 0.5, "dpoco_params: delta must be in (0, 1/2]");
  if (static_cast<double>(T) < 12.0 * std::log(1.0 / delta))
    throw std::invalid_argument("dpoco_params: horizon too small, need T >= 12 log(1/delta) = " +
                                std::to_string(12.0 * std::log(1.0 / delta)));
  require(G > 0.0 && D > 0.0 && d >= 1, "dpoco_params: positive G, D, d");
  const double t_d = static_cast<double>(T);
  const double log_td = std::log(t_d / delta);
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double lambda =
      G / D *
      std::max({1.0 / (2.0 * std::sqrt(t_d)),
                1e3 * std::pow(t_d, 1.0 / 3.0) * sqrt_d * log_td / epsilon,
                1e3 * std::pow(t_d, 3.0 / 8.0) * sqrt_d * log_td /
                    std::pow(epsilon, 0.75)});
  const double beta = lambda / (1e5 * G * G * log_td * log_td) *
                      std::min(epsilon * epsilon / std::pow(t_d, 2.0 / 3.0),
                               std::pow(epsilon, 1.5) / std::pow(t_d, 0.75));
  DpRuntime rt = dp_runtime_params(beta, lambda, G, delta, T);
  Schedule sched;
  sched.params = PocmwParams::make(beta, lambda, rt.p, rt.phi, rt.budget);
  sched.delta_close = rt.delta_prime;
  sched.phi_prime = rt.phi_prime;
  sched.delta_prime = rt.delta_prime;
  return sched;
}

RunTrace run_noisy_ogd(const ConvexBody& body, const LossSequence& seq,
                       double eta, double sigma, RandomStream& rng,
                       std::optional<Point> x0) {
  require(eta >= 0.0 && sigma >= 0.0, "run_noisy_ogd: eta, sigma must be nonnegative");
  const int T = seq.horizon();
  const int d = body.dimension();
  RunTrace trace;
  trace.seed = rng.seed();
  trace.records.reserve(static_cast<std::size_t>(T));
  Point x = x0.has_value() ? body.project(*x0)
                           : body.project(Point(static_cast<std::size_t>(d), 0.0));
  for (int t = 1; t <= T; ++t) {
    auto [value, sub] = seq.at(t).eval_and_subgradient(x);
    RoundRecord rec;
    rec.t = t;
    rec.x = x;
    rec.loss_value = value;
    Point y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      y[i] = x[i] - eta * (sub[i] + sigma * rng.normal());
    Point next = body.project(y);
    rec.zeta = (next == x) ? 0 : 1;
    x = std::move(next);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace pocmw
