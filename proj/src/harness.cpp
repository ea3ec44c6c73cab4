#include "pocmw/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

namespace pocmw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(where + "." + item.key(), "unknown field");
  }
}

template <typename T>
T get_required(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where + "." + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key, "wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

BodyConfig BodyConfig::from_json(const json& j) {
  check_keys(j, "body", {"kind", "lower", "upper", "center", "radius", "faces"});
  BodyConfig b;
  b.kind = get_required<std::string>(j, "body", "kind");
  if (b.kind == "box") {
    b.lower = get_required<std::vector<double>>(j, "body", "lower");
    b.upper = get_required<std::vector<double>>(j, "body", "upper");
  } else if (b.kind == "ball") {
    b.center = get_required<std::vector<double>>(j, "body", "center");
    b.radius = get_required<double>(j, "body", "radius");
  } else if (b.kind == "polytope") {
    b.lower = get_required<std::vector<double>>(j, "body", "lower");
    b.upper = get_required<std::vector<double>>(j, "body", "upper");
    if (!j.contains("faces")) fail("body.faces", "missing");
    for (const auto& f : j.at("faces")) {
      check_keys(f, "body.faces[]", {"a", "b"});
      Halfspace h;
      h.a = get_required<std::vector<double>>(f, "body.faces[]", "a");
      h.b = get_required<double>(f, "body.faces[]", "b");
      b.faces.push_back(std::move(h));
    }
  } else {
    fail("body.kind", "must be box, ball or polytope");
  }
  return b;
}

json BodyConfig::to_json() const {
  json j;
  j["kind"] = kind;
  if (kind == "box" || kind == "polytope") {
    j["lower"] = lower;
    j["upper"] = upper;
  }
  if (kind == "ball") {
    j["center"] = center;
    j["radius"] = radius;
  }
  if (kind == "polytope") {
    json faces = json::array();
    for (const auto& h : this->faces) faces.push_back({{"a", h.a}, {"b", h.b}});
    j["faces"] = faces;
  }
  return j;
}

ConvexBody BodyConfig::build() const {
  try {
    if (kind == "box") return ConvexBody::box(lower, upper);
    if (kind == "ball") return ConvexBody::ball(center, radius);
    return ConvexBody::polytope(faces, lower, upper);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("body: ") + e.what());
  }
}

SamplerConfig SamplerConfig::from_json(const json& j) {
  check_keys(j, "sampler", {"kind", "cells", "step_size", "num_steps", "burn_in"});
  SamplerConfig s;
  s.kind = get_required<std::string>(j, "sampler", "kind");
  if (s.kind == "grid-inverse-cdf") {
    s.cells = get_or(j, "cells", 512);
  } else if (s.kind == "projected-langevin") {
    s.step_size = get_or(j, "step_size", 1e-3);
    s.num_steps = get_or(j, "num_steps", 20000);
    s.burn_in = get_or(j, "burn_in", 10000);
  } else {
    fail("sampler.kind", "must be grid-inverse-cdf or projected-langevin");
  }
  return s;
}

json SamplerConfig::to_json() const {
  json j;
  j["kind"] = kind;
  if (kind == "grid-inverse-cdf") {
    j["cells"] = cells;
  } else {
    j["step_size"] = step_size;
    j["num_steps"] = num_steps;
    j["burn_in"] = burn_in;
  }
  return j;
}

SamplerSpec SamplerConfig::build() const {
  SamplerSpec spec;
  if (kind == "grid-inverse-cdf")
    spec.kind = GridSamplerSpec{cells};
  else
    spec.kind = LangevinSamplerSpec{step_size, num_steps, burn_in};
  return spec;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_keys(j, "config",
             {"schema_version", "mode", "body", "adversary", "T", "G", "lazy", "dp",
              "ogd", "sampler", "trials", "master_seed", "trace", "curves"});
  ExperimentConfig c;
  c.schema_version = get_required<int>(j, "config", "schema_version");
  if (c.schema_version != 1) fail("schema_version", "unsupported version");
  c.mode = get_required<std::string>(j, "config", "mode");
  c.body = BodyConfig::from_json(j.at("body"));
  c.adversary = get_required<std::string>(j, "config", "adversary");
  c.T = get_required<long long>(j, "config", "T");
  c.G = get_required<double>(j, "config", "G");
  if (c.mode == "lazy") {
    if (!j.contains("lazy")) fail("lazy", "missing for mode lazy");
    check_keys(j.at("lazy"), "lazy", {"switch_budget"});
    c.lazy_S = get_required<long long>(j.at("lazy"), "lazy", "switch_budget");
  } else if (c.mode == "dp") {
    if (!j.contains("dp")) fail("dp", "missing for mode dp");
    check_keys(j.at("dp"), "dp", {"epsilon", "delta"});
    c.dp_epsilon = get_required<double>(j.at("dp"), "dp", "epsilon");
    c.dp_delta = get_required<double>(j.at("dp"), "dp", "delta");
  } else if (c.mode == "baseline-ogd") {
    if (!j.contains("ogd")) fail("ogd", "missing for mode baseline-ogd");
    check_keys(j.at("ogd"), "ogd", {"eta", "sigma"});
    c.ogd_eta = get_required<double>(j.at("ogd"), "ogd", "eta");
    c.ogd_sigma = get_required<double>(j.at("ogd"), "ogd", "sigma");
  } else {
    fail("mode", "must be lazy, dp or baseline-ogd");
  }
  for (const char* k : {"lazy", "dp", "ogd"}) {
    std::string active = c.mode == "baseline-ogd" ? "ogd" : c.mode;
    if (j.contains(k) && active != k) fail(k, "present but mode is " + c.mode);
  }
  c.sampler = SamplerConfig::from_json(j.at("sampler"));
  c.trials = get_required<long long>(j, "config", "trials");
  c.master_seed = get_required<std::uint64_t>(j, "config", "master_seed");
  c.trace = get_or(j, "trace", false);
  c.curves = get_or<std::string>(j, "curves", "long");
  if (c.curves != "long" && c.curves != "per-trial")
    fail("curves", "must be long or per-trial");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["mode"] = mode;
  j["body"] = body.to_json();
  j["adversary"] = adversary;
  j["T"] = T;
  j["G"] = G;
  if (mode == "lazy") j["lazy"] = {{"switch_budget", lazy_S}};
  if (mode == "dp") j["dp"] = {{"epsilon", dp_epsilon}, {"delta", dp_delta}};
  if (mode == "baseline-ogd") j["ogd"] = {{"eta", ogd_eta}, {"sigma", ogd_sigma}};
  j["sampler"] = sampler.to_json();
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  j["trace"] = trace;
  j["curves"] = curves;
  return j;
}

void ExperimentConfig::validate() const {
  if (T < 1) fail("T", "must be >= 1");
  if (!(G > 0.0)) fail("G", "must be positive");
  if (trials < 1) fail("trials", "must be >= 1");
  try {
    adversary_from_string(adversary);
  } catch (const std::invalid_argument& e) {
    fail("adversary", e.what());
  }
  ConvexBody b = body.build();
  try {
    sampler.build().validate(b.dimension());
  } catch (const std::exception& e) {
    fail("sampler", e.what());
  }
  if (mode == "lazy") {
    if (T < 3) fail("T", "lazy mode needs T >= 3");
    if (lazy_S < 1 || lazy_S > T) fail("lazy.switch_budget", "need 1 <= S <= T");
  } else if (mode == "dp") {
    if (!(dp_epsilon > 0.0 && dp_epsilon <= 1.0)) fail("dp.epsilon", "must be in (0, 1]");
    if (!(dp_delta > 0.0 && dp_delta <= 0.5)) fail("dp.delta", "must be in (0, 1/2]");
    if (static_cast<double>(T) < 12.0 * std::log(1.0 / dp_delta))
      fail("T", "dp mode needs T >= 12 log(1/delta) = " +
                    format_double(12.0 * std::log(1.0 / dp_delta)));
  } else if (mode == "baseline-ogd") {
    if (ogd_eta < 0.0) fail("ogd.eta", "must be nonnegative");
    if (ogd_sigma < 0.0) fail("ogd.sigma", "must be nonnegative");
  }
}

namespace {

void run_trials(const ExperimentConfig& config, const ConvexBody& body,
                const LossSequence& seq, const std::optional<Schedule>& schedule,
                int jobs, std::vector<RunTrace>& traces) {
  const long long n = config.trials;
  traces.resize(static_cast<std::size_t>(n));
  RandomStream master(config.master_seed);
  SamplerSpec sampler = config.sampler.build();
  auto worker = [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      RandomStream rng = master.derive(static_cast<std::uint64_t>(i) + 1);
      if (config.mode == "baseline-ogd") {
        traces[static_cast<std::size_t>(i)] =
            run_noisy_ogd(body, seq, config.ogd_eta, config.ogd_sigma, rng);
      } else {
        traces[static_cast<std::size_t>(i)] =
            run_pocmw(body, seq, schedule->params, sampler, rng);
      }
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1 || n < 2) {
    worker(0, n);
    return;
  }
  std::vector<std::thread> pool;
  long long chunk = (n + jobs - 1) / jobs;
  for (int t = 0; t < jobs; ++t) {
    long long begin = t * chunk;
    long long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(worker, begin, end);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  ConvexBody body = config.body.build();
  const double D = body.diameter();
  const int d = body.dimension();

  LossSequence seq = generate_sequence(adversary_from_string(config.adversary),
                                       static_cast<int>(config.T), config.G, body,
                                       config.master_seed);

  ExperimentReport report;
  report.config = config;
  if (config.mode == "lazy")
    report.schedule = lazy_params(config.lazy_S, config.T, config.G, D, d);
  else if (config.mode == "dp")
    report.schedule = dpoco_params(config.dp_epsilon, config.dp_delta, config.T,
                                   config.G, D, d);

  std::vector<RunTrace> traces;
  run_trials(config, body, seq, report.schedule, jobs, traces);

  // The hindsight optimum is shared by all trials of the same sequence.
  auto [best_pt, best_value] = best_fixed_point(seq, body);
  std::vector<double> per_round_best(static_cast<std::size_t>(config.T));
  for (int t = 1; t <= config.T; ++t)
    per_round_best[static_cast<std::size_t>(t - 1)] = seq.at(t).eval(best_pt);

  report.trial_reports.reserve(traces.size());
  report.curves.reserve(traces.size());
  for (const auto& trace : traces) {
    RegretReport r;
    r.best_fixed_point = best_pt;
    r.best_fixed_value = best_value;
    std::vector<std::pair<double, long long>> curve;
    curve.reserve(trace.records.size());
    double cum_regret = 0.0;
    long long resamples = 0;
    for (std::size_t t = 0; t < trace.records.size(); ++t) {
      const auto& rec = trace.records[t];
      r.cumulative_loss += rec.loss_value;
      cum_regret += rec.loss_value - per_round_best[t];
      resamples += rec.zeta;
      curve.emplace_back(cum_regret, resamples);
    }
    r.regret = r.cumulative_loss - best_value;
    r.resample_count = trace.resample_count();
    r.value_switch_count = trace.value_switch_count();
    report.trial_reports.push_back(std::move(r));
    report.curves.push_back(std::move(curve));
  }
  if (config.trace) report.traces = std::move(traces);

  if (report.schedule) {
    bool budgeted = report.schedule->params.budget.has_value();
    std::optional<long long> lazy_S;
    if (config.mode == "lazy") lazy_S = config.lazy_S;
    report.bounds = theoretical_bounds(report.schedule->params, config.T, config.G,
                                       D, d, report.schedule->delta_close, budgeted,
                                       lazy_S);
  }
  if (config.mode == "dp")
    report.ledger = build_ledger(config.T, /*t0=*/1, report.schedule->params,
                                 config.G, config.dp_delta);

  const double n = static_cast<double>(report.trial_reports.size());
  double sum_r = 0.0, sum_r2 = 0.0, sum_s = 0.0, sum_s2 = 0.0, sum_v = 0.0,
         sum_l = 0.0;
  for (const auto& r : report.trial_reports) {
    sum_r += r.regret;
    sum_r2 += r.regret * r.regret;
    sum_s += static_cast<double>(r.resample_count);
    sum_s2 += static_cast<double>(r.resample_count) * r.resample_count;
    sum_v += static_cast<double>(r.value_switch_count);
    sum_l += r.cumulative_loss;
  }
  auto stderr_of = [n](double sum, double sum_sq) {
    if (n < 2) return 0.0;
    double mean = sum / n;
    double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
  };
  report.aggregate.mean_regret = sum_r / n;
  report.aggregate.stderr_regret = stderr_of(sum_r, sum_r2);
  report.aggregate.mean_resamples = sum_s / n;
  report.aggregate.stderr_resamples = stderr_of(sum_s, sum_s2);
  report.aggregate.mean_value_switches = sum_v / n;
  report.aggregate.mean_cumulative_loss = sum_l / n;
  return report;
}

namespace {

json params_to_json(const PocmwParams& p) {
  json j;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  j["p"] = p.p;
  j["phi"] = p.phi;
  j["p_tilde"] = p.p_tilde;
  if (p.budget.has_value())
    j["budget"] = *p.budget;
  else
    j["budget"] = "infinite";
  return j;
}

json ledger_to_json(const PrivacyLedger& ledger) {
  json j;
  json rounds = json::array();
  for (const auto& [e, d] : ledger.per_round) rounds.push_back({{"eps", e}, {"delta", d}});
  j["per_round"] = rounds;
  j["delta_double_prime"] = ledger.delta_double_prime;
  j["composed"] = {{"eps", ledger.composed.first}, {"delta", ledger.composed.second}};
  j["total"] = {{"eps", ledger.total.first}, {"delta", ledger.total.second}};
  j["budget_tail_addend"] = ledger.budget_tail_addend;
  return j;
}

}  // namespace

json report_to_json(const ExperimentReport& report) {
  json j;
  j["version"] = report.version;
  j["config"] = report.config.to_json();
  if (report.schedule) {
    j["schedule"] = params_to_json(report.schedule->params);
    j["schedule"]["delta_close"] = report.schedule->delta_close;
  }
  json trials = json::array();
  for (std::size_t i = 0; i < report.trial_reports.size(); ++i) {
    const auto& r = report.trial_reports[i];
    trials.push_back({{"trial", i},
                      {"cumulative_loss", r.cumulative_loss},
                      {"best_fixed_value", r.best_fixed_value},
                      {"regret", r.regret},
                      {"resamples", r.resample_count},
                      {"value_switches", r.value_switch_count}});
  }
  j["trials"] = trials;
  if (!report.trial_reports.empty()) {
    json best = json::array();
    for (double v : report.trial_reports.front().best_fixed_point) best.push_back(v);
    j["best_fixed_point"] = best;
  }
  j["aggregate"] = {{"mean_regret", report.aggregate.mean_regret},
                    {"stderr_regret", report.aggregate.stderr_regret},
                    {"mean_resamples", report.aggregate.mean_resamples},
                    {"stderr_resamples", report.aggregate.stderr_resamples},
                    {"mean_value_switches", report.aggregate.mean_value_switches},
                    {"mean_cumulative_loss", report.aggregate.mean_cumulative_loss}};
  if (report.bounds) {
    json b;
    b["regret_bound"] = report.bounds->regret_bound;
    b["switch_mean_bound"] = report.bounds->switch_mean_bound;
    b["switch_tail_bound"] = report.bounds->switch_tail_bound;
    if (report.bounds->lazy_regret_bound)
      b["lazy_regret_bound"] = *report.bounds->lazy_regret_bound;
    j["bounds"] = b;
  }
  if (report.ledger) j["privacy"] = ledger_to_json(*report.ledger);
  return j;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string curves_csv(const ExperimentReport& report,
                       std::optional<std::size_t> only_trial) {
  std::string csv = "trial,t,cumulative_regret,resamples\n";
  for (std::size_t i = 0; i < report.curves.size(); ++i) {
    if (only_trial && *only_trial != i) continue;
    const auto& curve = report.curves[i];
    for (std::size_t t = 0; t < curve.size(); ++t) {
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(t + 1);
      csv += ',';
      csv += format_double(curve[t].first);
      csv += ',';
      csv += std::to_string(curve[t].second);
      csv += '\n';
    }
  }
  return csv;
}

std::string trace_csv(const RunTrace& trace, int dim) {
  std::string csv = "t";
  for (int i = 0; i < dim; ++i) csv += ",x_" + std::to_string(i);
  csv += ",loss,s,s_prime,zeta,b\n";
  for (const auto& rec : trace.records) {
    csv += std::to_string(rec.t);
    for (double v : rec.x) {
      csv += ',';
      csv += format_double(v);
    }
    csv += ',';
    csv += format_double(rec.loss_value);
    csv += ',';
    csv += std::to_string(rec.s);
    csv += ',';
    csv += std::to_string(rec.s_prime);
    csv += ',';
    csv += std::to_string(rec.zeta);
    csv += ',';
    csv += std::to_string(rec.b);
    csv += '\n';
  }
  return csv;
}

}  // namespace

std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  std::string report_path = (fs::path(out_dir) / "report.json").string();
  write_file(report_path, report_to_json(report).dump(2) + "\n");
  written.push_back(report_path);

  if (report.config.curves == "long") {
    std::string path = (fs::path(out_dir) / "curves.csv").string();
    write_file(path, curves_csv(report, std::nullopt));
    written.push_back(path);
  } else {
    for (std::size_t i = 0; i < report.curves.size(); ++i) {
      std::string path =
          (fs::path(out_dir) / ("curves_trial_" + std::to_string(i) + ".csv")).string();
      write_file(path, curves_csv(report, i));
      written.push_back(path);
    }
  }
  if (!report.traces.empty()) {
    const int dim = report.traces.front().records.empty()
                        ? 0
                        : static_cast<int>(report.traces.front().records.front().x.size());
    for (std::size_t i = 0; i < report.traces.size(); ++i) {
      std::string path =
          (fs::path(out_dir) / ("trace_trial_" + std::to_string(i) + ".csv")).string();
      write_file(path, trace_csv(report.traces[i], dim));
      written.push_back(path);
    }
  }
  return written;
}

LossFunction loss_from_json(const json& j) {
  check_keys(j, "loss", {"kind", "g", "u", "b", "scale", "c"});
  std::string kind = get_required<std::string>(j, "loss", "kind");
  if (kind == "linear")
    return LossFunction(LinearLoss{get_required<std::vector<double>>(j, "loss", "g")});
  if (kind == "abs-deviation")
    return LossFunction(AbsDeviationLoss{
        get_required<std::vector<double>>(j, "loss", "u"),
        get_required<double>(j, "loss", "b"), get_required<double>(j, "loss", "scale")});
  if (kind == "max-linear")
    return LossFunction(MaxLinearLoss{
        get_required<std::vector<std::vector<double>>>(j, "loss", "g"),
        get_required<std::vector<double>>(j, "loss", "c")});
  fail("loss.kind", "must be linear, abs-deviation or max-linear");
}

json loss_to_json(const LossFunction& l) {
  json j;
  if (const auto* lin = std::get_if<LinearLoss>(&l.form())) {
    j["kind"] = "linear";
    j["g"] = lin->g;
  } else if (const auto* ad = std::get_if<AbsDeviationLoss>(&l.form())) {
    j["kind"] = "abs-deviation";
    j["u"] = ad->u;
    j["b"] = ad->b;
    j["scale"] = ad->scale;
  } else {
    const auto& ml = std::get<MaxLinearLoss>(l.form());
    j["kind"] = "max-linear";
    j["g"] = ml.g;
    j["c"] = ml.c;
  }
  return j;
}

AuditConfig AuditConfig::from_json(const json& j) {
  check_keys(j, "audit",
             {"schema_version", "body", "adversary", "T", "G", "t0", "neighbor",
              "beta", "lambda", "p", "delta", "budget", "sampler", "trials", "bins",
              "delta_level", "control", "master_seed"});
  AuditConfig c;
  c.schema_version = get_required<int>(j, "audit", "schema_version");
  if (c.schema_version != 1) fail("schema_version", "unsupported version");
  c.body = BodyConfig::from_json(j.at("body"));
  c.adversary = get_required<std::string>(j, "audit", "adversary");
  c.T = get_required<long long>(j, "audit", "T");
  c.G = get_required<double>(j, "audit", "G");
  c.t0 = get_required<int>(j, "audit", "t0");
  if (!j.contains("neighbor")) fail("neighbor", "missing");
  c.neighbor_loss = j.at("neighbor");
  c.beta = get_required<double>(j, "audit", "beta");
  c.lambda = get_required<double>(j, "audit", "lambda");
  c.p = get_required<double>(j, "audit", "p");
  c.delta = get_required<double>(j, "audit", "delta");
  if (j.contains("budget")) {
    if (j.at("budget").is_string()) {
      if (j.at("budget").get<std::string>() != "infinite")
        fail("budget", "must be an integer or \"infinite\"");
    } else {
      c.budget = get_required<long long>(j, "audit", "budget");
    }
  }
  c.sampler = SamplerConfig::from_json(j.at("sampler"));
  c.trials = get_required<long long>(j, "audit", "trials");
  c.bins = get_required<int>(j, "audit", "bins");
  c.delta_level = get_or(j, "delta_level", 0.0);
  c.control = get_or(j, "control", false);
  c.master_seed = get_required<std::uint64_t>(j, "audit", "master_seed");
  c.validate();
  return c;
}

AuditConfig AuditConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

json AuditConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["body"] = body.to_json();
  j["adversary"] = adversary;
  j["T"] = T;
  j["G"] = G;
  j["t0"] = t0;
  j["neighbor"] = neighbor_loss;
  j["beta"] = beta;
  j["lambda"] = lambda;
  j["p"] = p;
  j["delta"] = delta;
  if (budget.has_value())
    j["budget"] = *budget;
  else
    j["budget"] = "infinite";
  j["sampler"] = sampler.to_json();
  j["trials"] = trials;
  j["bins"] = bins;
  j["delta_level"] = delta_level;
  j["control"] = control;
  j["master_seed"] = master_seed;
  return j;
}

void AuditConfig::validate() const {
  ConvexBody b = body.build();
  if (b.dimension() != 1) fail("body", "audit supports d = 1 only");
  if (T < 1 || T > 8) fail("T", "audit supports 1 <= T <= 8");
  if (t0 < 1 || t0 > T) fail("t0", "must be in [1, T]");
  if (!(G > 0.0)) fail("G", "must be positive");
  if (!(beta >= 0.0)) fail("beta", "must be nonnegative");
  if (!(lambda > 0.0)) fail("lambda", "must be positive");
  if (!(p > 0.0 && p <= 1.0)) fail("p", "must be in (0, 1]");
  if (!(delta > 0.0 && delta <= 0.5)) fail("delta", "must be in (0, 1/2]");
  if (sampler.kind != "grid-inverse-cdf") fail("sampler.kind", "audit needs the grid sampler");
  if (trials < 10000) fail("trials", "need at least 10^4");
  if (bins < 2) fail("bins", "need at least 2");
  if (static_cast<double>(trials) / (2.0 * bins) < 20.0)
    fail("bins", "too fine for the trial count");
  try {
    loss_from_json(neighbor_loss);
  } catch (const std::exception& e) {
    fail("neighbor", e.what());
  }
}

AuditOutcome run_audit(const AuditConfig& config) {
  config.validate();
  ConvexBody body = config.body.build();
  LossSequence seq = generate_sequence(adversary_from_string(config.adversary),
                                       static_cast<int>(config.T), config.G, body,
                                       config.master_seed);
  LossFunction replacement = loss_from_json(config.neighbor_loss);
  LossSequence neighbor =
      config.control ? seq : make_neighbor(seq, config.t0, replacement);

  const double delta_prime =
      config.delta / (60.0 * static_cast<double>(config.T) * config.T);
  const double phi_prime = phi_bound(config.beta, config.lambda, 3.0 * config.G,
                                     delta_prime);
  AuditOutcome out;
  out.config = config;
  out.params = PocmwParams::make(config.beta, config.lambda, config.p,
                                 phi_prime * phi_prime, config.budget);
  RandomStream rng(config.master_seed);
  out.report = empirical_audit(body, seq, neighbor, out.params,
                               config.sampler.build(), config.trials, config.bins,
                               config.delta_level, rng);
  out.ledger = build_ledger(config.T, config.t0, out.params, config.G, config.delta);
  return out;
}

json audit_to_json(const AuditOutcome& outcome) {
  json j;
  j["version"] = kVersion;
  j["config"] = outcome.config.to_json();
  j["params"] = params_to_json(outcome.params);
  j["report"] = {{"eps_hat", outcome.report.eps_hat},
                 {"delta_level", outcome.report.delta_level},
                 {"trials", outcome.report.trials},
                 {"event_count", outcome.report.event_count},
                 {"mc_slack", outcome.report.mc_slack}};
  j["ledger"] = ledger_to_json(outcome.ledger);
  j["accountant_eps"] = outcome.ledger.composed.first;
  return j;
}

}  // namespace pocmw
