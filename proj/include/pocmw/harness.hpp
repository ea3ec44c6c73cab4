#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pocmw/algorithm.hpp"
#include "pocmw/geometry.hpp"
#include "pocmw/losses.hpp"
#include "pocmw/metrics.hpp"
#include "pocmw/privacy.hpp"
#include "pocmw/samplers.hpp"

namespace pocmw {

inline constexpr const char* kVersion = "0.1.0";

// Configuration failure: names the field and the violated precondition.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct BodyConfig {
  std::string kind;  // "box" | "ball" | "polytope"
  std::vector<double> lower, upper;     // box bounds / polytope bounding box
  std::vector<double> center;           // ball
  double radius = 0.0;                  // ball
  std::vector<Halfspace> faces;         // polytope

  static BodyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  ConvexBody build() const;
};

struct SamplerConfig {
  std::string kind = "grid-inverse-cdf";  // or "projected-langevin"
  int cells = 512;
  double step_size = 1e-3;
  int num_steps = 20000;
  int burn_in = 10000;

  static SamplerConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  SamplerSpec build() const;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string mode;  // "lazy" | "dp" | "baseline-ogd"
  BodyConfig body;
  std::string adversary = "iid-random-linear";
  long long T = 0;
  double G = 1.0;
  long long lazy_S = 0;                       // lazy mode
  double dp_epsilon = 0.0, dp_delta = 0.0;    // dp mode
  double ogd_eta = 0.0, ogd_sigma = 0.0;      // baseline-ogd mode
  SamplerConfig sampler;
  long long trials = 0;
  std::uint64_t master_seed = 0;
  bool trace = false;
  std::string curves = "long";  // "long" | "per-trial"

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
};

struct Aggregate {
  double mean_regret = 0.0, stderr_regret = 0.0;
  double mean_resamples = 0.0, stderr_resamples = 0.0;
  double mean_value_switches = 0.0;
  double mean_cumulative_loss = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string version = kVersion;
  std::optional<Schedule> schedule;  // resolved parameters (lazy / dp)
  std::vector<RegretReport> trial_reports;
  // per trial: (cumulative regret against the horizon optimum, resamples) per round
  std::vector<std::vector<std::pair<double, long long>>> curves;
  std::vector<RunTrace> traces;  // only kept when config.trace
  std::optional<BoundReport> bounds;
  std::optional<PrivacyLedger> ledger;  // dp mode
  Aggregate aggregate;
};

ExperimentReport run_experiment(const ExperimentConfig& config, int jobs = 1);

nlohmann::json report_to_json(const ExperimentReport& report);

// Writes report.json plus regret curves (one long CSV or one per trial) and,
// when traces were kept, trace_trial_<i>.csv files. Returns written paths.
std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir);

struct AuditConfig {
  int schema_version = 1;
  BodyConfig body;
  std::string adversary = "iid-random-linear";
  long long T = 0;
  double G = 1.0;
  int t0 = 1;
  nlohmann::json neighbor_loss;  // loss spec replacing round t0
  double beta = 0.0, lambda = 0.0, p = 0.0;
  double delta = 0.0;
  std::optional<long long> budget;  // absent = infinite
  SamplerConfig sampler;
  long long trials = 0;
  int bins = 10;
  double delta_level = 0.0;
  bool control = false;  // audit identical sequences instead of the neighbor
  std::uint64_t master_seed = 0;

  static AuditConfig from_json(const nlohmann::json& j);
  static AuditConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
};

struct AuditOutcome {
  AuditConfig config;
  PocmwParams params;
  AuditReport report;
  PrivacyLedger ledger;
};

AuditOutcome run_audit(const AuditConfig& config);

nlohmann::json audit_to_json(const AuditOutcome& outcome);

// Loss specs: {"kind":"linear","g":[..]} | {"kind":"abs-deviation","u":[..],
// "b":x,"scale":s} | {"kind":"max-linear","g":[[..]..],"c":[..]}
LossFunction loss_from_json(const nlohmann::json& j);
nlohmann::json loss_to_json(const LossFunction& l);

// Locale-independent shortest round-trip formatting for CSV cells.
std::string format_double(double v);

}  // namespace pocmw
