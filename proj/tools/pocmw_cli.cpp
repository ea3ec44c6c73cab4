// Command-line front end: run experiments from JSON configs, audit privacy on
// neighboring sequences, print parameter schedules, and verify the supporting
// identities. Exit codes: 0 success, 2 config error, 3 verification failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pocmw/harness.hpp"
#include "pocmw/verify_suites.hpp"

using nlohmann::json;

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, bool trace, int jobs) {
  pocmw::ExperimentConfig config = pocmw::ExperimentConfig::load(config_path);
  if (seed) config.master_seed = *seed;
  if (trace) config.trace = true;
  pocmw::ExperimentReport report = pocmw::run_experiment(config, jobs);
  auto written = pocmw::emit_report(report, out_dir);
  for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
  std::printf("mean_regret %s (stderr %s), mean_resamples %s\n",
              pocmw::format_double(report.aggregate.mean_regret).c_str(),
              pocmw::format_double(report.aggregate.stderr_regret).c_str(),
              pocmw::format_double(report.aggregate.mean_resamples).c_str());
  return 0;
}

int cmd_audit(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  pocmw::AuditConfig config = pocmw::AuditConfig::load(config_path);
  if (seed) config.master_seed = *seed;
  pocmw::AuditOutcome outcome = pocmw::run_audit(config);
  json j = pocmw::audit_to_json(outcome);
  std::filesystem::create_directories(out_dir);
  std::string path = (std::filesystem::path(out_dir) / "audit.json").string();
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
  std::printf("wrote %s\n", path.c_str());
  std::printf("eps_hat %s, accountant eps %s, mc_slack %s\n",
              pocmw::format_double(outcome.report.eps_hat).c_str(),
              pocmw::format_double(outcome.ledger.composed.first).c_str(),
              pocmw::format_double(outcome.report.mc_slack).c_str());
  return 0;
}

int cmd_params(const std::string& mode, long long T, double G, double D, int d,
               long long S, double epsilon, double delta) {
  json j;
  if (mode == "lazy") {
    pocmw::Schedule sched = pocmw::lazy_params(S, T, G, D, d);
    j["mode"] = "lazy";
    j["beta"] = sched.params.beta;
    j["lambda"] = sched.params.lambda;
    j["phi"] = sched.params.phi;
    j["p"] = sched.params.p;
    j["p_tilde"] = sched.params.p_tilde;
    j["budget"] = "infinite";
    j["delta_close"] = sched.delta_close;
    j["regret_bound"] = pocmw::lazy_regret_bound(S, T, G, D, d);
  } else if (mode == "dp") {
    pocmw::Schedule sched = pocmw::dpoco_params(epsilon, delta, T, G, D, d);
    j["mode"] = "dp";
    j["beta"] = sched.params.beta;
    j["lambda"] = sched.params.lambda;
    j["phi"] = sched.params.phi;
    j["phi_prime"] = sched.phi_prime;
    j["p"] = sched.params.p;
    j["p_tilde"] = sched.params.p_tilde;
    j["budget"] = *sched.params.budget;
    j["delta_prime"] = sched.delta_prime;
    double eps_prime = pocmw::epsilon_prime_closed_form(T, sched.params.phi, G,
                                                        sched.params.beta,
                                                        sched.params.lambda);
    j["epsilon_prime"] = eps_prime;
    j["epsilon_total"] = pocmw::total_epsilon(eps_prime, delta);
  } else {
    throw pocmw::ConfigError("params: mode must be lazy or dp");
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for switching-limited and differentially private "
               "online convex optimization via Gibbs-measure sampling"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool trace = false;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "config path")->required();
  run->add_option("--seed", seed, "override master_seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--trace", trace, "dump per-round trace CSVs");
  run->add_option("--jobs", jobs, "parallel trial workers");

  auto* audit = app.add_subcommand("audit", "empirical privacy audit");
  audit->add_option("--config", config_path, "config path")->required();
  audit->add_option("--seed", seed, "override master_seed");
  audit->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run the identity/property suites");
  bool quick = false;
  verify->add_flag("--quick", quick, "smaller sample counts");

  std::string mode;
  long long T = 0, S = 0;
  double G = 1.0, D = 2.0, eps = 1.0, delta = 0.01;
  int dim = 1;
  auto* params = app.add_subcommand("params", "print a parameter schedule");
  params->add_option("--mode", mode, "lazy or dp")->required();
  params->add_option("--T", T, "horizon")->required();
  params->add_option("--G", G, "Lipschitz bound");
  params->add_option("--D", D, "diameter");
  params->add_option("--d", dim, "dimension");
  params->add_option("--S", S, "switch budget (lazy)");
  params->add_option("--epsilon", eps, "privacy epsilon (dp)");
  params->add_option("--delta", delta, "privacy delta (dp)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir, trace, jobs);
    if (audit->parsed()) return cmd_audit(config_path, seed, out_dir);
    if (params->parsed()) return cmd_params(mode, T, G, D, dim, S, eps, delta);
    if (verify->parsed()) {
      bool ok = pocmw::run_verify_suites(stdout, quick);
      return ok ? 0 : 3;
    }
  } catch (const pocmw::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
