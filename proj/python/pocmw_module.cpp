// Python bindings for the main operations: bodies, loss sequences, Gibbs
// closed forms, the online loop, schedules, bounds, privacy accounting, and
// the JSON experiment/audit entry points.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "pocmw/harness.hpp"
#include "pocmw/verify_suites.hpp"

namespace py = pybind11;
using namespace pocmw;

namespace {

py::dict schedule_dict(const Schedule& s) {
  py::dict d;
  d["beta"] = s.params.beta;
  d["lambda"] = s.params.lambda;
  d["p"] = s.params.p;
  d["phi"] = s.params.phi;
  d["p_tilde"] = s.params.p_tilde;
  if (s.params.budget.has_value())
    d["budget"] = *s.params.budget;
  else
    d["budget"] = py::none();
  d["delta_close"] = s.delta_close;
  return d;
}

}  // namespace

PYBIND11_MODULE(pocmw, m) {
  m.doc() = "Gibbs-measure simulator for switching-limited and differentially "
            "private online convex optimization";
  m.attr("__version__") = kVersion;

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_static("box", &ConvexBody::box, py::arg("lower"), py::arg("upper"))
      .def_static("ball", &ConvexBody::ball, py::arg("center"), py::arg("radius"))
      .def_property_readonly("dimension", &ConvexBody::dimension)
      .def_property_readonly("diameter", &ConvexBody::diameter)
      .def("contains",
           [](const ConvexBody& b, const Point& x) { return b.contains(x); })
      .def("project",
           [](const ConvexBody& b, const Point& x) { return b.project(x); })
      .def("grid_points", [](const ConvexBody& b, int cells) {
        std::vector<std::pair<Point, double>> out;
        for (auto& n : b.grid_points(cells)) out.emplace_back(n.x, n.weight);
        return out;
      });

  py::class_<LossFunction>(m, "LossFunction")
      .def_static("linear", [](std::vector<double> g) {
        return LossFunction(LinearLoss{std::move(g)});
      })
      .def_static("abs_deviation",
                  [](std::vector<double> u, double b, double scale) {
                    return LossFunction(AbsDeviationLoss{std::move(u), b, scale});
                  },
                  py::arg("u"), py::arg("b"), py::arg("scale") = 1.0)
      .def_static("max_linear",
                  [](std::vector<std::vector<double>> g, std::vector<double> c) {
                    return LossFunction(MaxLinearLoss{std::move(g), std::move(c)});
                  })
      .def_property_readonly("lipschitz", &LossFunction::lipschitz)
      .def("__call__",
           [](const LossFunction& l, const Point& x) { return l.eval(x); })
      .def("eval_and_subgradient", [](const LossFunction& l, const Point& x) {
        return l.eval_and_subgradient(x);
      });

  py::class_<LossSequence>(m, "LossSequence")
      .def_property_readonly("horizon", &LossSequence::horizon)
      .def_readonly("lipschitz", &LossSequence::lipschitz)
      .def_readonly("seed", &LossSequence::seed)
      .def("at", [](const LossSequence& s, int t) { return s.at(t); });

  m.def("generate_sequence",
        [](const std::string& adversary, int T, double G, const ConvexBody& body,
           std::uint64_t seed) {
          return generate_sequence(adversary_from_string(adversary), T, G, body, seed);
        },
        py::arg("adversary"), py::arg("T"), py::arg("G"), py::arg("body"),
        py::arg("seed"));
  m.def("make_neighbor", &make_neighbor, py::arg("seq"), py::arg("t0"),
        py::arg("replacement"));

  m.def("phi_bound", &phi_bound, py::arg("beta"), py::arg("lambda"), py::arg("G"),
        py::arg("delta"));
  m.def("lsi_constant", &lsi_constant);
  m.def("herbst_tail", &herbst_tail);

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>())
      .def("derive", &RandomStream::derive)
      .def("uniform", &RandomStream::uniform)
      .def("normal", &RandomStream::normal);

  py::class_<PocmwParams>(m, "PocmwParams")
      .def_static("make",
                  [](double beta, double lambda, double p, double phi,
                     std::optional<long long> budget) {
                    return PocmwParams::make(beta, lambda, p, phi, budget);
                  },
                  py::arg("beta"), py::arg("lambda"), py::arg("p"), py::arg("phi"),
                  py::arg("budget") = std::nullopt)
      .def_readonly("beta", &PocmwParams::beta)
      .def_readonly("lambda_", &PocmwParams::lambda)
      .def_readonly("p", &PocmwParams::p)
      .def_readonly("phi", &PocmwParams::phi)
      .def_readonly("p_tilde", &PocmwParams::p_tilde)
      .def_property_readonly("budget", [](const PocmwParams& p) {
        return p.budget.has_value() ? py::cast(*p.budget) : py::none();
      });

  m.def("clamp_pi", &clamp_pi, py::arg("r"), py::arg("phi"));

  py::class_<RoundRecord>(m, "RoundRecord")
      .def_readonly("t", &RoundRecord::t)
      .def_readonly("x", &RoundRecord::x)
      .def_readonly("loss_value", &RoundRecord::loss_value)
      .def_readonly("s", &RoundRecord::s)
      .def_readonly("s_prime", &RoundRecord::s_prime)
      .def_readonly("zeta", &RoundRecord::zeta)
      .def_readonly("b", &RoundRecord::b);

  py::class_<RunTrace>(m, "RunTrace")
      .def_readonly("records", &RunTrace::records)
      .def_readonly("seed", &RunTrace::seed)
      .def("resample_count", &RunTrace::resample_count)
      .def("value_switch_count", &RunTrace::value_switch_count);

  m.def("run_pocmw",
        [](const ConvexBody& body, const LossSequence& seq, const PocmwParams& params,
           int grid_cells, std::uint64_t seed) {
          SamplerSpec sampler;
          sampler.kind = GridSamplerSpec{grid_cells};
          RandomStream rng(seed);
          return run_pocmw(body, seq, params, sampler, rng);
        },
        py::arg("body"), py::arg("seq"), py::arg("params"),
        py::arg("grid_cells") = 512, py::arg("seed") = 0);
  m.def("run_noisy_ogd",
        [](const ConvexBody& body, const LossSequence& seq, double eta, double sigma,
           std::uint64_t seed, std::optional<Point> x0) {
          RandomStream rng(seed);
          return run_noisy_ogd(body, seq, eta, sigma, rng, std::move(x0));
        },
        py::arg("body"), py::arg("seq"), py::arg("eta"), py::arg("sigma"),
        py::arg("seed") = 0, py::arg("x0") = std::nullopt);

  m.def("lazy_params", [](long long S, long long T, double G, double D, int d) {
    return schedule_dict(lazy_params(S, T, G, D, d));
  });
  m.def("dpoco_params",
        [](double epsilon, double delta, long long T, double G, double D, int d) {
          return schedule_dict(dpoco_params(epsilon, delta, T, G, D, d));
        });

  py::class_<RegretReport>(m, "RegretReport")
      .def_readonly("cumulative_loss", &RegretReport::cumulative_loss)
      .def_readonly("best_fixed_value", &RegretReport::best_fixed_value)
      .def_readonly("best_fixed_point", &RegretReport::best_fixed_point)
      .def_readonly("regret", &RegretReport::regret)
      .def_readonly("resample_count", &RegretReport::resample_count)
      .def_readonly("value_switch_count", &RegretReport::value_switch_count);

  m.def("best_fixed_point", &best_fixed_point, py::arg("seq"), py::arg("body"));
  m.def("regret_and_switches", &regret_and_switches, py::arg("trace"), py::arg("seq"),
        py::arg("body"));
  m.def("lazy_regret_bound", &lazy_regret_bound);
  m.def("drift_bound", &drift_bound);
  m.def("theoretical_bounds",
        [](const PocmwParams& params, long long T, double G, double D, int d,
           double delta_close, bool budgeted, std::optional<long long> lazy_S) {
          BoundReport r = theoretical_bounds(params, T, G, D, d, delta_close,
                                             budgeted, lazy_S);
          py::dict out;
          out["regret_bound"] = r.regret_bound;
          out["switch_mean_bound"] = r.switch_mean_bound;
          out["switch_tail_bound"] = r.switch_tail_bound;
          if (r.lazy_regret_bound) out["lazy_regret_bound"] = *r.lazy_regret_bound;
          return out;
        },
        py::arg("params"), py::arg("T"), py::arg("G"), py::arg("D"), py::arg("d"),
        py::arg("delta_close"), py::arg("budgeted"),
        py::arg("lazy_S") = std::nullopt);

  m.def("per_round_epsilons", &per_round_epsilons, py::arg("T"), py::arg("t0"),
        py::arg("phi"), py::arg("p"), py::arg("G"), py::arg("beta"), py::arg("lambda"),
        py::arg("zeta_schedule") = std::vector<int>{},
        py::arg("budget_open") = std::vector<int>{});
  m.def("strong_composition", &strong_composition, py::arg("eps"), py::arg("deltas"),
        py::arg("delta_double_prime"));
  m.def("epsilon_prime_closed_form", &epsilon_prime_closed_form);
  m.def("total_epsilon", &total_epsilon);

  m.def("run_experiment_json", [](const std::string& config_json, int jobs) {
    ExperimentConfig config =
        ExperimentConfig::from_json(nlohmann::json::parse(config_json));
    return report_to_json(run_experiment(config, jobs)).dump(2);
  }, py::arg("config_json"), py::arg("jobs") = 1);
  m.def("run_audit_json", [](const std::string& config_json) {
    AuditConfig config = AuditConfig::from_json(nlohmann::json::parse(config_json));
    return audit_to_json(run_audit(config)).dump(2);
  });
  m.def("verify_suites", [](bool quick) {
    VerifyResult r = verify_suites(quick);
    py::dict out;
    out["variational"] = r.variational;
    out["log_partition_derivative"] = r.log_partition_derivative;
    out["log_partition_convexity"] = r.log_partition_convexity;
    out["tv_expectation"] = r.tv_expectation;
    out["ftl_btl"] = r.ftl_btl;
    out["all"] = r.all();
    return out;
  }, py::arg("quick") = true);
}
