#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pocmw/geometry.hpp"

namespace pocmw {

// <g, x>
struct LinearLoss {
  std::vector<double> g;
};

// scale * |u.x - b| with unit u
struct AbsDeviationLoss {
  std::vector<double> u;
  double b = 0.0;
  double scale = 1.0;
};

// max_i (<g_i, x> + c_i); subgradient ties broken toward the lowest index
struct MaxLinearLoss {
  std::vector<std::vector<double>> g;
  std::vector<double> c;
};

// Convex Lipschitz loss. The stored lipschitz constant is the analytic bound
// from the parameters. Subgradients at kinks follow the minimum-norm rule.
class LossFunction {
 public:
  explicit LossFunction(LinearLoss l);
  explicit LossFunction(AbsDeviationLoss l);
  explicit LossFunction(MaxLinearLoss l);

  int dimension() const { return dim_; }
  double lipschitz() const { return lipschitz_; }

  double eval(std::span<const double> x) const;
  // (value, subgradient); min-norm element at kinks.
  std::pair<double, std::vector<double>> eval_and_subgradient(
      std::span<const double> x) const;

  const std::variant<LinearLoss, AbsDeviationLoss, MaxLinearLoss>& form() const {
    return form_;
  }

  bool operator==(const LossFunction& other) const;

 private:
  std::variant<LinearLoss, AbsDeviationLoss, MaxLinearLoss> form_;
  int dim_ = 0;
  double lipschitz_ = 0.0;
};

enum class AdversaryKind {
  fixed_linear,
  alternating_sign,
  shifting_minimizer,
  iid_random_linear,
};

AdversaryKind adversary_from_string(const std::string& name);
std::string to_string(AdversaryKind kind);

// Oblivious loss sequence: generated up front, immutable afterwards.
struct LossSequence {
  std::vector<LossFunction> losses;
  double lipschitz = 0.0;  // max over losses
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(losses.size()); }
  const LossFunction& at(int t) const { return losses.at(static_cast<std::size_t>(t - 1)); }  // 1-based
};

LossSequence generate_sequence(AdversaryKind adversary, int T, double G,
                               const ConvexBody& body, std::uint64_t seed);

// Copy of seq with round t0 (1-based) replaced. The replacement may not
// exceed the sequence's Lipschitz constant.
LossSequence make_neighbor(const LossSequence& seq, int t0,
                           LossFunction replacement);

}  // namespace pocmw
