#include "pocmw/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pocmw {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<double> unit(std::vector<double> v) {
  double n = norm(v);
  require(n > 0.0, "loss: zero direction");
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

LossFunction::LossFunction(LinearLoss l) : form_(std::move(l)) {
  const auto& lin = std::get<LinearLoss>(form_);
  require(!lin.g.empty(), "linear loss: empty gradient");
  dim_ = static_cast<int>(lin.g.size());
  lipschitz_ = norm(lin.g);
}

LossFunction::LossFunction(AbsDeviationLoss l) : form_(std::move(l)) {
  auto& ad = std::get<AbsDeviationLoss>(form_);
  require(!ad.u.empty(), "abs-deviation loss: empty direction");
  require(ad.scale >= 0.0, "abs-deviation loss: negative scale");
  ad.u = unit(std::move(ad.u));
  dim_ = static_cast<int>(ad.u.size());
  lipschitz_ = ad.scale;
}

LossFunction::LossFunction(MaxLinearLoss l) : form_(std::move(l)) {
  const auto& ml = std::get<MaxLinearLoss>(form_);
  require(!ml.g.empty() && ml.g.size() == ml.c.size(), "max-linear loss: bad pieces");
  dim_ = static_cast<int>(ml.g.front().size());
  for (const auto& gi : ml.g) {
    require(static_cast<int>(gi.size()) == dim_, "max-linear loss: dimension mismatch");
    lipschitz_ = std::max(lipschitz_, norm(gi));
  }
}

double LossFunction::eval(std::span<const double> x) const {
  if (const auto* lin = std::get_if<LinearLoss>(&form_)) return dot(lin->g, x);
  if (const auto* ad = std::get_if<AbsDeviationLoss>(&form_))
    return ad->scale * std::abs(dot(ad->u, x) - ad->b);
  const auto& ml = std::get<MaxLinearLoss>(form_);
  double best = dot(ml.g[0], x) + ml.c[0];
  for (std::size_t i = 1; i < ml.g.size(); ++i)
    best = std::max(best, dot(ml.g[i], x) + ml.c[i]);
  return best;
}

std::pair<double, std::vector<double>> LossFunction::eval_and_subgradient(
    std::span<const double> x) const {
  if (const auto* lin = std::get_if<LinearLoss>(&form_))
    return {dot(lin->g, x), lin->g};
  if (const auto* ad = std::get_if<AbsDeviationLoss>(&form_)) {
    double r = dot(ad->u, x) - ad->b;
    std::vector<double> sub(ad->u.size(), 0.0);
    if (r != 0.0) {
      double s = (r > 0.0 ? ad->scale : -ad->scale);
      for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = s * ad->u[i];
    }
    return {ad->scale * std::abs(r), sub};
  }
  const auto& ml = std::get<MaxLinearLoss>(form_);
  std::size_t best = 0;
  double best_v = dot(ml.g[0], x) + ml.c[0];
  for (std::size_t i = 1; i < ml.g.size(); ++i) {
    double v = dot(ml.g[i], x) + ml.c[i];
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return {best_v, ml.g[best]};
}

bool LossFunction::operator==(const LossFunction& other) const {
  if (form_.index() != other.form_.index()) return false;
  if (const auto* lin = std::get_if<LinearLoss>(&form_))
    return lin->g == std::get<LinearLoss>(other.form_).g;
  if (const auto* ad = std::get_if<AbsDeviationLoss>(&form_)) {
    const auto& o = std::get<AbsDeviationLoss>(other.form_);
    return ad->u == o.u && ad->b == o.b && ad->scale == o.scale;
  }
  const auto& ml = std::get<MaxLinearLoss>(form_);
  const auto& o = std::get<MaxLinearLoss>(other.form_);
  return ml.g == o.g && ml.c == o.c;
}

AdversaryKind adversary_from_string(const std::string& name) {
  if (name == "fixed-linear") return AdversaryKind::fixed_linear;
  if (name == "alternating-sign") return AdversaryKind::alternating_sign;
  if (name == "shifting-minimizer") return AdversaryKind::shifting_minimizer;
  if (name == "iid-random-linear") return AdversaryKind::iid_random_linear;
  throw std::invalid_argument("unknown adversary kind: " + name);
}

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::fixed_linear: return "fixed-linear";
    case AdversaryKind::alternating_sign: return "alternating-sign";
    case AdversaryKind::shifting_minimizer: return "shifting-minimizer";
    case AdversaryKind::iid_random_linear: return "iid-random-linear";
  }
  return "?";
}

namespace {

// Uniform direction on the unit sphere.
std::vector<double> random_direction(int d, RandomStream& rng) {
  std::vector<double> v;
  do {
    v = rng.normal_vector(d);
  } while (norm(v) == 0.0);
  double n = norm(v);
  for (auto& x : v) x /= n;
  return v;
}

}  // namespace

LossSequence generate_sequence(AdversaryKind adversary, int T, double G,
                               const ConvexBody& body, std::uint64_t seed) {
  require(T >= 1, "generate_sequence: T must be >= 1");
  require(G > 0.0, "generate_sequence: G must be positive");
  const int d = body.dimension();
  RandomStream rng(seed);
  LossSequence seq;
  seq.seed = seed;
  seq.losses.reserve(static_cast<std::size_t>(T));
  switch (adversary) {
    case AdversaryKind::fixed_linear: {
      std::vector<double> g = random_direction(d, rng);
      for (auto& x : g) x *= G;
      for (int t = 0; t < T; ++t) seq.losses.emplace_back(LinearLoss{g});
      break;
    }
    case AdversaryKind::alternating_sign: {
      // +-G along the first axis, starting positive.
      for (int t = 0; t < T; ++t) {
        std::vector<double> g(static_cast<std::size_t>(d), 0.0);
        g[0] = (t % 2 == 0 ? G : -G);
        seq.losses.emplace_back(LinearLoss{std::move(g)});
      }
      break;
    }
    case AdversaryKind::shifting_minimizer: {
      // Absolute deviation toward a target that jumps every block.
      const int block = std::max(1, T / 8);
      std::vector<double> u = random_direction(d, rng);
      double b = 0.0;
      for (int t = 0; t < T; ++t) {
        if (t % block == 0) {
          Point z = random_point(body, rng);
          b = dot(u, z);
        }
        seq.losses.emplace_back(AbsDeviationLoss{u, b, G});
      }
      break;
    }
    case AdversaryKind::iid_random_linear: {
      // Uniform in the G-ball: direction times G * U^{1/d}.
      for (int t = 0; t < T; ++t) {
        std::vector<double> g = random_direction(d, rng);
        double r = G * std::pow(rng.uniform(), 1.0 / d);
        for (auto& x : g) x *= r;
        seq.losses.emplace_back(LinearLoss{std::move(g)});
      }
      break;
    }
  }
  // the declared class bound; every generated loss satisfies G_l <= G
  seq.lipschitz = G;
  return seq;
}

LossSequence make_neighbor(const LossSequence& seq, int t0,
                           LossFunction replacement) {
  require(t0 >= 1 && t0 <= seq.horizon(), "make_neighbor: index out of range");
  require(replacement.lipschitz() <= seq.lipschitz * (1.0 + 1e-12),
          "make_neighbor: replacement exceeds the sequence Lipschitz bound");
  require(replacement.dimension() == seq.losses.front().dimension(),
          "make_neighbor: dimension mismatch");
  LossSequence out = seq;
  out.losses[static_cast<std::size_t>(t0 - 1)] = std::move(replacement);
  return out;
}

}  // namespace pocmw
