#pragma once

#include <span>
#include <vector>

namespace pocmw {

double logsumexp(std::span<const double> v);

// exp(v_i - logsumexp(v)) for every i.
std::vector<double> normalize_log_weights(std::span<const double> v);

// 0.5 * sum |p_i - q_i|
double tv_distance(std::span<const double> p, std::span<const double> q);

// sum p_i log(p_i / q_i); requires q_i > 0 wherever p_i > 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

double expectation(std::span<const double> p, std::span<const double> f);

bool is_distribution(std::span<const double> p, double tol = 1e-9);

}  // namespace pocmw
