#pragma once

#include <cstdio>

namespace pocmw {

struct VerifyResult {
  bool variational = false;
  bool log_partition_derivative = false;
  bool log_partition_convexity = false;
  bool tv_expectation = false;
  bool ftl_btl = false;

  bool all() const {
    return variational && log_partition_derivative && log_partition_convexity &&
           tv_expectation && ftl_btl;
  }
};

// Randomized identity checks for the supporting lemmas: the discrete Gibbs
// variational principle, the log-partition derivative and convexity, the
// TV-expectation inequality, and the be-the-leader inequality.
VerifyResult verify_suites(bool quick);

// Runs the suites and prints one pass/fail line each to `out`.
bool run_verify_suites(std::FILE* out, bool quick);

}  // namespace pocmw
