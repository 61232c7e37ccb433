#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geps {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int samples = 1000;
  /// Swap a deliberately broken structure into the extended-bracket identity
  /// check, to exercise the failure path end to end.
  bool inject_corrupted_cocycle = false;
};

/// Structural invariant suite over the algebra, extension, bracket, constraint
/// and model layers.  Pure point evaluations; no trajectory integration.
std::vector<CheckResult> run_verification_suite(const VerifyOptions& options);

}  // namespace geps
