#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valuegap/random.hpp"

namespace valuegap {

enum class VerifySuite { Equivalences, Asymptotics, Oracles, All };

std::optional<VerifySuite> parse_verify_suite(std::string_view name);

struct CheckResult {
  std::string name;
  bool passed = false;
  double discrepancy = 0.0;  // measured value compared against the tolerance
  double tolerance = 0.0;
  std::string detail;
};

// User-facing property checks. Deterministic for a fixed seed.
std::vector<CheckResult> run_verify(VerifySuite suite, RngSeed seed);

}  // namespace valuegap
