#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace boxcast {

enum class VerifyScope { boxes, assemblages, all };
enum class InjectedFault { none, chain_rule };

VerifyScope parse_scope(const std::string& s);
std::string to_string(VerifyScope s);
InjectedFault parse_fault(const std::string& s);

struct VerifyConfig {
  std::uint64_t seed = 1;
  VerifyScope scope = VerifyScope::all;
  InjectedFault fault = InjectedFault::none;
  // Scales every instance count (acceptance runs use 1).
  double instance_scale = 1.0;
};

struct CheckResult {
  std::string name;
  int criterion = 0;         // 0 for module invariants outside the numbered list
  bool theorem = true;       // failure contradicts a proven statement
  bool passed = false;
  int instances = 0;
  double worst = 0.0;        // worst observed value of the checked quantity
  double limit = 0.0;        // what `worst` is compared against
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;
  double seconds = 0.0;      // wall time; kept out of serialised reports
};

struct SuiteReport {
  std::uint64_t seed = 0;
  VerifyScope scope = VerifyScope::all;
  std::vector<CheckResult> checks;

  int passed() const;
  int failed() const;
  bool theorem_failure() const;
};

SuiteReport run_verify_suite(const VerifyConfig& cfg = {});

}  // namespace boxcast
