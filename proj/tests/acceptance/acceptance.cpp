// One PASS/FAIL line per acceptance criterion. Criteria 1-9 come from a
// full verification run; 10 repeats the run and compares the JSON bytes.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "boxcast/io.hpp"
#include "boxcast/verify.hpp"

using namespace boxcast;

namespace {

struct Criterion {
  int id;
  const char* title;
  double budget_s;
};

const Criterion kCriteria[] = {
    {1, "chain rule on 500 NS pairs, 1e-10", 10},
    {2, "box KL contractivity on 200 triples, 1e-9", 30},
    {3, "E_LR monotone under 50 LR_ns-LOSR maps, 2e-3", 600},
    {4, "E_LR(PR x PR) - E_LR(PR) > 2e-3, optimizers within 1e-3", 600},
    {5, "conditional boxes local / nonlocal with positive weight", 300},
    {6, "S_Q monotone under 200 channels; measured inequality on 100 instances, 1e-8", 120},
    {7, "Werner classification at 0.3 / 0.9 and the 1/sqrt2 scan", 300},
    {8, "CQ-state lemmas on 100 instances each", 300},
    {9, "E_A contractivity on 30 maps; broadcast raises E_A", 900},
};

}  // namespace

int main(int argc, char** argv) {
  VerifyConfig cfg;
  if (argc > 1) cfg.seed = std::strtoull(argv[1], nullptr, 10);

  const SuiteReport first = run_verify_suite(cfg);
  bool all = true;
  for (const Criterion& k : kCriteria) {
    bool ok = true;
    double seconds = 0.0;
    std::string detail;
    int found = 0;
    for (const CheckResult& c : first.checks) {
      if (c.criterion != k.id) continue;
      ++found;
      ok = ok && c.passed;
      seconds += c.seconds;
      char buf[256];
      std::snprintf(buf, sizeof buf, " [%s %s worst=%.3g limit=%.3g n=%d]", c.name.c_str(), c.passed ? "ok" : "failed",
                    c.worst, c.limit, c.instances);
      detail += buf;
      if (!c.note.empty() && !c.passed) detail += " (" + c.note + ")";
    }
    const bool in_time = seconds < k.budget_s;
    ok = ok && found > 0 && in_time;
    all = all && ok;
    std::printf("criterion %2d: %s  %s  %.1fs/%.0fs%s%s\n", k.id, ok ? "PASS" : "FAIL", k.title, seconds, k.budget_s,
                in_time ? "" : " over budget", detail.c_str());
  }

  const std::string a = io::dump(io::to_json(first));
  const std::string b = io::dump(io::to_json(run_verify_suite(cfg)));
  const bool same = a == b;
  all = all && same;
  std::printf("criterion 10: %s  repeated verify run gives byte-identical JSON (%zu bytes, digest %s)\n",
              same ? "PASS" : "FAIL", a.size(), io::digest(a).c_str());

  int module_failures = 0;
  for (const CheckResult& c : first.checks)
    if (c.criterion == 0 && !c.passed) {
      ++module_failures;
      std::printf("invariant %s failed: worst=%.3g limit=%.3g %s\n", c.name.c_str(), c.worst, c.limit, c.note.c_str());
    }
  std::printf("module invariants: %d checked, %d failed\n",
              static_cast<int>(std::count_if(first.checks.begin(), first.checks.end(),
                                             [](const CheckResult& c) { return c.criterion == 0; })),
              module_failures);
  return all && module_failures == 0 ? 0 : 1;
}
