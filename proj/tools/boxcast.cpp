// Command-line front end: check, elr, steering, verify, fixtures.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "boxcast/assemblage.hpp"
#include "boxcast/divergence.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/io.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/verify.hpp"

using namespace boxcast;
using io::Json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInputError = 2, kNumericError = 3 };

struct Common {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> iters;
  std::string format = "json";
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--tol", c.tol, "tolerance (command default when omitted)");
  app->add_option("--iters", c.iters, "iteration budget (command default when omitted)")->check(CLI::PositiveNumber);
  app->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app->add_option("--out", c.out, "write the report here instead of stdout");
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void render_text(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << " = " << j.dump() << "\n";
  }
}

void emit(const Common& c, const Json& report, double seconds) {
  std::ostringstream os;
  if (c.format == "text") {
    render_text(report, "", os);
    os << "wall_time_s = " << seconds << "\n";
  } else {
    os << io::dump(report);
    std::cerr << "wall time " << seconds << " s\n";
  }
  if (c.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error("cannot write " + c.out);
    f << os.str();
  }
}

Json run_report(const std::string& command, const std::string& digest, std::uint64_t seed, Json results) {
  return {{"command", command}, {"inputs_digest", digest}, {"seed", seed}, {"results", std::move(results)}};
}

const VertexCatalogue& elr_catalogue(const Scenario& sc) {
  static const VertexCatalogue local2 = local_deterministic_vertices(Scenario::bipartite());
  static const VertexCatalogue lrns = lrns_broadcast_222();
  if (sc == local2.scenario) return local2;
  if (sc == lrns.scenario) return lrns;
  throw DimensionError("E_LR is available for the (2,2,2) bipartite and broadcast scenarios");
}

int cmd_check(const Common& c, const std::string& path, const std::string& kind) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string bytes = read_bytes(path);
  const Json in = io::parse(bytes);
  Json res = {{"kind", kind}};
  bool inside = false;
  bool undecided = false;
  if (kind == "ns" || kind == "local" || kind == "lrns") {
    const Behavior b = io::behavior_from_json(in);
    if (kind == "ns") {
      NsReport r = is_nonsignalling(b);
      inside = r.ok;
      if (b.scenario().is_broadcast_shape()) {
        const int pair0[2] = {0, 2};
        NsReport p = is_nonsignalling(b, pair0);
        inside = inside && p.ok;
        res["pair_max_violation"] = p.max_violation;
      }
      res["max_violation"] = r.max_violation;
    } else {
      const double tol = c.tol.value_or(1e-9);
      std::optional<VertexCatalogue> own;
      const VertexCatalogue* cat;
      if (kind == "lrns") {
        if (!b.scenario().is_broadcast_shape()) throw DimensionError("lrns needs a broadcast-shaped box");
        cat = &elr_catalogue(b.scenario());
      } else {
        own = local_deterministic_vertices(b.scenario());
        cat = &*own;
      }
      MembershipResult r = membership(b, *cat, tol);
      inside = r.inside;
      res["catalogue"] = to_string(cat->kind);
      res["vertices"] = cat->size();
      res["membership"] = io::to_json(r);
    }
  } else {
    const Assemblage a = io::assemblage_from_json(in);
    FeasibilityConfig fc;
    if (c.tol) fc.tol = *c.tol;
    if (c.iters) fc.max_iterations = *c.iters;
    FeasibilityResult r = kind == "urns" ? is_urns(a, fc) : is_unsteerable(a, fc);
    inside = r.status == FeasibilityStatus::model_found;
    undecided = !inside && !r.steerable();
    res["feasibility"] = io::to_json(r);
  }
  res["classification"] = inside ? "inside" : (undecided ? "undecided" : "outside");
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(c, run_report("check", io::digest(bytes), c.seed, res), s);
  return inside ? kOk : (undecided ? kNumericError : kNegative);
}

int cmd_elr(const Common& c, const std::string& path, const std::string& witness) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string bytes = read_bytes(path);
  const Behavior b = io::behavior_from_json(io::parse(bytes));
  ElrConfig cfg;
  if (c.iters) cfg.iters = *c.iters;
  if (c.seed != 0) {
    cfg.seed = c.seed;
    cfg.random_init = true;
  }
  const VertexCatalogue& cat = elr_catalogue(b.scenario());
  int code = kOk;
  Json res;
  try {
    ElrResult r = relative_entropy_nl(b, cat, cfg);
    res = io::to_json(r);
    if (!witness.empty()) io::write_file(witness, io::to_json(r.witness));
  } catch (const OptimizationError& e) {
    res = io::to_json(e.last_iterate());
    res["error"] = e.what();
    code = kNumericError;
  }
  res["catalogue"] = to_string(cat.kind);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(c, run_report("elr", io::digest(bytes), c.seed, res), s);
  return code;
}

int cmd_steering(const Common& c, const std::string& path, const std::string& witness) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string bytes = read_bytes(path);
  const Assemblage a = io::assemblage_from_json(io::parse(bytes));
  SteeringEntropyConfig cfg;
  cfg.seed = c.seed;
  if (c.iters) cfg.iterations = *c.iters;
  SteeringEntropyResult r = relative_entropy_steering_ub(a, cfg);
  if (!witness.empty()) io::write_file(witness, io::to_json(r.witness_assemblage));
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(c, run_report("steering", io::digest(bytes), c.seed, io::to_json(r)), s);
  return kOk;
}

int cmd_verify(const Common& c, const std::string& scope, const std::string& fault, double scale) {
  VerifyConfig cfg;
  cfg.seed = c.seed;
  cfg.scope = parse_scope(scope);
  cfg.fault = parse_fault(fault);
  cfg.instance_scale = scale;
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep = run_verify_suite(cfg);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream key;
  key << "scope=" << scope << ";fault=" << fault << ";scale=" << scale;
  Json report = run_report("verify", io::digest(key.str()), c.seed, io::to_json(rep));
  report["suite"] = {{"passed", rep.passed()}, {"failed", rep.failed()}};
  for (const CheckResult& r : rep.checks)
    std::cerr << (r.passed ? "pass " : "FAIL ") << r.name << " (" << r.seconds << " s)\n";
  emit(c, report, s);
  return rep.theorem_failure() ? kNegative : kOk;
}

int cmd_fixtures(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const Json& j) { io::write_file((fs::path(dir) / name).string(), j); };
  put("pr_box.json", io::to_json(pr_box()));
  put("pr_pr.json", io::to_json(product(pr_box(), pr_box())));
  put("uniform_box.json", io::to_json(uniform_box(Scenario::bipartite())));
  const std::vector<int> resp[2] = {{0, 1}, {1, 1}};
  put("local_box.json", io::to_json(deterministic_box(Scenario::bipartite(), resp)));
  put("lrns_vertices.json", io::to_json(lrns_broadcast_222()));
  put("local_vertices_222.json", io::to_json(local_deterministic_vertices(Scenario::bipartite())));
  for (const char* v : {"0.3", "0.5", "0.8", "0.9", "1.0"})
    put(std::string("werner_") + v + ".json", io::to_json(werner_assemblage(std::stod(v))));
  const Assemblage w9 = werner_assemblage(0.9);
  put("werner_0.9_broadcast.json", io::to_json(product_assemblage(w9, w9)));
  std::ofstream(fs::path(dir) / "malformed.json") << "{\"scenario\": {\"wings\": [[2,2],[2,2]]";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boxes, assemblages and their broadcasting"};
  app.require_subcommand(1);

  Common common;
  std::string path, kind, witness, scope = "all", fault = "none", dir = "fixtures";
  double scale = 1.0;

  CLI::App* check = app.add_subcommand("check", "classify a behavior or assemblage");
  check->add_option("path", path, "input JSON")->required();
  check->add_option("--kind", kind, "ns|local|lrns|unsteerable|urns")
      ->required()
      ->check(CLI::IsMember({"ns", "local", "lrns", "unsteerable", "urns"}));
  add_common(check, common);

  CLI::App* elr = app.add_subcommand("elr", "relative entropy of nonlocality");
  elr->add_option("path", path, "behavior JSON")->required();
  elr->add_option("--witness", witness, "write the witness behavior here");
  add_common(elr, common);

  CLI::App* steer = app.add_subcommand("steering", "relative entropy of steering bounds");
  steer->add_option("path", path, "assemblage JSON")->required();
  steer->add_option("--witness", witness, "write the witness assemblage here");
  add_common(steer, common);

  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--scope", scope, "boxes|assemblages|all")->check(CLI::IsMember({"boxes", "assemblages", "all"}));
  verify->add_option("--inject-fault", fault, "none|chain-rule")->check(CLI::IsMember({"none", "chain-rule"}));
  verify->add_option("--scale", scale, "instance-count multiplier")->check(CLI::PositiveNumber);
  add_common(verify, common);

  CLI::App* fixtures = app.add_subcommand("fixtures", "write the fixture files");
  fixtures->add_option("--dir", dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*check) return cmd_check(common, path, kind);
    if (*elr) return cmd_elr(common, path, witness);
    if (*steer) return cmd_steering(common, path, witness);
    if (*verify) {
      if (verify->count("--seed") == 0) common.seed = 1;
      return cmd_verify(common, scope, fault, scale);
    }
    return cmd_fixtures(dir);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const SignallingError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CapacityError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericError;
  }
}
