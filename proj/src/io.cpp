#include "boxcast/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "boxcast/errors.hpp"

namespace boxcast::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

double number(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw ParseError("expected a number");
}

std::vector<double> numbers(const Json& v) {
  if (!v.is_array()) throw ParseError("expected an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) out.push_back(number(x));
  return out;
}

// JSON has no infinities; they travel as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json nest(const std::vector<double>& flat, const std::vector<int>& dims, std::size_t level, std::size_t& pos) {
  Json arr = Json::array();
  for (int i = 0; i < dims[level]; ++i) {
    if (level + 1 == dims.size())
      arr.push_back(flat[pos++]);
    else
      arr.push_back(nest(flat, dims, level + 1, pos));
  }
  return arr;
}

void flatten(const Json& j, const std::vector<int>& dims, std::size_t level, std::vector<double>& out) {
  if (!j.is_array() || static_cast<int>(j.size()) != dims[level]) throw ParseError("table shape does not match scenario");
  for (const Json& x : j) {
    if (level + 1 == dims.size())
      out.push_back(number(x));
    else
      flatten(x, dims, level + 1, out);
  }
}

std::vector<int> table_dims(const Scenario& sc) {
  std::vector<int> dims;
  for (const Site& s : sc.sites()) dims.push_back(s.inputs);
  for (const Site& s : sc.sites()) dims.push_back(s.outputs);
  return dims;
}

Json sparse_weights(const std::vector<double>& w) {
  Json out = Json::array();
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] > 0.0) out.push_back({{"index", k}, {"weight", w[k]}});
  return out;
}

Json model_json(const LhsModel& m) {
  Json states = Json::array();
  for (std::size_t l = 0; l < m.states.size(); ++l)
    states.push_back({{"strategy", m.strategies[l]}, {"state", to_json(m.states[l])}});
  return {{"residual", m.residual}, {"terms", states}};
}

}  // namespace

Json to_json(const Scenario& sc) {
  Json wings = Json::array();
  for (const Site& s : sc.sites()) wings.push_back({s.inputs, s.outputs});
  return {{"wings", wings}, {"grouping", sc.grouping()}};
}

Scenario scenario_from_json(const Json& j) {
  std::vector<Site> sites;
  const Json& w = field(j, "wings");
  if (!w.is_array()) throw ParseError("\"wings\" must be an array");
  for (const Json& s : w) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ParseError("each site is [inputs, outputs]");
    sites.push_back({s[0].get<int>(), s[1].get<int>()});
  }
  const Json& g = field(j, "grouping");
  std::vector<std::vector<int>> grouping;
  try {
    grouping = g.get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("\"grouping\" must be a list of integer lists");
  }
  return Scenario(std::move(sites), std::move(grouping));
}

Json to_json(const Behavior& b) {
  std::size_t pos = 0;
  return {{"scenario", to_json(b.scenario())}, {"table", nest(b.table(), table_dims(b.scenario()), 0, pos)}};
}

Behavior behavior_from_json(const Json& j) {
  Scenario sc = scenario_from_json(field(j, "scenario"));
  std::vector<double> flat;
  flatten(field(j, "table"), table_dims(sc), 0, flat);
  return Behavior(std::move(sc), std::move(flat));
}

Json to_json(const VertexCatalogue& cat) {
  Json arr = Json::array();
  for (const Behavior& v : cat.vertices) arr.push_back(to_json(v));
  return arr;
}

VertexCatalogue catalogue_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("catalogue must be a non-empty array of behaviors");
  std::vector<Behavior> v;
  for (const Json& b : j) v.push_back(behavior_from_json(b));
  Scenario sc = v.front().scenario();
  for (const Behavior& b : v)
    if (!(b.scenario() == sc)) throw ParseError("catalogue vertices must share one scenario");
  return VertexCatalogue{std::move(sc), std::move(v), CatalogueKind::custom};
}

Json to_json(const Conditional& c) { return {{"rows", c.rows()}, {"cols", c.cols()}, {"p", c.data()}}; }

Conditional conditional_from_json(const Json& j) {
  return Conditional(int_field(j, "rows"), int_field(j, "cols"), numbers(field(j, "p")));
}

Json to_json(const LosrMap& m) {
  Json alice = Json::array(), bob = Json::array();
  for (int l = 0; l < m.num_lambda(); ++l) {
    alice.push_back({{"pre", to_json(m.alice(l).pre)}, {"post", to_json(m.alice(l).post)}});
    bob.push_back({{"pre", to_json(m.bob(l).pre)}, {"post", to_json(m.bob(l).post)}});
  }
  return {{"input", to_json(m.input())},
          {"output", to_json(m.output())},
          {"lambda_weights", m.lambda_weights()},
          {"alice", alice},
          {"bob", bob}};
}

LosrMap losr_from_json(const Json& j) {
  auto wings = [](const Json& arr) {
    if (!arr.is_array()) throw ParseError("wing processing must be an array");
    std::vector<WingProcessing> out;
    for (const Json& w : arr) out.push_back({conditional_from_json(field(w, "pre")), conditional_from_json(field(w, "post"))});
    return out;
  };
  return LosrMap(scenario_from_json(field(j, "input")), scenario_from_json(field(j, "output")),
                 numbers(field(j, "lambda_weights")), wings(field(j, "alice")), wings(field(j, "bob")));
}

Json to_json(const CMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (int k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j) {
  const int d = int_field(j, "dim");
  if (d <= 0) throw ParseError("matrix dim must be positive");
  const Json &re = field(j, "re"), &im = field(j, "im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
    throw ParseError("matrix rows do not match dim");
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const std::vector<double> r = numbers(re[i]), c = numbers(im[i]);
    if (static_cast<int>(r.size()) != d || static_cast<int>(c.size()) != d) throw ParseError("matrix columns do not match dim");
    for (int k = 0; k < d; ++k) m(i, k) = cplx(r[k], c[k]);
  }
  return m;
}

Json to_json(const Assemblage& a) {
  Json el = Json::object();
  for (int x = 0; x < a.inputs(); ++x)
    for (int b = 0; b < a.outputs(); ++b) el[std::to_string(x) + "," + std::to_string(b)] = to_json(a(b, x));
  Json j = {{"r", a.inputs()}, {"s", a.outputs()}, {"dim", a.dim()}, {"elements", el}};
  if (a.factors()) {
    const AssemblageFactors& f = *a.factors();
    j["factors"] = {{"inputs", {f.r0, f.r1}}, {"outputs", {f.s0, f.s1}}, {"dims", {f.d0, f.d1}}};
  }
  return j;
}

Assemblage assemblage_from_json(const Json& j) {
  const int r = int_field(j, "r"), s = int_field(j, "s"), d = int_field(j, "dim");
  if (r <= 0 || s <= 0 || d <= 0) throw ParseError("assemblage shape must be positive");
  const Json& el = field(j, "elements");
  if (!el.is_object() || static_cast<int>(el.size()) != r * s) throw ParseError("assemblage needs r*s elements");
  std::vector<CMatrix> m;
  for (int x = 0; x < r; ++x)
    for (int b = 0; b < s; ++b) {
      const std::string key = std::to_string(x) + "," + std::to_string(b);
      if (!el.contains(key)) throw ParseError("missing assemblage element \"" + key + "\"");
      CMatrix e = matrix_from_json(el.at(key));
      if (e.rows() != d) throw ParseError("element dim does not match \"dim\"");
      m.push_back(std::move(e));
    }
  std::optional<AssemblageFactors> f;
  if (j.contains("factors")) {
    const Json& fj = j.at("factors");
    auto pair = [&](const char* k) {
      const Json& v = field(fj, k);
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ParseError(std::string("factor \"") + k + "\" must be two integers");
      return std::pair<int, int>{v[0].get<int>(), v[1].get<int>()};
    };
    const auto [r0, r1] = pair("inputs");
    const auto [s0, s1] = pair("outputs");
    const auto [d0, d1] = pair("dims");
    f = AssemblageFactors{r0, r1, s0, s1, d0, d1};
  }
  return Assemblage(r, s, std::move(m), f);
}

Json to_json(const ElrResult& r) {
  Json ladder = Json::array();
  for (const LadderEntry& e : r.ladder)
    ladder.push_back({{"eps", e.eps}, {"upper", num(e.upper)}, {"lower", num(e.lower)}, {"iterations", e.iterations}});
  return {{"value", num(r.value)},
          {"upper_bound", num(r.upper_bound)},
          {"lower_bound", num(r.lower_bound)},
          {"tolerance", num(r.tolerance)},
          {"setting", r.witness.scenario().setting_digits(r.argmax_setting)},
          {"witness_weights", sparse_weights(r.weights)},
          {"witness", to_json(r.witness)},
          {"ladder", ladder},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

Json to_json(const MembershipResult& r) {
  Json j = {{"inside", r.inside}, {"residual", r.residual}, {"visibility", r.visibility}, {"lp_iterations", r.lp_iterations}};
  if (r.inside) {
    j["weights"] = sparse_weights(r.weights);
  } else {
    j["margin"] = r.margin;
    j["functional"] = {{"coefficients", r.functional.coefficients}, {"threshold", r.functional.threshold}};
  }
  return j;
}

Json to_json(const FeasibilityResult& r) {
  Json j = {{"status", r.status == FeasibilityStatus::model_found ? "model-found" : "no-model-within-budget"},
            {"steerable", r.steerable()},
            {"residual", r.residual},
            {"iterations", r.iterations}};
  if (r.model) j["model"] = model_json(*r.model);
  if (r.functional) {
    Json coeff = Json::array();
    for (const CMatrix& c : r.functional->coefficients) coeff.push_back(to_json(c));
    j["functional"] = {{"value", r.functional->value},
                       {"bound", r.functional->bound},
                       {"violated", r.functional->violated},
                       {"coefficients", coeff}};
  }
  return j;
}

Json to_json(const SteeringEntropyResult& r) {
  return {{"upper_bound", num(r.upper_bound)},
          {"lower_bound", num(r.lower_bound)},
          {"iterations", r.iterations},
          {"witness", model_json(r.witness)},
          {"witness_assemblage", to_json(r.witness_assemblage)}};
}

Json to_json(const SuiteReport& r) {
  Json checks = Json::array();
  for (const CheckResult& c : r.checks) {
    Json m = Json::object();
    for (const auto& [k, v] : c.metrics) m[k] = num(v);
    Json j = {{"name", c.name},         {"criterion", c.criterion}, {"theorem", c.theorem},
              {"passed", c.passed},     {"instances", c.instances}, {"worst", num(c.worst)},
              {"limit", num(c.limit)},  {"metrics", m}};
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(j);
  }
  return {{"seed", r.seed},
          {"scope", to_string(r.scope)},
          {"passed", r.passed()},
          {"failed", r.failed()},
          {"checks", checks}};
}

std::string dump(const Json& j, int indent) { return j.dump(indent) + "\n"; }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << dump(j);
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace boxcast::io
