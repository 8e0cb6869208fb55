#pragma once

#include <json.hpp>
#include <string>

#include "boxcast/assemblage.hpp"
#include "boxcast/behavior.hpp"
#include "boxcast/divergence.hpp"
#include "boxcast/losr.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/quantum.hpp"
#include "boxcast/verify.hpp"

namespace boxcast::io {

// Keys keep insertion order so dumps are reproducible.
using Json = nlohmann::ordered_json;

// Every reader throws ParseError on schema violations; type invariants are
// then checked by the constructors (ValidationError, SignallingError...).

Json to_json(const Scenario& sc);
Scenario scenario_from_json(const Json& j);

// { "scenario": {...}, "table": nested [x...][y...][a...][b...] }
Json to_json(const Behavior& b);
Behavior behavior_from_json(const Json& j);

Json to_json(const VertexCatalogue& cat);   // array of behaviors
VertexCatalogue catalogue_from_json(const Json& j);

Json to_json(const Conditional& c);
Conditional conditional_from_json(const Json& j);
Json to_json(const LosrMap& m);
LosrMap losr_from_json(const Json& j);

// { "dim": d, "re": [[...]], "im": [[...]] }
Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// { "r", "s", "dim", "elements": { "x,a": matrix } }, plus "factors" for
// broadcast-shaped assemblages.
Json to_json(const Assemblage& a);
Assemblage assemblage_from_json(const Json& j);

Json to_json(const ElrResult& r);
Json to_json(const MembershipResult& r);
Json to_json(const FeasibilityResult& r);
Json to_json(const SteeringEntropyResult& r);
// Wall times are left out so equal seeds give equal bytes.
Json to_json(const SuiteReport& r);

// Doubles are written in shortest round-trip form.
std::string dump(const Json& j, int indent = 2);
Json parse(const std::string& text);
Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& j);

// FNV-1a over the raw bytes, hex.
std::string digest(const std::string& bytes);

}  // namespace boxcast::io
