#pragma once

#include <string>

#include <json.hpp>

#include "sofic/decomp.hpp"
#include "sofic/relopt.hpp"
#include "sofic/thermo.hpp"

namespace sofic {

using json = nlohmann::json;

// Presentations: {"alphabet": [...], "states": [...], "edges": [[src, dst,
// label-index], ...], "kind": "...", "right_resolving": bool?}. Edge
// endpoints may be state names or indices.
json to_json(const Presentation& p);
Presentation presentation_from_json(const json& j);

// Codes: {"memory", "anticipation", "codomain", "table": {word: index},
// "domain": embedded presentation}
json to_json(const SlidingBlockCode& c);
SlidingBlockCode code_from_json(const json& j, const AnalysisConfig& cfg = {});

// Triples: {"x": ..., "pi": ..., "y": ...}; "x"/"y" may be omitted when the
// code embeds its domain ("y" then defaults to the determinized image).
json to_json(const FactorTriple& t);
FactorTriple triple_from_json(const json& j, const AnalysisConfig& cfg = {});

json to_json(const AnalysisConfig& cfg);
AnalysisConfig config_from_json(const json& j);

// Potentials: {"window", "table": {word: value}}; words use display strings.
json to_json(const Potential& phi, const Alphabet& a);
Potential potential_from_json(const json& j, const Alphabet& a);

// Measures: {"order", "contexts": [word], "transitions": [{symbol: p}],
// "stationary": [..]}; call validate_measure against the intended shift.
json to_json(const MarkovMeasure& mu, const Alphabet& a);
MarkovMeasure measure_from_json(const json& j, const Alphabet& a);

// analysis reports; alphabets supply the word formatting
json to_json(const DegreeReport& r, const Alphabet& domain, const Alphabet& image);
json to_json(const TransitionBlock& tb, const Alphabet& domain, const Alphabet& image,
             bool certified);
json to_json(const ClassDegreeReport& r, const Alphabet& domain, const Alphabet& image);
json to_json(const DecompositionReport& r, const Decomposition& d);
json to_json(const PressureValue& v, const Alphabet& a);
json to_json(const TuncelLift& l, const Alphabet& domain);
json to_json(const EntropyBounds& b);
json to_json(const WordDistribution& d, const Alphabet& a);
json to_json(const SolveReport& r, const Alphabet& a);
json to_json(const SupportReport& s, const Alphabet& a);
json to_json(const CrosscheckReport& c, const Alphabet& domain, const Alphabet& intermediate);

// shared report skeleton: tool name, version, command, config
json report_envelope(const std::string& command, const AnalysisConfig& cfg);

// canonical text form: sorted keys, two-space indent, trailing newline
std::string dump_report(const json& j);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace sofic
