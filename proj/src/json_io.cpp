#include "sofic/json_io.hpp"

#include <algorithm>
#include <fstream>

#include "sofic/version.hpp"

namespace sofic {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::empty_shift: return "EmptyShift";
    case Errc::not_irreducible: return "NotIrreducible";
    case Errc::resource_limit: return "ResourceLimit";
    case Errc::word_too_short: return "WordTooShort";
    case Errc::not_in_language: return "NotInLanguage";
    case Errc::alphabet_mismatch: return "AlphabetMismatch";
    case Errc::not_finite_to_one: return "NotFiniteToOne";
    case Errc::bad_position: return "BadPosition";
    case Errc::not_a_preimage: return "NotAPreimage";
    case Errc::not_minimal: return "NotMinimal";
    case Errc::stabilization_inconclusive: return "StabilizationInconclusive";
    case Errc::window_mismatch: return "WindowMismatch";
    case Errc::infeasible: return "Infeasible";
    case Errc::solver_stalled: return "SolverStalled";
    case Errc::parse_error: return "ParseError";
    case Errc::numeric: return "Numeric";
  }
  return "Unknown";
}

json to_json(const Presentation& p) {
  json j;
  j["alphabet"] = p.alphabet().display;
  j["states"] = p.state_names();
  json edges = json::array();
  for (const auto& e : p.edges())
    edges.push_back(json::array({p.state_names()[e.src], p.state_names()[e.dst], e.label}));
  j["edges"] = std::move(edges);
  j["kind"] = kind_name(p.kind());
  if (p.right_resolving()) j["right_resolving"] = true;
  return j;
}

namespace {

StateId parse_state(const json& v, const std::vector<std::string>& names, const char* what) {
  if (v.is_string()) {
    auto it = std::find(names.begin(), names.end(), v.get<std::string>());
    require(it != names.end(), Errc::parse_error,
            std::string("unknown ") + what + " state '" + v.get<std::string>() + "'");
    return static_cast<StateId>(it - names.begin());
  }
  require(v.is_number_unsigned(), Errc::parse_error,
          std::string(what) + " state must be a name or an index");
  auto i = v.get<std::size_t>();
  require(i < names.size(), Errc::parse_error,
          std::string(what) + " state index " + std::to_string(i) + " out of range");
  return static_cast<StateId>(i);
}

}  // namespace

Presentation presentation_from_json(const json& j) {
  try {
    require(j.is_object(), Errc::parse_error, "presentation must be a JSON object");
    require(j.contains("alphabet") && j.contains("states") && j.contains("edges") &&
                j.contains("kind"),
            Errc::parse_error, "presentation needs alphabet, states, edges, kind");
    Alphabet a{j.at("alphabet").get<std::vector<std::string>>()};
    auto names = j.at("states").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& rec : j.at("edges")) {
      require(rec.is_array() && rec.size() == 3, Errc::parse_error,
              "edge record must be [src, dst, label-index], got " + rec.dump());
      require(rec[2].is_number_unsigned(), Errc::parse_error,
              "edge label must be a symbol index, got " + rec.dump());
      auto label = rec[2].get<std::size_t>();
      require(label < a.size(), Errc::parse_error,
              "edge label index out of range in " + rec.dump());
      edges.push_back({parse_state(rec[0], names, "source"), parse_state(rec[1], names, "target"),
                       static_cast<SymbolId>(label)});
    }
    Kind kind = kind_from_name(j.at("kind").get<std::string>());
    bool rr = j.value("right_resolving", false);
    return Presentation(a, names, edges, kind, rr);
  } catch (const json::exception& e) {
    raise(Errc::parse_error, std::string("bad presentation: ") + e.what());
  }
}

json to_json(const SlidingBlockCode& c) {
  json j;
  j["memory"] = c.memory();
  j["anticipation"] = c.anticipation();
  j["codomain"] = c.codomain().display;
  json table = json::object();
  for (const auto& [w, v] : c.table()) table[c.domain().alphabet().format(w)] = v;
  j["table"] = std::move(table);
  j["domain"] = to_json(c.domain());
  return j;
}

SlidingBlockCode code_from_json(const json& j, const AnalysisConfig& cfg) {
  try {
    require(j.is_object() && j.contains("table") && j.contains("domain") &&
                j.contains("codomain"),
            Errc::parse_error, "code needs domain, codomain, table");
    Presentation domain = presentation_from_json(j.at("domain"));
    Alphabet codomain{j.at("codomain").get<std::vector<std::string>>()};
    int m = j.value("memory", 0);
    int a = j.value("anticipation", 0);
    std::map<Word, SymbolId> table;
    for (const auto& [key, val] : j.at("table").items()) {
      require(val.is_number_unsigned(), Errc::parse_error,
              "table value for '" + key + "' must be a symbol index");
      auto v = val.get<std::size_t>();
      require(v < codomain.size(), Errc::parse_error,
              "table value out of codomain range for '" + key + "'");
      table[domain.alphabet().parse_word(key)] = static_cast<SymbolId>(v);
    }
    return SlidingBlockCode(std::move(domain), std::move(codomain), m, a, std::move(table), cfg);
  } catch (const json::exception& e) {
    raise(Errc::parse_error, std::string("bad code: ") + e.what());
  }
}

json to_json(const FactorTriple& t) {
  json j;
  j["x"] = to_json(t.x);
  j["pi"] = to_json(t.pi);
  j["y"] = to_json(t.y);
  return j;
}

FactorTriple triple_from_json(const json& j, const AnalysisConfig& cfg) {
  require(j.is_object() && j.contains("pi"), Errc::parse_error, "triple needs a pi code");
  SlidingBlockCode pi = code_from_json(j.at("pi"), cfg);
  Presentation x = j.contains("x") ? presentation_from_json(j.at("x")) : pi.domain();
  if (j.contains("x"))
    require(x == pi.domain(), Errc::parse_error, "triple x differs from the code's domain");
  if (j.contains("y")) return {std::move(x), std::move(pi), presentation_from_json(j.at("y"))};
  NormalizedTriple nt = normalize({x, pi, x}, cfg);
  Presentation y = image_presentation(nt.triple.x, nt.triple.pi, cfg);
  return {std::move(x), std::move(pi), std::move(y)};
}

json to_json(const AnalysisConfig& cfg) {
  json j;
  j["word_cap"] = cfg.word_cap;
  j["state_cap"] = cfg.state_cap;
  j["length_cap"] = cfg.length_cap;
  j["trace_cap"] = cfg.trace_cap;
  j["plateau"] = cfg.plateau;
  j["power_iter_cap"] = cfg.power_iter_cap;
  j["power_tol"] = cfg.power_tol;
  j["tol_pressure"] = cfg.tol_pressure;
  j["tol_measure"] = cfg.tol_measure;
  j["tol_push"] = cfg.tol_push;
  j["tol_residual"] = cfg.tol_residual;
  j["tol_seeds"] = cfg.tol_seeds;
  j["support_floor"] = cfg.support_floor;
  j["solver_iter_cap"] = cfg.solver_iter_cap;
  j["solver_improve_eps"] = cfg.solver_improve_eps;
  j["solver_seeds"] = cfg.solver_seeds;
  j["seed"] = cfg.seed;
  return j;
}

AnalysisConfig config_from_json(const json& j) {
  AnalysisConfig cfg;
  cfg.word_cap = j.value("word_cap", cfg.word_cap);
  cfg.state_cap = j.value("state_cap", cfg.state_cap);
  cfg.length_cap = j.value("length_cap", cfg.length_cap);
  cfg.trace_cap = j.value("trace_cap", cfg.trace_cap);
  cfg.plateau = j.value("plateau", cfg.plateau);
  cfg.power_iter_cap = j.value("power_iter_cap", cfg.power_iter_cap);
  cfg.power_tol = j.value("power_tol", cfg.power_tol);
  cfg.tol_pressure = j.value("tol_pressure", cfg.tol_pressure);
  cfg.tol_measure = j.value("tol_measure", cfg.tol_measure);
  cfg.tol_push = j.value("tol_push", cfg.tol_push);
  cfg.tol_residual = j.value("tol_residual", cfg.tol_residual);
  cfg.tol_seeds = j.value("tol_seeds", cfg.tol_seeds);
  cfg.support_floor = j.value("support_floor", cfg.support_floor);
  cfg.solver_iter_cap = j.value("solver_iter_cap", cfg.solver_iter_cap);
  cfg.solver_improve_eps = j.value("solver_improve_eps", cfg.solver_improve_eps);
  cfg.solver_seeds = j.value("solver_seeds", cfg.solver_seeds);
  cfg.seed = j.value("seed", cfg.seed);
  require(cfg.word_cap > 0 && cfg.state_cap > 0 && cfg.length_cap > 0 && cfg.trace_cap > 0,
          Errc::parse_error, "config caps must be positive");
  return cfg;
}

namespace {

// tolerant word formatting: degree reports may carry words over auxiliary
// alphabets (cover edges); fall back to indices rather than fail a report
std::string safe_format(const Alphabet& a, const Word& w) {
  for (SymbolId s : w)
    if (s >= a.size()) {
      std::string out;
      for (std::size_t i = 0; i < w.size(); ++i)
        out += (i ? "." : "") + std::to_string(w[i]);
      return out;
    }
  return a.format(w);
}

json words_to_json(const std::map<Word, double>& t, const Alphabet& a) {
  json j = json::object();
  for (const auto& [w, v] : t) j[safe_format(a, w)] = v;
  return j;
}

}  // namespace

json to_json(const Potential& phi, const Alphabet& a) {
  json j;
  j["window"] = phi.window;
  j["table"] = words_to_json(phi.values, a);
  return j;
}

Potential potential_from_json(const json& j, const Alphabet& a) {
  try {
    require(j.is_object() && j.contains("table"), Errc::parse_error, "potential needs a table");
    Potential phi{j.value("window", 1), {}};
    for (const auto& [key, val] : j.at("table").items()) {
      require(val.is_number(), Errc::parse_error,
              "potential value for '" + key + "' must be a number");
      phi.values[a.parse_word(key)] = val.get<double>();
    }
    return phi;
  } catch (const json::exception& e) {
    raise(Errc::parse_error, std::string("bad potential: ") + e.what());
  }
}

json to_json(const MarkovMeasure& mu, const Alphabet& a) {
  json j;
  j["order"] = mu.order;
  json contexts = json::array();
  for (const Word& c : mu.contexts) contexts.push_back(a.format(c));
  j["contexts"] = std::move(contexts);
  json rows = json::array();
  for (const auto& row : mu.transitions) {
    json r = json::object();
    for (const auto& [s, p] : row) r[a.format(s)] = p;
    rows.push_back(std::move(r));
  }
  j["transitions"] = std::move(rows);
  j["stationary"] = mu.stationary;
  return j;
}

MarkovMeasure measure_from_json(const json& j, const Alphabet& a) {
  try {
    require(j.is_object() && j.contains("contexts") && j.contains("transitions") &&
                j.contains("stationary"),
            Errc::parse_error, "measure needs contexts, transitions, stationary");
    MarkovMeasure mu;
    mu.order = j.value("order", 1);
    for (const auto& c : j.at("contexts")) mu.contexts.push_back(a.parse_word(c.get<std::string>()));
    for (const auto& row : j.at("transitions")) {
      std::map<SymbolId, double> r;
      for (const auto& [key, val] : row.items()) {
        auto s = a.find(key);
        require(s.has_value(), Errc::parse_error, "unknown symbol '" + key + "' in measure row");
        require(val.is_number(), Errc::parse_error, "row value for '" + key + "' must be a number");
        r[*s] = val.get<double>();
      }
      mu.transitions.push_back(std::move(r));
    }
    mu.stationary = j.at("stationary").get<std::vector<double>>();
    return mu;
  } catch (const json::exception& e) {
    raise(Errc::parse_error, std::string("bad measure: ") + e.what());
  }
}

json to_json(const DegreeReport& r, const Alphabet& domain, const Alphabet& image) {
  json j;
  j["finite_to_one"] = r.finite_to_one;
  j["degree"] = r.degree ? json(*r.degree) : json(nullptr);
  j["witness"] = safe_format(image, r.witness);
  j["witness_position"] = r.witness_position;
  if (r.diamond) {
    json d;
    d["image"] = safe_format(image, r.diamond->image);
    d["left"] = safe_format(domain, r.diamond->left);
    d["right"] = safe_format(domain, r.diamond->right);
    j["diamond"] = std::move(d);
  } else {
    j["diamond"] = nullptr;
  }
  j["trace"] = {{"per_length", r.trace.per_length},
                {"stabilized_at", r.trace.stabilized_at},
                {"plateau", r.trace.plateau}};
  return j;
}

json to_json(const TransitionBlock& tb, const Alphabet& domain, const Alphabet& image,
             bool certified) {
  json j;
  j["w"] = safe_format(image, tb.w);
  j["n"] = tb.n;
  json routing = json::array();
  for (SymbolId s : tb.routing) routing.push_back(safe_format(domain, Word{s}));
  j["routing"] = std::move(routing);
  j["depth"] = tb.depth();
  j["certified"] = certified;
  return j;
}

json to_json(const ClassDegreeReport& r, const Alphabet& domain, const Alphabet& image) {
  json j;
  j["upper"] = r.upper;
  j["witness"] = to_json(r.witness, domain, image, r.stabilized);
  j["trace"] = r.trace;
  j["stabilized"] = r.stabilized;
  j["stabilized_at"] = r.stabilized_at;
  j["method"] = r.method;
  return j;
}

json to_json(const DecompositionReport& r, const Decomposition& d) {
  const Alphabet& dom = d.normalized.triple.x.alphabet();
  const Alphabet& mid = d.ytilde.alphabet();
  const Alphabet& img = d.normalized.triple.y.alphabet();
  json j;
  j["composition_ok"] = r.composition_ok;
  j["pi2_degree"] = to_json(r.pi2_degree, mid, img);
  j["pi2_degree_equals_class_degree"] = r.pi2_degree_equals_class_degree;
  j["pi1_class_degree"] = to_json(r.pi1_class_degree, dom, mid);
  j["pi1_class_degree_one"] = r.pi1_class_degree_one;
  j["class_degree_stabilized"] = r.class_degree_stabilized;
  j["notes"] = r.notes;
  j["ok"] = r.ok();
  return j;
}

json to_json(const PressureValue& v, const Alphabet& a) {
  json j;
  j["value"] = v.value;
  j["root"] = v.root;
  j["block_len"] = v.block_len;
  j["iterations"] = v.iterations;
  json eigen = json::object();
  for (std::size_t i = 0; i < v.blocks.size(); ++i)
    eigen[safe_format(a, v.blocks[i])] = {{"right", v.right[i]}, {"left", v.left[i]}};
  j["eigen"] = std::move(eigen);
  return j;
}

json to_json(const TuncelLift& l, const Alphabet& domain) {
  json j;
  j["pulled"] = to_json(l.pulled, domain);
  j["lift"] = to_json(l.lift, domain);
  j["pressure_domain"] = l.pressure_domain;
  j["pressure_image"] = l.pressure_image;
  j["word_gap"] = l.word_gap;
  j["word_len"] = l.word_len;
  j["pushforward_ok"] = l.pushforward_ok;
  j["pressure_ok"] = l.pressure_ok;
  return j;
}

json to_json(const EntropyBounds& b) {
  json j;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["h_domain"] = b.h_domain;
  j["image_lower"] = b.image_lower;
  j["image_upper"] = b.image_upper;
  j["length"] = b.length;
  j["width"] = b.width();
  return j;
}

json to_json(const WordDistribution& d, const Alphabet& a) {
  json j;
  j["k"] = d.k;
  j["probs"] = words_to_json(d.probs, a);
  return j;
}

json to_json(const SolveReport& r, const Alphabet& a) {
  json j;
  j["value"] = r.value;
  j["optimum"] = to_json(r.optimum, a);
  j["constraint_residual"] = r.constraint_residual;
  j["seeds_used"] = r.seeds_used;
  j["max_pairwise_distance"] = r.max_pairwise_distance;
  j["support_min"] = r.support_min;
  j["iterations"] = r.iterations;
  return j;
}

json to_json(const SupportReport& s, const Alphabet& a) {
  json j;
  j["full_support"] = s.full_support;
  j["floor"] = s.floor;
  json v = json::array();
  for (const Word& w : s.violations) v.push_back(safe_format(a, w));
  j["violations"] = std::move(v);
  return j;
}

json to_json(const CrosscheckReport& c, const Alphabet& domain, const Alphabet& intermediate) {
  json j;
  j["direct"] = to_json(c.direct, domain);
  json routed;
  routed["value"] = c.routed.value;
  routed["order"] = c.routed.optimum.k;
  routed["constraint_residual"] = c.routed.constraint_residual;
  routed["seeds_used"] = c.routed.seeds_used;
  routed["max_pairwise_distance"] = c.routed.max_pairwise_distance;
  routed["support_min"] = c.routed.support_min;
  routed["iterations"] = c.routed.iterations;
  routed["optimum_as_domain_words"] = words_to_json(c.routed_words, domain);
  j["routed"] = std::move(routed);
  j["nu_tilde"] = words_to_json(c.nu_tilde, intermediate);
  j["value_gap"] = c.value_gap;
  j["table_distance"] = c.table_distance;
  j["agree"] = c.agree;
  return j;
}

json report_envelope(const std::string& command, const AnalysisConfig& cfg) {
  json j;
  j["tool"] = "sofic";
  j["version"] = version;
  j["command"] = command;
  j["config"] = to_json(cfg);
  return j;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::parse_error, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Errc::parse_error, path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  require(out.good(), Errc::parse_error, "cannot open '" + path + "' for writing");
  out << dump_report(j);
  require(out.good(), Errc::parse_error, "failed writing '" + path + "'");
}

}  // namespace sofic
