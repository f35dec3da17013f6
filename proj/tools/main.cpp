// Command-line frontend: every analysis emits a JSON report embedding the
// full config and tool version, so reruns with identical inputs are
// byte-identical. Human summaries go to standard output when the report is
// written to a file.
//
// Exit codes: 0 success, 1 verification failure (or inconclusive
// stabilization), 2 precondition/parse problem, 3 resource or iteration cap.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "sofic/decomp.hpp"
#include "sofic/error.hpp"
#include "sofic/fixtures.hpp"
#include "sofic/json_io.hpp"
#include "sofic/relopt.hpp"
#include "sofic/thermo.hpp"
#include "sofic/version.hpp"

namespace fs = std::filesystem;
using namespace sofic;

namespace {

struct Ctx {
  std::string config_path;
  int verdict = 0;  // 1 after a failed verification check

  AnalysisConfig cfg() const {
    return config_path.empty() ? AnalysisConfig{}
                               : config_from_json(load_json_file(config_path));
  }
};

int exit_for(Errc c) {
  switch (c) {
    case Errc::resource_limit:
    case Errc::solver_stalled:
    case Errc::numeric:
      return 3;
    case Errc::stabilization_inconclusive:
      return 1;
    default:
      return 2;
  }
}

bool has_prefix(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

Presentation load_presentation(const std::string& arg) {
  if (has_prefix(arg, "fixture:")) return fixtures::presentation_by_name(arg.substr(8));
  return presentation_from_json(load_json_file(arg));
}

// triple inputs: "fixture:NAME", "identity:<presentation>", or a JSON file
FactorTriple load_triple(const std::string& arg, const AnalysisConfig& cfg) {
  if (has_prefix(arg, "fixture:")) return fixtures::triple_by_name(arg.substr(8), cfg);
  if (has_prefix(arg, "identity:")) {
    Presentation p = load_presentation(arg.substr(9));
    return {p, identity_code(p, cfg), p};
  }
  return triple_from_json(load_json_file(arg), cfg);
}

Potential load_potential(const std::string& path, const Presentation& on, int window,
                         const AnalysisConfig& cfg) {
  if (path.empty()) return zero_potential(on, window, cfg);
  Potential phi = potential_from_json(load_json_file(path), on.alphabet());
  validate_potential(on, phi, cfg);
  return phi;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// report to stdout when no output path was given, else file plus summary
void emit(const std::string& out, const json& report, const std::vector<std::string>& summary) {
  if (out.empty()) {
    std::cout << dump_report(report);
    return;
  }
  write_json_file(out, report);
  for (const auto& line : summary) std::cout << line << "\n";
}

void cmd_analyze(Ctx& ctx, const std::string& input, const std::string& out) {
  const AnalysisConfig cfg = ctx.cfg();
  const NormalizedTriple nt = normalize(load_triple(input, cfg), cfg);
  const Alphabet& dom = nt.triple.x.alphabet();
  const Alphabet& img = nt.triple.pi.codomain();

  json j = report_envelope("analyze", cfg);
  j["input"] = input;
  j["domain"] = {{"symbols", nt.triple.x.symbol_count()},
                 {"states", nt.triple.x.state_count()},
                 {"irreducible", is_irreducible(nt.triple.x)},
                 {"period", period(nt.triple.x)}};
  const DegreeReport fr = fto_report(nt.triple.x, nt.triple.pi, cfg);
  j["finite_to_one"] = fr.finite_to_one;
  j["degree"] = to_json(fr, dom, img);
  const ClassDegreeReport cd = class_degree_upper(nt.triple.pi, cfg.trace_cap, cfg);
  j["class_degree"] = to_json(cd, dom, img);

  std::vector<std::string> summary;
  summary.push_back(std::string("domain: ") + (is_irreducible(nt.triple.x) ? "irreducible" : "reducible") +
                    ", period " + std::to_string(period(nt.triple.x)));
  if (fr.finite_to_one)
    summary.push_back("finite-to-one, degree " + std::to_string(*fr.degree));
  else
    summary.push_back("infinite-to-one (diamond on " + img.format(fr.diamond->image) + ")");
  summary.push_back("class degree upper bound " + std::to_string(cd.upper) +
                    (cd.stabilized ? " (stabilized, " + cd.method + ")" : " (not stabilized)"));
  emit(out, j, summary);
}

void cmd_degree(Ctx& ctx, const std::string& input, const std::string& out) {
  const AnalysisConfig cfg = ctx.cfg();
  const NormalizedTriple nt = normalize(load_triple(input, cfg), cfg);
  const DegreeReport r = fto_report(nt.triple.x, nt.triple.pi, cfg);
  json j = report_envelope("degree", cfg);
  j["input"] = input;
  j["degree"] = to_json(r, nt.triple.x.alphabet(), nt.triple.pi.codomain());
  emit(out, j,
       {r.finite_to_one ? "degree " + std::to_string(*r.degree) + " at witness '" +
                              nt.triple.pi.codomain().format(r.witness) + "'"
                        : "not finite-to-one"});
}

void cmd_class_degree(Ctx& ctx, const std::string& input, const std::string& out, int max_len) {
  const AnalysisConfig cfg = ctx.cfg();
  const NormalizedTriple nt = normalize(load_triple(input, cfg), cfg);
  const ClassDegreeReport r =
      class_degree_upper(nt.triple.pi, max_len > 0 ? max_len : cfg.trace_cap, cfg);
  json j = report_envelope("class-degree", cfg);
  j["input"] = input;
  j["class_degree"] = to_json(r, nt.triple.x.alphabet(), nt.triple.pi.codomain());
  emit(out, j,
       {"class degree upper bound " + std::to_string(r.upper) +
        (r.stabilized ? " (stabilized at length " + std::to_string(r.stabilized_at) + ", " +
                            r.method + ")"
                      : " (not stabilized)")});
}

void cmd_decompose(Ctx& ctx, const std::string& input, const std::string& dir) {
  const AnalysisConfig cfg = ctx.cfg();
  const Decomposition d = build_decomposition(load_triple(input, cfg), cfg);
  fs::create_directories(dir);
  write_json_file((fs::path(dir) / "ytilde.json").string(), to_json(d.ytilde));
  write_json_file((fs::path(dir) / "pi1.json").string(), to_json(d.pi1));
  write_json_file((fs::path(dir) / "pi2.json").string(), to_json(d.pi2));

  json rep = report_envelope("decompose", cfg);
  rep["input"] = input;
  rep["class_degree"] =
      to_json(d.class_degree, d.normalized.triple.x.alphabet(), d.normalized.triple.y.alphabet());
  rep["transition_block"] = to_json(d.tb, d.normalized.triple.x.alphabet(),
                                    d.normalized.triple.y.alphabet(), d.class_degree.stabilized);
  rep["verification"] = to_json(d.verification, d);
  write_json_file((fs::path(dir) / "report.json").string(), rep);

  std::cout << "decomposition written to " << dir << "\n";
  std::cout << "class degree " << d.class_degree.upper << ", pi2 degree "
            << (d.verification.pi2_degree.degree ? std::to_string(*d.verification.pi2_degree.degree)
                                                 : std::string("?"))
            << "\n";
  if (d.verification.ok()) {
    std::cout << "verification: all checks passed\n";
  } else {
    std::cout << "verification: FAILED (" << d.verification.notes << ")\n";
    ctx.verdict = 1;
  }
}

void cmd_pressure(Ctx& ctx, const std::string& input, const std::string& out,
                  const std::string& phi_path) {
  const AnalysisConfig cfg = ctx.cfg();
  const Presentation p = load_presentation(input);
  const Potential phi = load_potential(phi_path, p, 1, cfg);
  const PressureValue v = pressure(p, phi, cfg);
  json j = report_envelope("pressure", cfg);
  j["input"] = input;
  j["kind"] = kind_name(p.kind());
  j["pressure"] = to_json(v, p.alphabet());
  emit(out, j,
       {"pressure " + fmt(v.value) + " (root " + fmt(v.root) + ", " +
        std::to_string(v.iterations) + " iterations)"});
}

void cmd_equilibrium(Ctx& ctx, const std::string& input, const std::string& out,
                     const std::string& phi_path) {
  const AnalysisConfig cfg = ctx.cfg();
  const Presentation p = load_presentation(input);
  const Potential phi = load_potential(phi_path, p, 1, cfg);
  const MarkovMeasure mu = equilibrium_state(p, phi, cfg);
  json j = report_envelope("equilibrium", cfg);
  j["input"] = input;
  j["measure"] = to_json(mu, p.alphabet());
  j["entropy"] = entropy(mu);
  j["measure_pressure"] = measure_pressure(mu, phi, cfg);
  emit(out, j,
       {"equilibrium state of order " + std::to_string(mu.order) + ", entropy " +
        fmt(entropy(mu)) + ", pressure " + fmt(measure_pressure(mu, phi, cfg))});
}

void cmd_lift(Ctx& ctx, const std::string& input, const std::string& out,
              const std::string& psi_path, int len) {
  const AnalysisConfig cfg = ctx.cfg();
  const NormalizedTriple nt = normalize(load_triple(input, cfg), cfg);
  const Potential psi = load_potential(psi_path, nt.triple.y, 1, cfg);
  const TuncelLift l = tuncel_lift(nt.triple.x, nt.triple.pi, nt.triple.y, psi, len, cfg);
  const EntropyBounds b = relative_entropy_bounds(l.lift, nt.triple.pi, len, cfg);
  json j = report_envelope("lift", cfg);
  j["input"] = input;
  j["lift"] = to_json(l, nt.triple.x.alphabet());
  j["entropy_bounds"] = to_json(b);
  if (!l.pushforward_ok || !l.pressure_ok) ctx.verdict = 1;
  emit(out, j,
       {"pressures " + fmt(l.pressure_domain) + " / " + fmt(l.pressure_image) + ", word gap " +
            fmt(l.word_gap) + (l.pushforward_ok && l.pressure_ok ? "" : "  [MISMATCH]"),
        "relative entropy bracket [" + fmt(b.lower) + ", " + fmt(b.upper) + "] at length " +
            std::to_string(b.length)});
}

void cmd_mmre(Ctx& ctx, const std::string& input, const std::string& out, int order, int seeds,
              const std::string& phi_path, const std::string& nu_path,
              const std::string& crosscheck_dir) {
  AnalysisConfig cfg = ctx.cfg();
  if (seeds > 0) cfg.solver_seeds = seeds;
  const FactorTriple t = load_triple(input, cfg);
  const NormalizedTriple nt = normalize(t, cfg);
  const Presentation& x = nt.triple.x;
  const Presentation& y = nt.triple.y;
  const Potential phi = load_potential(phi_path, x, 1, cfg);

  MarkovMeasure nu = [&] {
    if (!nu_path.empty()) {
      MarkovMeasure m = measure_from_json(load_json_file(nu_path), y.alphabet());
      validate_measure(y, m, cfg);
      return m;
    }
    require(y.kind() == Kind::vertex_sft, Errc::invalid_argument,
            "the image is sofic; provide a target measure with --nu");
    return equilibrium_state(y, zero_potential(y, 1, cfg), cfg);
  }();

  json j = report_envelope("mmre", cfg);
  j["input"] = input;
  j["order"] = order;

  if (!crosscheck_dir.empty()) {
    const Decomposition d = build_decomposition(t, cfg);
    for (const auto& [file, expect] :
         {std::pair<const char*, json>{"ytilde.json", to_json(d.ytilde)},
          {"pi1.json", to_json(d.pi1)},
          {"pi2.json", to_json(d.pi2)}})
      require(load_json_file((fs::path(crosscheck_dir) / file).string()) == expect,
              Errc::invalid_argument,
              std::string("decomposition directory does not match this triple (") + file + ")");
    const CrosscheckReport cr = decomposition_crosscheck(d, nu, phi, order, cfg);
    j["crosscheck"] = to_json(cr, x.alphabet(), d.ytilde.alphabet());
    if (!cr.agree) ctx.verdict = 1;
    emit(out, j,
         {"direct value " + fmt(cr.direct.value) + ", routed value " + fmt(cr.routed.value),
          "value gap " + fmt(cr.value_gap) + ", table distance " + fmt(cr.table_distance) +
              (cr.agree ? "  [agree]" : "  [DISAGREE]")});
    return;
  }

  const RelaxationProblem p = build_relaxation(x, nt.triple.pi, nu, phi, order, cfg);
  const SolveReport r = solve_relaxation(p, cfg.solver_seeds, cfg);
  j["solve"] = to_json(r, x.alphabet());
  j["support"] = to_json(support_report(r, x, cfg), x.alphabet());
  emit(out, j,
       {"relaxation value " + fmt(r.value) + " at order " + std::to_string(order),
        "residual " + fmt(r.constraint_residual) + ", seed spread " +
            fmt(r.max_pairwise_distance) + ", min probability " + fmt(r.support_min)});
}

void cmd_random_corpus(Ctx& ctx, const std::string& dir, std::uint64_t seed, int count,
                       int states, int symbols) {
  const AnalysisConfig cfg = ctx.cfg();
  require(count >= 1 && count <= 10'000, Errc::invalid_argument, "count must be in 1..10000");
  require(states >= 2 && states <= 6 && symbols >= 2 && symbols <= 6, Errc::invalid_argument,
          "corpus bounds: 2..6 states and 2..6 symbols");
  fs::create_directories(dir);
  json manifest = report_envelope("random-corpus", cfg);
  manifest["seed"] = seed;
  manifest["count"] = count;
  manifest["states"] = states;
  manifest["symbols"] = symbols;
  json files = json::array();
  for (int i = 0; i < count; ++i) {
    const FactorTriple t = fixtures::random_onto_triple(
        seed + static_cast<std::uint64_t>(i), static_cast<std::size_t>(states),
        static_cast<std::size_t>(symbols));
    const NormalizedTriple nt = normalize(t, cfg);
    require(is_irreducible(nt.triple.x), Errc::numeric, "generated corpus member is reducible");
    std::ostringstream name;
    name << "triple-" << std::setfill('0') << std::setw(3) << i << ".json";
    write_json_file((fs::path(dir) / name.str()).string(), to_json(t));
    files.push_back(name.str());
  }
  manifest["files"] = std::move(files);
  write_json_file((fs::path(dir) / "manifest.json").string(), manifest);
  std::cout << count << " triples written to " << dir << "\n";
  (void)ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic dynamics toolkit: degrees, factor-code decomposition, pressure, "
               "equilibrium states, lifts, and relative-entropy relaxations"};
  app.require_subcommand(1);
  Ctx ctx;
  app.add_option("--config", ctx.config_path, "JSON file overriding analysis caps/tolerances");

  std::string input, out, phi_path, nu_path, psi_path, crosscheck_dir, dir;
  int order = 2, seeds = 0, max_len = 0, len = 10;
  std::uint64_t seed = 1;
  int count = 10, states = 4, symbols = 3;

  auto* analyze = app.add_subcommand("analyze", "irreducibility, period, degree, class degree");
  analyze->add_option("input", input, "triple: fixture:NAME, identity:<pres>, or JSON file")
      ->required();
  analyze->add_option("-o,--out", out, "report file (default: stdout)");
  analyze->callback([&] { cmd_analyze(ctx, input, out); });

  auto* degree = app.add_subcommand("degree", "degree of a finite-to-one code");
  degree->add_option("input", input, "triple input")->required();
  degree->add_option("-o,--out", out, "report file");
  degree->callback([&] { cmd_degree(ctx, input, out); });

  auto* classdeg = app.add_subcommand("class-degree", "class degree trace and witness block");
  classdeg->add_option("input", input, "triple input")->required();
  classdeg->add_option("-o,--out", out, "report file");
  classdeg->add_option("--max-len", max_len, "longest image word to sweep");
  classdeg->callback([&] { cmd_class_degree(ctx, input, out, max_len); });

  auto* decompose = app.add_subcommand("decompose", "factor through a class-degree-one first leg");
  decompose->add_option("input", input, "triple input")->required();
  decompose->add_option("-o,--out", dir, "output directory for ytilde/pi1/pi2/report")
      ->required();
  decompose->callback([&] { cmd_decompose(ctx, input, dir); });

  auto* pres = app.add_subcommand("pressure", "topological pressure of a potential");
  pres->add_option("input", input, "presentation: fixture:NAME or JSON file")->required();
  pres->add_option("-o,--out", out, "report file");
  pres->add_option("--phi", phi_path, "potential JSON (default: zero)");
  pres->callback([&] { cmd_pressure(ctx, input, out, phi_path); });

  auto* eq = app.add_subcommand("equilibrium", "Gibbs/Parry equilibrium state");
  eq->add_option("input", input, "presentation input")->required();
  eq->add_option("-o,--out", out, "report file");
  eq->add_option("--phi", phi_path, "potential JSON (default: zero)");
  eq->callback([&] { cmd_equilibrium(ctx, input, out, phi_path); });

  auto* lift = app.add_subcommand("lift", "lift an image equilibrium through a finite-to-one code");
  lift->add_option("input", input, "triple input")->required();
  lift->add_option("-o,--out", out, "report file");
  lift->add_option("--psi", psi_path, "image potential JSON (default: zero)");
  lift->add_option("--len", len, "word length for agreement and entropy brackets")
      ->check(CLI::Range(2, 16));
  lift->callback([&] { cmd_lift(ctx, input, out, psi_path, len); });

  auto* mmre = app.add_subcommand("mmre", "relative-entropy relaxation over a factor code");
  mmre->add_option("input", input, "triple input")->required();
  mmre->add_option("-o,--out", out, "report file");
  mmre->add_option("--order", order, "relaxation order k")->required()->check(CLI::Range(1, 12));
  mmre->add_option("--seeds", seeds, "solver starts (default: config)");
  mmre->add_option("--phi", phi_path, "domain potential JSON (default: zero)");
  mmre->add_option("--nu", nu_path, "target measure JSON (default: image equilibrium)");
  mmre->add_option("--crosscheck", crosscheck_dir,
                   "decomposition directory; solve both routes and compare");
  mmre->callback([&] { cmd_mmre(ctx, input, out, order, seeds, phi_path, nu_path, crosscheck_dir); });

  auto* corpus = app.add_subcommand("random-corpus", "deterministic corpus of onto 1-block codes");
  corpus->add_option("-o,--out", dir, "output directory")->required();
  corpus->add_option("--seed", seed, "base seed");
  corpus->add_option("--count", count, "number of triples");
  corpus->add_option("--states", states, "domain state bound (2..6)");
  corpus->add_option("--symbols", symbols, "image symbol bound (2..6)");
  corpus->callback([&] { cmd_random_corpus(ctx, dir, seed, count, states, symbols); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return ctx.verdict;
}
