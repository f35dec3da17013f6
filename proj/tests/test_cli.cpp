// End-to-end checks of the command line tool: spawn the real binary and
// inspect exit codes, report JSON, and written files.

#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;

  json parsed() const { return json::parse(out); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "sofic-cli-test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out-" + std::to_string(counter) + ".txt");
  const fs::path err = scratch_dir() / ("err-" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(SOFIC_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("analyze classifies the merge fixture and embeds the config") {
  const RunResult r = run("analyze fixture:merge");
  REQUIRE(r.exit_code == 0);
  const json j = r.parsed();
  CHECK(j["tool"] == "sofic");
  CHECK(j["command"] == "analyze");
  CHECK(j["config"]["seed"] == 1);
  CHECK(j["config"]["length_cap"] == 12);
  CHECK(j["domain"]["irreducible"] == true);
  CHECK(j["finite_to_one"] == false);
  CHECK(j["degree"]["diamond"].is_object());
  CHECK(j["class_degree"]["upper"] == 1);
  CHECK(j["class_degree"]["stabilized"] == true);
}

TEST_CASE("degree reports the parity code as two-to-one") {
  const RunResult r = run("degree fixture:xor");
  REQUIRE(r.exit_code == 0);
  const json j = r.parsed();
  CHECK(j["degree"]["finite_to_one"] == true);
  CHECK(j["degree"]["degree"] == 2);
}

TEST_CASE("identity inputs go through the fixture registry") {
  const RunResult r = run("analyze identity:fixture:golden-mean");
  REQUIRE(r.exit_code == 0);
  const json j = r.parsed();
  CHECK(j["finite_to_one"] == true);
  CHECK(j["degree"]["degree"] == 1);
  CHECK(j["class_degree"]["upper"] == 1);
}

TEST_CASE("decompose writes the three legs and a verified report") {
  const fs::path dir = scratch_dir() / "dec-merge";
  const RunResult r = run("decompose fixture:merge -o " + dir.string());
  REQUIRE(r.exit_code == 0);
  for (const char* f : {"ytilde.json", "pi1.json", "pi2.json", "report.json"})
    CHECK(fs::exists(dir / f));
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["command"] == "decompose");
  CHECK(rep["verification"]["composition_ok"] == true);
  CHECK(rep["verification"]["pi1_class_degree_one"] == true);
  CHECK(rep["verification"]["pi2_degree_equals_class_degree"] == true);
  CHECK(rep["transition_block"]["certified"] == true);
  CHECK(r.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("a reducible domain is a usage error, not a crash") {
  const fs::path bad = scratch_dir() / "reducible.json";
  std::ofstream(bad) << R"({"alphabet":["0","1"],"states":["p","q"],
      "edges":[[0,0,0],[0,1,1],[1,1,1]],"kind":"vertex-sft"})";
  const RunResult r = run("analyze identity:" + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("NotIrreducible") != std::string::npos);
}

TEST_CASE("malformed presentation files are rejected with a parse diagnostic") {
  const fs::path bad = scratch_dir() / "bad-label.json";
  std::ofstream(bad) << R"({"alphabet":["0"],"states":["p"],
      "edges":[[0,0,7]],"kind":"vertex-sft"})";
  const RunResult r = run("analyze identity:" + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(!r.err.empty());
}

TEST_CASE("pressure of the full 2-shift is log 2 from the command line") {
  const RunResult r = run("pressure fixture:full-2");
  REQUIRE(r.exit_code == 0);
  const double v = r.parsed()["pressure"]["value"].get<double>();
  CHECK(std::abs(v - std::log(2.0)) < 1e-12);
}

TEST_CASE("mmre solves the merge relaxation at order one") {
  const RunResult r = run("mmre fixture:merge --order 1 --seeds 3");
  REQUIRE(r.exit_code == 0);
  const json j = r.parsed();
  CHECK(std::abs(j["solve"]["value"].get<double>() - 1.5 * std::log(2.0)) < 1e-6);
  CHECK(j["support"]["full_support"] == true);
}

TEST_CASE("mmre crosscheck agrees with the direct solve through a decomposition") {
  const fs::path dir = scratch_dir() / "dec-xor";
  REQUIRE(run("decompose fixture:xor -o " + dir.string()).exit_code == 0);
  const RunResult r = run("mmre fixture:xor --order 4 --crosscheck " + dir.string());
  REQUIRE(r.exit_code == 0);
  const json j = r.parsed();
  CHECK(j["crosscheck"]["agree"] == true);
  CHECK(j["crosscheck"]["value_gap"].get<double>() < 1e-6);
  CHECK(j["crosscheck"]["table_distance"].get<double>() < 1e-6);
}

TEST_CASE("a sofic image requires an explicit target measure") {
  const RunResult r = run("mmre fixture:gm-even --order 2");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--nu") != std::string::npos);
}

TEST_CASE("random-corpus is deterministic and bounds-checked") {
  const fs::path a = scratch_dir() / "corpus-a";
  const fs::path b = scratch_dir() / "corpus-b";
  REQUIRE(run("random-corpus -o " + a.string() + " --seed 5 --count 4").exit_code == 0);
  REQUIRE(run("random-corpus -o " + b.string() + " --seed 5 --count 4").exit_code == 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
  CHECK(run("random-corpus -o " + (scratch_dir() / "x").string() + " --states 7").exit_code == 2);
  CHECK(run("random-corpus -o " + (scratch_dir() / "x").string() + " --count 0").exit_code == 2);
}

TEST_CASE("reports are byte-identical across reruns") {
  const RunResult a = run("analyze fixture:xor");
  const RunResult b = run("analyze fixture:xor");
  CHECK(a.out == b.out);
  const RunResult c = run("equilibrium fixture:golden-mean");
  const RunResult d = run("equilibrium fixture:golden-mean");
  CHECK(c.out == d.out);
}

TEST_CASE("missing subcommands and unknown options are usage errors") {
  CHECK(run("").exit_code == 2);
  CHECK(run("analyze").exit_code == 2);
  CHECK(run("mmre fixture:merge").exit_code == 2);  // --order is required
  CHECK(run("pressure fixture:full-2 --bogus").exit_code == 2);
}
