#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinlab/commands.hpp"

using namespace kinlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kinlab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunConfig small(const fs::path& out, const std::string& extra = "") {
  return parse_config("[lattice]\nn_per_axis = 16\n[output]\npath = " + out.string() + "\n" + extra);
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv layout") {
  Table t;
  t.columns = {"a", "b"};
  t.add({"1", "x,y"});
  const std::string csv = render_csv(t, "demo", "0123456789abcdef");
  CHECK(csv == "# kinlab command=demo fingerprint=0123456789abcdef\na,b\n1,\"x,y\"\n");
  CHECK_THROWS_AS(t.add({"1"}), InvalidInput);
}

TEST_CASE("every command is registered") {
  CHECK(command_names().size() == 12);
  const RunConfig c = parse_config("");
  CHECK_THROWS_AS(run_command("plot", c), ConfigError);
}

TEST_CASE("validate on defaults") {
  const auto r = run_command("validate", parse_config(""));
  CHECK(r.exit_code == kExitOk);
  CHECK(r.summary["a0"].get<double>() > 0.0);
  CHECK(r.summary["gap"].get<double>() > 0.0);
  CHECK(r.summary["detailed_balance"].get<double>() < 1e-10);
}

TEST_CASE("dispatch writes fingerprinted artifacts") {
  const fs::path dir = scratch_dir("dispatch");
  const RunConfig c = small(dir / "ness.csv");
  std::ostringstream out, err;
  CHECK(dispatch("ness", c, out, err) == kExitOk);
  const std::string csv = slurp(dir / "ness.csv");
  CHECK(csv.rfind("# kinlab command=ness fingerprint=" + config_fingerprint(c), 0) == 0);
  CHECK(csv.find("\ni,k,eps,zeta,gibbs\n") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(dir / "ness.json"));
  CHECK(summary["command"] == "ness");
  CHECK(summary["fingerprint"] == config_fingerprint(c));
  CHECK(summary.contains("wall_time_s"));
  // deterministic command: identical bytes on a rerun
  CHECK(dispatch("ness", c, out, err) == kExitOk);
  CHECK(slurp(dir / "ness.csv") == csv);
  // no temporary files left behind
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 2);
}

TEST_CASE("json output format") {
  const fs::path dir = scratch_dir("json");
  const RunConfig c = small(dir / "spec.json", "format = json\n");
  std::ostringstream out, err;
  CHECK(dispatch("spectrum", c, out, err) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "spec.json"));
  CHECK(j["rows"].size() == 16);
  CHECK(j["columns"][1] == "re");
}

TEST_CASE("configuration problems map to exit code 2") {
  const fs::path dir = scratch_dir("exit");
  std::ostringstream out, err;
  CHECK(dispatch("no-such-command", small(dir / "x.csv"), out, err) == kExitConfig);
  const RunConfig two_d = parse_config("[lattice]\nd_lat = 2\nn_per_axis = 8\n[output]\npath = " + (dir / "lf.csv").string() + "\n");
  CHECK(dispatch("large-field", two_d, out, err) == kExitConfig);
}

TEST_CASE("command-line front end") {
  const char* bin = std::getenv("KINLAB_BIN");
  if (!bin) return;
  const fs::path dir = scratch_dir("cli");
  const std::string base = std::string(bin) + " ";
  auto run = [&](const std::string& args) {
    const int status = std::system((base + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  std::ofstream(dir / "bad.ini") << "[reservoir]\nbeta = -1\n";
  std::ofstream(dir / "dup.ini") << "[mc]\nseed = 1\nseed = 2\n";
  CHECK(run("validate --set lattice.n_per_axis=16 --out " + (dir / "v.csv").string()) == 0);
  CHECK(run("validate --config " + (dir / "bad.ini").string()) == 2);
  CHECK(run("validate --config " + (dir / "dup.ini").string()) == 2);
  CHECK(run("validate --set reservoir.beta=0") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--list") == 0);
}
