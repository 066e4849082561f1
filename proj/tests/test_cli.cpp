#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "invsq/error.hpp"
#include "invsq/experiments.hpp"

using namespace invsq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("invsq-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(INVSQ_NLS_BIN) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  fs::remove(out);
  fs::remove(err);
  return r;
}

std::size_t count_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

nlohmann::json manifest_in(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") return nlohmann::json::parse(slurp(e.path()));
  return {};
}

std::string strip_timestamp(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  j.erase("timestamp");
  return j.dump();
}

}  // namespace

TEST_CASE("list prints the registry") {
  TempDir t;
  const auto r = run_cli("list", t.path);
  CHECK(r.code == 0);
  for (const auto& e : experiment_registry()) CHECK(r.out.find(e.name + "\t") != std::string::npos);
  CHECK(experiment_registry().size() == 13);
}

TEST_CASE("config errors exit 2 and write nothing") {
  TempDir t;
  const fs::path out = t.path / "out";
  const auto check_rejected = [&](const std::string& body, const std::string& needle) {
    write(t.path / "c.json", body);
    const auto r = run_cli("run " + (t.path / "c.json").string() + " --out " + out.string(), t.path);
    INFO(body);
    CHECK(r.code == 2);
    CHECK(r.err.find(needle) != std::string::npos);
    CHECK(count_files(out) == 0);
  };
  check_rejected(R"({"experiment": "ground-state", "params": {"d": 3, "foo": 1}})", "params.foo: unknown key");
  check_rejected("{\"experiment\": \"evolve\",\n \"grid\": {\"R\": 20 \"N\": 256}}", "line 2, column");
  check_rejected(R"({"experiment": "nonesuch"})", "unknown experiment");
  check_rejected(R"({"experiment": "ground-state", "grid": {"N": 4}})", "grid.N");
  check_rejected(R"({"experiment": "ground-state", "params": {"mu": 0.5}})", "params.mu");
  check_rejected(R"({"experiment": "blowup", "params": {"mu": 1}})", "focusing");
  check_rejected(R"({"experiment": "scattering", "params": {"mu": -1}})", "defocusing");
  check_rejected(R"({"experiment": "strichartz", "options": {"radii": [1]}})", "options.radii: unknown key");
  check_rejected(R"({"experiment": "evolve", "params": {"a": -0.24}})", "override-admissibility");
  check_rejected(R"({"experiment": "evolve", "params": {"a": -0.3}})", "params.a");
  const auto missing = run_cli("run " + (t.path / "absent.json").string(), t.path);
  CHECK(missing.code == 2);
}

TEST_CASE("ground-state run writes the manifest and data, reproducibly") {
  TempDir t;
  const fs::path out = t.path / "out";
  write(t.path / "gs.json",
        R"({"experiment": "ground-state", "params": {"d": 3, "a": -0.1875}, "grid": {"R": 60, "N": 256}})");
  const auto r = run_cli("run " + (t.path / "gs.json").string() + " --out " + out.string(), t.path);
  // The residual check fails for this coupling (algebraic convergence), so the verdict is fail.
  CHECK(r.code == 1);
  REQUIRE(count_files(out) == 2);
  const auto m = manifest_in(out);
  CHECK(std::abs(m["results"]["q_l6"].get<double>() - 3.205250) < 1e-5 * 3.205250);
  CHECK(m["verdict"] == "fail");
  CHECK(m["params"]["nu"].get<double>() == doctest::Approx(0.25));
  CHECK(m["params"]["sigma"].get<double>() == doctest::Approx(0.25));
  CHECK(m["params"]["beta"].get<double>() == doctest::Approx(0.5));
  CHECK(m["config"]["grid"]["N"] == 256);
  CHECK(m.contains("versions"));
  CHECK(m.contains("timestamp"));
  const std::string stem = "ground-state-" + m["config_hash"].get<std::string>();
  REQUIRE(fs::exists(out / (stem + ".csv")));
  CHECK(m["data_files"][0] == stem + ".csv");
  CHECK(slurp(out / (stem + ".csv")).rfind("r,W\n", 0) == 0);

  const std::string json1 = slurp(out / (stem + ".json")), csv1 = slurp(out / (stem + ".csv"));
  const auto again = run_cli("run " + (t.path / "gs.json").string() + " --out " + out.string(), t.path);
  CHECK(again.code == 1);
  CHECK(count_files(out) == 2);
  CHECK(slurp(out / (stem + ".csv")) == csv1);
  CHECK(strip_timestamp(slurp(out / (stem + ".json"))) == strip_timestamp(json1));

  write(t.path / "g0.json", R"({"experiment": "ground-state", "grid": {"R": 60, "N": 512}})");
  CHECK(run_cli("run " + (t.path / "g0.json").string() + " --out " + (t.path / "o0").string(), t.path).code == 0);
}

TEST_CASE("override flag opens the inadmissible window") {
  TempDir t;
  write(t.path / "e.json", R"({"experiment": "evolve", "params": {"a": -0.24}, "grid": {"R": 10, "N": 128},
    "evolution": {"t_end": 0.05, "sample_every": 5}, "data": {"amplitude": 0.5}, "options": {"virial_radius": 2}})");
  const auto r = run_cli("run " + (t.path / "e.json").string() + " --out " + (t.path / "o").string() +
                             " --override-admissibility",
                         t.path);
  CHECK(r.code == 0);
  const auto m = manifest_in(t.path / "o");
  CHECK(m["override_admissibility"] == true);
  CHECK(m["params"]["evolution_admissible"] == false);
}

TEST_CASE("parse_config defaults, fields and hashing") {
  const auto c = parse_config(R"({"experiment": "strichartz", "seed": 3, "options": {"q": "inf"}})");
  CHECK(c.d == 3);
  CHECK(c.a == 0.0);
  CHECK(c.mu == 1.0);
  CHECK(c.R == 20.0);
  CHECK(c.N == 256);
  CHECK(c.seed == 3);
  CHECK(std::isinf(c.options.q));
  CHECK(resolved_config(c)["options"]["q"] == "inf");
  CHECK(resolved_config(c)["options"].size() == 3);

  const auto h = config_hash(c);
  CHECK(h.size() == 16);
  CHECK(config_hash(parse_config(R"({"seed": 3, "options": {"q": "inf"}, "experiment": "strichartz"})")) == h);
  CHECK(config_hash(parse_config(R"({"experiment": "strichartz", "seed": 4, "options": {"q": "inf"}})")) != h);
  // The output directory does not change the hash.
  CHECK(config_hash(parse_config(R"({"experiment": "strichartz", "seed": 3, "options": {"q": "inf"}, "output": "x"})")) ==
        h);

  const auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error(R"({"params": {"d": 3}})", "experiment");
  expect_error(R"({"experiment": "evolve", "evolution": {"t_end": "1"}})", "evolution.t_end");
  expect_error(R"({"experiment": "evolve", "evolution": {"colour": 1}})", "evolution.colour");
  expect_error(R"({"experiment": "evolve", "grid": {"N": 256.5}})", "grid.N");
  expect_error(R"({"experiment": "shifted-bubble", "params": {"d": 4}})", "params.d");
  expect_error(R"({"experiment": "sobolev-equiv", "options": {"s": 3}})", "options.s");
  expect_error(R"({"experiment": "evolve", "options": {"virial_radius": 19}})", "options.virial_radius");
  expect_error(R"({"experiment": "evolve", "data": {"profile": "square"}})", "data.profile");
  expect_error("[1, 2]", "expected an object");
  CHECK_NOTHROW(parse_config(R"({"experiment": "evolve", "params": {"a": -0.24}})", true));
}

TEST_CASE("run_experiment records checks and errors") {
  const auto ok = run_experiment(parse_config(R"({"experiment": "heat-check", "params": {"a": 0.75}})"));
  CHECK(ok.error.empty());
  CHECK(ok.pass());
  CHECK(ok.checks.size() == 3);

  // Data that hits the wall: the check fails rather than throwing.
  const auto wall = run_experiment(parse_config(
      R"({"experiment": "evolve", "grid": {"R": 10, "N": 128}, "data": {"width": 3}, "evolution": {"t_end": 0.5}})"));
  CHECK(wall.error.empty());
  CHECK_FALSE(wall.pass());
  CHECK(wall.results["termination"] == "wall_contamination");
}
