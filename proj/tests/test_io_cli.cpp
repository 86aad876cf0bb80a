#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmcfol/io.hpp"
#include "cmcfol/oracle.hpp"
#include "cmcfol/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

using namespace cmcfol;
using namespace cmcfol::cli;
namespace fs = std::filesystem;
using io::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("cmcfol_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json round_config() {
  return json::parse(R"({
    "curve": {"center": [0, 0, 1], "a0": 1.0471975511965976},
    "sweep": {"grid": [-0.3, 0.0, 0.3]},
    "solver": {"resolution": 800},
    "verify": {"probes": 30, "checks": ["pairwise_disjoint", "probe_monotone", "fill_scan", "area_bound"]},
    "seed": 3
  })");
}

std::string write_config(const TempDir& d, const json& j, const std::string& name = "config.json") {
  const fs::path p = d.path / name;
  io::write_atomic(p, j.dump(2));
  return p.string();
}

Options out_to(const fs::path& p) {
  Options o;
  o.out = p.string();
  return o;
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir d;
  std::ostringstream log;
  const std::string cfg = write_config(d, round_config());
  CHECK(cmd_solve(cfg, 0.5, out_to(d.path / "a"), log) == kOk);
  CHECK(fs::exists(d.path / "a" / "leaf_+0.5000.obj"));
  CHECK(fs::exists(d.path / "a" / "solve_+0.5000.json"));
  CHECK(cmd_solve(cfg, 1.2, out_to(d.path / "a"), log) == kConfig);
  CHECK(log.str().find("|H| < 1") != std::string::npos);
  CHECK(cmd_solve((d.path / "nope.json").string(), 0.0, out_to(d.path / "a"), log) == kConfig);

  json empty = round_config();
  empty["sweep"]["grid"] = json::array();
  CHECK(cmd_sweep(write_config(d, empty, "empty.json"), out_to(d.path / "b"), log) == kConfig);

  CHECK(cmd_oracle("not-a-suite", "", out_to(d.path / "c"), log) == kConfig);
  CHECK(cmd_oracle("h2-foliation", "", out_to(d.path / "c"), log) == kOk);
  CHECK(fs::exists(d.path / "c" / "oracle_h2_foliation.json"));

  json few = round_config();
  few["solver"]["max_iterations"] = 2;
  few["curve"]["cos"] = {0, 0, 0.2};
  few["curve"]["sin"] = {0, 0, 0};
  CHECK(cmd_solve(write_config(d, few, "few.json"), 0.3, out_to(d.path / "f"), log) == kSolver);
  CHECK(fs::exists(d.path / "f" / "leaf_+0.3000.obj"));
}

TEST_CASE("sweep, verify and negative control") {
  TempDir d;
  std::ostringstream log;
  const std::string cfg = write_config(d, round_config());
  REQUIRE(cmd_sweep(cfg, out_to(d.path / "s"), log) == kOk);
  const json manifest = json::parse(io::read_file(d.path / "s" / "manifest.json"));
  CHECK(manifest["schemaVersion"] == 1);
  CHECK(manifest["complete"] == true);
  CHECK(manifest["leaves"].size() == 3);
  CHECK_FALSE(manifest["config"].contains("output"));
  CHECK(manifest["fingerprint"] == io::fingerprint(manifest["config"]));

  const std::string mpath = (d.path / "s" / "manifest.json").string();
  CHECK(cmd_verify(mpath, {}, log) == kOk);
  const json report = json::parse(io::read_file(d.path / "s" / "report.json"));
  CHECK(report["fingerprint"] == manifest["fingerprint"]);

  // Replace the middle leaf by a jittered copy of the first: it crosses it.
  DiscreteSurface s = io::parse_obj(io::read_file(d.path / "s" / "leaves" / "leaf_000.obj"));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const auto pinned = s.pinned_mask();
  for (std::size_t i = 0; i < pinned.size(); ++i) {
    if (!pinned[i]) s.vertices[i] += 3e-3 * Vec3(g(rng), g(rng), g(rng));
  }
  io::write_atomic(d.path / "s" / "leaves" / "leaf_001.obj", io::format_obj(s));
  CHECK(cmd_verify(mpath, {}, log) == kVerify);
  CHECK(log.str().find("FAIL pairwise_disjoint") != std::string::npos);

  fs::remove(d.path / "s" / "leaves" / "leaf_002.obj");
  CHECK(cmd_verify(mpath, {}, log) == kConfig);
  CHECK(cmd_verify((d.path / "missing.json").string(), {}, log) == kConfig);
}

TEST_CASE("artifacts are byte identical across runs") {
  TempDir d;
  std::ostringstream log;
  const std::string cfg = write_config(d, round_config());
  REQUIRE(cmd_sweep(cfg, out_to(d.path / "one"), log) == kOk);
  REQUIRE(cmd_sweep(cfg, out_to(d.path / "two"), log) == kOk);
  REQUIRE(cmd_verify((d.path / "one" / "manifest.json").string(), {}, log) == kOk);
  REQUIRE(cmd_verify((d.path / "two" / "manifest.json").string(), {}, log) == kOk);
  for (const char* f : {"manifest.json", "sweep.csv", "report.json", "leaves/leaf_001.obj"}) {
    CHECK_MESSAGE(io::read_file(d.path / "one" / f) == io::read_file(d.path / "two" / f), f);
  }
}

TEST_CASE("output directory precedence") {
  TempDir d;
  std::ostringstream log;
  json j = round_config();
  j["output"] = {{"directory", (d.path / "from_config").string()}};
  const std::string cfg = write_config(d, j);

  ::unsetenv(kOutputEnv);
  REQUIRE(cmd_solve(cfg, 0.0, {}, log) == kOk);
  CHECK(fs::exists(d.path / "from_config" / "leaf_+0.0000.obj"));

  ::setenv(kOutputEnv, (d.path / "from_env").c_str(), 1);
  REQUIRE(cmd_solve(cfg, 0.0, {}, log) == kOk);
  CHECK(fs::exists(d.path / "from_env" / "leaf_+0.0000.obj"));

  REQUIRE(cmd_solve(cfg, 0.0, out_to(d.path / "from_flag"), log) == kOk);
  CHECK(fs::exists(d.path / "from_flag" / "leaf_+0.0000.obj"));
  ::unsetenv(kOutputEnv);
}

TEST_CASE("configuration parsing") {
  const io::RunConfig c = io::parse_config(round_config());
  CHECK(c.grid == std::vector<double>{-0.3, 0.0, 0.3});
  CHECK(c.solver.resolution == 800);
  CHECK(c.seed == 3);
  CHECK(c.verify.disjoint);
  CHECK_FALSE(c.verify.hull);
  CHECK(io::to_json(io::parse_config(io::to_json(c))) == io::to_json(c));

  json ranged = round_config();
  ranged["sweep"] = {{"from", -0.8}, {"to", 0.8}, {"step", 0.2}};
  const io::RunConfig r = io::parse_config(ranged);
  REQUIRE(r.grid.size() == 9);
  CHECK(r.grid[4] == 0.0);
  CHECK(r.grid[8] == 0.8);

  auto rejects = [](json j) { CHECK_THROWS_AS(io::parse_config(j), io::ConfigError); };
  json bad = round_config();
  bad["solver"]["resolutoin"] = 10;
  rejects(bad);
  bad = round_config();
  bad["extra"] = 1;
  rejects(bad);
  bad = round_config();
  bad["sweep"]["from"] = 0.0;
  rejects(bad);
  bad = round_config();
  bad["verify"]["checks"] = {"no_such_check"};
  rejects(bad);
  bad = round_config();
  bad["output"] = {{"mesh", "ply"}};
  rejects(bad);
  bad = round_config();
  bad["solver"]["resolution"] = "many";
  rejects(bad);
}

TEST_CASE("OBJ round trip") {
  const DiscreteSurface s = exact_cap(IdealCircle(Vec3(0, 0, 1), std::numbers::pi / 3), 0.4, 500);
  const DiscreteSurface t = io::parse_obj(io::format_obj(s));
  REQUIRE(t.vertices.size() == s.vertices.size());
  bool same = true;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) same = same && s.vertices[i] == t.vertices[i];
  CHECK(same);
  CHECK(t.triangles == s.triangles);
  CHECK(t.boundary == s.boundary);
  CHECK(io::format_obj(t) == io::format_obj(s));
  CHECK_THROWS(io::parse_obj("v 0 0\nf 1 2 3\n"));
}

TEST_CASE("labels and fingerprints") {
  CHECK(io::h_label(0.5) == "+0.5000");
  CHECK(io::h_label(-0.0) == "+0.0000");
  CHECK(io::h_label(-0.25) == "-0.2500");
  CHECK(io::fingerprint(json{{"a", 1}}).size() == 16);
  CHECK(io::fingerprint(json{{"a", 1}}) != io::fingerprint(json{{"a", 2}}));
}
