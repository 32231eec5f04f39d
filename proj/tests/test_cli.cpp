#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using Json = nlohmann::json;

std::string cli_path() {
  const char* p = std::getenv("FLATINV_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string instances_dir() {
  const char* p = std::getenv("FLATINV_INSTANCES");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args, const std::string& out_path = "") {
  std::string cmd = cli_path() + " " + args;
  if (!out_path.empty()) cmd += " --out " + out_path;
  cmd += " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Json load(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return Json::parse(in);
}

}  // namespace

TEST_CASE("torsion of the bundled two-term complex is ln 2") {
  const std::string out = "cli_torsion.json";
  REQUIRE(run("torsion --spec " + instances_dir() + "/two_term_c2.json", out) == 0);
  Json rep = load(out);
  const double torsion = rep["invariants"]["torsion"].get<double>();
  CHECK(std::abs(torsion - std::log(2.0)) < 1e-10);
}

TEST_CASE("pushforward instances pass through the CLI") {
  CHECK(run("pushforward-point --spec " + instances_dir() + "/circle_rot4.json") == 0);
  CHECK(run("pushforward-point --spec " + instances_dir() + "/circle_minus_one.json") == 0);
}

TEST_CASE("char-forms on the line bundle instance passes") {
  CHECK(run("char-forms --spec " + instances_dir() + "/circle_line_a2.json") == 0);
}

TEST_CASE("reports are deterministic for a fixed spec and seed") {
  const std::string spec = instances_dir() + "/torus_sp4.json";
  REQUIRE(run("p-form --spec " + spec, "cli_det_a.json") == 0);
  REQUIRE(run("p-form --spec " + spec, "cli_det_b.json") == 0);
  Json a = load("cli_det_a.json"), b = load("cli_det_b.json");
  a.erase("timing_seconds");
  b.erase("timing_seconds");
  CHECK(a == b);
}

TEST_CASE("the digest changes iff a spec field changes") {
  const std::string spec = instances_dir() + "/circle_line_a2.json";
  REQUIRE(run("char-forms --spec " + spec, "cli_digest_a.json") == 0);
  Json doc = load(spec);
  {
    std::ofstream out("cli_spec_same.json");
    out << doc.dump(2);
  }
  REQUIRE(run("char-forms --spec cli_spec_same.json", "cli_digest_b.json") == 0);
  doc["base"]["resolution"] = 32;
  {
    std::ofstream out("cli_spec_changed.json");
    out << doc.dump(2);
  }
  REQUIRE(run("char-forms --spec cli_spec_changed.json", "cli_digest_c.json") == 0);
  const std::string da = load("cli_digest_a.json")["instance_digest"];
  const std::string db = load("cli_digest_b.json")["instance_digest"];
  const std::string dc = load("cli_digest_c.json")["instance_digest"];
  CHECK(da == db);
  CHECK(da != dc);
}

TEST_CASE("schema errors exit nonzero") {
  {
    std::ofstream out("cli_empty.json");
    out << "{}\n";
  }
  CHECK(run("torsion --spec cli_empty.json") != 0);
  {
    std::ofstream out("cli_bad.json");
    out << "{ not json\n";
  }
  CHECK(run("torsion --spec cli_bad.json") != 0);
  CHECK(run("verify no-such-suite") != 0);
}

TEST_CASE("normal-form command reports the rotation angle") {
  const std::string out = "cli_nf.json";
  REQUIRE(run("normal-form --spec " + instances_dir() + "/normal_rot_pi3.json", out) == 0);
  Json rep = load(out);
  const double angle = rep["invariants"]["angle_0"].get<double>();
  const double rank = rep["invariants"]["hyperbolic_rank"].get<double>();
  CHECK(std::abs(angle - M_PI / 3.0) < 1e-10);
  CHECK(rank == 0.0);
}

TEST_CASE("verify suites run through the CLI") {
  CHECK(run("verify torsion-scalar") == 0);
  CHECK(run("verify normal-form --seed 99") == 0);
}
