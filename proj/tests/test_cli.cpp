// End-to-end contract tests for the command line binary: report schema,
// exit codes, determinism under a fixed seed, and the enumeration cache
// round trip.  The binary path comes in via HYPTHETA_BIN.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

const fs::path kWorkDir = fs::temp_directory_path() / "hyptheta-cli-test";

int run_cli(const std::string& args, const fs::path& out) {
  std::string cmd = std::string(HYPTHETA_BIN) + " " + args + " > " + out.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json report_of(const std::string& args, int expected_exit = 0) {
  fs::path out = kWorkDir / "out.json";
  REQUIRE(run_cli(args, out) == expected_exit);
  Json rep = Json::parse(slurp(out));
  CHECK(rep["schema_version"] == "hyptheta-report/1");
  return rep;
}

}  // namespace

TEST_CASE("work directory") {
  fs::remove_all(kWorkDir);
  fs::create_directories(kWorkDir);
  REQUIRE(fs::exists(kWorkDir));
}

TEST_CASE("census emits exact counts and exit zero") {
  Json rep = report_of("census --genus 3");
  CHECK(rep["command"] == "census");
  CHECK(rep["pass"] == true);
  REQUIRE(rep["checks"].size() == 2);
  const Json& parity = rep["checks"][0];
  CHECK(parity["name"] == "census/parity");
  CHECK(parity["expected"]["even"] == 36);
  CHECK(parity["observed"]["even"] == 36);
  CHECK(parity["observed"]["odd"] == 28);
  CHECK(parity["pass"] == true);
  const Json& mult = rep["checks"][1];
  CHECK(mult["observed"]["m0"] == 35);
  CHECK(mult["observed"]["m1"] == 28);
  CHECK(mult["observed"]["m2"] == 1);
  for (int g = 1; g <= 4; ++g)
    CHECK(report_of("census --genus " + std::to_string(g))["pass"] == true);
}

TEST_CASE("goepel classifies and reports structure") {
  Json rep = report_of("goepel --genus 3 --rank 3 --no-cache");
  CHECK(rep["pass"] == true);
  bool saw_split = false;
  for (const Json& chk : rep["checks"]) {
    if (chk["name"] == "goepel/group-count") CHECK(chk["observed"] == 135);
    if (chk["name"] == "goepel/wholly-even-split") {
      saw_split = true;
      CHECK(chk["observed"]["plain"] == 105);
      CHECK(chk["observed"]["singular"] == 30);
    }
  }
  CHECK(saw_split);
}

TEST_CASE("goepel cache is created and reused") {
  fs::path cache_dir = kWorkDir / "cache";
  fs::remove_all(cache_dir);
  std::string args = "goepel --genus 3 --rank 2 --cache-dir " + cache_dir.string();
  Json first = report_of(args);
  CHECK(first["pass"] == true);
  fs::path cache_file = cache_dir / "goepel-g3-r2.cache";
  REQUIRE(fs::exists(cache_file));
  auto stamp = fs::last_write_time(cache_file);
  std::string bytes = slurp(cache_file);
  {
    std::istringstream header(bytes);
    std::string magic;
    int version = 0, g = 0, r = 0;
    long long count = 0;
    header >> magic >> version >> g >> r >> count;
    CHECK(magic == "hyptheta-goepel-cache");
    CHECK(version == 1);
    CHECK(g == 3);
    CHECK(r == 2);
    CHECK(count == 315);
  }
  Json second = report_of(args);
  CHECK(second["pass"] == true);
  CHECK(fs::last_write_time(cache_file) == stamp);  // reused, not rewritten
  CHECK(second["checks"] == first["checks"]);
}

TEST_CASE("corrupt cache is rejected and rebuilt") {
  fs::path cache_dir = kWorkDir / "cache-bad";
  fs::create_directories(cache_dir);
  std::ofstream(cache_dir / "goepel-g3-r2.cache") << "hyptheta-goepel-cache 1 3 2 2\n0 1\n";
  Json rep = report_of("goepel --genus 3 --rank 2 --cache-dir " + cache_dir.string());
  CHECK(rep["pass"] == true);  // falls back to fresh enumeration
  for (const Json& chk : rep["checks"])
    if (chk["name"] == "goepel/group-count") CHECK(chk["observed"] == 315);
}

TEST_CASE("identities run is deterministic for a fixed seed") {
  fs::path a = kWorkDir / "ids-a.json", b = kWorkDir / "ids-b.json";
  REQUIRE(run_cli("identities --genus 3 --trials 2 --seed 11", a) == 0);
  REQUIRE(run_cli("identities --genus 3 --trials 2 --seed 11", b) == 0);
  CHECK(slurp(a) == slurp(b));
  Json rep = Json::parse(slurp(a));
  CHECK(rep["pass"] == true);
  int identity_checks = 0;
  for (const Json& chk : rep["checks"]) {
    if (chk["name"] == "identity/I1-properties") continue;
    ++identity_checks;
    CHECK(chk["observed"]["sign"] == 1);
  }
  CHECK(identity_checks == 2 * 5);  // trials x genus-3 identity battery
  Json other = Json::parse(slurp(kWorkDir / "ids-a.json"));
  REQUIRE(run_cli("identities --genus 3 --trials 2 --seed 12", b) == 0);
  CHECK(slurp(a) != slurp(b));  // seed actually feeds the sample
}

TEST_CASE("numeric accepts inline roots, files, and defaults") {
  Json inline_rep = report_of("numeric --roots -2,-1/2,1,3 --checks periods,agm");
  CHECK(inline_rep["pass"] == true);
  CHECK(inline_rep["config"]["roots"].size() == 4);
  CHECK(inline_rep["config"]["roots"][1] == -0.5);

  fs::path roots_file = kWorkDir / "roots.txt";
  std::ofstream(roots_file) << "-3\n-1\n0\n2\n3\n5\n";
  Json file_rep = report_of("numeric --roots " + roots_file.string() + " --checks periods,thomae");
  CHECK(file_rep["pass"] == true);
  CHECK(file_rep["config"]["roots"].size() == 6);

  Json def_rep = report_of("numeric --genus 2 --checks periods,heat");
  CHECK(def_rep["pass"] == true);
  CHECK(def_rep["config"]["roots"].size() == 6);
  CHECK(def_rep["config"]["roots"][5] == 5.0);
}

TEST_CASE("numeric rejects malformed curves with a diagnostic") {
  fs::path out = kWorkDir / "bad.json";
  CHECK(run_cli("numeric --roots 3,1,2,5 --checks periods", out) == 1);
  Json rep = Json::parse(slurp(out));
  CHECK(rep["pass"] == false);
  REQUIRE(rep["checks"].size() == 1);
  CHECK(rep["checks"][0]["name"] == "run/error");
  CHECK(run_cli("numeric --roots 1,2,3 --checks periods", out) == 1);
  CHECK(Json::parse(slurp(out))["pass"] == false);
}

TEST_CASE("bad arguments exit nonzero without a report") {
  fs::path out = kWorkDir / "argv.json";
  CHECK(run_cli("census --genus 9", out) != 0);
  CHECK(run_cli("bogus", out) != 0);
  CHECK(run_cli("", out) != 0);  // subcommand is required
  CHECK(run_cli("identities --genus 2", out) != 0);
}

TEST_CASE("out flag writes the report to a file") {
  fs::path target = kWorkDir / "written.json";
  fs::path console = kWorkDir / "console.txt";
  REQUIRE(run_cli("census --genus 1 --out " + target.string(), console) == 0);
  CHECK(slurp(console).empty());
  Json rep = Json::parse(slurp(target));
  CHECK(rep["pass"] == true);
  CHECK(rep["checks"][0]["observed"]["even"] == 3);
}
