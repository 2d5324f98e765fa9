#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + CLIFFORD_CLI + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string scene(const std::string& name) { return (fs::path(SCENE_DIR) / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("clifford_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  CHECK(run("solve-mt --scene " + scene("mt_zero.yaml") + " --out " + (out / "a").string()) == 0);
  CHECK(run("solve-mt --scene " + scene("mt_constant_top.yaml") + " --out " + (out / "b").string()) == 2);
  CHECK(run("solve-maxwell --scene " + scene("maxwell_zero.yaml") + " --out " + (out / "c").string()) == 0);
  CHECK(run("verify --suite algebra --seed 3 --out " + (out / "d").string()) == 0);
  CHECK(fs::exists(out / "d" / "verify_algebra.csv"));
  CHECK(run("solve-mt --scene /nonexistent.yaml") == 1);
  CHECK(run("verify --suite nope") == 1);
  CHECK(run("frobnicate") == 1);

  const fs::path bad = out / "bad.yaml";
  std::ofstream(bad) << "version: 1\nalgebra: {m: 2}\nsurprise: true\n";
  CHECK(run("solve-mt --scene " + bad.string() + " --out " + (out / "e").string()) == 1);
  fs::remove_all(out);
}

TEST_CASE("outputs and flags") {
  const fs::path out = scratch("outputs");
  REQUIRE(run("solve-mt --scene " + scene("mt_zero.yaml") + " --resolution 6 --tol 0.5 --out " + out.string()) == 0);
  for (const char* f : {"P.dump", "P_norms.csv", "solution.dump", "solution_norms.csv", "residual.csv", "report.csv"}) {
    CHECK(fs::exists(out / f));
  }
  const std::string report = slurp(out / "report.csv");
  CHECK(report.find("resolution,6\n") != std::string::npos);
  CHECK(report.find("tolerance,0.5\n") != std::string::npos);
  CHECK(report.find("verdict,A\n") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("repeated runs are byte identical") {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  for (const fs::path& dir : {a, b}) {
    REQUIRE(run("solve-maxwell --scene " + scene("maxwell_plane_wave.yaml") + " --seed 5 --out " + dir.string()) == 0);
  }
  int compared = 0;
  for (const auto& f : fs::directory_iterator(a)) {
    CAPTURE(f.path().filename().string());
    CHECK(slurp(f.path()) == slurp(b / f.path().filename()));
    ++compared;
  }
  CHECK(compared >= 10);
  fs::remove_all(a);
  fs::remove_all(b);
}
