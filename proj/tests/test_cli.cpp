#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" ROBIN_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("robin_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("synth writes data, mesh and manifest") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 32 8 --target paper4 --out " + tmp / "clean") == 0);
  CHECK(fs::exists(tmp / "clean/mesh.txt"));
  CHECK(fs::exists(tmp / "clean/data.csv"));
  const auto manifest = nlohmann::json::parse(slurp(tmp / "clean/manifest.json"));
  CHECK(manifest["command"] == "synth");
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("wall_clock_seconds"));
  CHECK(slurp(tmp / "clean/data.csv").find("# provenance clean\n") != std::string::npos);

  REQUIRE(run("synth --annulus 1 2 32 8 --target paper4 --noise 0.02 --seed 7 --out " + tmp / "noisy") == 0);
  CHECK(slurp(tmp / "noisy/data.csv").find("# provenance noisy eps0=0.02 seed=7 ") != std::string::npos);
}

TEST_CASE("seed falls back to the environment") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 32 8 --noise 0.01 --out " + tmp / "a", "ROBIN_RECOVER_SEED=11") == 0);
  REQUIRE(run("synth --annulus 1 2 32 8 --noise 0.01 --seed 11 --out " + tmp / "b") == 0);
  CHECK(slurp(tmp / "a/data.csv") == slurp(tmp / "b/data.csv"));
  CHECK(run("synth --annulus 1 2 32 8 --noise 0.01 --out " + tmp / "c", "ROBIN_RECOVER_SEED=abc") == 2);
}

TEST_CASE("parameter errors exit with 2") {
  TempDir tmp;
  CHECK(run("synth --annulus 2 1 32 8 --out " + tmp / "x") == 2);
  CHECK(run("synth --annulus 1 2 32 8 --noise -0.1 --out " + tmp / "x") == 2);
  CHECK(run("synth --annulus 1 2 32 --out " + tmp / "x") == 2);
  CHECK(run("synth --annulus 1 2 32 8 --target nope --out " + tmp / "x") == 2);
  CHECK(run("reconstruct --data " + tmp / "missing --annulus 1 2 32 8 --out " + tmp / "x") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("inverse crime guard") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 32 8 --out " + tmp / "d") == 0);
  CHECK(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --out " + tmp / "r") == 2);
  CHECK(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --max-iter 3 --allow-inverse-crime --out " +
            tmp / "r") == 4);
}

TEST_CASE("forced stop exits with 4 and still writes outputs") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 40 10 --out " + tmp / "d") == 0);
  CHECK(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --h0 1 --max-iter 1 --out " + tmp / "r") == 4);
  CHECK(count_lines(tmp / "r/trace.csv") == 2);  // header plus one row
  CHECK(slurp(tmp / "r/trace.csv").rfind("iter,F,grad_norm,lambda,rel_err\n", 0) == 0);
  CHECK(slurp(tmp / "r/h.csv").rfind("theta,h\n", 0) == 0);
  CHECK(count_lines(tmp / "r/h.csv") == 33);
  CHECK(fs::exists(tmp / "r/manifest.json"));
}

TEST_CASE("pipeline closure: mesh files and h files feed later commands") {
  TempDir tmp;
  REQUIRE(run("mesh --annulus 1 2 40 10 --out " + tmp / "gen.txt") == 0);
  REQUIRE(run("synth --mesh " + tmp / "gen.txt" + " --out " + tmp / "d") == 0);
  REQUIRE(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --max-iter 2 --out " + tmp / "r1") == 4);
  CHECK(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --max-iter 2 --h0 " + tmp / "r1/h.csv" +
            " --out " + tmp / "r2") == 4);
  CHECK(run("synth --annulus 1 2 40 10 --target-file " + tmp / "r1/h.csv" + " --out " + tmp / "d2") == 0);
}

TEST_CASE("eta sweep writes one directory per value") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 40 10 --noise 0.02 --seed 3 --out " + tmp / "d") == 0);
  CHECK(run("reconstruct --data " + tmp / "d" + " --annulus 1 2 32 8 --max-iter 2 --eta 0 0.01 --jobs 2 --out " +
            tmp / "s") == 4);
  CHECK(fs::exists(tmp / "s/eta_0/trace.csv"));
  CHECK(fs::exists(tmp / "s/eta_0.01/trace.csv"));
  CHECK(fs::exists(tmp / "s/manifest.json"));
}

TEST_CASE("deterministic runs and replay are bitwise identical") {
  TempDir tmp;
  REQUIRE(run("synth --annulus 1 2 40 10 --noise 0.01 --seed 5 --deterministic --out " + tmp / "d") == 0);
  const std::string args = " --annulus 1 2 32 8 --tau 0.2 --max-iter 5 --deterministic --out ";
  REQUIRE(run("reconstruct --data " + tmp / "d" + args + tmp / "a") == 4);
  REQUIRE(run("reconstruct --data " + tmp / "d" + args + tmp / "b") == 4);
  REQUIRE(run("replay " + tmp / "a/manifest.json" + " --out " + tmp / "c") == 4);
  for (const char* f : {"trace.csv", "h.csv"}) {
    CHECK(slurp(tmp / ("a/" + std::string(f))) == slurp(tmp / ("b/" + std::string(f))));
    CHECK(slurp(tmp / ("a/" + std::string(f))) == slurp(tmp / ("c/" + std::string(f))));
  }
}

TEST_CASE("verify reports and exits cleanly when checks pass") {
  TempDir tmp;
  CHECK(run("verify --suite oracle --report " + tmp / "report.csv") == 0);
  const std::string report = slurp(tmp / "report.csv");
  CHECK(report.rfind("suite,check,value,threshold,pass\n", 0) == 0);
  CHECK(report.find(",0\n") == std::string::npos);
  CHECK(run("verify --suite adjoint --seed 3") == 0);
  CHECK(run("verify --suite bogus") == 2);
}
