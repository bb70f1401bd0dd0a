#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

std::string cli() { return NVRABI_CLI_PATH; }

int run(const std::string& args) {
  const int status = std::system((cli() + " " + args + " > /dev/null 2>&1").c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path workdir() {
  const fs::path d = fs::temp_directory_path() / "nvrabi_cli_test";
  fs::create_directories(d);
  return d;
}

fs::path small_config() {
  const fs::path p = workdir() / "small.cfg";
  std::ofstream out(p);
  out << "[run]\n"
         "n_samples = 500\n"
         "tau_max = 6e-05\n"
         "tau_step = 5e-07\n"
         "seed = 11\n";
  return p;
}

}  // namespace

TEST_CASE("rabi-trace writes CSVs and repeats byte-identically") {
  const fs::path cfg = small_config();
  const fs::path d1 = workdir() / "run1";
  const fs::path d2 = workdir() / "run2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  REQUIRE(run("-c " + cfg.string() + " rabi-trace --omega 220e3 --output-dir " +
              d1.string()) == 0);
  REQUIRE(run("-c " + cfg.string() + " rabi-trace --omega 220e3 --output-dir " +
              d2.string()) == 0);
  for (const char* name : {"trace_on_off.csv", "trace_pi_pulse.csv"}) {
    const std::string a = slurp(d1 / name);
    CHECK(a == slurp(d2 / name));
    CHECK(a.rfind("tau_us,", 0) == 0);  // header with units
  }
}

TEST_CASE("validation failures exit with code 2") {
  const fs::path cfg = small_config();
  CHECK(run("-c " + cfg.string() + " rabi-trace --tau-max 0") == 2);
  CHECK(run("-c /nonexistent/path.cfg rabi-trace") == 2);
  CHECK(run("-c " + cfg.string() + " demod --mode fm") == 2);
}

TEST_CASE("NVRABI_CONFIG supplies the default configuration") {
  const fs::path d = workdir() / "envrun";
  fs::remove_all(d);
  const fs::path p = workdir() / "env.cfg";
  {
    std::ofstream out(p);
    out << "[run]\n"
           "n_samples = 300\n"
           "tau_max = 4e-05\n"
           "tau_step = 5e-07\n"
           "output_dir = " << d.string() << "\n";
  }
  setenv("NVRABI_CONFIG", p.string().c_str(), 1);
  CHECK(run("rabi-trace --omega 150e3") == 0);
  unsetenv("NVRABI_CONFIG");
  CHECK(fs::exists(d / "trace_pi_pulse.csv"));
}

TEST_CASE("different seeds change stochastic output") {
  const fs::path cfg = small_config();
  const fs::path d1 = workdir() / "seed1";
  const fs::path d2 = workdir() / "seed2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  REQUIRE(run("-c " + cfg.string() + " rabi-trace --seed 1 --output-dir " +
              d1.string()) == 0);
  REQUIRE(run("-c " + cfg.string() + " rabi-trace --seed 2 --output-dir " +
              d2.string()) == 0);
  CHECK(slurp(d1 / "trace_pi_pulse.csv") != slurp(d2 / "trace_pi_pulse.csv"));
}
