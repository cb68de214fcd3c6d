#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "logem/analysis.hpp"
#include "logem/cli.hpp"

namespace fs = std::filesystem;
using namespace logem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("logem_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path, ignored);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path / name;
    std::ofstream(p) << text;
    return p;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LOGEM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kScalar = R"({
  "scenario": {
    "b": 1.0, "T": 2.0,
    "f": [[0.3]], "g": [[0.4]], "phi": [1.2],
    "levy": [{"rate": 2.0, "law": {"family": "uniform", "lo": -0.5, "hi": 1.0}}]
  },
  "run": {"m": 8, "n_paths": 30, "fine_m": 64, "coarse_m": [2, 4, 8], "seed": 3}
})";

const char* kZero = R"({
  "scenario": {
    "b": 1.0, "T": 1.0,
    "f": [[0, 0], [0, 0]], "g": [[0, 0], [0, 0]], "phi": [1.5, 2.5],
    "levy": [{"rate": 1.0, "law": {"family": "uniform", "lo": -0.5, "hi": 0.5}},
             {"rate": 1.0, "law": {"family": "uniform", "lo": -0.5, "hi": 0.5}}]
  },
  "run": {"m": 4, "n_paths": 10, "fine_m": 32, "coarse_m": [2, 4]}
})";

}  // namespace

TEST_CASE("simulate in process: zero coefficients keep phi(0)") {
  TempDir dir;
  cli::CommandOptions o;
  o.config = dir.write("zero.json", kZero);
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(o, out, err) == cli::kSuccess);
  std::istringstream csv(out.str());
  std::string line;
  std::getline(csv, line);
  CHECK(line == "time,component,X,p,S");
  while (std::getline(csv, line)) {
    const auto last = line.substr(line.rfind(',') + 1);
    const bool first = line.find(",0,") != std::string::npos;
    CHECK(last == (first ? "1.5" : "2.5"));
  }
  CHECK(err.str().find("nodes: 5") != std::string::npos);
}

TEST_CASE("simulate with oracle check") {
  TempDir dir;
  cli::CommandOptions o;
  o.config = dir.write("scalar.json", kScalar);
  o.check_oracle = true;
  o.out = (dir.path / "path.csv").string();
  std::ostringstream out, err;
  CHECK(cli::cmd_simulate(o, out, err) == cli::kSuccess);
  CHECK(out.str().find("oracle max relative deviation") != std::string::npos);
  CHECK(fs::exists(dir.path / "path.csv"));
}

TEST_CASE("oracle check refuses unsupported scenarios with a config error") {
  TempDir dir;
  cli::CommandOptions o;
  std::string coupled = kZero;
  coupled.replace(coupled.find("[[0, 0], [0, 0]]"), 16, "[[0, 0.2], [0.1, 0]]");
  o.config = dir.write("coupled.json", coupled);
  o.check_oracle = true;
  std::ostringstream out, err;
  CHECK(cli::cmd_simulate(o, out, err) == cli::kConfigError);
}

TEST_CASE("converge reports exact for zero coefficients") {
  TempDir dir;
  cli::CommandOptions o;
  o.config = dir.write("zero.json", kZero);
  o.format = OutputFormat::Json;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_converge(o, out, err) == cli::kSuccess);
  const auto report = nlohmann::json::parse(out.str());
  CHECK(report["fit"]["exact"] == true);
  CHECK(err.str().find("exact") != std::string::npos);
}

TEST_CASE("converge flags rounding-level errors instead of fitting noise") {
  TempDir dir;
  cli::CommandOptions o;
  o.config = dir.write("scalar.json", kScalar);
  std::ostringstream out, err;
  REQUIRE(cli::cmd_converge(o, out, err) == cli::kSuccess);
  CHECK(err.str().find("scheme exact") != std::string::npos);
  CHECK(err.str().find("fitted slope") == std::string::npos);
}

TEST_CASE("audit and validate exit codes") {
  TempDir dir;
  const auto good = dir.write("good.json", kScalar);
  std::string neg = kZero;
  neg.replace(neg.find("[[0, 0], [0, 0]]"), 16, "[[0, -0.2], [0.1, 0]]");
  const auto bad = dir.write("bad.json", neg);

  cli::CommandOptions o;
  o.config = good;
  o.out = (dir.path / "audit.json").string();
  std::ostringstream out, err;
  CHECK(cli::cmd_audit(o, out, err) == cli::kSuccess);
  CHECK(out.str().find("positivity margin") != std::string::npos);
  const auto rec = audit_from_json(nlohmann::json::parse(slurp(dir.path / "audit.json")));
  CHECK(rec.clean());
  CHECK(to_json(rec).dump() == nlohmann::json::parse(slurp(dir.path / "audit.json")).dump());

  o.config = bad;
  std::ostringstream out2, err2;
  CHECK(cli::cmd_audit(o, out2, err2) == cli::kValidationFailure);
  CHECK(err2.str().find("positivity") != std::string::npos);

  o.out.reset();
  std::ostringstream out3, err3;
  CHECK(cli::cmd_validate(o, out3, err3) == cli::kValidationFailure);
}

TEST_CASE("binary: exit codes and byte determinism") {
  TempDir dir;
  const auto cfg = dir.write("scalar.json", kScalar);
  const std::string base = "--config " + cfg.string();

  const auto a = dir.path / "a.csv", b = dir.path / "b.csv";
  CHECK(run_cli("simulate " + base + " --out " + a.string()) == 0);
  CHECK(run_cli("simulate " + base + " --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run_cli("simulate " + base + " --seed 4 --out " + b.string()) == 0);
  CHECK(slurp(a) != slurp(b));

  const auto c1 = dir.path / "c1.csv", c8 = dir.path / "c8.csv";
  CHECK(run_cli("converge " + base + " --threads 1 --out " + c1.string()) == 0);
  CHECK(run_cli("converge " + base + " --threads 8 --out " + c8.string()) == 0);
  CHECK(slurp(c1) == slurp(c8));

  // non-nested coarse list
  std::string nested = kScalar;
  nested.replace(nested.find("[2, 4, 8]"), 9, "[3, 4]");
  CHECK(run_cli("converge --config " + dir.write("nn.json", nested).string()) == 2);

  CHECK(run_cli("simulate --config " + dir.write("broken.json", "{").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate " + base + " --format xml") == 2);
  // no partial file left behind when the run fails
  CHECK_FALSE(fs::exists(dir.path / "never.csv"));
  CHECK(run_cli("converge --config " + dir.write("nn2.json", nested).string() + " --out " +
                (dir.path / "never.csv").string()) == 2);
  CHECK_FALSE(fs::exists(dir.path / "never.csv"));
}

TEST_CASE("thread count from environment") {
  ::setenv("SDDE_LOGEM_THREADS", "3", 1);
  CHECK(cli::threads_from_environment() == 3);
  ::setenv("SDDE_LOGEM_THREADS", "zero", 1);
  CHECK(cli::threads_from_environment() == 0);
  ::unsetenv("SDDE_LOGEM_THREADS");
  CHECK(cli::threads_from_environment() == 0);
}
