#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const std::string kCli = PHASEPOS_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("phasepos_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_small_config(const fs::path& p, int drops = 4, int ues = 30) {
  std::ofstream out(p);
  out << "{\n  \"n_drops\": " << drops << ",\n  \"ues_per_drop\": " << ues
      << ",\n  \"master_seed\": 11\n}\n";
}

}  // namespace

TEST_CASE("run exports results and succeeds") {
  const auto dir = temp_dir("run");
  const auto config = dir / "config.json";
  write_small_config(config);
  const auto out = dir / "out";
  REQUIRE(run_cli("run --config " + config.string() + " --out " + out.string()) == 0);
  for (const auto* name : {"summary.json", "samples.csv", "cdf_horizontal.csv",
                           "cdf_vertical.csv", "cdf_3d.csv", "cdf_phase.csv"})
    REQUIRE(fs::exists(out / name));
  fs::remove_all(dir);
}

TEST_CASE("json format writes the summary only") {
  const auto dir = temp_dir("json_fmt");
  const auto config = dir / "config.json";
  write_small_config(config);
  const auto out = dir / "out";
  REQUIRE(run_cli("run --config " + config.string() + " --out " + out.string() +
                  " --format json") == 0);
  REQUIRE(fs::exists(out / "summary.json"));
  REQUIRE_FALSE(fs::exists(out / "samples.csv"));
  fs::remove_all(dir);
}

TEST_CASE("repeated runs produce byte-identical exports") {
  const auto dir = temp_dir("determinism");
  const auto config = dir / "config.json";
  write_small_config(config);
  REQUIRE(run_cli("run --config " + config.string() + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("run --config " + config.string() + " --out " + (dir / "b").string()) == 0);
  for (const auto* name : {"summary.json", "samples.csv", "cdf_3d.csv", "cdf_phase.csv"})
    REQUIRE(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  fs::remove_all(dir);
}

TEST_CASE("command-line flags override file values") {
  const auto dir = temp_dir("override");
  const auto config = dir / "config.json";
  write_small_config(config, 4, 30);
  const auto out = dir / "out";
  REQUIRE(run_cli("run --config " + config.string() + " --out " + out.string() +
                  " --drops 5 --seed 99 --scenario los --zeta 0.5 --eta 7") == 0);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  REQUIRE(j.at("config").at("n_drops").get<int>() == 5);
  REQUIRE(j.at("config").at("master_seed").get<std::uint64_t>() == 99);
  REQUIRE(j.at("config").at("scenario").get<std::string>() == "los");
  REQUIRE(j.at("config").at("ambiguity").at("zeta").get<double>() == 0.5);
  REQUIRE(j.at("config").at("ambiguity").at("eta").get<int>() == 7);
  REQUIRE(j.at("ambiguity").at("corrupted_links").get<long long>() > 0);
  fs::remove_all(dir);
}

TEST_CASE("exit code 1 on configuration problems") {
  REQUIRE(run_cli("run --config /nonexistent/config.json") == 1);

  const auto dir = temp_dir("bad_config");
  const auto config = dir / "config.json";
  {
    std::ofstream out(config);
    out << "{\"unknown_field\": true}";
  }
  REQUIRE(run_cli("run --config " + config.string()) == 1);

  const auto bad_zeta = dir / "bad_zeta.json";
  write_small_config(bad_zeta);
  REQUIRE(run_cli("run --config " + bad_zeta.string() + " --zeta 1.5") == 1);
  fs::remove_all(dir);
}

TEST_CASE("exit code 2 on unwritable output") {
  const auto dir = temp_dir("io_error");
  const auto blocker = dir / "file";
  {
    std::ofstream out(blocker);
    out << "x";
  }
  const auto config = dir / "config.json";
  write_small_config(config);
  // output path nested under a regular file cannot be created
  REQUIRE(run_cli("run --config " + config.string() + " --out " +
                  (blocker / "sub").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("exit code 3 when nothing is solvable") {
  const auto dir = temp_dir("unsolvable");
  const auto config = dir / "config.json";
  {
    std::ofstream out(config);
    // a tiny LOS-probability scale makes every neighbor NLOS, so LOS-only
    // filtration always fails
    out << R"({
  "n_drops": 2, "ues_per_drop": 60, "master_seed": 5,
  "scenario": "losnlos",
  "noise": {"los_probability_k": 0.001}
})";
  }
  REQUIRE(run_cli("run --config " + config.string() + " --out " +
                  (dir / "out").string()) == 3);
  fs::remove_all(dir);
}

TEST_CASE("validate self-check passes") { REQUIRE(run_cli("validate") == 0); }

TEST_CASE("sweep runs a small grid") {
  const auto dir = temp_dir("sweep");
  REQUIRE(run_cli("sweep --param zeta --values 0,0.01 --drops 2 --ues 50 --out " +
                  dir.string()) == 0);
  REQUIRE(fs::exists(dir / "sweep.csv"));
  const auto csv = slurp(dir / "sweep.csv");
  REQUIRE(csv.find("zeta,0,") != std::string::npos);
  REQUIRE(csv.find("zeta,0.01,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("calibrate recovers the LOS sigma") {
  // With dd-phase sigma = 2*sigma_los, the 90th percentile of |N(0, 2s)| hits
  // 1.4 rad at s ~ 0.4256; the fit should land nearby.
  const auto dir = temp_dir("calibrate");
  const std::string cmd = kCli + " calibrate --scenario los --target 1.4 --drops 5 --ues 40 > " +
                          (dir / "log.txt").string() + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const auto log = slurp(dir / "log.txt");
  REQUIRE(log.find("fitted sigma_los") != std::string::npos);
  const auto pos = log.find("= ");
  const double fitted = std::stod(log.substr(pos + 2));
  REQUIRE(fitted > 0.36);
  REQUIRE(fitted < 0.50);
  fs::remove_all(dir);
}
