// Command-line front end: Monte-Carlo campaigns, noise calibration,
// parameter sweeps, and a quick self-check.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error,
// 3 campaign produced zero solvable UEs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phasepos/phasepos.hpp"

namespace {

using namespace phasepos;

struct RunFlags {
  std::string config_path;
  std::string out_dir = "results";
  std::string format = "csv";
  std::string scenario;
  std::optional<int> drops;
  std::optional<int> ues;
  std::optional<std::uint64_t> seed;
  std::optional<double> zeta;
  std::optional<int> eta;
  std::optional<int> threads;
};

CampaignConfig build_config(const RunFlags& flags) {
  CampaignConfig config;
  if (!flags.config_path.empty()) config = load_campaign_config(flags.config_path);
  if (flags.drops) config.n_drops = *flags.drops;
  if (flags.ues) config.ues_per_drop = *flags.ues;
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.zeta) config.ambiguity.zeta = *flags.zeta;
  if (flags.eta) config.ambiguity.eta = *flags.eta;
  if (flags.threads) config.threads = *flags.threads;
  if (!flags.scenario.empty())
    config.scenario = flags.scenario == "los" ? Scenario::LosOnly : Scenario::LosNlos;
  return config;
}

void print_percentile_row(const RunStatistics& stats, const char* metric, const char* label,
                          double scale, const char* unit) {
  const auto& row = stats.percentiles.at(metric);
  if (row.empty()) {
    std::printf("  %-12s (no samples)\n", label);
    return;
  }
  std::printf("  %-12s", label);
  for (const int p : kReportPercentiles)
    std::printf("  p%d %8.4f %s", p, row.at(p) * scale, unit);
  std::printf("\n");
}

void print_summary(const RunStatistics& stats) {
  std::printf("UEs: %lld total, %lld out of hull, %lld unsolvable, %lld solved "
              "(convergence %.1f%%)\n",
              static_cast<long long>(stats.total_target_ues),
              static_cast<long long>(stats.out_of_hull_ues),
              static_cast<long long>(stats.unsolvable_ues + stats.solver_error_ues),
              static_cast<long long>(stats.solved_ues), 100.0 * stats.convergence_rate);
  std::printf("Ambiguity: %lld / %lld links corrupted (zeta_hat %.2e)\n",
              static_cast<long long>(stats.ambiguity_tally.corrupted_links),
              static_cast<long long>(stats.ambiguity_tally.total_links),
              stats.ambiguity_tally.zeta_hat());
  print_percentile_row(stats, "horizontal", "horizontal", 100.0, "cm");
  print_percentile_row(stats, "vertical", "vertical", 100.0, "cm");
  print_percentile_row(stats, "error_3d", "3d", 100.0, "cm");
  print_percentile_row(stats, "dd_phase", "dd phase", 1.0, "rad");
}

int cmd_run(const RunFlags& flags) {
  const CampaignConfig config = build_config(flags);
  const RunStatistics stats = run_campaign(config);
  const ExportFormat format = flags.format == "json" ? ExportFormat::Json : ExportFormat::Csv;
  export_results(stats, config, flags.out_dir, format);
  print_summary(stats);
  std::printf("Results written to %s\n", flags.out_dir.c_str());
  if (stats.solved_ues == 0) {
    std::fprintf(stderr, "error: campaign produced zero solvable UEs\n");
    return 3;
  }
  return 0;
}

double phase_error_p90(const CampaignConfig& config) {
  const auto stats = run_campaign(config);
  if (stats.percentiles.at("dd_phase").empty())
    throw ConfigError("calibrate: campaign produced no phase-error samples");
  return stats.percentiles.at("dd_phase").at(90);
}

struct CalibrateFlags {
  std::string config_path;
  std::string scenario = "los";
  std::string param;  // sigma_los | nlos_scale, default depends on scenario
  double target = 0.0;  // 0 = scenario default
  double lo = 0.0, hi = 0.0;
  int drops = 20;
  int ues = 50;
  std::optional<std::uint64_t> seed;
  int steps = 18;
};

int cmd_calibrate(const CalibrateFlags& flags) {
  CampaignConfig config;
  if (!flags.config_path.empty()) config = load_campaign_config(flags.config_path);
  config.n_drops = flags.drops;
  config.ues_per_drop = flags.ues;
  if (flags.seed) config.master_seed = *flags.seed;
  config.scenario = flags.scenario == "los" ? Scenario::LosOnly : Scenario::LosNlos;

  const std::string param =
      !flags.param.empty() ? flags.param
                           : (config.scenario == Scenario::LosOnly ? "sigma_los" : "nlos_scale");
  const double target = flags.target > 0.0 ? flags.target
                        : config.scenario == Scenario::LosOnly ? 1.4
                                                               : 3.4;
  double lo = flags.lo, hi = flags.hi;
  if (lo <= 0.0 && hi <= 0.0) {
    lo = param == "sigma_los" ? 0.01 : 0.05;
    hi = param == "sigma_los" ? 2.0 : 5.0;
  }
  const double base_sigma_nlos = config.noise.sigma_nlos;
  const double base_excess = config.noise.nlos_excess_mean;

  const auto apply = [&](double x) {
    CampaignConfig c = config;
    if (param == "sigma_los") {
      c.noise.sigma_los = x;
    } else {
      c.noise.sigma_nlos = base_sigma_nlos * x;
      c.noise.nlos_excess_mean = base_excess * x;
    }
    return c;
  };

  const double f_lo = phase_error_p90(apply(lo));
  const double f_hi = phase_error_p90(apply(hi));
  if ((f_lo - target) * (f_hi - target) > 0.0)
    throw ConfigError("calibrate: target " + std::to_string(target) +
                      " rad is not bracketed by [" + std::to_string(f_lo) + ", " +
                      std::to_string(f_hi) + "]; widen --lo/--hi");

  double achieved = 0.0, x = 0.5 * (lo + hi);
  for (int i = 0; i < flags.steps; ++i) {
    x = 0.5 * (lo + hi);
    achieved = phase_error_p90(apply(x));
    if ((achieved - target) * (f_lo - target) > 0.0)
      lo = x;
    else
      hi = x;
  }

  std::printf("fitted %s = %.6f (90th-pct dd phase error %.4f rad, target %.4f rad)\n",
              param.c_str(), x, achieved, target);
  if (param == "nlos_scale")
    std::printf("  -> noise.sigma_nlos = %.6f rad, noise.nlos_excess_mean = %.6f m\n",
                base_sigma_nlos * x, base_excess * x);
  return 0;
}

struct SweepFlags {
  std::string config_path;
  std::string param = "zeta";
  std::vector<double> values;
  std::string out_dir;
  std::optional<int> drops;
  std::optional<int> ues;
  std::optional<std::uint64_t> seed;
  std::string scenario;
};

int cmd_sweep(const SweepFlags& flags) {
  RunFlags base;
  base.config_path = flags.config_path;
  base.scenario = flags.scenario;
  base.drops = flags.drops;
  base.ues = flags.ues;
  base.seed = flags.seed;
  const CampaignConfig config = build_config(base);

  std::string csv = "param,value,solved,horizontal_p90,vertical_p90,error_3d_p90,dd_phase_p90,"
                    "zeta_hat\n";
  std::printf("%-18s %10s %8s %12s %12s %12s %12s\n", flags.param.c_str(), "value", "solved",
              "h_p90 [cm]", "v_p90 [cm]", "3d_p90 [cm]", "phase_p90");
  for (const double value : flags.values) {
    CampaignConfig c = config;
    if (flags.param == "zeta")
      c.ambiguity.zeta = value;
    else if (flags.param == "eta")
      c.ambiguity.eta = static_cast<int>(value);
    else if (flags.param == "sigma_los")
      c.noise.sigma_los = value;
    else if (flags.param == "sigma_nlos")
      c.noise.sigma_nlos = value;
    else if (flags.param == "nlos_excess_mean")
      c.noise.nlos_excess_mean = value;
    else
      throw ConfigError("sweep: unknown parameter '" + flags.param + "'");

    const auto stats = run_campaign(c);
    const auto pct = [&](const char* metric) {
      const auto& row = stats.percentiles.at(metric);
      return row.empty() ? std::nan("") : row.at(90);
    };
    std::printf("%-18s %10.4g %8lld %12.4f %12.4f %12.4f %12.4f\n", "", value,
                static_cast<long long>(stats.solved_ues), 100.0 * pct("horizontal"),
                100.0 * pct("vertical"), 100.0 * pct("error_3d"), pct("dd_phase"));
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.10g,%lld,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  flags.param.c_str(), value, static_cast<long long>(stats.solved_ues),
                  pct("horizontal"), pct("vertical"), pct("error_3d"), pct("dd_phase"),
                  stats.ambiguity_tally.zeta_hat());
    csv += line;
  }
  if (!flags.out_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(flags.out_dir, ec);
    if (ec) throw IoError("sweep: cannot create '" + flags.out_dir + "'");
    std::ofstream out(fs::path(flags.out_dir) / "sweep.csv", std::ios::binary);
    if (!out) throw IoError("sweep: cannot write sweep.csv");
    out << csv;
  }
  return 0;
}

// Small-instance property checks; the full acceptance suite lives in tests/.
int cmd_validate() {
  int failed = 0;
  const auto report = [&](const char* name, bool ok, const std::string& detail = "") {
    std::printf("%s  %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : " - ",
                detail.c_str());
    if (!ok) ++failed;
  };

  {  // clock-bias cancellation at +/- 1 ms
    const Wavelength wl;
    NoiseModel quiet;
    quiet.sigma_los = quiet.sigma_nlos = quiet.nlos_excess_mean = 0.0;
    quiet.nlos_enabled = false;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      LayoutConfig layout;
      layout.clock_bias_range = 1e-3;
      const auto dep = generate_layout(layout, 2, seed);
      const auto& target = dep.target_ues[0];
      auto reference = dep.reference_ues[0];
      reference.serving_gnb = target.serving_gnb;
      Rng r1(seed * 2 + 1), r2(seed * 2 + 2);
      const auto dd = double_difference(
          single_difference(synthesize_set(target, dep.gnbs, wl, quiet, r1)),
          single_difference(synthesize_set(reference, dep.gnbs, wl, quiet, r2)), dep.gnbs);
      const double d_serv =
          distance(target.position, dep.gnb_by_id(target.serving_gnb).position);
      for (const auto& d : dd.diffs) {
        const double d_i = distance(target.position, dd.gnb_positions.at(d.neighbor_gnb_id));
        const double geometric = (d_i - d_serv) - d.reference_delta_distance;
        worst = std::max(worst, std::abs(wl.meters() / kTwoPi * d.value - geometric));
      }
    }
    report("clock-bias cancellation (300 scenes, +/-1 ms)", worst < 1e-9,
           "worst " + std::to_string(worst) + " m");
  }

  {  // gradient check
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const Position3D c{rng.uniform(0, 300), rng.uniform(0, 150), rng.uniform(0, 10)};
      const Position3D gi{rng.uniform(0, 300), rng.uniform(0, 150), rng.uniform(3, 10)};
      const Position3D s{rng.uniform(0, 300), rng.uniform(0, 150), rng.uniform(3, 10)};
      if (distance(c, gi) < 1.0 || distance(c, s) < 1.0) continue;
      const auto row = design_row(c, gi, s);
      for (int axis = 0; axis < 3; ++axis) {
        const double h = 1e-4;
        Position3D lo = c, hi = c;
        (axis == 0 ? lo.x : axis == 1 ? lo.y : lo.z) -= h;
        (axis == 0 ? hi.x : axis == 1 ? hi.y : hi.z) += h;
        const double fd = ((distance(hi, gi) - distance(hi, s)) -
                           (distance(lo, gi) - distance(lo, s))) /
                          (2.0 * h);
        worst = std::max(worst, std::abs(row[static_cast<std::size_t>(axis)] - fd));
      }
    }
    report("design-row gradient vs finite differences (300 geometries)", worst < 1e-6,
           "worst " + std::to_string(worst));
  }

  {  // noiseless exactness
    CampaignConfig config;
    config.n_drops = 5;
    config.ues_per_drop = 30;
    config.scenario = Scenario::LosOnly;
    config.noise.sigma_los = 0.0;
    config.noise.sigma_nlos = 0.0;
    config.noise.nlos_excess_mean = 0.0;
    config.ambiguity.zeta = 0.0;
    const auto stats = run_campaign(config);
    const bool ok = stats.solved_ues > 0 && stats.convergence_rate >= 0.99 &&
                    stats.percentiles.at("error_3d").at(90) <= 10.0 * config.solver.epsilon;
    report("noiseless exactness (150 UEs)", ok);
  }

  {  // determinism
    CampaignConfig config;
    config.n_drops = 3;
    config.ues_per_drop = 40;
    const auto a = run_campaign(config);
    const auto b = run_campaign(config);
    bool ok = a.position_samples.size() == b.position_samples.size() &&
              a.percentiles == b.percentiles;
    for (std::size_t i = 0; ok && i < a.position_samples.size(); ++i)
      ok = a.position_samples[i].error_3d == b.position_samples[i].error_3d;
    report("determinism (repeated campaign)", ok);
  }

  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Downlink carrier-phase positioning simulator (indoor factory)"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo campaign and export results");
  run->add_option("--config", run_flags.config_path, "Campaign config file (JSON)");
  run->add_option("--drops", run_flags.drops, "Number of drops");
  run->add_option("--ues", run_flags.ues, "Target UEs per drop");
  run->add_option("--seed", run_flags.seed, "Master seed");
  run->add_option("--scenario", run_flags.scenario, "Propagation scenario")
      ->check(CLI::IsMember({"los", "losnlos"}));
  run->add_option("--zeta", run_flags.zeta, "Wrong-fix probability per link");
  run->add_option("--eta", run_flags.eta, "Wrong-fix magnitude bound");
  run->add_option("--threads", run_flags.threads, "Worker threads (0 = hardware)");
  run->add_option("--out", run_flags.out_dir, "Output directory (default: results)");
  run->add_option("--format", run_flags.format, "Export format")
      ->check(CLI::IsMember({"csv", "json"}));

  CalibrateFlags cal_flags;
  auto* calibrate =
      app.add_subcommand("calibrate", "Fit a noise parameter to a target 90th-pct phase error");
  calibrate->add_option("--config", cal_flags.config_path, "Campaign config file (JSON)");
  calibrate->add_option("--scenario", cal_flags.scenario, "Propagation scenario")
      ->check(CLI::IsMember({"los", "losnlos"}));
  calibrate->add_option("--param", cal_flags.param, "Parameter to fit")
      ->check(CLI::IsMember({"sigma_los", "nlos_scale"}));
  calibrate->add_option("--target", cal_flags.target, "Target 90th-pct phase error [rad]");
  calibrate->add_option("--lo", cal_flags.lo, "Bisection lower bound");
  calibrate->add_option("--hi", cal_flags.hi, "Bisection upper bound");
  calibrate->add_option("--drops", cal_flags.drops, "Drops per evaluation");
  calibrate->add_option("--ues", cal_flags.ues, "Target UEs per drop");
  calibrate->add_option("--seed", cal_flags.seed, "Master seed");
  calibrate->add_option("--steps", cal_flags.steps, "Bisection steps");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run campaigns over a parameter grid");
  sweep->add_option("--config", sweep_flags.config_path, "Campaign config file (JSON)");
  sweep->add_option("--param", sweep_flags.param, "Parameter to sweep")
      ->check(CLI::IsMember({"zeta", "eta", "sigma_los", "sigma_nlos", "nlos_excess_mean"}));
  sweep->add_option("--values", sweep_flags.values, "Grid values")->required()->delimiter(',');
  sweep->add_option("--drops", sweep_flags.drops, "Number of drops");
  sweep->add_option("--ues", sweep_flags.ues, "Target UEs per drop");
  sweep->add_option("--seed", sweep_flags.seed, "Master seed");
  sweep->add_option("--scenario", sweep_flags.scenario, "Propagation scenario")
      ->check(CLI::IsMember({"los", "losnlos"}));
  sweep->add_option("--out", sweep_flags.out_dir, "Directory for sweep.csv");

  auto* validate = app.add_subcommand("validate", "Run the quick property self-check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*calibrate) return cmd_calibrate(cal_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*validate) return cmd_validate();
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
