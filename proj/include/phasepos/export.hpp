#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasepos/config_io.hpp"
#include "phasepos/errors.hpp"
#include "phasepos/statistics.hpp"

namespace phasepos {

enum class ExportFormat { Csv, Json };

namespace detail {

// 15 significant digits, deterministic across runs.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);  // binary: fixed newlines everywhere
  if (!out) throw IoError("export: cannot write '" + p.string() + "'");
  return out;
}

inline void write_cdf(const std::filesystem::path& p, std::vector<double> samples) {
  auto out = open_out(p);
  out << "error_value,cumulative_probability\n";
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out << fmt_double(samples[i]) << "," << fmt_double(static_cast<double>(i + 1) / n) << "\n";
  if (!out) throw IoError("export: write failed for '" + p.string() + "'");
}

inline json summary_json(const RunStatistics& stats, const CampaignConfig& config) {
  json j;
  j["config"] = campaign_config_to_json(config);
  j["counts"] = {{"target_ues", stats.total_target_ues},
                 {"out_of_hull", stats.out_of_hull_ues},
                 {"unsolvable", stats.unsolvable_ues},
                 {"solver_errors", stats.solver_error_ues},
                 {"non_converged", stats.non_converged_ues},
                 {"solved", stats.solved_ues},
                 {"excluded", stats.excluded_ues()}};
  j["convergence_rate"] = stats.convergence_rate;
  j["ambiguity"] = {{"total_links", stats.ambiguity_tally.total_links},
                    {"corrupted_links", stats.ambiguity_tally.corrupted_links},
                    {"zeta_hat", stats.ambiguity_tally.zeta_hat()},
                    {"zeta_configured", config.ambiguity.zeta}};
  json percentiles;
  for (const auto& [metric, per_p] : stats.percentiles) {
    json m = json::object();
    for (const auto& [p, value] : per_p) m[std::to_string(p)] = value;
    percentiles[metric] = m;
  }
  j["percentiles"] = percentiles;
  j["sample_counts"] = {{"position", stats.position_samples.size()},
                        {"dd_phase", stats.phase_samples.size()}};
  return j;
}

}  // namespace detail

/// Writes summary.json and, for the CSV format, samples.csv plus one
/// cdf_<metric>.csv per metric, into `dir` (created if missing).
inline void export_results(const RunStatistics& stats, const CampaignConfig& config,
                           const std::filesystem::path& dir, ExportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("export: cannot create directory '" + dir.string() + "': " + ec.message());

  {
    auto out = detail::open_out(dir / "summary.json");
    out << detail::summary_json(stats, config).dump(2) << "\n";
    if (!out) throw IoError("export: write failed for summary.json");
  }
  if (format == ExportFormat::Json) return;

  {
    auto out = detail::open_out(dir / "samples.csv");
    out << "ue_id,drop,metric,value\n";
    for (const auto& s : stats.position_samples) {
      out << s.ue_id << "," << s.drop << ",horizontal," << detail::fmt_double(s.horizontal) << "\n";
      out << s.ue_id << "," << s.drop << ",vertical," << detail::fmt_double(s.vertical) << "\n";
      out << s.ue_id << "," << s.drop << ",error_3d," << detail::fmt_double(s.error_3d) << "\n";
    }
    for (const auto& s : stats.phase_samples)
      out << s.ue_id << "," << s.drop << ",dd_phase," << detail::fmt_double(s.abs_error) << "\n";
    if (!out) throw IoError("export: write failed for samples.csv");
  }

  detail::write_cdf(dir / "cdf_horizontal.csv", stats.pool("horizontal"));
  detail::write_cdf(dir / "cdf_vertical.csv", stats.pool("vertical"));
  detail::write_cdf(dir / "cdf_3d.csv", stats.pool("error_3d"));
  detail::write_cdf(dir / "cdf_phase.csv", stats.pool("dd_phase"));
}

}  // namespace phasepos
