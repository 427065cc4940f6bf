#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phasepos/ambiguity.hpp"
#include "phasepos/errors.hpp"

namespace phasepos {

/// Empirical quantile with linear interpolation between order statistics
/// (index h = (n-1)*p). Fixed so exported golden files stay stable.
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ConfigError("percentile: empty sample list");
  if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("percentile: p must be in (0, 1)");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double percentile(std::vector<double> samples, double p) {
  std::sort(samples.begin(), samples.end());
  return percentile_sorted(samples, p);
}

/// Error sample for one solved target UE.
struct PositionSample {
  int drop = 0;
  int ue_id = 0;
  double horizontal = 0.0;  // m
  double vertical = 0.0;    // m
  double error_3d = 0.0;    // m
};

/// One double-differenced observable's absolute phase error.
struct PhaseSample {
  int drop = 0;
  int ue_id = 0;
  double abs_error = 0.0;  // rad
};

inline const std::vector<int> kReportPercentiles = {50, 67, 80, 90};

/// Pooled campaign output. Percentiles cover converged, in-hull UEs only.
struct RunStatistics {
  std::vector<PositionSample> position_samples;
  std::vector<PhaseSample> phase_samples;

  // metric name -> percent -> value; metrics: horizontal, vertical,
  // error_3d (m) and dd_phase (rad)
  std::map<std::string, std::map<int, double>> percentiles;

  AmbiguityOutcome ambiguity_tally;
  double convergence_rate = 0.0;  // converged / solver attempts

  std::int64_t total_target_ues = 0;
  std::int64_t out_of_hull_ues = 0;
  std::int64_t unsolvable_ues = 0;     // filtration or pairing left no solvable system
  std::int64_t solver_error_ues = 0;   // solver rejected the geometry
  std::int64_t non_converged_ues = 0;
  std::int64_t solved_ues = 0;

  std::int64_t excluded_ues() const {
    return out_of_hull_ues + unsolvable_ues + solver_error_ues;
  }

  std::vector<double> pool(const std::string& metric) const {
    std::vector<double> v;
    if (metric == "dd_phase") {
      v.reserve(phase_samples.size());
      for (const auto& s : phase_samples) v.push_back(s.abs_error);
      return v;
    }
    v.reserve(position_samples.size());
    for (const auto& s : position_samples) {
      if (metric == "horizontal")
        v.push_back(s.horizontal);
      else if (metric == "vertical")
        v.push_back(s.vertical);
      else if (metric == "error_3d")
        v.push_back(s.error_3d);
      else
        throw ConfigError("unknown metric " + metric);
    }
    return v;
  }

  void compute_percentiles() {
    percentiles.clear();
    for (const auto& metric : {"horizontal", "vertical", "error_3d", "dd_phase"}) {
      auto samples = pool(metric);
      if (samples.empty()) {
        percentiles[metric];  // present but empty
        continue;
      }
      std::sort(samples.begin(), samples.end());
      for (const int p : kReportPercentiles)
        percentiles[metric][p] = percentile_sorted(samples, p / 100.0);
    }
  }
};

}  // namespace phasepos
