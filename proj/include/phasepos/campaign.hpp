#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "phasepos/ambiguity.hpp"
#include "phasepos/differencing.hpp"
#include "phasepos/errors.hpp"
#include "phasepos/estimator.hpp"
#include "phasepos/geometry.hpp"
#include "phasepos/measurement.hpp"
#include "phasepos/rng.hpp"
#include "phasepos/statistics.hpp"

namespace phasepos {

enum class Scenario { LosOnly, LosNlos };

struct CampaignConfig {
  LayoutConfig layout;
  NoiseModel noise;
  AmbiguityModel ambiguity;
  SolverConfig solver;
  FilterPolicy filter;
  Wavelength wavelength;
  int n_drops = 100;
  int ues_per_drop = 100;
  Scenario scenario = Scenario::LosNlos;
  std::uint64_t master_seed = 1;
  int threads = 1;  // drops are independent; results do not depend on this

  void validate() const {
    layout.validate();
    noise.validate();
    ambiguity.validate();
    solver.validate();
    if (n_drops < 1 || ues_per_drop < 1)
      throw ConfigError("campaign: n_drops and ues_per_drop must be >= 1");
    if (static_cast<std::int64_t>(n_drops) * ues_per_drop < 100)
      throw ConfigError("campaign: n_drops * ues_per_drop must be >= 100 for percentile reporting");
    if (threads < 0) throw ConfigError("campaign: threads must be >= 0 (0 = hardware)");
  }

  /// The LOS-only scenario switches the NLOS machinery off.
  NoiseModel effective_noise() const {
    NoiseModel n = noise;
    n.nlos_enabled = scenario == Scenario::LosNlos;
    return n;
  }
};

namespace detail {

struct DropResult {
  std::vector<PositionSample> position_samples;
  std::vector<PhaseSample> phase_samples;
  std::vector<std::int64_t> per_link_error;
  std::int64_t out_of_hull = 0;
  std::int64_t unsolvable = 0;
  std::int64_t solver_error = 0;
  std::int64_t non_converged = 0;
  std::int64_t solved = 0;
};

/// Index of the reference UE nearest to the target's serving gNB; ties go to
/// the lowest index.
inline std::size_t pick_reference(const Deployment& dep, int serving_gnb_id) {
  const Position3D& serving = dep.gnb_by_id(serving_gnb_id).position;
  std::size_t best = 0;
  double best_d = distance(dep.reference_ues.front().position, serving);
  for (std::size_t r = 1; r < dep.reference_ues.size(); ++r) {
    const double d = distance(dep.reference_ues[r].position, serving);
    if (d < best_d) {
      best = r;
      best_d = d;
    }
  }
  return best;
}

inline DropResult run_drop(const CampaignConfig& config, int drop) {
  DropResult out;
  const NoiseModel noise = config.effective_noise();
  const Wavelength& wl = config.wavelength;

  const Deployment dep = generate_layout(
      config.layout, config.ues_per_drop,
      derive_seed(config.master_seed, static_cast<std::uint64_t>(drop), 0, Stream::Layout));

  // Reference UEs measure every gNB once per drop; the sets are re-pivoted
  // per target below. Corruption happens once per physical link.
  std::vector<std::vector<PhaseMeasurement>> reference_links(dep.reference_ues.size());
  for (std::size_t r = 0; r < dep.reference_ues.size(); ++r) {
    const auto& ref = dep.reference_ues[r];
    Rng meas_rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(drop),
                             static_cast<std::uint64_t>(ref.id), Stream::ReferenceMeasurement));
    Rng amb_rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(drop),
                            static_cast<std::uint64_t>(ref.id), Stream::ReferenceAmbiguity));
    auto& links = reference_links[r];
    links.reserve(dep.gnbs.size());
    for (const auto& g : dep.gnbs)
      links.push_back(synthesize_measurement(g, ref, wl, noise, meas_rng));
    for (auto& m : links) {
      const PhaseMeasurement corrupted = inject_ambiguity_error(m, config.ambiguity, amb_rng);
      out.per_link_error.push_back(corrupted.integer_ambiguity - m.integer_ambiguity);
      m = corrupted;
    }
  }

  for (int u = 0; u < config.ues_per_drop; ++u) {
    const UeNode& ue = dep.target_ues[static_cast<std::size_t>(u)];
    Rng meas_rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(drop),
                             static_cast<std::uint64_t>(ue.id), Stream::TargetMeasurement));
    MeasurementSet target_set = synthesize_set(ue, dep.gnbs, wl, noise, meas_rng);
    Rng amb_rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(drop),
                            static_cast<std::uint64_t>(ue.id), Stream::TargetAmbiguity));
    for (auto& m : target_set.measurements) {
      const PhaseMeasurement corrupted = inject_ambiguity_error(m, config.ambiguity, amb_rng);
      out.per_link_error.push_back(corrupted.integer_ambiguity - m.integer_ambiguity);
      m = corrupted;
    }

    if (!in_convex_hull(ue.position, dep.gnbs)) {
      ++out.out_of_hull;
      continue;
    }

    const std::size_t ref_index = pick_reference(dep, ue.serving_gnb);
    MeasurementSet reference_set;
    reference_set.ue_id = dep.reference_ues[ref_index].id;
    reference_set.serving_gnb_id = ue.serving_gnb;  // pivot on the target's serving gNB
    reference_set.measurements = reference_links[ref_index];

    // Measurement-domain statistic over every common neighbor, before
    // filtration: |observed - geometric| double difference in radians.
    {
      const auto dd_all = double_difference(single_difference(target_set),
                                            single_difference(reference_set), dep.gnbs);
      const double d_serv = distance(ue.position, dep.gnb_by_id(ue.serving_gnb).position);
      for (const auto& d : dd_all.diffs) {
        const double d_i = distance(ue.position, dd_all.gnb_positions.at(d.neighbor_gnb_id));
        const double dd_true = (d_i - d_serv) - d.reference_delta_distance;
        out.phase_samples.push_back(
            {drop, ue.id, std::abs(d.value - kTwoPi / wl.meters() * dd_true)});
      }
    }

    DoubleDiffSet dd;
    try {
      const MeasurementSet target_filtered = filter_measurements(target_set, config.filter);
      FilterPolicy reference_policy;
      reference_policy.los_only = config.filter.los_only;
      reference_policy.max_links = std::numeric_limits<int>::max();
      const MeasurementSet reference_filtered =
          filter_measurements(reference_set, reference_policy);
      dd = double_difference(single_difference(target_filtered),
                             single_difference(reference_filtered), dep.gnbs);
    } catch (const GeometryError&) {
      ++out.unsolvable;
      continue;
    }

    EstimationResult result;
    try {
      result = solve_position(dd, config.solver, wl);
    } catch (const GeometryError&) {
      ++out.solver_error;
      continue;
    }

    if (!result.converged) {
      ++out.non_converged;
      continue;
    }
    ++out.solved;
    error_metrics(result, ue.position);
    out.position_samples.push_back(
        {drop, ue.id, result.horizontal_error, result.vertical_error, result.error_3d});
  }
  return out;
}

}  // namespace detail

/// Runs the Monte-Carlo campaign. Output is a pure function of the config;
/// drops execute on `threads` workers but are merged in drop order.
inline RunStatistics run_campaign(const CampaignConfig& config) {
  config.validate();

  std::vector<detail::DropResult> drops(static_cast<std::size_t>(config.n_drops));
  unsigned worker_count = config.threads == 0 ? std::thread::hardware_concurrency()
                                              : static_cast<unsigned>(config.threads);
  worker_count = std::max(1u, std::min<unsigned>(worker_count, static_cast<unsigned>(config.n_drops)));

  if (worker_count == 1) {
    for (int d = 0; d < config.n_drops; ++d)
      drops[static_cast<std::size_t>(d)] = detail::run_drop(config, d);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&, w] {
        for (int d = static_cast<int>(w); d < config.n_drops; d += static_cast<int>(worker_count))
          drops[static_cast<std::size_t>(d)] = detail::run_drop(config, d);
      });
    }
    for (auto& t : workers) t.join();
  }

  RunStatistics stats;
  std::vector<std::int64_t> per_link_error;
  for (const auto& d : drops) {
    stats.position_samples.insert(stats.position_samples.end(), d.position_samples.begin(),
                                  d.position_samples.end());
    stats.phase_samples.insert(stats.phase_samples.end(), d.phase_samples.begin(),
                               d.phase_samples.end());
    per_link_error.insert(per_link_error.end(), d.per_link_error.begin(), d.per_link_error.end());
    stats.out_of_hull_ues += d.out_of_hull;
    stats.unsolvable_ues += d.unsolvable;
    stats.solver_error_ues += d.solver_error;
    stats.non_converged_ues += d.non_converged;
    stats.solved_ues += d.solved;
  }
  stats.total_target_ues = static_cast<std::int64_t>(config.n_drops) * config.ues_per_drop;
  stats.ambiguity_tally = tally(std::move(per_link_error));
  const std::int64_t attempts =
      stats.solved_ues + stats.non_converged_ues + stats.solver_error_ues;
  stats.convergence_rate =
      attempts == 0 ? 0.0 : static_cast<double>(stats.solved_ues) / static_cast<double>(attempts);
  stats.compute_percentiles();
  return stats;
}

}  // namespace phasepos
