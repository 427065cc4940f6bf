#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "phasepos/ambiguity.hpp"
#include "phasepos/errors.hpp"
#include "phasepos/geometry.hpp"
#include "phasepos/measurement.hpp"

namespace phasepos {

/// Neighbor-minus-serving phase difference at one UE. Cancels the UE clock
/// bias; the gNB pair bias c*(b_serving - b_neighbor) survives.
struct SingleDiff {
  int ue_id = -1;
  int neighbor_gnb_id = -1;
  int serving_gnb_id = -1;
  double value = 0.0;                // rad, resolved phases differenced
  double delta_distance_true = 0.0;  // m, d_neighbor - d_serving
};

/// Target-minus-reference single differences for one neighbor. Free of all
/// four clock biases.
struct DoubleDiff {
  int target_ue_id = -1;
  int reference_ue_id = -1;
  int neighbor_gnb_id = -1;
  int serving_gnb_id = -1;
  double value = 0.0;                     // rad
  double reference_delta_distance = 0.0;  // m, known from fixed reference geometry
};

/// The refined observables one position solve consumes.
struct DoubleDiffSet {
  int target_ue_id = -1;
  int serving_gnb_id = -1;
  int reference_ue_id = -1;
  std::vector<DoubleDiff> diffs;
  std::map<int, Position3D> gnb_positions;  // serving + involved neighbors
};

/// Measurement filtration: which links feed the position solve.
struct FilterPolicy {
  bool los_only = true;
  int max_links = 8;  // bound on neighbor links; the serving link is extra
};

/// Differences every neighbor against the serving link. Count = |set| - 1.
inline std::vector<SingleDiff> single_difference(const MeasurementSet& set) {
  const PhaseMeasurement* serving = nullptr;
  for (const auto& m : set.measurements)
    if (m.gnb_id == set.serving_gnb_id) {
      serving = &m;
      break;
    }
  if (serving == nullptr)
    throw GeometryError("single_difference: serving gNB " +
                        std::to_string(set.serving_gnb_id) + " has no measurement");

  std::vector<SingleDiff> diffs;
  diffs.reserve(set.measurements.size() - 1);
  const double serving_phase = resolved_phase_radians(*serving);
  for (const auto& m : set.measurements) {
    if (m.gnb_id == set.serving_gnb_id) continue;
    SingleDiff d;
    d.ue_id = set.ue_id;
    d.neighbor_gnb_id = m.gnb_id;
    d.serving_gnb_id = set.serving_gnb_id;
    d.value = resolved_phase_radians(m) - serving_phase;
    d.delta_distance_true = m.true_distance - serving->true_distance;
    diffs.push_back(d);
  }
  return diffs;
}

/// Pairs target and reference single differences over their common neighbors.
/// Both lists must be pivoted on the same serving gNB. The reference delta
/// distance comes from the reference UE's known geometry.
inline DoubleDiffSet double_difference(const std::vector<SingleDiff>& target,
                                       const std::vector<SingleDiff>& reference,
                                       const std::vector<GnbNode>& gnbs) {
  if (target.empty() || reference.empty())
    throw GeometryError("double_difference: empty single-difference list");
  if (target.front().serving_gnb_id != reference.front().serving_gnb_id)
    throw GeometryError("double_difference: target and reference use different serving gNBs");

  std::map<int, const SingleDiff*> by_neighbor;
  for (const auto& r : reference) by_neighbor[r.neighbor_gnb_id] = &r;

  DoubleDiffSet set;
  set.target_ue_id = target.front().ue_id;
  set.reference_ue_id = reference.front().ue_id;
  set.serving_gnb_id = target.front().serving_gnb_id;
  for (const auto& t : target) {
    const auto it = by_neighbor.find(t.neighbor_gnb_id);
    if (it == by_neighbor.end()) continue;
    DoubleDiff d;
    d.target_ue_id = t.ue_id;
    d.reference_ue_id = it->second->ue_id;
    d.neighbor_gnb_id = t.neighbor_gnb_id;
    d.serving_gnb_id = t.serving_gnb_id;
    d.value = t.value - it->second->value;
    d.reference_delta_distance = it->second->delta_distance_true;
    set.diffs.push_back(d);
  }
  if (set.diffs.size() < 3)
    throw GeometryError("double_difference: only " + std::to_string(set.diffs.size()) +
                        " common neighbors, need >= 3");

  set.gnb_positions[set.serving_gnb_id] = [&] {
    for (const auto& g : gnbs)
      if (g.id == set.serving_gnb_id) return g.position;
    throw GeometryError("double_difference: serving gNB position missing");
  }();
  for (const auto& d : set.diffs) {
    bool found = false;
    for (const auto& g : gnbs)
      if (g.id == d.neighbor_gnb_id) {
        set.gnb_positions[g.id] = g.position;
        found = true;
        break;
      }
    if (!found)
      throw GeometryError("double_difference: neighbor gNB " +
                          std::to_string(d.neighbor_gnb_id) + " position missing");
  }
  return set;
}

/// Keeps the serving link unconditionally, optionally drops NLOS neighbors,
/// and caps the neighbor count preferring LOS links then shorter range.
/// Output preserves the input measurement order.
inline MeasurementSet filter_measurements(const MeasurementSet& set, const FilterPolicy& policy) {
  if (policy.max_links < 0) throw ConfigError("filter: max_links must be >= 0");

  const PhaseMeasurement* serving = nullptr;
  std::vector<const PhaseMeasurement*> neighbors;
  for (const auto& m : set.measurements) {
    if (m.gnb_id == set.serving_gnb_id && serving == nullptr)
      serving = &m;
    else
      neighbors.push_back(&m);
  }
  if (serving == nullptr)
    throw GeometryError("filter_measurements: serving gNB " +
                        std::to_string(set.serving_gnb_id) + " has no measurement");

  if (policy.los_only)
    neighbors.erase(std::remove_if(neighbors.begin(), neighbors.end(),
                                   [](const PhaseMeasurement* m) { return !m->los; }),
                    neighbors.end());
  std::stable_sort(neighbors.begin(), neighbors.end(),
                   [](const PhaseMeasurement* a, const PhaseMeasurement* b) {
                     if (a->los != b->los) return a->los;
                     if (a->true_distance != b->true_distance)
                       return a->true_distance < b->true_distance;
                     return a->gnb_id < b->gnb_id;
                   });
  if (static_cast<int>(neighbors.size()) > policy.max_links)
    neighbors.resize(static_cast<std::size_t>(policy.max_links));

  MeasurementSet out;
  out.ue_id = set.ue_id;
  out.serving_gnb_id = set.serving_gnb_id;
  for (const auto& m : set.measurements) {
    const bool keep = (&m == serving) ||
                      std::find(neighbors.begin(), neighbors.end(), &m) != neighbors.end();
    if (keep) out.measurements.push_back(m);
  }
  if (out.measurements.size() < 4)
    throw GeometryError("filter_measurements: only " +
                        std::to_string(out.measurements.size()) +
                        " measurements remain, need >= 4 for a 3D solve");
  return out;
}

}  // namespace phasepos
