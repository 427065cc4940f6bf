#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasepos/differencing.hpp"
#include "phasepos/errors.hpp"
#include "phasepos/geometry.hpp"
#include "phasepos/measurement.hpp"

namespace phasepos {

struct SolverConfig {
  double epsilon = 1e-4;    // m, convergence threshold on the update norm
  int max_iterations = 50;

  enum class InitialGuess { ServingGnb, Custom };
  InitialGuess initial_guess_policy = InitialGuess::ServingGnb;
  Position3D custom_initial_guess;

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("solver: epsilon must be > 0");
    if (max_iterations < 1) throw ConfigError("solver: max_iterations must be >= 1");
  }
};

struct EstimationResult {
  Position3D estimate;
  int iterations = 0;
  bool converged = false;
  double final_update_norm = std::numeric_limits<double>::quiet_NaN();
  // Filled via error_metrics when the true position is known.
  double horizontal_error = std::numeric_limits<double>::quiet_NaN();
  double vertical_error = std::numeric_limits<double>::quiet_NaN();
  double error_3d = std::numeric_limits<double>::quiet_NaN();
};

/// Per-iteration record, for diagnostics and convergence tests.
struct IterationRecord {
  Position3D candidate;
  double residual_norm = 0.0;
  double update_norm = 0.0;
};

/// Gradient of the single-differenced range (d_neighbor - d_serving) with
/// respect to the candidate coordinates.
inline std::array<double, 3> design_row(const Position3D& candidate, const Position3D& gnb_i,
                                        const Position3D& serving) {
  const double di = distance(candidate, gnb_i);
  const double ds = distance(candidate, serving);
  if (di < 1e-9 || ds < 1e-9)
    throw GeometryError("design_row: candidate coincides with a gNB");
  return {(candidate.x - gnb_i.x) / di - (candidate.x - serving.x) / ds,
          (candidate.y - gnb_i.y) / di - (candidate.y - serving.y) / ds,
          (candidate.z - gnb_i.z) / di - (candidate.z - serving.z) / ds};
}

/// Residuals in meters: observed double difference minus the value the
/// candidate position predicts.
inline std::vector<double> residual_vector(const Position3D& candidate, const DoubleDiffSet& set,
                                           const Wavelength& wl) {
  const Position3D& serving = set.gnb_positions.at(set.serving_gnb_id);
  const double ds = distance(candidate, serving);
  std::vector<double> h;
  h.reserve(set.diffs.size());
  for (const auto& d : set.diffs) {
    const double di = distance(candidate, set.gnb_positions.at(d.neighbor_gnb_id));
    const double predicted = (di - ds) - d.reference_delta_distance;
    const double observed = wl.meters() / kTwoPi * d.value;
    h.push_back(observed - predicted);
  }
  return h;
}

inline void error_metrics(EstimationResult& result, const Position3D& truth) {
  const double dx = result.estimate.x - truth.x;
  const double dy = result.estimate.y - truth.y;
  const double dz = result.estimate.z - truth.z;
  result.horizontal_error = std::sqrt(dx * dx + dy * dy);
  result.vertical_error = std::abs(dz);
  result.error_3d = std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Iterative least squares on the linearized double-difference system.
/// Each step solves (G'G) delta = G'h and advances the candidate until the
/// update norm drops below epsilon. Non-convergence (iteration budget,
/// diverging updates, candidate escaping the scene) is reported in the
/// result, not thrown; unusable geometry throws.
inline EstimationResult solve_position(const DoubleDiffSet& set, const SolverConfig& config,
                                       const Wavelength& wl,
                                       std::vector<IterationRecord>* trace = nullptr) {
  config.validate();
  if (set.diffs.size() < 3)
    throw GeometryError("solve_position: need >= 3 double differences");

  const Position3D& serving = set.gnb_positions.at(set.serving_gnb_id);
  Position3D candidate;
  if (config.initial_guess_policy == SolverConfig::InitialGuess::Custom) {
    candidate = config.custom_initial_guess;
  } else {
    // The literal serving position makes the first design row singular
    // (zero range to the serving gNB); start one meter below it.
    candidate = {serving.x, serving.y, serving.z - 1.0};
  }

  // Escape box: gNB bounding box inflated by 10x its span.
  Eigen::Vector3d lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::max());
  Eigen::Vector3d hi = -lo;
  for (const auto& [id, p] : set.gnb_positions) {
    lo = lo.cwiseMin(Eigen::Vector3d(p.x, p.y, p.z));
    hi = hi.cwiseMax(Eigen::Vector3d(p.x, p.y, p.z));
  }
  const Eigen::Vector3d span = (hi - lo).cwiseMax(Eigen::Vector3d::Constant(10.0));
  const Eigen::Vector3d box_lo = lo - 10.0 * span;
  const Eigen::Vector3d box_hi = hi + 10.0 * span;

  EstimationResult result;
  const auto n = static_cast<Eigen::Index>(set.diffs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd residuals(n);
  double previous_norm = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= config.max_iterations; ++k) {
    const auto h = residual_vector(candidate, set, wl);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = design_row(candidate, set.gnb_positions.at(set.diffs[static_cast<std::size_t>(i)].neighbor_gnb_id), serving);
      design(i, 0) = row[0];
      design(i, 1) = row[1];
      design(i, 2) = row[2];
      residuals(i) = h[static_cast<std::size_t>(i)];
    }

    const Eigen::Matrix3d normal = design.transpose() * design;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eigs(normal);
    const double eig_min = eigs.eigenvalues().minCoeff();
    const double eig_max = eigs.eigenvalues().maxCoeff();
    if (!(eig_min > 0.0) || eig_max / eig_min > 1e12)
      throw GeometryError("solve_position: ill-conditioned geometry (normal-matrix condition " +
                          std::to_string(eig_min > 0.0 ? eig_max / eig_min
                                                       : std::numeric_limits<double>::infinity()) +
                          ")");

    const Eigen::Vector3d update = normal.ldlt().solve(design.transpose() * residuals);
    candidate.x += update(0);
    candidate.y += update(1);
    candidate.z += update(2);

    const double norm = update.norm();
    result.iterations = k;
    result.final_update_norm = norm;
    if (trace != nullptr)
      trace->push_back({candidate, residuals.norm(), norm});

    if (norm < config.epsilon) {
      result.converged = true;
      break;
    }
    const Eigen::Vector3d c(candidate.x, candidate.y, candidate.z);
    if (norm > 10.0 * previous_norm || (c.array() < box_lo.array()).any() ||
        (c.array() > box_hi.array()).any())
      break;  // diverging
    previous_norm = norm;
  }
  result.estimate = candidate;
  return result;
}

}  // namespace phasepos
