#pragma once

#include <stdexcept>

namespace phasepos {

/// Invalid or inconsistent configuration (grid does not fit the hall,
/// negative noise sigma, bad percentile argument, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometry unusable for estimation: degenerate hull, missing serving link,
/// fewer than three common neighbors, singular or ill-conditioned design.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failures while exporting results.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phasepos
