#pragma once

#include <cstdint>
#include <vector>

#include "phasepos/errors.hpp"
#include "phasepos/measurement.hpp"
#include "phasepos/rng.hpp"

namespace phasepos {

/// Bound on a wrong fix, in cycles. CyclesTimesNe scales the true cycle
/// count (bound = eta * N); CyclesTimesEta bounds the error at eta cycles.
enum class MagnitudeMode { CyclesTimesNe, CyclesTimesEta };

struct AmbiguityModel {
  double zeta = 0.0;  // per-link probability of a wrong fix
  int eta = 3;
  MagnitudeMode magnitude_mode = MagnitudeMode::CyclesTimesEta;

  void validate() const {
    if (zeta < 0.0 || zeta > 1.0) throw ConfigError("ambiguity: zeta must be in [0, 1]");
    if (eta < 1) throw ConfigError("ambiguity: eta must be >= 1");
  }
};

/// Resolved phase in radians: the fractional observable plus the stored
/// cycle count (true or corrupted).
inline double resolved_phase_radians(const PhaseMeasurement& m) {
  return m.phi + kTwoPi * static_cast<double>(m.integer_ambiguity);
}

/// Meters-scaled observable with lambda*N restored. With the true N this is
/// exactly d + c*(b_ue - b_gnb) + nu.
inline double resolve_ideal(const PhaseMeasurement& m, const Wavelength& wl) {
  return wl.meters() / kTwoPi * resolved_phase_radians(m);
}

/// With probability zeta, shifts N by a nonzero integer drawn uniformly from
/// [-Nt, Nt]; otherwise returns the measurement unchanged. Consumes one
/// Bernoulli draw per call.
inline PhaseMeasurement inject_ambiguity_error(const PhaseMeasurement& m,
                                               const AmbiguityModel& model, Rng& rng) {
  model.validate();
  if (!rng.bernoulli(model.zeta)) return m;
  const std::int64_t bound = model.magnitude_mode == MagnitudeMode::CyclesTimesNe
                                 ? static_cast<std::int64_t>(model.eta) * m.integer_ambiguity
                                 : static_cast<std::int64_t>(model.eta);
  if (bound < 1) return m;
  // k in [1, 2*bound] maps onto {-bound..-1} u {1..bound}
  const std::int64_t k = 1 + static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(2 * bound)));
  const std::int64_t error = k <= bound ? -k : k - bound;
  PhaseMeasurement out = m;
  out.integer_ambiguity += error;
  return out;
}

/// Wrong-fix counts for a run; zeta_hat = E / T.
struct AmbiguityOutcome {
  std::int64_t total_links = 0;      // T
  std::int64_t corrupted_links = 0;  // E
  std::vector<std::int64_t> per_link_error;  // cycles, one entry per measurement

  double zeta_hat() const {
    return total_links == 0 ? 0.0
                            : static_cast<double>(corrupted_links) / static_cast<double>(total_links);
  }
};

inline AmbiguityOutcome tally(std::vector<std::int64_t> per_link_error) {
  AmbiguityOutcome out;
  out.total_links = static_cast<std::int64_t>(per_link_error.size());
  for (const auto e : per_link_error)
    if (e != 0) ++out.corrupted_links;
  out.per_link_error = std::move(per_link_error);
  return out;
}

}  // namespace phasepos
