#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "phasepos/errors.hpp"
#include "phasepos/geometry.hpp"
#include "phasepos/rng.hpp"

namespace phasepos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Carrier wavelength; lambda = c / frequency by construction.
class Wavelength {
 public:
  explicit Wavelength(double carrier_frequency_hz = 3.5e9)
      : frequency_(carrier_frequency_hz), lambda_(kSpeedOfLight / carrier_frequency_hz) {
    if (!(carrier_frequency_hz > 0.0))
      throw ConfigError("wavelength: carrier frequency must be positive");
  }

  double frequency() const { return frequency_; }
  double meters() const { return lambda_; }

 private:
  double frequency_;
  double lambda_;
};

/// Per-link error model. Phase sigmas are radians; the NLOS excess path is an
/// exponential positive range bias in meters. P(LOS) decays as
/// exp(-d2d / los_probability_k).
struct NoiseModel {
  double sigma_los = 0.4256;        // rad
  double sigma_nlos = 0.64;         // rad
  double nlos_excess_mean = 0.012;  // m
  double los_probability_k = 78.0;  // m
  bool nlos_enabled = true;

  void validate() const {
    if (sigma_los < 0.0 || sigma_nlos < 0.0)
      throw ConfigError("noise: phase sigmas must be >= 0");
    if (nlos_excess_mean < 0.0) throw ConfigError("noise: nlos_excess_mean must be >= 0");
    if (nlos_enabled && !(los_probability_k > 0.0))
      throw ConfigError("noise: los_probability_k must be > 0 when NLOS is enabled");
  }
};

/// One link's carrier-phase observable.
///
/// phi is the meters-scaled observable expressed in radians with the true
/// integer cycle count removed:
///   (lambda / 2pi) * phi = d + c*(b_ue - b_gnb) + nu - lambda*N,
/// with N = floor(d / lambda) stored separately. Restoring lambda*N (see the
/// ambiguity module) recovers the full-range observable, so a perfect
/// ambiguity fix is exact by construction and a wrong fix is an explicit
/// edit of N.
struct PhaseMeasurement {
  int gnb_id = -1;
  int ue_id = -1;
  double phi = 0.0;                     // rad, fractional observable
  double true_distance = 0.0;           // m
  bool los = true;
  std::int64_t integer_ambiguity = 0;   // cycles, N
  double noise_draw = 0.0;              // m, nu
};

/// All observables one UE collected in a drop, keyed by its serving gNB.
struct MeasurementSet {
  int ue_id = -1;
  int serving_gnb_id = -1;
  std::vector<PhaseMeasurement> measurements;
};

/// Unwrapped phase at range d: 2*pi*d / lambda (not reduced mod 2pi).
inline double true_phase(double d, const Wavelength& wl) {
  return kTwoPi * d / wl.meters();
}

/// Maps a phase error in radians to a range error in meters.
inline double phase_error_to_distance(double phase_error, const Wavelength& wl) {
  return wl.meters() * phase_error / kTwoPi;
}

/// Bernoulli LOS draw: P(LOS) = exp(-d2d / k). Always LOS when NLOS is
/// disabled (no draw consumed).
inline bool los_state(double d2d, const NoiseModel& model, Rng& rng) {
  if (!model.nlos_enabled) return true;
  return rng.bernoulli(std::exp(-d2d / model.los_probability_k));
}

/// Synthesizes one link. Draw order per link: LOS state (when NLOS enabled),
/// Gaussian phase noise (two uniforms), exponential excess path (NLOS only).
inline PhaseMeasurement synthesize_measurement(const GnbNode& gnb, const UeNode& ue,
                                               const Wavelength& wl,
                                               const NoiseModel& model, Rng& rng) {
  PhaseMeasurement m;
  m.gnb_id = gnb.id;
  m.ue_id = ue.id;
  m.true_distance = distance(gnb.position, ue.position);
  m.los = los_state(distance_2d(gnb.position, ue.position), model, rng);

  const double sigma = m.los ? model.sigma_los : model.sigma_nlos;
  m.noise_draw = wl.meters() * rng.normal(0.0, sigma) / kTwoPi;
  if (!m.los) m.noise_draw += rng.exponential(model.nlos_excess_mean);

  m.integer_ambiguity = static_cast<std::int64_t>(std::floor(m.true_distance / wl.meters()));
  const double clock_term = kSpeedOfLight * (ue.clock_bias - gnb.clock_bias);
  m.phi = kTwoPi / wl.meters() *
          (m.true_distance + clock_term + m.noise_draw -
           wl.meters() * static_cast<double>(m.integer_ambiguity));
  return m;
}

/// One measurement per gNB, in gNB list order; serving id comes from the UE.
inline MeasurementSet synthesize_set(const UeNode& ue, const std::vector<GnbNode>& gnbs,
                                     const Wavelength& wl, const NoiseModel& model,
                                     Rng& rng) {
  MeasurementSet set;
  set.ue_id = ue.id;
  set.serving_gnb_id = ue.serving_gnb;
  set.measurements.reserve(gnbs.size());
  for (const auto& g : gnbs) set.measurements.push_back(synthesize_measurement(g, ue, wl, model, rng));
  return set;
}

}  // namespace phasepos
