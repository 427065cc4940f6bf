#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "phasepos/measurement.hpp"

using Catch::Approx;
using namespace phasepos;

TEST_CASE("wavelength follows the carrier frequency") {
  const Wavelength wl;
  REQUIRE(wl.frequency() == 3.5e9);
  REQUIRE(wl.meters() == Approx(0.085654988).epsilon(1e-15));
  REQUIRE_THROWS_AS(Wavelength(0.0), ConfigError);
}

TEST_CASE("true_phase is the unwrapped cycle count times 2pi") {
  const Wavelength wl;
  REQUIRE(true_phase(0.0, wl) == 0.0);
  REQUIRE(true_phase(wl.meters(), wl) == Approx(kTwoPi).epsilon(1e-15));
  // 85.65 m at 3.5 GHz, cross-checked against an independent evaluation
  REQUIRE(true_phase(85.65, wl) == Approx(6282.81941455565).epsilon(1e-12));
}

TEST_CASE("phase errors map to centimeter range errors") {
  const Wavelength wl;
  REQUIRE(phase_error_to_distance(1.4, wl) == Approx(0.0190853806369478).epsilon(1e-12));
  REQUIRE(phase_error_to_distance(3.4, wl) == Approx(0.0463502101183017).epsilon(1e-12));
  REQUIRE(phase_error_to_distance(kTwoPi, wl) == Approx(wl.meters()).epsilon(1e-15));
}

TEST_CASE("los_state") {
  NoiseModel model;

  SECTION("always LOS when NLOS is disabled") {
    model.nlos_enabled = false;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) REQUIRE(los_state(1e6, model, rng));
  }

  SECTION("zero distance is always LOS") {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) REQUIRE(los_state(0.0, model, rng));
  }

  SECTION("LOS fraction at d2d = k approaches 1/e") {
    Rng rng(3);
    int los = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (los_state(model.los_probability_k, model, rng)) ++los;
    REQUIRE(static_cast<double>(los) / n == Approx(std::exp(-1.0)).epsilon(0.01));
  }

  SECTION("LOS fraction is non-increasing in distance") {
    Rng rng(4);
    double previous = 1.1;
    for (double d2d = 0.0; d2d <= 200.0; d2d += 25.0) {
      int los = 0;
      const int n = 20000;
      for (int i = 0; i < n; ++i)
        if (los_state(d2d, model, rng)) ++los;
      const double fraction = static_cast<double>(los) / n;
      REQUIRE(fraction <= previous);
      previous = fraction;
    }
  }
}

namespace {

GnbNode make_gnb(int id, Position3D p, double bias) { return {id, p, bias}; }

UeNode make_ue(int id, Position3D p, double bias) {
  UeNode ue;
  ue.id = id;
  ue.position = p;
  ue.clock_bias = bias;
  return ue;
}

double observable_meters(const PhaseMeasurement& m, const Wavelength& wl) {
  return wl.meters() / kTwoPi * m.phi;
}

}  // namespace

TEST_CASE("synthesize_measurement") {
  const Wavelength wl;
  NoiseModel quiet;
  quiet.sigma_los = 0.0;
  quiet.sigma_nlos = 0.0;
  quiet.nlos_excess_mean = 0.0;
  quiet.nlos_enabled = false;

  SECTION("zero noise, zero biases reconstructs the distance exactly") {
    const auto gnb = make_gnb(0, {40, 30, 8}, 0.0);
    const auto ue = make_ue(0, {10, 10, 1.5}, 0.0);
    Rng rng(5);
    const auto m = synthesize_measurement(gnb, ue, wl, quiet, rng);
    const double resolved =
        observable_meters(m, wl) + wl.meters() * static_cast<double>(m.integer_ambiguity);
    REQUIRE(resolved == Approx(m.true_distance).margin(1e-9));
    REQUIRE(m.integer_ambiguity ==
            static_cast<std::int64_t>(std::floor(m.true_distance / wl.meters())));
    REQUIRE(m.noise_draw == 0.0);
  }

  SECTION("a 1 microsecond receiver bias shifts the observable by c * 1e-6") {
    const auto gnb = make_gnb(0, {40, 30, 8}, 0.0);
    const auto ue_zero = make_ue(0, {10, 10, 1.5}, 0.0);
    const auto ue_bias = make_ue(0, {10, 10, 1.5}, 1e-6);
    Rng rng_a(6), rng_b(6);
    const auto a = synthesize_measurement(gnb, ue_zero, wl, quiet, rng_a);
    const auto b = synthesize_measurement(gnb, ue_bias, wl, quiet, rng_b);
    REQUIRE(observable_meters(b, wl) - observable_meters(a, wl) ==
            Approx(299.792458).margin(1e-9));
  }

  SECTION("reconstruction holds for every measurement") {
    NoiseModel noisy;  // defaults: LOS/NLOS both active
    Rng rng(7);
    Rng geom(8);
    for (int i = 0; i < 2000; ++i) {
      const auto gnb = make_gnb(0, {geom.uniform(0, 300), geom.uniform(0, 150), geom.uniform(3, 10)},
                                geom.uniform(-1e-6, 1e-6));
      const auto ue = make_ue(0, {geom.uniform(0, 300), geom.uniform(0, 150), 1.5},
                              geom.uniform(-1e-6, 1e-6));
      const auto m = synthesize_measurement(gnb, ue, wl, noisy, rng);
      const double lhs = observable_meters(m, wl) +
                         wl.meters() * static_cast<double>(m.integer_ambiguity) -
                         kSpeedOfLight * (ue.clock_bias - gnb.clock_bias) - m.noise_draw;
      REQUIRE(lhs == Approx(m.true_distance).margin(1e-9));
      REQUIRE(m.integer_ambiguity >= 0);
    }
  }

  SECTION("LOS noise sample std matches lambda * sigma / 2pi") {
    NoiseModel model;
    model.nlos_enabled = false;
    model.sigma_los = 0.4256;
    const auto gnb = make_gnb(0, {100, 100, 5}, 0.0);
    const auto ue = make_ue(0, {50, 50, 1.5}, 0.0);
    Rng rng(9);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto m = synthesize_measurement(gnb, ue, wl, model, rng);
      sum += m.noise_draw;
      sum_sq += m.noise_draw * m.noise_draw;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sum_sq / n - mean * mean);
    REQUIRE(stddev == Approx(wl.meters() * model.sigma_los / kTwoPi).epsilon(0.02));
  }

  SECTION("zero sigmas make synthesis deterministic") {
    NoiseModel zero;
    zero.sigma_los = 0.0;
    zero.sigma_nlos = 0.0;
    zero.nlos_excess_mean = 0.0;
    const auto gnb = make_gnb(0, {40, 30, 8}, 2e-7);
    const auto ue = make_ue(0, {10, 10, 1.5}, -3e-7);
    Rng rng_a(10), rng_b(11);  // different streams, same outcome
    const auto a = synthesize_measurement(gnb, ue, wl, zero, rng_a);
    const auto b = synthesize_measurement(gnb, ue, wl, zero, rng_b);
    REQUIRE(a.phi == b.phi);
    REQUIRE(a.noise_draw == 0.0);
  }
}
