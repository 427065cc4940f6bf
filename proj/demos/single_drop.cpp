// Walks one UE through the whole chain: deployment, phase synthesis,
// single/double differencing, and the least-squares position solve.

#include <cstdio>

#include "phasepos/phasepos.hpp"

using namespace phasepos;

int main() {
  const Wavelength wl;
  const auto deployment = generate_layout(LayoutConfig{}, 10, /*seed=*/2024);

  NoiseModel noise;  // calibrated defaults, mixed LOS/NLOS propagation
  std::printf("hall %.0f x %.0f m, %zu gNBs, lambda %.4f m\n",
              deployment.config.hall_length, deployment.config.hall_width,
              deployment.gnbs.size(), wl.meters());

  // First target UE inside the hull
  const UeNode* ue = nullptr;
  for (const auto& u : deployment.target_ues)
    if (in_convex_hull(u.position, deployment.gnbs)) {
      ue = &u;
      break;
    }
  if (ue == nullptr) {
    std::printf("no in-hull UE in this drop\n");
    return 1;
  }

  Rng target_rng(derive_seed(2024, 0, static_cast<std::uint64_t>(ue->id), Stream::TargetMeasurement));
  auto target_set = synthesize_set(*ue, deployment.gnbs, wl, noise, target_rng);

  // Reference UE nearest to the serving gNB, re-pivoted onto it
  const auto& serving_pos = deployment.gnb_by_id(ue->serving_gnb).position;
  const UeNode* reference = &deployment.reference_ues.front();
  for (const auto& r : deployment.reference_ues)
    if (distance(r.position, serving_pos) < distance(reference->position, serving_pos))
      reference = &r;
  Rng reference_rng(
      derive_seed(2024, 0, static_cast<std::uint64_t>(reference->id), Stream::ReferenceMeasurement));
  auto reference_set = synthesize_set(*reference, deployment.gnbs, wl, noise, reference_rng);
  reference_set.serving_gnb_id = ue->serving_gnb;

  const auto target_filtered = filter_measurements(target_set, FilterPolicy{});
  FilterPolicy keep_all;
  keep_all.max_links = 1000;
  const auto reference_filtered = filter_measurements(reference_set, keep_all);

  const auto dd = double_difference(single_difference(target_filtered),
                                    single_difference(reference_filtered), deployment.gnbs);
  std::printf("UE %d: serving gNB %d, reference UE %d, %zu double differences\n", ue->id,
              ue->serving_gnb, reference->id, dd.diffs.size());

  auto result = solve_position(dd, SolverConfig{}, wl);
  error_metrics(result, ue->position);
  std::printf("truth    (%8.3f, %8.3f, %6.3f) m\n", ue->position.x, ue->position.y,
              ue->position.z);
  std::printf("estimate (%8.3f, %8.3f, %6.3f) m after %d iterations\n", result.estimate.x,
              result.estimate.y, result.estimate.z, result.iterations);
  std::printf("errors: horizontal %.2f cm, vertical %.2f cm, 3d %.2f cm\n",
              100.0 * result.horizontal_error, 100.0 * result.vertical_error,
              100.0 * result.error_3d);
  return result.converged ? 0 : 1;
}
