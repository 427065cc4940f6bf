#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phasepos/errors.hpp"
#include "phasepos/rng.hpp"

namespace phasepos {

/// Hall-local Cartesian coordinates, meters.
struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double distance_2d(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Indoor-factory deployment parameters. Defaults describe a 300 m x 150 m
/// hall with 18 gNBs on a 50 m grid and four fixed reference UEs.
struct LayoutConfig {
  double hall_length = 300.0;       // m, x extent
  double hall_width = 150.0;        // m, y extent
  double gnb_spacing = 50.0;        // m, grid pitch
  int gnb_count = 18;
  double gnb_height_min = 3.0;      // m
  double gnb_height_max = 10.0;     // m
  double ceiling_height = 10.0;     // m
  double ue_height = 1.5;           // m
  int reference_ue_count = 4;
  double clock_bias_range = 1e-6;   // s; node biases drawn uniform on +/- this

  int grid_nx() const { return static_cast<int>(std::llround(hall_length / gnb_spacing)); }
  int grid_ny() const { return static_cast<int>(std::llround(hall_width / gnb_spacing)); }

  void validate() const {
    if (!(hall_length > 0.0) || !(hall_width > 0.0))
      throw ConfigError("layout: hall dimensions must be positive");
    if (!(gnb_spacing > 0.0)) throw ConfigError("layout: gnb_spacing must be positive");
    if (!(gnb_height_min > 0.0) || !(gnb_height_min < gnb_height_max))
      throw ConfigError("layout: need 0 < gnb_height_min < gnb_height_max");
    if (gnb_height_max > ceiling_height)
      throw ConfigError("layout: gnb_height_max exceeds ceiling_height");
    if (!(ue_height < ceiling_height))
      throw ConfigError("layout: ue_height must be below ceiling_height");
    if (reference_ue_count < 1) throw ConfigError("layout: reference_ue_count must be >= 1");
    if (clock_bias_range < 0.0) throw ConfigError("layout: clock_bias_range must be >= 0");
    const double fx = hall_length / gnb_spacing;
    const double fy = hall_width / gnb_spacing;
    if (std::abs(fx - std::llround(fx)) > 1e-9 || std::abs(fy - std::llround(fy)) > 1e-9)
      throw ConfigError("layout: gnb_spacing does not evenly divide the hall dimensions");
    if (grid_nx() < 1 || grid_ny() < 1)
      throw ConfigError("layout: grid is empty");
    if (grid_nx() * grid_ny() != gnb_count)
      throw ConfigError("layout: gnb_count " + std::to_string(gnb_count) +
                        " does not match the " + std::to_string(grid_nx()) + "x" +
                        std::to_string(grid_ny()) + " grid implied by the spacing");
  }
};

struct GnbNode {
  int id = -1;
  Position3D position;
  double clock_bias = 0.0;  // s
};

enum class UeKind { Target, Reference };

struct UeNode {
  int id = -1;
  Position3D position;
  double clock_bias = 0.0;  // s
  UeKind kind = UeKind::Target;
  int serving_gnb = -1;
};

/// Immutable scene for one drop.
struct Deployment {
  LayoutConfig config;
  std::vector<GnbNode> gnbs;
  std::vector<UeNode> target_ues;
  std::vector<UeNode> reference_ues;
  std::uint64_t seed = 0;

  const GnbNode& gnb_by_id(int id) const {
    for (const auto& g : gnbs)
      if (g.id == id) return g;
    throw GeometryError("unknown gNB id " + std::to_string(id));
  }
};

/// Nearest gNB by 3D distance; ties break toward the lowest id.
inline int assign_serving(const UeNode& ue, const std::vector<GnbNode>& gnbs) {
  if (gnbs.empty()) throw GeometryError("assign_serving: no gNBs");
  int best = gnbs.front().id;
  double best_d = distance(ue.position, gnbs.front().position);
  for (const auto& g : gnbs) {
    const double d = distance(ue.position, g.position);
    if (d < best_d || (d == best_d && g.id < best)) {
      best = g.id;
      best_d = d;
    }
  }
  return best;
}

namespace detail {

struct Point2D {
  double x, y;
};

inline double cross(const Point2D& o, const Point2D& a, const Point2D& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain, counter-clockwise hull without collinear points.
inline std::vector<Point2D> convex_hull(std::vector<Point2D> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2D& a, const Point2D& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2D& a, const Point2D& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point2D> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

/// True iff the (x, y) projection of p lies inside or on the boundary of the
/// 2D convex hull of the gNB projections. Throws on a degenerate (collinear)
/// gNB set.
inline bool in_convex_hull(const Position3D& p, const std::vector<GnbNode>& gnbs) {
  std::vector<detail::Point2D> pts;
  pts.reserve(gnbs.size());
  for (const auto& g : gnbs) pts.push_back({g.position.x, g.position.y});
  const auto hull = detail::convex_hull(std::move(pts));
  if (hull.size() < 3)
    throw GeometryError("in_convex_hull: gNB projections are collinear or fewer than three");
  const detail::Point2D q{p.x, p.y};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    if (detail::cross(a, b, q) < -1e-9) return false;  // boundary counts as inside
  }
  return true;
}

namespace detail {

// Factor pair (nx, ny) of count whose aspect nx/ny is closest to the hall's
// length/width ratio; used to spread the reference UEs over equal cells.
inline std::pair<int, int> reference_grid_shape(int count, double aspect) {
  int best_nx = count, best_ny = 1;
  double best_err = std::abs(static_cast<double>(count) - aspect);
  for (int nx = 1; nx <= count; ++nx) {
    if (count % nx != 0) continue;
    const int ny = count / nx;
    const double err = std::abs(static_cast<double>(nx) / ny - aspect);
    if (err < best_err) {
      best_err = err;
      best_nx = nx;
      best_ny = ny;
    }
  }
  return {best_nx, best_ny};
}

}  // namespace detail

/// Builds one deployment: gNBs on a regular grid offset half a pitch from the
/// hall edges with uniform random heights, target UEs uniform over the floor,
/// reference UEs at the centroids of equal hall cells (seed-independent).
/// Deterministic given (config, n_target_ues, seed).
inline Deployment generate_layout(const LayoutConfig& config, int n_target_ues,
                                  std::uint64_t seed) {
  config.validate();
  if (n_target_ues < 1) throw ConfigError("generate_layout: n_target_ues must be >= 1");

  Deployment dep;
  dep.config = config;
  dep.seed = seed;
  Rng rng(mix64(seed));

  const int nx = config.grid_nx();
  const int ny = config.grid_ny();
  dep.gnbs.reserve(static_cast<std::size_t>(config.gnb_count));
  for (int k = 0; k < config.gnb_count; ++k) {
    const int ix = k % nx;
    const int iy = k / nx;
    GnbNode g;
    g.id = k;
    g.position.x = (0.5 + ix) * config.gnb_spacing;
    g.position.y = (0.5 + iy) * config.gnb_spacing;
    g.position.z = rng.uniform(config.gnb_height_min, config.gnb_height_max);
    dep.gnbs.push_back(g);
  }
  for (auto& g : dep.gnbs)
    g.clock_bias = rng.uniform(-config.clock_bias_range, config.clock_bias_range);

  dep.target_ues.reserve(static_cast<std::size_t>(n_target_ues));
  for (int u = 0; u < n_target_ues; ++u) {
    UeNode ue;
    ue.id = u;
    ue.kind = UeKind::Target;
    ue.position.x = rng.uniform(0.0, config.hall_length);
    ue.position.y = rng.uniform(0.0, config.hall_width);
    ue.position.z = config.ue_height;
    ue.clock_bias = rng.uniform(-config.clock_bias_range, config.clock_bias_range);
    ue.serving_gnb = assign_serving(ue, dep.gnbs);
    dep.target_ues.push_back(ue);
  }

  const auto [rx, ry] = detail::reference_grid_shape(
      config.reference_ue_count, config.hall_length / config.hall_width);
  dep.reference_ues.reserve(static_cast<std::size_t>(config.reference_ue_count));
  for (int r = 0; r < config.reference_ue_count; ++r) {
    const int ix = r % rx;
    const int iy = r / rx;
    UeNode ue;
    ue.id = n_target_ues + r;  // ids unique across all UEs in the deployment
    ue.kind = UeKind::Reference;
    ue.position.x = (0.5 + ix) * config.hall_length / rx;
    ue.position.y = (0.5 + iy) * config.hall_width / ry;
    ue.position.z = config.ue_height;
    ue.clock_bias = rng.uniform(-config.clock_bias_range, config.clock_bias_range);
    ue.serving_gnb = assign_serving(ue, dep.gnbs);
    dep.reference_ues.push_back(ue);
  }
  return dep;
}

}  // namespace phasepos
