// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_HYPERVOLUME_HPP
#define H2MA_HYPERVOLUME_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "h2ma/core.hpp"

namespace h2ma {

/// Reference point strictly dominated by every solution that should count
/// toward the hypervolume.
struct NadirPoint {
  ObjectiveVector z;
};

struct UnsupportedDimension : std::runtime_error {
  UnsupportedDimension()
      : std::runtime_error("hypervolume: only 2 objectives supported") {}
};

struct UndefinedGradient : std::runtime_error {
  UndefinedGradient()
      : std::runtime_error("contribution gradient undefined at this point") {}
};

namespace detail {

inline void require_2d(const ObjectiveVector& z) {
  if (z.size() != 2) throw UnsupportedDimension{};
}

/// Caps of the exclusive-contribution rectangle of y against `others`.
/// right_cap bounds objective 1 (nearest f1 of a point at or below y in f2,
/// or z1), left_cap bounds objective 2 symmetrically.
struct Caps {
  double left_cap;
  double right_cap;
};

inline Caps contribution_caps(const ObjectiveVector& y,
                              const std::vector<ObjectiveVector>& others,
                              const NadirPoint& z) {
  Caps c{z.z[1], z.z[0]};
  for (const auto& o : others) {
    if (!(o[0] < z.z[0] && o[1] < z.z[1])) continue;
    if (o[0] <= y[0]) c.left_cap = std::min(c.left_cap, o[1]);
    if (o[1] <= y[1]) c.right_cap = std::min(c.right_cap, o[0]);
  }
  return c;
}

}  // namespace detail

/// Exact bi-objective hypervolume by sort-and-sweep. Points that do not
/// strictly dominate the Nadir point contribute nothing.
inline double hypervolume(const std::vector<ObjectiveVector>& points,
                          const NadirPoint& z) {
  detail::require_2d(z.z);
  std::vector<std::array<double, 2>> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    detail::require_2d(p);
    if (p[0] < z.z[0] && p[1] < z.z[1]) pts.push_back({p[0], p[1]});
  }
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end());
  double hv = 0.0;
  double floor2 = z.z[1];  // lowest f2 seen so far along the sweep
  for (const auto& p : pts) {
    if (p[1] < floor2) {
      hv += (z.z[0] - p[0]) * (floor2 - p[1]);
      floor2 = p[1];
    }
  }
  return hv;
}

/// Exclusive hypervolume contribution of y against a fixed set. Equals
/// hypervolume(others + {y}) - hypervolume(others); 0 when y is dominated
/// or does not strictly dominate the Nadir point.
inline double contribution(const ObjectiveVector& y,
                           const std::vector<ObjectiveVector>& others,
                           const NadirPoint& z) {
  detail::require_2d(z.z);
  detail::require_2d(y);
  if (!(y[0] < z.z[0] && y[1] < z.z[1])) return 0.0;
  auto caps = detail::contribution_caps(y, others, z);
  double w = caps.right_cap - y[0];
  double h = caps.left_cap - y[1];
  if (w <= 0.0 || h <= 0.0) return 0.0;
  // The caps rectangle is exact only while y dominates no other point;
  // otherwise fall back to the defining two-sweep difference.
  for (const auto& o : others) {
    if (dominates(y, o)) {
      auto extended = others;
      extended.push_back(y);
      return hypervolume(extended, z) - hypervolume(others, z);
    }
  }
  return w * h;
}

/// Gradient of the exclusive contribution with respect to the objective
/// coordinates of y. Requires y strictly non-dominated, y strictly inside
/// the Nadir box, and no coordinate tie with a cap-defining neighbor; such
/// ties leave the derivative undefined and the caller must fall back to
/// numeric differencing of contribution().
inline std::array<double, 2> contribution_gradient(
    const ObjectiveVector& y, const std::vector<ObjectiveVector>& others,
    const NadirPoint& z) {
  detail::require_2d(z.z);
  detail::require_2d(y);
  if (!(y[0] < z.z[0] && y[1] < z.z[1])) throw UndefinedGradient{};
  for (const auto& o : others) {
    if (dominates(o, y)) throw UndefinedGradient{};
    if (o[0] == y[0] || o[1] == y[1]) throw UndefinedGradient{};
  }
  auto caps = detail::contribution_caps(y, others, z);
  if (!(caps.left_cap > y[1] && caps.right_cap > y[0])) {
    throw UndefinedGradient{};
  }
  return {-(caps.left_cap - y[1]), -(caps.right_cap - y[0])};
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo hypervolume estimate over the bounding box spanned by the
/// points and the Nadir point. Deterministic given the seed; used as an
/// independent oracle in tests.
inline McEstimate mc_hypervolume_oracle(
    const std::vector<ObjectiveVector>& points, const NadirPoint& z,
    std::int64_t sample_count, std::uint64_t seed) {
  detail::require_2d(z.z);
  if (sample_count <= 0) {
    throw std::invalid_argument("mc_hypervolume_oracle: sample_count must be > 0");
  }
  if (points.empty()) return {0.0, 0.0};
  double lo0 = z.z[0], lo1 = z.z[1];
  for (const auto& p : points) {
    detail::require_2d(p);
    lo0 = std::min(lo0, p[0]);
    lo1 = std::min(lo1, p[1]);
  }
  const double box = (z.z[0] - lo0) * (z.z[1] - lo1);
  if (box <= 0.0) return {0.0, 0.0};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u0(lo0, z.z[0]), u1(lo1, z.z[1]);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < sample_count; ++s) {
    const double y0 = u0(rng), y1 = u1(rng);
    for (const auto& p : points) {
      if (p[0] < y0 && p[1] < y1) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(sample_count);
  McEstimate est;
  est.value = frac * box;
  est.std_error =
      box * std::sqrt(std::max(frac * (1.0 - frac), 0.0) /
                      static_cast<double>(sample_count));
  return est;
}

}  // namespace h2ma

#endif  // H2MA_HYPERVOLUME_HPP
