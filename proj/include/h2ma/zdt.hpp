// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_ZDT_HPP
#define H2MA_ZDT_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "h2ma/core.hpp"
#include "h2ma/hypervolume.hpp"

namespace h2ma {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }

  bool contains(std::span<const double> x) const {
    if (x.size() != lo.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  std::vector<double> midpoint() const {
    std::vector<double> m(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) m[i] = 0.5 * (lo[i] + hi[i]);
    return m;
  }

  void clip(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
    }
  }
};

/// Result of one objective evaluation: both objectives plus the auxiliary
/// g value (g = 1 on the true front for every problem here).
struct ZdtEvaluation {
  ObjectiveVector y;
  double g = 1.0;
};

/// Jacobian rows: partials of (f1, f2) with respect to each decision variable.
using Jacobian = std::array<std::vector<double>, 2>;

/// A bi-objective benchmark problem with box bounds, fixed Nadir point,
/// analytic Jacobian, and true-front metadata.
struct Problem {
  std::string name;
  std::size_t n = 30;
  Box bounds;
  NadirPoint nadir;
  std::function<ZdtEvaluation(std::span<const double>)> evaluate;
  std::function<Jacobian(std::span<const double>)> analytic_jacobian;
  std::function<double()> max_front_hypervolume;
};

/// Convergence metric to the known ZDT front: mean over candidates of
/// max(g - 1, 0). Zero iff every candidate sits on the g = 1 front shell.
inline double p_distance(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("p_distance: empty candidate list");
  }
  double acc = 0.0;
  for (const auto& c : candidates) acc += std::max(c.g - 1.0, 0.0);
  return acc / static_cast<double>(candidates.size());
}

namespace detail {

inline constexpr double kPi = std::numbers::pi;

inline double sum_tail(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
  return s;
}

// Guard for derivative denominators that vanish on the front boundary.
inline double safe_pos(double v) { return std::max(v, 1e-12); }

}  // namespace detail

inline Problem make_zdt1(std::size_t n = 30) {
  Problem p;
  p.name = "zdt1";
  p.n = n;
  p.bounds = {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  p.nadir = {ObjectiveVector{2.0, 11.0}};
  p.evaluate = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    const double f2 = g * (1.0 - std::sqrt(f1 / g));
    return ZdtEvaluation{ObjectiveVector{f1, f2}, g};
  };
  p.analytic_jacobian = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    Jacobian j{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    j[0][0] = 1.0;
    const double root = std::sqrt(f1 / g);
    j[1][0] = -0.5 * std::sqrt(g / detail::safe_pos(f1));
    const double dg = 9.0 / (n - 1);
    for (std::size_t i = 1; i < n; ++i) j[1][i] = dg * (1.0 - 0.5 * root);
    return j;
  };
  p.max_front_hypervolume = [] { return 65.0 / 3.0; };
  return p;
}

inline Problem make_zdt2(std::size_t n = 30) {
  Problem p;
  p.name = "zdt2";
  p.n = n;
  p.bounds = {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  p.nadir = {ObjectiveVector{2.0, 11.0}};
  p.evaluate = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    const double r = f1 / g;
    const double f2 = g * (1.0 - r * r);
    return ZdtEvaluation{ObjectiveVector{f1, f2}, g};
  };
  p.analytic_jacobian = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    Jacobian j{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    j[0][0] = 1.0;
    j[1][0] = -2.0 * f1 / g;
    const double dg = 9.0 / (n - 1);
    const double r = f1 / g;
    for (std::size_t i = 1; i < n; ++i) j[1][i] = dg * (1.0 + r * r);
    return j;
  };
  p.max_front_hypervolume = [] { return 64.0 / 3.0; };
  return p;
}

inline Problem make_zdt3(std::size_t n = 30) {
  Problem p;
  p.name = "zdt3";
  p.n = n;
  p.bounds = {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  p.nadir = {ObjectiveVector{2.0, 11.0}};
  p.evaluate = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    const double r = f1 / g;
    const double f2 =
        g * (1.0 - std::sqrt(r) - r * std::sin(10.0 * detail::kPi * f1));
    return ZdtEvaluation{ObjectiveVector{f1, f2}, g};
  };
  p.analytic_jacobian = [n](std::span<const double> x) {
    const double f1 = x[0];
    const double g = 1.0 + 9.0 / (n - 1) * detail::sum_tail(x);
    Jacobian j{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    j[0][0] = 1.0;
    const double s = std::sin(10.0 * detail::kPi * f1);
    const double c = std::cos(10.0 * detail::kPi * f1);
    // f2 = g - sqrt(f1 g) - f1 sin(10 pi f1)
    j[1][0] = -0.5 * std::sqrt(g / detail::safe_pos(f1)) - s -
              10.0 * detail::kPi * f1 * c;
    const double dg = 9.0 / (n - 1);
    const double root = std::sqrt(f1 / g);
    for (std::size_t i = 1; i < n; ++i) j[1][i] = dg * (1.0 - 0.5 * root);
    return j;
  };
  p.max_front_hypervolume = [] {
    // Lower envelope of h(t) = 1 - sqrt(t) - t sin(10 pi t); integrate
    // z2 - running-min(h) over [0, 1] on a fine grid, then add the slab
    // up to z1.
    const NadirPoint z{ObjectiveVector{2.0, 11.0}};
    const int samples = 1 << 22;
    const double dt = 1.0 / samples;
    auto h = [](double t) {
      return 1.0 - std::sqrt(t) - t * std::sin(10.0 * detail::kPi * t);
    };
    double runmin = h(0.0);
    double prev = z.z[1] - runmin;
    double acc = 0.0;
    for (int i = 1; i <= samples; ++i) {
      runmin = std::min(runmin, h(i * dt));
      const double cur = z.z[1] - runmin;
      acc += 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    acc += (z.z[0] - 1.0) * (z.z[1] - runmin);
    return acc;
  };
  return p;
}

inline Problem make_zdt4(std::size_t n = 30) {
  Problem p;
  p.name = "zdt4";
  p.n = n;
  Box b{std::vector<double>(n, -5.0), std::vector<double>(n, 5.0)};
  b.lo[0] = 0.0;
  b.hi[0] = 1.0;
  p.bounds = b;
  p.nadir = {ObjectiveVector{2.0, 2.0 + 50.0 * (n - 1)}};
  p.evaluate = [n](std::span<const double> x) {
    const double f1 = x[0];
    double g = 1.0 + 10.0 * (n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      g += x[i] * x[i] - 10.0 * std::cos(4.0 * detail::kPi * x[i]);
    }
    const double f2 = g * (1.0 - std::sqrt(f1 / g));
    return ZdtEvaluation{ObjectiveVector{f1, f2}, g};
  };
  p.analytic_jacobian = [n](std::span<const double> x) {
    const double f1 = x[0];
    double g = 1.0 + 10.0 * (n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      g += x[i] * x[i] - 10.0 * std::cos(4.0 * detail::kPi * x[i]);
    }
    Jacobian j{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    j[0][0] = 1.0;
    j[1][0] = -0.5 * std::sqrt(g / detail::safe_pos(f1));
    const double root = std::sqrt(f1 / g);
    for (std::size_t i = 1; i < n; ++i) {
      const double dg =
          2.0 * x[i] + 40.0 * detail::kPi * std::sin(4.0 * detail::kPi * x[i]);
      j[1][i] = dg * (1.0 - 0.5 * root);
    }
    return j;
  };
  const double z2 = 2.0 + 50.0 * (n - 1);
  p.max_front_hypervolume = [z2] {
    // Same front shape as ZDT1: integral of (z2 - (1 - sqrt t)) over [0,1]
    // is z2 - 1/3, plus the slab (z1 - 1) * z2.
    return 2.0 * z2 - 1.0 / 3.0;
  };
  return p;
}

inline Problem make_zdt6(std::size_t n = 30) {
  Problem p;
  p.name = "zdt6";
  p.n = n;
  p.bounds = {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  p.nadir = {ObjectiveVector{2.0, 11.0}};
  auto f1_of = [](double x1) {
    const double s = std::sin(6.0 * detail::kPi * x1);
    const double s2 = s * s;
    return 1.0 - std::exp(-4.0 * x1) * s2 * s2 * s2;
  };
  p.evaluate = [n, f1_of](std::span<const double> x) {
    const double f1 = f1_of(x[0]);
    const double u = detail::sum_tail(x) / (n - 1);
    const double g = 1.0 + 9.0 * std::pow(u, 0.25);
    const double r = f1 / g;
    const double f2 = g * (1.0 - r * r);
    return ZdtEvaluation{ObjectiveVector{f1, f2}, g};
  };
  p.analytic_jacobian = [n, f1_of](std::span<const double> x) {
    const double x1 = x[0];
    const double s = std::sin(6.0 * detail::kPi * x1);
    const double c = std::cos(6.0 * detail::kPi * x1);
    const double e = std::exp(-4.0 * x1);
    const double s5 = s * s * s * s * s;
    const double f1 = f1_of(x1);
    const double df1 = e * s5 * (4.0 * s - 36.0 * detail::kPi * c);
    const double u = detail::sum_tail(x) / (n - 1);
    const double g = 1.0 + 9.0 * std::pow(u, 0.25);
    Jacobian j{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    j[0][0] = df1;
    // f2 = g - f1^2 / g
    j[1][0] = -2.0 * f1 * df1 / g;
    const double r = f1 / g;
    const double du = 1.0 / (n - 1);
    const double dg_du = 2.25 * std::pow(detail::safe_pos(u), -0.75);
    for (std::size_t i = 1; i < n; ++i) j[1][i] = dg_du * du * (1.0 + r * r);
    return j;
  };
  p.max_front_hypervolume = [f1_of] {
    // Front is f2 = 1 - f1^2 over f1 in [t0, 1], where t0 is the global
    // minimum of the f1 profile; locate it by scan plus golden-section.
    double best_x = 0.0, best = f1_of(0.0);
    const int grid = 20000;
    for (int i = 1; i <= grid; ++i) {
      const double x = static_cast<double>(i) / grid;
      const double v = f1_of(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    double a = std::max(0.0, best_x - 1.0 / grid);
    double b = std::min(1.0, best_x + 1.0 / grid);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    while (b - a > 1e-14) {
      const double c1 = b - phi * (b - a);
      const double c2 = a + phi * (b - a);
      if (f1_of(c1) < f1_of(c2)) b = c2; else a = c1;
    }
    const double t0 = f1_of(0.5 * (a + b));
    // integral of (11 - (1 - t^2)) dt from t0 to 1, plus the slab.
    const double integral = 10.0 * (1.0 - t0) + (1.0 - t0 * t0 * t0) / 3.0;
    return integral + 11.0;
  };
  return p;
}

inline Problem make_problem(const std::string& name, std::size_t n = 30) {
  if (name == "zdt1") return make_zdt1(n);
  if (name == "zdt2") return make_zdt2(n);
  if (name == "zdt3") return make_zdt3(n);
  if (name == "zdt4") return make_zdt4(n);
  if (name == "zdt6") return make_zdt6(n);
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace h2ma

#endif  // H2MA_ZDT_HPP
