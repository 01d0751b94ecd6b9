// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_BOXMIN_HPP
#define H2MA_BOXMIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "h2ma/core.hpp"
#include "h2ma/zdt.hpp"

namespace h2ma {

enum class StopReason { converged, budget, observer_stop, stagnated };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::budget: return "budget";
    case StopReason::observer_stop: return "observer-stop";
    case StopReason::stagnated: return "stagnated";
  }
  return "?";
}

/// Observer sees every evaluated point (iterates, line-search trials, and
/// finite-difference probes). Return true to stop the search immediately;
/// the triggering point becomes the result.
using Observer =
    std::function<bool(std::span<const double>, double, std::int64_t)>;

struct MinimizeRequest {
  std::function<double(std::span<const double>)> objective;
  // When set, used instead of forward differences (and costs no counted
  // evaluations).
  std::function<std::vector<double>(std::span<const double>)> gradient;
  Box bounds;
  std::vector<double> x0;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double relative_improvement_tolerance = 1e-10;
  int history = 10;
  EvaluationCounter* counter = nullptr;
  Observer observer;
};

struct MinimizeResult {
  std::vector<double> x_best;
  double f_best = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::int64_t evaluations_used = 0;
  StopReason reason = StopReason::stagnated;
};

namespace detail {

struct ObserverStop {
  std::vector<double> x;
  double f;
};

class Evaluator {
public:
  explicit Evaluator(const MinimizeRequest& req) : req_(req) {}

  double operator()(std::span<const double> x) {
    if (req_.counter) req_.counter->charge();
    const double f = req_.objective(x);
    ++evals_;
    if (req_.observer && req_.observer(x, f, evals_)) {
      throw ObserverStop{std::vector<double>(x.begin(), x.end()), f};
    }
    return f;
  }

  std::int64_t evals() const { return evals_; }

private:
  const MinimizeRequest& req_;
  std::int64_t evals_ = 0;
};

/// Forward differences with step sqrt(eps) * max(1, |x_i|); probes that
/// would leave the box switch to a backward difference.
inline std::vector<double> forward_diff_gradient(Evaluator& eval,
                                                 const Box& bounds,
                                                 std::vector<double> x,
                                                 double fx) {
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const std::size_t n = x.size();
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = root_eps * std::max(1.0, std::abs(x[i]));
    const double orig = x[i];
    double step = h;
    if (orig + h > bounds.hi[i]) step = -h;
    x[i] = orig + step;
    const double fp = eval(x);
    x[i] = orig;
    grad[i] = (fp - fx) / step;
  }
  return grad;
}

}  // namespace detail

/// Standalone numeric gradient matching the minimizer's internal scheme.
/// Consumes n counted probe evaluations (the base value is supplied).
inline std::vector<double> numeric_gradient(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> x, const Box& bounds,
    EvaluationCounter* counter = nullptr, const Observer& observer = {}) {
  MinimizeRequest req;
  req.objective = objective;
  req.counter = counter;
  req.observer = observer;
  detail::Evaluator eval(req);
  std::vector<double> xv(x.begin(), x.end());
  // Base point is evaluated here so the standalone call is self-contained.
  const double fx = eval(xv);
  return detail::forward_diff_gradient(eval, bounds, std::move(xv), fx);
}

/// Box-constrained limited-memory quasi-Newton minimization with gradient
/// projection and Armijo backtracking. Monotone in accepted iterates; every
/// evaluated point stays inside the box.
inline MinimizeResult minimize(const MinimizeRequest& req) {
  const std::size_t n = req.x0.size();
  if (!req.bounds.contains(req.x0)) {
    throw std::invalid_argument("minimize: x0 outside bounds");
  }
  detail::Evaluator eval(req);

  MinimizeResult res;
  res.x_best = req.x0;

  std::vector<double> x = req.x0;
  std::deque<std::pair<std::vector<double>, std::vector<double>>> lbfgs;  // (s, y)

  auto projected_gradient_norm = [&](const std::vector<double>& xi,
                                     const std::vector<double>& g) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double gi = g[i];
      if (xi[i] <= req.bounds.lo[i] && gi > 0.0) gi = 0.0;
      if (xi[i] >= req.bounds.hi[i] && gi < 0.0) gi = 0.0;
      norm = std::max(norm, std::abs(gi));
    }
    return norm;
  };

  try {
    double fx = eval(x);
    res.f_best = fx;

    // Improvements are judged relative to the current objective value (with
    // a floor so an exact zero does not demand literally zero improvement).
    auto improvement_scale = [](double f) {
      return std::max(std::abs(f), std::numeric_limits<double>::min());
    };

    std::vector<double> prev_x, prev_grad;
    double step_start = 1.0;
    for (int iter = 0; iter < req.max_iterations; ++iter) {
      res.iterations = iter + 1;

      std::vector<double> grad =
          req.gradient ? req.gradient(x)
                       : detail::forward_diff_gradient(eval, req.bounds, x, fx);

      if (!prev_x.empty()) {
        std::vector<double> s(n), yv(n);
        double sy = 0.0, snorm = 0.0, ynorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = x[i] - prev_x[i];
          yv[i] = grad[i] - prev_grad[i];
          sy += s[i] * yv[i];
          snorm += s[i] * s[i];
          ynorm += yv[i] * yv[i];
        }
        if (sy > 1e-10 * std::sqrt(snorm * ynorm)) {
          lbfgs.emplace_back(std::move(s), std::move(yv));
          if (static_cast<int>(lbfgs.size()) > req.history) lbfgs.pop_front();
        }
      }
      prev_x = x;
      prev_grad = grad;

      if (projected_gradient_norm(x, grad) < req.gradient_tolerance) {
        res.reason = StopReason::converged;
        break;
      }

      // Two-loop recursion; direction components pushing against an active
      // bound are dropped before the line search.
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = -grad[i];
      std::vector<double> alpha(lbfgs.size());
      for (std::size_t k = lbfgs.size(); k-- > 0;) {
        const auto& [s, yv] = lbfgs[k];
        double sy = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sy += s[i] * yv[i];
          sd += s[i] * d[i];
        }
        alpha[k] = sd / sy;
        for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * yv[i];
      }
      if (!lbfgs.empty()) {
        const auto& [s, yv] = lbfgs.back();
        double sy = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sy += s[i] * yv[i];
          yy += yv[i] * yv[i];
        }
        const double scale = sy / yy;
        for (std::size_t i = 0; i < n; ++i) d[i] *= scale;
      }
      for (std::size_t k = 0; k < lbfgs.size(); ++k) {
        const auto& [s, yv] = lbfgs[k];
        double sy = 0.0, yd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sy += s[i] * yv[i];
          yd += yv[i] * d[i];
        }
        const double beta = yd / sy;
        for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * s[i];
      }

      // Drop components pushing against an active bound; otherwise clipping
      // turns the step into an ascent move and the line search burns trials
      // approaching the incumbent from above.
      auto mask_at_bounds = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) {
          if (x[i] <= req.bounds.lo[i] && v[i] < 0.0) v[i] = 0.0;
          if (x[i] >= req.bounds.hi[i] && v[i] > 0.0) v[i] = 0.0;
        }
      };
      mask_at_bounds(d);
      double gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) gd += grad[i] * d[i];
      if (!(gd < 0.0)) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -grad[i];
        mask_at_bounds(d);
      }

      // Projected Armijo backtracking. Failed trials contract the step with
      // a safeguarded quadratic interpolation of f along the direction
      // rather than plain halving, so badly scaled directions recover in one
      // or two trials. The first trial reuses the previous accepted step
      // (doubled, capped at 1).
      constexpr double kSufficientDecrease = 1e-4;
      constexpr int kMaxBacktracks = 50;
      // Until curvature pairs exist the direction is the raw gradient, whose
      // scale says nothing about a sensible step; size the first trial from
      // the objective instead (twice the linear extrapolation to f = 0,
      // exact for a quadratic vanishing at its minimum).
      double step = step_start;
      if (lbfgs.empty() && fx != 0.0) {
        step = std::min(step, -2.0 * std::abs(fx) / gd);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double range = req.bounds.hi[i] - req.bounds.lo[i];
        if (d[i] != 0.0 && range > 0.0) {
          step = std::min(step, 0.25 * range / std::abs(d[i]));
        }
      }
      bool accepted = false;
      std::vector<double> x_new(n);
      double f_new = fx;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
        req.bounds.clip(x_new);
        double gdx = 0.0;  // directional decrease after projection
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          gdx += grad[i] * (x_new[i] - x[i]);
          moved = moved || x_new[i] != x[i];
        }
        // A trial that does not move, or whose projected slope is not a
        // descent slope (clipping onto a face can flip it), cannot satisfy
        // the acceptance test; contract without spending an evaluation.
        // Small enough steps avoid the clipping, restoring descent.
        if (!moved || gdx >= 0.0) {
          step *= 0.5;
          continue;
        }
        f_new = eval(x_new);
        if (f_new <= fx + kSufficientDecrease * gdx && f_new < fx) {
          accepted = true;
          break;
        }
        // Trial already within the improvement tolerance of the incumbent:
        // smaller steps can only produce sub-tolerance gains, so further
        // trials would be wasted evaluations on the way to stagnation.
        if (f_new >= fx &&
            f_new - fx < req.relative_improvement_tolerance * improvement_scale(fx)) {
          break;
        }
        // Minimizer of the quadratic through f(0)=fx, f'(0)=gdx/step (the
        // projected slope), and f(step)=f_new; clamped to [0.05, 0.5]*step.
        const double denom = f_new - fx - gdx;
        double next = step * 0.5;
        if (denom > 0.0 && gdx < 0.0) {
          next = step * std::clamp(-0.5 * gdx / denom, 0.05, 0.5);
        }
        step = next;
      }

      if (!accepted) {
        res.reason = StopReason::stagnated;
        break;
      }

      step_start = std::min(1.0, step * 2.0);
      const double improvement = fx - f_new;
      x = x_new;
      fx = f_new;
      if (fx < res.f_best) {
        res.f_best = fx;
        res.x_best = x;
      }

      if (improvement < req.relative_improvement_tolerance * improvement_scale(fx)) {
        res.reason = StopReason::stagnated;
        break;
      }
      if (iter + 1 == req.max_iterations) res.reason = StopReason::stagnated;
    }
  } catch (const BudgetExhausted&) {
    res.reason = StopReason::budget;
  } catch (const detail::ObserverStop& stop) {
    res.x_best = stop.x;
    res.f_best = stop.f;
    res.reason = StopReason::observer_stop;
  }

  res.evaluations_used = eval.evals();
  return res;
}

}  // namespace h2ma

#endif  // H2MA_BOXMIN_HPP
