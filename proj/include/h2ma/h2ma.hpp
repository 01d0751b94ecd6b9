// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_H2MA_HPP
#define H2MA_H2MA_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "h2ma/boxmin.hpp"
#include "h2ma/core.hpp"
#include "h2ma/hypervolume.hpp"
#include "h2ma/zdt.hpp"

namespace h2ma {

enum class GradientMode { numeric, analytic };

struct H2maConfig {
  std::int64_t budget = 20000;
  std::int64_t target_point_count = 0;  // 0 = run until budget
  GradientMode gradient_mode = GradientMode::numeric;
  int stochastic_population_min = 20;
  std::uint64_t rng_seed = 0;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double relative_improvement_tolerance = 1e-10;
  double minimum_region_volume = 0.0;
};

/// Exploration record: M accepted candidates, their objective-space mean,
/// and the volume of their objective-space bounding box.
struct Region {
  std::vector<Candidate> members;
  ObjectiveVector mid;
  double volume = 0.0;
  std::uint64_t sequence_id = 0;
};

/// Builds a region from exactly M candidates; empty when the bounding box
/// volume does not exceed min_volume (degenerate regions are discarded).
inline std::optional<Region> create_region(std::vector<Candidate> members,
                                           std::uint64_t sequence_id = 0,
                                           double min_volume = 0.0) {
  const std::size_t m = members.front().y.size();
  if (members.size() != m) return std::nullopt;
  double volume = 1.0;
  std::vector<double> mid(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double lo = members[0].y[i], hi = members[0].y[i];
    for (const auto& c : members) {
      lo = std::min(lo, c.y[i]);
      hi = std::max(hi, c.y[i]);
      mid[i] += c.y[i];
    }
    mid[i] /= static_cast<double>(members.size());
    volume *= (hi - lo);
  }
  if (!(volume > min_volume)) return std::nullopt;
  Region r;
  r.members = std::move(members);
  r.mid = ObjectiveVector(std::move(mid));
  r.volume = volume;
  r.sequence_id = sequence_id;
  return r;
}

/// Replaces each parent member in turn with the new point, keeping regions
/// that still have volume. Produces at most M children.
inline std::vector<Region> create_regions(const Region& parent,
                                          const Candidate& new_point,
                                          std::uint64_t& sequence_counter,
                                          double min_volume = 0.0) {
  std::vector<Region> out;
  for (std::size_t skip = 0; skip < parent.members.size(); ++skip) {
    std::vector<Candidate> members;
    for (std::size_t i = 0; i < parent.members.size(); ++i) {
      if (i != skip) members.push_back(parent.members[i]);
    }
    members.push_back(new_point);
    if (auto r = create_region(std::move(members), sequence_counter, min_volume)) {
      ++sequence_counter;
      out.push_back(std::move(*r));
    }
  }
  return out;
}

struct RegionOrder {
  bool operator()(const Region& a, const Region& b) const {
    if (a.volume != b.volume) return a.volume < b.volume;
    return a.sequence_id > b.sequence_id;  // earlier region wins ties
  }
};

using RegionQueue = std::priority_queue<Region, std::vector<Region>, RegionOrder>;

struct TraceSnapshot {
  std::int64_t evaluations = 0;
  double hypervolume = 0.0;
  double p_dist = 0.0;
};

struct RunResult {
  Archive archive;
  std::vector<TraceSnapshot> trace;
  std::int64_t stochastic_invocations = 0;
  std::int64_t evaluations = 0;
};

namespace detail {

inline std::vector<ObjectiveVector> objective_set(
    const std::vector<Candidate>& cs) {
  std::vector<ObjectiveVector> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(c.y);
  return out;
}

}  // namespace detail

/// One H2MA run: region-driven deterministic exploration, hypervolume
/// exploitation, and a seeded evolutionary fallback once the regions are
/// spent. Strictly single-threaded and deterministic for a given seed.
class Engine {
public:
  Engine(const Problem& problem, const H2maConfig& config)
      : problem_(problem),
        config_(config),
        counter_(config.budget),
        rng_(config.rng_seed) {}

  RunResult run() {
    warmup();
    deterministic_phase();
    stochastic_phase();
    result_.evaluations = counter_.count();
    return std::move(result_);
  }

  const EvaluationCounter& counter() const { return counter_; }

  // Exposed for tests; run() is the normal entry point.
  std::optional<Candidate> explore_deterministic(const Region& region) {
    std::vector<double> x0(problem_.n, 0.0);
    for (const auto& m : region.members) {
      for (std::size_t i = 0; i < problem_.n; ++i) x0[i] += m.x[i];
    }
    for (auto& v : x0) v /= static_cast<double>(region.members.size());
    problem_.bounds.clip(x0);

    MinimizeRequest req = base_request(x0);
    req.objective = [this, &region](std::span<const double> x) {
      const auto e = cached_eval(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < e.y.size(); ++i) {
        const double d = e.y[i] - region.mid[i];
        acc += d * d;
      }
      return 0.5 * acc;
    };
    if (config_.gradient_mode == GradientMode::analytic) {
      req.gradient = [this, &region](std::span<const double> x) {
        const auto e = cached_eval(x);
        const auto j = problem_.analytic_jacobian(x);
        std::vector<double> grad(problem_.n, 0.0);
        for (std::size_t i = 0; i < e.y.size(); ++i) {
          const double r = e.y[i] - region.mid[i];
          for (std::size_t k = 0; k < problem_.n; ++k) grad[k] += r * j[i][k];
        }
        return grad;
      };
    }
    req.observer = [this](std::span<const double>, double, std::int64_t) {
      return acceptable(cache_.eval.y);
    };

    const auto res = minimize(req);
    if (res.reason != StopReason::observer_stop) return std::nullopt;
    return Candidate{res.x_best, cache_.eval.y, cache_.eval.g};
  }

  Candidate exploit(const Candidate& start) {
    const std::vector<ObjectiveVector> fixed = nd_objectives_;

    Candidate best = start;
    double best_c = contribution(start.y, fixed, problem_.nadir);

    MinimizeRequest req = base_request(start.x);
    req.objective = [this, &fixed](std::span<const double> x) {
      const auto e = cached_eval(x);
      return -contribution(e.y, fixed, problem_.nadir);
    };
    if (config_.gradient_mode == GradientMode::analytic) {
      req.gradient = [this, &fixed](std::span<const double> x) {
        const auto e = cached_eval(x);
        const auto gy = contribution_gradient_or_numeric(e.y, fixed);
        const auto j = problem_.analytic_jacobian(x);
        std::vector<double> grad(problem_.n, 0.0);
        for (std::size_t k = 0; k < problem_.n; ++k) {
          // maximizing the contribution, so negate the chain rule
          grad[k] = -(gy[0] * j[0][k] + gy[1] * j[1][k]);
        }
        return grad;
      };
    }
    req.observer = [this, &fixed, &best, &best_c](
                       std::span<const double> x, double, std::int64_t) {
      const double c = contribution(cache_.eval.y, fixed, problem_.nadir);
      if (c > best_c) {
        best_c = c;
        best = Candidate{std::vector<double>(x.begin(), x.end()), cache_.eval.y,
                         cache_.eval.g};
      }
      return false;
    };

    minimize(req);
    return best;
  }

  std::optional<Candidate> explore_stochastic() {
    struct Individual {
      std::vector<double> x;
      ObjectiveVector y;
      double g;
    };
    std::vector<Individual> pop;
    for (const auto& e : result_.archive.entries()) {
      pop.push_back({e.candidate.x, e.candidate.y, e.candidate.g});
    }
    const std::size_t target_size = std::max<std::size_t>(
        static_cast<std::size_t>(config_.stochastic_population_min), pop.size());

    const std::size_t n = problem_.n;
    auto uniform_sample = [&] {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_real_distribution<double> u(problem_.bounds.lo[i],
                                                 problem_.bounds.hi[i]);
        x[i] = u(rng_);
      }
      return x;
    };

    try {
      while (pop.size() < target_size) {
        auto x = uniform_sample();
        const auto e = cached_eval(x);
        if (acceptable(e.y)) return Candidate{std::move(x), e.y, e.g};
        pop.push_back({std::move(x), e.y, e.g});
      }

      auto dominance_counts = [&](const std::vector<Individual>& v) {
        std::vector<int> counts(v.size(), 0);
        for (std::size_t i = 0; i < v.size(); ++i) {
          for (std::size_t j = 0; j < v.size(); ++j) {
            if (i != j && dominates(v[j].y, v[i].y)) ++counts[i];
          }
        }
        return counts;
      };

      std::uniform_int_distribution<std::size_t> pick(0, target_size - 1);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      constexpr double kSbxEta = 10.0;
      constexpr double kMutEta = 20.0;

      while (true) {
        auto ranks = dominance_counts(pop);
        auto tournament = [&]() -> const Individual& {
          const std::size_t a = pick(rng_), b = pick(rng_);
          return ranks[a] <= ranks[b] ? pop[a] : pop[b];
        };

        std::vector<Individual> offspring;
        for (std::size_t k = 0; k < target_size; ++k) {
          const auto& pa = tournament();
          const auto& pb = tournament();
          std::vector<double> child(n);
          for (std::size_t i = 0; i < n; ++i) {
            double v1 = pa.x[i], v2 = pb.x[i];
            if (coin(rng_) < 0.5 && std::abs(v1 - v2) > 1e-14) {
              // simulated binary crossover, one child
              const double u = coin(rng_);
              const double beta =
                  u <= 0.5 ? std::pow(2.0 * u, 1.0 / (kSbxEta + 1.0))
                           : std::pow(1.0 / (2.0 * (1.0 - u)),
                                      1.0 / (kSbxEta + 1.0));
              child[i] = 0.5 * ((1.0 + beta) * v1 + (1.0 - beta) * v2);
            } else {
              child[i] = coin(rng_) < 0.5 ? v1 : v2;
            }
            if (coin(rng_) < 1.0 / static_cast<double>(n)) {
              // polynomial mutation
              const double u = coin(rng_);
              const double span = problem_.bounds.hi[i] - problem_.bounds.lo[i];
              const double delta =
                  u < 0.5 ? std::pow(2.0 * u, 1.0 / (kMutEta + 1.0)) - 1.0
                          : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (kMutEta + 1.0));
              child[i] += delta * span;
            }
          }
          problem_.bounds.clip(child);
          const auto e = cached_eval(child);
          if (acceptable(e.y)) return Candidate{std::move(child), e.y, e.g};
          offspring.push_back({std::move(child), e.y, e.g});
        }

        for (auto& o : offspring) pop.push_back(std::move(o));
        auto counts = dominance_counts(pop);
        std::vector<std::size_t> order(pop.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                           return counts[a] < counts[b];
                         });
        std::vector<Individual> survivors;
        survivors.reserve(target_size);
        for (std::size_t k = 0; k < target_size; ++k) {
          survivors.push_back(std::move(pop[order[k]]));
        }
        pop = std::move(survivors);
      }
    } catch (const BudgetExhausted&) {
      return std::nullopt;
    }
  }

private:
  struct LastEval {
    std::vector<double> x;
    ZdtEvaluation eval;
  };

  // Single-entry memo of the most recent problem evaluation. A repeated
  // request for the same point (the exploitation call re-visiting the point
  // exploration just returned, or a gradient callback at the incumbent)
  // reuses the value instead of charging the budget again.
  ZdtEvaluation cached_eval(std::span<const double> x) {
    if (cache_.x.size() == x.size() &&
        std::equal(x.begin(), x.end(), cache_.x.begin())) {
      return cache_.eval;
    }
    counter_.charge();
    cache_.x.assign(x.begin(), x.end());
    cache_.eval = problem_.evaluate(x);
    return cache_.eval;
  }

  // A point is worth exploiting only if its exclusive contribution is
  // strictly positive. Non-dominance alone is not enough: a coordinate tie
  // with an archive member can leave a non-dominated point with zero
  // contribution and a null gradient, which would strand the exploitation.
  bool acceptable(const ObjectiveVector& y) const {
    return dominates(y, problem_.nadir.z) &&
           contribution(y, nd_objectives_, problem_.nadir) > 0.0;
  }

  MinimizeRequest base_request(std::vector<double> x0) const {
    MinimizeRequest req;
    req.bounds = problem_.bounds;
    req.x0 = std::move(x0);
    req.max_iterations = config_.max_iterations;
    req.gradient_tolerance = config_.gradient_tolerance;
    req.relative_improvement_tolerance = config_.relative_improvement_tolerance;
    return req;
  }

  std::array<double, 2> contribution_gradient_or_numeric(
      const ObjectiveVector& y, const std::vector<ObjectiveVector>& fixed) {
    try {
      return contribution_gradient(y, fixed, problem_.nadir);
    } catch (const UndefinedGradient&) {
      // One-sided differencing of the contribution in objective space; costs
      // no problem evaluations. Probe upward: with inclusive cap comparisons
      // the contribution at a coordinate tie equals its right-hand limit, so
      // the forward probe stays on the same continuity piece, while a
      // backward probe would difference across the kink.
      const double c0 = contribution(y, fixed, problem_.nadir);
      std::array<double, 2> g{};
      for (std::size_t i = 0; i < 2; ++i) {
        const double h = 1e-9 * std::max(1.0, std::abs(y[i]));
        auto shifted = y.values();
        shifted[i] += h;
        g[i] = (contribution(ObjectiveVector(shifted), fixed, problem_.nadir) -
                c0) /
               h;
      }
      return g;
    }
  }

  // Keeps the engine's running nondominated view (candidates + objective
  // vectors, insertion order) in sync with the archive; equivalent to
  // Archive::nondominated_filter() but incremental, so per-cycle bookkeeping
  // stays linear in the archive size.
  void append_to_archive(Candidate c, Phase phase) {
    bool dominated = false;
    std::size_t keep = 0;
    for (std::size_t i = 0; i < nd_candidates_.size(); ++i) {
      if (dominates(c.y, nd_candidates_[i].y)) continue;  // evicted
      if (dominates(nd_candidates_[i].y, c.y)) dominated = true;
      if (keep != i) {
        nd_candidates_[keep] = std::move(nd_candidates_[i]);
        nd_objectives_[keep] = std::move(nd_objectives_[i]);
      }
      ++keep;
    }
    nd_candidates_.resize(keep);
    nd_objectives_.resize(keep);
    if (!dominated) {
      nd_candidates_.push_back(c);
      nd_objectives_.push_back(c.y);
    }
    result_.archive.append(std::move(c), phase);
  }

  void snapshot() {
    if (nd_candidates_.empty()) return;
    TraceSnapshot s;
    s.evaluations = counter_.count();
    s.hypervolume = hypervolume(nd_objectives_, problem_.nadir);
    s.p_dist = p_distance(nd_candidates_);
    result_.trace.push_back(s);
  }

  void warmup() {
    const std::size_t m = problem_.nadir.z.size();
    std::vector<Candidate> seeds;
    for (std::size_t obj = 0; obj < m; ++obj) {
      std::optional<Candidate> best;
      double best_f = 0.0;

      MinimizeRequest req = base_request(problem_.bounds.midpoint());
      req.objective = [this, obj](std::span<const double> x) {
        return cached_eval(x).y[obj];
      };
      if (config_.gradient_mode == GradientMode::analytic) {
        req.gradient = [this, obj](std::span<const double> x) {
          return problem_.analytic_jacobian(x)[obj];
        };
      }
      req.observer = [this, &best, &best_f](std::span<const double> x,
                                            double f, std::int64_t) {
        if (!best || f < best_f) {
          best_f = f;
          best = Candidate{std::vector<double>(x.begin(), x.end()),
                           cache_.eval.y, cache_.eval.g};
        }
        return false;
      };

      minimize(req);
      if (!best) return;  // budget gone before the first evaluation
      append_to_archive(*best, Phase::warmup);
      snapshot();
      seeds.push_back(std::move(*best));
    }
    if (seeds.size() == m) {
      if (auto r = create_region(std::move(seeds), sequence_counter_,
                                 config_.minimum_region_volume)) {
        ++sequence_counter_;
        queue_.push(std::move(*r));
      }
    }
  }

  bool target_met() const {
    return config_.target_point_count > 0 &&
           exploited_count_ >= config_.target_point_count;
  }

  void deterministic_phase() {
    while (!counter_.exhausted() && !target_met() && !queue_.empty()) {
      Region region = queue_.top();
      queue_.pop();
      auto c = explore_deterministic(region);
      if (!c) continue;  // region spent without a usable point
      Candidate accepted = exploit(*c);
      for (auto& child : create_regions(region, accepted, sequence_counter_,
                                        config_.minimum_region_volume)) {
        queue_.push(std::move(child));
      }
      append_to_archive(std::move(accepted), Phase::deterministic);
      ++exploited_count_;
      snapshot();
    }
  }

  void stochastic_phase() {
    while (!counter_.exhausted() && !target_met()) {
      ++result_.stochastic_invocations;
      auto c = explore_stochastic();
      if (!c) break;
      Candidate accepted = exploit(*c);
      append_to_archive(std::move(accepted), Phase::stochastic);
      ++exploited_count_;
      snapshot();
    }
  }

  const Problem& problem_;
  H2maConfig config_;
  EvaluationCounter counter_;
  std::mt19937_64 rng_;
  RegionQueue queue_;
  RunResult result_;
  LastEval cache_;
  std::vector<Candidate> nd_candidates_;
  std::vector<ObjectiveVector> nd_objectives_;
  std::uint64_t sequence_counter_ = 0;
  std::int64_t exploited_count_ = 0;
};

inline RunResult run(const Problem& problem, const H2maConfig& config) {
  return Engine(problem, config).run();
}

}  // namespace h2ma

#endif  // H2MA_H2MA_HPP
