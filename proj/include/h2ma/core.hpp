// SPDX-License-Identifier: Apache-2.0

#ifndef H2MA_CORE_HPP
#define H2MA_CORE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace h2ma {

/// Point in the objective space (minimization). Entries are validated to be
/// finite at construction; a non-finite objective value is a hard error.
class ObjectiveVector {
public:
  ObjectiveVector() = default;

  explicit ObjectiveVector(std::vector<double> values)
      : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw std::invalid_argument("ObjectiveVector needs at least 2 objectives");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("ObjectiveVector entry is not finite");
      }
    }
  }

  ObjectiveVector(std::initializer_list<double> values)
      : ObjectiveVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ObjectiveVector& a, const ObjectiveVector& b) {
    return a.values_ == b.values_;
  }

private:
  std::vector<double> values_;
};

/// Strict dominance: a dominates b iff a_i < b_i in every coordinate.
/// Ties in any coordinate block dominance.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dominates: objective length mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] < b[i])) return false;
  }
  return true;
}

enum class Phase { warmup, deterministic, stochastic };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::warmup: return "warmup";
    case Phase::deterministic: return "deterministic";
    case Phase::stochastic: return "stochastic";
  }
  return "?";
}

/// One evaluated solution: decision vector plus its cached objective vector
/// and the problem's auxiliary g value (used by the P-distance metric).
struct Candidate {
  std::vector<double> x;
  ObjectiveVector y;
  double g = 1.0;
};

/// Archive entry with the phase that produced it (for trace/CSV reporting).
struct ArchiveEntry {
  Candidate candidate;
  Phase phase = Phase::warmup;
};

/// Append-only set of accepted candidates, in greedy acceptance order.
/// Dominated members are retained for provenance; metrics go through
/// nondominated_filter().
class Archive {
public:
  void append(Candidate c, Phase phase) {
    entries_.push_back({std::move(c), phase});
  }

  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool is_nondominated(const ObjectiveVector& y) const {
    for (const auto& e : entries_) {
      if (dominates(e.candidate.y, y)) return false;
    }
    return true;
  }

  /// Members not dominated by any other member, in insertion order.
  std::vector<Candidate> nondominated_filter() const {
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (i != j && dominates(entries_[j].candidate.y, entries_[i].candidate.y)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) out.push_back(entries_[i].candidate);
    }
    return out;
  }

private:
  std::vector<ArchiveEntry> entries_;
};

/// Thrown when the evaluation budget would be exceeded. Optimizer layers
/// catch this and finalize with best-so-far state.
struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Counts objective-function evaluations against a hard budget. Every
/// evaluation (including finite-difference probes and line-search trials)
/// charges exactly one unit.
class EvaluationCounter {
public:
  explicit EvaluationCounter(std::int64_t budget) : budget_(budget) {
    if (budget <= 0) throw std::invalid_argument("budget must be positive");
  }

  void charge() {
    if (count_ >= budget_) throw BudgetExhausted{};
    ++count_;
  }

  std::int64_t count() const { return count_; }
  std::int64_t budget() const { return budget_; }
  bool exhausted() const { return count_ >= budget_; }
  std::int64_t remaining() const { return budget_ - count_; }

private:
  std::int64_t count_ = 0;
  std::int64_t budget_;
};

}  // namespace h2ma

#endif  // H2MA_CORE_HPP
