// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one test case per release criterion, each printing a
// single PASS/FAIL line with its pinned tolerances. Checks are non-fatal so
// every criterion is always evaluated and reported.

#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "h2ma/harness.hpp"

using namespace h2ma;

namespace {

struct BudgetRecord {
  std::string label;
  std::int64_t evaluations;
  std::int64_t budget;
};

// Every engine run performed by the gate is registered here; the final
// criterion asserts the budget law over all of them.
std::vector<BudgetRecord>& budget_log() {
  static std::vector<BudgetRecord> log;
  return log;
}

RunResult tracked_run(const Problem& p, const H2maConfig& cfg,
                      const std::string& label) {
  RunResult r = run(p, cfg);
  budget_log().push_back({label, r.evaluations, cfg.budget});
  return r;
}

double final_p_distance(const RunResult& r) {
  return p_distance(r.archive.nondominated_filter());
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("CRITERION %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion 1: hypervolume machinery vs oracles") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 10);
  const NadirPoint z{ObjectiveVector{1.0, 1.0}};

  bool mc_ok = true, contrib_ok = true, grad_ok = true;
  double worst_sigma = 0.0, worst_contrib = 0.0, worst_grad = 0.0;
  int grad_checked = 0;

  for (int inst = 0; inst < 100; ++inst) {
    std::vector<ObjectiveVector> pts;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) pts.push_back(ObjectiveVector{u(rng), u(rng)});

    // exact sweep within 4 sigma of the Monte-Carlo estimate (1e6 samples)
    const double exact = hypervolume(pts, z);
    const auto mc = mc_hypervolume_oracle(pts, z, 1000000, 99 + inst);
    const double dev = std::abs(exact - mc.value);
    if (mc.std_error > 0.0) worst_sigma = std::max(worst_sigma, dev / mc.std_error);
    if (dev > 4.0 * mc.std_error + 1e-12) mc_ok = false;

    // contribution equals the defining two-call difference to 1e-12
    const ObjectiveVector y{u(rng), u(rng)};
    auto plus = pts;
    plus.push_back(y);
    const double c = contribution(y, pts, z);
    const double diff = hypervolume(plus, z) - hypervolume(pts, z);
    worst_contrib = std::max(worst_contrib, std::abs(c - diff));
    if (std::abs(c - diff) > 1e-12) contrib_ok = false;

    // analytic contribution gradient vs central differences to 1e-5
    // (skipped where the gradient is undefined: ties or dominated points)
    try {
      const auto g = contribution_gradient(y, pts, z);
      ++grad_checked;
      const double h = 1e-6;
      for (std::size_t d = 0; d < 2; ++d) {
        auto lo = y.values(), hi = y.values();
        lo[d] -= h;
        hi[d] += h;
        const double fd = (contribution(ObjectiveVector(hi), pts, z) -
                           contribution(ObjectiveVector(lo), pts, z)) /
                          (2.0 * h);
        worst_grad = std::max(worst_grad, std::abs(g[d] - fd));
        if (std::abs(g[d] - fd) > 1e-5) grad_ok = false;
      }
    } catch (const UndefinedGradient&) {
    }
  }

  std::ostringstream d;
  d << "100 instances; max MC deviation " << worst_sigma << " sigma (<= 4); "
    << "max contribution error " << worst_contrib << " (<= 1e-12); "
    << "max gradient error " << worst_grad << " (<= 1e-5, " << grad_checked
    << " points)";
  report(1, mc_ok && contrib_ok && grad_ok, d.str());
  CHECK(mc_ok);
  CHECK(contrib_ok);
  CHECK(grad_ok);
  CHECK(grad_checked >= 30);
}

TEST_CASE("criterion 2: pinned three-point hypervolume") {
  const NadirPoint z{ObjectiveVector{1.0, 1.0}};
  const double hv = hypervolume(
      {ObjectiveVector{0.25, 0.75}, ObjectiveVector{0.5, 0.5},
       ObjectiveVector{0.75, 0.25}},
      z);
  const bool ok = std::abs(hv - 0.375) <= 1e-12;
  std::ostringstream d;
  d.precision(17);
  d << "hv = " << hv << " (expected 0.375 +/- 1e-12)";
  report(2, ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 3: convergence of the final front (P <= 1e-6)") {
  bool all_ok = true;
  std::ostringstream d;
  for (const char* name : {"zdt1", "zdt2", "zdt3", "zdt4"}) {
    const auto p = make_problem(name, 30);
    H2maConfig cfg;  // numeric gradients, budget 20000
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = tracked_run(p, cfg, std::string("c3:") + name);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const double pd = final_p_distance(r);
    const bool ok = pd <= 1e-6 && secs < 30.0;
    all_ok = all_ok && ok;
    d << name << " P=" << pd << " (" << secs << "s) ";
    INFO(name << ": P = " << pd << ", " << secs << "s");
    CHECK(pd <= 1e-6);
    CHECK(secs < 30.0);
  }
  report(3, all_ok, d.str() + "(each: P <= 1e-6, < 30s)");
}

TEST_CASE("criterion 4: hypervolume fraction of the attainable bound") {
  bool all_ok = true;
  std::ostringstream d;
  const struct {
    const char* name;
    double fraction;
  } targets[] = {{"zdt1", 0.98}, {"zdt2", 0.98}, {"zdt3", 0.95}, {"zdt4", 0.98}};
  for (const auto& t : targets) {
    const auto p = make_problem(t.name, 30);
    H2maConfig cfg;
    const auto r = tracked_run(p, cfg, std::string("c4:") + t.name);
    const double bound = p.max_front_hypervolume();
    const double hv = r.trace.empty() ? 0.0 : r.trace.back().hypervolume;
    const double frac = hv / bound;
    const bool ok = frac >= t.fraction;
    all_ok = all_ok && ok;
    d << t.name << " " << frac << " (>= " << t.fraction << ") ";
    INFO(t.name << ": fraction " << frac << " of bound " << bound);
    CHECK(frac >= t.fraction);
  }
  report(4, all_ok, d.str());
}

TEST_CASE("criterion 5: determinism on zdt1-4") {
  bool all_ok = true;
  std::ostringstream d;
  for (const char* name : {"zdt1", "zdt2", "zdt3", "zdt4"}) {
    const auto p = make_problem(name, 30);
    H2maConfig cfg;
    const auto a = tracked_run(p, cfg, std::string("c5a:") + name);
    const auto b = tracked_run(p, cfg, std::string("c5b:") + name);
    std::ostringstream ca, cb;
    dump_archive_csv(a.archive, p.n, ca);
    dump_archive_csv(b.archive, p.n, cb);
    const bool identical = ca.str() == cb.str();
    const bool no_stoch =
        a.stochastic_invocations == 0 && b.stochastic_invocations == 0;
    all_ok = all_ok && identical && no_stoch;
    d << name << (identical ? " identical" : " DIFFERS")
      << " stoch=" << a.stochastic_invocations << " ";
    INFO(name);
    CHECK(identical);
    CHECK(no_stoch);
  }
  report(5, all_ok, d.str() + "(byte-identical archives, 0 stochastic calls)");
}

TEST_CASE("criterion 6: stochastic explorer on zdt6") {
  const auto p = make_problem("zdt6", 30);
  std::vector<double> pds;
  std::int64_t min_stoch = -1;
  for (int i = 0; i < 20; ++i) {
    H2maConfig cfg;
    cfg.rng_seed = 100 + static_cast<std::uint64_t>(i);
    const auto r = tracked_run(p, cfg, "c6:zdt6 seed " + std::to_string(i));
    pds.push_back(final_p_distance(r));
    min_stoch = min_stoch < 0 ? r.stochastic_invocations
                              : std::min(min_stoch, r.stochastic_invocations);
  }
  const double med = percentile(pds, 50);
  const double max = percentile(pds, 100);
  int within = 0;
  for (double v : pds) within += (v <= 1e-3);
  const bool ok = min_stoch >= 1 && med < max && within >= 15;
  std::ostringstream d;
  d << "20 seeds: min stochastic calls " << min_stoch << " (>= 1); median P "
    << med << " < max P " << max << "; " << within
    << "/20 runs with P <= 1e-3 (>= 15)";
  report(6, ok, d.str());
  CHECK(min_stoch >= 1);
  CHECK(med < max);
  CHECK(within >= 15);
}

TEST_CASE("criterion 7: numeric vs analytic gradient cost ratio") {
  const auto z1 = compare_gradient_modes("zdt1", 30, 20000, 0);
  const auto z3 = compare_gradient_modes("zdt3", 30, 20000, 0);
  REQUIRE_FALSE(z1.empty());
  REQUIRE_FALSE(z3.empty());

  std::vector<double> ratios1;
  for (const auto& r : z1) ratios1.push_back(r.ratio);
  const double med1 = percentile(ratios1, 50);
  double min3 = z3.front().ratio;
  for (const auto& r : z3) min3 = std::min(min3, r.ratio);

  const bool ok = med1 >= 15.0 && med1 <= 35.0 && min3 >= 10.0;
  std::ostringstream d;
  d << "zdt1 median ratio " << med1 << " (in [15, 35], " << z1.size()
    << " levels); zdt3 min ratio " << min3 << " (>= 10, " << z3.size()
    << " levels)";
  report(7, ok, d.str());
  CHECK(med1 >= 15.0);
  CHECK(med1 <= 35.0);
  CHECK(min3 >= 10.0);
}

TEST_CASE("criterion 8: analytic Jacobians vs central differences") {
  std::mt19937_64 rng(77);
  bool all_ok = true;
  double worst = 0.0;
  std::string worst_where;
  for (const char* name : {"zdt1", "zdt2", "zdt3", "zdt4", "zdt6"}) {
    const auto p = make_problem(name, 30);
    for (int pt = 0; pt < 100; ++pt) {
      std::vector<double> x(p.n);
      for (std::size_t i = 0; i < p.n; ++i) {
        // stay clear of the sqrt / quartic-root kinks: x1 off 0, tail
        // variables off the zero-sum corner, and off the outer box faces
        const double lo = p.bounds.lo[i], hi = p.bounds.hi[i];
        std::uniform_real_distribution<double> u(lo + 0.05 * (hi - lo),
                                                 hi - 0.05 * (hi - lo));
        x[i] = u(rng);
      }
      const auto jac = p.analytic_jacobian(x);
      for (std::size_t i = 0; i < p.n; ++i) {
        const double h = 1e-6;
        auto xl = x, xh = x;
        xl[i] -= h;
        xh[i] += h;
        const auto yl = p.evaluate(xl).y;
        const auto yh = p.evaluate(xh).y;
        for (std::size_t obj = 0; obj < 2; ++obj) {
          const double fd = (yh[obj] - yl[obj]) / (2.0 * h);
          const double err = std::abs(jac[obj][i] - fd) /
                             std::max(1.0, std::abs(jac[obj][i]));
          if (err > worst) {
            worst = err;
            worst_where = std::string(name) + " f" + std::to_string(obj + 1) +
                          "/x" + std::to_string(i + 1);
          }
          if (err > 1e-4) all_ok = false;
        }
      }
    }
  }
  std::ostringstream d;
  d << "100 interior points per problem; worst relative error " << worst
    << " at " << worst_where << " (<= 1e-4)";
  report(8, all_ok, d.str());
  CHECK(all_ok);
}

TEST_CASE("criterion 9: budget law over all acceptance runs") {
  bool ok = !budget_log().empty();
  std::int64_t worst_over = 0;
  for (const auto& rec : budget_log()) {
    INFO(rec.label << ": " << rec.evaluations << " / " << rec.budget);
    CHECK(rec.evaluations <= rec.budget);
    if (rec.evaluations > rec.budget) {
      ok = false;
      worst_over = std::max(worst_over, rec.evaluations - rec.budget);
    }
  }
  std::ostringstream d;
  d << budget_log().size() << " runs recorded; "
    << (ok ? "all within budget" : "overrun by " + std::to_string(worst_over));
  report(9, ok, d.str());
  CHECK(ok);
}
