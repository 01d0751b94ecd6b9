// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `bench` reproduces the repeated-run percentile
// protocol, `gradcmp` compares numeric vs analytic gradient cost, `run`
// performs a single run and dumps the archive, `hv` scores a point file.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "h2ma/harness.hpp"

namespace {

h2ma::GradientMode parse_mode(const std::string& s) {
  if (s == "numeric") return h2ma::GradientMode::numeric;
  if (s == "analytic") return h2ma::GradientMode::analytic;
  throw CLI::ValidationError("gradient_mode must be numeric or analytic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy hypervolume-maximization optimizer for bi-objective problems"};
  app.require_subcommand(1);

  const std::vector<std::string> problems = {"zdt1", "zdt2", "zdt3", "zdt4",
                                             "zdt6"};

  // bench
  h2ma::ExperimentConfig bench_cfg;
  std::string bench_mode = "numeric";
  auto* bench = app.add_subcommand("bench", "run the percentile experiment");
  bench->add_option("--problem", bench_cfg.problem, "benchmark problem")
      ->check(CLI::IsMember(problems))
      ->required();
  bench->add_option("--n", bench_cfg.n, "decision dimension");
  bench->add_option("--budget", bench_cfg.budget, "evaluation budget");
  bench->add_option("--runs", bench_cfg.runs, "independent runs");
  bench->add_option("--trace-interval", bench_cfg.trace_interval,
                    "percentile sampling interval");
  bench->add_option("--gradient-mode", bench_mode, "numeric|analytic");
  bench->add_option("--seed", bench_cfg.base_seed, "base RNG seed");
  bench->add_option("--output", bench_cfg.output_dir, "output directory");
  bench->add_option("--workers", bench_cfg.workers, "parallel run workers");

  // gradcmp
  std::string gc_problem;
  std::size_t gc_n = 30;
  std::int64_t gc_budget = 20000;
  std::uint64_t gc_seed = 0;
  auto* gradcmp =
      app.add_subcommand("gradcmp", "numeric vs analytic gradient cost");
  gradcmp->add_option("--problem", gc_problem, "benchmark problem")
      ->check(CLI::IsMember(std::vector<std::string>{"zdt1", "zdt2", "zdt3",
                                                     "zdt4"}))
      ->required();
  gradcmp->add_option("--n", gc_n, "decision dimension");
  gradcmp->add_option("--budget", gc_budget, "evaluation budget");
  gradcmp->add_option("--seed", gc_seed, "RNG seed");

  // run
  std::string run_problem;
  std::size_t run_n = 30;
  std::int64_t run_budget = 20000;
  std::int64_t run_points = 0;
  std::uint64_t run_seed = 0;
  std::string run_mode = "numeric";
  std::string run_output;
  auto* single = app.add_subcommand("run", "single run, dumps archive CSV");
  single->add_option("--problem", run_problem, "benchmark problem")
      ->check(CLI::IsMember(problems))
      ->required();
  single->add_option("--n", run_n, "decision dimension");
  single->add_option("--budget", run_budget, "evaluation budget");
  single->add_option("--points", run_points, "target point count (0 = budget)");
  single->add_option("--seed", run_seed, "RNG seed");
  single->add_option("--gradient-mode", run_mode, "numeric|analytic");
  single->add_option("--output", run_output, "archive CSV path (default stdout)");

  // hv
  std::string hv_file;
  std::vector<double> hv_nadir;
  auto* hv = app.add_subcommand("hv", "hypervolume of a 2-column CSV");
  hv->add_option("file", hv_file, "CSV with f_1,f_2 columns")->required();
  hv->add_option("--nadir", hv_nadir, "nadir point, two values")
      ->expected(2)
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      bench_cfg.gradient_mode = parse_mode(bench_mode);
      const auto result = h2ma::run_experiment(bench_cfg);
      h2ma::write_experiment_outputs(bench_cfg, result);
      std::int64_t stochastic = 0;
      for (const auto& r : result.runs) stochastic += r.stochastic_invocations;
      std::cout << "wrote " << bench_cfg.output_dir << "/percentiles.csv ("
                << bench_cfg.runs << " runs, " << stochastic
                << " stochastic invocations total)\n";
    } else if (*gradcmp) {
      const auto rows =
          h2ma::compare_gradient_modes(gc_problem, gc_n, gc_budget, gc_seed);
      std::cout << "H,evals_numeric,evals_analytic,ratio\n";
      for (const auto& r : rows) {
        std::cout << r.level << ',' << r.evals_numeric << ','
                  << r.evals_analytic << ',' << r.ratio << '\n';
      }
    } else if (*single) {
      const auto problem = h2ma::make_problem(run_problem, run_n);
      h2ma::H2maConfig cfg;
      cfg.budget = run_budget;
      cfg.target_point_count = run_points;
      cfg.rng_seed = run_seed;
      cfg.gradient_mode = parse_mode(run_mode);
      const auto result = h2ma::run(problem, cfg);
      if (run_output.empty()) {
        h2ma::dump_archive_csv(result.archive, run_n, std::cout);
      } else {
        std::ofstream out(run_output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open: " + run_output);
        h2ma::dump_archive_csv(result.archive, run_n, out);
      }
      std::cerr << "evaluations=" << result.evaluations
                << " archive=" << result.archive.size()
                << " stochastic_invocations=" << result.stochastic_invocations
                << '\n';
    } else if (*hv) {
      const h2ma::NadirPoint z{h2ma::ObjectiveVector{hv_nadir[0], hv_nadir[1]}};
      std::cout << h2ma::hv_of_file(hv_file, z) << '\n';
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
