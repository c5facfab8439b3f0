// wpinn: train and evaluate standard / weighted PINNs on the eight reference
// control problems, and compare finished runs.

#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "wpinn/experiment.hpp"

namespace {

int run_command(wpinn::RunManifest m, const std::string& metadata, const CLI::App& app) {
  if (!metadata.empty()) {
    // Explicit --out still wins; everything else comes from the stored manifest.
    const auto out = m.out_dir;
    m = wpinn::load_manifest(metadata);
    if (app.count("--out") > 0) m.out_dir = out;
  }
  const auto result = wpinn::run_experiment(m);
  const auto& e = result.errors;
  std::printf("situation %d  method %s  d=%d  iterations %d  seed %llu  (%.1f s)\n", m.situation,
              wpinn::to_string(m.method).c_str(), m.dim, m.iterations, static_cast<unsigned long long>(m.seed),
              result.report.wall_seconds);
  if (!result.report.rows.empty()) {
    const auto& last = result.report.rows.back();
    std::printf("final loss  total %.4e  eq %.4e  bnd %.4e  penalty %.4e\n", last.loss.total, last.loss.eq_term,
                last.loss.boundary_term, last.loss.penalty_term);
  }
  std::printf("test error  total %.4e  eqn %.4e  bnd %.4e\n", e.total, e.equation_error, e.boundary_error);
  std::printf("artifacts in %s\n", m.out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted PINN control reconstruction for semilinear heat and wave equations"};
  app.require_subcommand(1);

  wpinn::RunManifest m;
  std::string method = "weighted";
  std::string metadata;
  std::string schedule = "simultaneous";
  std::string dump_batch;
  double lr = -1.0;

  auto* run = app.add_subcommand("run", "Train one method on one situation and write artifacts");
  // --h is the finite-difference step, so help is long-form only here.
  run->set_help_flag("--help", "Print this help message and exit");
  run->add_option("--situation", m.situation, "Situation id (1-8)")->check(CLI::Range(1, 8));
  run->add_option("--method", method, "standard or weighted")
      ->check(CLI::IsMember({"standard", "weighted"}));
  run->add_option("--dim", m.dim, "Spatial dimension d")->check(CLI::PositiveNumber);
  run->add_option("--iterations", m.iterations, "Training iterations")->check(CLI::PositiveNumber);
  run->add_option("--n1", m.n1, "Interior/boundary training points per iteration")->check(CLI::PositiveNumber);
  run->add_option("--seed", m.seed, "Run seed");
  run->add_option("--lr", lr, "Learning rate for both players")->check(CLI::NonNegativeNumber);
  run->add_option("--lr-min", m.lr_min, "Learning rate of the solution/control networks")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--lr-max", m.lr_max, "Learning rate of the weight networks")->check(CLI::NonNegativeNumber);
  run->add_option("--out", m.out_dir, "Output directory");
  run->add_option("--log-every", m.log_every, "Loss logging cadence")->check(CLI::PositiveNumber);
  run->add_flag("--per-direction-weights", m.per_direction_weights,
                "One diffusion weight per coordinate instead of one for the Laplacian");
  run->add_option("--h", m.h, "Finite-difference step")->check(CLI::PositiveNumber);
  run->add_option("--u-hidden", m.solution_hidden, "Hidden widths of the solution/control networks");
  run->add_option("--init-gain", m.init_gain, "Scale of the solution/control network init bounds")
      ->check(CLI::PositiveNumber);
  run->add_option("--w-hidden", m.weight_hidden, "Hidden widths of the weight networks");
  run->add_option("--n3", m.n3, "Interior/boundary test points")->check(CLI::PositiveNumber);
  run->add_option("--n4", m.n4, "Initial/terminal test points")->check(CLI::PositiveNumber);
  run->add_option("--schedule", schedule, "simultaneous or alternating")
      ->check(CLI::IsMember({"simultaneous", "alternating"}));
  run->add_option("--ascent-steps", m.ascent_steps, "Weight-network ascent steps per iteration")
      ->check(CLI::PositiveNumber);
  run->add_flag("--gnuplot", m.gnuplot, "Also write loss.dat (iteration total)");
  run->add_option("--dump-batch", dump_batch, "Write the first training batch as CSV");
  run->add_option("--metadata", metadata, "Re-run from a metadata.json written by an earlier run")
      ->check(CLI::ExistingFile);

  std::string run_a, run_b;
  auto* cmp = app.add_subcommand("compare", "Side-by-side test errors of two runs");
  cmp->add_option("run_a", run_a, "First run directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("run_b", run_b, "Second run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      m.method = wpinn::method_from_string(method);
      m.schedule = schedule == "alternating" ? wpinn::UpdateSchedule::alternating
                                             : wpinn::UpdateSchedule::simultaneous;
      if (lr >= 0.0) m.lr_min = m.lr_max = lr;
      if (!dump_batch.empty()) m.dump_batch = dump_batch;
      return run_command(m, metadata, *run);
    }
    if (cmp->parsed()) {
      std::cout << wpinn::compare(run_a, run_b).render();
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "wpinn: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wpinn: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
