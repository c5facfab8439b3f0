#pragma once

// One experiment = one situation, one method, one seed. Artifacts written to
// the output directory:
//
//   loss.csv        iteration,eq_term,boundary_term,penalty_term,total
//   loss.dat        iteration total (only with gnuplot output enabled)
//   errors.json     final test errors
//   metadata.json   the manifest plus seed and wall-clock; enough to re-run
//   u.net, f.net, weights/<slot>.net   network checkpoints

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wpinn/metrics.hpp"
#include "wpinn/trainer.hpp"

namespace wpinn {

struct RunManifest {
  int situation = 1;
  Method method = Method::weighted;
  int dim = 10;
  int iterations = 10000;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";

  int n1 = 1000;
  double lr_min = 1e-3;
  double lr_max = 1e-3;
  int log_every = 10;
  bool per_direction_weights = false;
  double h = 1e-3;
  std::vector<int> solution_hidden = {100, 100, 100};
  double init_gain = 1.0;
  std::vector<int> weight_hidden = {40, 40, 40};
  bool neutral_weight_init = true;
  UpdateSchedule schedule = UpdateSchedule::simultaneous;
  int ascent_steps = 1;
  int n3 = kDefaultTestInterior;
  int n4 = kDefaultTestSlice;

  bool gnuplot = false;
  std::optional<std::filesystem::path> dump_batch;

  void validate() const;
};

TrainConfig make_train_config(const RunManifest& manifest);

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

// Reads the manifest stored in a metadata.json written by run_experiment.
RunManifest load_manifest(const std::filesystem::path& metadata_path);

struct ExperimentResult {
  TrainingReport report;
  ErrorReport errors;
};

// Trains, evaluates and writes all artifacts. Throws std::runtime_error when
// training aborted (artifacts for the partial run are still written) or on I/O failure.
ExperimentResult run_experiment(const RunManifest& manifest);

// Test error of the given networks on the manifest's test sample stream.
ErrorReport evaluate_networks(const RunManifest& manifest, const MlpParams& u, const MlpParams& f);

struct StoredRun {
  RunManifest manifest;
  nlohmann::json errors;
  Networks nets;
};
StoredRun load_run(const std::filesystem::path& dir);

std::vector<LossRow> read_loss_csv(const std::filesystem::path& path);
std::string loss_csv(const std::vector<LossRow>& rows);

struct ComparisonRow {
  std::string label;
  double total = 0.0;
  double equation = 0.0;
  double boundary = 0.0;
};

struct ComparisonTable {
  int situation = 0;
  std::vector<ComparisonRow> rows;     // one per run
  std::optional<ComparisonRow> ratio;  // weighted / standard, when both are present

  std::string render() const;
};

// Side-by-side test errors of two completed runs of the same situation.
ComparisonTable compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b);

}  // namespace wpinn
