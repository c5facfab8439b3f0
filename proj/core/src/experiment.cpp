#include "wpinn/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wpinn/checkpoint.hpp"
#include "wpinn/field.hpp"

namespace wpinn {

namespace fs = std::filesystem;

void RunManifest::validate() const {
  if (situation < 1 || situation > 8) {
    throw std::invalid_argument("situation must be in 1..8, got " + std::to_string(situation));
  }
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (n1 < dim) throw std::invalid_argument("N1 must be >= d");
  if (log_every < 1) throw std::invalid_argument("log-every must be >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  if (!(lr_min >= 0.0) || !(lr_max >= 0.0)) throw std::invalid_argument("learning rates must be >= 0");
  if (n3 < 1 || n4 < 1) throw std::invalid_argument("test point counts must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("output directory must be set");
}

TrainConfig make_train_config(const RunManifest& m) {
  m.validate();
  TrainConfig c;
  c.spec = situation(m.situation, m.dim);
  c.spec.fd.h = m.h;
  c.method = m.method;
  c.diffusion = m.per_direction_weights ? DiffusionWeighting::per_direction : DiffusionWeighting::single;
  c.iterations = m.iterations;
  c.n1 = m.n1;
  c.seed = m.seed;
  c.solution_hidden = m.solution_hidden;
  c.solution_init_gain = m.init_gain;
  c.weight_hidden = m.weight_hidden;
  c.weight_activations.assign(m.weight_hidden.size(), Activation::relu3);
  c.weight_activations.back() = Activation::sigmoid;
  c.neutral_weight_init = m.neutral_weight_init;
  c.lr_min = m.lr_min;
  c.lr_max = m.lr_max;
  c.log_every = m.log_every;
  c.schedule = m.schedule;
  c.ascent_steps = m.ascent_steps;
  c.validate();
  return c;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["situation"] = m.situation;
  j["method"] = to_string(m.method);
  j["dim"] = m.dim;
  j["iterations"] = m.iterations;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir.string();
  j["n1"] = m.n1;
  j["lr_min"] = m.lr_min;
  j["lr_max"] = m.lr_max;
  j["log_every"] = m.log_every;
  j["per_direction_weights"] = m.per_direction_weights;
  j["h"] = m.h;
  j["solution_hidden"] = m.solution_hidden;
  j["init_gain"] = m.init_gain;
  j["weight_hidden"] = m.weight_hidden;
  j["neutral_weight_init"] = m.neutral_weight_init;
  j["schedule"] = m.schedule == UpdateSchedule::simultaneous ? "simultaneous" : "alternating";
  j["ascent_steps"] = m.ascent_steps;
  j["n3"] = m.n3;
  j["n4"] = m.n4;
  j["gnuplot"] = m.gnuplot;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.situation = j.at("situation").get<int>();
  m.method = method_from_string(j.at("method").get<std::string>());
  m.dim = j.at("dim").get<int>();
  m.iterations = j.at("iterations").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.out_dir = j.value("out_dir", std::string("run"));
  m.n1 = j.value("n1", m.n1);
  m.lr_min = j.value("lr_min", m.lr_min);
  m.lr_max = j.value("lr_max", m.lr_max);
  m.log_every = j.value("log_every", m.log_every);
  m.per_direction_weights = j.value("per_direction_weights", m.per_direction_weights);
  m.h = j.value("h", m.h);
  m.solution_hidden = j.value("solution_hidden", m.solution_hidden);
  m.init_gain = j.value("init_gain", m.init_gain);
  m.weight_hidden = j.value("weight_hidden", m.weight_hidden);
  m.neutral_weight_init = j.value("neutral_weight_init", m.neutral_weight_init);
  const std::string schedule = j.value("schedule", std::string("simultaneous"));
  if (schedule == "simultaneous") {
    m.schedule = UpdateSchedule::simultaneous;
  } else if (schedule == "alternating") {
    m.schedule = UpdateSchedule::alternating;
  } else {
    throw std::invalid_argument("unknown schedule '" + schedule + "'");
  }
  m.ascent_steps = j.value("ascent_steps", m.ascent_steps);
  m.n3 = j.value("n3", m.n3);
  m.n4 = j.value("n4", m.n4);
  m.gnuplot = j.value("gnuplot", m.gnuplot);
  m.validate();
  return m;
}

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

RunManifest load_manifest(const fs::path& metadata_path) {
  const auto j = read_json(metadata_path);
  return manifest_from_json(j.at("manifest"));
}

std::string loss_csv(const std::vector<LossRow>& rows) {
  std::string out = loss_csv_header() + "\n";
  for (const auto& r : rows) out += loss_csv_row(r.iteration, r.loss) + "\n";
  return out;
}

std::vector<LossRow> read_loss_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != loss_csv_header()) {
    throw std::runtime_error(path.string() + ": unexpected loss.csv header");
  }
  std::vector<LossRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LossRow r;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf", &r.iteration, &r.loss.eq_term, &r.loss.boundary_term,
                    &r.loss.penalty_term, &r.loss.total) != 5) {
      throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

ErrorReport evaluate_networks(const RunManifest& manifest, const MlpParams& u, const MlpParams& f) {
  ProblemSpec spec = situation(manifest.situation, manifest.dim);
  spec.fd.h = manifest.h;
  Sampler test_rng(manifest.seed, kTestSampleStream);
  return test_error(spec, NetworkField(u), NetworkField(f), test_rng, manifest.n3, manifest.n4);
}

ExperimentResult run_experiment(const RunManifest& manifest) {
  const TrainConfig config = make_train_config(manifest);
  fs::create_directories(manifest.out_dir);

  if (manifest.dump_batch) {
    Sampler peek(config.seed, kTrainSampleStream);
    write_text(*manifest.dump_batch, batch_to_csv(peek.batch(config.spec.domain, config.spec.horizon, config.n1)));
  }

  ExperimentResult result;
  result.report = train(config);
  const auto& nets = result.report.nets;
  result.errors = evaluate_networks(manifest, nets.u, nets.f);

  write_text(manifest.out_dir / "loss.csv", loss_csv(result.report.rows));
  if (manifest.gnuplot) {
    std::string dat;
    char buf[64];
    for (const auto& r : result.report.rows) {
      std::snprintf(buf, sizeof(buf), "%ld %.17g\n", r.iteration, r.loss.total);
      dat += buf;
    }
    write_text(manifest.out_dir / "loss.dat", dat);
  }
  write_text(manifest.out_dir / "errors.json",
             to_json(result.errors, manifest.situation, to_string(manifest.method), manifest.seed).dump(2) + "\n");

  save_checkpoint(manifest.out_dir / "u.net", nets.u);
  save_checkpoint(manifest.out_dir / "f.net", nets.f);
  if (nets.weights) {
    fs::create_directories(manifest.out_dir / "weights");
    for (const auto& w : nets.weights->nets) {
      save_checkpoint(manifest.out_dir / "weights" / (w.slot.name() + ".net"), w.params);
    }
  }

  nlohmann::json meta;
  meta["manifest"] = to_json(manifest);
  meta["seed"] = manifest.seed;
  meta["wall_seconds"] = result.report.wall_seconds;
  meta["iterations_completed"] = result.report.iterations_completed;
  meta["fd_step"] = manifest.h;
  meta["equation"] = to_string(config.spec.equation);
  meta["control"] = to_string(config.spec.control);
  meta["horizon"] = config.spec.horizon;
  meta["rng"] = "mt19937_64; streams: init=1, train=2, test=3, calibration=4";
  if (result.report.failure) meta["failure"] = *result.report.failure;
  write_text(manifest.out_dir / "metadata.json", meta.dump(2) + "\n");

  if (result.report.failure) throw std::runtime_error("training aborted: " + *result.report.failure);
  return result;
}

StoredRun load_run(const fs::path& dir) {
  StoredRun run;
  run.manifest = load_manifest(dir / "metadata.json");
  run.errors = read_json(dir / "errors.json");
  run.nets.u = load_checkpoint(dir / "u.net");
  run.nets.f = load_checkpoint(dir / "f.net");
  if (run.manifest.method == Method::weighted) {
    const auto spec = situation(run.manifest.situation, run.manifest.dim);
    WeightNetBundle bundle;
    bundle.diffusion =
        run.manifest.per_direction_weights ? DiffusionWeighting::per_direction : DiffusionWeighting::single;
    for (const auto& slot : weight_slots(spec.equation, bundle.diffusion, spec.dim)) {
      bundle.nets.push_back({slot, load_checkpoint(dir / "weights" / (slot.name() + ".net"))});
    }
    run.nets.weights = std::move(bundle);
  }
  return run;
}

ComparisonTable compare(const fs::path& run_a, const fs::path& run_b) {
  const auto meta_a = read_json(run_a / "metadata.json").at("manifest");
  const auto meta_b = read_json(run_b / "metadata.json").at("manifest");
  const auto err_a = read_json(run_a / "errors.json");
  const auto err_b = read_json(run_b / "errors.json");
  const int sit_a = meta_a.at("situation").get<int>();
  const int sit_b = meta_b.at("situation").get<int>();
  if (sit_a != sit_b) {
    throw std::invalid_argument("cannot compare runs of different situations (" + std::to_string(sit_a) +
                                " vs " + std::to_string(sit_b) + ")");
  }

  const auto row = [](const nlohmann::json& err, const std::string& method) {
    ComparisonRow r;
    r.label = method == "weighted" ? "WeightedPINN" : "Standard";
    r.total = err.at("total").get<double>();
    r.equation = err.at("equation_error").get<double>();
    r.boundary = err.at("boundary_error").get<double>();
    return r;
  };
  const std::string method_a = meta_a.at("method").get<std::string>();
  const std::string method_b = meta_b.at("method").get<std::string>();

  ComparisonTable table;
  table.situation = sit_a;
  table.rows.push_back(row(err_a, method_a));
  table.rows.push_back(row(err_b, method_b));
  if (method_a == "weighted" && method_b == "standard") std::swap(table.rows[0], table.rows[1]);
  if (method_a != method_b) {
    const auto& s = table.rows[0];
    const auto& w = table.rows[1];
    table.ratio = ComparisonRow{"Weighted/Std", w.total / s.total, w.equation / s.equation, w.boundary / s.boundary};
  }
  return table;
}

std::string ComparisonTable::render() const {
  std::ostringstream out;
  char buf[128];
  out << "Situation " << situation << "\n";
  std::snprintf(buf, sizeof(buf), "%-14s| %-11s| %-11s| %-11s\n", "", "Total", "Eqn.", "Bnd.");
  out << buf;
  out << "--------------+------------+------------+------------\n";
  const auto emit = [&](const ComparisonRow& r) {
    std::snprintf(buf, sizeof(buf), "%-14s| %-11.3e| %-11.3e| %-11.3e\n", r.label.c_str(), r.total, r.equation,
                  r.boundary);
    out << buf;
  };
  for (const auto& r : rows) emit(r);
  if (ratio) {
    out << "--------------+------------+------------+------------\n";
    emit(*ratio);
  }
  return out.str();
}

}  // namespace wpinn
