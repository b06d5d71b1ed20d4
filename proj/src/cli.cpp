// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <type_traits>

#include <CLI11.hpp>
#include <json.hpp>

#include "prunemi/checkpoint.hpp"
#include "prunemi/datagen.hpp"
#include "prunemi/harness.hpp"
#include "prunemi/idx.hpp"
#include "prunemi/pruning.hpp"
#include "prunemi/rng.hpp"
#include "prunemi/saturator.hpp"
#include "prunemi/svg.hpp"
#include "prunemi/theory.hpp"
#include "prunemi/train.hpp"

namespace prunemi {

SweepResult run_cells(std::size_t cells, std::size_t workers,
                      const std::function<std::vector<ExperimentRecord>(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(cells, 1));
  std::vector<std::vector<ExperimentRecord>> results(cells);
  std::vector<std::string> errors(cells);
  std::vector<char> failed(cells, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      try {
        results[i] = job(i);
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = "cell " + std::to_string(i) + ": " + e.what();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  SweepResult out;
  for (std::size_t i = 0; i < cells; ++i) {
    if (failed[i]) {
      out.failures.push_back(errors[i]);
    } else {
      out.records.insert(out.records.end(), results[i].begin(), results[i].end());
    }
  }
  return out;
}

namespace {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& field) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("field '" + field + "': '" + tok + "' is not a number");
    }
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s, const std::string& field) {
  std::vector<std::size_t> out;
  for (double v : parse_doubles(s, field)) {
    if (!(v >= 1) || v != std::floor(v)) {
      throw ConfigError("field '" + field + "': entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_keeps(const std::string& s, const std::string& field) {
  auto keeps = parse_doubles(s, field);
  if (keeps.empty()) throw ConfigError("field '" + field + "' must not be empty");
  for (double k : keeps) {
    if (!(k > 0 && k <= 1)) throw ConfigError("field '" + field + "': keep fractions must be in (0, 1]");
  }
  return keeps;
}

std::vector<PruneMethod> parse_methods(const std::string& s, const std::string& field) {
  std::vector<PruneMethod> out;
  for (const auto& tok : split(s, ',')) {
    try {
      out.push_back(parse_prune_method(tok));
    } catch (const std::exception& e) {
      throw ConfigError("field '" + field + "': " + e.what());
    }
  }
  if (out.empty()) throw ConfigError("field '" + field + "' must not be empty");
  return out;
}

/// Registry tying flags to JSON config keys so that the file supplies values
/// only where the command line did not.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <typename T>
  void add(const std::string& name, T& var, const std::string& help) {
    std::string flags = "--" + name;
    std::string dashed = name;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != name) flags += ",--" + dashed;
    CLI::Option* opt = app_->add_option(flags, var, help)->capture_default_str();
    entries_[name] = Entry{opt, [&var, name](const json& j) { assign(var, j, name); }};
  }

  void apply(const json& doc) const {
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "subcommand") continue;
      auto it = entries_.find(key);
      if (it == entries_.end()) throw ConfigError("config: unknown field '" + key + "'");
      if (it->second.opt->count() > 0) continue;  // flag wins
      it->second.set(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* opt = nullptr;
    std::function<void(const json&)> set;
  };

  template <typename T>
  static void assign(T& var, const json& j, const std::string& name) {
    auto bad = [&](const char* want) {
      return ConfigError("config field '" + name + "' must be " + want);
    };
    if constexpr (std::is_same_v<T, std::string>) {
      if (j.is_string()) {
        var = j.get<std::string>();
      } else if (j.is_array()) {
        std::string joined;
        for (const auto& e : j) {
          if (!joined.empty()) joined += ',';
          if (e.is_string()) {
            joined += e.get<std::string>();
          } else if (e.is_number()) {
            joined += format_double(e.get<double>());
          } else {
            throw bad("a string or an array of strings/numbers");
          }
        }
        var = joined;
      } else if (j.is_number()) {
        var = format_double(j.get<double>());
      } else {
        throw bad("a string");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw bad("a boolean");
      var = j.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.is_number_integer() || (std::is_unsigned_v<T> && j.get<long long>() < 0)) {
        throw bad("a nonnegative integer");
      }
      var = j.get<T>();
    } else {
      if (!j.is_number()) throw bad("a number");
      var = j.get<T>();
    }
  }

  CLI::App* app_;
  std::map<std::string, Entry> entries_;
};

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t num_seeds = 1;
  std::string output = "prunemi-out";
  std::string formats = "csv,json,svg";
  std::size_t workers = 0;
};

void add_common(CLI::App* app, Params& params, Common& c, std::size_t default_seeds) {
  c.num_seeds = default_seeds;
  app->add_option("--config", c.config, "flat JSON config; flags override its values");
  params.add("seed", c.seed, "master seed");
  params.add("num_seeds", c.num_seeds, "number of seeds in the sweep");
  params.add("output", c.output, "output directory");
  params.add("formats", c.formats, "subset of csv,json,svg");
  params.add("workers", c.workers, "worker threads (0 = all cores)");
}

struct TrainParams {
  std::string loss = "bce";
  std::string optimizer = "sgd";
  double lr = 1e-2;
  std::size_t batch_size = 1;
  std::size_t max_epochs = 300;
  double loss_tolerance = 0.01;
  std::size_t patience = 0;
  double gradient_noise = 0.0;

  void add(Params& p) {
    p.add("loss", loss, "mse or bce");
    p.add("optimizer", optimizer, "sgd or adam");
    p.add("lr", lr, "learning rate");
    p.add("batch_size", batch_size, "mini-batch size (0 = full batch)");
    p.add("max_epochs", max_epochs, "epoch cap per training run");
    p.add("loss_tolerance", loss_tolerance, "stop at this training loss");
    p.add("patience", patience, "stop after this many epochs of unchanged accuracy (0 = off)");
    p.add("gradient_noise", gradient_noise, "std of Gaussian noise added to gradients");
  }

  TrainConfig build() const {
    TrainConfig tc;
    try {
      tc.loss = parse_loss(loss);
      tc.optimizer = parse_optimizer(optimizer);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    tc.learning_rate = lr;
    tc.batch_size = batch_size;
    tc.max_epochs = max_epochs;
    tc.loss_tolerance = loss_tolerance;
    tc.patience = patience;
    tc.gradient_noise_scale = gradient_noise;
    try {
      tc.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    return tc;
  }
};

void validate_common(const Common& c) {
  if (c.num_seeds == 0) throw ConfigError("field 'num_seeds' must be >= 1");
  for (const auto& f : split(c.formats, ',')) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ConfigError("field 'formats': unknown format '" + f + "'");
    }
  }
}

std::filesystem::path prepare_output(const Common& c) {
  std::filesystem::path dir(c.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("field 'output': cannot create directory '" + c.output + "'");
  }
  const auto probe = dir / ".prunemi-write-test";
  {
    std::ofstream t(probe);
    if (!t) throw ConfigError("field 'output': directory '" + c.output + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

enum class XAxis { kKeep, kEpoch };

/// One chart per metric: mean +- stderr of each method against keep or epoch.
std::map<std::string, SvgChart> build_charts(const std::vector<ExperimentRecord>& records,
                                             XAxis axis, const std::string& title) {
  // metric -> method -> (x, -keep) -> values. Sorting on -keep puts the
  // end-of-round point before the post-prune point at a shared epoch.
  std::map<std::string, std::map<std::string, std::map<std::pair<double, double>, std::vector<double>>>>
      groups;
  for (const auto& r : records) {
    const double x = axis == XAxis::kKeep ? r.keep : static_cast<double>(r.epoch);
    const double tie = axis == XAxis::kKeep ? 0.0 : -r.keep;
    groups[r.metric][r.method][{x, tie}].push_back(r.value);
  }
  std::map<std::string, SvgChart> charts;
  for (const auto& [metric, methods] : groups) {
    SvgChart ch;
    ch.title = title + ": " + metric;
    ch.x_label = axis == XAxis::kKeep ? "keep fraction" : "epoch";
    ch.y_label = metric;
    ch.log_x = axis == XAxis::kKeep;
    for (const auto& [method, pts] : methods) {
      SvgSeries s;
      s.label = method;
      for (const auto& [key, values] : pts) {
        const SummaryCell c = summarize_values(values);
        s.points.push_back({key.first, c.mean, c.stderr_mean.value_or(0.0)});
      }
      ch.series.push_back(std::move(s));
    }
    charts[metric] = std::move(ch);
  }
  return charts;
}

int finish(const std::string& name, const SweepResult& res, const Common& c, XAxis axis,
           std::ostream& out, std::ostream& err, bool charts = true) {
  const auto dir = prepare_output(c);
  const auto formats = split(c.formats, ',');
  auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  if (wants("csv")) write_file(dir / (name + ".csv"), records_csv(res.records));
  if (wants("json")) {
    write_file(dir / (name + "_summary.json"),
               summary_json(summarize(res.records, axis == XAxis::kEpoch)));
  }
  if (charts && wants("svg")) {
    for (const auto& [metric, chart] : build_charts(res.records, axis, name)) {
      write_file(dir / (name + "_" + metric + ".svg"), render_line_chart(chart));
    }
  }
  out << name << ": " << res.records.size() << " records written to " << dir.string() << "\n";
  if (!res.failures.empty()) {
    for (const auto& f : res.failures) err << "failed " << f << "\n";
    err << name << ": " << res.failures.size() << " cell(s) failed\n";
    return kExitPartialFailure;
  }
  return kExitOk;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------- memcap

struct MemcapParams {
  std::string dataset = "gaussian";
  std::size_t n = 30;
  std::size_t d = 30;
  std::string idx_images;
  std::string idx_labels;
  std::string positive_classes = "5,6,7,8,9";
  std::size_t max_points = 0;
  double input_noise_var = 3.0;
  std::string hidden = "20,20";
  std::string methods = "imp,magnitude_after,snip,grasp,synflow,random";
  std::string keeps = "1,0.5,0.2,0.1,0.05";
  bool retrain_from_init = true;
  std::size_t synflow_iterations = 100;
  double drop_rate = 0.2;
  TrainParams train;

  void add(Params& p) {
    p.add("dataset", dataset, "gaussian or idx");
    p.add("n", n, "points (gaussian)");
    p.add("d", d, "dimension (gaussian)");
    p.add("idx_images", idx_images, "IDX image file (dataset=idx)");
    p.add("idx_labels", idx_labels, "IDX label file (dataset=idx)");
    p.add("positive_classes", positive_classes, "classes mapped to label +1 (dataset=idx)");
    p.add("max_points", max_points, "use the first this many IDX points (0 = all)");
    p.add("input_noise_var", input_noise_var, "Gaussian input noise variance (dataset=idx)");
    p.add("hidden", hidden, "hidden widths");
    p.add("methods", methods, "pruning methods");
    p.add("keeps", keeps, "keep fractions");
    p.add("retrain_from_init", retrain_from_init, "retrain after-training masks from init");
    p.add("synflow_iterations", synflow_iterations, "SynFlow pruning iterations");
    p.add("drop_rate", drop_rate, "IMP per-round drop rate");
    train.add(p);
  }
};

int run_memcap(const MemcapParams& p, const Common& c, std::ostream& out, std::ostream& err) {
  validate_common(c);
  MemcapConfig cfg;
  cfg.hidden = parse_sizes(p.hidden, "hidden");
  cfg.train = p.train.build();
  cfg.retrain_from_init = p.retrain_from_init;
  cfg.synflow_iterations = p.synflow_iterations;
  cfg.imp_drop_rate = p.drop_rate;
  if (!(p.drop_rate > 0 && p.drop_rate < 1)) throw ConfigError("field 'drop_rate' must be in (0, 1)");
  if (p.synflow_iterations == 0) throw ConfigError("field 'synflow_iterations' must be >= 1");
  const auto methods = parse_methods(p.methods, "methods");
  const auto keeps = parse_keeps(p.keeps, "keeps");

  Dataset base;
  const bool gaussian = p.dataset == "gaussian";
  if (gaussian) {
    if (p.n == 0 || p.d == 0) throw ConfigError("fields 'n' and 'd' must be >= 1");
  } else if (p.dataset == "idx") {
    if (p.idx_images.empty() || p.idx_labels.empty()) {
      throw ConfigError("dataset=idx needs 'idx_images' and 'idx_labels'");
    }
    std::vector<int> pos;
    for (auto v : parse_doubles(p.positive_classes, "positive_classes")) pos.push_back(static_cast<int>(v));
    try {
      base = dataset_from_idx(parse_idx(std::filesystem::path(p.idx_images)),
                              parse_idx(std::filesystem::path(p.idx_labels)), pos);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot load IDX data: ") + e.what());
    }
    if (p.max_points > 0 && p.max_points < base.size()) {
      const auto m = static_cast<Eigen::Index>(p.max_points);
      base.X = base.X.topRows(m).eval();
      base.y = base.y.head(m).eval();
      base.z = base.z.head(m).eval();
      base.component.resize(p.max_points);
    }
  } else {
    throw ConfigError("field 'dataset' must be 'gaussian' or 'idx'");
  }

  const std::size_t per_seed = methods.size() * keeps.size();
  auto job = [&](std::size_t cell) {
    const std::size_t s = cell / per_seed;
    const PruneMethod method = methods[(cell % per_seed) / keeps.size()];
    const double keep = keeps[cell % keeps.size()];
    const std::uint64_t seed = derive_seed(c.seed, {s});
    const Dataset data = gaussian ? gaussian_random_labels(p.n, p.d, derive_seed(seed, {1}))
                                  : noisify_inputs(base, p.input_noise_var, derive_seed(seed, {1}));
    const MemcapResult r = memorization_capacity(cfg, data, method, keep, seed);
    const std::string m(to_string(method));
    return std::vector<ExperimentRecord>{
        {m, keep, s, 0, "memorized_fraction", r.fraction},
        {m, keep, s, 0, "layer_collapse", r.layer_collapse ? 1.0 : 0.0},
        {m, keep, s, 0, "kept_weights", static_cast<double>(r.kept)}};
  };
  return finish("memcap", run_cells(c.num_seeds * per_seed, c.workers, job), c, XAxis::kKeep, out, err);
}

// ------------------------------------------------------------- imp-trace

struct ImpTraceParams {
  std::size_t n = 1000;
  std::size_t d = 50;
  double noise_var = 1.0;
  std::string teacher_hidden = "50,50";
  std::string student_hidden = "100,100,100,100";
  std::string optimizer = "adam";
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs_per_round = 100;
  double gradient_noise = 0.0;
  double drop_rate = 0.2;
  std::size_t rounds = 20;
  std::size_t fresh_samples = 10000;
  std::size_t eval_every = 1;
  std::string sweep_lr;
  std::string sweep_gradient_noise;

  void add(Params& p) {
    p.add("n", n, "training points");
    p.add("d", d, "input dimension");
    p.add("noise_var", noise_var, "label noise variance");
    p.add("teacher_hidden", teacher_hidden, "teacher hidden widths");
    p.add("student_hidden", student_hidden, "student hidden widths");
    p.add("optimizer", optimizer, "sgd or adam");
    p.add("lr", lr, "learning rate");
    p.add("batch_size", batch_size, "mini-batch size");
    p.add("epochs_per_round", epochs_per_round, "training epochs per IMP round");
    p.add("gradient_noise", gradient_noise, "std of Gaussian noise added to gradients");
    p.add("drop_rate", drop_rate, "IMP per-round drop rate");
    p.add("rounds", rounds, "IMP rounds (0 = train without pruning)");
    p.add("fresh_samples", fresh_samples, "fresh draws for the population mean");
    p.add("eval_every", eval_every, "epochs between correlation evaluations");
    p.add("sweep_lr", sweep_lr, "learning rates to sweep (implies rounds=0)");
    p.add("sweep_gradient_noise", sweep_gradient_noise, "gradient noise levels to sweep (implies rounds=0)");
  }
};

int run_imp_trace(const ImpTraceParams& p, const Common& c, std::ostream& out, std::ostream& err) {
  validate_common(c);
  ImpTraceConfig base = default_imp_trace_config();
  base.n = p.n;
  base.d = p.d;
  base.noise_var = p.noise_var;
  base.teacher.hidden = parse_sizes(p.teacher_hidden, "teacher_hidden");
  base.student_hidden = parse_sizes(p.student_hidden, "student_hidden");
  try {
    base.train.optimizer = parse_optimizer(p.optimizer);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  base.train.learning_rate = p.lr;
  base.train.batch_size = p.batch_size;
  base.train.max_epochs = p.epochs_per_round;
  base.train.gradient_noise_scale = p.gradient_noise;
  base.drop_rate = p.drop_rate;
  base.rounds = p.rounds;
  base.fresh_samples = p.fresh_samples;
  base.eval_every = p.eval_every;
  if (p.n == 0 || p.d == 0) throw ConfigError("fields 'n' and 'd' must be >= 1");
  if (!(p.noise_var >= 0)) throw ConfigError("field 'noise_var' must be >= 0");
  if (!(p.drop_rate > 0 && p.drop_rate < 1)) throw ConfigError("field 'drop_rate' must be in (0, 1)");
  if (p.fresh_samples == 0) throw ConfigError("field 'fresh_samples' must be >= 1");
  if (p.eval_every == 0) throw ConfigError("field 'eval_every' must be >= 1");
  try {
    base.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  // Sweep grid: every (lr, gradient noise) pair; a plain IMP run otherwise.
  std::vector<ImpTraceConfig> variants;
  const auto lrs = p.sweep_lr.empty() ? std::vector<double>{} : parse_doubles(p.sweep_lr, "sweep_lr");
  const auto noises = p.sweep_gradient_noise.empty()
                          ? std::vector<double>{}
                          : parse_doubles(p.sweep_gradient_noise, "sweep_gradient_noise");
  if (lrs.empty() && noises.empty()) {
    variants.push_back(base);
    if (base.rounds == 0) {
      variants.back().method_label =
          "train:lr=" + format_double(p.lr) + ";gnoise=" + format_double(p.gradient_noise);
    }
  } else {
    for (double lr : lrs.empty() ? std::vector<double>{p.lr} : lrs) {
      for (double gn : noises.empty() ? std::vector<double>{p.gradient_noise} : noises) {
        if (!(lr > 0)) throw ConfigError("field 'sweep_lr': learning rates must be > 0");
        if (!(gn >= 0)) throw ConfigError("field 'sweep_gradient_noise': values must be >= 0");
        ImpTraceConfig v = base;
        v.rounds = 0;
        v.train.learning_rate = lr;
        v.train.gradient_noise_scale = gn;
        v.method_label = "train:lr=" + format_double(lr) + ";gnoise=" + format_double(gn);
        variants.push_back(std::move(v));
      }
    }
  }
  auto job = [&](std::size_t cell) {
    const std::size_t s = cell % c.num_seeds;
    const ImpTraceConfig& v = variants[cell / c.num_seeds];
    auto recs = imp_correlation_trace(v, derive_seed(c.seed, {s}));
    for (auto& r : recs) r.seed = s;
    return recs;
  };
  return finish("imp_trace", run_cells(variants.size() * c.num_seeds, c.workers, job), c,
                XAxis::kEpoch, out, err);
}

// ----------------------------------------------------------------- mi-toy

struct MiToyParams {
  std::string loss = "mse";
  std::size_t num_datasets = 32000;
  std::size_t prefix = 1000;
  std::string methods = "imp,magnitude_after,snip,grasp,synflow";
  std::string keeps = "0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2";
  std::string optimizer = "sgd";
  double lr = 0.1;
  std::size_t max_epochs = 300;
  double loss_tolerance = 0.01;
  std::size_t synflow_iterations = 100;
  double drop_rate = 0.2;

  void add(Params& p) {
    p.add("loss", loss, "mse or bce");
    p.add("num_datasets", num_datasets, "sampled toy datasets per cell");
    p.add("prefix", prefix, "also report the entropy over the first this many samples");
    p.add("methods", methods, "pruning methods");
    p.add("keeps", keeps, "keep fractions");
    p.add("optimizer", optimizer, "sgd or adam");
    p.add("lr", lr, "learning rate (full-batch training)");
    p.add("max_epochs", max_epochs, "epoch cap per training run");
    p.add("loss_tolerance", loss_tolerance, "stop at this training loss");
    p.add("synflow_iterations", synflow_iterations, "SynFlow pruning iterations");
    p.add("drop_rate", drop_rate, "IMP per-round drop rate");
  }
};

int run_mi_toy(const MiToyParams& p, const Common& c, std::ostream& out, std::ostream& err) {
  validate_common(c);
  Loss loss{};
  try {
    loss = parse_loss(p.loss);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  ToyMiConfig cfg = default_toy_mi_config(loss);
  cfg.num_datasets = p.num_datasets;
  cfg.prefix = p.prefix;
  try {
    cfg.train.optimizer = parse_optimizer(p.optimizer);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.train.learning_rate = p.lr;
  cfg.train.max_epochs = p.max_epochs;
  cfg.train.loss_tolerance = p.loss_tolerance;
  cfg.synflow_iterations = p.synflow_iterations;
  cfg.imp_drop_rate = p.drop_rate;
  cfg.data_seed = derive_seed(c.seed, {0xDA7AULL});
  if (p.num_datasets == 0) throw ConfigError("field 'num_datasets' must be >= 1");
  if (!(p.drop_rate > 0 && p.drop_rate < 1)) throw ConfigError("field 'drop_rate' must be in (0, 1)");
  try {
    cfg.train.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto methods = parse_methods(p.methods, "methods");
  const auto keeps = parse_keeps(p.keeps, "keeps");
  const std::size_t per_seed = methods.size() * keeps.size();
  auto job = [&](std::size_t cell) {
    const std::size_t s = cell / per_seed;
    const PruneMethod method = methods[(cell % per_seed) / keeps.size()];
    const double keep = keeps[cell % keeps.size()];
    const ToyMiResult r = toy_exact_mi(cfg, method, keep, derive_seed(c.seed, {s}));
    const std::string m(to_string(method));
    const double N = static_cast<double>(cfg.num_datasets);
    return std::vector<ExperimentRecord>{
        {m, keep, s, 0, "mask_entropy_bits", r.entropy_bits},
        {m, keep, s, 0, "mask_entropy_bits_prefix", r.prefix_entropy_bits},
        {m, keep, s, 0, "unconverged", r.unconverged ? 1.0 : 0.0},
        {m, keep, s, 0, "distinct_masks", static_cast<double>(r.distinct_masks)},
        {m, keep, s, 0, "collapsed_fraction", static_cast<double>(r.collapsed) / N}};
  };
  return finish("mi_toy", run_cells(c.num_seeds * per_seed, c.workers, job), c, XAxis::kKeep, out, err);
}

// --------------------------------------------------------------- saturate

struct SaturateParams {
  std::size_t n = 20;
  std::size_t d = 400;
  std::size_t p = 2000;
  std::size_t lipschitz_samples = 2000;
  double lipschitz_step = 1e-3;
  double W_diam = 1.0;
  double J = 1.0;
  double eps = 0.1;

  void add(Params& ps) {
    ps.add("n", n, "points");
    ps.add("d", d, "dimension");
    ps.add("p", p, "hidden width");
    ps.add("lipschitz_samples", lipschitz_samples, "random pairs for the Lipschitz estimate");
    ps.add("lipschitz_step", lipschitz_step, "pair distance for difference quotients");
    ps.add("W_diam", W_diam, "weight-space diameter for the p_eff account");
    ps.add("J", J, "parameter-to-function Lipschitz constant for the p_eff account");
    ps.add("eps", eps, "accuracy margin for the p_eff account");
  }
};

int run_saturate(const SaturateParams& p, const Common& c, std::ostream& out, std::ostream& err) {
  validate_common(c);
  if (p.d == 0) throw ConfigError("field 'd' must be >= 1");
  if (p.p < p.n) throw ConfigError("field 'p' must be >= n");
  if (!(p.lipschitz_step > 0)) throw ConfigError("field 'lipschitz_step' must be > 0");
  if (!(p.eps > 0)) throw ConfigError("field 'eps' must be > 0");
  std::vector<json> reports(c.num_seeds);
  std::mutex mu;
  auto job = [&](std::size_t s) {
    const std::uint64_t seed = derive_seed(c.seed, {s});
    const SaturatingInstance inst = build_saturating(p.n, p.d, p.p, seed);
    const SaturationReport rep = verify_saturating(inst);
    const double lip = estimate_lipschitz(inst, p.lipschitz_samples, p.lipschitz_step,
                                          derive_seed(seed, {7}));
    const SaturationAccount acc = saturating_mi_account(inst, p.W_diam, p.J, p.eps);
    json j;
    j["seed_index"] = s;
    j["attempts"] = inst.attempts;
    j["passed"] = rep.passed;
    j["structural_passed"] = rep.structural_passed;
    j["max_interpolation_error"] = rep.max_interpolation_error;
    j["lipschitz_estimate"] = lip;
    j["mask_l1"] = acc.mask_l1;
    j["nd"] = acc.nd;
    j["entropy_cap_bits"] = acc.entropy_cap_bits;
    j["peff_continuous"] = acc.peff_continuous;
    json checks = json::array();
    const double keep = static_cast<double>(p.n) / static_cast<double>(p.p);
    std::vector<ExperimentRecord> recs{
        {"saturate", keep, s, 0, "passed", rep.passed ? 1.0 : 0.0},
        {"saturate", keep, s, 0, "structural_passed", rep.structural_passed ? 1.0 : 0.0},
        {"saturate", keep, s, 0, "max_interpolation_error", rep.max_interpolation_error},
        {"saturate", keep, s, 0, "lipschitz_estimate", lip},
        {"saturate", keep, s, 0, "entropy_cap_bits", acc.entropy_cap_bits}};
    for (const auto& ch : rep.checks) {
      checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"fatal", ch.fatal},
                        {"observed", ch.observed}, {"bound", ch.bound}});
      recs.push_back({"saturate", keep, s, 0, "check_" + ch.name, ch.passed ? 1.0 : 0.0});
    }
    j["checks"] = std::move(checks);
    {
      std::lock_guard<std::mutex> lock(mu);
      reports[s] = std::move(j);
    }
    return recs;
  };
  const SweepResult res = run_cells(c.num_seeds, c.workers, job);
  // One configuration per run: a chart would hold a single point.
  const int code = finish("saturate", res, c, XAxis::kKeep, out, err, /*charts=*/false);
  json doc;
  doc["n"] = p.n;
  doc["d"] = p.d;
  doc["p"] = p.p;
  json arr = json::array();
  std::size_t passed = 0;
  for (const auto& r : reports) {
    if (r.is_null()) continue;
    passed += r["passed"].get<bool>() ? 1 : 0;
    arr.push_back(r);
  }
  doc["instances"] = std::move(arr);
  doc["pass_rate"] = reports.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(reports.size());
  write_file(prepare_output(c) / "saturate_report.json", doc.dump(2) + "\n");
  out << "saturate: verification pass rate " << doc["pass_rate"].get<double>() << "\n";
  return code;
}

// ----------------------------------------------------------------- bounds

int run_bounds(const std::string& input, const std::string& output, std::ostream& out) {
  std::string text;
  if (input.empty()) throw ConfigError("bounds: --input is required");
  {
    std::ifstream in(input);
    if (!in) throw ConfigError("bounds: cannot read '" + input + "'");
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  std::string report;
  try {
    report = bounds_report_json(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!output.empty()) {
    write_file(output, report);
  } else {
    out << report;
  }
  return kExitOk;
}

// ------------------------------------------------------------------ prune

struct PruneParams {
  std::string checkpoint;
  std::string save;
  std::string method = "imp";
  double keep = 0.1;
  std::size_t n = 30;
  std::size_t d = 30;
  std::string hidden = "20,20";
  std::size_t synflow_iterations = 100;
  double drop_rate = 0.2;
  TrainParams train;

  void add(Params& p) {
    p.add("checkpoint", checkpoint, "network checkpoint to prune (default: fresh network)");
    p.add("save", save, "where to write the pruned checkpoint");
    p.add("method", method, "pruning method");
    p.add("keep", keep, "keep fraction");
    p.add("n", n, "points of the Gaussian scoring/training set");
    p.add("d", d, "dimension (fresh network only)");
    p.add("hidden", hidden, "hidden widths (fresh network only)");
    p.add("synflow_iterations", synflow_iterations, "SynFlow pruning iterations");
    p.add("drop_rate", drop_rate, "IMP per-round drop rate");
    train.add(p);
  }
};

int run_prune(const PruneParams& p, const Common& c, std::ostream& out) {
  if (!(p.keep > 0 && p.keep <= 1)) throw ConfigError("field 'keep' must be in (0, 1]");
  PruneMethod method{};
  try {
    method = parse_prune_method(p.method);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const TrainConfig tc = p.train.build();
  MaskedMlp net;
  if (!p.checkpoint.empty()) {
    try {
      net = load_checkpoint(p.checkpoint);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot load checkpoint: ") + e.what());
    }
  } else {
    std::vector<std::size_t> dims{p.d};
    for (auto h : parse_sizes(p.hidden, "hidden")) dims.push_back(h);
    dims.push_back(1);
    net = MaskedMlp(dims, derive_seed(c.seed, {0}));
  }
  const Dataset data = gaussian_random_labels(p.n, net.input_dim(), derive_seed(c.seed, {1}));
  const Mask mask = derive_mask(net, data, method, p.keep, tc, p.synflow_iterations, p.drop_rate,
                                derive_seed(c.seed, {2}));
  net.set_mask(mask);
  const std::string save = p.save.empty() ? (std::filesystem::path(c.output) / "pruned.json").string() : p.save;
  if (p.save.empty()) prepare_output(c);
  save_checkpoint(net, save);
  json rep;
  rep["method"] = p.method;
  rep["keep"] = p.keep;
  rep["kept"] = mask.count();
  rep["prunable"] = mask.size();
  json layers = json::array();
  for (std::size_t l = 0; l + 1 < mask.layer_offsets.size(); ++l) layers.push_back(mask.count_in_layer(l));
  rep["kept_per_layer"] = std::move(layers);
  rep["layer_collapse"] = mask.has_collapsed_layer();
  rep["checkpoint"] = save;
  out << rep.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"prunemi: masked-network pruning, mutual-information harnesses and bound calculators"};
  app.require_subcommand(1);

  Common memcap_c, trace_c, toy_c, sat_c, prune_c;
  MemcapParams memcap_p;
  ImpTraceParams trace_p;
  MiToyParams toy_p;
  SaturateParams sat_p;
  PruneParams prune_p;
  std::string bounds_input;
  std::string bounds_output;

  auto* memcap = app.add_subcommand("memcap", "memorization capacity against sparsity");
  Params memcap_params(memcap);
  add_common(memcap, memcap_params, memcap_c, 250);
  memcap_p.add(memcap_params);

  auto* trace = app.add_subcommand("imp-trace", "noise correlation during IMP, or lr / gradient-noise sweeps");
  Params trace_params(trace);
  add_common(trace, trace_params, trace_c, 25);
  trace_p.add(trace_params);

  auto* toy = app.add_subcommand("mi-toy", "exact mask entropy on the hypercube toy model");
  Params toy_params(toy);
  add_common(toy, toy_params, toy_c, 5);
  toy_p.add(toy_params);

  auto* sat = app.add_subcommand("saturate", "build and verify the planted saturating network");
  Params sat_params(sat);
  add_common(sat, sat_params, sat_c, 20);
  sat_p.add(sat_params);

  auto* bounds = app.add_subcommand("bounds", "evaluate every bound calculator on a JSON input");
  bounds->add_option("--input", bounds_input, "JSON document of bound inputs")->required();
  bounds->add_option("--output", bounds_output, "write the report here instead of stdout");

  auto* prune = app.add_subcommand("prune", "derive a mask for a network and save the checkpoint");
  Params prune_params(prune);
  add_common(prune, prune_params, prune_c, 1);
  prune_p.add(prune_params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    auto with_config = [](const Params& params, const Common& c) {
      if (!c.config.empty()) params.apply(load_config(c.config));
    };
    if (memcap->parsed()) {
      with_config(memcap_params, memcap_c);
      return run_memcap(memcap_p, memcap_c, out, err);
    }
    if (trace->parsed()) {
      with_config(trace_params, trace_c);
      return run_imp_trace(trace_p, trace_c, out, err);
    }
    if (toy->parsed()) {
      with_config(toy_params, toy_c);
      return run_mi_toy(toy_p, toy_c, out, err);
    }
    if (sat->parsed()) {
      with_config(sat_params, sat_c);
      return run_saturate(sat_p, sat_c, out, err);
    }
    if (bounds->parsed()) return run_bounds(bounds_input, bounds_output, out);
    if (prune->parsed()) {
      with_config(prune_params, prune_c);
      return run_prune(prune_p, prune_c, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  return kExitConfigError;
}

}  // namespace prunemi
