#include "pml/commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "pml/errors.hpp"

namespace pml {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw ConfigError("invalid numeric value for '" + key + "': " + value);
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw ConfigError("invalid integer value for '" + key + "': " + value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean value for '" + key + "': " + value);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

std::string format_metric(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string format_noise(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void write_report_csv(std::ostream& out, const EvaluationReport& r) {
  out << format_metric(r.hamming_loss) << ',' << format_metric(r.one_error)
      << ',' << format_metric(r.coverage) << ',' << format_metric(r.ranking_loss)
      << ',' << format_metric(r.average_precision);
}

// Runs a function over indices [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

TrainConfig variant_config(TrainConfig config, const std::string& variant) {
  if (variant == "both") {
    config.similarity_mode = SimilarityMode::Both;
    config.joint = true;
  } else if (variant == "feature_only") {
    config.similarity_mode = SimilarityMode::FeatureOnly;
    config.joint = true;
  } else if (variant == "label_only") {
    config.similarity_mode = SimilarityMode::LabelOnly;
    config.joint = true;
  } else if (variant == "two_stage") {
    config.similarity_mode = SimilarityMode::Both;
    config.joint = false;
  } else {
    throw ConfigError("unknown variant: " + variant);
  }
  return config;
}

std::vector<ProtocolRow> run_protocol(const ProtocolOptions& opts,
                                      const std::vector<double>& noise_grid,
                                      const std::vector<std::string>& variants,
                                      const std::vector<TrainConfig>& configs) {
  Dataset dataset = load_dataset(opts.features_path, opts.truth_path,
                                 std::nullopt, opts.dataset_name);
  // In the protocol the label file is the ground truth; noise is injected on
  // top of it per repeat.
  dataset.ground_truth = dataset.candidates;

  struct Cell {
    std::size_t variant_idx;
    double noise_pct;
    int repeat;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (double a : noise_grid)
      for (int r = 0; r < opts.repeats; ++r) cells.push_back({v, a, r});

  std::vector<ProtocolRow> rows(cells.size());
  parallel_for(cells.size(), default_thread_count(), [&](std::size_t i) {
    const Cell& c = cells[i];
    rows[i] = run_protocol_cell(dataset, configs[c.variant_idx],
                                variants[c.variant_idx], c.noise_pct, c.repeat,
                                opts.seed, opts.train_fraction);
  });
  // cells were generated in sorted (variant, noise, repeat) order already
  return rows;
}

struct Aggregate {
  EvaluationReport mean, stddev;
  std::size_t count = 0;
};

Aggregate aggregate_rows(const std::vector<const ProtocolRow*>& rows) {
  Aggregate agg;
  std::vector<std::array<double, 5>> values;
  for (const ProtocolRow* r : rows) {
    if (r->failed) continue;
    values.push_back({r->report.hamming_loss, r->report.one_error,
                      r->report.coverage, r->report.ranking_loss,
                      r->report.average_precision});
  }
  agg.count = values.size();
  if (values.empty()) return agg;
  std::array<double, 5> mean{};
  for (const auto& v : values)
    for (std::size_t k = 0; k < 5; ++k) mean[k] += v[k];
  for (double& m : mean) m /= static_cast<double>(values.size());
  std::array<double, 5> sd{};
  if (values.size() > 1) {
    for (const auto& v : values)
      for (std::size_t k = 0; k < 5; ++k)
        sd[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
    for (double& s : sd)
      s = std::sqrt(s / static_cast<double>(values.size() - 1));
  }
  agg.mean = {mean[0], mean[1], mean[2], mean[3], mean[4]};
  agg.stddev = {sd[0], sd[1], sd[2], sd[3], sd[4]};
  return agg;
}

int finish_protocol(const std::vector<ProtocolRow>& rows,
                    const std::string& out_csv) {
  write_protocol_csv(rows, out_csv, true);
  std::size_t failures = 0;
  for (const ProtocolRow& r : rows)
    if (r.failed) {
      ++failures;
      std::cerr << "cell failed (" << r.variant << ", a=" << r.noise_pct
                << "%, repeat " << r.repeat << "): " << r.error << "\n";
    }
  if (failures == rows.size() && !rows.empty()) return kExitNumeric;
  return kExitOk;
}

}  // namespace

void apply_config_entry(TrainConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "alpha") {
    config.alpha = parse_double(key, value);
  } else if (key == "beta") {
    config.beta = parse_double(key, value);
  } else if (key == "lambda") {
    config.lambda = parse_double(key, value);
  } else if (key == "outer_iterations") {
    config.outer_iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "outer_tolerance") {
    config.outer_tolerance = parse_double(key, value);
  } else if (key == "similarity_mode") {
    config.similarity_mode = similarity_mode_from_string(value);
  } else if (key == "joint") {
    config.joint = parse_bool(key, value);
  } else if (key == "kernel_width_mode") {
    if (value == "paper")
      config.kernel_width_mode = KernelWidthMode::Paper;
    else if (value == "mean_pairwise")
      config.kernel_width_mode = KernelWidthMode::MeanPairwise;
    else
      throw ConfigError("invalid kernel_width_mode: " + value);
  } else if (key == "agd_l0") {
    config.agd.l0 = parse_double(key, value);
  } else if (key == "agd_gamma") {
    config.agd.gamma = parse_double(key, value);
  } else if (key == "agd_max_iterations") {
    config.agd.max_iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "agd_tolerance") {
    config.agd.tolerance = parse_double(key, value);
  } else if (key == "p_inner_iterations") {
    config.p_update.inner_iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "p_tolerance") {
    config.p_update.tolerance = parse_double(key, value);
  } else if (key == "threshold") {
    config.threshold = parse_double(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

TrainConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  TrainConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    apply_config_entry(config, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
  return config;
}

int default_thread_count() {
  const char* env = std::getenv("PML_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    warn("ignoring invalid PML_THREADS value");
    return 1;
  }
  return static_cast<int>(v);
}

int cmd_train(const TrainOptions& opts) {
  TrainConfig config;
  if (opts.config_file) config = parse_config_file(*opts.config_file);
  for (const auto& [key, value] : opts.overrides)
    apply_config_entry(config, key, value);

  const Dataset dataset = load_dataset(opts.features_path, opts.labels_path);
  const TrainedModel model = fit(dataset.features, dataset.candidates, config);
  save_model(model, opts.out_model);

  if (opts.out_trace_csv) {
    std::ofstream out = open_out(*opts.out_trace_csv);
    out << "iteration,objective\n";
    for (std::size_t t = 0; t < model.objective_trace.size(); ++t)
      out << t << ',' << format_metric(model.objective_trace[t]) << '\n';
  }
  std::cout << "trained on " << dataset.features.rows() << " instances, "
            << model.objective_trace.size() - 1 << " outer iteration(s), "
            << (model.converged ? "converged" : "not converged")
            << ", final objective " << model.objective_trace.back() << "\n";
  return kExitOk;
}

int cmd_predict(const PredictOptions& opts) {
  const TrainedModel model = load_model(opts.model_path);
  const Matrix x = load_features(opts.features_path);
  double threshold = opts.threshold;
  if (threshold == 0.0) threshold = model.config.threshold;
  if (threshold == 0.0) threshold = default_threshold(model.weights.cols());
  auto [scores, labels] = predict(model, x, threshold);
  if (opts.out_scores) save_features(scores, *opts.out_scores);
  if (opts.out_labels) save_labels(labels, *opts.out_labels);
  if (!opts.out_scores && !opts.out_labels) {
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      for (std::size_t c = 0; c < scores.cols(); ++c)
        std::cout << (c ? " " : "") << scores(i, c);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& opts) {
  const TrainedModel model = load_model(opts.model_path);
  const Matrix x = load_features(opts.features_path);
  const Matrix truth = load_labels(opts.truth_path);
  double threshold = opts.threshold;
  if (threshold == 0.0) threshold = model.config.threshold;
  if (threshold == 0.0) threshold = default_threshold(model.weights.cols());
  auto [scores, labels] = predict(model, x, threshold);
  const EvaluationReport report = evaluate_all(scores, labels, truth);

  std::cout << "hamming_loss      " << report.hamming_loss << "\n"
            << "one_error         " << report.one_error << "\n"
            << "coverage          " << report.coverage << "\n"
            << "ranking_loss      " << report.ranking_loss << "\n"
            << "average_precision " << report.average_precision << "\n"
            << "instances         " << report.n_test << "\n";
  if (report.skipped_no_relevant > 0 || report.skipped_ranking > 0)
    std::cout << "skipped rows: " << report.skipped_no_relevant
              << " without relevant labels, " << report.skipped_ranking
              << " degenerate for ranking\n";

  if (opts.out_csv) {
    std::ofstream out = open_out(*opts.out_csv);
    out << "hamming,one_error,coverage,ranking,avgprec\n";
    write_report_csv(out, report);
    out << '\n';
  }
  return kExitOk;
}

int cmd_synth(const SynthOptions& opts) {
  Matrix truth;
  if (opts.truth_path) {
    truth = load_labels(*opts.truth_path);
  } else {
    const Dataset planted = make_planted_dataset(
        opts.planted_n, opts.planted_d, opts.planted_q, opts.planted_rank,
        opts.planted_labels, opts.seed);
    truth = *planted.ground_truth;
    if (opts.out_features) save_features(planted.features, *opts.out_features);
  }
  if (opts.out_truth) save_labels(truth, *opts.out_truth);
  if (opts.out_labels) {
    const Matrix noisy = inject_noise(truth, {opts.noise_pct, opts.seed});
    save_labels(noisy, *opts.out_labels);
  }
  if (!opts.out_features && !opts.out_truth && !opts.out_labels)
    throw ConfigError("synth: no output file requested");
  return kExitOk;
}

ProtocolRow run_protocol_cell(const Dataset& dataset, const TrainConfig& base,
                              const std::string& variant, double noise_pct,
                              int repeat, std::uint64_t base_seed,
                              double train_fraction) {
  ProtocolRow row;
  row.dataset = dataset.name;
  row.variant = variant;
  row.noise_pct = noise_pct;
  row.repeat = repeat;
  row.seed = base_seed + static_cast<std::uint64_t>(repeat);
  row.alpha = base.alpha;
  row.beta = base.beta;
  row.lambda = base.lambda;
  try {
    if (!dataset.ground_truth)
      throw ConsistencyError("protocol requires ground truth labels");
    Dataset noisy = dataset;
    noisy.candidates = inject_noise(*dataset.ground_truth,
                                    {noise_pct, row.seed});
    auto [train, test] = split(noisy, train_fraction, row.seed);

    TrainConfig config = variant_config(base, variant);
    config.seed = row.seed;
    const TrainedModel model =
        fit(train.features, train.candidates, config);

    double threshold = config.threshold;
    if (threshold == 0.0) threshold = default_threshold(model.weights.cols());
    auto [scores, labels] = predict(model, test.features, threshold);
    row.report = evaluate_all(scores, labels, *test.ground_truth);
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

void write_protocol_csv(const std::vector<ProtocolRow>& rows,
                        const std::string& path, bool with_aggregates) {
  std::ofstream out = open_out(path);
  out << "dataset,variant,noise_pct,repeat,seed,alpha,beta,lambda,"
         "hamming,one_error,coverage,ranking,avgprec\n";
  auto prefix = [&](const ProtocolRow& r, const std::string& repeat_field,
                    const std::string& seed_field) {
    out << r.dataset << ',' << r.variant << ',' << format_noise(r.noise_pct)
        << ',' << repeat_field << ',' << seed_field << ','
        << format_noise(r.alpha) << ',' << format_noise(r.beta) << ','
        << format_noise(r.lambda) << ',';
  };
  for (const ProtocolRow& r : rows) {
    if (r.failed) {
      prefix(r, std::to_string(r.repeat), std::to_string(r.seed));
      out << "nan,nan,nan,nan,nan\n";
      continue;
    }
    prefix(r, std::to_string(r.repeat), std::to_string(r.seed));
    write_report_csv(out, r.report);
    out << '\n';
  }
  if (!with_aggregates) return;

  // group rows per (variant, noise, alpha, beta, lambda) cell, keeping the
  // order in which cells first appear
  std::vector<std::pair<std::string, std::vector<const ProtocolRow*>>> groups;
  for (const ProtocolRow& r : rows) {
    std::ostringstream key;
    key << r.variant << '|' << r.noise_pct << '|' << r.alpha << '|' << r.beta
        << '|' << r.lambda;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == key.str(); });
    if (it == groups.end()) {
      groups.push_back({key.str(), {}});
      it = std::prev(groups.end());
    }
    it->second.push_back(&r);
  }
  for (const auto& [key, members] : groups) {
    const Aggregate agg = aggregate_rows(members);
    if (agg.count == 0) continue;
    prefix(*members.front(), "mean", "-");
    write_report_csv(out, agg.mean);
    out << '\n';
    prefix(*members.front(), "std", "-");
    write_report_csv(out, agg.stddev);
    out << '\n';
  }
}

int cmd_bench(const ProtocolOptions& opts) {
  std::vector<TrainConfig> configs;
  for (const std::string& v : opts.variants)
    configs.push_back(variant_config(opts.config, v));
  const std::vector<ProtocolRow> rows =
      run_protocol(opts, opts.noise_grid, opts.variants, configs);
  return finish_protocol(rows, opts.out_csv);
}

int cmd_sweep(const SweepOptions& opts) {
  if (opts.param != "alpha" && opts.param != "beta")
    throw ConfigError("sweep parameter must be 'alpha' or 'beta'");
  std::vector<std::string> variants;
  std::vector<TrainConfig> configs;
  for (double value : opts.grid) {
    TrainConfig config = opts.protocol.config;
    if (opts.param == "alpha") {
      config.alpha = value;
      config.beta = 10.0;
    } else {
      config.beta = value;
      config.alpha = 10.0;
    }
    variants.push_back("both");
    configs.push_back(variant_config(config, "both"));
  }
  // one grid point per "variant" slot so rows stay in grid order
  Dataset dataset = load_dataset(opts.protocol.features_path,
                                 opts.protocol.truth_path, std::nullopt,
                                 opts.protocol.dataset_name);
  dataset.ground_truth = dataset.candidates;

  struct Cell {
    std::size_t point;
    double noise_pct;
    int repeat;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < opts.grid.size(); ++g)
    for (double a : opts.protocol.noise_grid)
      for (int r = 0; r < opts.protocol.repeats; ++r)
        cells.push_back({g, a, r});
  std::vector<ProtocolRow> rows(cells.size());
  parallel_for(cells.size(), default_thread_count(), [&](std::size_t i) {
    const Cell& c = cells[i];
    rows[i] = run_protocol_cell(dataset, configs[c.point], "both", c.noise_pct,
                                c.repeat, opts.protocol.seed,
                                opts.protocol.train_fraction);
  });
  return finish_protocol(rows, opts.protocol.out_csv);
}

int cmd_ablate(const ProtocolOptions& opts) {
  ProtocolOptions ablate = opts;
  ablate.variants = {"both", "feature_only", "label_only", "two_stage"};
  if (ablate.noise_grid.size() != 1)
    ablate.noise_grid = {ablate.noise_grid.empty() ? 50.0
                                                   : ablate.noise_grid.front()};
  return cmd_bench(ablate);
}

}  // namespace pml
