#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pml/data_io.hpp"
#include "pml/metrics.hpp"
#include "pml/trainer.hpp"

namespace pml {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

// Flat key=value config file ('#' starts a comment). Every TrainConfig field
// is addressable; unknown keys raise ConfigError naming the key.
TrainConfig parse_config_file(const std::string& path);
void apply_config_entry(TrainConfig& config, const std::string& key,
                        const std::string& value);

struct TrainOptions {
  std::optional<std::string> config_file;
  // applied after the config file, so flags override it
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string features_path;
  std::string labels_path;
  std::string out_model;
  std::optional<std::string> out_trace_csv;
};
int cmd_train(const TrainOptions& opts);

struct PredictOptions {
  std::string model_path;
  std::string features_path;
  std::optional<std::string> out_scores;
  std::optional<std::string> out_labels;
  double threshold = 0.0;  // 0 means 1/q
};
int cmd_predict(const PredictOptions& opts);

struct EvaluateOptions {
  std::string model_path;
  std::string features_path;
  std::string truth_path;
  double threshold = 0.0;  // 0 means 1/q
  std::optional<std::string> out_csv;
};
int cmd_evaluate(const EvaluateOptions& opts);

struct SynthOptions {
  // planted generation (used when truth_path is empty)
  std::size_t planted_n = 200;
  std::size_t planted_d = 20;
  std::size_t planted_q = 8;
  std::size_t planted_rank = 3;
  std::size_t planted_labels = 2;
  std::optional<std::string> out_features;
  std::optional<std::string> out_truth;
  // noise injection (requires a truth matrix, generated or loaded)
  std::optional<std::string> truth_path;
  double noise_pct = 100.0;
  std::uint64_t seed = 0;
  std::optional<std::string> out_labels;
};
int cmd_synth(const SynthOptions& opts);

struct ProtocolOptions {
  std::string features_path;
  std::string truth_path;
  std::string dataset_name = "dataset";
  std::vector<double> noise_grid = {10.0, 50.0, 100.0, 200.0};
  int repeats = 10;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  TrainConfig config;
  std::vector<std::string> variants = {"both"};
  std::string out_csv;
};
int cmd_bench(const ProtocolOptions& opts);

struct SweepOptions {
  ProtocolOptions protocol;  // noise_grid/repeats reused; variants ignored
  std::string param = "alpha";  // "alpha" or "beta"
  std::vector<double> grid = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
};
int cmd_sweep(const SweepOptions& opts);

// bench over the four model variants at a single noise ratio
int cmd_ablate(const ProtocolOptions& opts);

// One (variant, noise, repeat) cell of the benchmark protocol: inject noise,
// split, fit on the noisy training candidates, evaluate on test ground truth.
struct ProtocolRow {
  std::string dataset;
  std::string variant;
  double noise_pct = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0, beta = 0.0, lambda = 0.0;
  EvaluationReport report;
  bool failed = false;
  std::string error;
};

ProtocolRow run_protocol_cell(const Dataset& dataset, const TrainConfig& base,
                              const std::string& variant, double noise_pct,
                              int repeat, std::uint64_t base_seed,
                              double train_fraction);

void write_protocol_csv(const std::vector<ProtocolRow>& rows,
                        const std::string& path, bool with_aggregates);

// Thread count for protocol repeats; reads PML_THREADS, defaults to 1.
int default_thread_count();

}  // namespace pml
