#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pml/commands.hpp"
#include "pml/errors.hpp"

namespace {

// keys in the same order as TrainConfig; shared by train's override flags
void add_config_flags(CLI::App* cmd, pml::ProtocolOptions& opts) {
  cmd->add_option("--alpha", opts.config.alpha, "Nuclear norm weight");
  cmd->add_option("--beta", opts.config.beta, "Similarity fitting weight");
  cmd->add_option("--lambda", opts.config.lambda, "Row-sum penalty weight");
  cmd->add_option("--outer-iterations", opts.config.outer_iterations,
                  "Maximum alternating iterations");
  cmd->add_option("--similarity-mode",
                  [&opts](const std::vector<std::string>& v) {
                    opts.config.similarity_mode =
                        pml::similarity_mode_from_string(v.back());
                    return true;
                  },
                  "both | feature_only | label_only");
  cmd->add_option("--threshold", opts.config.threshold,
                  "Binarization threshold (default 1/q)");
}

void add_protocol_flags(CLI::App* cmd, pml::ProtocolOptions& opts) {
  cmd->add_option("--features", opts.features_path, "Feature matrix file")
      ->required();
  cmd->add_option("--truth", opts.truth_path, "Ground-truth label file")
      ->required();
  cmd->add_option("--out", opts.out_csv, "Output CSV path")->required();
  cmd->add_option("--name", opts.dataset_name, "Dataset name for the CSV");
  cmd->add_option("--repeats", opts.repeats, "Repeats per cell");
  cmd->add_option("--seed", opts.seed, "Base seed (repeat r uses seed + r)");
  cmd->add_option("--train-fraction", opts.train_fraction,
                  "Training split fraction");
  add_config_flags(cmd, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PML-LFC: partial multi-label learning with label and feature "
               "collaboration"};
  app.require_subcommand(1);

  // train
  pml::TrainOptions train;
  std::string train_config_file;
  std::vector<std::string> train_sets;
  CLI::App* cmd_train = app.add_subcommand("train", "Fit a model");
  cmd_train->add_option("--features", train.features_path, "Feature matrix")
      ->required();
  cmd_train->add_option("--labels", train.labels_path, "Candidate label file")
      ->required();
  cmd_train->add_option("--out", train.out_model, "Model output path")
      ->required();
  cmd_train->add_option("--config", train_config_file,
                        "key=value config file");
  cmd_train->add_option("--set", train_sets,
                        "Config override, key=value (repeatable)");
  std::string train_trace;
  cmd_train->add_option("--trace", train_trace, "Objective trace CSV path");

  // predict
  pml::PredictOptions predict;
  std::string predict_scores, predict_labels;
  CLI::App* cmd_predict =
      app.add_subcommand("predict", "Score new instances with a model");
  cmd_predict->add_option("--model", predict.model_path, "Model file")
      ->required();
  cmd_predict->add_option("--features", predict.features_path,
                          "Feature matrix")->required();
  cmd_predict->add_option("--out-scores", predict_scores, "Score matrix path");
  cmd_predict->add_option("--out-labels", predict_labels,
                          "Thresholded label file path");
  cmd_predict->add_option("--threshold", predict.threshold,
                          "Binarization threshold (default 1/q)");

  // evaluate
  pml::EvaluateOptions evaluate;
  std::string evaluate_csv;
  CLI::App* cmd_evaluate =
      app.add_subcommand("evaluate", "Evaluate a model against ground truth");
  cmd_evaluate->add_option("--model", evaluate.model_path, "Model file")
      ->required();
  cmd_evaluate->add_option("--features", evaluate.features_path,
                           "Feature matrix")->required();
  cmd_evaluate->add_option("--truth", evaluate.truth_path,
                           "Ground-truth label file")->required();
  cmd_evaluate->add_option("--threshold", evaluate.threshold,
                           "Binarization threshold (default 1/q)");
  cmd_evaluate->add_option("--out", evaluate_csv, "Metrics CSV path");

  // synth
  pml::SynthOptions synth;
  std::string synth_truth_in, synth_features, synth_truth_out, synth_labels;
  CLI::App* cmd_synth = app.add_subcommand(
      "synth", "Generate planted data and/or inject candidate-label noise");
  cmd_synth->add_option("--truth", synth_truth_in,
                        "Existing ground-truth label file to add noise to");
  cmd_synth->add_option("--n", synth.planted_n, "Planted: instances");
  cmd_synth->add_option("--d", synth.planted_d, "Planted: feature dimension");
  cmd_synth->add_option("--q", synth.planted_q, "Planted: labels");
  cmd_synth->add_option("--rank", synth.planted_rank, "Planted: model rank");
  cmd_synth->add_option("--labels-per-instance", synth.planted_labels,
                        "Planted: true labels per instance");
  cmd_synth->add_option("--noise-pct", synth.noise_pct,
                        "Irrelevant labels to add, % of true label count");
  cmd_synth->add_option("--seed", synth.seed, "Seed");
  cmd_synth->add_option("--out-features", synth_features,
                        "Planted feature matrix output");
  cmd_synth->add_option("--out-truth", synth_truth_out,
                        "Ground-truth label output");
  cmd_synth->add_option("--out-labels", synth_labels,
                        "Noisy candidate label output");

  // bench
  pml::ProtocolOptions bench;
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "Noise-grid benchmark protocol");
  add_protocol_flags(cmd_bench, bench);
  cmd_bench->add_option("--noise-grid", bench.noise_grid,
                        "Noise percentages (default 10 50 100 200)");
  cmd_bench->add_option("--variants", bench.variants,
                        "Model variants to run (default both)");

  // sweep
  pml::SweepOptions sweep;
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "Sensitivity sweep over alpha or beta");
  add_protocol_flags(cmd_sweep, sweep.protocol);
  cmd_sweep->add_option("--param", sweep.param, "alpha or beta")->required();
  cmd_sweep->add_option("--grid", sweep.grid,
                        "Values (default 0.001 0.01 0.1 1 10 100)");
  cmd_sweep->add_option("--noise-grid", sweep.protocol.noise_grid,
                        "Noise percentages");
  sweep.protocol.noise_grid = {50.0};
  sweep.protocol.repeats = 1;

  // ablate
  pml::ProtocolOptions ablate;
  CLI::App* cmd_ablate =
      app.add_subcommand("ablate", "Compare model variants at one noise ratio");
  add_protocol_flags(cmd_ablate, ablate);
  double ablate_noise = 50.0;
  cmd_ablate->add_option("--noise-pct", ablate_noise, "Noise percentage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pml::kExitOk : pml::kExitUsage;
  }

  try {
    if (*cmd_train) {
      if (!train_config_file.empty()) train.config_file = train_config_file;
      if (!train_trace.empty()) train.out_trace_csv = train_trace;
      for (const std::string& kv : train_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw pml::ConfigError("--set expects key=value, got '" + kv + "'");
        train.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      return pml::cmd_train(train);
    }
    if (*cmd_predict) {
      if (!predict_scores.empty()) predict.out_scores = predict_scores;
      if (!predict_labels.empty()) predict.out_labels = predict_labels;
      return pml::cmd_predict(predict);
    }
    if (*cmd_evaluate) {
      if (!evaluate_csv.empty()) evaluate.out_csv = evaluate_csv;
      return pml::cmd_evaluate(evaluate);
    }
    if (*cmd_synth) {
      if (!synth_truth_in.empty()) synth.truth_path = synth_truth_in;
      if (!synth_features.empty()) synth.out_features = synth_features;
      if (!synth_truth_out.empty()) synth.out_truth = synth_truth_out;
      if (!synth_labels.empty()) synth.out_labels = synth_labels;
      return pml::cmd_synth(synth);
    }
    if (*cmd_bench) return pml::cmd_bench(bench);
    if (*cmd_sweep) return pml::cmd_sweep(sweep);
    if (*cmd_ablate) {
      ablate.noise_grid = {ablate_noise};
      return pml::cmd_ablate(ablate);
    }
  } catch (const pml::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pml::kExitUsage;
  } catch (const pml::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pml::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pml::kExitNumeric;
  }
  return pml::kExitUsage;
}
