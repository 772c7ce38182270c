#include "pml/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pml/errors.hpp"

namespace pml {

std::string to_string(SimilarityMode mode) {
  switch (mode) {
    case SimilarityMode::Both: return "both";
    case SimilarityMode::FeatureOnly: return "feature_only";
    case SimilarityMode::LabelOnly: return "label_only";
  }
  return "both";
}

SimilarityMode similarity_mode_from_string(const std::string& s) {
  if (s == "both") return SimilarityMode::Both;
  if (s == "feature_only") return SimilarityMode::FeatureOnly;
  if (s == "label_only") return SimilarityMode::LabelOnly;
  throw ConfigError("unknown similarity_mode: " + s);
}

double full_objective(const Matrix& w, const Matrix& p, const Matrix& x,
                      const SimilarityBundle& bundle,
                      const TrainConfig& config) {
  const double fit_term = f_smooth(w, x, p);
  const double rank_term = config.alpha * nuclear_norm(w);
  const Matrix residual =
      hadamard(bundle.mask, sub(bundle.joint_target, matmul(p, transpose(p))));
  const double phi = frobenius_norm(residual);
  return fit_term + rank_term + config.beta * phi * phi;
}

SimilarityBundle effective_bundle(SimilarityBundle bundle,
                                  SimilarityMode mode) {
  switch (mode) {
    case SimilarityMode::Both:
      break;
    case SimilarityMode::FeatureOnly:
      bundle.semantic_sim = Matrix::ones(bundle.feature_sim.rows(),
                                         bundle.feature_sim.cols());
      bundle.joint_target = bundle.feature_sim;
      break;
    case SimilarityMode::LabelOnly:
      bundle.joint_target = bundle.semantic_sim;
      break;
  }
  return bundle;
}

namespace {

AgdParams agd_params_for(const TrainConfig& config, double alpha) {
  AgdParams p = config.agd;
  p.alpha = alpha;
  return p;
}

PUpdateParams p_params_for(const TrainConfig& config) {
  PUpdateParams p = config.p_update;
  p.beta = config.beta;
  p.lambda = config.lambda;
  return p;
}

bool small_relative_change(double prev, double cur, double tol) {
  return std::abs(prev - cur) <= tol * std::max(1.0, std::abs(prev));
}

TrainedModel fit_joint(const Matrix& x, const Matrix& y,
                       const TrainConfig& config,
                       const SimilarityBundle& bundle) {
  TrainedModel model;
  model.config = config;
  model.confidence = init_confidence(y);
  model.weights = Matrix(x.cols(), y.cols());

  const AgdParams agd = agd_params_for(config, config.alpha);
  const PUpdateParams p_params = p_params_for(config);

  double prev =
      full_objective(model.weights, model.confidence.values, x, bundle, config);
  model.objective_trace.push_back(prev);

  for (int it = 0; it < config.outer_iterations; ++it) {
    model.weights =
        agd_solve(x, model.confidence.values, agd, &model.weights);
    const double obj_after_w = full_objective(
        model.weights, model.confidence.values, x, bundle, config);

    ConfidenceMatrix candidate = update_confidence(
        model.confidence, matmul(x, model.weights), bundle, p_params);
    const double obj = full_objective(model.weights, candidate.values, x,
                                      bundle, config);

    // The P-step minimizes the Lagrangian, which includes the row-sum
    // penalty; near the fixed point it can trade penalty against the joint
    // objective. Reject such a step and stop: the alternation has ceased to
    // improve the objective being traced.
    if (obj > obj_after_w + 1e-9 * std::max(1.0, std::abs(obj_after_w))) {
      model.objective_trace.push_back(obj_after_w);
      model.converged = true;
      break;
    }
    model.confidence = std::move(candidate);
    model.objective_trace.push_back(obj);
    if (small_relative_change(prev, obj, config.outer_tolerance)) {
      model.converged = true;
      break;
    }
    prev = obj;
  }
  return model;
}

// PML-LFC(nJ): confidence matrix first against a fixed unregularized
// least-squares fit, predictor once afterwards.
TrainedModel fit_two_stage(const Matrix& x, const Matrix& y,
                           const TrainConfig& config,
                           const SimilarityBundle& bundle) {
  TrainedModel model;
  model.config = config;
  model.confidence = init_confidence(y);

  const Matrix w_frozen =
      agd_solve(x, model.confidence.values, agd_params_for(config, 0.0), nullptr);
  const Matrix xw = matmul(x, w_frozen);
  const PUpdateParams p_params = p_params_for(config);

  model.objective_trace.push_back(
      full_objective(w_frozen, model.confidence.values, x, bundle, config));
  double prev = p_subproblem_objective(model.confidence.values, xw, bundle,
                                       config.beta, config.lambda);
  for (int it = 0; it < config.outer_iterations; ++it) {
    ConfidenceMatrix candidate =
        update_confidence(model.confidence, xw, bundle, p_params);
    const double traced =
        full_objective(w_frozen, candidate.values, x, bundle, config);
    if (traced > model.objective_trace.back() +
                     1e-9 * std::max(1.0, model.objective_trace.back())) {
      model.converged = true;
      break;
    }
    model.confidence = std::move(candidate);
    const double cur = p_subproblem_objective(model.confidence.values, xw,
                                              bundle, config.beta,
                                              config.lambda);
    model.objective_trace.push_back(traced);
    if (small_relative_change(prev, cur, config.outer_tolerance)) {
      model.converged = true;
      break;
    }
    prev = cur;
  }

  model.weights = agd_solve(x, model.confidence.values,
                            agd_params_for(config, config.alpha), &w_frozen);
  model.objective_trace.push_back(
      full_objective(model.weights, model.confidence.values, x, bundle, config));
  return model;
}

}  // namespace

TrainedModel fit(const Matrix& x, const Matrix& y, const TrainConfig& config) {
  if (x.rows() != y.rows())
    throw ShapeMismatch("fit: feature/label row counts differ");
  if (y.cols() == 0) throw EmptyLabelSpace("fit: label space is empty");
  if (x.rows() < 2) throw TooSmall("fit: need at least 2 instances");

  const SimilarityBundle bundle = effective_bundle(
      build_bundle(x, y, config.kernel_width_mode), config.similarity_mode);
  return config.joint ? fit_joint(x, y, config, bundle)
                      : fit_two_stage(x, y, config, bundle);
}

double default_threshold(std::size_t q) {
  return q == 0 ? 0.5 : 1.0 / static_cast<double>(q);
}

std::pair<Matrix, Matrix> predict(const TrainedModel& model,
                                  const Matrix& x_test, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0)
    throw ConfigError("predict: threshold must be in (0,1)");
  Matrix scores = predict_scores(model.weights, x_test);
  Matrix labels(scores.rows(), scores.cols());
  for (std::size_t k = 0; k < scores.size(); ++k)
    labels.data()[k] = scores.data()[k] >= threshold ? 1.0 : 0.0;
  return {std::move(scores), std::move(labels)};
}

namespace {

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_double(const std::string& s, long line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ParseError("bad number: " + s, line);
  return v;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_model: cannot open " + path);
  const TrainConfig& c = model.config;
  out << "pml-model 1\n";
  out << "dims " << model.weights.rows() << " " << model.weights.cols() << "\n";
  out << "converged " << (model.converged ? 1 : 0) << "\n";
  out << "config"
      << " alpha=" << hex_double(c.alpha) << " beta=" << hex_double(c.beta)
      << " lambda=" << hex_double(c.lambda)
      << " outer_iterations=" << c.outer_iterations
      << " outer_tolerance=" << hex_double(c.outer_tolerance)
      << " similarity_mode=" << to_string(c.similarity_mode)
      << " joint=" << (c.joint ? 1 : 0) << " kernel_width_mode="
      << (c.kernel_width_mode == KernelWidthMode::Paper ? "paper"
                                                        : "mean-pairwise")
      << " agd_l0=" << hex_double(c.agd.l0)
      << " agd_gamma=" << hex_double(c.agd.gamma)
      << " agd_max_iterations=" << c.agd.max_iterations
      << " agd_tolerance=" << hex_double(c.agd.tolerance)
      << " p_inner_iterations=" << c.p_update.inner_iterations
      << " p_tolerance=" << hex_double(c.p_update.tolerance)
      << " threshold=" << hex_double(c.threshold) << " seed=" << c.seed
      << "\n";
  out << "trace " << model.objective_trace.size();
  for (double v : model.objective_trace) out << " " << hex_double(v);
  out << "\n";
  out << "weights\n";
  for (std::size_t i = 0; i < model.weights.rows(); ++i) {
    for (std::size_t j = 0; j < model.weights.cols(); ++j) {
      if (j) out << " ";
      out << hex_double(model.weights(i, j));
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw ConfigError("save_model: write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_model: cannot open " + path);
  TrainedModel model;
  std::string line;
  long lineno = 0;

  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of model file", lineno);
    ++lineno;
  };

  next_line();
  if (line != "pml-model 1") throw ParseError("bad model header", lineno);

  next_line();
  std::size_t d = 0, q = 0;
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> d >> q;
    if (tag != "dims" || d == 0 || q == 0)
      throw ParseError("bad dims line", lineno);
  }

  next_line();
  {
    std::istringstream ss(line);
    std::string tag;
    int flag = 0;
    ss >> tag >> flag;
    if (tag != "converged") throw ParseError("bad converged line", lineno);
    model.converged = flag != 0;
  }

  next_line();
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "config") throw ParseError("bad config line", lineno);
    std::string kv;
    TrainConfig& c = model.config;
    while (ss >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError("bad config token: " + kv, lineno);
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "alpha") c.alpha = parse_double(val, lineno);
      else if (key == "beta") c.beta = parse_double(val, lineno);
      else if (key == "lambda") c.lambda = parse_double(val, lineno);
      else if (key == "outer_iterations") c.outer_iterations = std::stoi(val);
      else if (key == "outer_tolerance") c.outer_tolerance = parse_double(val, lineno);
      else if (key == "similarity_mode") c.similarity_mode = similarity_mode_from_string(val);
      else if (key == "joint") c.joint = val != "0";
      else if (key == "kernel_width_mode")
        c.kernel_width_mode = val == "paper" ? KernelWidthMode::Paper
                                             : KernelWidthMode::MeanPairwise;
      else if (key == "agd_l0") c.agd.l0 = parse_double(val, lineno);
      else if (key == "agd_gamma") c.agd.gamma = parse_double(val, lineno);
      else if (key == "agd_max_iterations") c.agd.max_iterations = std::stoi(val);
      else if (key == "agd_tolerance") c.agd.tolerance = parse_double(val, lineno);
      else if (key == "p_inner_iterations") c.p_update.inner_iterations = std::stoi(val);
      else if (key == "p_tolerance") c.p_update.tolerance = parse_double(val, lineno);
      else if (key == "threshold") c.threshold = parse_double(val, lineno);
      else if (key == "seed") c.seed = std::stoull(val);
      else throw ParseError("unknown config key: " + key, lineno);
    }
    c.agd.alpha = c.alpha;
  }

  next_line();
  {
    std::istringstream ss(line);
    std::string tag;
    std::size_t count = 0;
    ss >> tag >> count;
    if (tag != "trace") throw ParseError("bad trace line", lineno);
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
      if (!(ss >> tok)) throw ParseError("short trace line", lineno);
      model.objective_trace.push_back(parse_double(tok, lineno));
    }
  }

  next_line();
  if (line != "weights") throw ParseError("expected weights section", lineno);
  model.weights = Matrix(d, q);
  for (std::size_t i = 0; i < d; ++i) {
    next_line();
    std::istringstream ss(line);
    std::string tok;
    for (std::size_t j = 0; j < q; ++j) {
      if (!(ss >> tok)) throw ParseError("short weights row", lineno);
      model.weights(i, j) = parse_double(tok, lineno);
    }
  }
  next_line();
  if (line != "end") throw ParseError("missing end marker", lineno);
  return model;
}

}  // namespace pml
