#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pml/confidence.hpp"
#include "pml/matrix.hpp"
#include "pml/predictor.hpp"
#include "pml/similarity.hpp"

namespace pml {

enum class SimilarityMode { Both, FeatureOnly, LabelOnly };

std::string to_string(SimilarityMode mode);
SimilarityMode similarity_mode_from_string(const std::string& s);

struct TrainConfig {
  double alpha = 10.0;
  double beta = 10.0;
  double lambda = 1.0;
  int outer_iterations = 10;
  double outer_tolerance = 1e-5;
  SimilarityMode similarity_mode = SimilarityMode::Both;
  bool joint = true;  // false: two-stage (confidence first, predictor after)
  KernelWidthMode kernel_width_mode = KernelWidthMode::Paper;
  AgdParams agd;
  PUpdateParams p_update;
  double threshold = 0.0;  // 0 means 1/q at predict time
  std::uint64_t seed = 0;
};

struct TrainedModel {
  Matrix weights;  // d x q
  ConfidenceMatrix confidence;
  std::vector<double> objective_trace;
  bool converged = false;
  TrainConfig config;
};

// ||XW - P||_F^2 + alpha ||W||_* + beta ||H .* (A - P P^T)||_F^2
double full_objective(const Matrix& w, const Matrix& p, const Matrix& x,
                      const SimilarityBundle& bundle,
                      const TrainConfig& config);

// Replaces the joint target according to the similarity mode: FeatureOnly
// drops C (treated as all-ones), LabelOnly drops S.
SimilarityBundle effective_bundle(SimilarityBundle bundle, SimilarityMode mode);

// Alternating optimization of W and P.
TrainedModel fit(const Matrix& x, const Matrix& y, const TrainConfig& config);

// Scores and thresholded labels for new instances. threshold must be in (0,1).
std::pair<Matrix, Matrix> predict(const TrainedModel& model,
                                  const Matrix& x_test, double threshold);

// Default binarization level for a model with q labels.
double default_threshold(std::size_t q);

// Text container: dims, config echo, objective trace and W at full precision
// (hexfloat). Round-trips losslessly.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace pml
