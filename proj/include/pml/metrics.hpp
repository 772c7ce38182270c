#pragma once

#include <cstddef>

#include "pml/matrix.hpp"

namespace pml {

struct EvaluationReport {
  double hamming_loss = 0.0;
  double one_error = 0.0;
  double coverage = 0.0;
  double ranking_loss = 0.0;
  double average_precision = 0.0;
  std::size_t n_test = 0;
  // Rows excluded per-metric because their label sets are degenerate.
  std::size_t skipped_no_relevant = 0;
  std::size_t skipped_ranking = 0;
};

// Tie conventions, fixed for reproducibility: ranks are 1-based positions in
// descending score order with ties broken by lowest label index; tied
// relevant/irrelevant pairs in ranking_loss count 0.5.

double hamming_loss(const Matrix& pred, const Matrix& truth);
double one_error(const Matrix& scores, const Matrix& truth);
double ranking_loss(const Matrix& scores, const Matrix& truth);
double coverage(const Matrix& scores, const Matrix& truth);
double average_precision(const Matrix& scores, const Matrix& truth);

EvaluationReport evaluate_all(const Matrix& scores, const Matrix& pred,
                              const Matrix& truth);

}  // namespace pml
