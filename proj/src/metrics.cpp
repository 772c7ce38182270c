#include "pml/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "pml/errors.hpp"

namespace pml {

namespace {

// 1-based rank of every label in descending score order, ties broken by
// lowest label index.
std::vector<std::size_t> ranks_of_row(const Matrix& scores, std::size_t row) {
  const std::size_t q = scores.cols();
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores(row, a) > scores(row, b);
                   });
  std::vector<std::size_t> rank(q);
  for (std::size_t pos = 0; pos < q; ++pos) rank[order[pos]] = pos + 1;
  return rank;
}

std::vector<std::size_t> relevant_of_row(const Matrix& truth,
                                         std::size_t row) {
  std::vector<std::size_t> rel;
  for (std::size_t c = 0; c < truth.cols(); ++c)
    if (truth(row, c) != 0.0) rel.push_back(c);
  return rel;
}

}  // namespace

double hamming_loss(const Matrix& pred, const Matrix& truth) {
  if (!pred.same_shape(truth))
    throw ShapeMismatch("hamming_loss: shape mismatch");
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < pred.size(); ++k)
    if ((pred.data()[k] != 0.0) != (truth.data()[k] != 0.0)) ++mismatches;
  return static_cast<double>(mismatches) / static_cast<double>(pred.size());
}

double one_error(const Matrix& scores, const Matrix& truth) {
  if (!scores.same_shape(truth))
    throw ShapeMismatch("one_error: shape mismatch");
  std::size_t counted = 0, errors = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto rel = relevant_of_row(truth, i);
    if (rel.empty()) continue;
    std::size_t top = 0;
    for (std::size_t c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, top)) top = c;
    ++counted;
    if (truth(i, top) == 0.0) ++errors;
  }
  return counted ? static_cast<double>(errors) / counted : 0.0;
}

double ranking_loss(const Matrix& scores, const Matrix& truth) {
  if (!scores.same_shape(truth))
    throw ShapeMismatch("ranking_loss: shape mismatch");
  std::size_t counted = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto rel = relevant_of_row(truth, i);
    if (rel.empty() || rel.size() == scores.cols()) continue;
    double bad = 0.0;
    std::size_t pairs = 0;
    for (std::size_t r : rel) {
      for (std::size_t c = 0; c < scores.cols(); ++c) {
        if (truth(i, c) != 0.0) continue;
        ++pairs;
        if (scores(i, r) < scores(i, c))
          bad += 1.0;
        else if (scores(i, r) == scores(i, c))
          bad += 0.5;
      }
    }
    total += bad / static_cast<double>(pairs);
    ++counted;
  }
  return counted ? total / counted : 0.0;
}

double coverage(const Matrix& scores, const Matrix& truth) {
  if (!scores.same_shape(truth))
    throw ShapeMismatch("coverage: shape mismatch");
  const double q = static_cast<double>(scores.cols());
  std::size_t counted = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto rel = relevant_of_row(truth, i);
    if (rel.empty()) continue;
    const auto rank = ranks_of_row(scores, i);
    std::size_t deepest = 0;
    for (std::size_t r : rel) deepest = std::max(deepest, rank[r]);
    total += static_cast<double>(deepest - 1) / q;
    ++counted;
  }
  return counted ? total / counted : 0.0;
}

double average_precision(const Matrix& scores, const Matrix& truth) {
  if (!scores.same_shape(truth))
    throw ShapeMismatch("average_precision: shape mismatch");
  std::size_t counted = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto rel = relevant_of_row(truth, i);
    if (rel.empty()) continue;
    const auto rank = ranks_of_row(scores, i);
    double row_sum = 0.0;
    for (std::size_t c : rel) {
      std::size_t above = 0;
      for (std::size_t c2 : rel)
        if (rank[c2] <= rank[c]) ++above;
      row_sum += static_cast<double>(above) / static_cast<double>(rank[c]);
    }
    total += row_sum / static_cast<double>(rel.size());
    ++counted;
  }
  return counted ? total / counted : 0.0;
}

EvaluationReport evaluate_all(const Matrix& scores, const Matrix& pred,
                              const Matrix& truth) {
  EvaluationReport r;
  r.n_test = scores.rows();
  r.hamming_loss = hamming_loss(pred, truth);
  r.one_error = one_error(scores, truth);
  r.coverage = coverage(scores, truth);
  r.ranking_loss = ranking_loss(scores, truth);
  r.average_precision = average_precision(scores, truth);
  for (std::size_t i = 0; i < truth.rows(); ++i) {
    std::size_t rel = 0;
    for (std::size_t c = 0; c < truth.cols(); ++c)
      if (truth(i, c) != 0.0) ++rel;
    if (rel == 0) ++r.skipped_no_relevant;
    if (rel == 0 || rel == truth.cols()) ++r.skipped_ranking;
  }
  return r;
}

}  // namespace pml
