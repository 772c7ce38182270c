#include "pml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/rng.hpp"

using namespace pml;

// Brute-force reference implementations, written from the definitions with no
// code shared with the library.
namespace oracle {

std::vector<std::size_t> descending_order(const std::vector<double>& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

double hamming(const Matrix& pred, const Matrix& truth) {
  double bad = 0.0;
  for (std::size_t i = 0; i < pred.rows(); ++i)
    for (std::size_t c = 0; c < pred.cols(); ++c)
      if ((pred(i, c) != 0.0) != (truth(i, c) != 0.0)) bad += 1.0;
  return bad / static_cast<double>(pred.rows() * pred.cols());
}

double one_err(const Matrix& scores, const Matrix& truth) {
  double errs = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::vector<double> row(scores.cols());
    bool any_rel = false;
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      row[c] = scores(i, c);
      if (truth(i, c) != 0.0) any_rel = true;
    }
    if (!any_rel) continue;
    ++rows;
    const std::size_t top = descending_order(row)[0];
    if (truth(i, top) == 0.0) errs += 1.0;
  }
  return rows ? errs / rows : 0.0;
}

double rank_loss(const Matrix& scores, const Matrix& truth) {
  double total = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::vector<std::size_t> rel, irr;
    for (std::size_t c = 0; c < scores.cols(); ++c)
      (truth(i, c) != 0.0 ? rel : irr).push_back(c);
    if (rel.empty() || irr.empty()) continue;
    double bad = 0.0;
    for (std::size_t r : rel)
      for (std::size_t s : irr) {
        if (scores(i, r) < scores(i, s)) bad += 1.0;
        if (scores(i, r) == scores(i, s)) bad += 0.5;
      }
    total += bad / static_cast<double>(rel.size() * irr.size());
    ++rows;
  }
  return rows ? total / rows : 0.0;
}

double cover(const Matrix& scores, const Matrix& truth) {
  double total = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::vector<double> row(scores.cols());
    for (std::size_t c = 0; c < scores.cols(); ++c) row[c] = scores(i, c);
    const auto order = descending_order(row);
    std::size_t deepest = 0;
    bool any = false;
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      if (truth(i, order[pos]) != 0.0) {
        deepest = pos + 1;
        any = true;
      }
    if (!any) continue;
    total += static_cast<double>(deepest - 1) / static_cast<double>(scores.cols());
    ++rows;
  }
  return rows ? total / rows : 0.0;
}

double avg_prec(const Matrix& scores, const Matrix& truth) {
  double total = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::vector<double> row(scores.cols());
    for (std::size_t c = 0; c < scores.cols(); ++c) row[c] = scores(i, c);
    const auto order = descending_order(row);
    std::vector<std::size_t> rank(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      rank[order[pos]] = pos + 1;
    std::vector<std::size_t> rel;
    for (std::size_t c = 0; c < scores.cols(); ++c)
      if (truth(i, c) != 0.0) rel.push_back(c);
    if (rel.empty()) continue;
    double row_sum = 0.0;
    for (std::size_t c : rel) {
      std::size_t leq = 0;
      for (std::size_t c2 : rel)
        if (rank[c2] <= rank[c]) ++leq;
      row_sum += static_cast<double>(leq) / static_cast<double>(rank[c]);
    }
    total += row_sum / static_cast<double>(rel.size());
    ++rows;
  }
  return rows ? total / rows : 0.0;
}

}  // namespace oracle

TEST_CASE("hamming loss basics") {
  Matrix t{{1, 0}, {0, 1}};
  CHECK(hamming_loss(t, t) == 0.0);
  Matrix comp{{0, 1}, {1, 0}};
  CHECK(hamming_loss(comp, t) == 1.0);
  Matrix one_off{{1, 1}, {0, 1}};
  CHECK(hamming_loss(one_off, t) == doctest::Approx(0.25));
  CHECK_THROWS_AS(hamming_loss(t, Matrix(3, 2)), ShapeMismatch);
}

TEST_CASE("one error basics") {
  Matrix scores{{0.9, 0.1}, {0.8, 0.2}};
  Matrix rel_top{{1, 0}, {1, 1}};
  CHECK(one_error(scores, rel_top) == 0.0);
  Matrix rel_bottom{{0, 1}, {0, 1}};
  CHECK(one_error(scores, rel_bottom) == 1.0);
}

TEST_CASE("ranking loss basics") {
  Matrix scores{{0.9, 0.8, 0.1}};
  Matrix truth{{1, 1, 0}};
  CHECK(ranking_loss(scores, truth) == 0.0);

  // relevant {0,2} both below the irrelevant label 1
  Matrix s2{{0.3, 0.7, 0.6}};
  Matrix t2{{1, 0, 1}};
  CHECK(ranking_loss(s2, t2) == doctest::Approx(1.0));

  Matrix tied{{0.5, 0.5, 0.5}};
  CHECK(ranking_loss(tied, t2) == doctest::Approx(0.5));
}

TEST_CASE("coverage basics") {
  Matrix s{{0.9, 0.2, 0.5}};
  Matrix single{{1, 0, 0}};
  CHECK(coverage(s, single) == 0.0);

  Matrix two{{1, 0, 1}};
  CHECK(coverage(s, two) == doctest::Approx(1.0 / 3.0));

  Matrix last{{0, 0, 1}};
  Matrix s_last{{0.9, 0.5, 0.2}};
  CHECK(coverage(s_last, last) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("average precision basics") {
  Matrix s{{0.9, 0.8, 0.1}};
  Matrix top2{{1, 1, 0}};
  CHECK(average_precision(s, top2) == doctest::Approx(1.0));

  Matrix s2{{0.1, 0.9}};
  Matrix first{{1, 0}};
  CHECK(average_precision(s2, first) == doctest::Approx(0.5));

  Matrix all{{1, 1, 1}};
  CHECK(average_precision(s, all) == doctest::Approx(1.0));
}

TEST_CASE("all metrics match the brute-force oracles on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.bounded(10);
    const std::size_t q = 2 + rng.bounded(5);
    Matrix scores(n, q);
    Matrix truth(n, q);
    Matrix pred(n, q);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      // quantized scores to force ties
      scores.data()[k] = static_cast<double>(rng.bounded(5)) / 4.0;
      truth.data()[k] = rng.next_double() < 0.4 ? 1.0 : 0.0;
      pred.data()[k] = rng.next_double() < 0.5 ? 1.0 : 0.0;
    }
    CHECK(std::abs(hamming_loss(pred, truth) - oracle::hamming(pred, truth)) <= 1e-12);
    CHECK(std::abs(one_error(scores, truth) - oracle::one_err(scores, truth)) <= 1e-12);
    CHECK(std::abs(ranking_loss(scores, truth) - oracle::rank_loss(scores, truth)) <= 1e-12);
    CHECK(std::abs(coverage(scores, truth) - oracle::cover(scores, truth)) <= 1e-12);
    CHECK(std::abs(average_precision(scores, truth) -
                   oracle::avg_prec(scores, truth)) <= 1e-12);
  }
}

TEST_CASE("rank metrics are invariant under strictly increasing transforms") {
  Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.bounded(6);
    const std::size_t q = 2 + rng.bounded(5);
    Matrix scores(n, q), truth(n, q);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      scores.data()[k] = rng.next_gaussian();
      truth.data()[k] = rng.next_double() < 0.4 ? 1.0 : 0.0;
    }
    Matrix warped = scores;
    for (double& v : warped.data()) v = v * v * v + v;
    CHECK(one_error(scores, truth) == doctest::Approx(one_error(warped, truth)));
    CHECK(ranking_loss(scores, truth) ==
          doctest::Approx(ranking_loss(warped, truth)));
    CHECK(coverage(scores, truth) == doctest::Approx(coverage(warped, truth)));
    CHECK(average_precision(scores, truth) ==
          doctest::Approx(average_precision(warped, truth)));
  }
}

TEST_CASE("evaluate_all reports skip counts") {
  Matrix scores{{0.9, 0.1}, {0.5, 0.5}};
  Matrix truth{{0, 0}, {1, 1}};
  Matrix pred{{0, 0}, {1, 1}};
  EvaluationReport r = evaluate_all(scores, pred, truth);
  CHECK(r.n_test == 2);
  CHECK(r.skipped_no_relevant == 1);
  CHECK(r.skipped_ranking == 2);
}
