#include "pml/confidence.hpp"

#include <cmath>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/rng.hpp"

using namespace pml;

namespace {

Matrix random_candidates(Rng& rng, std::size_t n, std::size_t q) {
  Matrix y(n, q);
  for (std::size_t i = 0; i < n; ++i) {
    y(i, rng.bounded(q)) = 1.0;
    for (std::size_t c = 0; c < q; ++c)
      if (rng.next_double() < 0.4) y(i, c) = 1.0;
  }
  return y;
}

SimilarityBundle random_bundle(Rng& rng, const Matrix& y) {
  Matrix x(y.rows(), 3);
  for (double& v : x.data()) v = rng.next_gaussian();
  return build_bundle(x, y);
}

}  // namespace

TEST_CASE("init_confidence spreads mass uniformly over candidates") {
  Matrix y(1, 6);
  y(0, 1) = 1.0;
  y(0, 4) = 1.0;
  ConfidenceMatrix p = init_confidence(y);
  CHECK(p.values(0, 1) == doctest::Approx(0.5));
  CHECK(p.values(0, 4) == doctest::Approx(0.5));
  CHECK(p.values(0, 0) == 0.0);
  CHECK(p.values(0, 2) == 0.0);

  Matrix single(1, 3);
  single(0, 2) = 1.0;
  CHECK(init_confidence(single).values(0, 2) == 1.0);
}

TEST_CASE("init_confidence leaves empty rows all-zero") {
  set_warning_handler([](const std::string&) {});
  Matrix y(2, 3);
  y(0, 0) = 1.0;
  ConfidenceMatrix p = init_confidence(y);
  for (std::size_t c = 0; c < 3; ++c) CHECK(p.values(1, c) == 0.0);
  set_warning_handler(nullptr);
}

TEST_CASE("hand-evaluated multiplicative update on a 1x2 problem") {
  Matrix y{{1, 1}};
  ConfidenceMatrix p = init_confidence(y);  // [0.5, 0.5]
  Matrix xw{{1.0, 0.0}};

  SimilarityBundle bundle;
  bundle.feature_sim = Matrix{{1.0}};
  bundle.semantic_sim = Matrix{{1.0}};
  bundle.joint_target = Matrix{{1.0}};
  bundle.mask = Matrix{{0.0}};
  bundle.kernel_width = 1.0;

  PUpdateParams params;
  params.beta = 3.0;  // irrelevant, the 1x1 mask is zero
  params.lambda = 1.0;
  params.inner_iterations = 1;

  ConfidenceMatrix out = update_confidence(p, xw, bundle, params);
  CHECK(out.values(0, 0) == doctest::Approx(0.5 * std::sqrt(4.0 / 3.0)));
  CHECK(out.values(0, 1) == doctest::Approx(0.5 * std::sqrt(2.0 / 3.0)));
}

TEST_CASE("zero entries stay exactly zero") {
  Rng rng(9);
  Matrix y = random_candidates(rng, 8, 4);
  SimilarityBundle bundle = random_bundle(rng, y);
  ConfidenceMatrix p = init_confidence(y);
  Matrix xw(8, 4);
  for (double& v : xw.data()) v = rng.next_gaussian();

  PUpdateParams params;
  params.inner_iterations = 25;
  ConfidenceMatrix out = update_confidence(p, xw, bundle, params);
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y.data()[k] == 0.0) CHECK(out.values.data()[k] == 0.0);
    CHECK(out.values.data()[k] >= 0.0);
  }
}

TEST_CASE("KKT points are fixed points of the update") {
  // Converge first, then verify one more sweep barely moves P.
  Rng rng(13);
  Matrix y = random_candidates(rng, 6, 3);
  SimilarityBundle bundle = random_bundle(rng, y);
  ConfidenceMatrix p = init_confidence(y);
  Matrix xw(6, 3);
  for (double& v : xw.data()) v = rng.next_gaussian();

  PUpdateParams params;
  params.inner_iterations = 4000;
  params.tolerance = 1e-14;
  ConfidenceMatrix converged = update_confidence(p, xw, bundle, params);

  params.inner_iterations = 1;
  ConfidenceMatrix next = update_confidence(converged, xw, bundle, params);
  CHECK(max_abs_diff(next.values, converged.values) < 1e-9);
}

TEST_CASE("phi objective") {
  Matrix y{{1, 0}, {0, 1}};
  ConfidenceMatrix p = init_confidence(y);
  SimilarityBundle bundle;
  bundle.joint_target = Matrix{{1.0, 0.5}, {0.5, 1.0}};
  bundle.mask = Matrix{{0.0, 1.0}, {1.0, 0.0}};

  // p_1 . p_2 = 0, A_12 = 0.5, both ordered pairs
  CHECK(phi_objective(p, bundle) == doctest::Approx(0.5));

  // perfect off-diagonal fit
  ConfidenceMatrix fitp = p;
  SimilarityBundle zb = bundle;
  zb.joint_target = Matrix(2, 2);
  CHECK(phi_objective(fitp, zb) == doctest::Approx(0.0));

  // the diagonal is masked, so changing A's diagonal is invisible
  SimilarityBundle diag = bundle;
  diag.joint_target(0, 0) += 7.0;
  CHECK(phi_objective(p, diag) == doctest::Approx(0.5));
}

TEST_CASE("row sum penalty") {
  Matrix y{{1, 1}, {1, 0}};
  ConfidenceMatrix p = init_confidence(y);
  CHECK(row_sum_penalty(p) == doctest::Approx(0.0));

  p.values(0, 0) = 1.0;  // row sums 1.5 and 1
  CHECK(row_sum_penalty(p) == doctest::Approx(0.25));

  ConfidenceMatrix zeros{Matrix(3, 2), Matrix(3, 2)};
  CHECK(row_sum_penalty(zeros) == doctest::Approx(3.0));
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 5, q = 3;
    Matrix y = random_candidates(rng, n, q);
    SimilarityBundle bundle = random_bundle(rng, y);
    Matrix p(n, q);
    for (double& v : p.data()) v = rng.next_double() + 0.05;
    Matrix xw(n, q);
    for (double& v : xw.data()) v = rng.next_gaussian();
    const double beta = 0.7, lambda = 1.3;

    Matrix grad = confidence_gradient(p, xw, bundle, beta, lambda);
    const double h = 1e-6;
    for (std::size_t k = 0; k < p.size(); ++k) {
      Matrix hi = p, lo = p;
      hi.data()[k] += h;
      lo.data()[k] -= h;
      const double fd = (0.5 * p_subproblem_objective(hi, xw, bundle, beta, lambda) -
                         0.5 * p_subproblem_objective(lo, xw, bundle, beta, lambda)) /
                        (2.0 * h);
      CHECK(std::abs(fd - grad.data()[k]) <=
            1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("subproblem objective is mostly non-increasing across sweeps") {
  Rng rng(33);
  int monotone = 0;
  const int trials = 30;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 4 + rng.bounded(10);
    const std::size_t q = 2 + rng.bounded(5);
    Matrix y = random_candidates(rng, n, q);
    SimilarityBundle bundle = random_bundle(rng, y);
    ConfidenceMatrix p = init_confidence(y);
    Matrix xw(n, q);
    for (double& v : xw.data()) v = rng.next_gaussian();

    PUpdateParams params;
    params.inner_iterations = 1;
    bool ok = true;
    double prev = p_subproblem_objective(p.values, xw, bundle, params.beta,
                                         params.lambda);
    for (int sweep = 0; sweep < 30; ++sweep) {
      p = update_confidence(p, xw, bundle, params);
      const double cur = p_subproblem_objective(p.values, xw, bundle,
                                                params.beta, params.lambda);
      if (cur > prev * (1.0 + 1e-8) + 1e-12) ok = false;
      prev = cur;
    }
    if (ok) ++monotone;
  }
  CHECK(monotone >= trials * 95 / 100);
}

TEST_CASE("numerical blowup is reported") {
  Matrix y{{1, 1}, {1, 1}};
  ConfidenceMatrix p = init_confidence(y);
  Matrix xw{{1e13, 1e13}, {1e13, 1e13}};
  SimilarityBundle bundle;
  bundle.joint_target = Matrix(2, 2);
  bundle.mask = Matrix{{0, 1}, {1, 0}};
  PUpdateParams params;
  params.inner_iterations = 50;
  params.lambda = 0.0;
  params.beta = 0.0;
  params.tolerance = 0.0;
  CHECK_THROWS_AS(update_confidence(p, xw, bundle, params), NumericalBlowup);
}
