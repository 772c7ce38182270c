#include "pml/matrix.hpp"

#include <cmath>

#include "doctest.h"
#include "pml/errors.hpp"
#include "pml/rng.hpp"

using namespace pml;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.next_gaussian();
  return m;
}

Matrix reconstruct(const SvdResult& f) {
  Matrix su = f.left_vectors;
  for (std::size_t c = 0; c < f.singular_values.size(); ++c)
    for (std::size_t r = 0; r < su.rows(); ++r)
      su(r, c) *= f.singular_values[c];
  return matmul(su, transpose(f.right_vectors));
}

}  // namespace

TEST_CASE("svd of identity and diagonal matrices") {
  auto f = svd(Matrix::identity(2));
  REQUIRE(f.singular_values.size() == 2);
  CHECK(f.singular_values[0] == doctest::Approx(1.0));
  CHECK(f.singular_values[1] == doctest::Approx(1.0));

  auto g = svd(Matrix{{3, 0}, {0, 1}});
  CHECK(g.singular_values[0] == doctest::Approx(3.0));
  CHECK(g.singular_values[1] == doctest::Approx(1.0));
}

TEST_CASE("svd reconstructs random matrices") {
  Rng rng(42);
  Matrix m = random_matrix(rng, 5, 3);
  auto f = svd(m);
  CHECK(frobenius_norm(sub(reconstruct(f), m)) <=
        1e-8 * std::max(1.0, frobenius_norm(m)));
}

TEST_CASE("svd round-trip bound on 100 random matrices up to 50x50") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng.bounded(50);
    const std::size_t c = 1 + rng.bounded(50);
    Matrix m = random_matrix(rng, r, c);
    auto f = svd(m);
    for (std::size_t i = 1; i < f.singular_values.size(); ++i)
      CHECK(f.singular_values[i] <= f.singular_values[i - 1]);
    CHECK(frobenius_norm(sub(reconstruct(f), m)) <=
          1e-8 * std::max(1.0, frobenius_norm(m)));
  }
}

TEST_CASE("svd is deterministic for fixed input") {
  Rng rng(3);
  Matrix m = random_matrix(rng, 6, 4);
  auto a = svd(m);
  auto b = svd(m);
  CHECK(max_abs_diff(a.left_vectors, b.left_vectors) == 0.0);
  CHECK(max_abs_diff(a.right_vectors, b.right_vectors) == 0.0);
}

TEST_CASE("nuclear norm") {
  CHECK(nuclear_norm(Matrix(3, 4)) == doctest::Approx(0.0));
  CHECK(nuclear_norm(Matrix{{3, 0}, {0, 1}}) == doctest::Approx(4.0));

  // rank-1 outer product of unit vectors
  Rng rng(11);
  Matrix u = random_matrix(rng, 4, 1);
  Matrix v = random_matrix(rng, 3, 1);
  const double nu = frobenius_norm(u), nv = frobenius_norm(v);
  Matrix outer = scale(matmul(u, transpose(v)), 1.0 / (nu * nv));
  CHECK(nuclear_norm(outer) == doctest::Approx(1.0).epsilon(1e-9));

  // oracle: svd then sum
  Matrix m = random_matrix(rng, 5, 5);
  auto f = svd(m);
  double total = 0.0;
  for (double s : f.singular_values) total += s;
  CHECK(nuclear_norm(m) == doctest::Approx(total));
}

TEST_CASE("singular value threshold on diagonal matrix") {
  Matrix out = singular_value_threshold(Matrix{{3, 0}, {0, 1}}, 2.0);
  CHECK(out(0, 0) == doctest::Approx(1.0));
  CHECK(out(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(out(0, 1)) < 1e-12);
}

TEST_CASE("singular value threshold with tau=0 is the identity") {
  Rng rng(5);
  Matrix m = random_matrix(rng, 4, 6);
  CHECK(max_abs_diff(singular_value_threshold(m, 0.0), m) == 0.0);
}

TEST_CASE("singular value threshold minimizes the prox objective locally") {
  Rng rng(17);
  Matrix m = random_matrix(rng, 4, 4);
  const double tau = 0.5;
  Matrix w = singular_value_threshold(m, tau);
  auto prox_obj = [&](const Matrix& cand) {
    const double d = frobenius_norm(sub(cand, m));
    return 0.5 * d * d + tau * nuclear_norm(cand);
  };
  const double best = prox_obj(w);
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix pert = w;
    Matrix dir = random_matrix(rng, 4, 4);
    const double nd = frobenius_norm(dir);
    for (std::size_t k = 0; k < pert.size(); ++k)
      pert.data()[k] += 0.01 * dir.data()[k] / nd;
    CHECK(prox_obj(pert) > best);
  }
}

TEST_CASE("thresholding never increases the nuclear norm") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = random_matrix(rng, 3 + rng.bounded(5), 3 + rng.bounded(5));
    const double tau = rng.next_double() * 2.0;
    CHECK(nuclear_norm(singular_value_threshold(m, tau)) <=
          nuclear_norm(m) + 1e-9);
  }
}

TEST_CASE("pos_neg_split") {
  auto [p, m] = pos_neg_split(Matrix{{1, -2}});
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) == 0.0);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 2.0);

  Matrix nonneg{{0.5, 2}, {0, 3}};
  auto [p2, m2] = pos_neg_split(nonneg);
  CHECK(max_abs_diff(p2, nonneg) == 0.0);
  CHECK(max_abs(m2) == 0.0);

  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix r = random_matrix(rng, 1 + rng.bounded(8), 1 + rng.bounded(8));
    auto [plus, minus] = pos_neg_split(r);
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(plus.data()[k] >= 0.0);
      CHECK(minus.data()[k] >= 0.0);
      CHECK(plus.data()[k] - minus.data()[k] == r.data()[k]);
      CHECK(plus.data()[k] * minus.data()[k] == 0.0);
    }
  }
}

TEST_CASE("hadamard") {
  Matrix a{{1, 2}, {3, 4}};
  CHECK(max_abs_diff(hadamard(a, Matrix::ones(2, 2)), a) == 0.0);
  CHECK(max_abs(hadamard(a, Matrix(2, 2))) == 0.0);
  Matrix expect{{2, 0}, {3, 4}};
  CHECK(max_abs_diff(hadamard(a, Matrix{{2, 0}, {1, 1}}), expect) == 0.0);
  CHECK_THROWS_AS(hadamard(a, Matrix(3, 2)), ShapeMismatch);
}

TEST_CASE("matmul shape errors") {
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeMismatch);
}
