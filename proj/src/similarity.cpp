#include "pml/similarity.hpp"

#include <cmath>
#include <vector>

#include "pml/errors.hpp"

namespace pml {

namespace {

// Squared Euclidean distances between all rows of x.
Matrix pairwise_sq_dist(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        s += diff * diff;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

}  // namespace

double kernel_width(const Matrix& x, KernelWidthMode mode) {
  const std::size_t n = x.rows();
  if (n < 2) throw TooSmall("kernel_width: need at least 2 instances");

  const Matrix d2 = pairwise_sq_dist(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sum += std::sqrt(d2(i, j));

  double t = mode == KernelWidthMode::Paper
                 ? sum / static_cast<double>(n - 1)
                 : sum / (static_cast<double>(n) * static_cast<double>(n - 1));
  if (t < 1e-12) {
    warn("kernel_width: all instances identical, width clamped to 1e-12");
    t = 1e-12;
  }
  return t;
}

Matrix feature_similarity(const Matrix& x, double t) {
  if (t <= 0.0) throw TooSmall("feature_similarity: kernel width must be > 0");
  const std::size_t n = x.rows();
  Matrix s = pairwise_sq_dist(x);
  const double inv_t2 = 1.0 / (t * t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s(i, j) = i == j ? 1.0 : std::exp(-s(i, j) * inv_t2);
  return s;
}

Matrix semantic_similarity(const Matrix& y) {
  const std::size_t n = y.rows();
  const std::size_t q = y.cols();

  std::vector<double> sq_norms(n, 0.0);
  std::size_t empty_rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < q; ++c) s += y(i, c) * y(i, c);
    sq_norms[i] = s;
    if (s == 0.0) ++empty_rows;
  }
  if (empty_rows > 0)
    warn("semantic_similarity: " + std::to_string(empty_rows) +
         " instance(s) with empty candidate sets; their similarity is 0");

  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sq_norms[i] == 0.0) continue;
    c(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sq_norms[j] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t k = 0; k < q; ++k) dot += y(i, k) * y(j, k);
      // sqrt of the product keeps identical integer-count rows at exactly 1
      const double v = dot / std::sqrt(sq_norms[i] * sq_norms[j]);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

SimilarityBundle build_bundle(const Matrix& x, const Matrix& y,
                              KernelWidthMode mode) {
  if (x.rows() != y.rows())
    throw ShapeMismatch("build_bundle: feature/label row counts differ");
  if (x.rows() < 2) throw TooSmall("build_bundle: need at least 2 instances");

  SimilarityBundle b;
  b.kernel_width = kernel_width(x, mode);
  b.feature_sim = feature_similarity(x, b.kernel_width);
  b.semantic_sim = semantic_similarity(y);
  b.joint_target = hadamard(b.feature_sim, b.semantic_sim);
  b.mask = Matrix::ones(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) b.mask(i, i) = 0.0;
  return b;
}

}  // namespace pml
