#include "pml/matrix.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "pml/errors.hpp"

namespace pml {

namespace {

using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajorMat>;
using MutMap = Eigen::Map<RowMajorMat>;

ConstMap map_of(const Matrix& m) {
  return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw ShapeMismatch("Matrix: entry count does not match rows*cols");
  require_finite(*this, "Matrix construction");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_)
      throw ShapeMismatch("Matrix: ragged initializer list");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(*this, "Matrix construction");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::ones(std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, 1.0);
}

bool all_finite(const Matrix& m) {
  for (double v : m.data())
    if (!std::isfinite(v)) return false;
  return true;
}

void require_finite(const Matrix& m, const char* context) {
  if (!all_finite(m))
    throw NumericalBlowup(std::string(context) + ": non-finite entries");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("matmul: inner dims differ");
  Matrix out(a.rows(), b.cols());
  MutMap(out.data().data(), static_cast<Eigen::Index>(out.rows()),
         static_cast<Eigen::Index>(out.cols())) = map_of(a) * map_of(b);
  require_finite(out, "matmul");
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("hadamard: shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k)
    out.data()[k] = a.data()[k] * b.data()[k];
  require_finite(out, "hadamard");
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("add: shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k)
    out.data()[k] = a.data()[k] + b.data()[k];
  require_finite(out, "add");
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("sub: shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k)
    out.data()[k] = a.data()[k] - b.data()[k];
  require_finite(out, "sub");
  return out;
}

Matrix scale(const Matrix& m, double s) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) out.data()[k] = m.data()[k] * s;
  require_finite(out, "scale");
  return out;
}

double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return std::sqrt(sum);
}

double max_abs(const Matrix& m) {
  double mx = 0.0;
  for (double v : m.data()) mx = std::max(mx, std::abs(v));
  return mx;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("max_abs_diff: shape mismatch");
  double mx = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    mx = std::max(mx, std::abs(a.data()[k] - b.data()[k]));
  return mx;
}

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(
      map_of(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("svd: factorization did not converge");

  Eigen::MatrixXd u = solver.matrixU();
  Eigen::MatrixXd v = solver.matrixV();
  const Eigen::VectorXd& sigma = solver.singularValues();
  const Eigen::Index k = sigma.size();

  // Sign convention: first nonzero entry of each left vector >= 0.
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const double val = u(r, c);
      if (std::abs(val) > 1e-12) {
        if (val < 0.0) {
          u.col(c) = -u.col(c);
          v.col(c) = -v.col(c);
        }
        break;
      }
    }
  }

  SvdResult out;
  out.left_vectors = Matrix(static_cast<std::size_t>(u.rows()),
                            static_cast<std::size_t>(k));
  out.right_vectors = Matrix(static_cast<std::size_t>(v.rows()),
                             static_cast<std::size_t>(k));
  MutMap(out.left_vectors.data().data(), u.rows(), k) = u;
  MutMap(out.right_vectors.data().data(), v.rows(), k) = v;
  out.singular_values.assign(sigma.data(), sigma.data() + k);
  return out;
}

double nuclear_norm(const Matrix& m) {
  const SvdResult f = svd(m);
  double sum = 0.0;
  for (double s : f.singular_values) sum += s;
  return sum;
}

Matrix singular_value_threshold(const Matrix& m, double tau) {
  if (tau < 0.0)
    throw ShapeMismatch("singular_value_threshold: tau must be >= 0");
  if (tau == 0.0) return m;

  const SvdResult f = svd(m);
  const std::size_t k = f.singular_values.size();
  Matrix scaled_u = f.left_vectors;
  for (std::size_t c = 0; c < k; ++c) {
    const double s = std::max(f.singular_values[c] - tau, 0.0);
    for (std::size_t r = 0; r < scaled_u.rows(); ++r) scaled_u(r, c) *= s;
  }
  return matmul(scaled_u, transpose(f.right_vectors));
}

std::pair<Matrix, Matrix> pos_neg_split(const Matrix& m) {
  require_finite(m, "pos_neg_split");
  Matrix plus(m.rows(), m.cols());
  Matrix minus(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double v = m.data()[k];
    if (v >= 0.0)
      plus.data()[k] = v;
    else
      minus.data()[k] = -v;
  }
  return {std::move(plus), std::move(minus)};
}

}  // namespace pml
