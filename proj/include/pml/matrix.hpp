#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace pml {

// Dense real matrix, row-major. All exported operations keep entries finite;
// anything that could produce NaN/Inf checks and throws instead.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix ones(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SvdResult {
  Matrix left_vectors;                  // rows x k
  std::vector<double> singular_values;  // length k, nonincreasing
  Matrix right_vectors;                 // cols x k
};

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* context);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double s);
double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Thin SVD with a deterministic sign convention: the first nonzero entry of
// each left singular vector is made nonnegative.
SvdResult svd(const Matrix& m);

double nuclear_norm(const Matrix& m);

// Soft-thresholds the singular values at tau; the proximal operator of
// tau * ||.||_* at m. tau = 0 returns m unchanged.
Matrix singular_value_threshold(const Matrix& m, double tau);

// Splits m = plus - minus with plus, minus >= 0 and plus .* minus = 0.
std::pair<Matrix, Matrix> pos_neg_split(const Matrix& m);

}  // namespace pml
