#pragma once

#include "pml/matrix.hpp"

namespace pml {

struct AgdParams {
  double l0 = 1.0;       // initial Lipschitz estimate
  double gamma = 2.0;    // backtracking growth factor, > 1
  double alpha = 10.0;   // nuclear norm weight
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative objective change
};

// ||XW - P||_F^2
double f_smooth(const Matrix& w, const Matrix& x, const Matrix& p);

// 2 X^T (XZ - P)
Matrix f_gradient(const Matrix& z, const Matrix& x, const Matrix& p);

// f_smooth + alpha * ||W||_*
double full_objective_w(const Matrix& w, const Matrix& x, const Matrix& p,
                        double alpha);

// Accelerated proximal gradient for min ||XW - P||_F^2 + alpha ||W||_*.
// Monotone variant: the kept iterate never increases the objective. Throws
// LineSearchStall after 60 growths of the Lipschitz estimate in one line
// search.
Matrix agd_solve(const Matrix& x, const Matrix& p, const AgdParams& params,
                 const Matrix* warm_start = nullptr);

// x_test * W
Matrix predict_scores(const Matrix& w, const Matrix& x_test);

}  // namespace pml
