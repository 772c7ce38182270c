#include "pml/predictor.hpp"

#include <cmath>

#include "pml/errors.hpp"

namespace pml {

double f_smooth(const Matrix& w, const Matrix& x, const Matrix& p) {
  const double r = frobenius_norm(sub(matmul(x, w), p));
  return r * r;
}

Matrix f_gradient(const Matrix& z, const Matrix& x, const Matrix& p) {
  return scale(matmul(transpose(x), sub(matmul(x, z), p)), 2.0);
}

double full_objective_w(const Matrix& w, const Matrix& x, const Matrix& p,
                        double alpha) {
  return f_smooth(w, x, p) + alpha * nuclear_norm(w);
}

namespace {

double inner_product(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

// Majorization bound at Z evaluated at candidate U.
double surrogate_q(const Matrix& u, const Matrix& z, double f_z,
                   const Matrix& grad_z, double lipschitz, double alpha) {
  const Matrix diff = sub(u, z);
  const double dist = frobenius_norm(diff);
  return f_z + inner_product(diff, grad_z) + 0.5 * lipschitz * dist * dist +
         alpha * nuclear_norm(u);
}

}  // namespace

Matrix agd_solve(const Matrix& x, const Matrix& p, const AgdParams& params,
                 const Matrix* warm_start) {
  if (x.rows() != p.rows()) throw ShapeMismatch("agd_solve: X and P rows differ");
  const std::size_t d = x.cols();
  const std::size_t q = p.cols();

  Matrix w_prev = warm_start ? *warm_start : Matrix(d, q);
  if (warm_start && (warm_start->rows() != d || warm_start->cols() != q))
    throw ShapeMismatch("agd_solve: warm start has wrong shape");

  Matrix z = w_prev;
  double delta = 1.0;
  double lipschitz = params.l0;
  double obj_prev = full_objective_w(w_prev, x, p, params.alpha);

  auto prox_backtracked = [&](const Matrix& point) {
    const Matrix grad = f_gradient(point, x, p);
    const double f_point = f_smooth(point, x, p);
    int growths = 0;
    for (;;) {
      Matrix step(d, q);
      for (std::size_t k = 0; k < step.size(); ++k)
        step.data()[k] = point.data()[k] - grad.data()[k] / lipschitz;
      Matrix candidate = singular_value_threshold(step, params.alpha / lipschitz);
      const double f_cand = full_objective_w(candidate, x, p, params.alpha);
      const double bound =
          surrogate_q(candidate, point, f_point, grad, lipschitz, params.alpha);
      if (f_cand <= bound + 1e-12 * std::max(1.0, std::abs(bound)))
        return candidate;
      lipschitz *= params.gamma;
      if (++growths > 60)
        throw LineSearchStall("agd_solve: backtracking exceeded 60 growths");
    }
  };

  for (int t = 0; t < params.max_iterations; ++t) {
    Matrix candidate = prox_backtracked(z);
    double obj_cur = full_objective_w(candidate, x, p, params.alpha);

    // Momentum can overshoot; restart from the last iterate when it does. A
    // plain proximal step from w_prev cannot increase the objective.
    if (obj_cur > obj_prev) {
      delta = 1.0;
      candidate = prox_backtracked(w_prev);
      obj_cur = std::min(full_objective_w(candidate, x, p, params.alpha), obj_prev);
    }

    const double delta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * delta * delta));
    Matrix z_next(d, q);
    const double b = (delta - 1.0) / delta_next;
    for (std::size_t k = 0; k < z_next.size(); ++k)
      z_next.data()[k] = candidate.data()[k] +
                         b * (candidate.data()[k] - w_prev.data()[k]);

    const bool converged =
        std::abs(obj_prev - obj_cur) <=
        params.tolerance * std::max(1.0, std::abs(obj_prev));
    w_prev = std::move(candidate);
    obj_prev = obj_cur;
    z = std::move(z_next);
    delta = delta_next;
    if (converged && t > 0) break;
  }
  require_finite(w_prev, "agd_solve");
  return w_prev;
}

Matrix predict_scores(const Matrix& w, const Matrix& x_test) {
  if (x_test.cols() != w.rows())
    throw ShapeMismatch("predict_scores: feature dimension mismatch");
  return matmul(x_test, w);
}

}  // namespace pml
