#include "pml/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "pml/errors.hpp"

namespace pml {

namespace {

// H .* (A - P P^T) with the diagonal masked out.
Matrix masked_residual(const Matrix& p, const SimilarityBundle& bundle) {
  Matrix ppt = matmul(p, transpose(p));
  Matrix r = hadamard(bundle.mask, sub(bundle.joint_target, ppt));
  return r;
}

}  // namespace

ConfidenceMatrix init_confidence(const Matrix& y) {
  const std::size_t n = y.rows();
  const std::size_t q = y.cols();
  ConfidenceMatrix p;
  p.support = y;
  p.values = Matrix(n, q);
  std::size_t empty_rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t c = 0; c < q; ++c)
      if (y(i, c) != 0.0) ++count;
    if (count == 0) {
      ++empty_rows;
      continue;
    }
    const double mass = 1.0 / static_cast<double>(count);
    for (std::size_t c = 0; c < q; ++c)
      if (y(i, c) != 0.0) p.values(i, c) = mass;
  }
  if (empty_rows > 0)
    warn("init_confidence: " + std::to_string(empty_rows) +
         " instance(s) with empty candidate sets initialized to zero rows");
  return p;
}

ConfidenceMatrix update_confidence(const ConfidenceMatrix& p, const Matrix& xw,
                                   const SimilarityBundle& bundle,
                                   const PUpdateParams& params) {
  if (!p.values.same_shape(xw))
    throw ShapeMismatch("update_confidence: P and XW shapes differ");
  const std::size_t n = p.values.rows();
  const std::size_t q = p.values.cols();
  const double beta = params.beta;
  const double lambda = params.lambda;

  const auto [xw_plus, xw_minus] = pos_neg_split(xw);
  const Matrix masked_target = hadamard(bundle.mask, bundle.joint_target);
  const Matrix masked_target_t = transpose(masked_target);

  ConfidenceMatrix out = p;
  for (int it = 0; it < params.inner_iterations; ++it) {
    Matrix& values = out.values;
    const Matrix ha_p = matmul(masked_target, values);
    const Matrix ha_t_p = matmul(masked_target_t, values);

    const Matrix ppt = matmul(values, transpose(values));
    const Matrix masked_ppt = hadamard(bundle.mask, ppt);
    const Matrix hb_p = matmul(masked_ppt, values);
    const Matrix hb_t_p = matmul(transpose(masked_ppt), values);

    std::vector<double> row_sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < q; ++c) row_sums[i] += values(i, c);

    double max_rel_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < q; ++c) {
        if (p.support(i, c) == 0.0) {
          values(i, c) = 0.0;
          continue;
        }
        const double old = values(i, c);
        if (old == 0.0) continue;
        const double numer = xw_plus(i, c) + beta * ha_p(i, c) +
                             beta * ha_t_p(i, c) + lambda;
        const double denom = old + xw_minus(i, c) + beta * hb_p(i, c) +
                             beta * hb_t_p(i, c) + lambda * row_sums[i] +
                             1e-12;
        const double ratio = std::max(numer, 0.0) / denom;
        const double fresh = old * std::sqrt(ratio);
        if (fresh > 1e12)
          throw NumericalBlowup(
              "update_confidence: entry exceeded 1e12; lower lambda or beta");
        max_rel_change = std::max(max_rel_change,
                                  std::abs(fresh - old) / std::max(old, 1e-12));
        values(i, c) = fresh;
      }
    }
    if (max_rel_change < params.tolerance) break;
  }
  require_finite(out.values, "update_confidence");
  return out;
}

double phi_objective(const ConfidenceMatrix& p,
                     const SimilarityBundle& bundle) {
  const Matrix r = masked_residual(p.values, bundle);
  const double f = frobenius_norm(r);
  return f * f;
}

double row_sum_penalty(const ConfidenceMatrix& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.values.rows(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.values.cols(); ++c) s += p.values(i, c);
    total += (s - 1.0) * (s - 1.0);
  }
  return total;
}

Matrix confidence_gradient(const Matrix& p, const Matrix& xw,
                           const SimilarityBundle& bundle, double beta,
                           double lambda) {
  const std::size_t n = p.rows();
  const std::size_t q = p.cols();
  Matrix grad = sub(p, xw);

  const Matrix residual = masked_residual(p, bundle);
  const Matrix rp = matmul(residual, p);
  const Matrix rtp = matmul(transpose(residual), p);
  for (std::size_t k = 0; k < grad.size(); ++k)
    grad.data()[k] -= beta * (rp.data()[k] + rtp.data()[k]);

  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < q; ++c) s += p(i, c);
    const double v = lambda * (s - 1.0);
    for (std::size_t c = 0; c < q; ++c) grad(i, c) += v;
  }
  return grad;
}

double p_subproblem_objective(const Matrix& p, const Matrix& xw,
                              const SimilarityBundle& bundle, double beta,
                              double lambda) {
  const double fit = frobenius_norm(sub(xw, p));
  const Matrix r = masked_residual(p, bundle);
  const double phi = frobenius_norm(r);
  ConfidenceMatrix tmp{p, p};
  return fit * fit + beta * phi * phi + lambda * row_sum_penalty(tmp);
}

}  // namespace pml
