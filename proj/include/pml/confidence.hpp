#pragma once

#include "pml/matrix.hpp"
#include "pml/similarity.hpp"

namespace pml {

// Latent label confidence matrix P together with its candidate support.
// Entries outside the support are zero and stay zero under the multiplicative
// update.
struct ConfidenceMatrix {
  Matrix values;   // n x q
  Matrix support;  // n x q binary, copy of Y
};

struct PUpdateParams {
  double beta = 10.0;
  double lambda = 1.0;
  int inner_iterations = 10;
  double tolerance = 1e-6;
};

// Uniform mass over each row's candidate set; empty rows stay all-zero.
ConfidenceMatrix init_confidence(const Matrix& y);

// Multiplicative KKT update for the P-subproblem, applied inner_iterations
// times or until the max relative entry change drops below tolerance.
ConfidenceMatrix update_confidence(const ConfidenceMatrix& p, const Matrix& xw,
                                   const SimilarityBundle& bundle,
                                   const PUpdateParams& params);

// sum_{i != j} (A_ij - p_i . p_j)^2
double phi_objective(const ConfidenceMatrix& p, const SimilarityBundle& bundle);

// ||P 1_q - 1_n||^2
double row_sum_penalty(const ConfidenceMatrix& p);

// Gradient of 0.5 ||XW - P||_F^2 + 0.5 beta ||H .* (A - P P^T)||_F^2
// + 0.5 lambda ||P 1 - 1||^2 with the masked terms grouped as (H .* M) P.
Matrix confidence_gradient(const Matrix& p, const Matrix& xw,
                           const SimilarityBundle& bundle, double beta,
                           double lambda);

// ||XW - P||_F^2 + beta ||H .* (A - P P^T)||_F^2 + lambda ||P 1 - 1||^2,
// the quantity the multiplicative update should drive down.
double p_subproblem_objective(const Matrix& p, const Matrix& xw,
                              const SimilarityBundle& bundle, double beta,
                              double lambda);

}  // namespace pml
