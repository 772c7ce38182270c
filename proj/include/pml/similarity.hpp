#pragma once

#include "pml/matrix.hpp"

namespace pml {

// Width normalization for the Gaussian kernel. Paper divides the ordered-pair
// distance sum by (n-1); MeanPairwise divides by n(n-1).
enum class KernelWidthMode { Paper, MeanPairwise };

// Feature similarity S, semantic similarity C, joint target A = S .* C and the
// off-diagonal mask H, built once from the training split.
struct SimilarityBundle {
  Matrix feature_sim;   // n x n, S
  Matrix semantic_sim;  // n x n, C
  Matrix joint_target;  // n x n, A
  Matrix mask;          // n x n, H (zero diagonal, ones elsewhere)
  double kernel_width = 0.0;
};

// t = sum_{i != j} ||x_i - x_j|| / (n - 1), clamped below at 1e-12.
// Warns DegenerateData when all instances coincide.
double kernel_width(const Matrix& x,
                    KernelWidthMode mode = KernelWidthMode::Paper);

// s_ij = exp(-||x_i - x_j||^2 / t^2); symmetric, unit diagonal.
Matrix feature_similarity(const Matrix& x, double t);

// Cosine similarity of candidate indicator rows. Rows with empty candidate
// sets get zero similarity to everything, their own diagonal included.
Matrix semantic_similarity(const Matrix& y);

SimilarityBundle build_bundle(const Matrix& x, const Matrix& y,
                              KernelWidthMode mode = KernelWidthMode::Paper);

}  // namespace pml
