#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "pml/matrix.hpp"

namespace pml {

struct Dataset {
  Matrix features;    // n x d
  Matrix candidates;  // n x q binary
  std::optional<Matrix> ground_truth;  // n x q binary, superset check enforced
  std::string name;
};

struct NoiseSpec {
  double ratio_percent = 0.0;
  std::uint64_t seed = 0;
};

// Features: numeric text matrix, one whitespace-separated row per line.
// Labels: sparse text, first line "n q", then one line per instance
// "i: c1 c2 ..." with 0-based label ids.
Matrix load_features(const std::string& path);
Matrix load_labels(const std::string& path);
void save_features(const Matrix& features, const std::string& path);
void save_labels(const Matrix& labels, const std::string& path);

Dataset load_dataset(const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& truth_path = {},
                     const std::string& name = "dataset");

// Adds round(a/100 * g) irrelevant labels per instance, sampled uniformly
// without replacement, capped at q - g. Never removes a true label.
Matrix inject_noise(const Matrix& truth, const NoiseSpec& spec);

// Uniform random partition by instance; both sides nonempty.
std::pair<Dataset, Dataset> split(const Dataset& dataset,
                                  double train_fraction, std::uint64_t seed);

// Synthetic dataset with a planted low-rank linear model: Gaussian features,
// W = U V with the given rank, true labels are the top labels_per_instance
// scores of each row.
Dataset make_planted_dataset(std::size_t n, std::size_t d, std::size_t q,
                             std::size_t rank, std::size_t labels_per_instance,
                             std::uint64_t seed,
                             const std::string& name = "planted");

}  // namespace pml
