#include "pml/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "pml/errors.hpp"
#include "pml/rng.hpp"

namespace pml {

Matrix load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open features file " + path, 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof())
      throw ParseError("non-numeric token in features file", lineno);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("inconsistent feature row length", lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty features file " + path, lineno);
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  return out;
}

Matrix load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open labels file " + path, 0);
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty labels file", 1);
  ++lineno;
  std::size_t n = 0, q = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> q) || n == 0 || q == 0)
      throw ParseError("labels header must be 'n q'", lineno);
  }
  Matrix out(n, q);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string idx_tok;
    if (!(ss >> idx_tok) || idx_tok.back() != ':')
      throw ParseError("expected 'i:' prefix", lineno);
    std::size_t i = 0;
    try {
      i = std::stoul(idx_tok.substr(0, idx_tok.size() - 1));
    } catch (const std::exception&) {
      throw ParseError("bad instance index " + idx_tok, lineno);
    }
    if (i >= n) throw ParseError("instance index out of range", lineno);
    long long c;
    while (ss >> c) {
      if (c < 0 || static_cast<std::size_t>(c) >= q)
        throw ParseError("label id out of range", lineno);
      out(i, static_cast<std::size_t>(c)) = 1.0;
    }
    if (!ss.eof()) throw ParseError("non-numeric label id", lineno);
  }
  return out;
}

void save_features(const Matrix& features, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing", 0);
  char buf[64];
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", features(i, j));
      if (j) out << " ";
      out << buf;
    }
    out << "\n";
  }
}

void save_labels(const Matrix& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing", 0);
  out << labels.rows() << " " << labels.cols() << "\n";
  for (std::size_t i = 0; i < labels.rows(); ++i) {
    out << i << ":";
    for (std::size_t c = 0; c < labels.cols(); ++c)
      if (labels(i, c) != 0.0) out << " " << c;
    out << "\n";
  }
}

Dataset load_dataset(const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& truth_path,
                     const std::string& name) {
  Dataset ds;
  ds.name = name;
  ds.features = load_features(features_path);
  ds.candidates = load_labels(labels_path);
  if (ds.features.rows() != ds.candidates.rows())
    throw ConsistencyError("feature and label row counts differ");
  if (truth_path) {
    ds.ground_truth = load_labels(*truth_path);
    if (!ds.ground_truth->same_shape(ds.candidates))
      throw ConsistencyError("truth and candidate shapes differ");
    for (std::size_t k = 0; k < ds.candidates.size(); ++k)
      if (ds.ground_truth->data()[k] != 0.0 && ds.candidates.data()[k] == 0.0)
        throw ConsistencyError(
            "ground-truth label missing from candidate set");
  }
  return ds;
}

Matrix inject_noise(const Matrix& truth, const NoiseSpec& spec) {
  const std::size_t n = truth.rows();
  const std::size_t q = truth.cols();
  if (q == 0) throw EmptyLabelSpace("inject_noise: q must be >= 1");
  Matrix out = truth;
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> irrelevant;
    std::size_t g = 0;
    for (std::size_t c = 0; c < q; ++c) {
      if (truth(i, c) != 0.0)
        ++g;
      else
        irrelevant.push_back(c);
    }
    if (g == 0) continue;
    // round-half-up of a% * g, capped at the available irrelevant labels
    std::size_t k = static_cast<std::size_t>(
        std::floor(spec.ratio_percent / 100.0 * static_cast<double>(g) + 0.5));
    k = std::min(k, irrelevant.size());
    for (std::size_t added = 0; added < k; ++added) {
      const std::size_t pick =
          static_cast<std::size_t>(rng.bounded(irrelevant.size()));
      out(i, irrelevant[pick]) = 1.0;
      irrelevant.erase(irrelevant.begin() + static_cast<long>(pick));
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset,
                                  double train_fraction, std::uint64_t seed) {
  const std::size_t n = dataset.features.rows();
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw ConfigError("split: train_fraction must be in (0,1)");
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw TooSmall("split: a side of the split would be empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  auto take = [&](std::size_t begin, std::size_t end) {
    Dataset part;
    part.name = dataset.name;
    const std::size_t m = end - begin;
    part.features = Matrix(m, dataset.features.cols());
    part.candidates = Matrix(m, dataset.candidates.cols());
    if (dataset.ground_truth)
      part.ground_truth = Matrix(m, dataset.ground_truth->cols());
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t src = order[begin + r];
      for (std::size_t j = 0; j < dataset.features.cols(); ++j)
        part.features(r, j) = dataset.features(src, j);
      for (std::size_t c = 0; c < dataset.candidates.cols(); ++c)
        part.candidates(r, c) = dataset.candidates(src, c);
      if (dataset.ground_truth)
        for (std::size_t c = 0; c < dataset.ground_truth->cols(); ++c)
          (*part.ground_truth)(r, c) = (*dataset.ground_truth)(src, c);
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n)};
}

Dataset make_planted_dataset(std::size_t n, std::size_t d, std::size_t q,
                             std::size_t rank, std::size_t labels_per_instance,
                             std::uint64_t seed, const std::string& name) {
  Rng rng(seed);
  Dataset ds;
  ds.name = name;
  ds.features = Matrix(n, d);
  for (double& v : ds.features.data()) v = rng.next_gaussian();

  Matrix u(d, rank), v(rank, q);
  for (double& e : u.data()) e = rng.next_gaussian();
  for (double& e : v.data()) e = rng.next_gaussian();
  const Matrix w = scale(matmul(u, v), 1.0 / std::sqrt(static_cast<double>(d * rank)));

  const Matrix scores = matmul(ds.features, w);
  Matrix truth(n, q);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores(i, a) > scores(i, b);
                     });
    for (std::size_t k = 0; k < std::min(labels_per_instance, q); ++k)
      truth(i, order[k]) = 1.0;
  }
  ds.ground_truth = truth;
  ds.candidates = truth;
  return ds;
}

}  // namespace pml
