#include "frankopt/problems/overfit.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frankopt/core/random.hpp"

namespace frankopt {

std::vector<double> overfit_row(std::size_t n_patterns, std::size_t pattern, int y) {
  if (n_patterns < 1) throw std::invalid_argument("overfit: need at least one pattern");
  if (pattern < 1 || pattern > n_patterns) throw std::invalid_argument("overfit: pattern out of range");
  if (y != 1 && y != -1) throw std::invalid_argument("overfit: label must be -1 or +1");
  std::vector<double> x(5 * n_patterns + 3, 0.0);
  x[0] = y;
  x[1] = 1.0;
  x[2] = 1.0;
  // 1-based columns 4+5(i-1) .. 4+5(i-1)+2(1-y).
  const std::size_t first = 4 + 5 * (pattern - 1);
  const std::size_t last = first + static_cast<std::size_t>(2 * (1 - y));
  for (std::size_t j = first; j <= last; ++j) x[j - 1] = 1.0;
  return x;
}

OverfitDataset OverfitDataset::generate(std::size_t n_patterns, std::size_t n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("overfit: need at least one sample");
  OverfitDataset d;
  d.n_patterns = n_patterns;
  d.dimension = 5 * n_patterns + 3;
  d.features.reserve(n_samples * d.dimension);
  Rng rng(seed);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::size_t pattern = 1 + rng.below(n_patterns);
    const int y = rng.below(2) == 0 ? -1 : 1;
    const auto x = overfit_row(n_patterns, pattern, y);
    d.features.insert(d.features.end(), x.begin(), x.end());
    d.labels.push_back(y);
    d.patterns.push_back(pattern);
  }
  return d;
}

namespace {

// log(1 + exp(-z)) without overflow or cancellation.
double softplus_neg(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

// d/dz log(1 + exp(-z)) = -1 / (1 + exp(z)).
double softplus_neg_grad(double z) {
  if (z > 0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

double margin(std::span<const double> x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * w[j];
  return s;
}

}  // namespace

double logistic_loss(const OverfitDataset& data, std::span<const double> w,
                     std::span<const std::size_t> rows, std::span<double> grad) {
  if (w.size() != data.dimension) throw std::invalid_argument("overfit: weight dimension mismatch");
  if (rows.empty()) throw std::invalid_argument("overfit: empty batch");
  const bool want_grad = !grad.empty();
  if (want_grad) {
    if (grad.size() != data.dimension) throw std::invalid_argument("overfit: gradient dimension mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  double loss = 0.0;
  for (std::size_t r : rows) {
    if (r >= data.size()) throw std::out_of_range("overfit: row index out of range");
    const auto x = data.row(r);
    const double y = data.labels[r];
    const double z = y * margin(x, w);
    loss += softplus_neg(z);
    if (want_grad) {
      const double c = softplus_neg_grad(z) * y;
      for (std::size_t j = 0; j < x.size(); ++j) grad[j] += c * x[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  if (want_grad) {
    for (double& gj : grad) gj *= inv;
  }
  return loss * inv;
}

OverfitProblem::OverfitProblem(std::size_t n_patterns, std::size_t n_train, std::size_t n_test,
                               std::uint64_t seed)
    : train_(OverfitDataset::generate(n_patterns, n_train, split_seed(seed, 0))),
      test_(OverfitDataset::generate(n_patterns, n_test, split_seed(seed, 1))) {}

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

double accuracy(const OverfitDataset& d, std::span<const double> w) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.labels[k] * margin(d.row(k), w) > 0.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

}  // namespace

double OverfitProblem::evaluate(std::span<const double> theta, std::span<double> grad) const {
  return logistic_loss(train_, theta, all_rows(train_.size()), grad);
}

std::vector<double> OverfitProblem::initial_point(std::uint64_t) const {
  return std::vector<double>(dimension(), 0.0);
}

double OverfitProblem::evaluate_batch(std::span<const double> theta, std::span<const std::size_t> rows,
                                      std::span<double> grad) const {
  return logistic_loss(train_, theta, rows, grad);
}

double OverfitProblem::train_loss(std::span<const double> w) const {
  return logistic_loss(train_, w, all_rows(train_.size()), {});
}

double OverfitProblem::test_loss(std::span<const double> w) const {
  return logistic_loss(test_, w, all_rows(test_.size()), {});
}

double OverfitProblem::train_accuracy(std::span<const double> w) const { return accuracy(train_, w); }
double OverfitProblem::test_accuracy(std::span<const double> w) const { return accuracy(test_, w); }

}  // namespace frankopt
