#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frankopt/problems/problem.hpp"

namespace frankopt {

/// Feature row for base pattern `pattern` (1-based) and label y in {-1, +1}:
/// x1 = y, x2 = x3 = 1, ones at 4+5(i-1) .. 4+5(i-1)+2(1-y), zeros
/// elsewhere. Length 5n + 3.
std::vector<double> overfit_row(std::size_t n_patterns, std::size_t pattern, int y);

/// Samples drawn with a uniform base pattern and a uniform label each.
struct OverfitDataset {
  std::size_t n_patterns = 0;
  std::size_t dimension = 0;
  std::vector<double> features;  // row-major, samples x dimension
  std::vector<int> labels;
  std::vector<std::size_t> patterns;  // 1-based

  static OverfitDataset generate(std::size_t n_patterns, std::size_t n_samples, std::uint64_t seed);
  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(features).subspan(k * dimension, dimension);
  }
};

/// Mean logistic loss log(1 + exp(-y w.x)) over the listed rows.
double logistic_loss(const OverfitDataset& data, std::span<const double> w,
                     std::span<const std::size_t> rows, std::span<double> grad);

/// Linear classifier with logistic loss. The training and test sets are
/// independent draws from split seeds 0 and 1 of `seed`.
class OverfitProblem final : public Problem {
 public:
  static constexpr std::size_t kDefaultPatterns = 6;
  static constexpr std::size_t kDefaultSamples = 1000;

  OverfitProblem(std::size_t n_patterns = kDefaultPatterns, std::size_t n_train = kDefaultSamples,
                 std::size_t n_test = kDefaultSamples, std::uint64_t seed = 0);

  std::string name() const override { return "overfit"; }
  std::size_t dimension() const override { return train_.dimension; }
  /// Full-batch training loss.
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  /// w = 0.
  std::vector<double> initial_point(std::uint64_t seed) const override;
  std::optional<double> known_minimum() const override { return 0.0; }
  std::size_t sample_count() const override { return train_.size(); }
  double evaluate_batch(std::span<const double> theta, std::span<const std::size_t> rows,
                        std::span<double> grad) const override;

  double train_loss(std::span<const double> w) const;
  double test_loss(std::span<const double> w) const;
  double train_accuracy(std::span<const double> w) const;
  double test_accuracy(std::span<const double> w) const;

  const OverfitDataset& train() const { return train_; }
  const OverfitDataset& test() const { return test_; }

 private:
  OverfitDataset train_, test_;
};

}  // namespace frankopt
