#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace frankopt {

/// Parameter snapshots, one row per recorded step.
struct TrajectoryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major
  std::uint64_t stride = 1;

  static TrajectoryMatrix from_rows(const std::vector<std::vector<double>>& snapshots, std::uint64_t stride = 1);
  std::span<const double> row(std::size_t r) const { return std::span<const double>(data).subspan(r * cols, cols); }
};

/// Top two principal directions of the snapshot covariance (normalized by
/// T - 1). Each basis row is unit length with its first entry of magnitude
/// above 1e-12 positive.
struct Pca2 {
  std::size_t dimension = 0;
  std::array<std::vector<double>, 2> basis;
  std::vector<double> mean;
  std::array<double, 2> eigenvalues{};
  std::array<double, 2> explained{};  // eigenvalue / total variance
  double total_variance = 0.0;

  std::array<double, 2> project(std::span<const double> theta) const;
  std::vector<double> reconstruct(double a, double b) const;
};

/// Needs at least three snapshots and non-zero spread. Solves the smaller
/// of the T x T Gram matrix and the d x d covariance. If the trajectory
/// spans a single direction, the second basis vector is the most
/// orthogonal coordinate axis after Gram-Schmidt, with zero variance.
Pca2 pca_top2(const TrajectoryMatrix& snapshots);

}  // namespace frankopt
