#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "frankopt/analysis/pca.hpp"
#include "frankopt/problems/problem.hpp"

namespace frankopt {

/// Grid axis ranges in PCA coordinates.
struct Extents {
  double a_min = -1.0, a_max = 1.0;
  double b_min = -1.0, b_max = 1.0;
};

struct LandscapeOptions {
  std::optional<Extents> extents;  // default: `scale` x the projected bounding box
  double scale = 1.2;
  std::size_t resolution = 41;
  std::size_t jobs = 1;
};

/// Metric evaluated at reconstructed parameters.
using LandscapeMetric = std::function<double(std::span<const double>)>;

/// Problem loss as a metric.
LandscapeMetric loss_metric(const Problem& problem);

struct LandscapeGrid {
  Pca2 pca;
  Extents extents;
  std::size_t resolution = 0;
  std::vector<double> a_axis, b_axis;
  std::vector<double> values;  // row-major: values[i * resolution + j] at (a_axis[j], b_axis[i])
  std::vector<std::array<double, 2>> trajectory;

  double at(std::size_t i, std::size_t j) const { return values[i * resolution + j]; }
};

/// Box around the projected snapshots, widened by `scale` about its centre.
/// A degenerate side gets half-width 1.
Extents default_extents(const Pca2& pca, const TrajectoryMatrix& snapshots, double scale);

/// Evaluates `metric` at mean + a b1 + b b2 over a resolution x resolution
/// grid and projects every snapshot. Inputs are not modified.
LandscapeGrid landscape_grid(const Pca2& pca, const TrajectoryMatrix& snapshots,
                             const LandscapeMetric& metric, const LandscapeOptions& options = {});

/// FNV-1a over the basis and mean bytes; identifies the plane in manifests.
std::uint64_t basis_hash(const Pca2& pca);

}  // namespace frankopt
