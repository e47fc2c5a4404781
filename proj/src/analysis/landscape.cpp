#include "frankopt/analysis/landscape.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "frankopt/harness/benchmark.hpp"

namespace frankopt {

LandscapeMetric loss_metric(const Problem& problem) {
  return [&problem](std::span<const double> theta) {
    std::vector<double> grad(theta.size());
    return problem.evaluate(theta, grad);
  };
}

Extents default_extents(const Pca2& pca, const TrajectoryMatrix& snapshots, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("landscape: scale must be positive");
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (std::size_t r = 0; r < snapshots.rows; ++r) {
    const auto p = pca.project(snapshots.row(r));
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  double out[4];
  for (int k = 0; k < 2; ++k) {
    const double centre = 0.5 * (lo[k] + hi[k]);
    double half = 0.5 * (hi[k] - lo[k]) * scale;
    if (!(half > 0.0)) half = 1.0;
    out[2 * k] = centre - half;
    out[2 * k + 1] = centre + half;
  }
  return Extents{out[0], out[1], out[2], out[3]};
}

namespace {

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return a;
}

}  // namespace

LandscapeGrid landscape_grid(const Pca2& pca, const TrajectoryMatrix& snapshots,
                             const LandscapeMetric& metric, const LandscapeOptions& options) {
  if (options.resolution < 2) throw std::invalid_argument("landscape: resolution must be >= 2");
  if (snapshots.cols != pca.dimension) throw std::invalid_argument("landscape: snapshot dimension mismatch");
  LandscapeGrid g;
  g.pca = pca;
  g.resolution = options.resolution;
  g.extents = options.extents ? *options.extents : default_extents(pca, snapshots, options.scale);
  if (!(g.extents.a_max > g.extents.a_min && g.extents.b_max > g.extents.b_min)) {
    throw std::invalid_argument("landscape: empty extents");
  }
  g.a_axis = axis(g.extents.a_min, g.extents.a_max, g.resolution);
  g.b_axis = axis(g.extents.b_min, g.extents.b_max, g.resolution);
  g.values.assign(g.resolution * g.resolution, 0.0);
  const std::size_t n = g.resolution;
  parallel_for(n, options.jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) g.values[i * n + j] = metric(pca.reconstruct(g.a_axis[j], g.b_axis[i]));
  });
  g.trajectory.reserve(snapshots.rows);
  for (std::size_t r = 0; r < snapshots.rows; ++r) g.trajectory.push_back(pca.project(snapshots.row(r)));
  return g;
}

std::uint64_t basis_hash(const Pca2& pca) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::vector<double>& v) {
    for (double x : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(pca.basis[0]);
  feed(pca.basis[1]);
  feed(pca.mean);
  return h;
}

}  // namespace frankopt
