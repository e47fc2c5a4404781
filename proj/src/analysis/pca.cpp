#include "frankopt/analysis/pca.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace frankopt {

TrajectoryMatrix TrajectoryMatrix::from_rows(const std::vector<std::vector<double>>& snapshots,
                                             std::uint64_t stride) {
  TrajectoryMatrix t;
  t.rows = snapshots.size();
  t.cols = snapshots.empty() ? 0 : snapshots[0].size();
  t.stride = stride;
  t.data.reserve(t.rows * t.cols);
  for (const auto& r : snapshots) {
    if (r.size() != t.cols) throw std::invalid_argument("trajectory rows differ in length");
    t.data.insert(t.data.end(), r.begin(), r.end());
  }
  return t;
}

std::array<double, 2> Pca2::project(std::span<const double> theta) const {
  if (theta.size() != dimension) throw std::invalid_argument("pca: projection dimension mismatch");
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t j = 0; j < dimension; ++j) {
    const double c = theta[j] - mean[j];
    out[0] += c * basis[0][j];
    out[1] += c * basis[1][j];
  }
  return out;
}

std::vector<double> Pca2::reconstruct(double a, double b) const {
  std::vector<double> theta(mean);
  for (std::size_t j = 0; j < dimension; ++j) theta[j] += a * basis[0][j] + b * basis[1][j];
  return theta;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSignTolerance = 1e-12;

void fix_sign(VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::fabs(v[k]) > kSignTolerance) {
      if (v[k] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

Pca2 pca_top2(const TrajectoryMatrix& snapshots) {
  const std::size_t T = snapshots.rows, d = snapshots.cols;
  if (T < 3) throw std::invalid_argument("pca: need at least three snapshots");
  if (d < 2) throw std::invalid_argument("pca: need at least two parameters");
  if (snapshots.data.size() != T * d) throw std::invalid_argument("pca: malformed trajectory matrix");

  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
      snapshots.data.data(), static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(d));
  const VectorXd mean = X.colwise().mean().transpose();
  const MatrixXd C = X.rowwise() - mean.transpose();
  const double denom = static_cast<double>(T - 1);

  // Eigenvalues in descending order with unit vectors in parameter space.
  VectorXd lambda(2);
  MatrixXd B(static_cast<Eigen::Index>(d), 2);
  double total = 0.0;
  if (T <= d) {
    const MatrixXd G = (C * C.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    if (es.info() != Eigen::Success) throw std::runtime_error("pca: eigen decomposition failed");
    total = G.trace();
    for (int k = 0; k < 2; ++k) {
      const Eigen::Index idx = static_cast<Eigen::Index>(T) - 1 - k;
      lambda[k] = std::max(0.0, es.eigenvalues()[idx]);
      VectorXd b = C.transpose() * es.eigenvectors().col(idx);
      const double n = b.norm();
      B.col(k) = n > 0 ? VectorXd(b / n) : VectorXd::Zero(static_cast<Eigen::Index>(d));
    }
  } else {
    const MatrixXd S = (C.transpose() * C) / denom;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw std::runtime_error("pca: eigen decomposition failed");
    total = S.trace();
    for (int k = 0; k < 2; ++k) {
      const Eigen::Index idx = static_cast<Eigen::Index>(d) - 1 - k;
      lambda[k] = std::max(0.0, es.eigenvalues()[idx]);
      B.col(k) = es.eigenvectors().col(idx);
    }
  }
  if (!(total > 0.0) || !(lambda[0] > 0.0)) {
    throw std::invalid_argument("pca: snapshots are identical (rank-deficient trajectory)");
  }

  const double rank_tol = 1e-12 * lambda[0];
  if (lambda[1] <= rank_tol) {
    // One-dimensional trajectory: complete the basis with a coordinate axis.
    lambda[1] = 0.0;
    VectorXd b0 = B.col(0);
    Eigen::Index axis = 0;
    b0.cwiseAbs().minCoeff(&axis);
    VectorXd e = VectorXd::Zero(static_cast<Eigen::Index>(d));
    e[axis] = 1.0;
    e -= b0.dot(e) * b0;
    B.col(1) = e / e.norm();
  }

  Pca2 out;
  out.dimension = d;
  out.mean.assign(mean.data(), mean.data() + d);
  out.total_variance = total;
  for (int k = 0; k < 2; ++k) {
    VectorXd b = B.col(k);
    if (k == 1) {
      // Remove round-off overlap with the first direction.
      const VectorXd b0 = B.col(0);
      b -= b0.dot(b) * b0;
      b /= b.norm();
    }
    fix_sign(b);
    B.col(k) = b;
    out.basis[k].assign(b.data(), b.data() + d);
    out.eigenvalues[k] = lambda[k];
    out.explained[k] = lambda[k] / total;
  }
  return out;
}

}  // namespace frankopt
