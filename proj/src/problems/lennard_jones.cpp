#include "frankopt/problems/lennard_jones.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "frankopt/core/random.hpp"
#include "frankopt/simd/kernels.hpp"

namespace frankopt {

CoincidentAtomsError::CoincidentAtomsError(std::size_t i, std::size_t j)
    : std::domain_error("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide"),
      i_(i),
      j_(j) {}

double lj_energy_gradient(std::span<const double> positions, std::span<double> gradient) {
  if (positions.size() % 3 != 0 || gradient.size() != positions.size()) {
    throw std::invalid_argument("lj: positions must be N x 3 and match the gradient length");
  }
  const std::size_t n = positions.size() / 3;
  std::vector<double> xs(n), ys(n), zs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = positions[3 * i];
    ys[i] = positions[3 * i + 1];
    zs[i] = positions[3 * i + 2];
  }
  std::vector<double> e(n), scale(n), dx(n), dy(n), dz(n), r2(n);
  std::fill(gradient.begin(), gradient.end(), 0.0);

  const auto& k = simd::kernels();
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    simd::LjRowArgs row{n, i, xs.data(), ys.data(), zs.data(), e.data(),
                        scale.data(), dx.data(), dy.data(), dz.data(), r2.data()};
    k.lj_row(row);
    double fx = 0.0, fy = 0.0, fz = 0.0;
    for (std::size_t j = i + 1, p = 0; j < n; ++j, ++p) {
      if (!(r2[p] > 0.0)) throw CoincidentAtomsError(i, j);
      energy += e[p];
      // Force on i is scale * (r_i - r_j); the gradient is its negation.
      const double gx = scale[p] * dx[p];
      const double gy = scale[p] * dy[p];
      const double gz = scale[p] * dz[p];
      fx += gx;
      fy += gy;
      fz += gz;
      gradient[3 * j] += gx;
      gradient[3 * j + 1] += gy;
      gradient[3 * j + 2] += gz;
    }
    gradient[3 * i] -= fx;
    gradient[3 * i + 1] -= fy;
    gradient[3 * i + 2] -= fz;
  }
  return energy;
}

LjEvaluation lj_energy_forces(AtomicCluster& cluster) {
  LjEvaluation out;
  out.forces.resize(cluster.positions.size());
  out.energy = lj_energy_gradient(cluster.positions, out.forces);
  for (double& f : out.forces) f = -f;
  ++cluster.force_calls;
  return out;
}

double min_pair_distance(std::span<const double> p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = p.size() / 3;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = p[3 * i] - p[3 * j];
      const double dy = p[3 * i + 1] - p[3 * j + 1];
      const double dz = p[3 * i + 2] - p[3 * j + 2];
      best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return best;
}

AtomicCluster random_cluster(std::size_t n_atoms, std::uint64_t seed) {
  if (n_atoms < 2) throw std::invalid_argument("random_cluster: need at least two atoms");
  constexpr int kMaxAttempts = 100000;
  const double side = std::cbrt(static_cast<double>(n_atoms) / kInitialDensity);
  const double min_d2 = kMinPairDistance * kMinPairDistance;
  Rng rng(seed);
  AtomicCluster c;
  c.positions.reserve(3 * n_atoms);
  for (std::size_t a = 0; a < n_atoms; ++a) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const double x = rng.uniform(0.0, side), y = rng.uniform(0.0, side), z = rng.uniform(0.0, side);
      placed = true;
      for (std::size_t b = 0; b < a && placed; ++b) {
        const double dx = x - c.positions[3 * b];
        const double dy = y - c.positions[3 * b + 1];
        const double dz = z - c.positions[3 * b + 2];
        placed = dx * dx + dy * dy + dz * dz >= min_d2;
      }
      if (placed) c.positions.insert(c.positions.end(), {x, y, z});
    }
    if (!placed) {
      throw std::runtime_error("random_cluster: could not place atom " + std::to_string(a) +
                               " after " + std::to_string(kMaxAttempts) + " attempts");
    }
  }
  return c;
}

LennardJonesCluster::LennardJonesCluster(std::size_t n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 2) throw std::invalid_argument("lj: need at least two atoms");
}

std::string LennardJonesCluster::name() const { return "lj" + std::to_string(n_atoms_); }

double LennardJonesCluster::evaluate(std::span<const double> theta, std::span<double> grad) const {
  return lj_energy_gradient(theta, grad);
}

std::vector<double> LennardJonesCluster::initial_point(std::uint64_t seed) const {
  return random_cluster(n_atoms_, seed).positions;
}

}  // namespace frankopt
