#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "frankopt/problems/problem.hpp"

namespace frankopt {

/// Atoms in reduced Lennard-Jones units (sigma = epsilon = 1). Positions are
/// stored x0 y0 z0 x1 y1 z1 ...
struct AtomicCluster {
  std::vector<double> positions;
  std::uint64_t force_calls = 0;

  std::size_t size() const { return positions.size() / 3; }
};

class CoincidentAtomsError : public std::domain_error {
 public:
  CoincidentAtomsError(std::size_t i, std::size_t j);
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

/// Pair sum 4(r^-12 - r^-6) over all pairs, no cutoff. Writes dE/dx into
/// `gradient` (the negated forces) and returns the energy.
double lj_energy_gradient(std::span<const double> positions, std::span<double> gradient);

struct LjEvaluation {
  double energy = 0.0;
  std::vector<double> forces;
};

/// Energy and forces; increments the cluster's force-call counter.
LjEvaluation lj_energy_forces(AtomicCluster& cluster);

/// Reduced density of the random initial cube.
inline constexpr double kInitialDensity = 0.7;
inline constexpr double kMinPairDistance = 0.8;

/// Atoms placed one by one uniformly in a cube of side (n / 0.7)^(1/3);
/// a candidate closer than 0.8 to any placed atom is redrawn. Throws
/// std::runtime_error if an atom cannot be placed within the retry budget.
AtomicCluster random_cluster(std::size_t n_atoms, std::uint64_t seed);

double min_pair_distance(std::span<const double> positions);

class LennardJonesCluster final : public Problem {
 public:
  explicit LennardJonesCluster(std::size_t n_atoms);
  std::string name() const override;
  std::size_t dimension() const override { return 3 * n_atoms_; }
  double evaluate(std::span<const double> theta, std::span<double> grad) const override;
  std::vector<double> initial_point(std::uint64_t seed) const override;
  std::size_t block_size() const override { return 3; }
  std::size_t atoms() const { return n_atoms_; }

 private:
  std::size_t n_atoms_;
};

}  // namespace frankopt
