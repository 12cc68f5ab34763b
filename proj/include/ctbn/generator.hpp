#ifndef CTBN_GENERATOR_HPP
#define CTBN_GENERATOR_HPP

#include <Eigen/Dense>

#include "ctbn/errors.hpp"

namespace ctbn {

/// Intensity matrix of a finite time-homogeneous CTMC.
/// Invariants: square; off-diagonal entries >= 0; every row sums to 0
/// within 1e-9 * max(1, max |entry|). The tolerance is relative so fast
/// chains (rates in the thousands) validate.
class Generator {
 public:
  explicit Generator(Eigen::MatrixXd rates);

  int n() const noexcept { return static_cast<int>(rates_.rows()); }
  const Eigen::MatrixXd& rates() const noexcept { return rates_; }

  /// Entry q(j|i), 1-based state indices.
  double rate(int i, int j) const { return rates_(i - 1, j - 1); }

 private:
  Eigen::MatrixXd rates_;
};

/// Distribution over states: entries >= 0, sum 1 within 1e-12.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Eigen::VectorXd p);

  int n() const noexcept { return static_cast<int>(p_.size()); }
  const Eigen::VectorXd& values() const noexcept { return p_; }
  double operator[](int state) const { return p_(state - 1); }  // 1-based

 private:
  Eigen::VectorXd p_;
};

/// Expected (or realized) time spent per state over [0, horizon]:
/// entries >= 0 and sum to the horizon within 1e-9 * horizon.
class OccupationVector {
 public:
  OccupationVector(Eigen::VectorXd a, double horizon);

  int n() const noexcept { return static_cast<int>(a_.size()); }
  const Eigen::VectorXd& values() const noexcept { return a_; }
  double operator[](int state) const { return a_(state - 1); }  // 1-based
  double horizon() const noexcept { return horizon_; }

 private:
  Eigen::VectorXd a_;
  double horizon_;
};

/// Throws NonSquare, NegativeOffDiagonal(i,j), or RowSumNonZero(i).
Generator validate_generator(const Eigen::MatrixXd& rates);

/// p0 * exp(Q t). Throws DimensionMismatch, NegativeTime.
ProbabilityVector transient_distribution(const Generator& q,
                                         const ProbabilityVector& p0,
                                         double t);

/// a(i) = integral over [0, T] of (p0 exp(Q s))_i ds, computed through the
/// augmented block exponential exp([[Q, I], [0, 0]] T) whose upper-right
/// block is the integral of the semigroup.
OccupationVector occupation_times(const Generator& q,
                                  const ProbabilityVector& p0, double horizon);

/// Unique pi with pi Q = 0, residual below 1e-10 in the max norm.
/// Throws NotUniquelyErgodic for chains that are not irreducible (any chain
/// whose transition graph is not strongly connected); callers must then
/// supply an initial distribution explicitly.
ProbabilityVector stationary_distribution(const Generator& q);

}  // namespace ctbn

#endif  // CTBN_GENERATOR_HPP
