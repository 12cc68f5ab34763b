#ifndef CTBN_ESTIMATE_HPP
#define CTBN_ESTIMATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ctbn/generator.hpp"
#include "ctbn/simulate.hpp"

namespace ctbn {

using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Transition counts and occupation times pooled over m trials.
/// Invariants: diagonal counts zero; counts out of a state require positive
/// occupation there; occupation entries sum to horizon_total within 1e-9
/// relative.
class SufficientStats {
 public:
  SufficientStats(CountMatrix counts, Eigen::VectorXd occupation,
                  double horizon_total, int trials);

  int n() const noexcept { return static_cast<int>(occupation_.size()); }
  const CountMatrix& counts() const noexcept { return counts_; }
  const Eigen::VectorXd& occupation() const noexcept { return occupation_; }
  double horizon_total() const noexcept { return horizon_total_; }
  int trials() const noexcept { return trials_; }

 private:
  CountMatrix counts_;
  Eigen::VectorXd occupation_;
  double horizon_total_;
  int trials_;
};

/// Pool counts and occupation over trajectories sharing a state space.
/// The final censored holding time of each path counts toward occupation
/// but produces no transition. Throws EmptyInput, MixedDimensions.
SufficientStats collect_stats(const std::vector<Trajectory>& trajectories);

/// Elementwise pooling; associative and commutative.
SufficientStats merge(const SufficientStats& a, const SufficientStats& b);

/// q-hat(j|i) = counts(j|i) / occupation(i), rows with zero occupation
/// estimate to zero, diagonal set to negative row sums.
Generator mle_generator(const SufficientStats& stats);

/// Per-member sufficient statistics of a composite path: member k of
/// x_given_y holds the X-transitions and X-occupation accrued while the
/// other coordinate sat in its k-th state, and symmetrically for y_given_x.
struct ConditionalStats {
  std::vector<SufficientStats> x_given_y;
  std::vector<SufficientStats> y_given_x;
};

ConditionalStats conditional_stats(const Trajectory& traj_w, int nx, int ny);

/// Fraction of the horizon spent in each state; sums to 1 within 1e-12.
/// Throws ZeroHorizon.
Eigen::VectorXd occupation_fraction(const Trajectory& traj);

enum class Component { X, Y };

/// MLE of one component's marginal generator: project the composite path,
/// then estimate, ignoring the other coordinate entirely.
Generator marginal_mle(const Trajectory& traj_w, int nx, Component component);

/// Path log-likelihood of the generator given pooled statistics, up to an
/// additive constant that does not depend on the generator:
/// sum of N(j|i) log q(j|i) plus sum of A(i) q(i|i). Minus infinity when a
/// counted transition has rate zero.
double log_likelihood(const SufficientStats& stats, const Generator& q);

}  // namespace ctbn

#endif  // CTBN_ESTIMATE_HPP
