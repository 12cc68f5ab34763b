#ifndef CTBN_SIMULATE_HPP
#define CTBN_SIMULATE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "ctbn/generator.hpp"
#include "ctbn/rng.hpp"

namespace ctbn {

struct TrajectoryEvent {
  double time;
  int state;  // 1-based post-jump state
};

/// Right-continuous piecewise-constant path. Invariants: event times
/// strictly increasing within (0, horizon]; every event changes the state;
/// states in 1..n.
class Trajectory {
 public:
  Trajectory(int n, int initial, std::vector<TrajectoryEvent> events,
             double horizon);

  int n() const noexcept { return n_; }
  int initial() const noexcept { return initial_; }
  const std::vector<TrajectoryEvent>& events() const noexcept {
    return events_;
  }
  double horizon() const noexcept { return horizon_; }

  /// State right after the last event at or before t (initial for t below
  /// the first event time).
  int state_at(double t) const;

 private:
  int n_;
  int initial_;
  std::vector<TrajectoryEvent> events_;
  double horizon_;
};

/// Simulation batch parameters: replications >= 1, horizon > 0.
struct SimConfig {
  std::uint64_t seed;
  int replications;
  double horizon;
};

void validate(const SimConfig& config);

/// One path by the exponential-holding-time construction: hold in state i
/// for Exponential(-q(i|i)), then move to j != i with probability
/// q(j|i)/(-q(i|i)). States with zero exit rate absorb. Jumps landing at or
/// beyond the horizon are discarded. Fully determined by the stream.
Trajectory sample_trajectory(const Generator& q, const ProbabilityVector& p0,
                             double horizon, RngStream& rng);

/// Replication r of a batch uses the independent stream (seed, r), so any
/// replication can be regenerated in isolation.
Trajectory sample_trajectory(const Generator& q, const ProbabilityVector& p0,
                             const SimConfig& config, int replication = 0);

/// Decode a composite path into its component paths. Every composite event
/// must move exactly one coordinate; otherwise SimultaneousJump.
std::pair<Trajectory, Trajectory> project(const Trajectory& traj_w, int nx);

/// Inverse of project: merge component paths into the composite one.
/// Throws SharedJumpTime when both components move at the same instant and
/// HorizonMismatch when the observation windows differ.
Trajectory combine(const Trajectory& traj_x, const Trajectory& traj_y,
                   int nx);

}  // namespace ctbn

#endif  // CTBN_SIMULATE_HPP
