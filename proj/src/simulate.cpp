#include "ctbn/simulate.hpp"

#include <algorithm>
#include <sstream>

#include "ctbn/compose.hpp"

namespace ctbn {

Trajectory::Trajectory(int n, int initial, std::vector<TrajectoryEvent> events,
                       double horizon)
    : n_(n), initial_(initial), events_(std::move(events)), horizon_(horizon) {
  if (n_ < 1 || initial_ < 1 || initial_ > n_ || horizon_ < 0.0) {
    std::ostringstream os;
    os << "n=" << n_ << ", initial=" << initial_ << ", horizon=" << horizon_;
    throw ValidationError("InvalidTrajectory", os.str());
  }
  int prev_state = initial_;
  double prev_time = 0.0;
  for (std::size_t k = 0; k < events_.size(); ++k) {
    const auto& e = events_[k];
    std::ostringstream os;
    os << "event " << k + 1 << " (time " << e.time << ", state " << e.state
       << ")";
    if (e.state < 1 || e.state > n_) {
      throw ValidationError("InvalidTrajectory", os.str() + ": state range");
    }
    if (!(e.time > prev_time) || e.time > horizon_) {
      throw ValidationError("InvalidTrajectory",
                            os.str() + ": times must increase within (0, T]");
    }
    if (e.state == prev_state) {
      throw ValidationError("InvalidTrajectory",
                            os.str() + ": event does not change the state");
    }
    prev_state = e.state;
    prev_time = e.time;
  }
}

int Trajectory::state_at(double t) const {
  int state = initial_;
  for (const auto& e : events_) {
    if (e.time > t) break;
    state = e.state;
  }
  return state;
}

void validate(const SimConfig& config) {
  if (config.replications < 1) {
    throw ValidationError("InvalidConfig",
                          "replications = " +
                              std::to_string(config.replications));
  }
  if (!(config.horizon > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(config.horizon));
  }
}

Trajectory sample_trajectory(const Generator& q, const ProbabilityVector& p0,
                             double horizon, RngStream& rng) {
  if (p0.n() != q.n()) {
    std::ostringstream os;
    os << "distribution has " << p0.n() << " states, generator has " << q.n();
    throw ValidationError("DimensionMismatch", os.str());
  }
  if (!(horizon > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(horizon));
  }
  const int n = q.n();
  int state = rng.categorical(p0.values(), n) + 1;
  const int initial = state;
  std::vector<TrajectoryEvent> events;
  double t = 0.0;
  Eigen::VectorXd weights(n);
  while (true) {
    const double exit_rate = -q.rates()(state - 1, state - 1);
    if (exit_rate <= 0.0) break;  // absorbing
    t += rng.exponential(exit_rate);
    if (t >= horizon) break;
    for (int j = 0; j < n; ++j) {
      weights(j) = j == state - 1 ? 0.0 : q.rates()(state - 1, j);
    }
    state = rng.categorical(weights, n) + 1;
    events.push_back({t, state});
  }
  return Trajectory(n, initial, std::move(events), horizon);
}

Trajectory sample_trajectory(const Generator& q, const ProbabilityVector& p0,
                             const SimConfig& config, int replication) {
  validate(config);
  if (replication < 0 || replication >= config.replications) {
    throw ValidationError("OutOfRange",
                          "replication " + std::to_string(replication));
  }
  RngStream rng(config.seed, static_cast<std::uint64_t>(replication));
  return sample_trajectory(q, p0, config.horizon, rng);
}

std::pair<Trajectory, Trajectory> project(const Trajectory& traj_w, int nx) {
  if (nx < 1 || traj_w.n() % nx != 0) {
    std::ostringstream os;
    os << "composite dimension " << traj_w.n() << " does not factor by nx="
       << nx;
    throw ValidationError("DimensionMismatch", os.str());
  }
  const int ny = traj_w.n() / nx;
  CompositeIndex at = split_index(traj_w.initial(), nx);
  std::vector<TrajectoryEvent> x_events;
  std::vector<TrajectoryEvent> y_events;
  for (const auto& e : traj_w.events()) {
    const CompositeIndex next = split_index(e.state, nx);
    const bool x_moved = next.x != at.x;
    const bool y_moved = next.y != at.y;
    if (x_moved && y_moved) {
      std::ostringstream os;
      os << "event at time " << e.time << " moves (" << at.x << "," << at.y
         << ") to (" << next.x << "," << next.y << ")";
      throw DataError("SimultaneousJump", os.str());
    }
    if (x_moved) x_events.push_back({e.time, next.x});
    if (y_moved) y_events.push_back({e.time, next.y});
    at = next;
  }
  const CompositeIndex start = split_index(traj_w.initial(), nx);
  return {Trajectory(nx, start.x, std::move(x_events), traj_w.horizon()),
          Trajectory(ny, start.y, std::move(y_events), traj_w.horizon())};
}

Trajectory combine(const Trajectory& traj_x, const Trajectory& traj_y,
                   int nx) {
  if (traj_x.n() != nx) {
    std::ostringstream os;
    os << "first component has " << traj_x.n() << " states, nx=" << nx;
    throw ValidationError("DimensionMismatch", os.str());
  }
  if (traj_x.horizon() != traj_y.horizon()) {
    std::ostringstream os;
    os << traj_x.horizon() << " vs " << traj_y.horizon();
    throw ValidationError("HorizonMismatch", os.str());
  }
  int x = traj_x.initial();
  int y = traj_y.initial();
  const int initial = composite_index(x, y, nx);
  std::vector<TrajectoryEvent> events;
  events.reserve(traj_x.events().size() + traj_y.events().size());
  std::size_t ix = 0;
  std::size_t iy = 0;
  const auto& xs = traj_x.events();
  const auto& ys = traj_y.events();
  while (ix < xs.size() || iy < ys.size()) {
    const bool take_x =
        iy == ys.size() || (ix < xs.size() && xs[ix].time < ys[iy].time);
    if (ix < xs.size() && iy < ys.size() && xs[ix].time == ys[iy].time) {
      std::ostringstream os;
      os << "both components jump at time " << xs[ix].time;
      throw DataError("SharedJumpTime", os.str());
    }
    if (take_x) {
      x = xs[ix].state;
      events.push_back({xs[ix].time, composite_index(x, y, nx)});
      ++ix;
    } else {
      y = ys[iy].state;
      events.push_back({ys[iy].time, composite_index(x, y, nx)});
      ++iy;
    }
  }
  return Trajectory(nx * traj_y.n(), initial, std::move(events),
                    traj_x.horizon());
}

}  // namespace ctbn
