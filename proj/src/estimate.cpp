#include "ctbn/estimate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ctbn/compose.hpp"

namespace ctbn {

namespace {

/// Running tallies for one chain; long double occupation keeps the
/// telescoping segment sums tight over millions of events.
struct Accumulator {
  explicit Accumulator(int n)
      : counts(CountMatrix::Zero(n, n)),
        occupation(n, 0.0L),
        span(0.0L) {}

  CountMatrix counts;
  std::vector<long double> occupation;
  long double span;

  SufficientStats finish(int trials) const {
    const int n = static_cast<int>(occupation.size());
    Eigen::VectorXd occ(n);
    for (int i = 0; i < n; ++i) occ[i] = static_cast<double>(occupation[i]);
    return SufficientStats(counts, std::move(occ), static_cast<double>(span),
                           trials);
  }
};

void accumulate(Accumulator& acc, const Trajectory& traj) {
  int state = traj.initial();
  double prev = 0.0;
  for (const auto& e : traj.events()) {
    acc.occupation[state - 1] += static_cast<long double>(e.time - prev);
    acc.counts(state - 1, e.state - 1) += 1;
    state = e.state;
    prev = e.time;
  }
  acc.occupation[state - 1] += static_cast<long double>(traj.horizon() - prev);
  acc.span += static_cast<long double>(traj.horizon());
}

}  // namespace

SufficientStats::SufficientStats(CountMatrix counts, Eigen::VectorXd occupation,
                                 double horizon_total, int trials)
    : counts_(std::move(counts)),
      occupation_(std::move(occupation)),
      horizon_total_(horizon_total),
      trials_(trials) {
  const int n = static_cast<int>(occupation_.size());
  if (counts_.rows() != n || counts_.cols() != n || n < 1 || trials_ < 0 ||
      horizon_total_ < 0.0) {
    throw ValidationError("InvalidStats", "inconsistent shapes");
  }
  for (int i = 0; i < n; ++i) {
    if (counts_(i, i) != 0) {
      throw ValidationError("InvalidStats",
                            "diagonal count at state " + std::to_string(i + 1));
    }
    if (occupation_(i) < 0.0) {
      throw ValidationError("InvalidStats",
                            "negative occupation at state " +
                                std::to_string(i + 1));
    }
    for (int j = 0; j < n; ++j) {
      if (counts_(i, j) < 0 ||
          (occupation_(i) == 0.0 && counts_(i, j) != 0)) {
        std::ostringstream os;
        os << "count (" << i + 1 << "," << j + 1
           << ") inconsistent with occupation";
        throw ValidationError("InvalidStats", os.str());
      }
    }
  }
  const double sum = occupation_.sum();
  if (std::abs(sum - horizon_total_) >
      1e-9 * std::max(1e-12, horizon_total_)) {
    std::ostringstream os;
    os << "occupation sums to " << sum << ", total horizon is "
       << horizon_total_;
    throw ValidationError("InvalidStats", os.str());
  }
}

SufficientStats collect_stats(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) {
    throw ValidationError("EmptyInput", "no trajectories");
  }
  const int n = trajectories.front().n();
  Accumulator acc(n);
  for (std::size_t m = 0; m < trajectories.size(); ++m) {
    if (trajectories[m].n() != n) {
      std::ostringstream os;
      os << "trajectory " << m + 1 << " has " << trajectories[m].n()
         << " states, expected " << n;
      throw ValidationError("MixedDimensions", os.str());
    }
    accumulate(acc, trajectories[m]);
  }
  return acc.finish(static_cast<int>(trajectories.size()));
}

SufficientStats merge(const SufficientStats& a, const SufficientStats& b) {
  if (a.n() != b.n()) {
    std::ostringstream os;
    os << a.n() << " vs " << b.n() << " states";
    throw ValidationError("MixedDimensions", os.str());
  }
  return SufficientStats(a.counts() + b.counts(),
                         a.occupation() + b.occupation(),
                         a.horizon_total() + b.horizon_total(),
                         a.trials() + b.trials());
}

Generator mle_generator(const SufficientStats& stats) {
  const int n = stats.n();
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double a = stats.occupation()(i);
    if (a == 0.0) continue;  // unobserved state estimates to a zero row
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rates(i, j) = static_cast<double>(stats.counts()(i, j)) / a;
      row += rates(i, j);
    }
    rates(i, i) = -row;
  }
  return Generator(std::move(rates));
}

ConditionalStats conditional_stats(const Trajectory& traj_w, int nx, int ny) {
  if (nx < 1 || ny < 1 || traj_w.n() != nx * ny) {
    std::ostringstream os;
    os << "composite dimension " << traj_w.n() << " vs nx*ny = " << nx * ny;
    throw ValidationError("DimensionMismatch", os.str());
  }
  std::vector<Accumulator> x_acc(ny, Accumulator(nx));
  std::vector<Accumulator> y_acc(nx, Accumulator(ny));
  CompositeIndex at = split_index(traj_w.initial(), nx);
  double prev = 0.0;
  auto settle = [&](double until) {
    const long double dt = static_cast<long double>(until - prev);
    x_acc[at.y - 1].occupation[at.x - 1] += dt;
    x_acc[at.y - 1].span += dt;
    y_acc[at.x - 1].occupation[at.y - 1] += dt;
    y_acc[at.x - 1].span += dt;
  };
  for (const auto& e : traj_w.events()) {
    const CompositeIndex next = split_index(e.state, nx);
    const bool x_moved = next.x != at.x;
    const bool y_moved = next.y != at.y;
    if (x_moved && y_moved) {
      std::ostringstream os;
      os << "event at time " << e.time << " moves both coordinates";
      throw DataError("SimultaneousJump", os.str());
    }
    settle(e.time);
    if (x_moved) x_acc[at.y - 1].counts(at.x - 1, next.x - 1) += 1;
    if (y_moved) y_acc[at.x - 1].counts(at.y - 1, next.y - 1) += 1;
    at = next;
    prev = e.time;
  }
  settle(traj_w.horizon());
  ConditionalStats out;
  out.x_given_y.reserve(ny);
  out.y_given_x.reserve(nx);
  for (int k = 0; k < ny; ++k) out.x_given_y.push_back(x_acc[k].finish(1));
  for (int k = 0; k < nx; ++k) out.y_given_x.push_back(y_acc[k].finish(1));
  return out;
}

Eigen::VectorXd occupation_fraction(const Trajectory& traj) {
  if (!(traj.horizon() > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(traj.horizon()));
  }
  Accumulator acc(traj.n());
  accumulate(acc, traj);
  long double total = 0.0L;
  for (const long double a : acc.occupation) total += a;
  Eigen::VectorXd fractions(traj.n());
  for (int i = 0; i < traj.n(); ++i) {
    fractions(i) = static_cast<double>(acc.occupation[i] / total);
  }
  return fractions;
}

Generator marginal_mle(const Trajectory& traj_w, int nx, Component component) {
  const auto [tx, ty] = project(traj_w, nx);
  const Trajectory& chosen = component == Component::X ? tx : ty;
  return mle_generator(collect_stats({chosen}));
}

double log_likelihood(const SufficientStats& stats, const Generator& q) {
  if (stats.n() != q.n()) {
    std::ostringstream os;
    os << "stats over " << stats.n() << " states, generator over " << q.n();
    throw ValidationError("DimensionMismatch", os.str());
  }
  double ll = 0.0;
  for (int i = 0; i < stats.n(); ++i) {
    for (int j = 0; j < stats.n(); ++j) {
      if (i == j || stats.counts()(i, j) == 0) continue;
      const double rate = q.rates()(i, j);
      if (rate <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += static_cast<double>(stats.counts()(i, j)) * std::log(rate);
    }
    ll += stats.occupation()(i) * q.rates()(i, i);
  }
  return ll;
}

}  // namespace ctbn
