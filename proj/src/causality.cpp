#include "ctbn/causality.hpp"

#include <cmath>
#include <sstream>

namespace ctbn {

namespace {

/// Per-state divergence rate between generator rows:
///   q0(i|i) - q(i|i) + sum_{j != i, q0 > 0} q0 log(q0/q).
/// Nonnegative for any pair of generator rows; cancellation noise inside
/// (-1e-9, 0) clamps to zero.
double divergence_row(const Eigen::MatrixXd& q0, const Eigen::MatrixXd& q,
                      int i) {
  double row = q0(i, i) - q(i, i);
  for (int j = 0; j < q0.cols(); ++j) {
    if (j == i) continue;
    const double r0 = q0(i, j);
    if (r0 == 0.0) continue;  // 0 log(0/anything) contributes nothing
    const double r = q(i, j);
    if (r <= 0.0) {
      std::ostringstream os;
      os << "rate (" << i + 1 << "," << j + 1
         << ") is positive in the numerator law but zero in the reference";
      throw ValidationError("NotAbsolutelyContinuous", os.str());
    }
    row += r0 * std::log(r0 / r);
  }
  if (row < 0.0) {
    if (row < -1e-9) {
      throw InternalError("NegativeDivergence",
                          "per-state divergence " + std::to_string(row));
    }
    row = 0.0;
  }
  return row;
}

/// Composite state (1-based) holding row state i of member k for the given
/// direction: (x=i, y=k) when measuring Y's influence on X, and (x=k, y=i)
/// for the reverse.
int cell_state(const CtbnModel& model, Direction direction, int i, int k) {
  return direction == Direction::XfromY
             ? composite_index(i, k, model.nx())
             : composite_index(k, i, model.nx());
}

const ConditionalFamily& cell_family(const CtbnModel& model,
                                     Direction direction) {
  return direction == Direction::XfromY ? model.x_given_y()
                                        : model.y_given_x();
}

/// Mixture weights (time fraction of the conditioning component per state)
/// read out of a composite occupation vector.
Eigen::VectorXd conditioning_fractions(const CtbnModel& model,
                                       Direction direction,
                                       const OccupationVector& occ_w) {
  const auto& family = cell_family(model, direction);
  Eigen::VectorXd fractions(family.cond_dim());
  for (int k = 1; k <= family.cond_dim(); ++k) {
    double total = 0.0;
    for (int i = 1; i <= family.base_dim(); ++i) {
      total += occ_w[cell_state(model, direction, i, k)];
    }
    fractions(k - 1) = total / occ_w.horizon();
  }
  return fractions;
}

double causality_core(const CtbnModel& model, Direction direction,
                      const OccupationVector& occ_w) {
  const auto& family = cell_family(model, direction);
  const Eigen::VectorXd fractions =
      conditioning_fractions(model, direction, occ_w);
  const Generator mixture =
      marginal_generator(family, ProbabilityVector(fractions));
  double total = 0.0;
  for (int k = 1; k <= family.cond_dim(); ++k) {
    if (fractions(k - 1) == 0.0) continue;  // unweighted member, no term
    const auto& member = family.member(k).rates();
    double member_divergence = 0.0;
    for (int i = 1; i <= family.base_dim(); ++i) {
      const double occ_cell = occ_w[cell_state(model, direction, i, k)];
      if (occ_cell == 0.0) continue;
      member_divergence +=
          occ_cell * divergence_row(member, mixture.rates(), i - 1);
    }
    total += fractions(k - 1) * member_divergence;
  }
  return total;
}

}  // namespace

double kl_divergence(const Generator& q0, const Generator& q,
                     const OccupationVector& occ) {
  if (q0.n() != q.n() || occ.n() != q.n()) {
    std::ostringstream os;
    os << "dimensions " << q0.n() << ", " << q.n() << ", " << occ.n();
    throw ValidationError("DimensionMismatch", os.str());
  }
  double total = 0.0;
  for (int i = 0; i < q0.n(); ++i) {
    const double weight = occ.values()(i);
    if (weight == 0.0) continue;
    total += weight * divergence_row(q0.rates(), q.rates(), i);
  }
  if (total < 0.0) {
    if (total < -1e-9) {
      throw InternalError("NegativeDivergence", std::to_string(total));
    }
    total = 0.0;
  }
  return total;
}

Generator marginal_generator(const ConditionalFamily& family,
                             const ProbabilityVector& fractions) {
  if (fractions.n() != family.cond_dim()) {
    std::ostringstream os;
    os << fractions.n() << " weights for " << family.cond_dim() << " members";
    throw ValidationError("DimensionMismatch", os.str());
  }
  const int n = family.base_dim();
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= family.cond_dim(); ++k) {
    const double weight = fractions[k];
    if (weight == 0.0) continue;
    rates += weight * family.member(k).rates();
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) row += rates(i, j);
    }
    rates(i, i) = -row;
  }
  return Generator(std::move(rates));
}

double causality(const CtbnModel& model, const ProbabilityVector& p0,
                 double horizon, Direction direction) {
  if (!(horizon > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(horizon));
  }
  const OccupationVector occ_w = occupation_times(model.qw(), p0, horizon);
  return causality_core(model, direction, occ_w);
}

double empirical_causality(const Trajectory& traj_w, int nx, int ny,
                           Direction direction) {
  if (!(traj_w.horizon() > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(traj_w.horizon()));
  }
  const double horizon = traj_w.horizon();
  const ConditionalStats stats = conditional_stats(traj_w, nx, ny);
  const auto& members =
      direction == Direction::XfromY ? stats.x_given_y : stats.y_given_x;
  const Generator marginal = marginal_mle(
      traj_w, nx,
      direction == Direction::XfromY ? Component::X : Component::Y);
  double total = 0.0;
  for (const auto& member : members) {
    const double fraction = member.horizon_total() / horizon;
    if (fraction == 0.0) continue;
    const Generator fit = mle_generator(member);
    double member_divergence = 0.0;
    for (int i = 0; i < member.n(); ++i) {
      const double cell_fraction = member.occupation()(i) / horizon;
      if (cell_fraction == 0.0) continue;
      member_divergence +=
          cell_fraction * divergence_row(fit.rates(), marginal.rates(), i);
    }
    total += fraction * member_divergence;
  }
  return total;
}

double causality_bound(const CtbnModel& model, Direction direction,
                       const ProbabilityVector& fractions) {
  const auto& family = cell_family(model, direction);
  const Generator mixture = marginal_generator(family, fractions);
  double bound = 0.0;
  for (int k = 1; k <= family.cond_dim(); ++k) {
    if (fractions[k] == 0.0) continue;
    for (int i = 0; i < family.base_dim(); ++i) {
      bound = std::max(
          bound, divergence_row(family.member(k).rates(), mixture.rates(), i));
    }
  }
  return bound;
}

double causality_bound(const CtbnModel& model, Direction direction,
                       const ProbabilityVector& p0, double horizon) {
  if (!(horizon > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(horizon));
  }
  const OccupationVector occ_w = occupation_times(model.qw(), p0, horizon);
  return causality_bound(
      model, direction,
      ProbabilityVector(conditioning_fractions(model, direction, occ_w)));
}

double kl_calibration(double x) {
  if (x < 0.0) {
    throw ValidationError("NegativeInput", "x = " + std::to_string(x));
  }
  return 0.5 * (1.0 + std::sqrt(-std::expm1(-2.0 * x)));
}

double kl_calibration_complement(double x) {
  if (x < 0.0) {
    throw ValidationError("NegativeInput", "x = " + std::to_string(x));
  }
  return std::exp(-2.0 * x) /
         (2.0 * (1.0 + std::sqrt(-std::expm1(-2.0 * x))));
}

void validate_report(const CausalityReport& report) {
  const auto broken = [](const std::string& what) {
    throw InternalError("InconsistentReport", what);
  };
  const double values[] = {report.c_x_from_y,     report.c_y_from_x,
                           report.avg_x_from_y,   report.avg_y_from_x,
                           report.bound_x_from_y, report.bound_y_from_x};
  for (const double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) broken("negative causality field");
  }
  if (std::abs(report.avg_x_from_y - report.c_x_from_y / report.horizon) >
          1e-12 ||
      std::abs(report.avg_y_from_x - report.c_y_from_x / report.horizon) >
          1e-12) {
    broken("average is not causality over horizon");
  }
  if (report.c_x_from_y > report.bound_x_from_y * report.horizon + 1e-9 ||
      report.c_y_from_x > report.bound_y_from_x * report.horizon + 1e-9) {
    broken("bound does not dominate");
  }
  for (const double k : {report.kappa_x_from_y, report.kappa_y_from_x}) {
    if (!(k >= 0.5 && k <= 1.0)) broken("calibration out of range");
  }
}

CausalityReport build_report(const CtbnModel& model,
                             const ProbabilityVector& p0, double horizon) {
  if (!(horizon > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(horizon));
  }
  const OccupationVector occ_w = occupation_times(model.qw(), p0, horizon);
  CausalityReport report;
  report.horizon = horizon;
  report.c_x_from_y = causality_core(model, Direction::XfromY, occ_w);
  report.c_y_from_x = causality_core(model, Direction::YfromX, occ_w);
  report.avg_x_from_y = report.c_x_from_y / horizon;
  report.avg_y_from_x = report.c_y_from_x / horizon;
  const Eigen::VectorXd fy =
      conditioning_fractions(model, Direction::XfromY, occ_w);
  const Eigen::VectorXd fx =
      conditioning_fractions(model, Direction::YfromX, occ_w);
  report.bound_x_from_y =
      causality_bound(model, Direction::XfromY, ProbabilityVector(fy));
  report.bound_y_from_x =
      causality_bound(model, Direction::YfromX, ProbabilityVector(fx));
  report.kappa_x_from_y = kl_calibration(report.avg_x_from_y);
  report.kappa_y_from_x = kl_calibration(report.avg_y_from_x);
  report.y_fractions.assign(fy.data(), fy.data() + fy.size());
  report.x_fractions.assign(fx.data(), fx.data() + fx.size());
  validate_report(report);
  return report;
}

CausalityReport build_report_empirical(const Trajectory& traj_w, int nx,
                                       int ny) {
  if (!(traj_w.horizon() > 0.0)) {
    throw ValidationError("ZeroHorizon",
                          "horizon = " + std::to_string(traj_w.horizon()));
  }
  const double horizon = traj_w.horizon();
  CausalityReport report;
  report.horizon = horizon;
  report.avg_x_from_y = empirical_causality(traj_w, nx, ny, Direction::XfromY);
  report.avg_y_from_x = empirical_causality(traj_w, nx, ny, Direction::YfromX);
  report.c_x_from_y = report.avg_x_from_y * horizon;
  report.c_y_from_x = report.avg_y_from_x * horizon;
  // avg recomputed from c so the quotient identity holds to the last bit
  report.avg_x_from_y = report.c_x_from_y / horizon;
  report.avg_y_from_x = report.c_y_from_x / horizon;
  const ConditionalStats stats = conditional_stats(traj_w, nx, ny);
  const auto empirical_bound = [&](Direction direction) {
    const auto& members = direction == Direction::XfromY ? stats.x_given_y
                                                         : stats.y_given_x;
    const Generator marginal = marginal_mle(
        traj_w, nx,
        direction == Direction::XfromY ? Component::X : Component::Y);
    double bound = 0.0;
    for (const auto& member : members) {
      if (member.horizon_total() == 0.0) continue;
      const Generator fit = mle_generator(member);
      for (int i = 0; i < member.n(); ++i) {
        if (member.occupation()(i) == 0.0) continue;
        bound =
            std::max(bound, divergence_row(fit.rates(), marginal.rates(), i));
      }
    }
    return bound;
  };
  report.bound_x_from_y = empirical_bound(Direction::XfromY);
  report.bound_y_from_x = empirical_bound(Direction::YfromX);
  report.kappa_x_from_y = kl_calibration(report.avg_x_from_y);
  report.kappa_y_from_x = kl_calibration(report.avg_y_from_x);
  const auto [tx, ty] = project(traj_w, nx);
  const Eigen::VectorXd fx = occupation_fraction(tx);
  const Eigen::VectorXd fy = occupation_fraction(ty);
  report.x_fractions.assign(fx.data(), fx.data() + fx.size());
  report.y_fractions.assign(fy.data(), fy.data() + fy.size());
  validate_report(report);
  return report;
}

}  // namespace ctbn
