#ifndef CTBN_CAUSALITY_HPP
#define CTBN_CAUSALITY_HPP

#include <Eigen/Dense>
#include <vector>

#include "ctbn/compose.hpp"
#include "ctbn/estimate.hpp"
#include "ctbn/generator.hpp"
#include "ctbn/simulate.hpp"

namespace ctbn {

/// XfromY quantifies the influence of Y on X (how far the Y-conditioned
/// laws of X sit from X's marginal law), and symmetrically for YfromX.
enum class Direction { XfromY, YfromX };

/// Divergence rate of the law of a chain run under q0 from the law under q,
/// weighted by expected occupation:
///   sum_i occ(i) * { q0(i|i) - q(i|i) + sum_{j != i} q0(j|i) log(q0(j|i)/q(j|i)) }
/// with 0 log(0/0) = 0 and zero-rate q0 terms skipped. Rows with zero
/// occupation are ignored. Results in (-1e-9, 0) from cancellation clamp to
/// zero; anything lower is a broken guarantee. Throws
/// NotAbsolutelyContinuous(i,j) when q0(j|i) > 0 but q(j|i) = 0 on an
/// occupied row.
double kl_divergence(const Generator& q0, const Generator& q,
                     const OccupationVector& occ);

/// Occupation-weighted mixture of the conditional generators: off-diagonal
/// q(j|i) = sum_k fractions(k) q_k(j|i), diagonal the negative row sum.
Generator marginal_generator(const ConditionalFamily& family,
                             const ProbabilityVector& fractions);

/// Causality accumulated over [0, T]: the expected-occupation-weighted sum,
/// over conditioning states y_k, of the divergence of Q^{X|y_k} from the
/// mixture marginal, with all expectations computed exactly from the joint
/// generator and p0. Grows linearly in T from a stationary start.
double causality(const CtbnModel& model, const ProbabilityVector& p0,
                 double horizon, Direction direction);

/// Plug-in estimate of the causality per unit time: every expected quantity
/// in `causality` replaced by its sample version (occupation fractions,
/// conditional and marginal MLEs) read off one composite path. Comparable
/// to causality(...)/T.
double empirical_causality(const Trajectory& traj_w, int nx, int ny,
                           Direction direction);

/// Largest per-state divergence rate between any conditional generator with
/// positive weight and the mixture marginal; the average causality never
/// exceeds it.
double causality_bound(const CtbnModel& model, Direction direction,
                       const ProbabilityVector& fractions);

/// Convenience overload deriving the mixture weights from (p0, horizon).
double causality_bound(const CtbnModel& model, Direction direction,
                       const ProbabilityVector& p0, double horizon);

/// The Bernoulli parameter kappa in [1/2, 1] whose divergence from a fair
/// coin equals x. That divergence is -log(4 k (1 - k))/2; inverting it on
/// [1/2, 1] gives kappa(x) = (1 + sqrt(1 - e^{-2x}))/2. Throws
/// NegativeInput.
double kl_calibration(double x);

/// 1 - kl_calibration(x), evaluated without cancellation:
/// e^{-2x} / (2 (1 + sqrt(1 - e^{-2x}))). Exact complements matter when
/// kappa approaches 1.
double kl_calibration_complement(double x);

struct CausalityReport {
  double c_x_from_y;
  double c_y_from_x;
  double avg_x_from_y;
  double avg_y_from_x;
  double bound_x_from_y;
  double bound_y_from_x;
  double kappa_x_from_y;
  double kappa_y_from_x;
  double horizon;
  std::vector<double> x_fractions;
  std::vector<double> y_fractions;
};

/// Checks the report's internal consistency (nonnegativity, avg = c/T,
/// Prop-style bound domination, kappa range). Throws InternalError.
void validate_report(const CausalityReport& report);

CausalityReport build_report(const CtbnModel& model,
                             const ProbabilityVector& p0, double horizon);

CausalityReport build_report_empirical(const Trajectory& traj_w, int nx,
                                       int ny);

}  // namespace ctbn

#endif  // CTBN_CAUSALITY_HPP
