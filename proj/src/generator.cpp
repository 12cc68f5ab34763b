#include "ctbn/generator.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace ctbn {

namespace {

std::string index_pair(int i, int j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

/// Clamps negative entries caused by floating-point cancellation to zero.
/// Anything below -floor is a broken guarantee, not rounding.
void clamp_tiny_negatives(Eigen::VectorXd& v, double floor,
                          const char* where) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0) {
      if (v(i) < -floor) {
        std::ostringstream os;
        os << where << " produced entry " << v(i) << " at state " << i + 1;
        throw InternalError("NegativeMass", os.str());
      }
      v(i) = 0.0;
    }
  }
}

}  // namespace

Generator::Generator(Eigen::MatrixXd rates) : rates_(std::move(rates)) {
  if (rates_.rows() != rates_.cols() || rates_.rows() < 1) {
    std::ostringstream os;
    os << "expected a square matrix, got " << rates_.rows() << "x"
       << rates_.cols();
    throw ValidationError("NonSquare", os.str());
  }
  const int n = static_cast<int>(rates_.rows());
  const double scale = std::max(1.0, rates_.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double r = rates_(i, j);
      if (i != j && r < 0.0) {
        throw ValidationError("NegativeOffDiagonal",
                              "rate " + index_pair(i + 1, j + 1) + " is " +
                                  std::to_string(r));
      }
      row_sum += r;
    }
    if (std::abs(row_sum) > tol) {
      std::ostringstream os;
      os << "row " << i + 1 << " sums to " << row_sum << " (tolerance " << tol
         << ")";
      throw ValidationError("RowSumNonZero", os.str());
    }
  }
}

Generator validate_generator(const Eigen::MatrixXd& rates) {
  return Generator(rates);
}

ProbabilityVector::ProbabilityVector(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 1) {
    throw ValidationError("InvalidDistribution", "empty vector");
  }
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (p_(i) < 0.0 || !std::isfinite(p_(i))) {
      std::ostringstream os;
      os << "entry " << i + 1 << " is " << p_(i);
      throw ValidationError("InvalidDistribution", os.str());
    }
  }
  const double sum = p_.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "entries sum to " << sum;
    throw ValidationError("InvalidDistribution", os.str());
  }
}

OccupationVector::OccupationVector(Eigen::VectorXd a, double horizon)
    : a_(std::move(a)), horizon_(horizon) {
  if (a_.size() < 1 || horizon_ < 0.0) {
    throw ValidationError("InvalidOccupation", "empty vector or negative horizon");
  }
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    if (a_(i) < 0.0 || !std::isfinite(a_(i))) {
      std::ostringstream os;
      os << "entry " << i + 1 << " is " << a_(i);
      throw ValidationError("InvalidOccupation", os.str());
    }
  }
  const double sum = a_.sum();
  if (std::abs(sum - horizon_) > 1e-9 * std::max(horizon_, 1e-12)) {
    std::ostringstream os;
    os << "entries sum to " << sum << ", horizon is " << horizon_;
    throw ValidationError("InvalidOccupation", os.str());
  }
}

ProbabilityVector transient_distribution(const Generator& q,
                                         const ProbabilityVector& p0,
                                         double t) {
  if (p0.n() != q.n()) {
    std::ostringstream os;
    os << "distribution has " << p0.n() << " states, generator has " << q.n();
    throw ValidationError("DimensionMismatch", os.str());
  }
  if (t < 0.0) {
    throw ValidationError("NegativeTime",
                          "t = " + std::to_string(t));
  }
  const Eigen::MatrixXd e = (q.rates() * t).exp();
  Eigen::VectorXd p = e.transpose() * p0.values();
  clamp_tiny_negatives(p, 1e-10, "transient_distribution");
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > 1e-10) {
    throw InternalError("MassNotConserved",
                        "transient mass " + std::to_string(sum));
  }
  p /= sum;
  return ProbabilityVector(std::move(p));
}

OccupationVector occupation_times(const Generator& q,
                                  const ProbabilityVector& p0,
                                  double horizon) {
  if (p0.n() != q.n()) {
    std::ostringstream os;
    os << "distribution has " << p0.n() << " states, generator has " << q.n();
    throw ValidationError("DimensionMismatch", os.str());
  }
  if (horizon < 0.0) {
    throw ValidationError("NegativeTime",
                          "horizon = " + std::to_string(horizon));
  }
  const int n = q.n();
  if (horizon == 0.0) {
    return OccupationVector(Eigen::VectorXd::Zero(n), 0.0);
  }
  // exp of [[Q, I], [0, 0]] * T has integral_0^T exp(Q s) ds upper right.
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = q.rates() * horizon;
  block.topRightCorner(n, n) =
      Eigen::MatrixXd::Identity(n, n) * horizon;
  const Eigen::MatrixXd e = block.exp();
  Eigen::VectorXd a = e.topRightCorner(n, n).transpose() * p0.values();
  clamp_tiny_negatives(a, 1e-9 * horizon, "occupation_times");
  const double sum = a.sum();
  if (std::abs(sum - horizon) > 1e-9 * horizon) {
    std::ostringstream os;
    os << "occupation sums to " << sum << " over horizon " << horizon;
    throw InternalError("MassNotConserved", os.str());
  }
  a *= horizon / sum;
  return OccupationVector(std::move(a), horizon);
}

namespace {

/// Reachability of every node from `start` along q(j|i) > 0 edges;
/// `transpose` follows edges backwards.
bool all_reachable(const Eigen::MatrixXd& rates, bool transpose) {
  const int n = static_cast<int>(rates.rows());
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      const double r = transpose ? rates(j, i) : rates(i, j);
      if (i != j && r > 0.0 && !seen[j]) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace

ProbabilityVector stationary_distribution(const Generator& q) {
  const int n = q.n();
  // Strong connectivity of the jump graph is exactly irreducibility; a
  // reducible chain leaves pi Q = 0 with several solutions (or a unique one
  // that silently ignores transient states), so it is refused outright.
  if (!(all_reachable(q.rates(), false) && all_reachable(q.rates(), true))) {
    throw ValidationError("NotUniquelyErgodic",
                          "transition graph is not strongly connected");
  }
  // Solve the stacked system [Q^T; 1^T] pi = [0; 1] by least squares, then
  // polish with one refinement step.
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = q.rates().transpose();
  a.bottomRows(1) = Eigen::RowVectorXd::Ones(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  const auto qr = a.colPivHouseholderQr();
  Eigen::VectorXd pi = qr.solve(b);
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd residual = a * pi - b;
    pi -= qr.solve(residual);
  }
  clamp_tiny_negatives(pi, 1e-10, "stationary_distribution");
  pi /= pi.sum();
  const double residual = (pi.transpose() * q.rates()).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw InternalError("StationaryResidual",
                        "residual " + std::to_string(residual));
  }
  return ProbabilityVector(std::move(pi));
}

}  // namespace ctbn
