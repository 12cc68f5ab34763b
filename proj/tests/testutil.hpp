#ifndef CTBN_TESTS_TESTUTIL_HPP
#define CTBN_TESTS_TESTUTIL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ctbn/compose.hpp"
#include "ctbn/errors.hpp"
#include "ctbn/generator.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/tickdata.hpp"

namespace testutil {

/// Name of the ctbn::Error thrown by f(), or "" if nothing was thrown.
template <typename F>
std::string thrown_name(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const ctbn::Error& e) {
    return e.name();
  }
  return "";
}

/// Random valid generator: off-diagonal rates uniform in [lo, hi],
/// diagonal set to the negative row sum.
inline Eigen::MatrixXd random_rates(int n, ctbn::RngStream& rng,
                                    double lo = 0.05, double hi = 2.0) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      m(i, j) = lo + (hi - lo) * rng.uniform01();
      row += m(i, j);
    }
    m(i, i) = -row;
  }
  return m;
}

/// Fourth-order fixed-step integration of p' = Q^T p. Oracle for the
/// matrix-exponential paths; shares no code with the library numerics.
inline Eigen::VectorXd rk4_transient(const Eigen::MatrixXd& rates,
                                     Eigen::VectorXd p, double t, int steps) {
  const Eigen::MatrixXd qt = rates.transpose();
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = qt * p;
    const Eigen::VectorXd k2 = qt * (p + 0.5 * h * k1);
    const Eigen::VectorXd k3 = qt * (p + 0.5 * h * k2);
    const Eigen::VectorXd k4 = qt * (p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

/// Trapezoidal quadrature of the transient distribution, propagated by a
/// one-step fourth-order transfer matrix. Oracle for occupation_times.
inline Eigen::VectorXd trapezoid_occupation(const Eigen::MatrixXd& rates,
                                            Eigen::VectorXd p, double horizon,
                                            int steps) {
  const double h = horizon / steps;
  const Eigen::MatrixXd qt = rates.transpose();
  const int n = static_cast<int>(rates.rows());
  Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 4; ++k) {
    term = (qt * term) * (h / k);
    step += term;
  }
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd next = step * p;
    occ += (0.5 * h) * (p + next);
    p = next;
  }
  return occ;
}

inline ctbn::ConditionalFamily random_family(int base_dim, int cond_dim,
                                             ctbn::RngStream& rng,
                                             double lo = 0.05,
                                             double hi = 2.0) {
  std::vector<ctbn::Generator> members;
  members.reserve(cond_dim);
  for (int k = 0; k < cond_dim; ++k) {
    members.emplace_back(random_rates(base_dim, rng, lo, hi));
  }
  return ctbn::ConditionalFamily(std::move(members));
}

inline ctbn::Generator two_state(double up, double down) {
  Eigen::MatrixXd m(2, 2);
  m << -up, up, down, -down;
  return ctbn::Generator(m);
}

/// Two-state process whose up/down rates switch with the state of a
/// two-state background component; the background moves at rates (b, g)
/// possibly depending on the foreground state.
inline ctbn::CtbnModel modulated_model(double l1, double mu1, double l2,
                                       double mu2, double b1, double b2,
                                       double g1, double g2) {
  std::vector<ctbn::Generator> x_members{two_state(l1, mu1),
                                         two_state(l2, mu2)};
  std::vector<ctbn::Generator> y_members{two_state(b1, g1),
                                         two_state(b2, g2)};
  return ctbn::CtbnModel(ctbn::ConditionalFamily(std::move(x_members)),
                         ctbn::ConditionalFamily(std::move(y_members)));
}

/// Renders a composite trajectory as a quote series: an X jump to state
/// s becomes an uptick of s ticks, a Y jump a downtick of s ticks, at
/// millisecond-rounded times, with the start price shifted so the whole
/// path stays positive.
inline ctbn::QuoteSeries render_quotes(const ctbn::Trajectory& w, int nx,
                                       double tick_size) {
  long long level = 0;
  long long lowest = 0;
  std::vector<ctbn::Quote> rows;
  rows.push_back({0, 0.0});
  int prev = w.initial();
  for (const auto& event : w.events()) {
    const auto before = ctbn::split_index(prev, nx);
    const auto after = ctbn::split_index(event.state, nx);
    level += after.x != before.x ? static_cast<long long>(after.x)
                                 : -static_cast<long long>(after.y);
    lowest = std::min(lowest, level);
    rows.push_back(
        {std::llround(event.time * 1e3), static_cast<double>(level)});
    prev = event.state;
  }
  const double base =
      static_cast<double>(1 - std::min<long long>(0, lowest));
  for (auto& row : rows) row.price = (base + row.price) * tick_size;
  return ctbn::QuoteSeries(std::move(rows), tick_size);
}

}  // namespace testutil

#endif  // CTBN_TESTS_TESTUTIL_HPP
