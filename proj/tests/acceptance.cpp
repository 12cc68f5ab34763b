// End-to-end acceptance checks. Each check prints one PASS/FAIL line with
// its wall time; the process exits nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ctbn/causality.hpp"
#include "ctbn/compose.hpp"
#include "ctbn/estimate.hpp"
#include "ctbn/generator.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/tickdata.hpp"
#include "testutil.hpp"

namespace {

using ctbn::ConditionalFamily;
using ctbn::CtbnModel;
using ctbn::Direction;
using ctbn::Generator;
using ctbn::ProbabilityVector;
using ctbn::RngStream;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<Outcome()> body;
};

Outcome fail(const std::string& detail) { return {false, detail}; }

Outcome pass() { return {true, ""}; }

std::string num(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

ProbabilityVector uniform(int n) {
  return ProbabilityVector(Eigen::VectorXd::Constant(n, 1.0 / n));
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double position = q * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lower = static_cast<std::size_t>(position);
  if (lower + 1 >= values.size()) return values.back();
  const double weight = position - static_cast<double>(lower);
  return values[lower] * (1.0 - weight) + values[lower + 1] * weight;
}

// The running example: a two-state process whose rates switch with a
// two-state background, composed into a 4x4 joint generator.
CtbnModel bench_model(double beta1, double beta2, double gamma1,
                      double gamma2) {
  return testutil::modulated_model(1, 2, 3, 4, beta1, beta2, gamma1, gamma2);
}

Outcome golden_composition() {
  const auto model = bench_model(0.5, 0.6, 0.7, 0.8);
  Eigen::MatrixXd expected(4, 4);
  expected << -1.5, 1.0, 0.5, 0.0,
               2.0, -2.6, 0.0, 0.6,
               0.7, 0.0, -3.7, 3.0,
               0.0, 0.8, 4.0, -4.8;
  const auto& qw = model.qw().rates();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (qw(i, j) != expected(i, j)) {
        return fail("entry (" + std::to_string(i + 1) + "," +
                    std::to_string(j + 1) + ") is " + num(qw(i, j)) +
                    ", expected " + num(expected(i, j)));
      }
    }
  }
  return pass();
}

Outcome swap_equivalence() {
  const auto model = bench_model(0.5, 0.6, 0.7, 0.8);
  const CtbnModel swapped(model.y_given_x(), model.x_given_y());
  const auto perm = ctbn::swap_permutation(2, 2);
  if (perm != std::vector<int>{1, 3, 2, 4}) {
    return fail("unexpected swap permutation");
  }
  if (!ctbn::verify_equivalence(model.qw(), swapped.qw(), perm)) {
    return fail("swap permutation does not map one composition onto the "
                "other");
  }
  return pass();
}

Outcome index_round_trip() {
  for (int nx = 1; nx <= 50; ++nx) {
    for (int ny = 1; ny <= 50; ++ny) {
      for (int w = 1; w <= nx * ny; ++w) {
        const auto s = ctbn::split_index(w, nx);
        if (s.x < 1 || s.x > nx || s.y < 1 || s.y > ny ||
            ctbn::composite_index(s.x, s.y, nx) != w) {
          return fail("round trip broke at nx=" + std::to_string(nx) +
                      " ny=" + std::to_string(ny) +
                      " w=" + std::to_string(w));
        }
      }
    }
  }
  return pass();
}

Outcome joint_sparsity() {
  RngStream rng(14001, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int nx = 2 + static_cast<int>(rng.uniform01() * 4);
    const int ny = 2 + static_cast<int>(rng.uniform01() * 4);
    const CtbnModel model(testutil::random_family(nx, ny, rng),
                          testutil::random_family(ny, nx, rng));
    const auto& qw = model.qw().rates();
    for (int w = 1; w <= nx * ny; ++w) {
      const auto from = ctbn::split_index(w, nx);
      for (int v = 1; v <= nx * ny; ++v) {
        const auto to = ctbn::split_index(v, nx);
        if (from.x != to.x && from.y != to.y &&
            qw(w - 1, v - 1) != 0.0) {
          return fail("double-coordinate entry nonzero in trial " +
                      std::to_string(trial));
        }
      }
      const double expected =
          model.x_given_y().member(from.y).rates()(from.x - 1, from.x - 1) +
          model.y_given_x().member(from.x).rates()(from.y - 1, from.y - 1);
      if (std::abs(qw(w - 1, w - 1) - expected) > 1e-12) {
        return fail("diagonal additivity off by " +
                    num(std::abs(qw(w - 1, w - 1) - expected)));
      }
    }
  }
  return pass();
}

Outcome kl_monte_carlo() {
  const Generator q0(testutil::two_state(1, 1));
  const Generator q(testutil::two_state(2, 2));
  const ctbn::OccupationVector occ(Eigen::Vector2d(0.5, 0.5), 1.0);
  const double closed = ctbn::kl_divergence(q0, q, occ);
  const double reference = 1.0 - std::log(2.0);
  if (std::abs(closed - reference) > 1e-12) {
    return fail("closed form is " + num(closed) + ", expected " +
                num(reference));
  }
  const int paths = 10000;
  const ctbn::SimConfig config{15001, paths, 1.0};
  double mean = 0.0;
  double square = 0.0;
  for (int r = 0; r < paths; ++r) {
    const auto traj = ctbn::sample_trajectory(q0, uniform(2), config, r);
    const auto stats = ctbn::collect_stats({traj});
    const double ratio =
        ctbn::log_likelihood(stats, q0) - ctbn::log_likelihood(stats, q);
    mean += ratio;
    square += ratio * ratio;
  }
  mean /= paths;
  const double variance = (square - paths * mean * mean) / (paths - 1);
  const double se = std::sqrt(variance / paths);
  if (std::abs(mean - closed) > 3.0 * se) {
    return fail("Monte Carlo mean " + num(mean) + " vs closed form " +
                num(closed) + " exceeds 3 standard errors (" + num(se) +
                ")");
  }
  return pass();
}

Outcome local_independence_zero() {
  RngStream rng(16001, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int nx = 2 + static_cast<int>(rng.uniform01() * 3);
    const int ny = 2 + static_cast<int>(rng.uniform01() * 3);
    // Identical conditional blocks: zero causality.
    const Generator shared(testutil::random_rates(nx, rng));
    std::vector<Generator> members(ny, shared);
    const CtbnModel flat(ConditionalFamily(members),
                         testutil::random_family(ny, nx, rng));
    const auto p0 = ctbn::stationary_distribution(flat.qw());
    const double zero = ctbn::causality(flat, p0, 1.0, Direction::XfromY);
    if (zero > 1e-12) {
      return fail("identical blocks gave causality " + num(zero));
    }
    // Perturb one block entry by at least 0.1: strictly positive.
    auto bumped = shared.rates();
    const int i = static_cast<int>(rng.uniform01() * nx);
    const int j = (i + 1) % nx;
    bumped(i, j) += 0.1 + rng.uniform01();
    bumped(i, i) = 0.0;
    bumped(i, i) = -bumped.row(i).sum();
    members[static_cast<std::size_t>(rng.uniform01() * ny)] =
        Generator(bumped);
    const CtbnModel tilted(ConditionalFamily(members),
                           testutil::random_family(ny, nx, rng));
    const auto p1 = ctbn::stationary_distribution(tilted.qw());
    const double positive =
        ctbn::causality(tilted, p1, 1.0, Direction::XfromY);
    if (!(positive > 0.0)) {
      return fail("perturbed block gave causality " + num(positive));
    }
  }
  return pass();
}

Outcome bound_domination() {
  RngStream rng(17001, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int nx = 2 + static_cast<int>(rng.uniform01() * 3);
    const int ny = 2 + static_cast<int>(rng.uniform01() * 3);
    const CtbnModel model(testutil::random_family(nx, ny, rng),
                          testutil::random_family(ny, nx, rng));
    const auto p0 = ctbn::stationary_distribution(model.qw());
    for (const auto direction : {Direction::XfromY, Direction::YfromX}) {
      const double avg = ctbn::causality(model, p0, 1.0, direction);
      const double bound = ctbn::causality_bound(model, direction, p0, 1.0);
      if (avg - bound > 1e-9) {
        return fail("average " + num(avg) + " exceeds bound " + num(bound) +
                    " in trial " + std::to_string(trial));
      }
    }
  }
  return pass();
}

Outcome calibration_equation() {
  if (ctbn::kl_calibration(0.0) != 0.5) {
    return fail("calibration at 0 is not exactly 1/2");
  }
  double last = 0.0;
  for (int step = 0; step <= 1000; ++step) {
    const double x = 10.0 * step / 1000.0;
    const double kappa = ctbn::kl_calibration(x);
    const double complement = ctbn::kl_calibration_complement(x);
    const double recovered =
        -0.5 * (std::log(2.0 * kappa) + std::log(2.0 * complement));
    if (std::abs(recovered - x) > 1e-10) {
      return fail("defining equation off by " +
                  num(std::abs(recovered - x)) + " at x=" + num(x));
    }
    if (step > 0 && !(kappa > last)) {
      return fail("calibration is not strictly increasing at x=" + num(x));
    }
    last = kappa;
  }
  return pass();
}

Outcome modulated_separation() {
  const auto model = bench_model(0.5, 0.5, 0.7, 0.7);
  const auto p0 = ctbn::stationary_distribution(model.qw());
  const int replications = 200;
  const ctbn::SimConfig config{19001, replications, 1e4};
  std::vector<double> c_xy(replications);
  std::vector<double> c_yx(replications);
  for (int r = 0; r < replications; ++r) {
    const auto w = ctbn::sample_trajectory(model.qw(), p0, config, r);
    c_xy[r] = ctbn::empirical_causality(w, 2, 2, Direction::XfromY);
    c_yx[r] = ctbn::empirical_causality(w, 2, 2, Direction::YfromX);
  }
  const double upper_null = quantile(c_yx, 0.95);
  const double lower_signal = quantile(c_xy, 0.05);
  if (!(upper_null < lower_signal)) {
    return fail("95th percentile of the silent direction (" +
                num(upper_null) + ") is not below the 5th percentile of "
                "the driven direction (" + num(lower_signal) + ")");
  }
  return pass();
}

Outcome occupation_unbiased() {
  const Generator chain(testutil::two_state(1, 2));
  const double horizon = 100.0;
  Eigen::Vector2d start(1.0, 0.0);
  const ProbabilityVector p0(start);
  const auto exact = ctbn::occupation_times(chain, p0, horizon);
  const double expected = exact[1] / horizon;
  const int replications = 1000;
  const ctbn::SimConfig config{20001, replications, horizon};
  double mean = 0.0;
  double square = 0.0;
  for (int r = 0; r < replications; ++r) {
    const auto traj = ctbn::sample_trajectory(chain, p0, config, r);
    const auto stats = ctbn::collect_stats({traj});
    const double fraction = stats.occupation()(0) / horizon;
    mean += fraction;
    square += fraction * fraction;
  }
  mean /= replications;
  const double variance =
      (square - replications * mean * mean) / (replications - 1);
  const double se = std::sqrt(variance / replications);
  if (std::abs(mean - expected) > 4.0 * se) {
    return fail("sample mean " + num(mean) + " vs expected " +
                num(expected) + " exceeds 4 standard errors");
  }
  if (variance > 1.0 / (2.0 * horizon)) {
    return fail("sample variance " + num(variance) +
                " exceeds 1/(2T) = " + num(1.0 / (2.0 * horizon)));
  }
  return pass();
}

Outcome mle_consistency() {
  Eigen::MatrixXd rates(3, 3);
  rates << -1.2, 0.8, 0.4,
            0.3, -0.8, 0.5,
            0.6, 0.9, -1.5;
  const Generator truth(rates);
  RngStream rng(21001, 0);
  const auto traj = ctbn::sample_trajectory(truth, uniform(3), 1e5, rng);
  const auto stats = ctbn::collect_stats({traj});
  const auto fitted = ctbn::mle_generator(stats);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double tolerance =
          4.0 * std::sqrt(rates(i, j) / stats.occupation()(i));
      if (std::abs(fitted.rates()(i, j) - rates(i, j)) > tolerance) {
        return fail("rate (" + std::to_string(i + 1) + "," +
                    std::to_string(j + 1) + ") estimated as " +
                    num(fitted.rates()(i, j)) + ", truth " +
                    num(rates(i, j)) + ", tolerance " + num(tolerance));
      }
    }
  }
  return pass();
}

Outcome tick_null_and_planted() {
  const double tick = 0.0001;
  // Null: difference of independent one-tick streams, cap 1.
  const int null_runs = 200;
  std::vector<double> kappa_xy(null_runs);
  std::vector<double> kappa_yx(null_runs);
  for (int r = 0; r < null_runs; ++r) {
    const auto series = ctbn::sample_skellam_quotes(
        1.0, 1.0, 1e4, tick, 22001 + static_cast<std::uint64_t>(r));
    const auto entries = ctbn::tick_causality(
        series, ctbn::TickModelConfig{1, tick}, {1});
    kappa_xy[r] = entries[0].report.kappa_x_from_y;
    kappa_yx[r] = entries[0].report.kappa_y_from_x;
  }
  const double median_xy = quantile(kappa_xy, 0.5);
  const double median_yx = quantile(kappa_yx, 0.5);
  if (median_xy > 0.55 || median_yx > 0.55) {
    return fail("null medians " + num(median_xy) + "/" + num(median_yx) +
                " exceed 0.55");
  }
  // Planted coupling: the modulated model rendered as tick data must be
  // called in the right direction nearly always.
  const auto model = bench_model(0.5, 0.5, 0.7, 0.7);
  const auto p0 = ctbn::stationary_distribution(model.qw());
  const int planted_runs = 100;
  const ctbn::SimConfig config{23001, planted_runs, 2e3};
  int recovered = 0;
  for (int r = 0; r < planted_runs; ++r) {
    const auto w = ctbn::sample_trajectory(model.qw(), p0, config, r);
    const auto series = testutil::render_quotes(w, 2, tick);
    const auto entries = ctbn::tick_causality(
        series, ctbn::TickModelConfig{2, tick}, {2});
    if (entries[0].report.kappa_x_from_y >
        entries[0].report.kappa_y_from_x) {
      ++recovered;
    }
  }
  if (recovered < 95) {
    return fail("planted coupling recovered in only " +
                std::to_string(recovered) + "/100 runs");
  }
  return pass();
}

Outcome occupation_quadrature() {
  RngStream rng(24001, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 19);
    const Generator q(testutil::random_rates(n, rng));
    Eigen::VectorXd weights(n);
    for (int i = 0; i < n; ++i) weights(i) = 0.1 + rng.uniform01();
    const ProbabilityVector p0(weights / weights.sum());
    const double horizon = 2.0;
    const auto exact = ctbn::occupation_times(q, p0, horizon);
    const auto numeric =
        testutil::trapezoid_occupation(q.rates(), p0.values(), horizon,
                                       100000);
    for (int i = 0; i < n; ++i) {
      if (std::abs(exact[i + 1] - numeric(i)) > 1e-6 * horizon) {
        return fail("state " + std::to_string(i + 1) + " off by " +
                    num(std::abs(exact[i + 1] - numeric(i))) +
                    " in trial " + std::to_string(trial));
      }
    }
  }
  return pass();
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"golden-composition", golden_composition},
      {"swap-equivalence", swap_equivalence},
      {"index-round-trip", index_round_trip},
      {"joint-sparsity", joint_sparsity},
      {"kl-monte-carlo", kl_monte_carlo},
      {"local-independence-zero", local_independence_zero},
      {"bound-domination", bound_domination},
      {"calibration-equation", calibration_equation},
      {"modulated-separation", modulated_separation},
      {"occupation-unbiased", occupation_unbiased},
      {"mle-consistency", mle_consistency},
      {"tick-null-and-planted", tick_null_and_planted},
      {"occupation-quadrature", occupation_quadrature},
  };
  int failures = 0;
  for (const auto& check : checks) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check.body();
    } catch (const std::exception& error) {
      outcome = fail(std::string("exception: ") + error.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    if (outcome.pass) {
      std::printf("[PASS] %-26s (%.2f s)\n", check.name.c_str(), seconds);
    } else {
      ++failures;
      std::printf("[FAIL] %-26s (%.2f s): %s\n", check.name.c_str(), seconds,
                  outcome.detail.c_str());
    }
  }
  std::printf("acceptance: %zu passed, %d failed\n",
              checks.size() - static_cast<std::size_t>(failures), failures);
  return failures == 0 ? 0 : 1;
}
