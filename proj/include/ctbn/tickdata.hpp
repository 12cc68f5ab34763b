#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ctbn/causality.hpp"
#include "ctbn/simulate.hpp"

namespace ctbn {

/// One quoted price at millisecond resolution.
struct Quote {
  std::int64_t timestamp_ms = 0;
  double price = 0.0;
};

/// A price series on a fixed tick grid.
///
/// Timestamps are nondecreasing, prices are positive, and every change
/// between consecutive rows is a whole number of ticks (within
/// 1e-9 tick). Rows with repeated prices are legal here; parse_quotes
/// drops them so that downstream code sees changes only.
class QuoteSeries {
 public:
  QuoteSeries(std::vector<Quote> events, double tick_size);

  const std::vector<Quote>& events() const { return events_; }
  double tick_size() const { return tick_size_; }

 private:
  std::vector<Quote> events_;
  double tick_size_;
};

/// How quotes map onto the two-component jump-size model.
struct TickModelConfig {
  int cap = 20;            // largest modeled jump size in ticks
  double tick_size = 0.0;  // price grid spacing
};

void validate(const TickModelConfig& config);

/// Uptick and downtick size paths extracted from a quote series.
///
/// x tracks the size of the most recent uptick and y the most recent
/// downtick, both in ticks and capped at config.cap, so each path lives
/// on states 1..cap. Time is measured in seconds from the end of the
/// warm-up prefix, the stretch before both directions have ticked at
/// least once; the warm-up itself only fixes the initial states.
/// Changes sharing a millisecond are spread one microsecond apart to
/// keep jump times distinct. A change that repeats the current size in
/// its direction cannot appear as a self-jump, so it extends the
/// holding time instead; events_absorbed counts those.
struct ComponentPaths {
  Trajectory x;
  Trajectory y;
  std::int64_t events_used = 0;
  std::int64_t events_absorbed = 0;
};

ComponentPaths to_component_paths(const QuoteSeries& quotes,
                                  const TickModelConfig& config);

/// Reads CSV rows "timestamp_ms,price" under that exact header into a
/// change-only series; consecutive rows with an unchanged price are
/// dropped. Grid and ordering violations name the offending line.
QuoteSeries parse_quotes(std::istream& in, double tick_size);

struct TickSweepEntry {
  int cap = 0;
  CausalityReport report;
  std::int64_t events_used = 0;
  std::int64_t events_absorbed = 0;
};

/// Runs the whole pipeline (component paths, joint path, plug-in
/// report) once per requested cap. An empty cap list means the single
/// cap from config.
std::vector<TickSweepEntry> tick_causality(const QuoteSeries& quotes,
                                           const TickModelConfig& config,
                                           const std::vector<int>& caps);

/// Samples the difference of two independent one-tick Poisson streams
/// over [0, horizon] seconds, quoted at millisecond resolution. The
/// starting price is shifted so the whole path stays positive, and an
/// arrival landing in an occupied millisecond is redrawn, so timestamps
/// are strictly increasing.
QuoteSeries sample_skellam_quotes(double rate_up, double rate_down,
                                  double horizon, double tick_size,
                                  std::uint64_t seed);

}  // namespace ctbn
