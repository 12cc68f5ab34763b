#include "ctbn/tickdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <utility>

#include "ctbn/errors.hpp"
#include "ctbn/rng.hpp"

namespace ctbn {

namespace {

std::string line_tag(std::size_t line) {
  std::ostringstream out;
  out << "line " << line;
  return out.str();
}

// Signed size in ticks of one price change, or nullopt-like 0 if the
// prices agree on the grid.
long long ticks_between(double from, double to, double tick_size,
                        bool* on_grid) {
  const double diff = to - from;
  const long long steps = std::llround(diff / tick_size);
  *on_grid = std::abs(diff - static_cast<double>(steps) * tick_size) <=
             1e-9 * tick_size;
  return steps;
}

struct Change {
  double time = 0.0;  // seconds, collision offsets applied
  long long ticks = 0;
};

// Flattens a series into timed signed changes. Times are seconds from
// the first quote; the k-th change inside one millisecond is shifted by
// k microseconds so times stay strictly increasing.
std::vector<Change> list_changes(const QuoteSeries& quotes) {
  const auto& events = quotes.events();
  std::vector<Change> changes;
  changes.reserve(events.size());
  std::int64_t group_ms = 0;
  int group_index = 0;
  bool have_group = false;
  for (std::size_t i = 1; i < events.size(); ++i) {
    bool on_grid = true;
    const long long steps = ticks_between(
        events[i - 1].price, events[i].price, quotes.tick_size(), &on_grid);
    if (steps == 0) continue;
    const std::int64_t ms = events[i].timestamp_ms;
    if (have_group && ms == group_ms) {
      ++group_index;
      if (group_index >= 1000) {
        throw DataError("TooManyEventsInMillisecond", line_tag(i + 1));
      }
    } else {
      group_ms = ms;
      group_index = 0;
      have_group = true;
    }
    const double base = static_cast<double>(ms - events.front().timestamp_ms);
    changes.push_back({base * 1e-3 + group_index * 1e-6, steps});
  }
  return changes;
}

int capped(long long ticks, int cap) {
  const long long size = ticks < 0 ? -ticks : ticks;
  return static_cast<int>(std::min<long long>(size, cap));
}

}  // namespace

QuoteSeries::QuoteSeries(std::vector<Quote> events, double tick_size)
    : events_(std::move(events)), tick_size_(tick_size) {
  if (!(tick_size_ > 0.0)) {
    throw ValidationError("InvalidTickSize", "tick_size must be positive");
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!(events_[i].price > 0.0)) {
      throw ValidationError("NonPositivePrice", line_tag(i + 1));
    }
    if (i == 0) continue;
    if (events_[i].timestamp_ms < events_[i - 1].timestamp_ms) {
      throw ValidationError("NonMonotoneTime", line_tag(i + 1));
    }
    bool on_grid = true;
    ticks_between(events_[i - 1].price, events_[i].price, tick_size_,
                  &on_grid);
    if (!on_grid) {
      throw ValidationError("OffGridPrice", line_tag(i + 1));
    }
  }
}

void validate(const TickModelConfig& config) {
  if (config.cap < 1) {
    throw ValidationError("InvalidCap", "cap must be at least 1");
  }
  if (!(config.tick_size > 0.0)) {
    throw ValidationError("InvalidTickSize", "tick_size must be positive");
  }
}

ComponentPaths to_component_paths(const QuoteSeries& quotes,
                                  const TickModelConfig& config) {
  validate(config);
  if (std::abs(config.tick_size - quotes.tick_size()) >
      1e-12 * quotes.tick_size()) {
    throw ValidationError("TickSizeMismatch",
                          "config and series disagree on the grid");
  }
  const auto changes = list_changes(quotes);

  // Warm-up: walk until both directions have fired once.
  std::size_t anchor = changes.size();
  bool seen_up = false;
  bool seen_down = false;
  int x0 = 0;
  int y0 = 0;
  for (std::size_t i = 0; i < changes.size(); ++i) {
    if (changes[i].ticks > 0) {
      seen_up = true;
      x0 = capped(changes[i].ticks, config.cap);
    } else {
      seen_down = true;
      y0 = capped(changes[i].ticks, config.cap);
    }
    if (seen_up && seen_down) {
      anchor = i;
      break;
    }
  }
  if (anchor == changes.size()) {
    throw DataError("InsufficientData",
                    "need at least one change in each direction");
  }
  if (anchor + 1 == changes.size()) {
    throw DataError("InsufficientData", "no changes after warm-up");
  }

  const double start = changes[anchor].time;
  const double horizon = changes.back().time - start;
  std::vector<TrajectoryEvent> x_events;
  std::vector<TrajectoryEvent> y_events;
  std::int64_t absorbed = 0;
  int x_state = x0;
  int y_state = y0;
  for (std::size_t i = anchor + 1; i < changes.size(); ++i) {
    const double t = changes[i].time - start;
    const int size = capped(changes[i].ticks, config.cap);
    int& state = changes[i].ticks > 0 ? x_state : y_state;
    auto& events = changes[i].ticks > 0 ? x_events : y_events;
    if (size == state) {
      ++absorbed;
      continue;
    }
    state = size;
    events.push_back({t, size});
  }
  const std::int64_t used =
      static_cast<std::int64_t>(x_events.size() + y_events.size());
  return ComponentPaths{
      Trajectory(config.cap, x0, std::move(x_events), horizon),
      Trajectory(config.cap, y0, std::move(y_events), horizon), used,
      absorbed};
}

QuoteSeries parse_quotes(std::istream& in, double tick_size) {
  if (!(tick_size > 0.0)) {
    throw ValidationError("InvalidTickSize", "tick_size must be positive");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("EmptyInput", "no quote rows");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp_ms,price") {
    throw DataError("MalformedRow", "line 1: expected header "
                                    "\"timestamp_ms,price\"");
  }

  std::vector<Quote> retained;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("MalformedRow", line_tag(lineno));
    }
    Quote quote;
    {
      const char* begin = line.data();
      const char* end = begin + comma;
      const auto parsed = std::from_chars(begin, end, quote.timestamp_ms);
      if (parsed.ec != std::errc{} || parsed.ptr != end) {
        throw DataError("MalformedRow", line_tag(lineno));
      }
    }
    {
      const std::string field = line.substr(comma + 1);
      char* parse_end = nullptr;
      quote.price = std::strtod(field.c_str(), &parse_end);
      if (field.empty() || parse_end != field.c_str() + field.size() ||
          !std::isfinite(quote.price)) {
        throw DataError("MalformedRow", line_tag(lineno));
      }
    }
    if (!(quote.price > 0.0)) {
      throw DataError("MalformedRow",
                      line_tag(lineno) + ": price must be positive");
    }
    if (!retained.empty()) {
      if (quote.timestamp_ms < retained.back().timestamp_ms) {
        throw DataError("NonMonotoneTime", line_tag(lineno));
      }
      bool on_grid = true;
      const long long steps = ticks_between(retained.back().price, quote.price,
                                            tick_size, &on_grid);
      if (!on_grid) {
        throw DataError("OffGridPrice", line_tag(lineno));
      }
      if (steps == 0) continue;
    }
    retained.push_back(quote);
  }
  if (retained.empty()) {
    throw DataError("EmptyInput", "no quote rows");
  }
  return QuoteSeries(std::move(retained), tick_size);
}

std::vector<TickSweepEntry> tick_causality(const QuoteSeries& quotes,
                                           const TickModelConfig& config,
                                           const std::vector<int>& caps) {
  std::vector<int> sweep = caps;
  if (sweep.empty()) sweep.push_back(config.cap);
  std::vector<TickSweepEntry> out;
  out.reserve(sweep.size());
  for (const int cap : sweep) {
    TickModelConfig entry_config = config;
    entry_config.cap = cap;
    const auto paths = to_component_paths(quotes, entry_config);
    const auto joint = combine(paths.x, paths.y, cap);
    out.push_back({cap, build_report_empirical(joint, cap, cap),
                   paths.events_used, paths.events_absorbed});
  }
  return out;
}

QuoteSeries sample_skellam_quotes(double rate_up, double rate_down,
                                  double horizon, double tick_size,
                                  std::uint64_t seed) {
  if (!(rate_up > 0.0) || !(rate_down > 0.0)) {
    throw ValidationError("InvalidRate", "rates must be positive");
  }
  if (!(horizon > 0.0)) {
    throw ValidationError("ZeroHorizon", "horizon must be positive");
  }
  if (!(tick_size > 0.0)) {
    throw ValidationError("InvalidTickSize", "tick_size must be positive");
  }
  RngStream rng(seed, 0);
  const double total = rate_up + rate_down;
  const double up_share = rate_up / total;

  std::vector<std::int64_t> stamps;
  std::vector<long long> levels;
  long long level = 0;
  long long lowest = 0;
  std::int64_t last_ms = 0;  // the initial quote occupies millisecond 0
  double anchor = 0.0;
  while (true) {
    const double t = anchor + rng.exponential(total);
    if (t > horizon) break;
    const std::int64_t ms = std::llround(t * 1e3);
    if (ms <= last_ms) continue;  // redraw from the same arrival anchor
    anchor = t;
    last_ms = ms;
    level += rng.uniform01() < up_share ? 1 : -1;
    lowest = std::min(lowest, level);
    stamps.push_back(ms);
    levels.push_back(level);
  }

  // Shift the whole path up so the lowest quote sits one tick above 0.
  const long long base = 1 - lowest;
  std::vector<Quote> quotes;
  quotes.reserve(stamps.size() + 1);
  quotes.push_back({0, static_cast<double>(base) * tick_size});
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    quotes.push_back(
        {stamps[i], static_cast<double>(base + levels[i]) * tick_size});
  }
  return QuoteSeries(std::move(quotes), tick_size);
}

}  // namespace ctbn
