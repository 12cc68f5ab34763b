#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctbn/causality.hpp"
#include "ctbn/compose.hpp"
#include "ctbn/errors.hpp"
#include "ctbn/estimate.hpp"
#include "ctbn/generator.hpp"
#include "ctbn/io.hpp"
#include "ctbn/rng.hpp"
#include "ctbn/simulate.hpp"
#include "ctbn/tickdata.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

fs::path resolve_out_dir(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("CTBN_OUT_DIR");
    dir = env != nullptr && *env != '\0' ? env : ".";
  }
  fs::path path(dir);
  fs::create_directories(path);
  return path;
}

// Every command drops a manifest next to its artifacts so a run can be
// reproduced exactly (the duration field aside) from the recorded
// parameters and seed.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& parameters, std::uint64_t seed,
                    const std::vector<std::string>& artifacts,
                    std::chrono::steady_clock::time_point started) {
  const double duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();
  json manifest;
  manifest["command"] = command;
  manifest["parameters"] = parameters;
  manifest["seed"] = seed;
  manifest["artifacts"] = artifacts;
  manifest["version"] = kVersion;
  manifest["duration_seconds"] = duration;
  ctbn::atomic_write(out_dir / (command + ".manifest.json"),
                     manifest.dump(2) + "\n");
}

ctbn::CtbnModel load_model(const std::string& path) {
  return ctbn::model_from_json(ctbn::read_file(path));
}

ctbn::ProbabilityVector parse_p0(const std::string& text,
                                 const ctbn::Generator& qw) {
  if (text == "stationary") {
    return ctbn::stationary_distribution(qw);
  }
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    char* end = nullptr;
    const double value = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw ctbn::ValidationError("InvalidDistribution",
                                  "--p0 must be \"stationary\" or a comma "
                                  "list of weights");
    }
    values.push_back(value);
  }
  if (static_cast<int>(values.size()) != qw.n()) {
    throw ctbn::ValidationError("InvalidDistribution",
                                "--p0 length does not match the state count");
  }
  Eigen::VectorXd p0(qw.n());
  for (int i = 0; i < qw.n(); ++i) p0(i) = values[i];
  const double sum = p0.sum();
  if (p0.minCoeff() < 0.0 || std::abs(sum - 1.0) > 1e-6) {
    throw ctbn::ValidationError("InvalidDistribution",
                                "--p0 entries must be nonnegative and sum "
                                "to 1");
  }
  return ctbn::ProbabilityVector(p0 / sum);
}

ctbn::CtbnModel modulated_model(double lambda1, double lambda2, double mu1,
                                double mu2, double beta, double gamma) {
  auto two_state = [](double up, double down) {
    Eigen::MatrixXd rates(2, 2);
    rates << -up, up, down, -down;
    return ctbn::Generator(rates);
  };
  return ctbn::CtbnModel(
      ctbn::ConditionalFamily({two_state(lambda1, mu1),
                               two_state(lambda2, mu2)}),
      ctbn::ConditionalFamily({two_state(beta, gamma),
                               two_state(beta, gamma)}));
}

double quantile(std::vector<double> sorted, double q) {
  const double position = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lower = static_cast<std::size_t>(position);
  if (lower + 1 >= sorted.size()) return sorted.back();
  const double weight = position - static_cast<double>(lower);
  return sorted[lower] * (1.0 - weight) + sorted[lower + 1] * weight;
}

std::string color_hex(int r, int g, int b) {
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
  return buffer;
}

// Structural heatmap of a generator: off-diagonal rates on a log-scaled
// light-to-red ramp, diagonals on a separate dark ramp, zeros left as
// background. The CSV next to it is the authoritative artifact.
std::string heatmap_svg(const Eigen::MatrixXd& rates) {
  const int n = static_cast<int>(rates.rows());
  const int cell = 12;
  const int margin = 4;
  const int size = n * cell + 2 * margin;
  double lo = 0.0;
  double hi = 0.0;
  double diag_hi = 0.0;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    diag_hi = std::max(diag_hi, std::abs(rates(i, i)));
    for (int j = 0; j < n; ++j) {
      if (i == j || rates(i, j) <= 0.0) continue;
      if (!any) {
        lo = hi = rates(i, j);
        any = true;
      } else {
        lo = std::min(lo, rates(i, j));
        hi = std::max(hi, rates(i, j));
      }
    }
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' ' << size
      << "\">\n";
  out << "<rect width=\"" << size << "\" height=\"" << size
      << "\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double value = rates(i, j);
      std::string fill;
      if (i == j) {
        if (value == 0.0) continue;
        const double t = diag_hi > 0.0 ? std::abs(value) / diag_hi : 1.0;
        const int level = static_cast<int>(110.0 - 100.0 * t);
        fill = color_hex(level, level, level);
      } else {
        if (value <= 0.0) continue;
        double t = 1.0;
        if (any && hi > lo) {
          t = (std::log(value) - std::log(lo)) /
              (std::log(hi) - std::log(lo));
        }
        const int red = 255 - static_cast<int>(66.0 * t);
        const int green = 237 - static_cast<int>(237.0 * t);
        const int blue = 160 - static_cast<int>(122.0 * t);
        fill = color_hex(red, green, blue);
      }
      out << "<rect x=\"" << margin + j * cell << "\" y=\""
          << margin + i * cell << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

json stats_json(const ctbn::SufficientStats& stats) {
  return json::parse(ctbn::to_json(stats));
}

json generator_json(const ctbn::Generator& q) {
  return json::parse(ctbn::to_json(q));
}

json report_json(const ctbn::CausalityReport& report) {
  return json::parse(ctbn::to_json(report));
}

std::string report_csv_header(const std::string& key_column) {
  return key_column +
         ",kappa_x_from_y,kappa_y_from_x,avg_c_xy,avg_c_yx,c_x_from_y,"
         "c_y_from_x,bound_x_from_y,bound_y_from_x,horizon";
}

std::string report_csv_row(const ctbn::CausalityReport& report) {
  std::ostringstream row;
  row << format_double(report.kappa_x_from_y) << ','
      << format_double(report.kappa_y_from_x) << ','
      << format_double(report.avg_x_from_y) << ','
      << format_double(report.avg_y_from_x) << ','
      << format_double(report.c_x_from_y) << ','
      << format_double(report.c_y_from_x) << ','
      << format_double(report.bound_x_from_y) << ','
      << format_double(report.bound_y_from_x) << ','
      << format_double(report.horizon);
  return row.str();
}

ctbn::Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ctbn::DataError("ReadFailed", path);
  }
  return ctbn::read_trajectory(in);
}

struct SimulateArgs {
  std::string model;
  std::string p0 = "stationary";
  double horizon = 0.0;
  int replications = 1;
  std::uint64_t seed = 1;
  std::string out;
};

void run_simulate(const SimulateArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  const auto model = load_model(args.model);
  const auto p0 = parse_p0(args.p0, model.qw());
  const ctbn::SimConfig config{args.seed, args.replications, args.horizon};
  ctbn::validate(config);

  int width = 4;
  for (int r = args.replications - 1; r >= 10000; r /= 10) ++width;
  std::vector<std::string> artifacts;
  for (int r = 0; r < args.replications; ++r) {
    const auto traj = ctbn::sample_trajectory(model.qw(), p0, config, r);
    std::ostringstream name;
    name << "traj_";
    name.width(width);
    name.fill('0');
    name << r;
    name << ".txt";
    std::ostringstream body;
    ctbn::write_trajectory(body, traj);
    ctbn::atomic_write(out_dir / name.str(), body.str());
    artifacts.push_back(name.str());
  }
  write_manifest(out_dir, "simulate",
                 json{{"model", args.model},
                      {"p0", args.p0},
                      {"horizon", args.horizon},
                      {"replications", args.replications},
                      {"seed", args.seed},
                      {"out", out_dir.string()}},
                 args.seed, artifacts, started);
}

struct EstimateArgs {
  std::vector<std::string> trajectories;
  int nx = 0;
  int ny = 0;
  std::string out;
};

void run_estimate(const EstimateArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  std::vector<ctbn::Trajectory> joint;
  joint.reserve(args.trajectories.size());
  for (const auto& path : args.trajectories) {
    joint.push_back(load_trajectory(path));
  }
  const auto joint_stats = ctbn::collect_stats(joint);
  if (joint_stats.n() != args.nx * args.ny) {
    throw ctbn::ValidationError(
        "DimensionMismatch",
        "nx*ny does not match the trajectories' state count");
  }

  // Pool per-member conditional statistics and the projected marginals
  // across all input paths.
  std::vector<ctbn::SufficientStats> x_given_y;
  std::vector<ctbn::SufficientStats> y_given_x;
  std::vector<ctbn::Trajectory> x_paths;
  std::vector<ctbn::Trajectory> y_paths;
  for (const auto& traj : joint) {
    auto conditional = ctbn::conditional_stats(traj, args.nx, args.ny);
    if (x_given_y.empty()) {
      x_given_y = std::move(conditional.x_given_y);
      y_given_x = std::move(conditional.y_given_x);
    } else {
      for (std::size_t k = 0; k < x_given_y.size(); ++k) {
        x_given_y[k] = ctbn::merge(x_given_y[k], conditional.x_given_y[k]);
      }
      for (std::size_t k = 0; k < y_given_x.size(); ++k) {
        y_given_x[k] = ctbn::merge(y_given_x[k], conditional.y_given_x[k]);
      }
    }
    auto components = ctbn::project(traj, args.nx);
    x_paths.push_back(std::move(components.first));
    y_paths.push_back(std::move(components.second));
  }

  json output;
  output["nx"] = args.nx;
  output["ny"] = args.ny;
  output["trials"] = joint_stats.trials();
  output["joint"] = {{"stats", stats_json(joint_stats)},
                     {"mle", generator_json(ctbn::mle_generator(joint_stats))}};
  json x_members = json::array();
  for (const auto& stats : x_given_y) {
    x_members.push_back({{"stats", stats_json(stats)},
                         {"mle", generator_json(ctbn::mle_generator(stats))}});
  }
  json y_members = json::array();
  for (const auto& stats : y_given_x) {
    y_members.push_back({{"stats", stats_json(stats)},
                         {"mle", generator_json(ctbn::mle_generator(stats))}});
  }
  output["x_given_y"] = std::move(x_members);
  output["y_given_x"] = std::move(y_members);
  output["marginal_x"] =
      generator_json(ctbn::mle_generator(ctbn::collect_stats(x_paths)));
  output["marginal_y"] =
      generator_json(ctbn::mle_generator(ctbn::collect_stats(y_paths)));
  ctbn::atomic_write(out_dir / "estimate.json", output.dump(2) + "\n");

  write_manifest(out_dir, "estimate",
                 json{{"trajectories", args.trajectories},
                      {"nx", args.nx},
                      {"ny", args.ny},
                      {"out", out_dir.string()}},
                 0, {"estimate.json"}, started);
}

struct CausalityArgs {
  std::string model;
  std::vector<std::string> trajectories;
  std::string p0 = "stationary";
  double horizon = 0.0;
  int nx = 0;
  int ny = 0;
  std::string out;
};

void run_causality(const CausalityArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  json reports = json::array();
  std::string csv = report_csv_header("source") + "\n";
  json parameters{{"out", out_dir.string()}};
  if (!args.model.empty()) {
    const auto model = load_model(args.model);
    const auto p0 = parse_p0(args.p0, model.qw());
    const auto report = ctbn::build_report(model, p0, args.horizon);
    reports.push_back(report_json(report));
    csv += "model," + report_csv_row(report) + "\n";
    parameters["model"] = args.model;
    parameters["p0"] = args.p0;
    parameters["horizon"] = args.horizon;
  } else {
    for (const auto& path : args.trajectories) {
      const auto traj = load_trajectory(path);
      const auto report =
          ctbn::build_report_empirical(traj, args.nx, args.ny);
      reports.push_back(report_json(report));
      csv += path + "," + report_csv_row(report) + "\n";
    }
    parameters["trajectories"] = args.trajectories;
    parameters["nx"] = args.nx;
    parameters["ny"] = args.ny;
  }
  ctbn::atomic_write(out_dir / "report.json", reports.dump(2) + "\n");
  ctbn::atomic_write(out_dir / "report.csv", csv);
  write_manifest(out_dir, "causality", parameters, 0,
                 {"report.json", "report.csv"}, started);
}

struct StudyArgs {
  double lambda1 = 1.0;
  double lambda2 = 3.0;
  double mu1 = 2.0;
  double mu2 = 4.0;
  double beta = 0.5;
  double gamma = 0.7;
  double horizon = 1e4;
  int replications = 1000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_modulated_study(const StudyArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  const auto model = modulated_model(args.lambda1, args.lambda2, args.mu1,
                                     args.mu2, args.beta, args.gamma);
  const auto p0 = ctbn::stationary_distribution(model.qw());
  const ctbn::SimConfig config{args.seed, args.replications, args.horizon};
  ctbn::validate(config);

  std::vector<double> c_xy(args.replications);
  std::vector<double> c_yx(args.replications);
  std::string estimates = "replication,c_x_from_y,c_y_from_x\n";
  for (int r = 0; r < args.replications; ++r) {
    const auto w = ctbn::sample_trajectory(model.qw(), p0, config, r);
    c_xy[r] = ctbn::empirical_causality(w, 2, 2, ctbn::Direction::XfromY);
    c_yx[r] = ctbn::empirical_causality(w, 2, 2, ctbn::Direction::YfromX);
    estimates += std::to_string(r) + ',' + format_double(c_xy[r]) + ',' +
                 format_double(c_yx[r]) + '\n';
  }
  ctbn::atomic_write(out_dir / "estimates.csv", estimates);

  const double top =
      std::max(*std::max_element(c_xy.begin(), c_xy.end()),
               *std::max_element(c_yx.begin(), c_yx.end()));
  const int bins = 40;
  const double width = top > 0.0 ? top / bins : 1.0;
  std::vector<int> hist_xy(bins, 0);
  std::vector<int> hist_yx(bins, 0);
  auto bin_of = [&](double value) {
    return std::min(bins - 1, static_cast<int>(value / width));
  };
  for (int r = 0; r < args.replications; ++r) {
    ++hist_xy[bin_of(c_xy[r])];
    ++hist_yx[bin_of(c_yx[r])];
  }
  std::string histogram = "bin_low,bin_high,count_x_from_y,count_y_from_x\n";
  for (int b = 0; b < bins; ++b) {
    histogram += format_double(b * width) + ',' +
                 format_double((b + 1) * width) + ',' +
                 std::to_string(hist_xy[b]) + ',' +
                 std::to_string(hist_yx[b]) + '\n';
  }
  ctbn::atomic_write(out_dir / "histogram.csv", histogram);

  auto summarize = [](std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    json side;
    side["mean"] = mean;
    side["quantiles"] = {
        {"p00", values.front()},          {"p05", quantile(values, 0.05)},
        {"p25", quantile(values, 0.25)},  {"p50", quantile(values, 0.50)},
        {"p75", quantile(values, 0.75)},  {"p95", quantile(values, 0.95)},
        {"p100", values.back()}};
    return side;
  };
  json summary;
  summary["replications"] = args.replications;
  summary["horizon"] = args.horizon;
  summary["c_x_from_y"] = summarize(c_xy);
  summary["c_y_from_x"] = summarize(c_yx);
  summary["model_avg_x_from_y"] =
      ctbn::causality(model, p0, args.horizon, ctbn::Direction::XfromY) /
      args.horizon;
  summary["model_avg_y_from_x"] =
      ctbn::causality(model, p0, args.horizon, ctbn::Direction::YfromX) /
      args.horizon;
  ctbn::atomic_write(out_dir / "summary.json", summary.dump(2) + "\n");

  write_manifest(out_dir, "modulated-study",
                 json{{"lambda1", args.lambda1},
                      {"lambda2", args.lambda2},
                      {"mu1", args.mu1},
                      {"mu2", args.mu2},
                      {"beta", args.beta},
                      {"gamma", args.gamma},
                      {"horizon", args.horizon},
                      {"replications", args.replications},
                      {"seed", args.seed},
                      {"out", out_dir.string()}},
                 args.seed, {"estimates.csv", "histogram.csv", "summary.json"},
                 started);
}

struct TickArgs {
  std::string quotes;
  double tick_size = 0.0;
  std::vector<int> caps;
  std::string out;
};

void run_tick(const TickArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  std::ifstream in(args.quotes);
  if (!in) {
    throw ctbn::DataError("ReadFailed", args.quotes);
  }
  const auto quotes = ctbn::parse_quotes(in, args.tick_size);
  std::vector<int> caps = args.caps;
  if (caps.empty()) caps.push_back(20);

  json reports = json::array();
  std::string summary =
      "M,kappa_x_from_y,kappa_y_from_x,avg_c_xy,avg_c_yx,events_used,"
      "events_absorbed\n";
  std::vector<std::string> artifacts;
  for (const int cap : caps) {
    const ctbn::TickModelConfig config{cap, args.tick_size};
    const auto paths = ctbn::to_component_paths(quotes, config);
    const auto joint = ctbn::combine(paths.x, paths.y, cap);
    const auto report = ctbn::build_report_empirical(joint, cap, cap);
    const auto qw_hat = ctbn::mle_generator(ctbn::collect_stats({joint}));

    json entry;
    entry["cap"] = cap;
    entry["events_used"] = paths.events_used;
    entry["events_absorbed"] = paths.events_absorbed;
    entry["report"] = report_json(report);
    reports.push_back(std::move(entry));

    std::ostringstream row;
    row << cap << ',' << format_double(report.kappa_x_from_y) << ','
        << format_double(report.kappa_y_from_x) << ','
        << format_double(report.avg_x_from_y) << ','
        << format_double(report.avg_y_from_x) << ',' << paths.events_used
        << ',' << paths.events_absorbed << '\n';
    summary += row.str();

    const std::string csv_name = "qw_M" + std::to_string(cap) + ".csv";
    const std::string svg_name = "qw_M" + std::to_string(cap) + ".svg";
    ctbn::atomic_write(out_dir / csv_name, ctbn::to_csv(qw_hat.rates()));
    ctbn::atomic_write(out_dir / svg_name, heatmap_svg(qw_hat.rates()));
    artifacts.push_back(csv_name);
    artifacts.push_back(svg_name);
  }
  ctbn::atomic_write(out_dir / "reports.json", reports.dump(2) + "\n");
  ctbn::atomic_write(out_dir / "summary.csv", summary);
  artifacts.push_back("reports.json");
  artifacts.push_back("summary.csv");

  write_manifest(out_dir, "tick",
                 json{{"quotes", args.quotes},
                      {"tick_size", args.tick_size},
                      {"caps", caps},
                      {"out", out_dir.string()}},
                 0, artifacts, started);
}

struct SkellamArgs {
  double rate_up = 1.0;
  double rate_down = 1.0;
  double horizon = 1e4;
  double tick_size = 0.0001;
  std::uint64_t seed = 1;
  std::string out;
};

void run_skellam(const SkellamArgs& args) {
  const auto started = std::chrono::steady_clock::now();
  const auto out_dir = resolve_out_dir(args.out);
  const auto series = ctbn::sample_skellam_quotes(
      args.rate_up, args.rate_down, args.horizon, args.tick_size, args.seed);
  std::string csv = "timestamp_ms,price\n";
  for (const auto& quote : series.events()) {
    csv += std::to_string(quote.timestamp_ms) + ',' +
           format_double(quote.price) + '\n';
  }
  ctbn::atomic_write(out_dir / "quotes.csv", csv);
  write_manifest(out_dir, "skellam",
                 json{{"rate_up", args.rate_up},
                      {"rate_down", args.rate_down},
                      {"horizon", args.horizon},
                      {"tick_size", args.tick_size},
                      {"seed", args.seed},
                      {"out", out_dir.string()}},
                 args.seed, {"quotes.csv"}, started);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-component continuous-time Markov toolkit"};
  app.require_subcommand(1);

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Sample joint trajectories from a model file");
  simulate->add_option("--model", simulate_args.model, "Model JSON file")
      ->required();
  simulate->add_option("--p0", simulate_args.p0,
                       "Initial distribution: \"stationary\" or comma list");
  simulate->add_option("--horizon", simulate_args.horizon, "Time horizon")
      ->required();
  simulate->add_option("--replications", simulate_args.replications,
                       "Number of independent paths");
  simulate->add_option("--seed", simulate_args.seed, "RNG seed");
  simulate->add_option("--out", simulate_args.out, "Output directory");
  simulate->callback([&] { run_simulate(simulate_args); });

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand(
      "estimate", "Fit generators from trajectory files");
  estimate
      ->add_option("--trajectories", estimate_args.trajectories,
                   "Trajectory files")
      ->required()
      ->expected(-1);
  estimate->add_option("--nx", estimate_args.nx, "States of component X")
      ->required();
  estimate->add_option("--ny", estimate_args.ny, "States of component Y")
      ->required();
  estimate->add_option("--out", estimate_args.out, "Output directory");
  estimate->callback([&] { run_estimate(estimate_args); });

  CausalityArgs causality_args;
  auto* causality = app.add_subcommand(
      "causality", "Directional causality report, exact or plug-in");
  auto* model_opt =
      causality->add_option("--model", causality_args.model,
                            "Model JSON file (exact report)");
  auto* traj_opt = causality->add_option("--trajectories",
                                         causality_args.trajectories,
                                         "Trajectory files (plug-in report)");
  traj_opt->expected(-1)->excludes(model_opt);
  causality->add_option("--p0", causality_args.p0,
                        "Initial distribution for the exact report");
  causality->add_option("--horizon", causality_args.horizon,
                        "Horizon for the exact report");
  causality->add_option("--nx", causality_args.nx, "States of component X");
  causality->add_option("--ny", causality_args.ny, "States of component Y");
  causality->add_option("--out", causality_args.out, "Output directory");
  causality->callback([&] {
    if (causality_args.model.empty() && causality_args.trajectories.empty()) {
      throw CLI::RequiredError("--model or --trajectories");
    }
    if (!causality_args.model.empty() && causality_args.horizon <= 0.0) {
      throw CLI::RequiredError("--horizon");
    }
    if (!causality_args.trajectories.empty() &&
        (causality_args.nx < 1 || causality_args.ny < 1)) {
      throw CLI::RequiredError("--nx/--ny");
    }
    run_causality(causality_args);
  });

  StudyArgs study_args;
  auto* study = app.add_subcommand(
      "modulated-study",
      "Replicated plug-in causality for the rate-modulated two-state model");
  study->add_option("--lambda1", study_args.lambda1,
                    "X up-rate while Y is in state 1");
  study->add_option("--lambda2", study_args.lambda2,
                    "X up-rate while Y is in state 2");
  study->add_option("--mu1", study_args.mu1,
                    "X down-rate while Y is in state 1");
  study->add_option("--mu2", study_args.mu2,
                    "X down-rate while Y is in state 2");
  study->add_option("--beta", study_args.beta, "Y up-rate (shared)");
  study->add_option("--gamma", study_args.gamma, "Y down-rate (shared)");
  study->add_option("--horizon", study_args.horizon, "Per-path horizon");
  study->add_option("--replications", study_args.replications,
                    "Number of paths");
  study->add_option("--seed", study_args.seed, "RNG seed");
  study->add_option("--out", study_args.out, "Output directory");
  study->callback([&] { run_modulated_study(study_args); });

  TickArgs tick_args;
  auto* tick = app.add_subcommand(
      "tick", "Causality sweep and estimated generator from quote data");
  tick->add_option("--quotes", tick_args.quotes, "Quote CSV file")
      ->required();
  tick->add_option("--tick-size", tick_args.tick_size, "Price grid step")
      ->required();
  tick->add_option("--cap", tick_args.caps,
                   "Jump-size cap; repeat for a sweep");
  tick->add_option("--out", tick_args.out, "Output directory");
  tick->callback([&] { run_tick(tick_args); });

  SkellamArgs skellam_args;
  auto* skellam = app.add_subcommand(
      "skellam", "Generate a synthetic two-stream difference quote series");
  skellam->add_option("--rate-up", skellam_args.rate_up, "Uptick intensity");
  skellam->add_option("--rate-down", skellam_args.rate_down,
                      "Downtick intensity");
  skellam->add_option("--horizon", skellam_args.horizon, "Length in seconds");
  skellam->add_option("--tick-size", skellam_args.tick_size,
                      "Price grid step");
  skellam->add_option("--seed", skellam_args.seed, "RNG seed");
  skellam->add_option("--out", skellam_args.out, "Output directory");
  skellam->callback([&] { run_skellam(skellam_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  } catch (const ctbn::ValidationError& error) {
    std::cerr << error.what() << '\n';
    return 2;
  } catch (const ctbn::DataError& error) {
    std::cerr << error.what() << '\n';
    return 3;
  } catch (const ctbn::InternalError& error) {
    std::cerr << error.what() << '\n';
    return 4;
  } catch (const std::exception& error) {
    std::cerr << error.what() << '\n';
    return 4;
  }
  return 0;
}
