#include "ctbn/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "ctbn/errors.hpp"
#include "json.hpp"

namespace ctbn {

namespace {

using nlohmann::json;

std::string detail_of(const Error& error) {
  const std::string text = error.what();
  const std::string prefix = error.name() + ": ";
  return text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& error) {
    throw DataError("MalformedJson", error.what());
  }
}

const json& field(const json& object, const char* key) {
  if (!object.is_object()) {
    throw DataError("SchemaMismatch", "expected a JSON object");
  }
  const auto it = object.find(key);
  if (it == object.end()) {
    throw DataError("SchemaMismatch", std::string("missing field ") + key);
  }
  return *it;
}

template <typename T>
T field_as(const json& object, const char* key) {
  try {
    return field(object, key).get<T>();
  } catch (const json::exception& error) {
    throw DataError("SchemaMismatch", std::string(key) + ": " + error.what());
  }
}

template <typename Matrix>
json matrix_to_json(const Matrix& matrix) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      row.push_back(matrix(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Matrix>
Matrix matrix_from_json(const json& object, const char* key) {
  const json& rows = field(object, key);
  if (!rows.is_array() || rows.empty() || !rows.front().is_array() ||
      rows.front().empty()) {
    throw DataError("SchemaMismatch",
                    std::string(key) + ": expected a nonempty matrix");
  }
  const Eigen::Index cols = static_cast<Eigen::Index>(rows.front().size());
  Matrix out(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DataError("SchemaMismatch", std::string(key) + ": ragged rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      try {
        out(i, j) = row[static_cast<std::size_t>(j)]
                        .get<typename Matrix::Scalar>();
      } catch (const json::exception& error) {
        throw DataError("SchemaMismatch",
                        std::string(key) + ": " + error.what());
      }
    }
  }
  return out;
}

json family_to_json(const ConditionalFamily& family) {
  json members = json::array();
  for (int k = 1; k <= family.cond_dim(); ++k) {
    members.push_back(matrix_to_json(family.member(k).rates()));
  }
  return members;
}

ConditionalFamily family_from_json(const json& object, const char* key) {
  const json& members = field(object, key);
  if (!members.is_array() || members.empty()) {
    throw DataError("SchemaMismatch",
                    std::string(key) + ": expected an array of matrices");
  }
  std::vector<Generator> parsed;
  parsed.reserve(members.size());
  json wrapper;
  for (const json& member : members) {
    wrapper["member"] = member;
    parsed.emplace_back(matrix_from_json<Eigen::MatrixXd>(wrapper, "member"));
  }
  return ConditionalFamily(std::move(parsed));
}

std::string dump(const json& object) { return object.dump(2) + "\n"; }

}  // namespace

std::string to_json(const Generator& q) {
  json object;
  object["n"] = q.n();
  object["rates"] = matrix_to_json(q.rates());
  return dump(object);
}

Generator generator_from_json(const std::string& text) {
  const json object = parse_json(text);
  const int n = field_as<int>(object, "n");
  const auto rates = matrix_from_json<Eigen::MatrixXd>(object, "rates");
  if (rates.rows() != n) {
    throw DataError("SchemaMismatch", "n does not match the rates matrix");
  }
  return Generator(rates);
}

std::string to_json(const CtbnModel& model) {
  json object;
  object["nx"] = model.nx();
  object["ny"] = model.ny();
  object["x_given_y"] = family_to_json(model.x_given_y());
  object["y_given_x"] = family_to_json(model.y_given_x());
  return dump(object);
}

CtbnModel model_from_json(const std::string& text) {
  const json object = parse_json(text);
  const int nx = field_as<int>(object, "nx");
  const int ny = field_as<int>(object, "ny");
  CtbnModel model(family_from_json(object, "x_given_y"),
                  family_from_json(object, "y_given_x"));
  if (model.nx() != nx || model.ny() != ny) {
    throw DataError("SchemaMismatch",
                    "nx/ny do not match the conditional families");
  }
  return model;
}

std::string to_json(const SufficientStats& stats) {
  json object;
  object["n"] = stats.n();
  object["counts"] = matrix_to_json(stats.counts());
  object["occupation"] =
      std::vector<double>(stats.occupation().begin(),
                          stats.occupation().end());
  object["horizon_total"] = stats.horizon_total();
  object["trials"] = stats.trials();
  return dump(object);
}

SufficientStats stats_from_json(const std::string& text) {
  const json object = parse_json(text);
  const int n = field_as<int>(object, "n");
  const auto counts = matrix_from_json<CountMatrix>(object, "counts");
  const auto occupation = field_as<std::vector<double>>(object, "occupation");
  if (counts.rows() != n || static_cast<int>(occupation.size()) != n) {
    throw DataError("SchemaMismatch", "n does not match counts/occupation");
  }
  Eigen::VectorXd occ(n);
  for (int i = 0; i < n; ++i) occ(i) = occupation[static_cast<std::size_t>(i)];
  return SufficientStats(counts, occ,
                         field_as<double>(object, "horizon_total"),
                         field_as<int>(object, "trials"));
}

std::string to_json(const CausalityReport& report) {
  json object;
  object["c_x_from_y"] = report.c_x_from_y;
  object["c_y_from_x"] = report.c_y_from_x;
  object["avg_x_from_y"] = report.avg_x_from_y;
  object["avg_y_from_x"] = report.avg_y_from_x;
  object["bound_x_from_y"] = report.bound_x_from_y;
  object["bound_y_from_x"] = report.bound_y_from_x;
  object["kappa_x_from_y"] = report.kappa_x_from_y;
  object["kappa_y_from_x"] = report.kappa_y_from_x;
  object["horizon"] = report.horizon;
  object["x_fractions"] = report.x_fractions;
  object["y_fractions"] = report.y_fractions;
  return dump(object);
}

CausalityReport report_from_json(const std::string& text) {
  const json object = parse_json(text);
  CausalityReport report;
  report.c_x_from_y = field_as<double>(object, "c_x_from_y");
  report.c_y_from_x = field_as<double>(object, "c_y_from_x");
  report.avg_x_from_y = field_as<double>(object, "avg_x_from_y");
  report.avg_y_from_x = field_as<double>(object, "avg_y_from_x");
  report.bound_x_from_y = field_as<double>(object, "bound_x_from_y");
  report.bound_y_from_x = field_as<double>(object, "bound_y_from_x");
  report.kappa_x_from_y = field_as<double>(object, "kappa_x_from_y");
  report.kappa_y_from_x = field_as<double>(object, "kappa_y_from_x");
  report.horizon = field_as<double>(object, "horizon");
  report.x_fractions = field_as<std::vector<double>>(object, "x_fractions");
  report.y_fractions = field_as<std::vector<double>>(object, "y_fractions");
  try {
    validate_report(report);
  } catch (const Error& error) {
    throw DataError(error.name(), detail_of(error));
  }
  return report;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << traj.n() << ' ' << traj.initial() << ' '
      << format_double(traj.horizon()) << '\n';
  for (const auto& event : traj.events()) {
    out << format_double(event.time) << '\t' << event.state << '\n';
  }
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("EmptyInput", "no trajectory header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int n = 0;
  int initial = 0;
  double horizon = 0.0;
  {
    std::istringstream header(line);
    header >> n >> initial >> horizon;
    std::string rest;
    if (header.fail() || (header >> rest)) {
      throw DataError("MalformedTrajectory",
                      "line 1: expected \"n initial horizon\"");
    }
  }
  std::vector<TrajectoryEvent> events;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      std::ostringstream detail;
      detail << "line " << lineno;
      throw DataError("MalformedTrajectory", detail.str());
    }
    TrajectoryEvent event{};
    const std::string time_field = line.substr(0, tab);
    char* time_end = nullptr;
    event.time = std::strtod(time_field.c_str(), &time_end);
    const char* state_begin = line.data() + tab + 1;
    const char* state_end = line.data() + line.size();
    const auto parsed = std::from_chars(state_begin, state_end, event.state);
    if (time_field.empty() || time_end != time_field.c_str() + tab ||
        parsed.ec != std::errc{} || parsed.ptr != state_end) {
      std::ostringstream detail;
      detail << "line " << lineno;
      throw DataError("MalformedTrajectory", detail.str());
    }
    events.push_back(event);
  }
  try {
    return Trajectory(n, initial, std::move(events), horizon);
  } catch (const ValidationError& error) {
    throw DataError(error.name(), detail_of(error));
  }
}

std::string to_csv(const Eigen::MatrixXd& matrix) {
  std::string out;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(matrix(i, j));
    }
    out += '\n';
  }
  return out;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& contents) {
  std::filesystem::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw DataError("WriteFailed", temp.string());
    }
  }
  std::error_code code;
  std::filesystem::rename(temp, path, code);
  if (code) {
    std::error_code ignored;
    std::filesystem::remove(temp, ignored);
    throw DataError("WriteFailed", path.string() + ": " + code.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("ReadFailed", path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw DataError("ReadFailed", path.string());
  }
  return buffer.str();
}

}  // namespace ctbn
