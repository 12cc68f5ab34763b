#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "ctbn/causality.hpp"
#include "ctbn/compose.hpp"
#include "ctbn/estimate.hpp"
#include "ctbn/generator.hpp"
#include "ctbn/simulate.hpp"

namespace ctbn {

/// JSON codecs. Serialized numbers round-trip exactly; loading re-runs
/// the owning type's validation, so a structurally well-formed file with
/// bad content fails with the same error the constructor would raise.
/// Malformed syntax or a missing field raises DataError.
std::string to_json(const Generator& q);
std::string to_json(const CtbnModel& model);
std::string to_json(const SufficientStats& stats);
std::string to_json(const CausalityReport& report);

Generator generator_from_json(const std::string& text);
CtbnModel model_from_json(const std::string& text);
SufficientStats stats_from_json(const std::string& text);
CausalityReport report_from_json(const std::string& text);

/// Plain-text trajectory format: a "n initial horizon" header line, then
/// one "time<TAB>state" line per jump, times with 17 significant digits.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);

/// Comma-separated rows, one line per matrix row.
std::string to_csv(const Eigen::MatrixXd& matrix);

/// Writes via a temporary file in the target directory plus rename, so a
/// reader never observes a partial file.
void atomic_write(const std::filesystem::path& path,
                  const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace ctbn
