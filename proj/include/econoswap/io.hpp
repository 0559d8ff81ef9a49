#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "econoswap/analysis.hpp"
#include "econoswap/engine.hpp"

namespace econoswap::io {

/// Raised for unreadable, unwritable, or malformed files. The message
/// names the path and the problem; the CLI maps it to its I/O exit code.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int format_version = 1;

std::string rule_kind_name(RuleKind kind);
RuleKind rule_kind_from_name(const std::string& name);
std::string verdict_name(Verdict verdict);
std::string binning_name(BinScheme scheme);
BinScheme binning_from_name(const std::string& name);

nlohmann::json config_to_json(const SimulationConfig& config);
SimulationConfig config_from_json(const nlohmann::json& j);

nlohmann::json result_to_json(const SimulationResult& result);
SimulationResult result_from_json(const nlohmann::json& j);

nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json classification_to_json(const Classification& c);

/// CSV with header `bin_lo,bin_hi,bin_center,count,density`; reals carry
/// 17 significant digits so doubles round-trip exactly.
std::string distribution_to_csv(const Distribution& dist);

/// Parses a distribution CSV back into bins. zero_mass is not stored in
/// the CSV and comes back as 0; n_samples is the column sum. The scheme
/// is inferred from the spacing of the first two bins.
Distribution distribution_from_csv(const std::string& text,
                                   const std::string& path_for_errors);

std::string ccdf_to_csv(
    const std::vector<std::pair<double, double>>& points);

/// Writes via a sibling temp file plus rename, so a partial file never
/// exists at the target path.
void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

/// Parses and validates a stored simulation result, checking kind and
/// format_version and reporting the path in any diagnostic.
SimulationResult load_result_file(const std::string& path);

}  // namespace econoswap::io
