#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "dsr/graph.hpp"
#include "dsr/node_data.hpp"
#include "dsr/pipeline.hpp"

namespace dsr {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";

struct EdgeListParse {
  WeightedGraph graph;
  std::vector<std::string> warnings;
  std::vector<std::string> names;  // original ids when they were not all integers
};

/// Lines "u v [w]"; an optional "# nodes N" header; other '#' lines are
/// comments. Integer ids are used as-is. If any id is not a nonnegative
/// integer, all ids are treated as strings and numbered in order of first
/// appearance. Errors carry `source:line`.
EdgeListParse parse_edge_list(std::istream& in, const std::string& source = "<input>");
EdgeListParse read_edge_list(const std::string& path);

/// "# nodes N" followed by "u v w" per edge with 17 significant digits.
void write_edge_list(const WeightedGraph& g, std::ostream& out);
void write_edge_list(const WeightedGraph& g, const std::string& path);

/// One nonnegative integer per line; exactly n lines.
LabelVector read_labels(const std::string& path, std::size_t n);
void write_labels(const LabelVector& labels, const std::string& path);

/// Comma-separated rows, no header, one row per node.
NodeFeatures read_features(const std::string& path, std::size_t n);
void write_features(const NodeFeatures& features, const std::string& path);

/// "%.17g"; round-trips through strtod.
std::string format_real(double x);

/// FNV-1a of the compact dump with the "timings" and "digest" members removed.
std::string report_digest(const nlohmann::json& report);

/// Adds schema_version, toolkit_version, kind and digest; `body` keeps its
/// own members.
nlohmann::json finalize_report(nlohmann::json body, const std::string& kind);

nlohmann::json to_json(const GraphSummary& s);
nlohmann::json to_json(const DensifyPlan& plan);
nlohmann::json to_json(const MetricSet& m);
nlohmann::json to_json(const RewiringConfig& cfg);
nlohmann::json to_json(const ComponentRecord& rec);
nlohmann::json to_json(const SoftFailure& f);
nlohmann::json to_json(const SimilarityReport& r);

/// Complete report body of a rewiring run (without the finalize fields).
nlohmann::json rewiring_report_body(const RewiringReport& report);

/// Checks `doc` against the subset of JSON Schema used by the shipped
/// schema: type, required, properties, additionalProperties (boolean),
/// items, enum, anyOf, minimum, maximum and $ref to "#/definitions/...". Returns
/// the list of violations, empty when valid.
std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema);

/// The report schema compiled into the binary (same text as
/// schemas/report.schema.json).
const nlohmann::json& report_schema();

/// Writes `<path>` and, when data is present, `<path>.spectra.csv` and
/// `<path>.er_pairs.csv`.
void write_report_files(const nlohmann::json& report, const std::string& path,
                        const RewiringReport* rewiring = nullptr);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace dsr
