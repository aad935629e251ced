#include "dsr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "dsr/error.hpp"
#include "report_schema_text.hpp"

namespace dsr {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_real(std::string_view s) {
  // strtod accepts the same spellings that format_real writes, inf/nan included.
  std::string copy(s);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size() || copy.empty()) return std::nullopt;
  return value;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
json optional_real(const std::optional<T>& x) {
  return x ? real(static_cast<double>(*x)) : json(nullptr);
}

std::string_view stop_name(StopReason s) {
  switch (s) {
    case StopReason::FixedCount: return "fixed_count";
    case StopReason::TargetReached: return "target_reached";
    case StopReason::CapExhausted: return "cap_exhausted";
  }
  return "unknown";
}

std::string_view er_mode_name(ErMode m) {
  switch (m) {
    case ErMode::Exact: return "exact";
    case ErMode::Approx: return "approx";
    case ErMode::Auto: return "auto";
  }
  return "unknown";
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

EdgeListParse parse_edge_list(std::istream& in, const std::string& source) {
  struct Row {
    std::string_view a, b;
    std::optional<double> w;
    std::size_t line;
  };
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));

  std::optional<std::size_t> header;
  std::vector<Row> rows;
  bool all_integer = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0].starts_with('#')) {
      // "# nodes N", with or without a space after '#'.
      std::vector<std::string_view> t = tokens;
      if (t[0] == "#") {
        t.erase(t.begin());
      } else {
        t[0].remove_prefix(1);
      }
      if (t.size() == 2 && t[0] == "nodes") {
        const auto n = parse_uint(t[1]);
        if (!n) throw InputError(where(source, i + 1) + "malformed node-count header");
        if (header && *header != *n) throw InputError(where(source, i + 1) + "conflicting node-count headers");
        header = static_cast<std::size_t>(*n);
      }
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw InputError(where(source, i + 1) + "expected 'u v [w]', got " +
                       std::to_string(tokens.size()) + " fields");
    }
    Row row{tokens[0], tokens[1], std::nullopt, i + 1};
    if (tokens.size() == 3) {
      const auto w = parse_real(tokens[2]);
      if (!w) throw InputError(where(source, i + 1) + "weight '" + std::string(tokens[2]) + "' is not a number");
      if (!(*w > 0.0) || !std::isfinite(*w)) {
        throw InputError(where(source, i + 1) + "weight must be positive and finite");
      }
      row.w = *w;
    }
    if (!parse_uint(row.a) || !parse_uint(row.b)) all_integer = false;
    rows.push_back(row);
  }

  EdgeListParse out;
  std::vector<RawEdge> raw;
  raw.reserve(rows.size());
  std::size_t n = header.value_or(0);
  if (all_integer) {
    for (const Row& r : rows) {
      const std::uint64_t u = *parse_uint(r.a);
      const std::uint64_t v = *parse_uint(r.b);
      if (u > 0xFFFFFFFEULL || v > 0xFFFFFFFEULL) throw InputError(where(source, r.line) + "node id too large");
      if (header && (u >= *header || v >= *header)) {
        throw InputError(where(source, r.line) + "node id exceeds the header's node count " +
                         std::to_string(*header));
      }
      if (!header) n = std::max<std::size_t>(n, std::max(u, v) + 1);
      raw.push_back({static_cast<std::int64_t>(u), static_cast<std::int64_t>(v), r.w});
    }
  } else {
    std::unordered_map<std::string, std::size_t> ids;
    const auto id_of = [&](std::string_view name) {
      auto [it, inserted] = ids.emplace(std::string(name), out.names.size());
      if (inserted) out.names.emplace_back(name);
      return it->second;
    };
    for (const Row& r : rows) {
      const std::size_t u = id_of(r.a);
      const std::size_t v = id_of(r.b);
      raw.push_back({static_cast<std::int64_t>(u), static_cast<std::int64_t>(v), r.w});
    }
    if (header && out.names.size() > *header) {
      throw InputError(source + ": " + std::to_string(out.names.size()) +
                       " distinct node names exceed the header's node count " +
                       std::to_string(*header));
    }
    n = std::max(n, out.names.size());
  }

  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> first_line;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawEdge& e = raw[i];
    if (e.u == e.v) {
      out.warnings.push_back(where(source, rows[i].line) + "self-loop on node " +
                             std::string(rows[i].a) + " dropped");
      continue;
    }
    const auto key = std::minmax(e.u, e.v);
    const auto [it, inserted] = first_line.emplace(key, rows[i].line);
    if (!inserted) {
      out.warnings.push_back(where(source, rows[i].line) + "duplicate of the edge on line " +
                             std::to_string(it->second) + "; weights summed");
    }
  }
  out.graph = build_graph(raw, n);
  return out;
}

EdgeListParse read_edge_list(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_edge_list(in, path);
}

void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_real(e.w) << '\n';
}

void write_edge_list(const WeightedGraph& g, const std::string& path) {
  std::ofstream out = open_out(path);
  write_edge_list(g, out);
  if (!out) throw InputError("failed writing '" + path + "'");
}

LabelVector read_labels(const std::string& path, std::size_t n) {
  std::ifstream in = open_in(path);
  std::vector<std::size_t> ids;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const auto value = tokens.size() == 1 ? parse_uint(tokens[0]) : std::nullopt;
    if (!value) throw InputError(where(path, line_no) + "expected one nonnegative integer label");
    ids.push_back(static_cast<std::size_t>(*value));
  }
  if (ids.size() != n) {
    throw InputError(path + ": " + std::to_string(ids.size()) + " labels for " +
                     std::to_string(n) + " nodes");
  }
  return LabelVector::from_ids(std::move(ids));
}

void write_labels(const LabelVector& labels, const std::string& path) {
  std::ofstream out = open_out(path);
  for (std::size_t id : labels.ids) out << id << '\n';
}

NodeFeatures read_features(const std::string& path, std::size_t n) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_ws(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      const auto tokens = split_ws(cell);
      const auto value = tokens.size() == 1 ? parse_real(tokens[0]) : std::nullopt;
      if (!value || !std::isfinite(*value)) {
        throw InputError(where(path, line_no) + "feature cell '" + cell + "' is not a finite number");
      }
      row.push_back(*value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(where(path, line_no) + "row has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != n) {
    throw InputError(path + ": " + std::to_string(rows.size()) + " feature rows for " +
                     std::to_string(n) + " nodes");
  }
  NodeFeatures f;
  const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  f.rows.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) f.rows(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return f;
}

void write_features(const NodeFeatures& features, const std::string& path) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < features.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.rows.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(features.rows(i, j));
    }
    out << '\n';
  }
}

std::string report_digest(const json& report) {
  json copy = report;
  copy.erase("timings");
  copy.erase("digest");
  const std::string text = copy.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json finalize_report(json body, const std::string& kind) {
  body["schema_version"] = kReportSchemaVersion;
  body["toolkit_version"] = kToolkitVersion;
  body["kind"] = kind;
  if (!body.contains("timings")) body["timings"] = json::object();
  body["digest"] = report_digest(body);
  return body;
}

json to_json(const GraphSummary& s) {
  return {{"nodes", s.nodes},
          {"edges", s.edges},
          {"total_weight", real(s.total_weight)},
          {"components", s.components}};
}

json to_json(const DensifyPlan& plan) {
  return {{"kappa", real(plan.kappa)},
          {"q", real(plan.q)},
          {"latent_size", plan.latent_unbounded ? json(nullptr) : real(plan.latent_size_real)},
          {"latent_unbounded", plan.latent_unbounded},
          {"k", plan.k},
          {"epsilon_used", real(plan.epsilon_used)},
          {"escalations", plan.escalations},
          {"threshold_met", plan.threshold_met}};
}

json to_json(const MetricSet& m) {
  json j;
  if (m.homophily) {
    j["homophily"] = real(*m.homophily);
  } else {
    j["homophily_note"] = "omitted: no labels supplied";
  }
  j["spectral_gap"] = real(m.spectral_gap);
  j["mean_pair_er"] = optional_real(m.mean_pair_er);
  j["disconnected_pairs"] = m.disconnected_pairs;
  j["mean_pair_er_pinv"] = optional_real(m.mean_pair_er_pinv);
  if (m.er_summary) {
    const ErSummary& s = *m.er_summary;
    j["er_summary"] = {{"count", s.count}, {"mean", real(s.mean)},     {"median", real(s.median)},
                       {"p10", real(s.p10)},  {"p90", real(s.p90)},    {"max", real(s.max)},
                       {"histogram", s.histogram}};
  } else {
    j["er_summary"] = nullptr;
  }
  if (m.spectrum) {
    json values = json::array();
    for (double x : m.spectrum->eigenvalues) values.push_back(real(x));
    j["spectrum"] = values;
  } else {
    j["spectrum"] = nullptr;
  }
  return j;
}

json to_json(const RewiringConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"alpha_fraction", optional_real(cfg.alpha_fraction)},
          {"beta", cfg.beta},
          {"epsilon", cfg.epsilon},
          {"delta", cfg.delta},
          {"seed", cfg.seed},
          {"dense_cap", cfg.dense_cap},
          {"er_mode", er_mode_name(cfg.er_mode)},
          {"weight_variant", cfg.weight_variant == LatentWeights::Uniform ? "uniform" : "pseudocode"},
          {"scoring", cfg.scoring == CandidateScoring::Frozen ? "frozen" : "full"},
          {"epsilon_cap", optional_real(cfg.epsilon_cap)},
          {"er_pairs", cfg.metrics.er_pairs}};
}

json to_json(const ComponentRecord& rec) {
  return {{"id", rec.id},
          {"nodes", rec.nodes},
          {"edges", rec.edges},
          {"bypassed", rec.bypassed},
          {"alpha", rec.alpha},
          {"plan", to_json(rec.plan)},
          {"added", rec.added},
          {"target", rec.target},
          {"distinct_out", rec.distinct_out},
          {"draws", rec.draws},
          {"stop", stop_name(rec.stop)},
          {"er_method", rec.er_method == ResistanceMethod::Exact ? "exact" : "approx"},
          {"sketch_dimension", rec.sketch_dimension}};
}

json to_json(const SoftFailure& f) { return {{"stage", f.stage}, {"message", f.message}}; }

json to_json(const SimilarityReport& r) {
  return {{"trials", r.trials},
          {"skipped", r.skipped},
          {"max_upper_ratio", real(r.max_upper_ratio)},
          {"min_lower_ratio", real(r.min_lower_ratio)},
          {"epsilon_observed", real(r.epsilon_observed)},
          {"epsilon_target", real(r.epsilon_target)},
          {"pass", r.pass}};
}

json rewiring_report_body(const RewiringReport& report) {
  json body;
  json config = to_json(report.config);
  config["alpha_total"] = report.alpha_total;
  body["config"] = config;
  body["input"] = to_json(report.input);
  body["latent"] = to_json(report.latent);
  body["output"] = to_json(report.output);
  body["plan"] = to_json(report.plan);
  json components = json::array();
  for (const auto& rec : report.components) components.push_back(to_json(rec));
  body["components"] = components;
  if (report.before && report.after) {
    body["metrics"] = {{"before", to_json(*report.before)},
                       {"after", to_json(*report.after)},
                       {"spectral_distance", optional_real(report.spectral_distance)},
                       {"er_pair_count", report.er_pairs.size()}};
  } else {
    body["metrics"] = nullptr;
  }
  json failures = json::array();
  for (const auto& f : report.soft_failures) failures.push_back(to_json(f));
  body["soft_failures"] = failures;
  body["timings"] = {{"densify_seconds", report.timings.densify_seconds},
                     {"sparsify_seconds", report.timings.sparsify_seconds},
                     {"metrics_seconds", report.timings.metrics_seconds},
                     {"total_seconds", report.timings.total_seconds}};
  return body;
}

namespace {

bool type_matches(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  return false;
}

void validate_node(const json& value, const json& schema, const json& root, const std::string& path,
                   std::vector<std::string>& errors) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"];
    const std::string prefix = "#/definitions/";
    if (!ref.starts_with(prefix) || !root["definitions"].contains(ref.substr(prefix.size()))) {
      errors.push_back(path + ": unresolvable $ref " + ref);
      return;
    }
    validate_node(value, root["definitions"][ref.substr(prefix.size())], root, path, errors);
    return;
  }
  if (schema.contains("anyOf")) {
    bool any = false;
    for (const auto& option : schema["anyOf"]) {
      std::vector<std::string> local;
      validate_node(value, option, root, path, local);
      any = any || local.empty();
    }
    if (!any) errors.push_back(path + ": matches no anyOf alternative");
  }
  if (schema.contains("type")) {
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || type_matches(value, t.get<std::string>());
    } else {
      ok = type_matches(value, schema["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + schema["type"].dump() + ", got " + value.type_name());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& option : schema["enum"]) found = found || option == value;
    if (!found) errors.push_back(path + ": value " + value.dump() + " not in enum");
  }
  if (value.is_number()) {
    const double x = value.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) {
      errors.push_back(path + ": " + value.dump() + " below minimum");
    }
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) {
      errors.push_back(path + ": " + value.dump() + " above maximum");
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing required member '" + key.get<std::string>() + "'");
        }
      }
    }
    const json props = schema.value("properties", json::object());
    for (const auto& [key, member] : value.items()) {
      if (props.contains(key)) {
        validate_node(member, props[key], root, path + "/" + key, errors);
      } else if (schema.contains("additionalProperties") && schema["additionalProperties"].is_boolean() &&
                 !schema["additionalProperties"].get<bool>()) {
        errors.push_back(path + ": unexpected member '" + key + "'");
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      validate_node(value[i], schema["items"], root, path + "/" + std::to_string(i), errors);
    }
  }
}

}  // namespace

std::vector<std::string> validate_json(const json& doc, const json& schema) {
  std::vector<std::string> errors;
  validate_node(doc, schema, schema, "", errors);
  return errors;
}

const json& report_schema() {
  static const json schema = json::parse(kReportSchemaText);
  return schema;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

void write_report_files(const json& report, const std::string& path, const RewiringReport* rewiring) {
  write_text_file(path, report.dump(2) + "\n");
  if (rewiring == nullptr || !rewiring->before || !rewiring->after) return;
  const MetricSet& before = *rewiring->before;
  const MetricSet& after = *rewiring->after;
  if (before.spectrum && after.spectrum) {
    std::ostringstream csv;
    csv << "index,before,after\n";
    for (std::size_t i = 0; i < before.spectrum->eigenvalues.size(); ++i) {
      csv << i << ',' << format_real(before.spectrum->eigenvalues[i]) << ','
          << format_real(after.spectrum->eigenvalues[i]) << '\n';
    }
    write_text_file(path + ".spectra.csv", csv.str());
  }
  if (!rewiring->er_pairs.empty()) {
    std::ostringstream csv;
    csv << "u,v,before,after\n";
    for (std::size_t i = 0; i < rewiring->er_pairs.size(); ++i) {
      csv << rewiring->er_pairs[i].first << ',' << rewiring->er_pairs[i].second << ','
          << format_real(rewiring->er_pairs_before[i]) << ','
          << format_real(rewiring->er_pairs_after[i]) << '\n';
    }
    write_text_file(path + ".er_pairs.csv", csv.str());
  }
}

}  // namespace dsr
