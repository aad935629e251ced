// Command-line front end: generate-sbm, rewire, densify, sparsify, spectrum,
// resistance, metrics, compare.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 numeric failure
// (soft failures count only under --strict).

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dsr/datagen.hpp"
#include "dsr/io.hpp"
#include "dsr/metrics.hpp"
#include "dsr/pipeline.hpp"
#include "dsr/random.hpp"
#include "dsr/resistance.hpp"
#include "dsr/spectral.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flags shared by rewire, densify and sparsify.
struct RunFlags {
  std::string edges;
  std::string features;
  std::string labels;
  std::optional<std::size_t> alpha;
  std::optional<double> alpha_frac;
  double beta = 1.0;
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::string out_edges;
  std::string report;
  bool strict = false;
  std::size_t dense_cap = 2000;
  std::string er_mode = "auto";
  std::string weights = "uniform";
  std::string scoring = "frozen";
  std::optional<double> epsilon_cap;
  std::size_t er_pairs = 200;
  bool no_metrics = false;
};

void add_input_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--edges", f.edges, "input edge list")->required();
  cmd->add_option("--features", f.features, "node features CSV, one row per node");
  cmd->add_option("--labels", f.labels, "node labels, one integer per line");
  cmd->add_option("--seed", f.seed, "master seed")->required();
  cmd->add_option("--out-edges", f.out_edges, "output edge list")->required();
  cmd->add_option("--report", f.report, "JSON report path")->required();
  cmd->add_flag("--strict", f.strict, "exit 3 when any stage records a soft failure");
  cmd->add_option("--dense-cap", f.dense_cap, "dense solvers at or below this component size");
}

void add_densify_flags(CLI::App* cmd, RunFlags& f) {
  auto* a = cmd->add_option("--alpha", f.alpha, "edges to add");
  auto* af = cmd->add_option("--alpha-frac", f.alpha_frac, "edges to add as a fraction of |E|");
  a->excludes(af);
  af->excludes(a);
  cmd->add_option("--epsilon", f.epsilon, "initial densification epsilon");
  cmd->add_option("--weights", f.weights, "latent edge weights")
      ->check(CLI::IsMember({"uniform", "pseudocode"}));
  cmd->add_option("--scoring", f.scoring, "candidate scoring")->check(CLI::IsMember({"frozen", "full"}));
  cmd->add_option("--epsilon-cap", f.epsilon_cap, "upper bound on escalated epsilon");
}

void add_sparsify_flags(CLI::App* cmd, RunFlags& f, bool beta_required) {
  auto* b = cmd->add_option("--beta", f.beta, "kept edges as a fraction of |E|");
  if (beta_required) b->required();
  cmd->add_option("--delta", f.delta, "effective-resistance sketch error");
  cmd->add_option("--er-mode", f.er_mode, "effective-resistance method")
      ->check(CLI::IsMember({"auto", "exact", "approx"}));
}

dsr::RewiringConfig make_config(const RunFlags& f) {
  dsr::RewiringConfig cfg;
  if (f.alpha) cfg.alpha = *f.alpha;
  cfg.alpha_fraction = f.alpha_frac;
  cfg.beta = f.beta;
  cfg.epsilon = f.epsilon;
  cfg.delta = f.delta;
  cfg.seed = f.seed;
  cfg.dense_cap = f.dense_cap;
  cfg.er_mode = f.er_mode == "exact" ? dsr::ErMode::Exact
                : f.er_mode == "approx" ? dsr::ErMode::Approx
                                        : dsr::ErMode::Auto;
  cfg.weight_variant = f.weights == "pseudocode" ? dsr::LatentWeights::Pseudocode : dsr::LatentWeights::Uniform;
  cfg.scoring = f.scoring == "full" ? dsr::CandidateScoring::Full : dsr::CandidateScoring::Frozen;
  cfg.epsilon_cap = f.epsilon_cap;
  cfg.metrics.er_pairs = f.er_pairs;
  cfg.metrics.enabled = !f.no_metrics;
  cfg.validate();
  return cfg;
}

struct Inputs {
  dsr::EdgeListParse parsed;
  std::optional<dsr::NodeFeatures> features;
  std::optional<dsr::LabelVector> labels;
};

Inputs load_inputs(const RunFlags& f) {
  Inputs in;
  in.parsed = dsr::read_edge_list(f.edges);
  for (const auto& w : in.parsed.warnings) std::cerr << "warning: " << w << '\n';
  const std::size_t n = in.parsed.graph.num_nodes();
  if (!f.features.empty()) in.features = dsr::read_features(f.features, n);
  if (!f.labels.empty()) in.labels = dsr::read_labels(f.labels, n);
  return in;
}

// Edge list with the original string ids when the input used them.
void write_graph(const dsr::WeightedGraph& g, const std::vector<std::string>& names,
                 const std::string& path) {
  if (names.empty()) {
    dsr::write_edge_list(g, path);
    return;
  }
  std::ostringstream out;
  out << "# nodes " << g.num_nodes() << '\n';
  for (const dsr::Edge& e : g.edges()) {
    out << names[e.u] << ' ' << names[e.v] << ' ' << dsr::format_real(e.w) << '\n';
  }
  dsr::write_text_file(path, out.str());
}

json warnings_json(const std::vector<std::string>& warnings) {
  json out = json::array();
  for (const auto& w : warnings) out.push_back(w);
  return out;
}

int finish(const std::vector<dsr::SoftFailure>& failures, bool strict) {
  for (const auto& f : failures) std::cerr << "soft failure [" << f.stage << "]: " << f.message << '\n';
  return strict && !failures.empty() ? kExitNumeric : kExitOk;
}

void check_schema(const json& report) {
  const auto errors = dsr::validate_json(report, dsr::report_schema());
  if (!errors.empty()) {
    // A report that breaks the shipped schema is a toolkit bug, not bad input.
    std::string message = "report violates the shipped schema:";
    for (const auto& e : errors) message += "\n  " + e;
    throw std::logic_error(message);
  }
}

int run_rewire(const RunFlags& f) {
  if (!f.alpha && !f.alpha_frac) throw UsageError("rewire needs --alpha or --alpha-frac");
  const dsr::RewiringConfig cfg = make_config(f);
  const Inputs in = load_inputs(f);
  const dsr::RewiringResult result =
      dsr::rewire(in.parsed.graph, in.features ? &*in.features : nullptr, in.labels ? &*in.labels : nullptr, cfg);
  write_graph(result.graph, in.parsed.names, f.out_edges);
  json body = dsr::rewiring_report_body(result.report);
  body["warnings"] = warnings_json(in.parsed.warnings);
  const json report = dsr::finalize_report(body, "rewire");
  check_schema(report);
  dsr::write_report_files(report, f.report, &result.report);
  return finish(result.report.soft_failures, f.strict);
}

int run_densify(const RunFlags& f) {
  if (!f.alpha && !f.alpha_frac) throw UsageError("densify needs --alpha or --alpha-frac");
  const dsr::RewiringConfig cfg = make_config(f);
  const Inputs in = load_inputs(f);
  const auto start = Clock::now();
  const std::size_t alpha = cfg.alpha_for(in.parsed.graph.num_edges());
  dsr::DensifyStage stage = dsr::densify_stage(in.parsed.graph, alpha, cfg);
  const double elapsed = seconds_since(start);
  write_graph(stage.latent, in.parsed.names, f.out_edges);

  json config = dsr::to_json(cfg);
  config["alpha_total"] = alpha;
  json components = json::array();
  for (const auto& rec : stage.components) components.push_back(dsr::to_json(rec));
  json failures = json::array();
  for (const auto& sf : stage.soft_failures) failures.push_back(dsr::to_json(sf));
  json body = {{"config", config},
               {"input", dsr::to_json(dsr::summarize(in.parsed.graph))},
               {"latent", dsr::to_json(dsr::summarize(stage.latent))},
               {"components", components},
               {"soft_failures", failures},
               {"warnings", warnings_json(in.parsed.warnings)},
               {"timings", {{"densify_seconds", elapsed}, {"total_seconds", elapsed}}}};
  const json report = dsr::finalize_report(body, "densify");
  check_schema(report);
  dsr::write_report_files(report, f.report);
  return finish(stage.soft_failures, f.strict);
}

int run_sparsify(const RunFlags& f) {
  const dsr::RewiringConfig cfg = make_config(f);
  const Inputs in = load_inputs(f);
  const auto start = Clock::now();
  dsr::SparsifyStage stage =
      dsr::sparsify_stage(in.parsed.graph, in.features ? &*in.features : nullptr, cfg);
  const double elapsed = seconds_since(start);
  write_graph(stage.output, in.parsed.names, f.out_edges);

  json components = json::array();
  for (const auto& rec : stage.components) components.push_back(dsr::to_json(rec));
  json failures = json::array();
  for (const auto& sf : stage.soft_failures) failures.push_back(dsr::to_json(sf));
  json body = {{"config", dsr::to_json(cfg)},
               {"input", dsr::to_json(dsr::summarize(in.parsed.graph))},
               {"output", dsr::to_json(dsr::summarize(stage.output))},
               {"components", components},
               {"soft_failures", failures},
               {"warnings", warnings_json(in.parsed.warnings)},
               {"timings", {{"sparsify_seconds", elapsed}, {"total_seconds", elapsed}}}};
  const json report = dsr::finalize_report(body, "sparsify");
  check_schema(report);
  dsr::write_report_files(report, f.report);
  return finish(stage.soft_failures, f.strict);
}

dsr::WeightedGraph load_graph(const std::string& path) {
  dsr::EdgeListParse parsed = dsr::read_edge_list(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(parsed.graph);
}

int run_spectrum(const std::string& edges, const std::string& out_csv, std::size_t cap) {
  const dsr::SpectrumSummary s = dsr::full_spectrum(load_graph(edges), cap);
  std::ostringstream out;
  for (double x : s.eigenvalues) out << dsr::format_real(x) << '\n';
  dsr::write_text_file(out_csv, out.str());
  return kExitOk;
}

int run_resistance(const std::string& edges, std::optional<std::size_t> pairs, const std::string& out_csv,
                   const std::string& er_mode, double delta, std::uint64_t seed, std::size_t dense_cap) {
  const dsr::WeightedGraph g = load_graph(edges);
  std::ostringstream out;
  out << "u,v,resistance\n";
  if (pairs) {
    const auto sample = dsr::sample_connected_pairs(g, *pairs, dsr::derive_seed(seed, "resistance-pairs"));
    const auto values = dsr::effective_resistance_pairs(g, sample);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      out << sample[i].first << ',' << sample[i].second << ',' << dsr::format_real(values[i]) << '\n';
    }
  } else {
    bool exact = er_mode == "exact";
    if (er_mode == "auto") {
      const auto members = dsr::connected_components(g).members();
      exact = std::all_of(members.begin(), members.end(),
                          [&](const auto& m) { return m.size() <= dense_cap; });
    }
    dsr::ResistanceTable table;
    if (exact) {
      table = dsr::effective_resistance_exact(g, dense_cap);
    } else {
      dsr::SketchOptions opts;
      opts.delta = delta;
      opts.seed = dsr::derive_seed(seed, "resistance");
      table = dsr::effective_resistance_approx(g, opts);
    }
    const auto edge_list = g.edges();
    for (std::size_t i = 0; i < edge_list.size(); ++i) {
      out << edge_list[i].u << ',' << edge_list[i].v << ',' << dsr::format_real(table.values[i]) << '\n';
    }
  }
  dsr::write_text_file(out_csv, out.str());
  return kExitOk;
}

int run_metrics(const std::string& edges, const std::string& labels_path, const std::string& report_path,
                std::uint64_t seed, std::size_t er_pairs, std::size_t dense_cap) {
  const auto start = Clock::now();
  dsr::EdgeListParse parsed = dsr::read_edge_list(edges);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  const dsr::WeightedGraph& g = parsed.graph;
  std::optional<dsr::LabelVector> labels;
  if (!labels_path.empty()) labels = dsr::read_labels(labels_path, g.num_nodes());
  dsr::RewiringConfig cfg;
  cfg.seed = seed;
  cfg.dense_cap = dense_cap;
  cfg.metrics.er_pairs = er_pairs;
  const auto pairs = dsr::sample_connected_pairs(g, er_pairs, dsr::derive_seed(seed, "metrics"));
  const dsr::MetricSet m = dsr::compute_metrics(g, labels ? &*labels : nullptr, pairs, nullptr, cfg);
  if (!labels) std::cerr << "note: no --labels given; homophily omitted from the report\n";
  json body = {{"graph", dsr::to_json(dsr::summarize(g))},
               {"graph_metrics", dsr::to_json(m)},
               {"warnings", warnings_json(parsed.warnings)},
               {"timings", {{"metrics_seconds", seconds_since(start)}, {"total_seconds", seconds_since(start)}}}};
  const json report = dsr::finalize_report(body, "metrics");
  check_schema(report);
  dsr::write_report_files(report, report_path);
  return kExitOk;
}

int run_compare(const std::string& edges_a, const std::string& edges_b, const std::string& report_path,
                double epsilon, std::uint64_t seed, std::size_t dense_cap) {
  const auto start = Clock::now();
  const dsr::WeightedGraph a = load_graph(edges_a);
  const dsr::WeightedGraph b = load_graph(edges_b);
  dsr::EigenOptions eig;
  eig.seed = dsr::derive_seed(seed, "compare-eigen");
  json body;
  body["graph_a"] = dsr::to_json(dsr::summarize(a));
  body["graph_b"] = dsr::to_json(dsr::summarize(b));
  if (a.num_nodes() <= dense_cap && b.num_nodes() <= dense_cap) {
    body["spectral_distance"] =
        dsr::spectral_distance(dsr::full_spectrum(a, dense_cap), dsr::full_spectrum(b, dense_cap));
  } else {
    body["spectral_distance"] = nullptr;
  }
  const double gap_a = a.num_nodes() >= 2 ? dsr::spectral_gap(a, eig) : 0.0;
  const double gap_b = b.num_nodes() >= 2 ? dsr::spectral_gap(b, eig) : 0.0;
  body["spectral_gap_a"] = gap_a;
  body["spectral_gap_b"] = gap_b;
  body["gap_delta"] = gap_b - gap_a;
  if (a.num_nodes() == b.num_nodes() && a.num_nodes() >= 2) {
    body["similarity"] =
        dsr::to_json(dsr::spectral_similarity_check(a, b, epsilon, 64, dsr::derive_seed(seed, "compare")));
  } else {
    body["similarity"] = nullptr;
  }
  body["timings"] = {{"total_seconds", seconds_since(start)}};
  const json report = dsr::finalize_report(body, "compare");
  check_schema(report);
  dsr::write_report_files(report, report_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph rewiring by densification and spectral sparsification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dsr::kToolkitVersion);

  // generate-sbm
  dsr::SbmSpec sbm;
  std::string sbm_preset, sbm_edges, sbm_labels, sbm_features;
  std::size_t feat_dim = 0;
  double feat_noise = 0.3;
  auto* gen = app.add_subcommand("generate-sbm", "stochastic block model with labels");
  gen->add_option("--nodes", sbm.n, "node count");
  gen->add_option("--blocks", sbm.blocks, "block count");
  gen->add_option("--p-in", sbm.p_in, "within-block edge probability");
  gen->add_option("--p-out", sbm.p_out, "cross-block edge probability");
  gen->add_option("--preset", sbm_preset, "named preset (S-High, S-Low, M-High, M-Low, L-High, L-Low)");
  gen->add_option("--seed", sbm.seed, "seed")->required();
  gen->add_option("--out-edges", sbm_edges, "edge list path")->required();
  gen->add_option("--out-labels", sbm_labels, "labels path")->required();
  gen->add_option("--features-dim", feat_dim, "feature dimension (0: no features)");
  gen->add_option("--features-noise", feat_noise, "feature noise standard deviation");
  gen->add_option("--out-features", sbm_features, "features CSV path");

  RunFlags rewire_flags, densify_flags, sparsify_flags;
  auto* rew = app.add_subcommand("rewire", "densify then sparsify");
  add_input_flags(rew, rewire_flags);
  add_densify_flags(rew, rewire_flags);
  add_sparsify_flags(rew, rewire_flags, true);
  rew->add_option("--er-pairs", rewire_flags.er_pairs, "sampled pairs for the mean-ER metric");
  rew->add_flag("--no-metrics", rewire_flags.no_metrics, "skip before/after metrics");

  auto* den = app.add_subcommand("densify", "densification stage only");
  add_input_flags(den, densify_flags);
  add_densify_flags(den, densify_flags);

  auto* spa = app.add_subcommand("sparsify", "importance-based sparsification stage only");
  add_input_flags(spa, sparsify_flags);
  add_sparsify_flags(spa, sparsify_flags, true);

  std::string spec_edges, spec_csv;
  std::size_t spec_cap = 5000;
  auto* spec = app.add_subcommand("spectrum", "Laplacian eigenvalues, ascending");
  spec->add_option("--edges", spec_edges, "edge list")->required();
  spec->add_option("--out-csv", spec_csv, "output CSV")->required();
  spec->add_option("--dense-cap", spec_cap, "largest node count accepted");

  std::string res_edges, res_csv, res_mode = "auto";
  std::optional<std::size_t> res_pairs;
  bool res_all = false;
  double res_delta = 0.1;
  std::uint64_t res_seed = 0;
  std::size_t res_cap = 2000;
  auto* res = app.add_subcommand("resistance", "effective resistances");
  res->add_option("--edges", res_edges, "edge list")->required();
  auto* rp = res->add_option("--pairs", res_pairs, "K sampled same-component pairs (exact)");
  auto* ra = res->add_flag("--all-edges", res_all, "every edge (default)");
  rp->excludes(ra);
  ra->excludes(rp);
  res->add_option("--out-csv", res_csv, "output CSV")->required();
  res->add_option("--er-mode", res_mode, "method for --all-edges")->check(CLI::IsMember({"auto", "exact", "approx"}));
  res->add_option("--delta", res_delta, "sketch error");
  res->add_option("--seed", res_seed, "seed");
  res->add_option("--dense-cap", res_cap, "dense solver cap");

  std::string met_edges, met_labels, met_report;
  std::uint64_t met_seed = 0;
  std::size_t met_pairs = 200, met_cap = 2000;
  auto* met = app.add_subcommand("metrics", "homophily, spectral gap, ER distribution");
  met->add_option("--edges", met_edges, "edge list")->required();
  met->add_option("--labels", met_labels, "labels");
  met->add_option("--report", met_report, "JSON report path")->required();
  met->add_option("--seed", met_seed, "seed for pair sampling");
  met->add_option("--er-pairs", met_pairs, "sampled pairs");
  met->add_option("--dense-cap", met_cap, "dense solver cap");

  std::string cmp_a, cmp_b, cmp_report;
  double cmp_eps = 0.5;
  std::uint64_t cmp_seed = 0;
  std::size_t cmp_cap = 2000;
  auto* cmp = app.add_subcommand("compare", "spectral comparison of two graphs");
  cmp->add_option("--edges-a", cmp_a, "first edge list")->required();
  cmp->add_option("--edges-b", cmp_b, "second edge list")->required();
  cmp->add_option("--report", cmp_report, "JSON report path")->required();
  cmp->add_option("--epsilon", cmp_eps, "similarity band");
  cmp->add_option("--seed", cmp_seed, "probe seed");
  cmp->add_option("--dense-cap", cmp_cap, "dense spectrum cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      if (!sbm_preset.empty()) {
        const dsr::SbmPreset& p = dsr::sbm_preset(sbm_preset);
        if (gen->count("--nodes") == 0) sbm.n = p.n;
        if (gen->count("--p-in") == 0) sbm.p_in = p.p_in;
        if (gen->count("--p-out") == 0) sbm.p_out = p.p_out;
        if (gen->count("--features-dim") == 0 && !sbm_features.empty()) feat_dim = p.feature_dim;
        if (gen->count("--features-noise") == 0) feat_noise = p.feature_noise;
      } else if (gen->count("--nodes") == 0 || gen->count("--p-in") == 0 || gen->count("--p-out") == 0) {
        throw UsageError("generate-sbm needs --nodes, --p-in and --p-out, or --preset");
      }
      if (feat_dim > 0 && sbm_features.empty()) throw UsageError("--features-dim needs --out-features");
      if (!sbm_features.empty() && feat_dim == 0) throw UsageError("--out-features needs --features-dim");
      const dsr::LabeledGraph lg = dsr::generate_sbm(sbm);
      dsr::write_edge_list(lg.graph, sbm_edges);
      dsr::write_labels(lg.labels, sbm_labels);
      if (feat_dim > 0) {
        dsr::write_features(dsr::generate_features(lg.labels, feat_dim, feat_noise, sbm.seed), sbm_features);
      }
      return kExitOk;
    }
    if (*rew) return run_rewire(rewire_flags);
    if (*den) return run_densify(densify_flags);
    if (*spa) return run_sparsify(sparsify_flags);
    if (*spec) return run_spectrum(spec_edges, spec_csv, spec_cap);
    if (*res) return run_resistance(res_edges, res_pairs, res_csv, res_mode, res_delta, res_seed, res_cap);
    if (*met) return run_metrics(met_edges, met_labels, met_report, met_seed, met_pairs, met_cap);
    if (*cmp) return run_compare(cmp_a, cmp_b, cmp_report, cmp_eps, cmp_seed, cmp_cap);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dsr::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const dsr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
