// msent: multiscale structural entropy toolkit.
//
// Subcommands: gen, reduce, entropy, lp-entropy, baseline, pipeline,
// cluster, regress. Exit codes: 0 success, 1 usage error, 2 input error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "msent/msent.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw msent::parse_error("cannot write file: " + path, 0);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw msent::parse_error("cannot open file: " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Values shared across subcommands, pre-loaded from --config (JSON) so that
// explicitly passed flags always win.
struct CommonDefaults {
  msent::RunConfig run;
  bool seed_set = false;
  std::string out;
};

CommonDefaults load_config_defaults(int argc, char** argv) {
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      config_path = a.substr(9);
  }
  CommonDefaults d;
  if (config_path.empty()) return d;
  json cfg = json::parse(read_text_file(config_path));
  if (cfg.contains("seed")) {
    d.run.seed = msent::Seed{cfg["seed"].get<uint64_t>()};
    d.seed_set = true;
  }
  if (cfg.contains("scales")) d.run.scales = cfg["scales"].get<std::vector<double>>();
  if (cfg.contains("scorer")) d.run.scorer = msent::parse_link_scorer(cfg["scorer"].get<std::string>());
  if (cfg.contains("family")) d.run.family = msent::parse_coarsen_family(cfg["family"].get<std::string>());
  if (cfg.contains("k")) d.run.k = cfg["k"].get<int>();
  if (cfg.contains("replicas")) d.run.replicas = cfg["replicas"].get<int>();
  if (cfg.contains("budget")) d.run.budget_seconds = cfg["budget"].get<double>();
  if (cfg.contains("workers")) d.run.workers = cfg["workers"].get<int>();
  if (cfg.contains("chain")) d.run.chain_scales = cfg["chain"].get<bool>();
  if (cfg.contains("out")) d.out = cfg["out"].get<std::string>();
  return d;
}

// Every randomized subcommand must run under a known seed: use the given
// one, or draw one from the system and announce it so the run is replayable.
uint64_t ensure_seed(std::optional<uint64_t> given) {
  if (given) return *given;
  std::random_device rd;
  const uint64_t seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << seed << " (derived; pass --seed " << seed << " to reproduce)\n";
  return seed;
}

void emit_graph(const msent::Graph& g, const std::string& out_path) {
  if (out_path.empty())
    msent::write_edge_list(g, std::cout);
  else
    write_text_file(out_path, msent::write_edge_list(g));
}

json fit_to_json(const msent::RegressionFit& fit) {
  json coeffs = json::object();
  const int off = fit.intercept ? 1 : 0;
  if (fit.intercept)
    coeffs["const"] = {{"value", fit.coefficients(0)},
                       {"se", fit.std_errors(0)},
                       {"t", fit.t_values(0)},
                       {"p", fit.p_values(0)}};
  for (size_t i = 0; i < fit.predictor_names.size(); ++i) {
    const int j = static_cast<int>(i) + off;
    coeffs[fit.predictor_names[i]] = {{"value", fit.coefficients(j)},
                                      {"se", fit.std_errors(j)},
                                      {"t", fit.t_values(j)},
                                      {"p", fit.p_values(j)}};
  }
  return json{{"predictors", fit.predictor_names},
              {"coefficients", coeffs},
              {"r2", fit.r2},
              {"adjusted_r2", fit.adjusted_r2},
              {"f_statistic", fit.f_statistic},
              {"prob_f", fit.prob_f},
              {"rss", fit.rss},
              {"n_obs", fit.n_obs}};
}

struct GenArgs {
  std::string family;
  int n = 0, m = 2, rows = 0, cols = 0, k = 4, d = 4;
  double p = 0.1;
  std::optional<uint64_t> seed;
  std::string out;
  bool as_json = false;
};

int run_gen(const GenArgs& a) {
  msent::Graph g;
  uint64_t seed_used = 0;
  if (a.family == "grid") {
    g = msent::grid2d(a.rows, a.cols);
  } else {
    seed_used = ensure_seed(a.seed);
    const msent::Seed s{seed_used};
    if (a.family == "ba")
      g = msent::barabasi_albert(a.n, a.m, s);
    else if (a.family == "ring")
      g = msent::random_ring(a.n, a.k, a.p, s);
    else if (a.family == "regular")
      g = msent::random_regular(a.n, a.d, s);
    else if (a.family == "er")
      g = msent::erdos_renyi_gnm(a.n, a.m, s);
    else
      throw msent::param_error("unknown family: " + a.family +
                               " (expected ba|grid|ring|regular|er)");
  }
  emit_graph(g, a.out);
  if (a.as_json) {
    json j{{"family", a.family},
           {"n", g.node_count()},
           {"m_edges", g.edges().size()},
           {"out", a.out.empty() ? json() : json(a.out)}};
    if (a.family != "grid") j["seed"] = seed_used;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

struct ReduceArgs {
  std::string input;
  double fraction = 0.5;
  std::string family = "edge";
  int k = 0;
  int max_levels = 20;
  double max_level_reduction = 0.35;
  std::optional<uint64_t> seed;
  std::string out;
  bool as_json = false;
};

int run_reduce(const ReduceArgs& a) {
  const msent::Graph g = msent::load_edge_list_file(a.input);
  const msent::CoarsenFamily family = msent::parse_coarsen_family(a.family);
  const msent::CoarseSequence seq =
      msent::coarsen_to(g, a.fraction, family, a.k, a.max_levels, a.max_level_reduction);
  const int k_used = std::min(a.k > 0 ? a.k : std::min(40, seq.target_nodes), g.node_count());
  const double eps =
      msent::rss_measure(g, seq, msent::spectral_basis(msent::laplacian(g), k_used));

  json levels = json::array();
  for (const msent::ContractionLevel& lv : seq.levels)
    levels.push_back({{"n_fine", lv.n_fine}, {"n_coarse", lv.n_coarse}, {"r", lv.reduction_ratio()}});
  json sidecar{{"input", a.input},
               {"n", g.node_count()},
               {"target_fraction", seq.target_fraction},
               {"target_nodes", seq.target_nodes},
               {"final_nodes", seq.final_graph().node_count()},
               {"final_edges", seq.final_graph().edges().size()},
               {"reached_target", seq.reached_target},
               {"stop_reason", seq.stop_reason},
               {"overall_reduction", seq.overall_reduction()},
               {"k", k_used},
               {"eps", eps},
               {"levels", levels}};
  if (a.seed) sidecar["seed"] = *a.seed;

  emit_graph(seq.final_graph(), a.out);
  if (!a.out.empty()) write_text_file(a.out + ".json", sidecar.dump(2) + "\n");
  if (a.as_json) std::cout << sidecar.dump(2) << "\n";
  return 0;
}

struct EntropyArgs {
  std::string input;
  bool as_json = false;
};

int run_entropy(const EntropyArgs& a) {
  const msent::Graph g = msent::load_edge_list_file(a.input);
  const msent::EncodedGraph enc = msent::szip_encode(g);
  std::cout << json{{"n", g.node_count()},
                    {"edges", g.edges().size()},
                    {"b1_bits", enc.b1.size()},
                    {"b2_bits", enc.b2.size()},
                    {"coded_b1_bits", enc.coded_b1.size()},
                    {"coded_b2_bits", enc.coded_b2.size()},
                    {"L_bits", enc.length_bits()}}
                   .dump(a.as_json ? -1 : 2)
            << "\n";
  return 0;
}

struct LpEntropyArgs {
  std::string input;
  std::string scorer = "adamic-adar";
  bool as_json = false;
};

int run_lp_entropy(const LpEntropyArgs& a) {
  const msent::Graph g = msent::binarize(msent::load_edge_list_file(a.input));
  const msent::LinkScorer scorer = msent::parse_link_scorer(a.scorer);
  const std::vector<msent::RankRecord> ranks = msent::loo_ranks(g, scorer);
  const msent::RankEntropy h = msent::rank_entropy(ranks, g);
  std::cout << json{{"n", g.node_count()},
                    {"E", g.edges().size()},
                    {"scorer", a.scorer},
                    {"B", h.bins},
                    {"R_max", h.rank_max},
                    {"clamped", h.clamped},
                    {"H", h.entropy}}
                   .dump(a.as_json ? -1 : 2)
            << "\n";
  return 0;
}

struct BaselineArgs {
  int n = 0;
  int64_t m = 0;
  int replicas = 10;
  std::string scorer = "adamic-adar";
  bool skip_h = false;
  std::optional<uint64_t> seed;
  bool as_json = false;
};

int run_baseline(const BaselineArgs& a) {
  const uint64_t seed = ensure_seed(a.seed);
  const msent::BaselineEnsemble ens = msent::make_ensemble(
      a.n, a.m, a.replicas, msent::Seed{seed}, msent::parse_link_scorer(a.scorer), !a.skip_h);
  json j{{"n", ens.n},
         {"m_edges", ens.m_edges},
         {"replicas", ens.count},
         {"seed", seed},
         {"scorer", a.scorer},
         {"l_values", ens.l_values},
         {"mean_l", ens.mean_l()}};
  if (!ens.h_values.empty()) {
    j["h_values"] = ens.h_values;
    j["mean_h"] = ens.mean_h();
  }
  if (a.as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "mean L over " << ens.count << " baselines: " << msent::format_weight(ens.mean_l())
              << " bits\n";
    if (!ens.h_values.empty())
      std::cout << "mean H over " << ens.count << " baselines: "
                << msent::format_weight(ens.mean_h()) << "\n";
  }
  return 0;
}

struct PipelineArgs {
  std::string corpus;
  std::string out;
  msent::RunConfig run;
  std::optional<uint64_t> seed;
  bool as_json = false;
};

int run_pipeline(PipelineArgs a) {
  a.run.seed = msent::Seed{ensure_seed(a.seed)};
  const json manifest_in = json::parse(read_text_file(a.corpus));
  const json& list = manifest_in.is_object() && manifest_in.contains("graphs")
                         ? manifest_in["graphs"]
                         : manifest_in;
  if (!list.is_array())
    throw msent::parse_error("corpus manifest must be a JSON array of {path, id, family}", 0);
  std::vector<msent::CorpusInput> inputs;
  const fs::path base = fs::path(a.corpus).parent_path();
  for (const json& item : list) {
    msent::CorpusInput in;
    in.path = item.at("path").get<std::string>();
    if (!fs::path(in.path).is_absolute() && !base.empty())
      in.path = (base / in.path).string();
    in.id = item.contains("id") ? item["id"].get<std::string>() : fs::path(in.path).stem().string();
    in.family = item.contains("family") ? item["family"].get<std::string>() : "";
    inputs.push_back(std::move(in));
  }

  msent::CorpusResult res = msent::run_corpus(inputs, a.run);
  const std::string csv_path = (fs::path(a.out) / "trajectories.csv").string();
  const std::string manifest_path = (fs::path(a.out) / "manifest.json").string();
  write_text_file(csv_path, res.csv);
  write_text_file(manifest_path, res.manifest.dump(2) + "\n");
  for (const std::string& s : res.skipped) std::cerr << "skipped " << s << "\n";
  if (a.as_json) {
    std::cout << json{{"trajectories", csv_path},
                      {"manifest", manifest_path},
                      {"graphs", res.trajectories.size()},
                      {"skipped", res.skipped},
                      {"seed", a.run.seed.value}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "wrote " << csv_path << " (" << res.trajectories.size() << " graphs, "
              << res.skipped.size() << " skipped)\n";
  }
  return 0;
}

struct ClusterArgs {
  std::string trajectories;
  int k = 3;
  int restarts = 50;
  int components = 2;
  bool use_h = false;
  bool standardize = false;
  std::optional<uint64_t> seed;
  std::string out = ".";
  bool as_json = false;
};

int run_cluster(const ClusterArgs& a) {
  const uint64_t seed = ensure_seed(a.seed);
  std::ifstream in(a.trajectories);
  if (!in) throw msent::parse_error("cannot open trajectories CSV: " + a.trajectories, 0);
  const msent::FeatureMatrix fm = msent::feature_matrix(msent::read_trajectory_csv(in), a.use_h);
  if (fm.values.rows() < 1) throw msent::param_error("no complete trajectory rows to cluster");

  Eigen::MatrixXd points = fm.values;
  if (a.standardize) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      const double mean = points.col(c).mean();
      const double sd = std::sqrt((points.col(c).array() - mean).square().sum() /
                                  std::max<Eigen::Index>(1, points.rows() - 1));
      if (sd > 0.0) points.col(c) = (points.col(c).array() - mean) / sd;
    }
  }
  const msent::KMeansResult km = msent::kmeans(points, a.k, msent::Seed{seed}, a.restarts);

  std::string assign_csv = "graph_id,family,cluster\n";
  for (size_t i = 0; i < fm.ids.size(); ++i)
    assign_csv += msent::detail::csv_field(fm.ids[i]) + "," +
                  msent::detail::csv_field(fm.labels[i]) + "," +
                  std::to_string(km.assignments[i]) + "\n";
  const std::string assign_path = (fs::path(a.out) / "assignments.csv").string();
  write_text_file(assign_path, assign_csv);

  json pca_json;
  std::string pca_path;
  if (fm.values.rows() >= 2) {
    const msent::PcaResult pc = msent::pca(fm.values, std::min<int>(a.components, static_cast<int>(fm.values.cols())));
    std::string pca_csv = "graph_id,family";
    for (Eigen::Index c = 0; c < pc.scores.cols(); ++c)
      pca_csv += ",pc" + std::to_string(c + 1);
    pca_csv += "\n";
    for (size_t i = 0; i < fm.ids.size(); ++i) {
      pca_csv += msent::detail::csv_field(fm.ids[i]) + "," + msent::detail::csv_field(fm.labels[i]);
      for (Eigen::Index c = 0; c < pc.scores.cols(); ++c)
        pca_csv += "," + msent::format_weight(pc.scores(static_cast<Eigen::Index>(i), c));
      pca_csv += "\n";
    }
    pca_path = (fs::path(a.out) / "pca.csv").string();
    write_text_file(pca_path, pca_csv);
    pca_json = {{"explained_variance_ratio", pc.explained_variance_ratio},
                {"dropped_columns", pc.dropped_columns}};
  }

  std::vector<int> sizes(static_cast<size_t>(a.k), 0);
  for (int c : km.assignments) ++sizes[static_cast<size_t>(c)];
  if (a.as_json) {
    json j{{"rows", fm.values.rows()},      {"excluded", fm.excluded_rows},
           {"k", a.k},                      {"seed", seed},
           {"inertia", km.inertia},         {"cluster_sizes", sizes},
           {"assignments", assign_path}};
    if (!pca_path.empty()) {
      j["pca"] = pca_path;
      j["pca_summary"] = pca_json;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << assign_path;
    if (!pca_path.empty()) std::cout << " and " << pca_path;
    std::cout << " (inertia " << msent::format_weight(km.inertia) << ")\n";
  }
  return 0;
}

struct RegressArgs {
  std::string trajectories;
  std::string target = "aa_h100";
  bool use_h = false;
  std::string out;
  bool as_json = false;
};

int run_regress(const RegressArgs& a) {
  if (a.target != "aa_h100")
    throw msent::param_error("unsupported target: " + a.target + " (expected aa_h100)");
  std::ifstream in(a.trajectories);
  if (!in) throw msent::parse_error("cannot open trajectories CSV: " + a.trajectories, 0);
  const msent::RegressData data =
      msent::regression_data(msent::read_trajectory_csv(in), a.use_h);
  const msent::ModelsReport report = msent::build_models(data.features, data.y);

  json models = json::array();
  for (size_t i = 0; i < report.fits.size(); ++i) {
    json m = fit_to_json(report.fits[i]);
    m["name"] = "Model " + std::to_string(i + 1);
    models.push_back(std::move(m));
  }
  const json j{{"target", a.target},
               {"feature_source", a.use_h ? "rank" : "compression"},
               {"rows", data.features.values.rows()},
               {"excluded", data.features.excluded_rows},
               {"models", models},
               {"f_test_first_vs_last",
                {{"f", report.first_vs_last.f},
                 {"p", report.first_vs_last.p},
                 {"df1", report.first_vs_last.df1},
                 {"df2", report.first_vs_last.df2}}}};
  if (!a.out.empty()) write_text_file(a.out, j.dump(2) + "\n");
  if (a.as_json || a.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < report.fits.size(); ++i) {
      const msent::RegressionFit& fit = report.fits[i];
      std::cout << "Model " << (i + 1) << ": R2=" << msent::format_weight(fit.r2)
                << " adjR2=" << msent::format_weight(fit.adjusted_r2)
                << " ProbF=" << msent::format_weight(fit.prob_f) << "\n";
    }
    std::cout << "first vs last: F=" << msent::format_weight(report.first_vs_last.f)
              << " p=" << msent::format_weight(report.first_vs_last.p) << "\n";
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale structural entropy of undirected networks"};
  app.set_version_flag("--version", std::string("msent ") + msent::kVersion + " (csv schema " +
                                        msent::kCsvSchemaVersion + ")");
  app.require_subcommand(1);

  CommonDefaults defaults;
  try {
    defaults = load_config_defaults(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file; explicit flags override its values");

  // gen ----------------------------------------------------------------
  GenArgs gen;
  gen.seed = defaults.seed_set ? std::optional<uint64_t>(defaults.run.seed.value) : std::nullopt;
  gen.out = defaults.out;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic graph as an edge list");
  gen_cmd->add_option("--family", gen.family, "ba|grid|ring|regular|er")->required();
  gen_cmd->add_option("--n", gen.n, "node count");
  gen_cmd->add_option("--m", gen.m, "edges per new node (ba) or total edges (er)");
  gen_cmd->add_option("--rows", gen.rows, "grid rows");
  gen_cmd->add_option("--cols", gen.cols, "grid columns");
  gen_cmd->add_option("--k", gen.k, "ring lattice neighbors per node (even)");
  gen_cmd->add_option("--p", gen.p, "ring shortcut probability");
  gen_cmd->add_option("--d", gen.d, "regular graph degree");
  auto* gen_seed = gen_cmd->add_option("--seed", "RNG seed (derived and printed if omitted)");
  gen_cmd->add_option("--out", gen.out, "output edge list path (stdout if omitted)");
  gen_cmd->add_flag("--json", gen.as_json, "print a JSON summary to stdout");

  // reduce --------------------------------------------------------------
  ReduceArgs reduce;
  reduce.k = defaults.run.k;
  auto* reduce_cmd = app.add_subcommand("reduce", "spectrally coarsen a graph to a node fraction");
  reduce_cmd->add_option("--input", reduce.input, "edge list file")->required();
  reduce_cmd->add_option("--fraction", reduce.fraction, "target node fraction in (0,1)")->required();
  reduce_cmd->add_option("--family", reduce.family, "edge|neighborhood");
  reduce_cmd->add_option("--k", reduce.k, "spectral subspace size (0: automatic)");
  reduce_cmd->add_option("--max-levels", reduce.max_levels, "maximum number of levels");
  reduce_cmd->add_option("--max-level-reduction", reduce.max_level_reduction,
                         "node-fraction cap removed per level");
  auto* reduce_seed = reduce_cmd->add_option("--seed", "echoed into the sidecar (reduction is deterministic)");
  reduce_cmd->add_option("--out", reduce.out, "output edge list path; sidecar goes to <out>.json");
  reduce_cmd->add_flag("--json", reduce.as_json, "print the sidecar JSON to stdout");

  // entropy ---------------------------------------------------------------
  EntropyArgs entropy;
  auto* entropy_cmd = app.add_subcommand("entropy", "compression length L(G) in bits");
  entropy_cmd->add_option("--input", entropy.input, "edge list file")->required();
  entropy_cmd->add_flag("--json", entropy.as_json, "print a JSON summary");

  // lp-entropy --------------------------------------------------------------
  LpEntropyArgs lp;
  lp.scorer = msent::link_scorer_name(defaults.run.scorer);
  auto* lp_cmd = app.add_subcommand("lp-entropy", "leave-one-out link-prediction rank entropy H(G)");
  lp_cmd->add_option("--input", lp.input, "edge list file")->required();
  lp_cmd->add_option("--scorer", lp.scorer, "jaccard|adamic-adar");
  lp_cmd->add_flag("--json", lp.as_json, "print a JSON summary");

  // baseline -------------------------------------------------------------
  BaselineArgs baseline;
  baseline.replicas = defaults.run.replicas;
  baseline.scorer = msent::link_scorer_name(defaults.run.scorer);
  baseline.seed = defaults.seed_set ? std::optional<uint64_t>(defaults.run.seed.value) : std::nullopt;
  auto* baseline_cmd = app.add_subcommand("baseline", "entropies of matched uniform random baselines");
  baseline_cmd->add_option("--n", baseline.n, "node count")->required();
  baseline_cmd->add_option("--m", baseline.m, "edge count")->required();
  baseline_cmd->add_option("--replicas", baseline.replicas, "number of baseline graphs");
  baseline_cmd->add_option("--scorer", baseline.scorer, "jaccard|adamic-adar");
  baseline_cmd->add_flag("--skip-h", baseline.skip_h, "skip the rank-entropy measurements");
  auto* baseline_seed = baseline_cmd->add_option("--seed", "RNG seed (derived and printed if omitted)");
  baseline_cmd->add_flag("--json", baseline.as_json, "print a JSON summary");

  // pipeline -------------------------------------------------------------
  PipelineArgs pipeline;
  pipeline.run = defaults.run;
  pipeline.seed = defaults.seed_set ? std::optional<uint64_t>(defaults.run.seed.value) : std::nullopt;
  pipeline.out = defaults.out.empty() ? "results" : defaults.out;
  std::string pipeline_scorer = msent::link_scorer_name(defaults.run.scorer);
  std::string pipeline_family = defaults.run.family == msent::CoarsenFamily::edge ? "edge" : "neighborhood";
  auto* pipeline_cmd = app.add_subcommand("pipeline", "multiscale entropy trajectories for a corpus");
  pipeline_cmd->add_option("--corpus", pipeline.corpus, "JSON manifest: [{path, id, family}]")->required();
  pipeline_cmd->add_option("--out", pipeline.out, "output directory");
  auto* pipeline_seed = pipeline_cmd->add_option("--seed", "base seed (derived and printed if omitted)");
  pipeline_cmd->add_option("--scales", pipeline.run.scales, "node fractions, descending")->delimiter(',');
  pipeline_cmd->add_option("--scorer", pipeline_scorer, "jaccard|adamic-adar");
  pipeline_cmd->add_option("--family", pipeline_family, "edge|neighborhood");
  pipeline_cmd->add_option("--k", pipeline.run.k, "spectral subspace size (0: automatic)");
  pipeline_cmd->add_option("--replicas", pipeline.run.replicas, "baseline graphs per scale");
  pipeline_cmd->add_option("--budget", pipeline.run.budget_seconds,
                           "per-graph seconds before rank entropy is skipped (0: unlimited)");
  pipeline_cmd->add_option("--workers", pipeline.run.workers, "worker threads (0: automatic)");
  pipeline_cmd->add_flag("--chain", pipeline.run.chain_scales,
                         "reduce each scale from the previous one instead of the original");
  pipeline_cmd->add_flag("--json", pipeline.as_json, "print a JSON summary");

  // cluster ----------------------------------------------------------------
  ClusterArgs cluster;
  cluster.seed = defaults.seed_set ? std::optional<uint64_t>(defaults.run.seed.value) : std::nullopt;
  if (!defaults.out.empty()) cluster.out = defaults.out;
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means + PCA over multiscale entropy vectors");
  cluster_cmd->add_option("--trajectories", cluster.trajectories, "trajectories CSV")->required();
  cluster_cmd->add_option("--k", cluster.k, "cluster count");
  cluster_cmd->add_option("--restarts", cluster.restarts, "k-means restarts");
  cluster_cmd->add_option("--components", cluster.components, "PCA components to project");
  cluster_cmd->add_flag("--h-features", cluster.use_h, "use normalized rank entropies as features");
  cluster_cmd->add_flag("--standardize", cluster.standardize, "z-score features before k-means");
  auto* cluster_seed = cluster_cmd->add_option("--seed", "RNG seed (derived and printed if omitted)");
  cluster_cmd->add_option("--out", cluster.out, "output directory");
  cluster_cmd->add_flag("--json", cluster.as_json, "print a JSON summary");

  // regress -----------------------------------------------------------------
  RegressArgs regress;
  regress.out = "";
  auto* regress_cmd = app.add_subcommand("regress", "nested models predicting full-scale rank entropy");
  regress_cmd->add_option("--trajectories", regress.trajectories, "trajectories CSV")->required();
  regress_cmd->add_option("--target", regress.target, "response to predict (aa_h100)");
  regress_cmd->add_flag("--h-features", regress.use_h, "use normalized rank entropies as predictors");
  regress_cmd->add_option("--out", regress.out, "write the JSON report to this path");
  regress_cmd->add_flag("--json", regress.as_json, "print the JSON report to stdout");

  // Let app-wide options such as --config appear after the subcommand name.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto opt_seed = [](CLI::Option* o) -> std::optional<uint64_t> {
    if (o->count() == 0) return std::nullopt;
    return o->as<uint64_t>();
  };

  try {
    if (gen_cmd->parsed()) {
      if (gen_seed->count()) gen.seed = opt_seed(gen_seed);
      return run_gen(gen);
    }
    if (reduce_cmd->parsed()) {
      if (reduce_seed->count()) reduce.seed = opt_seed(reduce_seed);
      return run_reduce(reduce);
    }
    if (entropy_cmd->parsed()) return run_entropy(entropy);
    if (lp_cmd->parsed()) return run_lp_entropy(lp);
    if (baseline_cmd->parsed()) {
      if (baseline_seed->count()) baseline.seed = opt_seed(baseline_seed);
      return run_baseline(baseline);
    }
    if (pipeline_cmd->parsed()) {
      if (pipeline_seed->count()) pipeline.seed = opt_seed(pipeline_seed);
      pipeline.run.scorer = msent::parse_link_scorer(pipeline_scorer);
      pipeline.run.family = msent::parse_coarsen_family(pipeline_family);
      return run_pipeline(pipeline);
    }
    if (cluster_cmd->parsed()) {
      if (cluster_seed->count()) cluster.seed = opt_seed(cluster_seed);
      return run_cluster(cluster);
    }
    if (regress_cmd->parsed()) return run_regress(regress);
  } catch (const msent::param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const msent::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const msent::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
