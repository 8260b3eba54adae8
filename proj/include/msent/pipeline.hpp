#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msent/analytics.hpp"
#include "msent/coarsen.hpp"
#include "msent/errors.hpp"
#include "msent/graph.hpp"
#include "msent/linkpred.hpp"
#include "msent/normalize.hpp"
#include "msent/rng.hpp"
#include "msent/szip.hpp"
#include "msent/version.hpp"

namespace msent {

// Shared knobs for a multiscale run. Scales must be unique, in (0, 1], and
// sorted descending.
struct RunConfig {
  Seed seed{0};
  std::vector<double> scales{1.0, 0.8, 0.6, 0.4, 0.2};
  LinkScorer scorer = LinkScorer::adamic_adar;
  CoarsenFamily family = CoarsenFamily::edge;
  int k = 0;              // 0: per-scale default min(40, ceil(scale * N))
  int replicas = 10;      // baseline graphs per (graph, scale)
  double budget_seconds = 0.0;  // > 0: skip rank entropy once a graph exceeds it
  int workers = 0;        // 0: hardware concurrency
  bool chain_scales = false;    // reduce each scale from the previous one
};

inline void validate(const RunConfig& cfg) {
  if (cfg.scales.empty()) throw param_error("config needs at least one scale");
  for (double s : cfg.scales)
    if (!(s > 0.0 && s <= 1.0)) throw param_error("scales must lie in (0, 1]");
  for (size_t i = 1; i < cfg.scales.size(); ++i)
    if (cfg.scales[i] >= cfg.scales[i - 1])
      throw param_error("scales must be unique and sorted descending");
  if (cfg.replicas < 1) throw param_error("config needs replicas >= 1");
  if (cfg.k < 0) throw param_error("config k must be >= 0");
  if (cfg.workers < 0) throw param_error("config workers must be >= 0");
  if (cfg.budget_seconds < 0.0) throw param_error("config budget must be >= 0");
}

// One scale of one graph. Values not computed (failed scale, skipped rank
// entropy) are NaN, and clamped is -1.
struct ScaleRecord {
  double scale = 1.0;
  int n_r = 0;
  int64_t m_r = 0;
  double l_raw = std::numeric_limits<double>::quiet_NaN();
  double l_norm = std::numeric_limits<double>::quiet_NaN();
  double h_raw = std::numeric_limits<double>::quiet_NaN();
  double h_norm = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  int64_t clamped = -1;
  std::string status = "ok";  // "ok" | "h_skipped" | "failed:<reason>"

  bool failed() const { return status.rfind("failed:", 0) == 0; }
  bool has_h() const { return !std::isnan(h_norm); }
};

struct EntropyTrajectory {
  std::string graph_id;
  std::string family;
  std::vector<ScaleRecord> records;  // one per configured scale, same order
};

// Computes every scale of one graph: coarsen (identity at scale 1), binarize,
// measure compression and rank entropies, and normalize each against
// baselines matched to the reduced size. Baseline seeds derive from
// (config seed, graph id, scale index), so corpus results do not depend on
// evaluation order.
inline EntropyTrajectory run_graph(const Graph& g, const std::string& graph_id,
                                   const std::string& family, const RunConfig& cfg) {
  validate(cfg);
  if (g.node_count() < 10) throw param_error("pipeline graphs need at least 10 nodes");
  EntropyTrajectory traj;
  traj.graph_id = graph_id;
  traj.family = family;

  const auto start = std::chrono::steady_clock::now();
  auto over_budget = [&] {
    if (cfg.budget_seconds <= 0.0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() > cfg.budget_seconds;
  };

  const int n0 = g.node_count();
  Graph chained = g;  // previous scale's result when chain_scales is set
  for (size_t si = 0; si < cfg.scales.size(); ++si) {
    const double scale = cfg.scales[si];
    ScaleRecord rec;
    rec.scale = scale;
    try {
      Graph reduced = binarize(g);
      rec.eps = 0.0;
      if (scale < 1.0) {
        const Graph& base = cfg.chain_scales ? chained : g;
        const int want = std::max(
            1, static_cast<int>(std::ceil(scale * static_cast<double>(n0))));
        if (want < base.node_count()) {
          const double frac = static_cast<double>(want) / base.node_count();
          CoarseSequence seq = coarsen_to(base, frac, cfg.family, cfg.k);
          const int k_used = cfg.k > 0 ? std::min(cfg.k, base.node_count())
                                       : std::min(40, seq.target_nodes);
          rec.eps = rss_measure(base, seq, spectral_basis(laplacian(base), k_used));
          reduced = binarize(seq.final_graph());
        } else {
          reduced = binarize(base);
        }
        if (cfg.chain_scales) chained = reduced;
      }
      rec.n_r = reduced.node_count();
      rec.m_r = static_cast<int64_t>(reduced.edges().size());

      const Seed ens_seed = derive_seed(cfg.seed, hash64(graph_id), static_cast<uint64_t>(si));
      const BaselineEnsemble ens_l =
          make_ensemble(rec.n_r, rec.m_r, cfg.replicas, ens_seed, cfg.scorer, false);
      rec.l_raw = static_cast<double>(compression_entropy(reduced));
      rec.l_norm = normalized_compression(reduced, ens_l);
      if (over_budget()) {
        rec.status = "h_skipped";
      } else {
        // A rank-entropy failure (e.g. too few reduced nodes for the bin
        // rule) spoils only the H side; the L values above stand.
        try {
          const BaselineEnsemble ens_h =
              make_ensemble(rec.n_r, rec.m_r, cfg.replicas, ens_seed, cfg.scorer, true);
          const RankEntropy h = rank_entropy(loo_ranks(reduced, cfg.scorer), reduced);
          rec.h_raw = h.entropy;
          rec.h_norm = normalized_lp_entropy(reduced, ens_h, cfg.scorer);
          rec.clamped = static_cast<int64_t>(h.clamped);
        } catch (const std::exception& e) {
          rec.status = std::string("failed:") + e.what();
        }
      }
    } catch (const std::exception& e) {
      rec.status = std::string("failed:") + e.what();
    }
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Corpus runner
// ---------------------------------------------------------------------------

struct CorpusInput {
  std::string path;
  std::string id;
  std::string family;
};

struct CorpusResult {
  std::vector<EntropyTrajectory> trajectories;
  std::vector<std::string> skipped;  // "path: reason" for unreadable inputs
  std::string csv;
  nlohmann::json manifest;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), ',', ';');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

inline std::string csv_value(double v) { return std::isnan(v) ? std::string() : format_weight(v); }

}  // namespace detail

inline std::string trajectory_csv_header() {
  return std::string("# schema=") + kCsvSchemaVersion +
         "\ngraph_id,family,scale,n_r,m_r,L_raw,L_norm,H_raw,H_norm,eps,clamped,status\n";
}

inline std::string trajectory_csv(const std::vector<EntropyTrajectory>& trajectories) {
  std::string out = trajectory_csv_header();
  for (const EntropyTrajectory& t : trajectories) {
    for (const ScaleRecord& r : t.records) {
      out += detail::csv_field(t.graph_id);
      out += ',';
      out += detail::csv_field(t.family);
      out += ',';
      out += detail::csv_value(r.scale);
      out += ',';
      out += r.failed() ? std::string() : std::to_string(r.n_r);
      out += ',';
      out += r.failed() ? std::string() : std::to_string(r.m_r);
      out += ',';
      out += detail::csv_value(r.l_raw);
      out += ',';
      out += detail::csv_value(r.l_norm);
      out += ',';
      out += detail::csv_value(r.h_raw);
      out += ',';
      out += detail::csv_value(r.h_norm);
      out += ',';
      out += detail::csv_value(r.eps);
      out += ',';
      out += r.clamped >= 0 ? std::to_string(r.clamped) : std::string();
      out += ',';
      out += detail::csv_field(r.status);
      out += '\n';
    }
  }
  return out;
}

// Runs every readable input through run_graph. Work is spread over workers
// pulling from a shared queue, but results live in slots indexed by input
// position, so the outputs are identical for any worker count.
inline CorpusResult run_corpus(const std::vector<CorpusInput>& inputs, const RunConfig& cfg) {
  validate(cfg);
  const size_t n = inputs.size();
  std::vector<EntropyTrajectory> slots(n);
  std::vector<std::string> errors(n);
  std::vector<double> seconds(n, 0.0);

  auto work_one = [&](size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Graph g = load_edge_list_file(inputs[i].path);
      slots[i] = run_graph(g, inputs[i].id, inputs[i].family, cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  unsigned workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, n == 0 ? 1 : static_cast<unsigned>(n));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) work_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work_one(i);
      });
    for (std::thread& t : pool) t.join();
  }

  CorpusResult res;
  nlohmann::json graphs = nlohmann::json::array();
  for (size_t i = 0; i < n; ++i) {
    nlohmann::json entry{{"path", inputs[i].path},
                         {"id", inputs[i].id},
                         {"family", inputs[i].family},
                         {"seconds", seconds[i]}};
    if (!errors[i].empty()) {
      res.skipped.push_back(inputs[i].path + ": " + errors[i]);
      entry["skipped"] = errors[i];
    } else {
      res.trajectories.push_back(std::move(slots[i]));
    }
    graphs.push_back(std::move(entry));
  }
  res.csv = trajectory_csv(res.trajectories);
  res.manifest = nlohmann::json{
      {"version", kVersion},
      {"csv_schema", kCsvSchemaVersion},
      {"config",
       {{"seed", cfg.seed.value},
        {"scales", cfg.scales},
        {"scorer", link_scorer_name(cfg.scorer)},
        {"family", cfg.family == CoarsenFamily::edge ? "edge" : "neighborhood"},
        {"k", cfg.k},
        {"replicas", cfg.replicas},
        {"budget_seconds", cfg.budget_seconds},
        {"workers", cfg.workers},
        {"chain_scales", cfg.chain_scales}}},
      {"graphs", std::move(graphs)}};
  return res;
}

// ---------------------------------------------------------------------------
// Reading trajectories back (for the clustering/regression stages)
// ---------------------------------------------------------------------------

inline std::vector<EntropyTrajectory> read_trajectory_csv(std::istream& in) {
  std::vector<EntropyTrajectory> out;
  std::string line;
  uint64_t line_no = 0;
  auto parse_double = [](const std::string& s) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("graph_id,", 0) == 0) continue;
    std::vector<std::string> f;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) f.push_back(field);
    while (f.size() < 12) f.emplace_back();
    if (f.size() != 12) throw parse_error("trajectory row has too many fields", line_no);
    try {
      ScaleRecord rec;
      rec.scale = parse_double(f[2]);
      rec.n_r = f[3].empty() ? 0 : std::stoi(f[3]);
      rec.m_r = f[4].empty() ? 0 : std::stoll(f[4]);
      rec.l_raw = parse_double(f[5]);
      rec.l_norm = parse_double(f[6]);
      rec.h_raw = parse_double(f[7]);
      rec.h_norm = parse_double(f[8]);
      rec.eps = parse_double(f[9]);
      rec.clamped = f[10].empty() ? -1 : std::stoll(f[10]);
      rec.status = f[11];
      if (out.empty() || out.back().graph_id != f[0] || out.back().family != f[1]) {
        out.push_back({f[0], f[1], {}});
      }
      out.back().records.push_back(std::move(rec));
    } catch (const std::invalid_argument&) {
      throw parse_error("trajectory row has a malformed number", line_no);
    } catch (const std::out_of_range&) {
      throw parse_error("trajectory row has an out-of-range number", line_no);
    }
  }
  return out;
}

namespace detail {

inline std::vector<double> trajectory_scales(const std::vector<EntropyTrajectory>& trajectories) {
  std::vector<double> scales;
  for (const EntropyTrajectory& t : trajectories)
    for (const ScaleRecord& r : t.records)
      if (std::find(scales.begin(), scales.end(), r.scale) == scales.end())
        scales.push_back(r.scale);
  std::sort(scales.begin(), scales.end(), std::greater<>());
  return scales;
}

inline std::vector<double> trajectory_row(const EntropyTrajectory& t,
                                          const std::vector<double>& scales,
                                          bool use_h_features) {
  std::vector<double> row(scales.size(), std::numeric_limits<double>::quiet_NaN());
  for (const ScaleRecord& r : t.records) {
    const auto it = std::find(scales.begin(), scales.end(), r.scale);
    if (it != scales.end())
      row[static_cast<size_t>(it - scales.begin())] = use_h_features ? r.h_norm : r.l_norm;
  }
  return row;
}

inline bool complete_row(const std::vector<double>& row) {
  return std::none_of(row.begin(), row.end(), [](double v) { return std::isnan(v); });
}

inline FeatureMatrix pack_rows(const std::vector<EntropyTrajectory>& trajectories,
                               const std::vector<double>& scales,
                               const std::vector<std::vector<double>>& rows,
                               const std::vector<size_t>& keep, int excluded) {
  FeatureMatrix fm;
  fm.excluded_rows = excluded;
  for (double s : scales)
    fm.column_names.push_back("H_" + std::to_string(static_cast<int>(std::lround(s * 100))));
  fm.values.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(scales.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    const EntropyTrajectory& t = trajectories[keep[i]];
    fm.ids.push_back(t.graph_id);
    fm.labels.push_back(t.family);
    for (size_t j = 0; j < scales.size(); ++j)
      fm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[keep[i]][j];
  }
  return fm;
}

}  // namespace detail

// Multiscale feature rows for clustering/regression: one column per scale in
// descending order, filled with L_norm (or H_norm when use_h_features).
// Column names follow the scale percents (H_100 ... H_20). Rows missing any
// value are excluded and counted.
inline FeatureMatrix feature_matrix(const std::vector<EntropyTrajectory>& trajectories,
                                    bool use_h_features = false) {
  const std::vector<double> scales = detail::trajectory_scales(trajectories);
  std::vector<std::vector<double>> rows;
  std::vector<size_t> keep;
  int excluded = 0;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    rows.push_back(detail::trajectory_row(trajectories[i], scales, use_h_features));
    if (detail::complete_row(rows.back()))
      keep.push_back(i);
    else
      ++excluded;
  }
  return detail::pack_rows(trajectories, scales, rows, keep, excluded);
}

// Aligned (features, response) rows for the nested models: features as in
// feature_matrix, response = normalized rank entropy at the largest scale.
// Rows missing either side are excluded.
struct RegressData {
  FeatureMatrix features;
  Eigen::VectorXd y;
};

inline RegressData regression_data(const std::vector<EntropyTrajectory>& trajectories,
                                   bool use_h_features = false) {
  const std::vector<double> scales = detail::trajectory_scales(trajectories);
  const double top_scale = scales.empty() ? 1.0 : scales.front();
  std::vector<std::vector<double>> rows;
  std::vector<size_t> keep;
  std::vector<double> ys;
  int excluded = 0;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    rows.push_back(detail::trajectory_row(trajectories[i], scales, use_h_features));
    double y = std::numeric_limits<double>::quiet_NaN();
    for (const ScaleRecord& r : trajectories[i].records)
      if (r.scale == top_scale) y = r.h_norm;
    if (detail::complete_row(rows.back()) && !std::isnan(y)) {
      keep.push_back(i);
      ys.push_back(y);
    } else {
      ++excluded;
    }
  }
  RegressData data;
  data.features = detail::pack_rows(trajectories, scales, rows, keep, excluded);
  data.y.resize(static_cast<Eigen::Index>(ys.size()));
  for (size_t i = 0; i < ys.size(); ++i) data.y(static_cast<Eigen::Index>(i)) = ys[i];
  return data;
}

}  // namespace msent
