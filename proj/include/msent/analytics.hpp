#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "msent/errors.hpp"
#include "msent/rng.hpp"
#include "msent/stats.hpp"

namespace msent {

// One row per graph: its multiscale entropy vector (columns ordered by
// descending scale), plus ids and optional family labels. Rows with missing
// scale values are excluded before fitting and counted in excluded_rows.
struct FeatureMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;
  int excluded_rows = 0;
};

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct KMeansResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // k x d
  double inertia = 0.0;
  int iterations = 0;
};

namespace detail {

inline int nearest_centroid(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids, int i) {
  int best = 0;
  double best_d = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = (x.row(i) - centroids.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline Eigen::MatrixXd kmeans_plus_plus(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<uint64_t>(n))));
  Eigen::VectorXd dist2(n);
  for (int i = 0; i < n; ++i) dist2(i) = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    int pick;
    if (total > 0.0) {
      const double r = rng.unit() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += dist2(i);
        if (cum > r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    }
    centroids.row(c) = x.row(pick);
    for (int i = 0; i < n; ++i)
      dist2(i) = std::min(dist2(i), (x.row(i) - centroids.row(c)).squaredNorm());
  }
  return centroids;
}

inline KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centroids, int max_iters) {
  const int n = static_cast<int>(x.rows());
  const int k = static_cast<int>(centroids.rows());
  KMeansResult res;
  res.assignments.assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    res.iterations = iter + 1;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(x, centroids, i);
      if (c != res.assignments[static_cast<size_t>(i)]) {
        res.assignments[static_cast<size_t>(i)] = c;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(res.assignments[static_cast<size_t>(i)]) += x.row(i);
      ++counts[static_cast<size_t>(res.assignments[static_cast<size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
        continue;
      }
      // Empty cluster: restart it at the point farthest from its own
      // centroid (lowest index on ties), then reassign that point here.
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const int a = res.assignments[static_cast<size_t>(i)];
        if (counts[static_cast<size_t>(a)] <= 1) continue;  // keep other clusters non-empty
        const double d = (x.row(i) - centroids.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;  // degenerate: fewer distinct points than clusters
      const int old = res.assignments[static_cast<size_t>(far)];
      sums.row(old) -= x.row(far);
      --counts[static_cast<size_t>(old)];
      centroids.row(old) = sums.row(old) / counts[static_cast<size_t>(old)];
      centroids.row(c) = x.row(far);
      res.assignments[static_cast<size_t>(far)] = c;
      counts[static_cast<size_t>(c)] = 1;
      sums.row(c) = x.row(far);
    }
  }
  res.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    res.inertia += (x.row(i) - centroids.row(res.assignments[static_cast<size_t>(i)])).squaredNorm();
  res.centroids = std::move(centroids);
  return res;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by
// inertia. Restart r draws from the RNG stream derived from (seed, r), so
// raising the restart count never changes (or worsens) earlier runs.
inline KMeansResult kmeans(const Eigen::MatrixXd& x, int k, Seed seed, int restarts = 50) {
  const int n = static_cast<int>(x.rows());
  if (n < 1) throw param_error("k-means needs at least one row");
  if (k < 1 || k > n) throw param_error("k-means needs 1 <= k <= rows");
  if (restarts < 1) throw param_error("k-means needs at least one restart");
  constexpr int kMaxIterations = 300;
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(r)));
    KMeansResult res = detail::lloyd(x, detail::kmeans_plus_plus(x, k, rng), kMaxIterations);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

struct PcaResult {
  Eigen::MatrixXd scores;                       // rows x components
  Eigen::MatrixXd directions;                   // kept-columns x components
  std::vector<double> explained_variance_ratio;  // one per component
  std::vector<int> kept_columns;
  std::vector<int> dropped_columns;  // zero-variance inputs
};

// PCA on z-scored columns. Zero-variance columns are dropped (reported in
// dropped_columns); singular directions carry a fixed sign
// (largest-magnitude entry positive). Ratios are fractions of the total
// variance across all kept columns, so they sum to 1 at full rank.
inline PcaResult pca(const Eigen::MatrixXd& x, int components) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw param_error("PCA needs at least two rows");
  if (components < 1 || components > x.cols())
    throw param_error("PCA component count must be in [1, columns]");

  PcaResult res;
  std::vector<double> means, stds;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) {
      res.dropped_columns.push_back(static_cast<int>(c));
    } else {
      res.kept_columns.push_back(static_cast<int>(c));
      means.push_back(mean);
      stds.push_back(sd);
    }
  }
  const int kept = static_cast<int>(res.kept_columns.size());
  if (kept == 0) throw param_error("PCA input has no columns with variance");
  if (components > kept) components = kept;

  Eigen::MatrixXd z(n, kept);
  for (int j = 0; j < kept; ++j)
    z.col(j) = (x.col(res.kept_columns[static_cast<size_t>(j)]).array() -
                means[static_cast<size_t>(j)]) /
               stds[static_cast<size_t>(j)];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd sing = svd.singularValues();
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0.0) {
      v.col(c) = -v.col(c);
      if (c < u.cols()) u.col(c) = -u.col(c);
    }
  }
  const double total_var = sing.array().square().sum();
  res.scores = u.leftCols(components) * sing.head(components).asDiagonal();
  res.directions = v.leftCols(components);
  res.explained_variance_ratio.reserve(static_cast<size_t>(components));
  for (int c = 0; c < components; ++c)
    res.explained_variance_ratio.push_back(total_var > 0.0 ? sing(c) * sing(c) / total_var : 0.0);
  return res;
}

// ---------------------------------------------------------------------------
// OLS regression and nested F-tests
// ---------------------------------------------------------------------------

struct RegressionFit {
  bool intercept = true;
  std::vector<std::string> predictor_names;  // excludes the intercept
  Eigen::VectorXd coefficients;              // intercept first when present
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd residuals;
  double rss = 0.0;
  double tss = 0.0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double f_statistic = 0.0;
  double prob_f = 1.0;
  int n_obs = 0;
  int n_params = 0;  // includes the intercept
};

// Least squares via column-pivoted QR; standard errors from the
// sigma^2 (X'X)^-1 covariance; two-sided t p-values. A constant response
// (zero total variance) reports R^2 = 0 by convention.
inline RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                         bool intercept = true, std::vector<std::string> names = {}) {
  const int n = static_cast<int>(y.size());
  if (x.rows() != n) throw param_error("response and predictors disagree on row count");
  const int p = static_cast<int>(x.cols()) + (intercept ? 1 : 0);
  if (n <= p) throw param_error("regression needs more observations than parameters");
  if (names.empty())
    for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c + 1));
  if (static_cast<Eigen::Index>(names.size()) != x.cols())
    throw param_error("predictor name count does not match columns");

  Eigen::MatrixXd design(n, p);
  if (intercept) design.col(0).setOnes();
  design.rightCols(x.cols()) = x;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    const Eigen::Index bad = qr.colsPermutation().indices()(qr.rank());
    const std::string which =
        (intercept && bad == 0)
            ? "intercept"
            : names[static_cast<size_t>(bad - (intercept ? 1 : 0))];
    throw param_error("singular design matrix: column '" + which + "' is linearly dependent");
  }

  RegressionFit fit;
  fit.intercept = intercept;
  fit.predictor_names = std::move(names);
  fit.n_obs = n;
  fit.n_params = p;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - design * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();
  fit.tss = intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();

  const int dof = n - p;
  const double sigma2 = fit.rss / dof;
  const Eigen::MatrixXd cov = sigma2 * (design.transpose() * design).inverse();
  fit.std_errors.resize(p);
  fit.t_values.resize(p);
  fit.p_values.resize(p);
  for (int j = 0; j < p; ++j) {
    const double se = std::sqrt(std::max(0.0, cov(j, j)));
    fit.std_errors(j) = se;
    double t;
    if (se > 0.0)
      t = fit.coefficients(j) / se;
    else
      t = fit.coefficients(j) == 0.0 ? 0.0
                                     : std::copysign(std::numeric_limits<double>::infinity(),
                                                     fit.coefficients(j));
    fit.t_values(j) = t;
    fit.p_values(j) = student_t_two_sided_p(t, static_cast<double>(dof));
  }

  if (fit.tss > 0.0) {
    fit.r2 = std::clamp(1.0 - fit.rss / fit.tss, 0.0, 1.0);
    fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / dof;
    const int d1 = p - (intercept ? 1 : 0);
    if (d1 > 0) {
      if (fit.rss > 0.0) {
        fit.f_statistic = ((fit.tss - fit.rss) / d1) / (fit.rss / dof);
      } else {
        fit.f_statistic = std::numeric_limits<double>::infinity();
      }
      fit.prob_f = f_survival(fit.f_statistic, static_cast<double>(d1), static_cast<double>(dof));
    }
  }
  return fit;
}

struct FTestResult {
  double f = 0.0;
  double p = 1.0;
  int df1 = 0;
  int df2 = 0;
};

// F-test of a restricted model against a full model fitted on the same
// observations. The restricted predictors must be a subset of the full
// ones.
inline FTestResult nested_f_test(const RegressionFit& restricted, const RegressionFit& full,
                                 int n_obs) {
  if (restricted.n_obs != n_obs || full.n_obs != n_obs)
    throw param_error("nested F-test: models were fitted on different observation counts");
  if (restricted.intercept != full.intercept)
    throw param_error("nested F-test: models disagree on the intercept");
  for (const std::string& name : restricted.predictor_names)
    if (std::find(full.predictor_names.begin(), full.predictor_names.end(), name) ==
        full.predictor_names.end())
      throw param_error("nested F-test: models are not nested (restricted predictor '" + name +
                        "' missing from the full model)");
  FTestResult res;
  res.df1 = full.n_params - restricted.n_params;
  res.df2 = n_obs - full.n_params;
  if (res.df1 == 0) return res;  // identical models: F = 0, p = 1
  if (res.df1 < 0 || res.df2 <= 0) throw param_error("nested F-test: invalid degrees of freedom");
  const double num = std::max(0.0, restricted.rss - full.rss) / res.df1;
  if (full.rss > 0.0)
    res.f = num / (full.rss / res.df2);
  else
    res.f = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  res.p = f_survival(res.f, static_cast<double>(res.df1), static_cast<double>(res.df2));
  return res;
}

// The five cumulative models: model j regresses y on the first j feature
// columns (descending scale order), all with intercepts, plus the
// model-1-vs-model-5 F-test.
struct ModelsReport {
  std::vector<RegressionFit> fits;  // size = column count (5 in the standard run)
  FTestResult first_vs_last;
};

inline ModelsReport build_models(const FeatureMatrix& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.values.rows());
  const int cols = static_cast<int>(x.values.cols());
  if (cols < 1) throw param_error("model building needs at least one feature column");
  if (n < 10) throw param_error("model building needs at least 10 complete rows");
  if (y.size() != n) throw param_error("response length does not match feature rows");
  ModelsReport report;
  report.fits.reserve(static_cast<size_t>(cols));
  for (int j = 1; j <= cols; ++j) {
    std::vector<std::string> names(x.column_names.begin(), x.column_names.begin() + j);
    report.fits.push_back(ols(y, x.values.leftCols(j), true, std::move(names)));
  }
  report.first_vs_last = nested_f_test(report.fits.front(), report.fits.back(), n);
  return report;
}

// ---------------------------------------------------------------------------
// Cluster agreement
// ---------------------------------------------------------------------------

// Adjusted Rand index between two labelings of the same items; 1 means
// identical partitions, ~0 means chance-level agreement.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw param_error("adjusted Rand index needs equal-length labelings");
  const size_t n = a.size();
  if (n < 2) return 1.0;
  const int ka = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
  const int kb = b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1;
  for (int v : a)
    if (v < 0) throw param_error("adjusted Rand index labels must be non-negative");
  for (int v : b)
    if (v < 0) throw param_error("adjusted Rand index labels must be non-negative");
  std::vector<std::vector<int64_t>> table(static_cast<size_t>(ka),
                                          std::vector<int64_t>(static_cast<size_t>(kb), 0));
  std::vector<int64_t> row(static_cast<size_t>(ka), 0), col(static_cast<size_t>(kb), 0);
  for (size_t i = 0; i < n; ++i) {
    ++table[static_cast<size_t>(a[i])][static_cast<size_t>(b[i])];
    ++row[static_cast<size_t>(a[i])];
    ++col[static_cast<size_t>(b[i])];
  }
  auto choose2 = [](int64_t v) { return static_cast<double>(v) * (v - 1) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& r : table)
    for (int64_t v : r) sum_ij += choose2(v);
  for (int64_t v : row) sum_a += choose2(v);
  for (int64_t v : col) sum_b += choose2(v);
  const double total = choose2(static_cast<int64_t>(n));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return sum_ij == expected ? 1.0 : 0.0;
  return (sum_ij - expected) / (max_index - expected);
}

}  // namespace msent
