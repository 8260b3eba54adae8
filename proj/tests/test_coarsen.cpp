#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "msent/msent.hpp"
#include "oracles.hpp"

using msent::ContractionLevel;
using msent::CoarsenFamily;
using msent::CoarseSequence;
using msent::Graph;
using msent::SpectralBasis;

namespace {

// Dense reference for the similarity measure: build the within-set
// averaging projector P explicitly and evaluate
// max_x ||x - Px||_L / ||x||_L over the basis columns.
double oracle_rss(const Graph& g_fine, const std::vector<int>& membership, int n_final,
                  const SpectralBasis& basis) {
  const int n = g_fine.node_count();
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> size(static_cast<size_t>(n_final), 0);
  for (int v = 0; v < n; ++v) ++size[static_cast<size_t>(membership[static_cast<size_t>(v)])];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (membership[static_cast<size_t>(i)] == membership[static_cast<size_t>(j)])
        proj(i, j) = 1.0 / size[static_cast<size_t>(membership[static_cast<size_t>(i)])];
  const Eigen::MatrixXd l = msent::laplacian(g_fine).mat;
  double worst = 0.0;
  for (int c = 0; c < basis.k; ++c) {
    const Eigen::VectorXd x = basis.vectors.col(c);
    const Eigen::VectorXd d = x - proj * x;
    const double den2 = x.transpose() * l * x;
    if (den2 < 1e-12) continue;
    const double num2 = d.transpose() * l * d;
    worst = std::max(worst, std::sqrt(std::max(0.0, num2) / den2));
  }
  return worst;
}

ContractionLevel make_level(int n_fine, std::vector<std::vector<int>> sets) {
  ContractionLevel level;
  level.n_fine = n_fine;
  level.n_coarse = static_cast<int>(sets.size());
  level.membership.assign(static_cast<size_t>(n_fine), -1);
  for (size_t s = 0; s < sets.size(); ++s)
    for (int v : sets[s]) level.membership[static_cast<size_t>(v)] = static_cast<int>(s);
  level.sets = std::move(sets);
  return level;
}

bool connected(const Graph& g) {
  auto comp = msent::connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

}  // namespace

TEST_CASE("spectral basis returns ascending orthonormal eigenpairs", "[coarsen]") {
  SECTION("path null vector") {
    auto basis = msent::spectral_basis(msent::laplacian(testutil::path_graph(3)), 1);
    REQUIRE(basis.k == 1);
    CHECK(basis.values[0] == Catch::Approx(0.0).margin(1e-10));
    for (int i = 0; i < 3; ++i)
      CHECK(basis.vectors(i, 0) == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-9));
  }

  SECTION("four-cycle eigenvalues") {
    auto basis = msent::spectral_basis(msent::laplacian(testutil::cycle_graph(4)), 3);
    CHECK(basis.values[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(basis.values[1] == Catch::Approx(2.0).margin(1e-10));
    CHECK(basis.values[2] == Catch::Approx(2.0).margin(1e-10));
  }

  SECTION("grid eigenvalues match the closed form") {
    auto basis = msent::spectral_basis(msent::laplacian(msent::grid2d(10, 10)), 5);
    auto exact = testutil::grid_eigenvalues(10, 10);
    for (int i = 0; i < 5; ++i)
      CHECK(basis.values[static_cast<size_t>(i)] ==
            Catch::Approx(exact[static_cast<size_t>(i)]).margin(1e-8));
  }

  SECTION("columns are orthonormal") {
    auto basis = msent::spectral_basis(msent::laplacian(testutil::random_graph(15, 0.3, 3)), 6);
    Eigen::MatrixXd gram = basis.vectors.transpose() * basis.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("sign convention pins each vector deterministically") {
    auto basis = msent::spectral_basis(msent::laplacian(testutil::path_graph(5)), 5);
    for (int c = 0; c < 5; ++c) {
      Eigen::Index arg;
      basis.vectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(basis.vectors(arg, c) > 0.0);
    }
  }

  SECTION("k out of range is rejected") {
    auto lap = msent::laplacian(testutil::path_graph(3));
    CHECK_THROWS_AS(msent::spectral_basis(lap, 0), msent::param_error);
    CHECK_THROWS_AS(msent::spectral_basis(lap, 4), msent::param_error);
  }
}

TEST_CASE("contraction sums crossing weights and drops self-loops", "[coarsen]") {
  SECTION("an edge contracted into one set leaves a single bare node") {
    Graph g = testutil::complete_graph(2);
    Graph c = msent::contract(g, make_level(2, {{0, 1}}));
    REQUIRE(c.node_count() == 1);
    CHECK(c.edge_count() == 0);
    CHECK(msent::laplacian(c).mat(0, 0) == 0.0);
  }

  SECTION("path with one merged end") {
    Graph c = msent::contract(testutil::path_graph(3), make_level(3, {{0, 1}, {2}}));
    Eigen::MatrixXd want(2, 2);
    want << 1, -1, -1, 1;
    CHECK((msent::laplacian(c).mat - want).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("four-cycle pairs merge into a double edge") {
    Graph c = msent::contract(testutil::cycle_graph(4), make_level(4, {{0, 1}, {2, 3}}));
    REQUIRE(c.node_count() == 2);
    REQUIRE(c.edge_count() == 1);
    CHECK(c.edges()[0].w == 2.0);
  }

  SECTION("matches the membership-matrix congruence on random graphs") {
    std::mt19937_64 eng(17);
    for (int trial = 0; trial < 12; ++trial) {
      Graph g = msent::barabasi_albert(24, 2, msent::Seed{static_cast<uint64_t>(trial)});
      // Grow random connected sets around a few roots.
      std::vector<int> member(24, -1);
      int next = 0;
      for (int v = 0; v < 24; ++v) {
        if (member[static_cast<size_t>(v)] >= 0) continue;
        member[static_cast<size_t>(v)] = next;
        if (eng() % 2 == 0) {
          for (const auto& nb : g.neighbors(v))
            if (member[static_cast<size_t>(nb.node)] < 0 && eng() % 2 == 0)
              member[static_cast<size_t>(nb.node)] = next;
        }
        ++next;
      }
      ContractionLevel level;
      level.n_fine = 24;
      level.n_coarse = next;
      level.membership = member;
      level.sets.resize(static_cast<size_t>(next));
      for (int v = 0; v < 24; ++v)
        level.sets[static_cast<size_t>(member[static_cast<size_t>(v)])].push_back(v);

      Graph c = msent::contract(g, level);
      const Eigen::MatrixXd want = testutil::oracle_contract_laplacian(g, level);
      CHECK((msent::laplacian(c).mat - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SECTION("disconnected contraction sets are rejected") {
    CHECK_THROWS_AS(msent::contract(testutil::path_graph(3), make_level(3, {{0, 2}, {1}})),
                    msent::param_error);
  }
}

TEST_CASE("edge variation costs measure subspace disagreement", "[coarsen]") {
  SECTION("identical basis rows cost nothing") {
    Graph g = testutil::path_graph(2);
    SpectralBasis basis;
    basis.k = 2;
    basis.vectors = Eigen::MatrixXd::Ones(2, 2);
    basis.values = Eigen::VectorXd::Zero(2);
    auto costs = msent::edge_variation_costs(g, basis);
    REQUIRE(costs.size() == 1);
    CHECK(costs[0] == 0.0);
  }

  SECTION("the constant vector alone costs nothing anywhere") {
    Graph g = testutil::random_graph(10, 0.4, 21);
    auto basis = msent::spectral_basis(msent::laplacian(g), 1);
    for (double c : msent::edge_variation_costs(g, basis)) CHECK(c == Catch::Approx(0.0).margin(1e-16));
  }

  SECTION("path symmetry makes its two edges equally expensive") {
    Graph g = testutil::path_graph(3);
    auto basis = msent::spectral_basis(msent::laplacian(g), 2);
    auto costs = msent::edge_variation_costs(g, basis);
    REQUIRE(costs.size() == 2);
    CHECK(costs[0] == Catch::Approx(costs[1]).margin(1e-12));
    CHECK(costs[0] > 0.0);
  }

  SECTION("edge weight scales its cost linearly") {
    Graph g1 = Graph::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    Graph g2 = Graph::from_edges(4, {{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    SpectralBasis basis;  // shared synthetic basis isolates the weight factor
    basis.k = 1;
    basis.vectors = Eigen::MatrixXd(4, 1);
    basis.vectors << 0.1, 0.4, 0.2, 0.8;
    basis.values = Eigen::VectorXd::Zero(1);
    auto c1 = msent::edge_variation_costs(g1, basis);
    auto c2 = msent::edge_variation_costs(g2, basis);
    CHECK(c2[0] == Catch::Approx(2.0 * c1[0]));
    CHECK(c2[1] == Catch::Approx(c1[1]));
  }
}

TEST_CASE("neighborhood variation costs average the incident edges", "[coarsen]") {
  SECTION("equal rows across a star cost nothing") {
    Graph g = testutil::star_graph(4);
    SpectralBasis basis;
    basis.k = 2;
    basis.vectors = Eigen::MatrixXd::Ones(5, 2) * 0.3;
    basis.values = Eigen::VectorXd::Zero(2);
    auto costs = msent::neighborhood_variation_costs(g, basis);
    CHECK(costs[0] == 0.0);
  }

  SECTION("path center cost is the mean of its edge costs") {
    Graph g = testutil::path_graph(3);
    auto basis = msent::spectral_basis(msent::laplacian(g), 2);
    auto edge_costs = msent::edge_variation_costs(g, basis);
    auto node_costs = msent::neighborhood_variation_costs(g, basis);
    CHECK(node_costs[1] == Catch::Approx((edge_costs[0] + edge_costs[1]) / 2.0).margin(1e-12));
  }

  SECTION("costs are invariant under relabeling") {
    Graph g = testutil::path_graph(4);
    std::vector<int> perm{3, 2, 1, 0};
    Graph h = testutil::relabel(g, perm);
    auto cg = msent::neighborhood_variation_costs(g, msent::spectral_basis(msent::laplacian(g), 3));
    auto ch = msent::neighborhood_variation_costs(h, msent::spectral_basis(msent::laplacian(h), 3));
    std::sort(cg.begin(), cg.end());
    std::sort(ch.begin(), ch.end());
    for (size_t i = 0; i < cg.size(); ++i) CHECK(cg[i] == Catch::Approx(ch[i]).margin(1e-10));
  }
}

TEST_CASE("multilevel reduction hits its target sizes", "[coarsen]") {
  SECTION("a single edge halves to one node") {
    CoarseSequence seq = msent::coarsen_to(testutil::complete_graph(2), 0.5);
    CHECK(seq.final_graph().node_count() == 1);
    CHECK(seq.reached_target);
    CHECK(seq.stop_reason == "target");
  }

  SECTION("four-cycle halves in two capped levels") {
    CoarseSequence seq = msent::coarsen_to(testutil::cycle_graph(4), 0.5);
    CHECK(seq.final_graph().node_count() == 2);
    CHECK(seq.levels.size() == 2);  // per-level cap of 35% forces two levels
    CHECK(seq.reached_target);
  }

  SECTION("every requested fraction lands within one node of its target") {
    Graph g = msent::barabasi_albert(200, 2, msent::Seed{12});
    for (double f : {0.8, 0.6, 0.4, 0.2}) {
      CoarseSequence seq = msent::coarsen_to(g, f);
      const int want = static_cast<int>(std::ceil(f * 200));
      INFO("fraction " << f << " -> " << seq.final_graph().node_count() << " nodes");
      CHECK(std::abs(seq.final_graph().node_count() - want) <= 1);
      CHECK(seq.reached_target);
    }
  }

  SECTION("per-level reduction respects the cap") {
    CoarseSequence seq = msent::coarsen_to(msent::grid2d(10, 10), 0.2);
    for (const auto& level : seq.levels) {
      CHECK(level.reduction_ratio() <=
            std::max(0.35, 1.0 / static_cast<double>(level.n_fine)) + 1e-12);
      CHECK(level.n_coarse < level.n_fine);
    }
  }

  SECTION("node counts decrease strictly and Laplacians stay valid") {
    CoarseSequence seq = msent::coarsen_to(msent::random_ring(60, 4, 0.1, msent::Seed{4}), 0.3);
    for (size_t i = 1; i < seq.graphs.size(); ++i) {
      CHECK(seq.graphs[i].node_count() < seq.graphs[i - 1].node_count());
      CHECK(testutil::laplacian_valid(seq.graphs[i]));
      CHECK(connected(seq.graphs[i]));
    }
  }

  SECTION("levels recorded in the sequence reproduce each graph") {
    CoarseSequence seq = msent::coarsen_to(msent::grid2d(6, 6), 0.4);
    REQUIRE(seq.graphs.size() == seq.levels.size() + 1);
    for (size_t i = 0; i < seq.levels.size(); ++i)
      CHECK(msent::contract(seq.graphs[i], seq.levels[i]) == seq.graphs[i + 1]);
  }

  SECTION("neighborhood family also reaches its target") {
    CoarseSequence seq =
        msent::coarsen_to(msent::random_ring(30, 4, 0.0, msent::Seed{1}),
                          0.5, CoarsenFamily::neighborhood);
    INFO("stop=" << seq.stop_reason << " final=" << seq.final_graph().node_count());
    CHECK(std::abs(seq.final_graph().node_count() - 15) <= 1);
    for (size_t i = 1; i < seq.graphs.size(); ++i) CHECK(connected(seq.graphs[i]));
  }

  SECTION("components coarsen independently toward proportional targets") {
    Graph g = testutil::disjoint_union(testutil::cycle_graph(20), testutil::cycle_graph(30));
    CoarseSequence seq = msent::coarsen_to(g, 0.5);
    CHECK(std::abs(seq.final_graph().node_count() - 25) <= 1);
    auto final_comp = msent::connected_components(seq.final_graph());
    CHECK(*std::max_element(final_comp.begin(), final_comp.end()) == 1);

    // No composed set straddles the two fine components.
    auto member = msent::composed_membership(seq);
    std::vector<std::set<int>> fine_comp_of_set(
        static_cast<size_t>(seq.final_graph().node_count()));
    for (int v = 0; v < 50; ++v)
      fine_comp_of_set[static_cast<size_t>(member[static_cast<size_t>(v)])].insert(v < 20 ? 0
                                                                                          : 1);
    for (const auto& comps : fine_comp_of_set) CHECK(comps.size() == 1);
  }

  SECTION("level cap bounds how far one level can go") {
    CoarseSequence seq = msent::coarsen_to(msent::grid2d(6, 6), 0.2, CoarsenFamily::edge, 0, 1);
    CHECK(seq.stop_reason == "max_levels");
    CHECK_FALSE(seq.reached_target);
    CHECK(seq.final_graph().node_count() >= 24);  // 36 - floor(0.35*36)
  }

  SECTION("a hub graph under the edge family stops on negligible progress") {
    CoarseSequence seq = msent::coarsen_to(testutil::star_graph(120), 0.5);
    CHECK(seq.stop_reason == "negligible");
    CHECK_FALSE(seq.reached_target);
    CHECK(seq.final_graph().node_count() == 120);
  }

  SECTION("invalid arguments are rejected") {
    Graph g = testutil::path_graph(4);
    CHECK_THROWS_AS(msent::coarsen_to(g, 0.0), msent::param_error);
    CHECK_THROWS_AS(msent::coarsen_to(g, 1.0), msent::param_error);
    CHECK_THROWS_AS(msent::coarsen_to(g, 0.5, CoarsenFamily::edge, -1), msent::param_error);
    CHECK_THROWS_AS(msent::coarsen_to(g, 0.5, CoarsenFamily::edge, 0, 0), msent::param_error);
  }

  SECTION("two synthetic levels of 35% compound to 57.75%") {
    CoarseSequence seq;
    ContractionLevel l1;
    l1.n_fine = 400;
    l1.n_coarse = 260;
    ContractionLevel l2;
    l2.n_fine = 260;
    l2.n_coarse = 169;
    seq.levels = {l1, l2};
    CHECK(seq.overall_reduction() == Catch::Approx(0.5775).margin(1e-12));
  }
}

TEST_CASE("cut weights are conserved by contraction", "[coarsen]") {
  Graph g = msent::barabasi_albert(80, 3, msent::Seed{6});
  CoarseSequence seq = msent::coarsen_to(g, 0.4);
  auto member = msent::composed_membership(seq);
  const Graph& final = seq.final_graph();

  std::map<std::pair<int, int>, double> fine_cross;
  for (const auto& e : g.edges()) {
    int a = member[static_cast<size_t>(e.u)];
    int b = member[static_cast<size_t>(e.v)];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    fine_cross[{a, b}] += e.w;
  }
  REQUIRE(final.edge_count() == fine_cross.size());
  for (const auto& e : final.edges()) {
    auto it = fine_cross.find({e.u, e.v});
    REQUIRE(it != fine_cross.end());
    CHECK(e.w == Catch::Approx(it->second).margin(1e-9));
  }
}

TEST_CASE("similarity measure reports subspace distortion", "[coarsen]") {
  SECTION("an empty sequence distorts nothing") {
    Graph g = testutil::cycle_graph(6);
    CoarseSequence seq;
    seq.graphs.push_back(g);
    seq.target_fraction = 1.0;
    seq.target_nodes = 6;
    auto basis = msent::spectral_basis(msent::laplacian(g), 3);
    CHECK(msent::rss_measure(g, seq, basis) == 0.0);
  }

  SECTION("four-cycle halved matches the dense reference") {
    Graph g = testutil::cycle_graph(4);
    CoarseSequence seq = msent::coarsen_to(g, 0.5);
    auto basis = msent::spectral_basis(msent::laplacian(g), 2);
    const double eps = msent::rss_measure(g, seq, basis);
    const double want = oracle_rss(g, msent::composed_membership(seq),
                                   seq.final_graph().node_count(), basis);
    CHECK(eps == Catch::Approx(want).margin(1e-10));
    CHECK(eps >= 0.0);
  }

  SECTION("random reductions match the dense reference") {
    for (uint64_t seed = 0; seed < 4; ++seed) {
      Graph g = msent::barabasi_albert(40, 2, msent::Seed{seed});
      CoarseSequence seq = msent::coarsen_to(g, 0.5);
      auto basis = msent::spectral_basis(msent::laplacian(g), 8);
      const double eps = msent::rss_measure(g, seq, basis);
      const double want = oracle_rss(g, msent::composed_membership(seq),
                                     seq.final_graph().node_count(), basis);
      CHECK(eps == Catch::Approx(want).margin(1e-9));
    }
  }

  SECTION("lifted signals keep their energy exactly") {
    Graph g = msent::grid2d(8, 8);
    CoarseSequence seq = msent::coarsen_to(g, 0.5);
    auto member = msent::composed_membership(seq);
    const Graph& coarse = seq.final_graph();
    std::mt19937_64 eng(23);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> y(static_cast<size_t>(coarse.node_count()));
      for (auto& v : y) v = normal(eng);
      std::vector<double> x(static_cast<size_t>(g.node_count()));
      for (int v = 0; v < g.node_count(); ++v)
        x[static_cast<size_t>(v)] = y[static_cast<size_t>(member[static_cast<size_t>(v)])];
      const double fine_energy = msent::laplacian_energy(g, x);
      const double coarse_energy = msent::laplacian_energy(coarse, y);
      REQUIRE(fine_energy == Catch::Approx(coarse_energy).margin(1e-8));
    }
  }
}

TEST_CASE("halving a large grid keeps its leading spectrum aligned", "[coarsen-heavy]") {
  Graph g = msent::grid2d(50, 50);
  CoarseSequence seq = msent::coarsen_to(g, 0.5);
  REQUIRE(seq.reached_target);

  const auto exact = testutil::grid_eigenvalues(50, 50);
  const Eigen::VectorXd coarse_spec = testutil::size_weighted_coarse_spectrum(
      seq.final_graph(), msent::composed_membership(seq));
  for (int i = 1; i <= 10; ++i) {
    const double fine = exact[static_cast<size_t>(i)];
    const double coarse = coarse_spec(i);
    INFO("eigenvalue " << i << ": fine " << fine << " vs coarse " << coarse);
    CHECK(std::abs(coarse - fine) <= 0.5 * fine);
  }
}
