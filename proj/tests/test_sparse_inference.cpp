#include <doctest.h>

#include <cmath>
#include <random>

#include "dirmix/dense_inference.hpp"
#include "dirmix/sparse_inference.hpp"
#include "test_support.hpp"

using namespace dirmix;
using testsupport::rel_close;
using testsupport::toy_model;
using testsupport::toy_obs;

namespace {

InteractionGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  InteractionGraph g;
  g.n = n;
  g.adj.assign(n, 0);
  for (const auto& [a, b] : edges) {
    g.adj[a] |= bit(b);
    g.adj[b] |= bit(a);
  }
  return g;
}

}  // namespace

TEST_CASE("interaction graph construction") {
  const InteractionGraph toy = interaction_graph(toy_model(), toy_obs());
  CHECK(toy.n == 2);
  CHECK(toy.has_edge(0, 1));

  // Two blocks with no shared cause stay disconnected.
  const Model blocks({1.0, 1.0}, {{0.5, 0.0}, {0.4, 0.0}, {0.0, 0.3}, {0.0, 0.6}});
  const ObservationSeq obs{{0, 1, 2, 3}};
  const InteractionGraph g = interaction_graph(blocks, obs);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(2, 3));
  CHECK(!g.has_edge(0, 2));
  CHECK(!g.has_edge(1, 3));

  // A singleton support contributes no edge.
  const Model singleton({1.0}, {{0.5}, {0.0}});
  const InteractionGraph s = interaction_graph(singleton, ObservationSeq{{0, 1}});
  CHECK(!s.has_edge(0, 1));
}

TEST_CASE("min-fill widths on known graphs") {
  const TreeDecomposition path = tree_decompose(make_graph(3, {{0, 1}, {1, 2}}));
  CHECK(path.width == 1);
  CHECK(path.bags.size() <= 3);

  const TreeDecomposition complete =
      tree_decompose(make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  CHECK(complete.width == 3);

  const TreeDecomposition cycle = tree_decompose(make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  CHECK(cycle.width == 2);

  // Random trees have width one.
  std::mt19937_64 g(61);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(g() % 12);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(g() % v), v);
    const TreeDecomposition td = tree_decompose(make_graph(n, edges));
    CHECK(td.width == 1);
  }
}

TEST_CASE("tree_decompose output always validates") {
  std::mt19937_64 g(67);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(g() % 12);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (g() % 3 == 0) edges.emplace_back(a, b);
      }
    }
    const InteractionGraph graph = make_graph(n, edges);
    const TreeDecomposition td = tree_decompose(graph);
    const ValidationReport report = validate_decomposition(graph, td);
    CHECK(report.ok());
    CHECK(td.bags.size() <= static_cast<std::size_t>(n));
    CHECK(td.root == static_cast<int>(td.bags.size()) - 1);
  }
}

TEST_CASE("validate_decomposition names violations") {
  const InteractionGraph graph = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  TreeDecomposition td;
  td.bags = {bit(0) | bit(1), bit(1) | bit(2)};
  td.parent = {1, -1};
  td.root = 1;
  td.width = 1;
  const ValidationReport report = validate_decomposition(graph, td);
  CHECK(!report.ok());
  bool names_edge = false;
  for (const auto& v : report.violations) {
    names_edge = names_edge || v.find("(0,2)") != std::string::npos;
  }
  CHECK(names_edge);

  // Position 0 in two bags whose connecting bag omits it.
  TreeDecomposition broken;
  broken.bags = {bit(0) | bit(1), bit(1) | bit(2), bit(0) | bit(2)};
  broken.parent = {1, 2, -1};
  broken.root = 2;
  broken.width = 1;
  const ValidationReport ri = validate_decomposition(graph, broken);
  bool names_running = false;
  for (const auto& v : ri.violations) {
    names_running = names_running || v.find("running intersection") != std::string::npos;
  }
  CHECK(names_running);

  // A bag set that misses a position entirely.
  TreeDecomposition uncovered;
  uncovered.bags = {bit(0) | bit(1)};
  uncovered.parent = {-1};
  uncovered.root = 0;
  uncovered.width = 1;
  bool names_coverage = false;
  for (const auto& v : validate_decomposition(graph, uncovered).violations) {
    names_coverage = names_coverage || v.find("position 2") != std::string::npos;
  }
  CHECK(names_coverage);

  const ValidationReport good =
      validate_decomposition(make_graph(3, {{0, 1}, {1, 2}}),
                             tree_decompose(make_graph(3, {{0, 1}, {1, 2}})));
  CHECK(good.ok());
}

TEST_CASE("assign_bag picks the first containing bag") {
  TreeDecomposition td;
  td.bags = {bit(0) | bit(1), bit(1) | bit(2), bit(0) | bit(1) | bit(2)};
  td.parent = {2, 2, -1};
  td.root = 2;
  CHECK(assign_bag(td, bit(1)) == 0);
  CHECK(assign_bag(td, bit(1) | bit(2)) == 1);
  CHECK(assign_bag(td, bit(0) | bit(2)) == 2);
  CHECK(assign_bag(td, bit(3)) == -1);
}

TEST_CASE("sparse coefficient specializes to the dense table") {
  CHECK(sparse_coefficient(toy_model(), toy_obs(),
                           tree_decompose(interaction_graph(toy_model(), toy_obs())),
                           0) == 1.0);

  std::mt19937_64 g(71);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(g() % 9);
    const auto inst = testsupport::random_block_sparse(g, n, 4);
    const InteractionGraph graph = interaction_graph(inst.model, inst.obs);
    const TreeDecomposition td = tree_decompose(graph);
    const TruncatedPoly dense = ptilde_all(inst.model, inst.obs);

    CHECK(rel_close(sparse_coefficient(inst.model, inst.obs, td, full_mask(n)),
                    dense[full_mask(n)], 1e-10));
    for (int k = 0; k < 5; ++k) {
      const SubsetMask target = g() % (full_mask(n) + 1);
      CHECK(rel_close(sparse_coefficient(inst.model, inst.obs, td, target), dense[target],
                      1e-10));
    }
  }
}

TEST_CASE("disconnected blocks factorize the full coefficient") {
  std::mt19937_64 g(73);
  for (int trial = 0; trial < 20; ++trial) {
    const auto left = testsupport::random_block_sparse(g, 3, 3);
    const auto right = testsupport::random_block_sparse(g, 3, 3);
    const int ml = left.model.num_causes();
    const int mr = right.model.num_causes();

    std::vector<double> alpha;
    for (int z = 0; z < ml; ++z) alpha.push_back(left.model.alpha(z));
    for (int z = 0; z < mr; ++z) alpha.push_back(right.model.alpha(z));
    std::vector<std::vector<double>> beta(6, std::vector<double>(ml + mr, 0.0));
    for (int v = 0; v < 3; ++v) {
      for (int z = 0; z < ml; ++z) beta[v][z] = left.model.beta(v, z);
      for (int z = 0; z < mr; ++z) beta[v + 3][ml + z] = right.model.beta(v, z);
    }
    const Model joint(alpha, beta);
    const ObservationSeq obs{{0, 1, 2, 3, 4, 5}};

    const TreeDecomposition td = tree_decompose(interaction_graph(joint, obs));
    const double full = sparse_coefficient(joint, obs, td, full_mask(6));
    const TruncatedPoly dense = ptilde_all(joint, obs);
    CHECK(rel_close(full, dense[0b000111] * dense[0b111000], 1e-9));
  }
}

TEST_CASE("sparse posterior matches dense") {
  // Degenerate single-bag decomposition over a fully supported model.
  const Model model = toy_model();
  const ObservationSeq obs = toy_obs();
  TreeDecomposition single;
  single.bags = {0b11};
  single.parent = {-1};
  single.root = 0;
  single.width = 1;
  const InferenceResult dense = posterior_mean(model, obs);
  const InferenceResult sparse = sparse_posterior_mean(model, obs, single);
  CHECK(rel_close(sparse.probability, dense.probability, 1e-12));
  for (int z = 0; z < 3; ++z) {
    CHECK(rel_close(sparse.theta_mean[z], dense.theta_mean[z], 1e-12));
  }

  std::mt19937_64 g(79);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = testsupport::random_block_sparse(g, 12, 4);
    const TreeDecomposition td = tree_decompose(interaction_graph(inst.model, inst.obs));
    const InferenceResult d = posterior_mean(inst.model, inst.obs);
    const InferenceResult s = sparse_posterior_mean(inst.model, inst.obs, td);
    CHECK(rel_close(d.probability, s.probability, 1e-9));
    double total = 0.0;
    for (int z = 0; z < inst.model.num_causes(); ++z) {
      CHECK(rel_close(d.theta_mean[z], s.theta_mean[z], 1e-9));
      total += s.theta_mean[z];
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("elimination is invariant under re-rooting") {
  std::mt19937_64 g(83);
  for (int trial = 0; trial < 15; ++trial) {
    const auto inst = testsupport::random_block_sparse(g, 8, 3);
    const InteractionGraph graph = interaction_graph(inst.model, inst.obs);
    const TreeDecomposition td = tree_decompose(graph);
    const SubsetMask target = g() % (full_mask(8) + 1);
    const double reference = sparse_coefficient(inst.model, inst.obs, td, target);
    for (int r = 0; r < static_cast<int>(td.bags.size()); ++r) {
      const TreeDecomposition rerooted = reroot(td, r);
      CHECK(validate_decomposition(graph, rerooted).ok());
      CHECK(rel_close(sparse_coefficient(inst.model, inst.obs, rerooted, target), reference,
                      1e-10));
    }
  }
}

TEST_CASE("a stale decomposition is rejected") {
  // At eps = 0.01 the second cause's tiny entries disappear, so the bags
  // built there cannot host its support once eps drops back to zero.
  const Model model({1.0, 1.0}, {{0.5, 0.0}, {0.5, 0.001}, {0.0, 0.001}});
  const ObservationSeq obs{{0, 1, 2}};
  const TreeDecomposition stale = tree_decompose(interaction_graph(model, obs, 0.01));
  CHECK_THROWS_AS(sparse_coefficient(model, obs, stale, full_mask(3), 0.0),
                  DecompositionMismatchError);
  CHECK_NOTHROW(sparse_coefficient(model, obs, stale, full_mask(3), 0.01));
}

TEST_CASE("sparse inference with no observations") {
  const Model model = toy_model();
  const ObservationSeq empty;
  const TreeDecomposition td = tree_decompose(interaction_graph(model, empty));
  CHECK(sparse_coefficient(model, empty, td, 0) == 1.0);
  const InferenceResult r = sparse_posterior_mean(model, empty, td);
  for (int z = 0; z < 3; ++z) {
    CHECK(r.theta_mean[z] == model.alpha(z) / model.alpha_total());
  }
}

TEST_CASE("an unsupported token zeroes the evidence") {
  const Model model({1.0, 1.0}, {{0.5, 0.5}, {0.0, 0.0}});
  const ObservationSeq obs{{0, 1}};
  const TreeDecomposition td = tree_decompose(interaction_graph(model, obs));
  CHECK(sparse_coefficient(model, obs, td, full_mask(2)) == 0.0);
  CHECK_THROWS_AS(sparse_posterior_mean(model, obs, td), DegenerateEvidenceError);
}
