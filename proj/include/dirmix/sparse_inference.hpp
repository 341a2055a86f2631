#pragma once

#include <string>
#include <vector>

#include "dirmix/dense_inference.hpp"
#include "dirmix/model.hpp"

namespace dirmix {

// Nodes are observation positions; an edge joins two positions that share a
// cause with beta > eps for both tokens.
struct InteractionGraph {
  int n = 0;
  std::vector<SubsetMask> adj;  // adj[i] = neighbor mask of node i (no self-loop)

  bool has_edge(int i, int j) const { return (adj[i] >> j) & 1; }
};

// Rooted tree decomposition: bags[t] is the position set of node t and
// parent[t] points toward the root (parent[root] = -1).
struct TreeDecomposition {
  std::vector<SubsetMask> bags;
  std::vector<int> parent;
  int root = -1;
  int width = -1;  // max |bag| - 1
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

InteractionGraph interaction_graph(const Model& model, const ObservationSeq& obs,
                                   double eps = 0.0);

// Greedy min-fill elimination (ties broken by lowest node index); the width
// is an upper bound on the true treewidth.  Bag count <= max(n, 1) and the
// root is the bag with the largest index.
TreeDecomposition tree_decompose(const InteractionGraph& graph);

// Same bags with the parent relation re-oriented toward new_root.
TreeDecomposition reroot(const TreeDecomposition& td, int new_root);

// Checks coverage, edge coverage and the running-intersection property;
// violations are reported, not thrown.
ValidationReport validate_decomposition(const InteractionGraph& graph,
                                        const TreeDecomposition& td);

// First bag (by index) whose position set contains j, or -1 if none.
int assign_bag(const TreeDecomposition& td, SubsetMask j);

// p~(target) by leaf-to-root elimination over bag-local polynomials.  At
// each edge the variables lost toward the parent are split into
// required = lost & target and forbidden = lost \ target before the residue
// multiplies the parent polynomial.
double sparse_coefficient(const Model& model, const ObservationSeq& obs,
                          const TreeDecomposition& td, SubsetMask target,
                          double eps = 0.0);

// Posterior means restricted to J within each cause's support; the needed
// p~(W \ J) coefficients are memoized across causes by target mask.
InferenceResult sparse_posterior_mean(const Model& model, const ObservationSeq& obs,
                                      const TreeDecomposition& td, double eps = 0.0);

}  // namespace dirmix
