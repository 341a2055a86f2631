#include "dirmix/sparse_inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace dirmix {

InteractionGraph interaction_graph(const Model& model, const ObservationSeq& obs,
                                   double eps) {
  validate_observations(model, obs);
  if (!(eps >= 0.0)) throw DomainError("interaction_graph: eps must be non-negative");
  InteractionGraph g;
  g.n = obs.size();
  g.adj.assign(g.n, 0);
  for (int z = 0; z < model.num_causes(); ++z) {
    const SubsetMask sup = support(model, obs, z, eps);
    if (popcount(sup) < 2) continue;  // singleton supports add no edge
    SubsetMask rest = sup;
    while (rest) {
      const int i = std::countr_zero(rest);
      rest &= rest - 1;
      g.adj[i] |= sup & ~bit(i);
    }
  }
  return g;
}

TreeDecomposition tree_decompose(const InteractionGraph& graph) {
  const int n = graph.n;
  TreeDecomposition td;
  if (n == 0) {
    td.bags = {0};
    td.parent = {-1};
    td.root = 0;
    td.width = -1;
    return td;
  }

  std::vector<SubsetMask> adj = graph.adj;
  SubsetMask alive = full_mask(n);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> position(n, -1);
  td.bags.reserve(n);

  for (int step = 0; step < n; ++step) {
    int best = -1;
    long best_fill = -1;
    for (SubsetMask rest = alive; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      const SubsetMask nb = adj[v] & alive;
      long fill = 0;
      for (SubsetMask r2 = nb; r2;) {
        const int a = std::countr_zero(r2);
        r2 &= r2 - 1;
        fill += popcount(nb & ~adj[a] & ~bit(a));
      }
      fill /= 2;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
      if (best_fill == 0) break;  // cannot improve; lowest index wins ties
    }
    const SubsetMask nb = adj[best] & alive;
    td.bags.push_back(nb | bit(best));
    position[best] = step;
    order.push_back(best);
    for (SubsetMask r2 = nb; r2;) {
      const int a = std::countr_zero(r2);
      r2 &= r2 - 1;
      adj[a] |= nb & ~bit(a);
    }
    alive &= ~bit(best);
  }

  // Parent of bag k: the bag of the earliest-eliminated other vertex in it.
  td.parent.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    int earliest = -1;
    SubsetMask rest = td.bags[k] & ~bit(order[k]);
    while (rest) {
      const int u = std::countr_zero(rest);
      rest &= rest - 1;
      if (earliest < 0 || position[u] < earliest) earliest = position[u];
    }
    td.parent[k] = earliest;
  }
  // A disconnected graph yields a forest; attach the extra roots so the bag
  // edges form one tree (valid: the attached components share no position).
  std::vector<int> roots;
  for (int k = 0; k < n; ++k) {
    if (td.parent[k] < 0) roots.push_back(k);
  }
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    td.parent[roots[i]] = roots.back();
  }
  td.root = roots.back();
  td.width = -1;
  for (const SubsetMask b : td.bags) td.width = std::max(td.width, popcount(b) - 1);
  return reroot(td, n - 1);
}

TreeDecomposition reroot(const TreeDecomposition& td, int new_root) {
  const int nb = static_cast<int>(td.bags.size());
  if (new_root < 0 || new_root >= nb) throw DomainError("reroot: bag index out of range");
  std::vector<std::vector<int>> und(nb);
  for (int t = 0; t < nb; ++t) {
    if (td.parent[t] >= 0) {
      und[t].push_back(td.parent[t]);
      und[td.parent[t]].push_back(t);
    }
  }
  TreeDecomposition out = td;
  out.root = new_root;
  out.parent.assign(nb, -2);
  out.parent[new_root] = -1;
  std::vector<int> stack{new_root};
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int s : und[t]) {
      if (out.parent[s] == -2) {
        out.parent[s] = t;
        stack.push_back(s);
      }
    }
  }
  for (int t = 0; t < nb; ++t) {
    if (out.parent[t] == -2) throw DomainError("reroot: bag edges do not form one tree");
  }
  return out;
}

ValidationReport validate_decomposition(const InteractionGraph& graph,
                                        const TreeDecomposition& td) {
  ValidationReport report;
  const int nb = static_cast<int>(td.bags.size());
  if (nb == 0 || static_cast<int>(td.parent.size()) != nb) {
    report.violations.push_back("tree structure: bag and parent lists are inconsistent");
    return report;
  }
  if (td.root < 0 || td.root >= nb || td.parent[td.root] != -1) {
    report.violations.push_back("tree structure: root is not a parentless bag");
    return report;
  }
  for (int t = 0; t < nb; ++t) {
    if (t != td.root && (td.parent[t] < 0 || td.parent[t] >= nb)) {
      report.violations.push_back("tree structure: bag " + std::to_string(t) +
                                  " has no valid parent");
      return report;
    }
  }
  // Reachability from the root doubles as a cycle check.
  std::vector<std::vector<int>> children(nb);
  for (int t = 0; t < nb; ++t) {
    if (t != td.root) children[td.parent[t]].push_back(t);
  }
  std::vector<char> seen(nb, 0);
  std::vector<int> stack{td.root};
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    if (seen[t]) continue;
    seen[t] = 1;
    for (int s : children[t]) stack.push_back(s);
  }
  for (int t = 0; t < nb; ++t) {
    if (!seen[t]) {
      report.violations.push_back("tree structure: bag " + std::to_string(t) +
                                  " is not connected to the root");
      return report;
    }
  }

  SubsetMask covered = 0;
  for (const SubsetMask b : td.bags) covered |= b;
  for (int i = 0; i < graph.n; ++i) {
    if (!((covered >> i) & 1)) {
      report.violations.push_back("coverage: position " + std::to_string(i) +
                                  " appears in no bag");
    }
  }
  for (int i = 0; i < graph.n; ++i) {
    for (int j = i + 1; j < graph.n; ++j) {
      if (!graph.has_edge(i, j)) continue;
      bool found = false;
      for (const SubsetMask b : td.bags) {
        if (((b >> i) & 1) && ((b >> j) & 1)) {
          found = true;
          break;
        }
      }
      if (!found) {
        report.violations.push_back("edge coverage: edge (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") lies in no bag");
      }
    }
  }
  // Running intersection: the bags holding each position must induce a
  // connected subtree.
  for (int i = 0; i < graph.n; ++i) {
    int start = -1;
    int expected = 0;
    for (int t = 0; t < nb; ++t) {
      if ((td.bags[t] >> i) & 1) {
        if (start < 0) start = t;
        ++expected;
      }
    }
    if (start < 0) continue;
    std::vector<std::vector<int>> und(nb);
    for (int t = 0; t < nb; ++t) {
      if (td.parent[t] >= 0 && ((td.bags[t] >> i) & 1) &&
          ((td.bags[td.parent[t]] >> i) & 1)) {
        und[t].push_back(td.parent[t]);
        und[td.parent[t]].push_back(t);
      }
    }
    int reached = 0;
    std::vector<char> vis(nb, 0);
    std::vector<int> st{start};
    vis[start] = 1;
    while (!st.empty()) {
      const int t = st.back();
      st.pop_back();
      ++reached;
      for (int s : und[t]) {
        if (!vis[s]) {
          vis[s] = 1;
          st.push_back(s);
        }
      }
    }
    if (reached != expected) {
      report.violations.push_back("running intersection: position " + std::to_string(i) +
                                  " induces a disconnected set of bags");
    }
  }
  return report;
}

int assign_bag(const TreeDecomposition& td, SubsetMask j) {
  for (std::size_t t = 0; t < td.bags.size(); ++t) {
    if ((j & ~td.bags[t]) == 0) return static_cast<int>(t);
  }
  return -1;
}

namespace {

// Target-independent part of the elimination: bag variable lists, local
// factor polynomials, and the leaf processing order.
class SparseEngine {
 public:
  SparseEngine(const Model& model, const ObservationSeq& obs, const TreeDecomposition& td,
               double eps)
      : td_(td), n_(obs.size()) {
    validate_observations(model, obs);
    if (!(eps >= 0.0)) throw DomainError("sparse inference: eps must be non-negative");
    const int nb = static_cast<int>(td.bags.size());
    if (nb == 0 || static_cast<int>(td.parent.size()) != nb || td.root < 0 ||
        td.root >= nb || td.parent[td.root] != -1) {
      throw DomainError("sparse inference: malformed tree decomposition");
    }
    SubsetMask covered = 0;
    for (const SubsetMask b : td.bags) {
      if ((b & ~full_mask(n_)) != 0) {
        throw DecompositionMismatchError(
            "decomposition bags mention positions outside the observation sequence");
      }
      covered |= b;
      if (popcount(b) > kMaxMaskCap) {
        throw CapacityError("decomposition bag exceeds the mask cap");
      }
    }
    if (covered != full_mask(n_)) {
      throw DecompositionMismatchError(
          "decomposition does not cover every observation position");
    }

    // Every cause support must fit a bag; supports are cliques of the
    // interaction graph, so this fails only for a stale decomposition.
    supports_.resize(model.num_causes());
    for (int z = 0; z < model.num_causes(); ++z) {
      supports_[z] = support(model, obs, z, eps);
      if (supports_[z] != 0 && assign_bag(td, supports_[z]) < 0) {
        throw DecompositionMismatchError(
            "support of cause " + std::to_string(z) +
            " fits no bag; the decomposition is stale relative to eps");
      }
    }

    vars_.resize(nb);
    polys_.resize(nb);
    for (int t = 0; t < nb; ++t) {
      for (int i = 0; i < n_; ++i) {
        if ((td.bags[t] >> i) & 1) vars_[t].push_back(i);
      }
      const int k = static_cast<int>(vars_[t].size());
      // <beta_J> for J inside this bag, restricted per cause to its support.
      std::vector<double> mom(std::size_t{1} << k, 0.0);
      std::vector<double> prod(std::size_t{1} << k);
      for (int z = 0; z < model.num_causes(); ++z) {
        SubsetMask sup_local = 0;
        for (int li = 0; li < k; ++li) {
          if ((supports_[z] >> vars_[t][li]) & 1) sup_local |= bit(li);
        }
        if (sup_local == 0) continue;
        prod[0] = 1.0;
        const double a = model.alpha(z);
        for (SubsetMask s = (0 - sup_local) & sup_local; s;
             s = (s - sup_local) & sup_local) {
          const SubsetMask low = s & (~s + 1);
          const int li = std::countr_zero(s);
          prod[s] = prod[s ^ low] * model.beta(obs.tokens[vars_[t][li]], z);
          mom[s] += a * prod[s];
          if (s == sup_local) break;
        }
      }

      const std::vector<double> fact = factorial_table(k);
      polys_[t] = TruncatedPoly::one(k, kMaxMaskCap);
      for (SubsetMask jl = 1; jl < (SubsetMask{1} << k); ++jl) {
        if (mom[jl] == 0.0) continue;
        if (assign_bag(td, to_global(t, jl)) != t) continue;
        polys_[t].mul_affine(jl, mom[jl] * fact[popcount(jl) - 1]);
      }
    }

    // Leaf-first order: repeatedly take the lowest-index childless bag.
    std::vector<int> pending(nb, 0);
    for (int t = 0; t < nb; ++t) {
      if (t != td.root) ++pending[td.parent[t]];
    }
    std::set<int> ready;
    for (int t = 0; t < nb; ++t) {
      if (pending[t] == 0 && t != td.root) ready.insert(t);
    }
    while (!ready.empty()) {
      const int t = *ready.begin();
      ready.erase(ready.begin());
      order_.push_back(t);
      const int s = td.parent[t];
      if (--pending[s] == 0 && s != td.root) ready.insert(s);
    }
    if (static_cast<int>(order_.size()) != nb - 1) {
      throw DomainError("sparse inference: decomposition edges contain a cycle");
    }
  }

  int width() const { return td_.width; }

  double coefficient(SubsetMask target) const {
    if ((target & ~full_mask(n_)) != 0) {
      throw DomainError("sparse_coefficient: target outside the observation range");
    }
    std::vector<TruncatedPoly> poly = polys_;
    for (const int t : order_) {
      const int s = td_.parent[t];
      const SubsetMask lost = td_.bags[t] & ~td_.bags[s];
      SubsetMask required = 0;
      SubsetMask forbidden = 0;
      for (std::size_t li = 0; li < vars_[t].size(); ++li) {
        if ((lost >> vars_[t][li]) & 1) {
          if ((target >> vars_[t][li]) & 1) {
            required |= bit(static_cast<int>(li));
          } else {
            forbidden |= bit(static_cast<int>(li));
          }
        }
      }
      // Residue in the parent's variable space: monomials whose lost part is
      // exactly `required`, divided by it and re-indexed.
      const int ks = static_cast<int>(vars_[s].size());
      TruncatedPoly residue = TruncatedPoly::one(ks, kMaxMaskCap);
      residue[0] = 0.0;
      const SubsetMask keep = full_mask(static_cast<int>(vars_[t].size())) &
                              ~(required | forbidden);
      SubsetMask sub = keep;
      for (;;) {
        residue[promote(t, s, sub)] = poly[t][sub | required];
        if (sub == 0) break;
        sub = (sub - 1) & keep;
      }
      poly[s] = poly_mul(poly[s], residue);
    }
    SubsetMask target_local = 0;
    for (std::size_t li = 0; li < vars_[td_.root].size(); ++li) {
      if ((target >> vars_[td_.root][li]) & 1) target_local |= bit(static_cast<int>(li));
    }
    return poly[td_.root][target_local];
  }

  const std::vector<SubsetMask>& supports() const { return supports_; }

 private:
  SubsetMask to_global(int t, SubsetMask local) const {
    SubsetMask g = 0;
    SubsetMask rest = local;
    while (rest) {
      const int li = std::countr_zero(rest);
      rest &= rest - 1;
      g |= bit(vars_[t][li]);
    }
    return g;
  }

  // Map a local mask of bag t (with lost variables cleared) into bag s's
  // local index space; the surviving variables all belong to s.
  SubsetMask promote(int t, int s, SubsetMask local) const {
    SubsetMask out = 0;
    SubsetMask rest = local;
    while (rest) {
      const int li = std::countr_zero(rest);
      rest &= rest - 1;
      const int g = vars_[t][li];
      const auto it = std::lower_bound(vars_[s].begin(), vars_[s].end(), g);
      out |= bit(static_cast<int>(it - vars_[s].begin()));
    }
    return out;
  }

  const TreeDecomposition& td_;
  int n_;
  std::vector<std::vector<int>> vars_;
  std::vector<TruncatedPoly> polys_;
  std::vector<SubsetMask> supports_;
  std::vector<int> order_;
};

}  // namespace

double sparse_coefficient(const Model& model, const ObservationSeq& obs,
                          const TreeDecomposition& td, SubsetMask target, double eps) {
  return SparseEngine(model, obs, td, eps).coefficient(target);
}

InferenceResult sparse_posterior_mean(const Model& model, const ObservationSeq& obs,
                                      const TreeDecomposition& td, double eps) {
  if (model.algebraic()) {
    throw DomainError("sparse_posterior_mean requires a statistical-mode model");
  }
  if (model.alpha_total() <= 0.0) {
    throw DomainError("sparse_posterior_mean: total prior weight must be positive");
  }
  const int n = obs.size();
  const SubsetMask full = full_mask(n);
  const SparseEngine engine(model, obs, td, eps);

  const double pt_full = engine.coefficient(full);
  if (pt_full <= 0.0) {
    throw DegenerateEvidenceError("the observations have probability zero under the model");
  }
  std::unordered_map<SubsetMask, double> memo;
  memo.emplace(full, pt_full);
  const auto ptilde_of = [&](SubsetMask target) {
    const auto it = memo.find(target);
    if (it != memo.end()) return it->second;
    const double value = engine.coefficient(target);
    memo.emplace(target, value);
    return value;
  };

  const int m = model.num_causes();
  const double alpha_total = model.alpha_total();
  const std::vector<double> fact = factorial_table(n);

  InferenceResult result;
  result.method = "sparse";
  result.ptilde_full = pt_full;
  result.probability = pt_full / pochhammer(alpha_total, n);
  result.log_probability = std::log(pt_full) - std::log(pochhammer(alpha_total, n));
  result.theta_mean.resize(m);

  for (int z = 0; z < m; ++z) {
    const SubsetMask sup = engine.supports()[z];
    if (popcount(sup) > kMaxMaskCap) {
      throw CapacityError("cause support too large to enumerate its subsets");
    }
    // Only J within the support contribute: beta_J(z) = 0 elsewhere.
    // Doubling over the packed support subsets, then one pass.
    double acc = 0.0;
    std::vector<double> prods(std::size_t{1} << popcount(sup));
    std::vector<int> sup_vars;
    for (SubsetMask rest = sup; rest;) {
      sup_vars.push_back(std::countr_zero(rest));
      rest &= rest - 1;
    }
    prods[0] = 1.0;
    for (SubsetMask s = 1; s < prods.size(); ++s) {
      const SubsetMask low = s & (~s + 1);
      prods[s] = prods[s ^ low] * model.beta(obs.tokens[sup_vars[std::countr_zero(s)]], z);
    }
    for (SubsetMask s = 0; s < prods.size(); ++s) {
      SubsetMask jg = 0;
      SubsetMask rest = s;
      while (rest) {
        const int li = std::countr_zero(rest);
        rest &= rest - 1;
        jg |= bit(sup_vars[li]);
      }
      acc += prods[s] * fact[popcount(jg)] * ptilde_of(full & ~jg);
    }
    result.theta_mean[z] = model.alpha(z) / (n + alpha_total) * acc / pt_full;
  }

  result.diagnostics["n"] = std::to_string(n);
  result.diagnostics["m"] = std::to_string(m);
  result.diagnostics["width"] = std::to_string(td.width);
  result.diagnostics["bags"] = std::to_string(td.bags.size());
  result.diagnostics["targets"] = std::to_string(memo.size());
  result.diagnostics["eps"] = std::to_string(eps);
  if (eps > 0.0) result.diagnostics["approximate"] = "dropped <beta_J> terms with beta <= eps";
  return result;
}

}  // namespace dirmix
