#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dirmix/baselines.hpp"
#include "dirmix/dense_inference.hpp"
#include "dirmix/model_io.hpp"
#include "dirmix/oracles.hpp"
#include "dirmix/sparse_inference.hpp"

namespace py = pybind11;
using namespace dirmix;

namespace {

ObservationSeq make_obs(const std::vector<int>& tokens) { return ObservationSeq{tokens}; }

py::dict result_dict(const InferenceResult& r) {
  py::dict d;
  d["method"] = r.method;
  d["ptilde"] = r.ptilde_full;
  d["probability"] = r.probability;
  d["log_probability"] = r.log_probability;
  d["theta_mean"] = r.theta_mean;
  d["diagnostics"] = r.diagnostics;
  return d;
}

py::dict decomposition_dict(const TreeDecomposition& td) {
  py::dict d;
  std::vector<std::vector<int>> bags;
  for (const SubsetMask b : td.bags) {
    std::vector<int> bag;
    for (int i = 0; i < 64; ++i) {
      if ((b >> i) & 1) bag.push_back(i);
    }
    bags.push_back(std::move(bag));
  }
  d["bags"] = bags;
  d["parent"] = td.parent;
  d["root"] = td.root;
  d["width"] = td.width;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact marginal inference for Dirichlet-prior mixture models";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<DegenerateEvidenceError>(m, "DegenerateEvidenceError",
                                                  PyExc_RuntimeError);
  py::register_exception<DecompositionMismatchError>(m, "DecompositionMismatchError",
                                                     PyExc_RuntimeError);

  py::class_<Model>(m, "Model")
      .def(py::init<std::vector<double>, std::vector<std::vector<double>>, bool>(),
           py::arg("alpha"), py::arg("beta"), py::arg("algebraic") = false,
           "alpha: one prior weight per cause; beta: one row per vocabulary item, "
           "one column per cause")
      .def_property_readonly("num_causes", &Model::num_causes)
      .def_property_readonly("vocab_size", &Model::vocab_size)
      .def_property_readonly("algebraic", &Model::algebraic)
      .def("alpha", py::overload_cast<int>(&Model::alpha, py::const_))
      .def("beta", &Model::beta);

  m.def("pochhammer", &pochhammer, py::arg("x"), py::arg("k"));
  m.def("digamma", &digamma, py::arg("x"));

  m.def(
      "moments",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        return moments(model, make_obs(obs), cap).values;
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap,
      "All 2^n prior-weighted product moments <beta_J>, indexed by subset mask.");

  m.def(
      "ptilde_all",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        return ptilde_all(model, make_obs(obs), cap).coeff();
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap,
      "All 2^n unnormalized probabilities p~(I), indexed by subset mask.");

  m.def(
      "ptilde",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        const int n = static_cast<int>(obs.size());
        return ptilde_all(model, make_obs(obs), cap)[full_mask(n)];
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap);

  m.def(
      "probability",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        return probability(model, make_obs(obs), cap);
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap);

  m.def(
      "posterior_mean",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        return result_dict(posterior_mean(model, make_obs(obs), cap));
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap,
      "Exact Bayesian posterior mean of the mixture weights (dense algorithm).");

  m.def(
      "interaction_graph",
      [](const Model& model, const std::vector<int>& obs, double eps) {
        const InteractionGraph g = interaction_graph(model, make_obs(obs), eps);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < g.n; ++i) {
          for (int j = i + 1; j < g.n; ++j) {
            if (g.has_edge(i, j)) edges.emplace_back(i, j);
          }
        }
        return edges;
      },
      py::arg("model"), py::arg("obs"), py::arg("eps") = 0.0);

  m.def(
      "tree_decomposition",
      [](const Model& model, const std::vector<int>& obs, double eps) {
        return decomposition_dict(
            tree_decompose(interaction_graph(model, make_obs(obs), eps)));
      },
      py::arg("model"), py::arg("obs"), py::arg("eps") = 0.0);

  m.def(
      "sparse_ptilde",
      [](const Model& model, const std::vector<int>& obs, double eps) {
        const ObservationSeq o = make_obs(obs);
        const TreeDecomposition td = tree_decompose(interaction_graph(model, o, eps));
        return sparse_coefficient(model, o, td, full_mask(o.size()), eps);
      },
      py::arg("model"), py::arg("obs"), py::arg("eps") = 0.0);

  m.def(
      "sparse_posterior_mean",
      [](const Model& model, const std::vector<int>& obs, double eps) {
        const ObservationSeq o = make_obs(obs);
        const TreeDecomposition td = tree_decompose(interaction_graph(model, o, eps));
        return result_dict(sparse_posterior_mean(model, o, td, eps));
      },
      py::arg("model"), py::arg("obs"), py::arg("eps") = 0.0,
      "Posterior mean via tree-decomposition elimination (exact at eps = 0).");

  m.def(
      "brute_force_ptilde",
      [](const Model& model, const std::vector<int>& obs, double budget) {
        return brute_force_ptilde(model, make_obs(obs), budget);
      },
      py::arg("model"), py::arg("obs"), py::arg("budget") = 1e8);
  m.def(
      "partition_ptilde",
      [](const Model& model, const std::vector<int>& obs, double budget) {
        return partition_ptilde(model, make_obs(obs), budget);
      },
      py::arg("model"), py::arg("obs"), py::arg("budget") = 1e8);
  m.def(
      "factor_product_ptilde",
      [](const Model& model, const std::vector<int>& obs, int cap) {
        return factor_product_ptilde(model, make_obs(obs), cap);
      },
      py::arg("model"), py::arg("obs"), py::arg("cap") = kDefaultMaskCap);
  m.def("permanent", &permanent, py::arg("matrix"), py::arg("max_n") = 12);

  m.def(
      "em_max_likelihood",
      [](const Model& model, const std::vector<int>& obs, int max_iters, double tol) {
        EMOptions opts;
        opts.max_iters = max_iters;
        opts.tol = tol;
        const EMResult r = em_max_likelihood(model, make_obs(obs), opts);
        py::dict d;
        d["theta"] = r.theta;
        d["iterations"] = r.iterations;
        d["log_likelihood"] = r.log_likelihood;
        return d;
      },
      py::arg("model"), py::arg("obs"), py::arg("max_iters") = 100000,
      py::arg("tol") = 1e-10);

  m.def(
      "variational_bayes",
      [](const Model& model, const std::vector<int>& obs, int max_iters, double tol) {
        VBOptions opts;
        opts.max_iters = max_iters;
        opts.tol = tol;
        const VBResult r = variational_bayes(model, make_obs(obs), opts);
        py::dict d;
        d["gamma"] = r.gamma;
        d["phi"] = r.phi;
        d["theta_mean"] = r.theta_mean;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("model"), py::arg("obs"), py::arg("max_iters") = 100000,
      py::arg("tol") = 1e-10);

  m.def(
      "gibbs_sample",
      [](const Model& model, const std::vector<int>& obs, long iterations, long burn_in,
         std::uint64_t seed) {
        GibbsOptions opts;
        opts.iterations = iterations;
        opts.burn_in = burn_in;
        opts.seed = seed;
        const GibbsResult r = gibbs_sample(model, make_obs(obs), opts);
        py::dict d;
        d["theta_mean"] = r.theta_mean;
        d["theta_stderr"] = r.theta_stderr;
        d["kept"] = r.kept;
        d["burn_in"] = r.burn_in;
        d["batches"] = r.batches;
        d["seed"] = r.seed;
        return d;
      },
      py::arg("model"), py::arg("obs"), py::arg("iterations") = 1000000,
      py::arg("burn_in") = -1, py::arg("seed") = 1);

  m.def(
      "load_model",
      [](const std::string& path, double alpha_scale, bool algebraic) {
        const ModelFile mf = load_model_file(path, alpha_scale, algebraic);
        return py::make_tuple(mf.model, mf.vocab, mf.causes);
      },
      py::arg("path"), py::arg("alpha_scale") = 1.0, py::arg("algebraic") = false,
      "Returns (model, vocab_labels, cause_labels).");
}
