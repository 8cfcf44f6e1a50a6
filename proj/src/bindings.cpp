#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "oscneg/config.hpp"
#include "oscneg/experiments.hpp"
#include "oscneg/fock_oracle.hpp"
#include "oscneg/gaussian.hpp"
#include "oscneg/spectra.hpp"

namespace py = pybind11;
using namespace oscneg;

namespace {

OscillatorSystem make_system_py(std::shared_ptr<Graph> graph, std::vector<int> region0,
                                std::vector<double> k, double m, double lambda, double g,
                                std::optional<double> beta, const std::string& hp_kind,
                                double hp_c, double hp_delta) {
  DisorderSample sample;
  sample.k = std::move(k);
  ModelParams params{m, lambda, g};
  HpSpec hp = hp_kind == "band" ? HpSpec::band(hp_c, hp_delta) : HpSpec::scalar(m);
  Region region(std::move(region0), graph->n_vertices());
  return make_system(std::move(graph), std::move(region), sample, params, hp, beta);
}

int run_experiment_py(const std::string& subcommand, const std::string& config_path) {
  ExperimentType type;
  if (subcommand == "area-law") {
    type = ExperimentType::area_law;
  } else if (subcommand == "thermal") {
    type = ExperimentType::thermal_sweep;
  } else if (subcommand == "correlator") {
    type = ExperimentType::correlator;
  } else if (subcommand == "selfcheck") {
    type = ExperimentType::selfcheck;
  } else {
    throw std::invalid_argument("unknown subcommand: " + subcommand);
  }
  ConfigFile file = ConfigFile::parse_file(config_path);
  ExperimentConfig cfg = load_experiment_config(file, type);
  return run_experiment(cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Logarithmic negativity of disordered oscillator systems on graphs";

  py::register_exception<not_positive_definite>(m, "NotPositiveDefinite");
  py::register_exception<numerical_error>(m, "NumericalError");
  py::register_exception<config_error>(m, "ConfigError");

  py::class_<Graph, std::shared_ptr<Graph>>(m, "Graph")
      .def_static("path", &Graph::path, py::arg("sites"))
      .def_static("box", &Graph::box, py::arg("dim"), py::arg("side"))
      .def_static("bethe", &Graph::bethe, py::arg("branching"), py::arg("depth"),
                  py::arg("regular_root") = true)
      .def_static("custom", &Graph::custom, py::arg("n"), py::arg("edges"))
      .def_static("from_edge_list_file", &Graph::from_edge_list_file, py::arg("path"))
      .def_property_readonly("n_vertices", &Graph::n_vertices)
      .def_property_readonly("edges", &Graph::edges)
      .def_property_readonly("max_degree", &Graph::max_degree)
      .def("dist", &Graph::dist, py::arg("x"), py::arg("y"))
      .def("degree", &Graph::degree, py::arg("x"))
      .def("neighbors", &Graph::neighbors, py::arg("x"));

  py::class_<Region>(m, "Region")
      .def(py::init<std::vector<int>, int>(), py::arg("members"), py::arg("parent_size"))
      .def_readonly("members", &Region::members)
      .def_readonly("parent_size", &Region::parent_size)
      .def("size", &Region::size);

  m.def("boundary", &boundary, py::arg("graph"), py::arg("inner"));
  m.def("complement", &complement, py::arg("inner"));
  m.def("c_mu", &c_mu, py::arg("graph"), py::arg("mu"));
  m.def("boundary_sum", &boundary_sum, py::arg("graph"), py::arg("inner"), py::arg("mu"));

  py::class_<DisorderSpec>(m, "DisorderSpec")
      .def_static("uniform", &DisorderSpec::uniform, py::arg("k_max"),
                  py::arg("master_seed"))
      .def_static("from_density_file", &DisorderSpec::from_density_file, py::arg("path"),
                  py::arg("master_seed"));
  m.def(
      "draw",
      [](const DisorderSpec& spec, std::int64_t sample_index, int n) {
        return draw(spec, sample_index, n).k;
      },
      py::arg("spec"), py::arg("sample_index"), py::arg("n"));
  m.def("inverse_cdf", &inverse_cdf, py::arg("spec"), py::arg("u"));

  py::class_<EffectiveHamiltonian>(m, "EffectiveHamiltonian")
      .def_readonly("h", &EffectiveHamiltonian::h)
      .def_readonly("eigenvalues", &EffectiveHamiltonian::eigenvalues)
      .def_readonly("eigenvectors", &EffectiveHamiltonian::eigenvectors)
      .def_readonly("min_eig", &EffectiveHamiltonian::min_eig)
      .def_readonly("max_eig", &EffectiveHamiltonian::max_eig)
      .def_readonly("condition_number", &EffectiveHamiltonian::condition_number)
      .def("gap", &EffectiveHamiltonian::gap);

  py::class_<OscillatorSystem>(m, "OscillatorSystem")
      .def_readonly("hq", &OscillatorSystem::hq)
      .def_readonly("hp", &OscillatorSystem::hp)
      .def_readonly("region0", &OscillatorSystem::region0)
      .def_readonly("beta", &OscillatorSystem::beta);

  m.def("make_system", &make_system_py, py::arg("graph"), py::arg("region0"),
        py::arg("k"), py::arg("m") = 1.0, py::arg("lam") = 1.0, py::arg("g") = 1.0,
        py::arg("beta") = std::nullopt, py::arg("hp_kind") = "scalar",
        py::arg("hp_c") = 1.0, py::arg("hp_delta") = 0.0);
  m.def(
      "assemble_hq",
      [](const Graph& g, const std::vector<double>& k, double lambda, double gd) {
        return assemble_hq(g, k, lambda, gd);
      },
      py::arg("graph"), py::arg("k"), py::arg("lam"), py::arg("g"));
  m.def(
      "effective_h",
      [](const Matrix& hq, const Matrix& hp) { return effective_h(hq, hp); },
      py::arg("hq"), py::arg("hp"));

  py::class_<CovariancePair>(m, "CovariancePair")
      .def_readonly("m1", &CovariancePair::m1)
      .def_readonly("m2", &CovariancePair::m2)
      .def_readonly("beta", &CovariancePair::beta);

  m.def("covariance_blocks", &covariance_blocks, py::arg("system"), py::arg("h"));
  m.def(
      "transposed_core",
      [](const CovariancePair& cov, const Region& region0) {
        return transposed_core(cov, SignMatrix::for_region(region0));
      },
      py::arg("cov"), py::arg("region0"));
  m.def(
      "symplectic_spectrum",
      [](const Matrix& m1, const Matrix& m2, const std::string& route) {
        SymplecticRoute r = route == "general_jm" ? SymplecticRoute::general_jm
                                                  : SymplecticRoute::block_shortcut;
        return symplectic_spectrum(m1, m2, r).lambdas;
      },
      py::arg("m1"), py::arg("m2"), py::arg("route") = "block_shortcut");
  m.def(
      "log_negativity",
      [](const Vector& lambdas, double clip_tol) {
        SymplecticSpectrum s;
        s.lambdas = lambdas;
        return log_negativity(s, clip_tol);
      },
      py::arg("lambdas"), py::arg("clip_tol") = kNegativityClipTol);
  m.def("entanglement_entropy", &entanglement_entropy, py::arg("cov"), py::arg("region0"));
  m.def("negativity_upper_bound", &negativity_upper_bound, py::arg("system"), py::arg("h"));

  py::class_<NegativityReport>(m, "NegativityReport")
      .def_readonly("negativity", &NegativityReport::negativity)
      .def_readonly("lambdas_below_one", &NegativityReport::lambdas_below_one)
      .def_readonly("entropy", &NegativityReport::entropy)
      .def_readonly("upper_bound_lemma41", &NegativityReport::upper_bound_lemma41);

  m.def("evaluate_sample", &evaluate_sample, py::arg("system"), py::arg("h"));

  py::class_<RhoLambda>(m, "RhoLambda")
      .def(py::init<double, int>(), py::arg("lam"), py::arg("dim"))
      .def_readonly("alpha", &RhoLambda::alpha)
      .def_readonly("diag", &RhoLambda::diag)
      .def("trace", &RhoLambda::trace)
      .def("trace_norm", &RhoLambda::trace_norm);

  m.def(
      "weyl_matrix",
      [](std::complex<double> z, int dim) { return weyl_matrix(z, TruncatedMode(dim)); },
      py::arg("z"), py::arg("dim"));
  m.def("verify_gaussian_char", &verify_gaussian_char, py::arg("lam"), py::arg("z"),
        py::arg("dim"));

  py::class_<BruteResult>(m, "BruteResult")
      .def_readonly("negativity", &BruteResult::negativity)
      .def_readonly("entropy", &BruteResult::entropy)
      .def_readonly("dim", &BruteResult::dim);

  m.def("brute_negativity", &brute_negativity, py::arg("system"), py::arg("dim_per_mode"));

  m.def("run_experiment", &run_experiment_py, py::arg("subcommand"),
        py::arg("config_path"),
        "Run a harness experiment from a config file; returns the exit code");
}
