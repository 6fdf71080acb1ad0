#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "netregime/error.hpp"
#include "netregime/harness.hpp"
#include "netregime/percolation_cut.hpp"

namespace py = pybind11;
using namespace netregime;

namespace {

py::dict estimate_dict(const ThroughputEstimate& e) {
  py::dict d;
  d["scheme"] = to_string(e.scheme);
  d["aggregate_T"] = e.aggregate_T;
  d["per_pair_R"] = e.per_pair_R;
  d["M"] = e.M;
  d["max_cell_load"] = e.max_cell_load;
  d["reroutes"] = e.reroutes;
  d["bottleneck_cell"] = e.bottleneck_cell;
  d["analytic_per_pair"] = e.analytic_per_pair;
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["r_squared"] = f.r_squared;
  d["theory_exponent"] = f.theory_exponent;
  d["residuals"] = f.residuals;
  d["points"] = f.points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DegenerateInstance>(m, "DegenerateInstance", base.ptr());
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<Defect>(m, "Defect", base.ptr());

  py::class_<NetworkInstance>(m, "NetworkInstance")
      .def_readonly("n_pairs", &NetworkInstance::n_pairs)
      .def_readonly("area_A", &NetworkInstance::area_A)
      .def_readonly("seed", &NetworkInstance::seed)
      .def_readonly("pairs", &NetworkInstance::pairs)
      .def_property_readonly("positions", [](const NetworkInstance& n) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : n.positions) out.emplace_back(p.x, p.y);
        return out;
      })
      .def_property_readonly("sources", [](const NetworkInstance& n) {
        std::vector<bool> out;
        for (Role r : n.roles) out.push_back(r == Role::Source);
        return out;
      })
      .def("to_json", [](const NetworkInstance& n) { return nlohmann::json(n).dump(); })
      .def("__len__", &NetworkInstance::node_count);

  m.def("generate_network", &generate_network, py::arg("n"), py::arg("area"), py::arg("seed"));

  m.def("classify", [](double alpha, double beta) {
    const auto p = classify(alpha, beta);
    py::dict d;
    d["regime"] = to_string(p.regime);
    d["exponent"] = p.exponent;
    d["on_boundary"] = p.boundary.any();
    return d;
  }, py::arg("alpha"), py::arg("beta"));

  m.def("scheme_exponents", [](double alpha, double beta) {
    const auto e = scheme_exponents(alpha, beta);
    py::dict d;
    d["multihop"] = e.multihop;
    d["hierarchical"] = e.hierarchical;
    d["hybrid"] = e.hybrid;
    d["optimal"] = to_string(e.optimal);
    return d;
  }, py::arg("alpha"), py::arg("beta"));

  m.def("multihop_throughput", [](std::size_t n, double snr_s, double K2) {
    return estimate_dict(multihop_throughput(n, snr_s, K2));
  }, py::arg("n"), py::arg("snr_s"), py::arg("K2") = 1.0);

  m.def("hc_throughput", [](std::size_t n, double snr_s, double alpha, double epsilon, double K3,
                            bool bursty) {
    return estimate_dict(hc_throughput(n, snr_s, alpha, epsilon, K3, bursty));
  }, py::arg("n"), py::arg("snr_s"), py::arg("alpha"), py::arg("epsilon") = 0.05,
        py::arg("K3") = 1.0, py::arg("bursty") = false);

  m.def("simulate_hybrid", [](const NetworkInstance& inst, double snr_s, double alpha,
                              std::uint64_t seed, std::optional<std::size_t> M) {
    return estimate_dict(simulate_hybrid(inst, snr_s, alpha, SchemeConstants{}, seed, M));
  }, py::arg("instance"), py::arg("snr_s"), py::arg("alpha"), py::arg("seed") = 0,
        py::arg("M") = py::none());

  m.def("evaluate_cutset", [](const NetworkInstance& inst, double alpha, double beta,
                              std::size_t trials, std::uint64_t phase_seed, bool percolation) {
    CutsetOptions o;
    o.trials = trials;
    o.mode = percolation ? CutMode::Percolation : CutMode::Idealized;
    const auto r = evaluate_cutset(inst, alpha, beta, o, phase_seed);
    py::dict d;
    d["w_hat"] = r.w_hat;
    d["size_VD"] = r.size_VD;
    d["dof_term"] = r.dof_term;
    d["snr_total"] = r.snr_total;
    d["power_term"] = r.power_term;
    d["mc_logdet"] = r.mc_logdet;
    d["mc_stderr"] = r.mc_stderr;
    d["closed_form_bound"] = r.closed_form_bound;
    d["size_B"] = r.size_B;
    return d;
  }, py::arg("instance"), py::arg("alpha"), py::arg("beta"), py::arg("trials") = 20,
        py::arg("phase_seed") = 0, py::arg("percolation") = false);

  m.def("crossing_probability", [](std::size_t n, double c, std::size_t trials,
                                   std::uint64_t seed, unsigned threads) {
    const auto s = crossing_probability(n, c, trials, seed, threads);
    py::dict d;
    d["empirical_rate"] = s.empirical_rate;
    d["failure_rate"] = s.failure_rate;
    d["failure_stderr"] = s.failure_stderr;
    d["analytic_bound"] = s.analytic_bound;
    d["flag"] = s.flag;
    d["certified_cuts"] = s.certified_cuts;
    d["crossings"] = s.crossings;
    return d;
  }, py::arg("n"), py::arg("c"), py::arg("trials"), py::arg("seed") = 0, py::arg("threads") = 1);

  m.def("fit_exponent", [](const std::vector<std::pair<double, double>>& pts, double theory) {
    const auto f = fit_scaling(pts, theory);
    py::dict d;
    d["full"] = fit_dict(f.full);
    d["tail"] = f.tail ? py::object(fit_dict(*f.tail)) : py::object(py::none());
    return d;
  }, py::arg("points"), py::arg("theory_exponent") = 0.0);

  m.def("phase_diagram_csv", [](double alo, double ahi, std::size_t an, double blo, double bhi,
                                std::size_t bn) {
    std::ostringstream os;
    write_phase_diagram_csv(os, phase_diagram({alo, ahi, an}, {blo, bhi, bn}));
    return os.str();
  }, py::arg("alpha_lo"), py::arg("alpha_hi"), py::arg("alpha_points"), py::arg("beta_lo"),
        py::arg("beta_hi"), py::arg("beta_points"));

  m.def("run_experiment", [](const std::string& config_json, unsigned threads) {
    const auto config = nlohmann::json::parse(config_json).get<ExperimentConfig>();
    std::vector<std::string> out;
    for (const auto& p : run_experiment(config, threads)) out.push_back(p.string());
    return out;
  }, py::arg("config_json"), py::arg("threads") = 1);
}
