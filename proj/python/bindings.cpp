// Python bindings for the main operations. JSON crosses the boundary as text.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asqchain/coupling.hpp"
#include "asqchain/cqed_readout.hpp"
#include "asqchain/dynamics.hpp"
#include "asqchain/flux_planner.hpp"
#include "asqchain/harness.hpp"

namespace py = pybind11;
using namespace asq;

namespace {

std::vector<AsqParams> asq_list(const std::vector<double>& e_so, const std::vector<double>& e_j) {
  if (!e_j.empty() && e_j.size() != e_so.size()) throw ValidationError("e_so and e_j lengths differ");
  std::vector<AsqParams> v(e_so.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i].e_so = e_so[i];
    v[i].e_j = e_j.empty() ? 0.0 : e_j[i];
  }
  return v;
}

ChainConfig make_chain(double e_j, const std::vector<double>& e_so, const std::vector<double>& fluxes,
                       const std::vector<double>& e_j_asq) {
  auto asqs = asq_list(e_so, e_j_asq);
  std::vector<double> f = fluxes.empty() ? std::vector<double>(asqs.size(), 0.0) : fluxes;
  return ChainConfig(e_j, std::move(asqs), std::move(f));
}

py::dict report_dict(const CouplingReport& r) {
  py::dict d;
  d["energies"] = r.energies;
  d["pair"] = r.pair;
  py::list t;
  for (const auto& x : r.triples)
    t.append(py::make_tuple(x.i, x.j, x.k, x.value, x.denominator, x.phase_offset));
  d["triples"] = t;
  return d;
}

}  // namespace

PYBIND11_MODULE(_asqchain, m) {
  m.doc() = "Andreev spin qubit chain: couplings, flux plans, readout, dynamics";

  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<AsqParams>(m, "AsqParams")
      .def(py::init<>())
      .def(py::init([](double e_so, double e_j, double e_z, double theta) { return AsqParams{e_j, e_so, e_z, theta}; }),
           py::arg("e_so"), py::arg("e_j") = 0.0, py::arg("e_z") = 0.0, py::arg("theta") = 0.0)
      .def_readwrite("e_j", &AsqParams::e_j)
      .def_readwrite("e_so", &AsqParams::e_so)
      .def_readwrite("e_z", &AsqParams::e_z)
      .def_readwrite("theta", &AsqParams::theta);

  py::class_<ChainConfig>(m, "ChainConfig")
      .def(py::init(&make_chain), py::arg("e_j"), py::arg("e_so"), py::arg("fluxes") = std::vector<double>{},
           py::arg("e_j_asq") = std::vector<double>{})
      .def(py::init<double, std::vector<AsqParams>, std::vector<double>>())
      .def_property_readonly("e_j", &ChainConfig::e_j_coupling)
      .def_property_readonly("fluxes", &ChainConfig::fluxes)
      .def("phases", &ChainConfig::phases)
      .def("with_fluxes", &ChainConfig::with_fluxes)
      .def("__len__", &ChainConfig::size);

  m.def("pairwise_coupling", &pairwise_coupling, py::arg("config"), py::arg("i"), py::arg("j"),
        "First-order J_ij in GHz (0-based indices).");
  m.def("coupling_report", [](const ChainConfig& c, bool triples) { return report_dict(coupling_report(c, triples)); },
        py::arg("config"), py::arg("include_triples") = false);
  m.def("effective_total_ej", [](const ChainConfig& c) {
    const auto e = effective_total_ej(c);
    return py::make_tuple(e.magnitude, e.phase_offset);
  });
  m.def("classical_energy_table", &classical_energy_table);
  m.def("walsh_couplings", [](const std::vector<double>& table) {
    const auto w = extract_couplings_walsh(table);
    py::dict d = report_dict(w.report);
    d["c0"] = w.c0;
    return d;
  });
  m.def("spin_supercurrent", [](double e_so, double e_j, double phi) { return spin_supercurrent(AsqParams{e_j, e_so, 0, 0}, phi); },
        py::arg("e_so"), py::arg("e_j") = 0.0, py::arg("phi") = 0.0);

  m.def("fluxes_from_phases", &fluxes_from_phases);
  m.def("plan_pair", [](const ChainConfig& c, int n, int mm) { return plan_pair(n, mm, c).fluxes; },
        py::arg("config"), py::arg("n"), py::arg("m"), "Loop fluxes with qubits n, m (0-based) ON, the rest OFF.");
  m.def("crosstalk_medians",
        [](const ChainConfig& c, int n, int mm, double delta, int samples, std::uint64_t seed) {
          const auto plan = plan_pair(n, mm, c);
          const auto st = crosstalk_monte_carlo(c.with_fluxes(plan.fluxes), plan, delta, samples, seed);
          py::dict d;
          d["on_on"] = st.on_on_summary.median;
          d["on_off"] = st.on_off_summary.median;
          d["off_off"] = st.off_off_summary.median;
          return d;
        },
        py::arg("config"), py::arg("n"), py::arg("m"), py::arg("delta") = 1e-3, py::arg("samples") = 1000,
        py::arg("seed") = 0);

  m.def("transmon_resonator_frequency",
        [](const ChainConfig& c, const std::vector<int>& spins, double e_c, double f_bare, double g) {
          return dressed_resonator_freq(ReadoutCircuit::transmon(e_c), c, spins, ResonatorSpec{f_bare, g, 8});
        },
        py::arg("config"), py::arg("spins"), py::arg("e_c"), py::arg("f_bare"), py::arg("g"));
  m.def("transmon_f01", [](const ChainConfig& c, const std::vector<int>& spins, double e_c) {
    return transmon_levels(ReadoutCircuit::transmon(e_c), c, spins).transitions.at(0);
  });

  m.def("cphase_ideal",
        [](double j_ghz) {
          SpinModel model(2);
          model.add_zz(0, 1, j_ghz);
          CphaseOptions opt;
          const auto g = cphase_gate(model, 0, 1, j_ghz, opt);
          py::dict d;
          d["gate_time_ns"] = g.gate_time;
          d["conditional_phase"] = g.conditional_phase;
          d["avg_fidelity"] = g.avg_fidelity;
          d["pair_block"] = g.pair_block;
          return d;
        },
        py::arg("j_ghz"));
  m.def("spectator_infidelity",
        [](int n, double eps, const std::string& v) { return spectator_infidelity(n, eps, spectator_variant_from_string(v)); },
        py::arg("n"), py::arg("epsilon"), py::arg("variant") = "three-body-only");
  m.def("simulate_spectator_infidelity",
        [](int n, double eps, const std::string& v) {
          return simulate_spectator_infidelity(n, eps, spectator_variant_from_string(v));
        },
        py::arg("n"), py::arg("epsilon"), py::arg("variant") = "three-body-only");
  m.def("max_qubits",
        [](double f, double eps, const std::string& v) { return max_qubits(f, eps, spectator_variant_from_string(v)); },
        py::arg("target_fidelity"), py::arg("epsilon"), py::arg("variant") = "three-body-only");

  m.def("run_config",
        [](const std::string& text, py::object seed) {
          auto spec = parse_config(text, "<python>");
          if (!seed.is_none()) spec.seed = seed.cast<std::uint64_t>();
          if (spec.command.empty()) throw ValidationError("config has no command");
          return summary_document(run_scenario(spec), spec).dump();
        },
        py::arg("config_json"), py::arg("seed") = py::none(),
        "Runs a config (JSON text) and returns the summary document as JSON text.");
  m.def("validate_config", [](const std::string& text) { return to_json(parse_config(text, "<python>")).dump(); });
}
