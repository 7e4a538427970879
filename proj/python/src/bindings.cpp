#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rydrelay/analytics.hpp"
#include "rydrelay/dynamics.hpp"

namespace py = pybind11;
using namespace rydrelay;

namespace {

std::vector<double> vector_to_std(const Eigen::VectorXd& v) {
    return {v.begin(), v.end()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relay-mediated dipolar interaction engineering for atom arrays";

    py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
    py::register_exception<EliminationError>(m, "EliminationError", PyExc_RuntimeError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.attr("MAGIC_ANGLE") = magic_angle();

    py::enum_<AtomRole>(m, "AtomRole")
        .value("Main", AtomRole::Main)
        .value("Relay", AtomRole::Relay);

    py::enum_<Regime>(m, "Regime")
        .value("Room", Regime::Room)
        .value("Cryo", Regime::Cryo);

    py::class_<Position>(m, "Position")
        .def(py::init<double, double>(), py::arg("x"), py::arg("z"))
        .def_readwrite("x", &Position::x)
        .def_readwrite("z", &Position::z)
        .def("__repr__", [](const Position& p) {
            return "Position(x=" + std::to_string(p.x) + ", z=" + std::to_string(p.z) + ")";
        });

    py::class_<Atom>(m, "Atom")
        .def(py::init([](const Position& pos, AtomRole role) {
                 return Atom{pos, role};
             }),
             py::arg("pos"), py::arg("role"))
        .def_readwrite("pos", &Atom::pos)
        .def_readwrite("role", &Atom::role);

    py::class_<PairGeometry>(m, "PairGeometry")
        .def_readonly("r", &PairGeometry::r)
        .def_readonly("theta", &PairGeometry::theta);

    py::class_<AtomArray>(m, "AtomArray")
        .def_static("from_atoms", &AtomArray::from_atoms, py::arg("atoms"),
                    py::arg("min_distance") = 1.0)
        .def_static(
            "from_json",
            [](const std::string& text, double min_distance) {
                return array_from_json(nlohmann::json::parse(text), min_distance);
            },
            py::arg("text"), py::arg("min_distance") = 1.0)
        .def_property_readonly("num_main", &AtomArray::num_main)
        .def_property_readonly("num_relay", &AtomArray::num_relay)
        .def("__len__", &AtomArray::size)
        .def("atom", &AtomArray::atom, py::arg("index"))
        .def("relay_index", &AtomArray::relay_index, py::arg("k"))
        .def("without_atoms", &AtomArray::without_atoms, py::arg("remove"),
             py::arg("min_distance") = 1.0)
        .def("to_json", [](const AtomArray& a) { return to_json(a).dump(); });

    m.def("pair_geometry",
          py::overload_cast<const AtomArray&, int, int>(&pair_geometry),
          py::arg("array"), py::arg("a"), py::arg("b"));
    m.def("build_pair_mirrored", &build_pair_mirrored, py::arg("r_ij"), py::arg("r_imu"),
          py::arg("theta_imu"), py::arg("min_distance") = 1.0);
    m.def("build_chain_mirrored", &build_chain_mirrored, py::arg("n_main"),
          py::arg("spacing"), py::arg("r_imu"), py::arg("theta_imu"),
          py::arg("min_distance") = 1.0);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init<>())
        .def_readwrite("C3_up_alpha", &PhysicalParams::C3_up_alpha)
        .def_readwrite("C3_beta_alpha", &PhysicalParams::C3_beta_alpha)
        .def_readwrite("C3_up_down", &PhysicalParams::C3_up_down)
        .def_readwrite("p2_up_down", &PhysicalParams::p2_up_down)
        .def_readwrite("p2_beta_alpha", &PhysicalParams::p2_beta_alpha)
        .def_readwrite("delta0", &PhysicalParams::delta0)
        .def_readwrite("F", &PhysicalParams::F)
        .def_readwrite("lambda_mn", &PhysicalParams::lambda_mn)
        .def_readwrite("gamma_bbr", &PhysicalParams::gamma_bbr)
        .def_readwrite("gamma_cryo", &PhysicalParams::gamma_cryo)
        .def_readwrite("gamma_ell", &PhysicalParams::gamma_ell)
        .def_readwrite("gamma_relay_cryo", &PhysicalParams::gamma_relay_cryo)
        .def("validate", &PhysicalParams::validate)
        .def("main_decay_mhz", &PhysicalParams::main_decay_mhz, py::arg("regime"))
        .def("relay_decay_mhz", &PhysicalParams::relay_decay_mhz, py::arg("regime"))
        .def("to_json", [](const PhysicalParams& p) { return to_json(p).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return params_from_json(nlohmann::json::parse(text));
        });

    m.def("near_field_coupling", &near_field_coupling, py::arg("c3"), py::arg("r"),
          py::arg("theta"));
    m.def("full_dd_coupling", &full_dd_coupling, py::arg("gamma_i_hz"),
          py::arg("gamma_j_hz"), py::arg("lambda_m"), py::arg("r_m"), py::arg("theta"));
    m.def("near_field_limit", &near_field_limit, py::arg("gamma_i_hz"),
          py::arg("gamma_j_hz"), py::arg("lambda_m"), py::arg("r_m"), py::arg("theta"));
    m.def("forster_detuning", &forster_detuning, py::arg("params"));
    m.def("calibrate_delta0", &calibrate_delta0, py::arg("params"),
          py::arg("f_resonance"));
    m.def("coupling_vector", &coupling_vector, py::arg("array"), py::arg("params"),
          py::arg("main_index"));
    m.def("relay_matrix", &relay_matrix, py::arg("array"), py::arg("params"),
          py::arg("regime") = Regime::Room);

    py::class_<AdiabaticityReport>(m, "AdiabaticityReport")
        .def_readonly("lambda_lowest", &AdiabaticityReport::lambda_lowest)
        .def_readonly("max_abs_delta_eff", &AdiabaticityReport::max_abs_delta_eff)
        .def_readonly("max_abs_coupling", &AdiabaticityReport::max_abs_coupling)
        .def_readonly("max_gamma_eff", &AdiabaticityReport::max_gamma_eff)
        .def_readonly("ratio", &AdiabaticityReport::ratio)
        .def_readonly("valid", &AdiabaticityReport::valid);

    py::class_<EffectiveModel>(m, "EffectiveModel")
        .def_readonly("coupling", &EffectiveModel::coupling)
        .def_readonly("delta_eff", &EffectiveModel::delta_eff)
        .def_readonly("gamma_eff", &EffectiveModel::gamma_eff)
        .def_readonly("adiabaticity", &EffectiveModel::adiabaticity)
        .def("to_json", [](const EffectiveModel& e) { return to_json(e).dump(); });

    m.def("effective_couplings", &effective_couplings, py::arg("array"),
          py::arg("params"), py::arg("regime") = Regime::Room);
    m.def("effective_couplings_diagonal_relay", &effective_couplings_diagonal_relay,
          py::arg("array"), py::arg("params"));
    m.def("effective_detunings", &effective_detunings, py::arg("array"),
          py::arg("params"), py::arg("omega_up_dressed") = 0.0,
          py::arg("regime") = Regime::Room);
    m.def("effective_decay", &effective_decay, py::arg("array"), py::arg("params"),
          py::arg("regime") = Regime::Room);
    m.def("adiabaticity_report", &adiabaticity_report, py::arg("array"),
          py::arg("params"), py::arg("regime") = Regime::Room,
          py::arg("threshold") = 10.0);
    m.def("build_effective_model", &build_effective_model, py::arg("array"),
          py::arg("params"), py::arg("regime") = Regime::Room,
          py::arg("omega_up_dressed") = 0.0, py::arg("threshold") = 10.0);

    py::class_<PowerLawFit>(m, "PowerLawFit")
        .def_readonly("amplitude", &PowerLawFit::amplitude)
        .def_readonly("exponent", &PowerLawFit::exponent)
        .def_readonly("rmse", &PowerLawFit::rmse)
        .def_readonly("window_min", &PowerLawFit::window_min)
        .def_readonly("window_max", &PowerLawFit::window_max)
        .def_readonly("points_used", &PowerLawFit::points_used)
        .def_readonly("points_dropped", &PowerLawFit::points_dropped);

    m.def("fit_power_law", &fit_power_law, py::arg("points"), py::arg("window_min"),
          py::arg("window_max"));
    m.def("mirrored_pair_closed_form", &mirrored_pair_closed_form, py::arg("r_ij"),
          py::arg("r_imu"), py::arg("theta_imu"), py::arg("theta_ij"), py::arg("delta"),
          py::arg("c3"));
    m.def("mirrored_pair_taylor", &mirrored_pair_taylor, py::arg("r_ij"),
          py::arg("r_imu"), py::arg("theta_imu"), py::arg("theta_ij"), py::arg("delta"),
          py::arg("c3"), py::arg("order"));
    m.def("average_coupling_by_separation", &average_coupling_by_separation,
          py::arg("coupling"));

    py::enum_<ScanKind>(m, "ScanKind")
        .value("Pair", ScanKind::Pair)
        .value("Chain", ScanKind::Chain);

    py::class_<ScanConfig>(m, "ScanConfig")
        .def(py::init<>())
        .def_static("pair_defaults", &ScanConfig::pair_defaults)
        .def_static("chain_defaults", &ScanConfig::chain_defaults)
        .def_readwrite("kind", &ScanConfig::kind)
        .def_readwrite("n_r", &ScanConfig::n_r)
        .def_readwrite("n_theta", &ScanConfig::n_theta)
        .def_readwrite("r_min", &ScanConfig::r_min)
        .def_readwrite("r_max", &ScanConfig::r_max)
        .def_readwrite("theta_min", &ScanConfig::theta_min)
        .def_readwrite("theta_max", &ScanConfig::theta_max)
        .def_readwrite("fit_r_min", &ScanConfig::fit_r_min)
        .def_readwrite("fit_r_max", &ScanConfig::fit_r_max)
        .def_readwrite("fit_r_step", &ScanConfig::fit_r_step)
        .def_readwrite("chain_length", &ScanConfig::chain_length)
        .def_readwrite("chain_spacing", &ScanConfig::chain_spacing)
        .def_readwrite("fit_sep_min", &ScanConfig::fit_sep_min)
        .def_readwrite("fit_sep_max", &ScanConfig::fit_sep_max)
        .def_readwrite("strength_separation", &ScanConfig::strength_separation)
        .def_readwrite("min_distance", &ScanConfig::min_distance)
        .def_readwrite("min_coupling", &ScanConfig::min_coupling);

    py::class_<ScanPoint>(m, "ScanPoint")
        .def_readonly("r_imu", &ScanPoint::r_imu)
        .def_readonly("theta_imu", &ScanPoint::theta_imu)
        .def_readonly("exponent", &ScanPoint::exponent)
        .def_readonly("rmse", &ScanPoint::rmse)
        .def_readonly("mean_abs_coupling", &ScanPoint::mean_abs_coupling)
        .def_readonly("excluded", &ScanPoint::excluded)
        .def_readonly("ok", &ScanPoint::ok)
        .def_readonly("error", &ScanPoint::error);

    py::class_<ScanResult>(m, "ScanResult")
        .def_readonly("kind", &ScanResult::kind)
        .def_readonly("points", &ScanResult::points)
        .def("to_csv", &scan_to_csv);

    m.def("exponent_scan", &exponent_scan, py::arg("config"), py::arg("params"),
          py::arg("regime") = Regime::Room,
          py::call_guard<py::gil_scoped_release>());
    m.def("exclusion_mask", &exclusion_mask, py::arg("scan"), py::arg("params"),
          py::arg("regime") = Regime::Room, py::arg("r_cut") = 25.0,
          py::arg("min_distance") = 1.0);

    py::class_<QuantumState>(m, "QuantumState")
        .def_static("pure_state", &QuantumState::pure_state, py::arg("psi"))
        .def_static("density", &QuantumState::density, py::arg("rho"))
        .def_readonly("pure", &QuantumState::pure)
        .def_readonly("psi", &QuantumState::psi)
        .def_readonly("rho", &QuantumState::rho)
        .def("validate", &QuantumState::validate);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("names", &Trajectory::names)
        .def_readonly("series", &Trajectory::series)
        .def_readonly("final_state", &Trajectory::final_state)
        .def("series_for",
             [](const Trajectory& t, const std::string& name) {
                 return vector_to_std(t.series_for(name));
             })
        .def("to_csv", &trajectory_to_csv);

    m.def("excitation_state_spins", &excitation_state_spins, py::arg("n"),
          py::arg("excited_site"));
    m.def("evolve_effective", &evolve_effective, py::arg("model"), py::arg("state0"),
          py::arg("times"), py::arg("dissipative"), py::arg("tol") = 1e-8,
          py::call_guard<py::gil_scoped_release>());
    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));

    py::class_<CompareResult>(m, "CompareResult")
        .def_readonly("full", &CompareResult::full)
        .def_readonly("effective", &CompareResult::effective)
        .def_readonly("max_abs_deviation", &CompareResult::max_abs_deviation);

    m.def("compare_full_vs_effective", &compare_full_vs_effective, py::arg("array"),
          py::arg("params"), py::arg("excited_main"), py::arg("times"),
          py::arg("regime") = Regime::Room, py::arg("tol") = 1e-8,
          py::call_guard<py::gil_scoped_release>());

    py::class_<ProtocolResult>(m, "ProtocolResult")
        .def_readonly("no_loss", &ProtocolResult::no_loss)
        .def_readonly("loss", &ProtocolResult::loss)
        .def_readonly("repump", &ProtocolResult::repump)
        .def_readonly("fidelity_loss", &ProtocolResult::fidelity_loss)
        .def_readonly("fidelity_repump", &ProtocolResult::fidelity_repump);

    m.def("loss_repump_protocol", &loss_repump_protocol, py::arg("pair_array"),
          py::arg("params"), py::arg("t_loss"), py::arg("t_reinjection"),
          py::arg("times"), py::arg("regime") = Regime::Room, py::arg("tol") = 1e-8,
          py::call_guard<py::gil_scoped_release>());
}
