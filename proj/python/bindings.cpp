#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qce/amol.hpp"
#include "qce/amol_classical.hpp"
#include "qce/entanglement.hpp"
#include "qce/experiment.hpp"
#include "qce/kickedtop.hpp"
#include "qce/spectral.hpp"
#include "qce/spin.hpp"
#include "qce/threads.hpp"

namespace py = pybind11;
using namespace qce;

namespace {

void bind_spin(py::module_& m)
{
    py::class_<SpinSpace>(m, "SpinSpace")
        .def(py::init<double>(), py::arg("f"))
        .def_property_readonly("f", &SpinSpace::f)
        .def_property_readonly("dim", &SpinSpace::dim);
    py::class_<SpinOperators>(m, "SpinOperators")
        .def_readonly("fx", &SpinOperators::fx)
        .def_readonly("fy", &SpinOperators::fy)
        .def_readonly("fz", &SpinOperators::fz);
    m.def("spin_operators", [](double f) { return build_spin_operators(SpinSpace(f)); }, py::arg("f"));
    m.def("spin_coherent_state", &spin_coherent_state, py::arg("ops"), py::arg("theta"), py::arg("phi"));
}

void bind_amol(py::module_& m)
{
    auto a = m.def_submodule("amol", "lattice atom");
    py::enum_<amol::SpinScale>(a, "SpinScale")
        .value("normalized", amol::SpinScale::normalized)
        .value("full", amol::SpinScale::full);
    py::class_<amol::AmolParams>(a, "Params")
        .def(py::init<>())
        .def_readwrite("v1", &amol::AmolParams::v1)
        .def_readwrite("theta_l", &amol::AmolParams::theta_l)
        .def_readwrite("bx", &amol::AmolParams::bx)
        .def_readwrite("f", &amol::AmolParams::f)
        .def_readwrite("spin_scale", &amol::AmolParams::spin_scale)
        .def("validate", &amol::AmolParams::validate)
        .def("lattice_amplitude", &amol::AmolParams::lattice_amplitude)
        .def("field_amplitude", &amol::AmolParams::field_amplitude);
    py::class_<amol::LatticeGrid>(a, "Grid")
        .def(py::init([](int n_points, int n_periods) { return amol::LatticeGrid{n_points, n_periods}; }),
             py::arg("n_points") = 256, py::arg("n_periods") = 1)
        .def_readwrite("n_points", &amol::LatticeGrid::n_points)
        .def_readwrite("n_periods", &amol::LatticeGrid::n_periods)
        .def("positions", &amol::LatticeGrid::positions)
        .def("momenta", &amol::LatticeGrid::momenta);
    py::class_<amol::PhasePoint>(a, "PhasePoint")
        .def(py::init([](double z, double p, double theta, double phi) {
                 return amol::PhasePoint{z, p, theta, phi};
             }),
             py::arg("z"), py::arg("p"), py::arg("theta"), py::arg("phi"))
        .def_readwrite("z", &amol::PhasePoint::z)
        .def_readwrite("p", &amol::PhasePoint::p)
        .def_readwrite("theta", &amol::PhasePoint::theta)
        .def_readwrite("phi", &amol::PhasePoint::phi);
    py::class_<amol::CompositeState>(a, "CompositeState")
        .def_readonly("amplitudes", &amol::CompositeState::amplitudes)
        .def_readonly("motion_dim", &amol::CompositeState::motion_dim)
        .def_readonly("spin_dim", &amol::CompositeState::spin_dim);
    a.def("hamiltonian", &amol::build_hamiltonian, py::arg("params"), py::arg("grid"));
    a.def("parity_sectors", [](const amol::LatticeGrid& g, double f) {
        return amol::parity_sectors(g, build_spin_operators(SpinSpace(f)));
    });
    a.def("prepare_state",
          [](const amol::AmolParams& p, const amol::LatticeGrid& g, const amol::PhasePoint& at) {
              return amol::prepare_state(p, g, at);
          },
          py::arg("params"), py::arg("grid"), py::arg("at"));

    py::class_<amol::ClassicalState>(a, "ClassicalState")
        .def_readonly("z", &amol::ClassicalState::z)
        .def_readonly("p", &amol::ClassicalState::p)
        .def_readonly("n", &amol::ClassicalState::n);
    py::class_<amol::IntegratorOptions>(a, "IntegratorOptions")
        .def(py::init([](double dt, int order) { return amol::IntegratorOptions{dt, order}; }),
             py::arg("dt") = 1e-3, py::arg("order") = 6);
    a.def("to_classical", &amol::to_classical);
    a.def("classical_energy", &amol::classical_energy);
    a.def("lyapunov_estimate",
          [](const amol::PhasePoint& at, const amol::AmolParams& p, double t, const amol::IntegratorOptions& o) {
              return amol::lyapunov_estimate(amol::to_classical(at), p, t, o);
          },
          py::arg("at"), py::arg("params"), py::arg("t_total"), py::arg("options") = amol::IntegratorOptions{});
    a.def("trajectory",
          [](const amol::PhasePoint& at, const amol::AmolParams& p, double t, double sample_dt,
             const amol::IntegratorOptions& o) {
              const auto tr = amol::integrate(amol::to_classical(at), p, t, sample_dt, o);
              Eigen::MatrixXd out(static_cast<Eigen::Index>(tr.states.size()), 6);
              for (std::size_t k = 0; k < tr.states.size(); ++k) {
                  const auto& s = tr.states[k];
                  out.row(static_cast<Eigen::Index>(k)) << tr.times[k], s.z, s.p, s.n[0], s.n[1], s.n[2];
              }
              return out;
          },
          py::arg("at"), py::arg("params"), py::arg("t_final"), py::arg("sample_dt"),
          py::arg("options") = amol::IntegratorOptions{},
          "Rows of (t, z, p, nx, ny, nz).");
}

void bind_qkt(py::module_& m)
{
    auto q = m.def_submodule("qkt", "quantum kicked top");
    py::class_<qkt::KickedTopParams>(q, "Params")
        .def(py::init<>())
        .def_readwrite("kappa", &qkt::KickedTopParams::kappa)
        .def_readwrite("p_rot", &qkt::KickedTopParams::p_rot)
        .def_readwrite("tau", &qkt::KickedTopParams::tau)
        .def_readwrite("j", &qkt::KickedTopParams::j)
        .def_property_readonly("qubits", &qkt::KickedTopParams::qubits);
    q.def("floquet_operator", &qkt::floquet_operator);
    q.def("two_qubit_rdm", &qkt::two_qubit_rdm, py::arg("state"), py::arg("n_qubits"));
    q.def("husimi", &qkt::husimi, py::arg("state"), py::arg("theta"), py::arg("phi"));
    q.def("regular_fixed_point", [](const qkt::KickedTopParams& p) {
        const auto fp = qkt::regular_fixed_point(p);
        return py::make_tuple(fp.theta, fp.phi);
    });
    q.def("chaotic_seed", [](const qkt::KickedTopParams& p) {
        const auto s = qkt::chaotic_seed(p);
        return py::make_tuple(s.theta, s.phi, s.lyapunov);
    });
}

void bind_spectral(py::module_& m)
{
    py::enum_<SpectrumKind>(m, "SpectrumKind")
        .value("hamiltonian", SpectrumKind::hamiltonian)
        .value("floquet", SpectrumKind::floquet);
    py::class_<SpectralDecomposition, std::shared_ptr<SpectralDecomposition>>(m, "SpectralDecomposition")
        .def_readonly("kind", &SpectralDecomposition::kind)
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("complete", &SpectralDecomposition::complete);
    m.def("decompose",
          [](const CMat& op, SpectrumKind kind, std::vector<Eigen::SparseMatrix<cplx>> sectors) {
              DecomposeOptions o;
              o.sectors = std::move(sectors);
              return std::make_shared<SpectralDecomposition>(decompose(op, kind, o));
          },
          py::arg("op"), py::arg("kind"), py::arg("sectors") = std::vector<Eigen::SparseMatrix<cplx>>{});
    m.def("evolve", &evolve, py::arg("decomp"), py::arg("psi"), py::arg("t"));
    m.def("support", [](const SpectralDecomposition& d, const CVec& psi) {
        const auto s = support_spectrum(d, psi);
        return py::make_tuple(s.eigenvalues, s.populations);
    });

    py::class_<Propagator>(m, "Propagator")
        .def("evolve", &Propagator::evolve, py::arg("psi0"), py::arg("t"));
    py::class_<SpectralPropagator, Propagator>(m, "SpectralPropagator")
        .def(py::init<std::shared_ptr<const SpectralDecomposition>>())
        .def(py::init<std::shared_ptr<const SpectralDecomposition>, std::vector<int>, bool>(), py::arg("decomp"),
             py::arg("kept"), py::arg("renormalize") = true);
    py::class_<SplitOperatorPropagator, Propagator>(m, "SplitOperatorPropagator")
        .def(py::init<const amol::AmolParams&, const amol::LatticeGrid&, double>(), py::arg("params"),
             py::arg("grid"), py::arg("dt"));
}

void bind_entanglement(py::module_& m)
{
    m.def("partial_trace", py::overload_cast<const CVec&, Dims, int>(&partial_trace), py::arg("psi"),
          py::arg("dims"), py::arg("keep"));
    m.def("linear_entropy", &linear_entropy);
    m.def("purity", &purity);
    m.def("uniform_times", &uniform_times);
    py::class_<EntropySeries>(m, "EntropySeries")
        .def_readonly("times", &EntropySeries::times)
        .def_readonly("values", &EntropySeries::values);
    m.def("entropy_series",
          [](const Propagator& prop, const CVec& psi, const std::vector<double>& times, Dims dims, int keep) {
              return entropy_series(prop, psi, times, dims, keep);
          },
          py::arg("propagator"), py::arg("psi0"), py::arg("times"), py::arg("dims"), py::arg("keep") = 1);
    m.def("qkt_entropy_series",
          [](const Propagator& prop, const CVec& psi, const std::vector<double>& times, int n_qubits) {
              return entropy_series(prop, psi, times,
                                    [n_qubits](const CVec& s) { return qkt::two_qubit_rdm(s, n_qubits); });
          },
          py::arg("propagator"), py::arg("psi0"), py::arg("times"), py::arg("n_qubits"));
    m.def("spectral_flatness", [](const EntropySeries& s) { return spectral_flatness(power_spectrum(s)); });
}

void bind_experiment(py::module_& m)
{
    auto e = m.def_submodule("experiment", "configured runs");
    py::class_<experiment::ExperimentConfig>(e, "Config")
        .def_static("parse", &experiment::parse_config, py::arg("text"),
                    py::arg("overrides") = experiment::Overrides{})
        .def("serialize", &experiment::serialize)
        .def("hash", &experiment::config_hash);
    e.def("preset_names", [] {
        std::vector<std::string> out;
        for (const auto& p : experiment::builtin_presets()) out.push_back(p.name);
        return out;
    });
    e.def("run",
          [](const experiment::ExperimentConfig& c, const std::filesystem::path& dir) {
              py::gil_scoped_release release;
              return experiment::run(c, dir).to_json().dump();
          },
          py::arg("config"), py::arg("out_dir"), "Run and return the manifest as JSON text.");
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Entanglement dynamics of the lattice atom and the kicked top";
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    // translators are tried newest first, so the subclass goes last
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<experiment::ConfigError>(m, "ConfigError", PyExc_ValueError);
    m.def("set_threads", &set_thread_count);
    m.def("threads", &thread_count);
    bind_spin(m);
    bind_amol(m);
    bind_qkt(m);
    bind_spectral(m);
    bind_entanglement(m);
    bind_experiment(m);
}
