// Acceptance run: one PASS/FAIL line per criterion, measured values alongside.
// Usage: acceptance [criterion numbers...]   (default: all)
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "helpers.hpp"
#include "qce/amol.hpp"
#include "qce/amol_classical.hpp"
#include "qce/entanglement.hpp"
#include "qce/experiment.hpp"
#include "qce/kickedtop.hpp"
#include "qce/linalg.hpp"
#include "qce/spectral.hpp"
#include "qce/threads.hpp"
#include "qce_oracles.hpp"

using namespace qce;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Shared lattice data: one Hamiltonian serves both initial states.
struct Lattice {
    amol::AmolParams params;
    amol::LatticeGrid grid;
    std::shared_ptr<const SpectralDecomposition> decomp;
    CVec regular;
    CVec chaotic;
    Dims dims{0, 0};
};

const Lattice& lattice()
{
    static const Lattice lat = [] {
        Lattice l;
        const auto ops = build_spin_operators(SpinSpace(l.params.f));
        DecomposeOptions opts;
        opts.sectors = amol::parity_sectors(l.grid, ops);
        l.decomp = std::make_shared<SpectralDecomposition>(
            decompose(amol::build_hamiltonian(l.params, l.grid), SpectrumKind::hamiltonian, opts));
        const auto reg = amol::prepare_state(l.params, l.grid, {-0.15, 0.0, 1.27, 0.0});
        const auto cha = amol::prepare_state(l.params, l.grid, {0.06, 0.0, pi / 2, 0.0});
        l.regular = reg.amplitudes;
        l.chaotic = cha.amplitudes;
        l.dims = {reg.motion_dim, reg.spin_dim};
        return l;
    }();
    return lat;
}

EntropySeries lattice_series(const CVec& psi, const std::vector<double>& times, const Propagator& prop)
{
    return entropy_series(prop, psi, times, lattice().dims, 1);
}

std::vector<double> early_times() { return uniform_times(0.0, 0.05, 0.0005); }

double max_deviation(const EntropySeries& a, const EntropySeries& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
    return d;
}

double peak(const EntropySeries& s) { return *std::max_element(s.values.begin(), s.values.end()); }

Outcome criterion1()
{
    const auto& l = lattice();
    const SpectralPropagator prop(l.decomp);
    const auto s = lattice_series(l.chaotic, early_times(), prop);
    const auto window = default_rise_window(s, 0.2);
    const auto cmp = compare_rise_models(s, window);
    const double t0 = cmp.quadratic.param("t0");
    const bool ok = cmp.preferred == RiseModel::quadratic && t0 >= 0.005 && t0 <= 0.02;
    return {ok, fmt::format("preferred={} t0={:.5f} (target 0.01, factor 2) residual quad={:.3f} exp={:.3f} "
                            "window=[{}, {}]",
                            to_string(cmp.preferred), t0, cmp.quadratic.residual, cmp.exponential.residual,
                            window.begin, window.end)};
}

Outcome criterion2()
{
    const auto& l = lattice();
    const SpectralPropagator prop(l.decomp);
    const auto times = early_times();
    const auto reg = lattice_series(l.regular, times, prop);
    const auto cha = lattice_series(l.chaotic, times, prop);
    double margin = 1e300;
    int n = 0;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] > 0.01 && times[k] < 0.05) {
            margin = std::min(margin, cha.values[k] - reg.values[k]);
            ++n;
        }
    return {n > 0 && margin > 0.0,
            fmt::format("min S_chaotic - S_regular = {:.4f} over {} samples in (0.01, 0.05)", margin, n)};
}

Outcome criterion3()
{
    const auto& l = lattice();
    const auto support = support_spectrum(*l.decomp, l.regular);
    const auto st = analyze_support(*l.decomp, support, 8, default_gap_tolerance(SpectrumKind::hamiltonian));
    const bool ok = st.population >= 0.9 && st.pairs.size() == 4 && st.gap_ratio < 0.1;
    return {ok, fmt::format("top-8 population={:.4f} (need >= 0.9), near-degenerate pairs={} (need 4), "
                            "gap/spacing={:.4f} (need < 0.1)",
                            st.population, st.pairs.size(), st.gap_ratio)};
}

Outcome criterion4()
{
    const auto& l = lattice();
    const auto support = support_spectrum(*l.decomp, l.regular);
    const auto kept = support.dominant(8);
    const SpectralPropagator full(l.decomp);
    const SpectralPropagator trunc(l.decomp, kept, true);
    const auto times = uniform_times(0.0, 20.0, 0.01);
    const auto a = lattice_series(l.regular, times, full);
    const auto b = lattice_series(l.regular, times, trunc);
    const double rel = max_deviation(a, b) / peak(a);
    return {rel <= 0.05, fmt::format("max |S_8 - S| / max S = {:.4f} over tau in [0, 20] (bound 0.05)", rel)};
}

Outcome criterion5()
{
    const CMat h = test::random_hermitian(9);
    const auto d = decompose(h, SpectrumKind::hamiltonian);
    const CVec psi = test::random_state(9);
    const std::vector<int> kept{0, 2, 5, 7};
    const auto coeff = entropy_reconstruction_coefficients(d, psi, kept, {3, 3}, true);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    double err = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double t = u(test::rng());
        const CVec state = truncated_evolution(d, psi, kept, t, true);
        const double direct = linear_entropy(partial_trace(state, {3, 3}, 1));
        err = std::max(err, std::abs(coeff.entropy(t) - direct));
    }
    return {err < 1e-10, fmt::format("max |S_C - S_direct| = {:.2e} at 50 random times", err)};
}

struct KickedTopRun {
    std::shared_ptr<const SpectralDecomposition> decomp;
    CVec regular, chaotic;
    int qubits = 0;
};

const KickedTopRun& kicked_top()
{
    static const KickedTopRun run = [] {
        KickedTopRun r;
        const qkt::KickedTopParams p;
        r.qubits = p.qubits();
        r.decomp = std::make_shared<SpectralDecomposition>(decompose(qkt::floquet_operator(p), SpectrumKind::floquet));
        const auto ops = build_spin_operators(SpinSpace(p.j));
        const auto fp = qkt::regular_fixed_point(p);
        r.regular = spin_coherent_state(ops, fp.theta, fp.phi);
        const auto seed = qkt::chaotic_seed(p);
        r.chaotic = spin_coherent_state(ops, seed.theta, seed.phi);
        return r;
    }();
    return run;
}

EntropySeries qkt_series(const Propagator& prop, const CVec& psi)
{
    const int n = kicked_top().qubits;
    return entropy_series(prop, psi, uniform_times(0.0, 500.0, 1.0),
                          [n](const CVec& s) { return qkt::two_qubit_rdm(s, n); });
}

Outcome criterion6()
{
    const auto& k = kicked_top();
    const auto support = support_spectrum(*k.decomp, k.regular);
    const auto st = analyze_support(*k.decomp, support, 3, default_gap_tolerance(SpectrumKind::floquet));
    const bool gap_ok = st.dominant_pair_gap >= 0.0015 && st.dominant_pair_gap <= 0.006;
    const SpectralPropagator full(k.decomp);
    const SpectralPropagator trunc(k.decomp, st.dominant, true);
    const auto a = qkt_series(full, k.regular);
    const auto b = qkt_series(trunc, k.regular);
    const double rel = max_deviation(a, b) / peak(a);
    const bool ok = st.population > 0.5 && gap_ok && rel <= 0.05;
    return {ok, fmt::format("top-3 population={:.4f}, dominant gap={:.5f} (target 0.003, factor 2), "
                            "3-state reconstruction max dev / peak={:.4f} (bound 0.05)",
                            st.population, st.dominant_pair_gap, rel)};
}

Outcome criterion7()
{
    const auto& k = kicked_top();
    const SpectralPropagator full(k.decomp);
    const auto cha = qkt_series(full, k.chaotic);
    const auto reg = qkt_series(full, k.regular);
    const auto window = pre_saturation_window(cha);
    const auto cmp = compare_rise_models(cha, window);
    const double fc = spectral_flatness(power_spectrum(cha));
    const double fr = spectral_flatness(power_spectrum(reg));
    const bool ok = cmp.preferred == RiseModel::exponential && fc > fr;
    return {ok, fmt::format("preferred={} residual exp={:.3f} quad={:.3f} window=[{}, {}]; flatness chaotic={:.3f} "
                            "regular={:.3f}",
                            to_string(cmp.preferred), cmp.exponential.residual, cmp.quadratic.residual,
                            window.begin, window.end, fc, fr)};
}

Outcome criterion8()
{
    double err = 0.0;
    for (int n : {4, 6})
        for (int trial = 0; trial < 100; ++trial) {
            const CVec sym = test::random_state(n + 1);
            const CMat slow = test::brute_two_qubit_rdm(test::embed_symmetric(sym, n), n);
            err = std::max(err, max_abs(qkt::two_qubit_rdm(sym, n) - slow));
        }
    return {err < 1e-10, fmt::format("max entry error = {:.2e} over 200 states", err)};
}

Outcome criterion9()
{
    const amol::AmolParams p;
    const amol::IntegratorOptions fine{2e-4, 6};
    double de = 0.0, dn = 0.0;
    const std::vector<amol::PhasePoint> ics{{-0.15, 0.0, 1.27, 0.0}, {0.06, 0.0, pi / 2, 0.0}};
    for (const auto& q : ics) {
        const auto ic = amol::to_classical(q);
        const double e0 = amol::classical_energy(ic, p);
        const auto tr = amol::integrate(ic, p, 1000.0, 1.0, fine);
        for (const auto& s : tr.states) {
            de = std::max(de, std::abs(amol::classical_energy(s, p) - e0));
            dn = std::max(dn, std::abs(std::sqrt(s.n[0] * s.n[0] + s.n[1] * s.n[1] + s.n[2] * s.n[2]) - 1.0));
        }
    }
    const double lam_reg = amol::lyapunov_estimate(amol::to_classical(ics[0]), p, 4000.0);
    const double lam_a = amol::lyapunov_estimate(amol::to_classical(ics[1]), p, 200.0);
    const double lam_b = amol::lyapunov_estimate(amol::to_classical(ics[1]), p, 400.0);
    const bool stable = lam_a > 0.0 && std::abs(lam_b - lam_a) < 0.1 * lam_a;
    const bool ok = de < 1e-8 && dn < 1e-9 && lam_reg < 5e-3 && stable;
    return {ok, fmt::format("energy drift={:.2e}, |n| drift={:.2e} over tau=1000; lambda regular={:.4f} (t=4000), "
                            "chaotic={:.3f} (t=200) / {:.3f} (t=400)",
                            de, dn, lam_reg, lam_a, lam_b)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion10()
{
    const auto& l = lattice();
    const CVec exact = evolve(*l.decomp, l.chaotic, 10.0);
    const CVec split = split_operator_propagate(l.params, l.grid, l.chaotic, 10.0, 1e-4);
    const double overlap = std::norm(exact.dot(split));

    experiment::ExperimentConfig c;
    c.model = experiment::Model::qkt;
    c.type = experiment::RunType::analyze;
    c.label = "determinism";
    c.source = experiment::StateSource::chaotic;
    c.kicks = 200;
    c.truncate = 3;
    const auto base = fs::temp_directory_path() / ("qce_acceptance_" + std::to_string(::getpid()));
    const auto ma = experiment::run(c, base / "a");
    const auto mb = experiment::run(c, base / "b");
    bool identical = ma.outputs == mb.outputs && ma.content_hash() == mb.content_hash();
    for (const auto& name : ma.outputs)
        if (name != "manifest.json") identical = identical && slurp(base / "a" / name) == slurp(base / "b" / name);
    fs::remove_all(base);
    return {overlap > 1.0 - 1e-6 && identical,
            fmt::format("1 - |<spectral|split>|^2 = {:.2e} at tau=10 (dt=1e-4); reruns byte-identical: {}",
                        1.0 - overlap, identical ? "yes" : "no")};
}

Outcome criterion11()
{
    double s_lo = 1.0, s_excess = -1.0, schmidt = 0.0, lu = 0.0, comm = 0.0, unit = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const CVec psi = test::random_state(16 * 9);
        const CMat r1 = partial_trace(psi, {16, 9}, 1);
        const double s = linear_entropy(r1);
        s_lo = std::min(s_lo, s);
        s_excess = std::max(s_excess, s - (1.0 - 1.0 / 9.0));
        schmidt = std::max(schmidt, std::abs(purity(r1) - purity(partial_trace(psi, {16, 9}, 0))));
        const CMat u = test::random_unitary(9);
        CVec moved = psi;
        for (int i = 0; i < 16; ++i) moved.segment(i * 9, 9) = u * psi.segment(i * 9, 9);
        lu = std::max(lu, std::abs(s - linear_entropy(partial_trace(moved, {16, 9}, 1))));
    }
    for (double f : {0.5, 4.0, 25.0}) {
        const auto ops = build_spin_operators(SpinSpace(f));
        comm = std::max(comm, max_abs(ops.fx * ops.fy - ops.fy * ops.fx - I * ops.fz));
    }
    unit = std::max(unit, linalg::unitarity_residual(qkt::floquet_operator({})));
    unit = std::max(unit, linalg::unitarity_residual(kicked_top().decomp->eigenvectors));
    unit = std::max(unit, linalg::unitarity_residual(lattice().decomp->eigenvectors));
    const bool ok = s_lo >= 0.0 && s_excess <= 0.0 && schmidt < 1e-12 && lu < 1e-12 && comm < 1e-12 && unit < 1e-10;
    return {ok, fmt::format("S in [{:.3f}, 1-1/d{:+.1e}], Schmidt {:.1e}, local-unitary {:.1e}, commutator {:.1e}, "
                            "unitarity {:.1e}",
                            s_lo, s_excess, schmidt, lu, comm, unit)};
}

} // namespace

int main(int argc, char** argv)
{
    configure_threads_from_env();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"lattice chaotic rise is quadratic with t0 near 0.01", criterion1},
        {"chaotic entropy rises above regular for tau in (0.01, 0.05)", criterion2},
        {"regular lattice support: 4 near-degenerate pairs carry >= 0.9", criterion3},
        {"8-eigenstate reconstruction within 5% of the peak", criterion4},
        {"coefficient reconstruction equals direct entropy", criterion5},
        {"kicked-top regular state: 3-state support, gap near 0.003", criterion6},
        {"kicked-top chaotic rise exponential, flatter spectrum", criterion7},
        {"collective two-qubit RDM equals explicit partial trace", criterion8},
        {"classical energy/|n| conservation and Lyapunov estimates", criterion9},
        {"split-operator cross-check and byte-identical reruns", criterion10},
        {"invariant suites", criterion11},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failed;
        std::printf("%s criterion %2d: %s | %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
