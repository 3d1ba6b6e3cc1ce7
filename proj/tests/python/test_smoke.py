import json

import numpy as np
import pytest

import qce


def test_spin_operators_commute_correctly():
    ops = qce.spin_operators(2.0)
    comm = ops.fx @ ops.fy - ops.fy @ ops.fx
    assert np.allclose(comm, 1j * ops.fz)


def test_bell_state_entropy():
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    rho = qce.partial_trace(psi, (2, 2), 1)
    assert qce.linear_entropy(rho) == pytest.approx(0.5)


def test_two_qubit_rdm_is_a_density_matrix():
    rng = np.random.default_rng(7)
    psi = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi /= np.linalg.norm(psi)
    rho = qce.qkt.two_qubit_rdm(psi, 6)
    assert rho.shape == (4, 4)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)


def test_kicked_top_entropy_series():
    p = qce.qkt.Params()
    p.j = 5.0
    d = qce.decompose(qce.qkt.floquet_operator(p), qce.SpectrumKind.floquet)
    theta, phi = qce.qkt.regular_fixed_point(p)
    psi = qce.spin_coherent_state(qce.spin_operators(p.j), theta, phi)
    series = qce.qkt_entropy_series(qce.SpectralPropagator(d), psi, qce.uniform_times(0, 20, 1), p.qubits)
    values = np.array(series.values)
    assert values[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all((values >= -1e-12) & (values <= 0.75 + 1e-12))


def test_lattice_state_normalized():
    grid = qce.amol.Grid(64)
    st = qce.amol.prepare_state(qce.amol.Params(), grid, qce.amol.PhasePoint(0.06, 0.0, np.pi / 2, 0.0))
    assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0)
    assert st.motion_dim * st.spin_dim == st.amplitudes.size


def test_config_errors_raise_value_error():
    with pytest.raises(qce.ConfigError):
        qce.experiment.Config.parse("[run]\nnonsense = 1\n")
    with pytest.raises(ValueError):
        qce.experiment.Config.parse("[qkt]\nj = abc\n")


def test_run_writes_manifest(tmp_path):
    text = "[run]\nmodel = qkt\ntype = analyze\nlabel = smoke\n[qkt]\nj = 5\n[time]\nkicks = 32\n"
    cfg = qce.experiment.Config.parse(text)
    manifest = json.loads(qce.experiment.run(cfg, tmp_path))
    assert "entropy.csv" in manifest["outputs"]
    assert (tmp_path / "manifest.json").exists()


def test_presets_listed():
    assert set(qce.experiment.preset_names()) == {
        "fig1_sections", "fig2_entropy", "fig3_support", "fig4_truncated", "fig5_qkt_support", "fig6_qkt_entropy",
    }
