import json
import math
from pathlib import Path

import numpy as np
import pytest

import specklewalk as sw

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_medium_and_propagation():
    s = sw.generate_medium(32, 16, seed=4)
    assert s.shape == (16, 32) and s.dtype == np.complex128
    x = np.exp(1j * sw.random_mask(32, 1))
    np.testing.assert_allclose(sw.propagate(s, x), s @ x, rtol=1e-12, atol=1e-12)
    np.testing.assert_array_equal(s, sw.generate_medium(32, 16, seed=4))


def test_focusing_and_calibration():
    s = sw.generate_medium(256, 512, seed=2)
    est, flagged = sw.measure_sm(s)
    assert flagged == []
    assert sw.sm_fidelity(s, est).min() > 1 - 1e-9
    mask = sw.conjugate_mask(est, 7)
    assert sw.enhancement(s, mask, 7) > 100
    assert sw.enhancement(s, sw.random_mask(256, 3), 7) < 10


def test_smx1_round_trip(tmp_path):
    s = sw.generate_medium(8, 4, seed=1)
    sw.save_smx1(tmp_path / "s.smx1", s)
    np.testing.assert_array_equal(sw.load_smx1(tmp_path / "s.smx1"), s)
    (tmp_path / "bad.smx1").write_bytes(b"SMX2")
    with pytest.raises(sw.Error) as info:
        sw.load_smx1(tmp_path / "bad.smx1")
    assert info.value.kind == "format"


def test_tomography_numbers():
    assert sw.concurrence(1 - 8.4e-5, 1 / 1.1e10, 3.3e-5) == pytest.approx(4.6932e-5, rel=1e-4)
    assert sw.coherence_from_visibility(0.78, 4.1e-5, 4.3e-5) == pytest.approx(3.276e-5)
    assert sw.concurrence_threshold(11_000_000_000, 3.3e-5, 1 - 8.4e-5) == 11
    assert sw.poisson_upper_limit(0, 0.99) == pytest.approx(math.log(100), abs=1e-9)
    assert sw.positivity_confidence(1, 11) == pytest.approx(1 - 12 * math.exp(-11))
    rho = sw.density_matrix(0.7, 0.1, 0.15, 0.05, 0.1)
    assert np.allclose(rho, rho.conj().T)
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_fit_and_counts():
    phi = np.linspace(0, 2 * np.pi, 21)
    counts = np.round(1e6 * (1 + 0.6 * np.cos(phi - 1.0))).astype(np.uint64)
    fit = sw.fit_visibility(phi, counts)
    assert fit["visibility"] == pytest.approx(0.6, abs=1e-5)
    c = sw.simulate_counts(0.03, 0.03, sw.SourceConfig(), seed=5)
    assert c["n_AT"] <= c["n_T"] and c["n_ABT"] <= c["n_AT"]
    est = sw.estimate_state(c, 1e-5)
    assert est["p01"] + est["p10"] < 1e-3


def test_run_scenario(tmp_path):
    report = sw.run("tomo", CONFIGS / "small.ini", seed=7, out=tmp_path)
    assert report["scenario"] == "tomo"
    assert (tmp_path / "tomography.json").exists()
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk["result"] == report["result"]
    with pytest.raises(sw.Error):
        sw.run("tomo", CONFIGS / "small.ini", out=tmp_path / "missing")
