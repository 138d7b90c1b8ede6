import json
import math

import numpy as np
import pytest

import lpeuler as lp


def cosine(grid, m):
    c = np.zeros((1, grid.N), dtype=complex)
    c[0, m] = c[0, grid.N - m] = 0.5
    return lp.SpectralField.from_coefficients(grid, c)


def test_grid_and_roundtrip():
    g = lp.Grid(1, 64, 1.0)
    assert g.max_kept_mode == 21
    x = 2 * math.pi * np.arange(64) / 64
    f = lp.SpectralField.from_samples(g, np.sin(x)[None, :])
    assert np.allclose(f.samples()[0], np.sin(x), atol=1e-14)
    assert lp.lp_norm(f, 2.0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_product_matches_numpy_convolution():
    g = lp.Grid(1, 64, 1.0)
    a, b = lp.generate_ensemble(g, 2, seed=3, amplitude=1.0)
    got = lp.dealiased_product(a, b).coefficients()[0]
    ca, cb = a.coefficients()[0], b.coefficients()[0]
    m = np.fft.fftfreq(64, 1.0 / 64).astype(int)
    ref = np.zeros(64, dtype=complex)
    for i in range(64):
        for j in range(64):
            k = m[i] + m[j]
            if abs(k) <= g.max_kept_mode:
                ref[k % 64] += ca[i] * cb[j]
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_littlewood_paley_reconstruction():
    g = lp.Grid(1, 1024, 16.0)
    basis = lp.LPBasis(g)
    assert (basis.j_min, basis.j_max) == (-4, 4)
    for f in lp.generate_ensemble(g, 5, seed=11):
        assert lp.reconstruction_defect(basis, f) <= 1e-12
    assert lp.reconstruction_defect(basis.with_fault(0, 1.1), f) > 1e-3
    assert json.loads(lp.basis_manifest(basis))["j_max"] == 4


def test_besov_and_shift():
    g = lp.Grid(1, 1024, 16.0)
    basis = lp.LPBasis(g)
    f = cosine(g, round(1.41 * 16))
    L = 2 * math.pi * 16
    assert lp.besov_seminorm(basis, f, 0.5, 2.0) == pytest.approx(math.sqrt(L / 2), rel=1e-13)
    assert lp.hl_shift_check(basis, f, 0.5, 1.0, 0) == pytest.approx(1.0, abs=1e-13)
    assert lp.frequency_threshold(0.1, 2) == 6


def test_bony_and_product_law():
    g = lp.Grid(1, 256, 4.0)
    basis = lp.LPBasis(g)
    a, b = lp.generate_ensemble(g, 2, seed=5)
    parts = lp.bony_decompose(basis, a, b)
    assert parts["residual"] <= 1e-10
    prod = lp.dealiased_product(a, b)
    recombined = parts["Tab"] + parts["Tba"] + parts["R"]
    assert lp.parseval_l2(recombined - prod) <= 1e-12 * lp.parseval_l2(prod)
    sample = lp.product_law_ratio(basis, a, b, 0.25, 1.0, 1.0, 0)
    assert sample is not None and sample.ratio == pytest.approx(sample.lhs / sample.rhs)


def test_symbol_and_propagator():
    plus, minus, degenerate = lp.symbol_eigenvalues(1.0, 0.1)
    assert plus.real == pytest.approx(-0.1010205, abs=1e-6)
    assert minus.real == pytest.approx(-9.8989795, abs=1e-6)
    assert not degenerate
    r, eps, t = 2.0, 0.1, 0.5
    A = np.array([[0, -1j * r], [-1j * r, -1 / eps]])
    w, V = np.linalg.eig(A * t)
    ref = V @ np.diag(np.exp(w)) @ np.linalg.inv(V)
    a, b, c = lp.linear_propagator(r, eps, t)
    assert np.allclose(ref, [[a, -1j * c], [-1j * c, b]], atol=1e-12)


def test_config_and_experiment(tmp_path):
    with pytest.raises(lp.ConfigError, match="config is empty"):
        lp.config_hash("")
    with pytest.raises(lp.ConfigError, match="product_law.p"):
        lp.config_hash('{"experiment": "product-law-sweep", "product_law": {"p": 2.5}}')
    text = '{"experiment": "verify-basis"}'
    assert lp.config_hash(text) == lp.config_hash(lp.normalized_config(text))
    out = lp.run_experiment(text, str(tmp_path))
    assert out["passed"]
    assert [g["name"] for g in out["gates"]] == ["lp_reconstruction", "hl_shift"]
    manifest = json.loads((tmp_path / "MANIFEST.json").read_text())
    assert {a["file"] for a in manifest["artifacts"]} == set(out["artifacts"])
