import importlib
import math

import numpy as np
import pytest

from spacingbound import _backend, _fallback
from spacingbound.eigensolver import node_potential

from conftest import make

compiled = pytest.importorskip("spacingbound._kernels", reason="compiled kernels not built")

# libm and numpy round exp/sin differently in the last bit, so values are
# compared to a few ulps while the adaptive step sequence must match exactly
ULPS = 1e-13
CASES = ["exponential", "power", "wigner_von_neumann", "step_sequence", "bump_train"]


def _args(pot, X):
    fam, c, p1, p2 = pot.kernel_family()
    return (*pot.segments(X), fam, c, p1, p2)


@pytest.mark.parametrize("family", CASES)
def test_single_integration_matches(family):
    pot = make(family)
    args = _args(pot, 40.0)
    a = compiled.integrate_segments(1.7, *args, 1e-10, 1e-12, math.pi / 1.7, True)
    b = _fallback.integrate_segments(1.7, *args, 1e-10, 1e-12, math.pi / 1.7, True)
    status, theta, rho, err, nsteps, _, seg_theta = a
    assert (status, nsteps) == (b[0], b[4])
    assert theta == pytest.approx(b[1], abs=ULPS)
    assert rho == pytest.approx(b[2], abs=ULPS)
    assert err == pytest.approx(b[3], abs=ULPS)
    assert np.allclose(seg_theta, b[6], rtol=0, atol=ULPS)


@pytest.mark.parametrize("family", CASES)
def test_batch_integration_matches(family):
    pot = make(family)
    ks = np.linspace(0.8, 6.0, 9)
    a = compiled.integrate_batch(ks, *_args(pot, 25.0), 1e-10, 1e-12, math.pi)
    b = _fallback.integrate_batch(ks, *_args(pot, 25.0), 1e-10, 1e-12, math.pi)
    assert np.array_equal(a[0], b[0])  # status
    assert np.array_equal(a[3], b[3])  # step counts
    assert np.allclose(a[1], b[1], rtol=0, atol=ULPS)
    assert np.allclose(a[2], b[2], rtol=0, atol=ULPS)


def test_sturm_routines_agree():
    pot = make("wigner_von_neumann")
    n, X = 400, 20.0
    h = X / n
    diag = np.ascontiguousarray(2.0 / h**2 + node_potential(pot, X, n))
    off2 = 1.0 / h**4
    for sigma in (-1.0, 0.5, 3.0, 50.0):
        assert compiled.sturm_count(diag, off2, sigma) == _fallback.sturm_count(diag, off2, sigma)
    lo, hi = float(diag.min() - 4 / h**2), float(diag.max() + 4 / h**2)
    a = compiled.eigs_by_index(diag, off2, 3, 20, lo, hi, 1e-14)
    b = _fallback.eigs_by_index(diag, off2, 3, 20, lo, hi, 1e-14)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_pure_backend_selected_by_environment(monkeypatch):
    monkeypatch.setenv("SPACINGBOUND_PURE", "1")
    mod = importlib.reload(_backend)
    try:
        assert mod.NAME == "python"
        assert mod.kernels is _fallback
    finally:
        monkeypatch.delenv("SPACINGBOUND_PURE")
        importlib.reload(_backend)
