import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacingbound import (
    AmbiguousCountError,
    EigenWarning,
    OracleConfig,
    constant_on,
    crossing_count,
    eigenvalues_in_window,
    fd_oracle_eigenvalues,
)
from spacingbound.eigensolver import _refine_root, default_meshes, node_potential

from conftest import make


def test_free_interval_gives_squares():
    es = eigenvalues_in_window(make("zero"), math.pi, 0.5, 10.2)
    assert np.allclose(es.eigen_energies, np.arange(1, 11) ** 2, rtol=1e-12, atol=0)
    assert list(es.indices) == list(range(1, 11))
    assert es.method == "prufer_shooting"


def test_free_interval_general_length():
    X = 7.3
    es = eigenvalues_in_window(make("zero"), X, 0.1, 5.0)
    n = np.arange(1, int(5.0 * X / math.pi) + 1)
    assert np.allclose(es.eigen_momenta, n * math.pi / X, rtol=1e-12, atol=0)


def test_eigenvalue_on_window_edge_is_kept():
    es = eigenvalues_in_window(make("zero"), math.pi, 2.0, 3.0)
    assert np.allclose(es.eigen_momenta, [2.0, 3.0])


@pytest.mark.parametrize("c", [2.0, 5.5])
def test_constant_shift(c):
    es = eigenvalues_in_window(constant_on(c, math.pi), math.pi, math.sqrt(c) + 0.01, 6.0)
    n = np.arange(1, 6)
    expected = n**2 + c
    expected = expected[np.sqrt(expected) <= 6.0]
    assert np.allclose(es.eigen_energies, expected, rtol=1e-9, atol=0)


def test_oracle_free_case_with_explicit_meshes():
    cfg = OracleConfig(mesh_sizes=[math.pi / 2000, math.pi / 4000])
    es = fd_oracle_eigenvalues(make("zero"), math.pi, 0.5, 30.0, cfg)
    assert np.allclose(es.eigen_energies, [1.0, 4.0, 9.0, 16.0, 25.0], rtol=5e-10, atol=0)
    assert es.method == "fd_oracle"


def test_oracle_handles_negative_energies():
    es = fd_oracle_eigenvalues(constant_on(-3.0, math.pi), math.pi, -5.0, 10.0)
    assert np.allclose(es.eigen_energies, [-2.0, 1.0, 6.0], rtol=1e-8)
    assert es.eigen_momenta[0] == pytest.approx(-math.sqrt(2.0))


def test_oracle_mesh_errors_shrink_at_second_order():
    es = fd_oracle_eigenvalues(make("wigner_von_neumann"), 40.0, 0.5, 5.0)
    ext = es.eigen_energies
    d0 = np.abs(es.mesh_energies[0] - ext)
    d1 = np.abs(es.mesh_energies[1] - ext)
    ratio = d0 / d1
    assert np.all((ratio > 3.5) & (ratio < 4.6))


def test_prufer_and_oracle_agree_on_exponential():
    pot = make("exponential")
    es = eigenvalues_in_window(pot, 30.0, 1.0, 3.0)
    orc = fd_oracle_eigenvalues(pot, 30.0, 1.0, 9.0)
    assert len(es) == len(orc)
    assert np.allclose(es.eigen_energies, orc.eigen_energies, rtol=1e-9, atol=0)


@pytest.mark.parametrize("family", ["power", "step_sequence", "bump_train", "random_decaying"])
def test_prufer_and_oracle_agree_on_other_families(family):
    pot = make(family)
    es = eigenvalues_in_window(pot, 25.0, 1.0, 2.5)
    orc = fd_oracle_eigenvalues(pot, 25.0, 1.0, 6.25)
    assert len(es) == len(orc)
    assert np.allclose(es.eigen_energies, orc.eigen_energies, rtol=1e-6, atol=0)


def test_validate_flag_runs_quietly_when_counts_match():
    with warnings.catch_warnings():
        warnings.simplefilter("error", EigenWarning)
        es = eigenvalues_in_window(make("power"), 20.0, 1.1, 2.9, validate=True)
    assert es.warnings == []


def test_degenerate_window_warns_and_is_empty():
    with pytest.warns(EigenWarning):
        es = eigenvalues_in_window(make("power"), 10.0, 2.0, 2.0)
    assert len(es) == 0


def test_window_validation():
    with pytest.raises(ValueError):
        eigenvalues_in_window(make("power"), 10.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        eigenvalues_in_window(make("power"), -1.0, 1.0, 2.0)


def test_crossing_count_counts_eigenvalues_below():
    pot = make("exponential")
    es = eigenvalues_in_window(pot, 30.0, 0.2, 2.0)
    assert crossing_count(pot, 30.0, 2.0) - crossing_count(pot, 30.0, 0.2) == len(es)
    with pytest.raises(AmbiguousCountError):
        crossing_count(make("zero"), math.pi, 3.0)


def test_refine_root_on_a_linear_phase():
    pot = make("zero")
    k, g = _refine_root(pot, math.pi, 2, 1.5, 2.7, 1.5 * math.pi - 2 * math.pi, 2.7 * math.pi - 2 * math.pi, None, 1e-12)
    assert k == pytest.approx(2.0, abs=1e-12)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(mesh_sizes=[0.01, 0.02])
    with pytest.raises(ValueError):
        OracleConfig(mesh_sizes=[])
    with pytest.raises(ValueError):
        fd_oracle_eigenvalues(make("zero"), math.pi, 1.0, 100.0, OracleConfig(mesh_sizes=[0.1]))


def test_default_meshes_resolve_top_energy():
    hs = default_meshes(30.0, 400.0)
    assert hs[0] <= 1.0 / (10.0 * 20.0) and hs[1] == hs[0] / 2 and hs[2] == hs[0] / 4


def test_piecewise_node_values_are_cell_averages():
    pot = make("bump_train", bumps=[[0.0, 0.5, 2.0]])
    v = node_potential(pot, 1.0, 4)  # nodes at 0.25, 0.5, 0.75 with cells of width 0.25
    assert np.allclose(v, [2.0, 1.0, 0.0])


def test_to_dict_is_plain():
    d = eigenvalues_in_window(make("zero"), math.pi, 0.5, 2.5).to_dict()
    assert d["eigen_energies"] == pytest.approx([1.0, 4.0])
    assert isinstance(d["eigen_momenta"], list)


@settings(max_examples=20, deadline=None)
@given(lo=st.floats(0.3, 4.0), width=st.floats(0.2, 2.0))
def test_counts_are_additive_over_split_windows(lo, width):
    pot = make("wigner_von_neumann")
    X = 20.0
    mid = lo + 0.37 * width
    whole = eigenvalues_in_window(pot, X, lo, lo + width)
    left = eigenvalues_in_window(pot, X, lo, mid)
    right = eigenvalues_in_window(pot, X, mid, lo + width)
    joined = np.union1d(np.round(left.eigen_momenta, 9), np.round(right.eigen_momenta, 9))
    assert np.allclose(np.round(whole.eigen_momenta, 9), joined)
