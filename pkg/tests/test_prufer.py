import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacingbound import IntegrationError, Tolerance, constant_on, f_at, f_batch, integrate_phase
from spacingbound.prufer import default_tolerance, phase_difference_bound

from conftest import make

# theta_k(X) from a fixed-step RK4 run (step 1e-5) of the phase equation, and
# u(X) for u(0) = 0, u'(0) = 1 from solve_ivp (DOP853, rtol 1e-12) on the
# second-order equation itself.
REFERENCE = [
    ("exponential", 2.0, 30.0, -0.9846926785865043, 0.4419425093505241),
    ("exponential", 0.7, 10.0, -1.1822401671861698, -3.2148367574016254),
    ("power", 1.5, 50.0, -4.2327020157691235, 0.7694812526176705),
    ("wigner_von_neumann", 1.0, 40.0, -0.012907247808357794, 4.5740144368965),
    ("wigner_von_neumann", 3.3, 40.0, -0.14298695684904558, -0.027320781233102172),
]


@pytest.mark.parametrize("family, k, X, theta_ref, _", REFERENCE)
def test_phase_matches_fixed_step_reference(family, k, X, theta_ref, _):
    assert integrate_phase(make(family), k, X).theta_end == pytest.approx(theta_ref, abs=5e-9)


@pytest.mark.parametrize("family, k, X, _, u_ref", REFERENCE)
def test_amplitude_reconstructs_solution(family, k, X, _, u_ref):
    tr = integrate_phase(make(family), k, X, amplitude=True)
    assert tr.u_end == pytest.approx(u_ref, rel=1e-8, abs=1e-10)


def test_free_phase_is_exact():
    tr = integrate_phase(make("zero"), 2.5, 7.0, amplitude=True)
    assert tr.theta_end == 0.0
    assert tr.f_end == 2.5 * 7.0
    assert tr.u_end == pytest.approx(math.sin(17.5) / 2.5, rel=1e-15)


def test_constant_potential_hits_shifted_free_zeros():
    # V = 2 on [0, pi]: u = sin(n x) with k^2 = n^2 + 2
    pot = constant_on(2.0, math.pi)
    for n in (1, 2, 3):
        f = f_at(pot, math.sqrt(n * n + 2.0), math.pi)
        assert f / math.pi == pytest.approx(n, abs=1e-9)


def test_error_estimate_tracks_tolerance():
    pot = make("power")
    ref = integrate_phase(pot, 1.5, 50.0, Tolerance(1e-13, 1e-15)).theta_end
    for rel in (1e-6, 1e-8, 1e-10):
        tr = integrate_phase(pot, 1.5, 50.0, Tolerance(rel, rel * 1e-2))
        assert abs(tr.theta_end - ref) < max(100 * rel, 10 * tr.err_estimate)


def test_tighter_tolerance_takes_more_steps():
    pot = make("wigner_von_neumann")
    loose = integrate_phase(pot, 2.0, 40.0, Tolerance(1e-6, 1e-8)).nsteps
    tight = integrate_phase(pot, 2.0, 40.0, Tolerance(1e-11, 1e-13)).nsteps
    assert tight > loose


def test_checkpoints_follow_the_path():
    pot = make("exponential")
    tr = integrate_phase(pot, 2.0, 30.0, checkpoints=6)
    assert tr.checkpoints.shape == (6, 2)
    assert tr.checkpoints[-1, 0] == 30.0
    assert tr.checkpoints[-1, 1] == pytest.approx(tr.theta_end, abs=1e-14)
    mid = integrate_phase(pot, 2.0, 10.0).theta_end
    assert tr.checkpoints[1, 1] == pytest.approx(mid, abs=1e-8)


def test_batch_agrees_with_single_calls():
    pot = make("step_sequence")
    ks = np.array([1.0, 1.7, 3.2, 6.0])
    f, err = f_batch(pot, ks, 100.0)
    assert np.all(err >= 0.0)
    for k, fk in zip(ks, f):
        assert fk == pytest.approx(f_at(pot, k, 100.0), abs=1e-8)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(1e-14, 1e-12)
    with pytest.raises(ValueError):
        Tolerance(1e-8, 0.0)


def test_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("SPACINGBOUND_RTOL", "1e-7")
    monkeypatch.setenv("SPACINGBOUND_ATOL", "1e-9")
    assert default_tolerance() == Tolerance(1e-7, 1e-9)


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate_phase(make("power"), 0.0, 10.0)
    with pytest.raises(ValueError):
        integrate_phase(make("power"), 1.0, -1.0)


def test_integration_error_carries_location():
    err = IntegrationError(3.5, 2.0)
    assert (err.x, err.k) == (3.5, 2.0)
    assert isinstance(err, ArithmeticError)


@pytest.mark.parametrize("family", ["exponential", "power", "step_sequence"])
def test_theta_is_nonincreasing_for_nonnegative_potentials(family):
    # theta' = V/(2k)(cos(.) - 1) <= 0 wherever V >= 0
    pot = make(family)
    tr = integrate_phase(pot, 1.3, 60.0, checkpoints=30)
    assert np.all(np.diff(tr.checkpoints[:, 1]) <= 1e-10)
    assert tr.theta_end <= 1e-12


@settings(max_examples=30, deadline=None)
@given(
    family=st.sampled_from(["exponential", "power", "wigner_von_neumann", "step_sequence", "bump_train"]),
    alpha=st.floats(0.5, 8.0),
    width=st.floats(0.01, 3.0),
    X=st.floats(1.0, 80.0),
)
def test_phase_difference_lower_bound(family, alpha, width, X):
    pot = make(family)
    beta = alpha + width
    gap = f_at(pot, beta, X) - f_at(pot, alpha, X)
    assert gap >= phase_difference_bound(pot, alpha, beta, X) - 1e-6


@settings(max_examples=40, deadline=None)
@given(
    family=st.sampled_from(["exponential", "power", "wigner_von_neumann", "step_sequence", "bump_train"]),
    k=st.floats(0.3, 10.0),
    X=st.floats(0.5, 100.0),
)
def test_phase_shift_bounded_by_mass(family, k, X):
    # |theta'| <= |V|/k, so |theta_k(X)| <= I(X)/k
    pot = make(family)
    assert abs(integrate_phase(pot, k, X).theta_end) <= pot.cumulative_abs(X) / k + 1e-9
