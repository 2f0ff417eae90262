import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacingbound import (
    PotentialSpec,
    amalgam_norm,
    build_potential,
    growth_check_strong,
    growth_check_weak,
    growth_exponent,
    holder_embedding_check,
    norm_report,
    weak_amalgam_norm,
    weak_lp_norm,
)
from spacingbound.norms import dyadic_grid, mass_tail_bound, weak_norm_of_masses

from conftest import make


def harmonic():
    return make("step_sequence", c=1.0, eta=1.0)


def test_l2_norm_of_harmonic_masses():
    v = amalgam_norm(harmonic(), 2.0, 100_000)
    assert v.value == pytest.approx(math.pi / math.sqrt(6.0), abs=1e-5)
    assert v.tail_bound == pytest.approx(1e-5)
    # the tail bound covers the gap to the infinite sum
    assert v.value**2 + v.tail_bound >= math.pi**2 / 6.0


def test_exponential_tail_bound_is_valid():
    pot = make("exponential")
    N = 5
    tail = float(np.sum(pot.unit_cell_masses(60)[N:] ** 2))
    assert tail <= mass_tail_bound(pot, 2.0, N) * (1 + 1e-12)


def test_weak_norm_of_masses_small_cases():
    assert weak_norm_of_masses([1.0, 1.0, 1.0, 1.0], 2.0) == 2.0
    assert weak_norm_of_masses([], 2.0) == 0.0
    assert weak_norm_of_masses([3.0, 0.0], 2.0) == 3.0


def test_weak_norm_of_critical_step_sequence_is_one():
    assert weak_amalgam_norm(make("step_sequence"), 2.0, 10_000) == pytest.approx(1.0, rel=1e-14)


def test_weak_function_norm_of_power():
    assert weak_lp_norm(make("power"), 2.0) == 1.0
    assert weak_lp_norm(make("power"), 1.5) == math.inf
    # gamma = 1/2, p = 3: sup_s (s - s^3)^(1/3), attained at s = 3^(-1/2)
    assert weak_lp_norm(make("power"), 3.0) == pytest.approx((2.0 / (3.0 * math.sqrt(3.0))) ** (1 / 3), rel=1e-8)
    # gamma = 1, p = 2: sup_s s ((1/s) - 1)^(1/2) is attained at s = 1/2
    assert weak_lp_norm(make("power", c=1.0, gamma=1.0), 2.0) == pytest.approx(0.5, rel=1e-8)
    with pytest.raises(NotImplementedError):
        weak_lp_norm(make("exponential"), 2.0)


def test_weak_trace_respects_cap():
    tr = growth_check_weak(make("step_sequence"), 2.0, [10.0, 100.0, 1e4, 1e6])
    assert tr.cap == pytest.approx(2.0)
    assert np.all(tr.ratio <= tr.cap)
    assert 1.97 <= tr.ratio[2] <= 2.0


def test_strong_trace_decays_for_harmonic():
    tr = growth_check_strong(harmonic(), 2.0, [1e2, 1e6])
    assert tr.ratio[0] == pytest.approx(0.5187, abs=1e-4)
    assert tr.ratio[0] / tr.ratio[1] >= 10.0


@pytest.mark.parametrize("p, expected", [(2.0, 0.5), (3.0, 2.0 / 3.0), (4.0, 0.75)])
def test_growth_exponent_of_critical_sequences(p, expected):
    pot = make("step_sequence", c=1.0, eta=1.0 / p)
    assert growth_exponent(pot) == pytest.approx(expected, abs=0.02)


def test_growth_exponent_none_for_zero():
    assert growth_exponent(make("zero")) is None


@pytest.mark.parametrize("family", ["exponential", "power", "wigner_von_neumann", "step_sequence"])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_holder_cellwise(family, p):
    assert holder_embedding_check(make(family), p, 60)


def test_norm_report_round_trips_to_dict():
    rep = norm_report(make("step_sequence"), 2.0, 1024)
    d = rep.to_dict()
    assert d["lp_w_L1"] == pytest.approx(1.0)
    assert len(d["masses_prefix"]) == 16
    assert d["growth_ratio_trace"]["x"][-1] == 1024.0


def test_dyadic_grid():
    assert list(dyadic_grid(0, 3)) == [1.0, 2.0, 4.0, 8.0]


def test_p_must_exceed_one():
    with pytest.raises(ValueError):
        amalgam_norm(make("power"), 1.0, 10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=60), st.floats(1.1, 6.0))
def test_weak_norm_is_dominated_by_strong_norm(v, p):
    strong = float(np.sum(np.asarray(v) ** p) ** (1.0 / p))
    assert weak_norm_of_masses(v, p) <= strong * (1 + 1e-12) + 1e-300


@settings(max_examples=30, deadline=None)
@given(
    eta=st.floats(0.2, 1.5),
    p=st.floats(1.2, 5.0),
    N=st.integers(1, 5000),
)
def test_weak_growth_cap_holds_at_integers(eta, p, N):
    pot = build_potential(PotentialSpec("step_sequence", {"c": 1.0, "eta": eta}))
    delta = weak_amalgam_norm(pot, p, N)
    assert pot.cumulative_abs(float(N)) <= delta * p / (p - 1.0) * N ** (1.0 - 1.0 / p) * (1 + 1e-12)
