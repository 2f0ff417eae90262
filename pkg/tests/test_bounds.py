import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacingbound import criterion_holds, h_of, sharpness_probe, verify_bound, verify_theorem
from spacingbound.bounds import ENERGY_WINDOW, window_starts

from conftest import make


def test_h_free_case_is_pi_over_X():
    assert h_of(make("zero"), 1.0, 10.0) == math.pi / 10.0


def test_h_exponential_closed_form():
    X = 100.0
    expected = math.pi / X + 2.0 * 4.0 * -math.expm1(-X) / X
    assert h_of(make("exponential"), 1.0, X) == pytest.approx(expected, rel=1e-14)


def test_h_rejects_bad_arguments():
    with pytest.raises(ValueError):
        h_of(make("zero"), 0.0, 1.0)
    with pytest.raises(ValueError):
        h_of(make("zero"), 1.0, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    family=st.sampled_from(["zero", "exponential", "power", "wigner_von_neumann", "step_sequence"]),
    a=st.floats(0.2, 5.0),
    shift=st.floats(0.0, 10.0),
    extra=st.floats(0.0, 2.0),
    X=st.floats(1.0, 1000.0),
)
def test_windows_of_width_h_satisfy_the_criterion(family, a, shift, extra, X):
    pot = make(family)
    alpha = a + shift
    beta = alpha + h_of(pot, a, X) + extra
    assert criterion_holds(pot, alpha, beta, X).margin >= -1e-9 * X


def test_criterion_margin_sign():
    pot = make("zero")
    assert criterion_holds(pot, 1.0, 1.0 + math.pi / 10.0, 10.0).margin == pytest.approx(0.0, abs=1e-12)
    assert not criterion_holds(pot, 1.0, 1.2, 10.0).holds


def test_window_starts_stay_inside_range():
    starts = window_starts(1.0, 10.0, 2.0, 0.5)
    assert starts[0] == 1.0 and starts[-1] + 2.0 <= 10.0 + 1e-12
    assert len(window_starts(1.0, 2.0, 3.0, 0.5)) == 0


@pytest.mark.parametrize("family", ["zero", "exponential", "power", "wigner_von_neumann", "step_sequence",
                                    "bump_train", "random_decaying"])
def test_every_window_contains_an_eigenvalue(family):
    rep = verify_theorem(make(family), 1.0, 30.0, 6.0)
    assert rep.windows_checked > 0
    assert rep.violations == []
    assert rep.slack_stats[30.0] >= 1
    assert rep.energy_window == ENERGY_WINDOW


@pytest.mark.parametrize("family", ["exponential", "wigner_von_neumann"])
def test_phase_and_window_methods_agree(family):
    pot = make(family)
    fast = verify_theorem(pot, 1.0, 20.0, 4.0, method="phase")
    slow = verify_theorem(pot, 1.0, 20.0, 4.0, method="window")
    assert [r.eigen_count for r in fast.rows] == [r.eigen_count for r in slow.rows]


def test_half_width_windows_on_free_case_fail():
    rep = verify_theorem(make("zero"), 1.0, 10.0, 5.0, h_scale=0.5)
    assert len(rep.violations) > 0
    assert not rep.passed


def test_verify_bound_merges_in_order_and_threads_match():
    pot = make("power")
    serial = verify_bound(pot, 1.0, [10.0, 40.0], 4.0)
    threaded = verify_bound(pot, 1.0, [10.0, 40.0], 4.0, threads=2)
    assert serial.X_values == [10.0, 40.0]
    assert serial.to_dict() == threaded.to_dict()
    assert serial.windows_checked == sum(1 for _ in serial.rows)


def test_report_to_dict_is_serializable():
    import json

    d = verify_theorem(make("exponential"), 1.0, 10.0, 3.0).to_dict()
    assert json.loads(json.dumps(d))["passed"] is True
    assert d["potential"]["family"] == "exponential"


@pytest.mark.parametrize("X, m, eps", [(math.pi, 1, 0.01), (10.0, 3, 0.05), (100.0, 50, 0.001)])
def test_sharpness_probe(X, m, eps):
    assert sharpness_probe(X, m, eps)


def test_sharpness_probe_arguments():
    with pytest.raises(ValueError):
        sharpness_probe(10.0, 0, 0.01)
    with pytest.raises(ValueError):
        sharpness_probe(10.0, 1, 0.2)


def test_violation_windows_really_are_empty():
    rep = verify_theorem(make("zero"), 1.0, 10.0, 3.0, h_scale=0.5)
    n = np.arange(1, 11) * math.pi / 10.0
    for _, lo, hi in rep.violations:
        assert not np.any((n >= lo) & (n <= hi))


def test_step_sequence_at_400():
    pot = make("step_sequence")
    I = float(np.sum(1.0 / np.sqrt(np.arange(1, 401))))
    assert h_of(pot, 1.0, 400.0) == pytest.approx(math.pi / 400.0 + 2.0 * I / 400.0, rel=1e-13)
    assert h_of(pot, 1.0, 400.0) == pytest.approx(0.2007, abs=1e-4)
    rep = verify_theorem(pot, 1.0, 400.0, 6.0)
    assert rep.windows_checked > 0 and rep.violations == []
