"""Amalgamated norms of a potential and growth of its cumulative mass.

With unit-cell masses v_n = int_n^{n+1} |V|:

    ||V||_{l^p(L^1)}   = (sum_n v_n^p)^(1/p)
    ||V||_{l^p_w(L^1)} = sup_s s * #{n : v_n > s}^(1/p)

A finite strong norm forces I(x) = o(x^(1-1/p)); a finite weak norm delta
forces I(N) <= delta * p/(p-1) * N^(1-1/p) at integers N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize

from .potential import Potential

GROWTH_FIT_GRID = 2.0 ** np.arange(4, 21)


class NormValue(NamedTuple):
    value: float
    tail_bound: float  # upper bound on sum_{n >= N} v_n^p; inf when unknown
    N: int


@dataclass
class GrowthTrace:
    p: float
    x: np.ndarray
    ratio: np.ndarray          # I(x) / x^(1 - 1/p)
    cap: Optional[float] = None  # delta * p / (p - 1), the weak-norm growth cap

    def rows(self):
        cap = math.nan if self.cap is None else self.cap
        return [(float(x), float(r), cap) for x, r in zip(self.x, self.ratio)]


@dataclass
class NormReport:
    p: float
    N: int
    lp_L1: float
    lp_L1_tail_bound: float
    lp_w_L1: float
    growth_exponent: Optional[float]
    growth_ratio_trace: GrowthTrace
    masses_prefix: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.N,
            "lp_L1": self.lp_L1,
            "lp_L1_tail_bound": self.lp_L1_tail_bound,
            "lp_w_L1": self.lp_w_L1,
            "growth_exponent": self.growth_exponent,
            "growth_ratio_trace": {
                "x": self.growth_ratio_trace.x.tolist(),
                "ratio": self.growth_ratio_trace.ratio.tolist(),
                "cap": self.growth_ratio_trace.cap,
            },
            "masses_prefix": list(self.masses_prefix),
        }


def _check_p(p):
    if not (p > 1.0 and math.isfinite(p)):
        raise ValueError(f"p must be > 1, got {p!r}")


def mass_tail_bound(pot: Potential, p: float, N: int) -> float:
    """Bound on sum_{n >= N} v_n^p from the family's decay envelope."""
    f, pr = pot.family, pot.p
    if pot.is_zero:
        return 0.0
    if f == "exponential":
        lam = pr["lam"]
        # v_n <= |c| e^{-lam n} (1 - e^{-lam}) / lam, a geometric series
        v_N = abs(pr["c"]) * math.exp(-lam * N) * -math.expm1(-lam) / lam
        return v_N**p / -math.expm1(-lam * p)
    if f == "bump_train":
        b = pr["bumps"]
        return 0.0 if (len(b) == 0 or b[:, 1].max() <= N) else math.inf
    if f == "step_sequence" and "values" in pr:
        tail = np.abs(pr["values"][N:])
        return float(np.sum(tail**p))
    # envelope |c| (1 + n)^-e for power, wigner_von_neumann, step rule, random
    e = pr["gamma"] if f in ("power", "wigner_von_neumann") else pr["eta"]
    if e * p <= 1.0:
        return math.inf
    return abs(pr["c"]) ** p * N ** (1.0 - e * p) / (e * p - 1.0)


def amalgam_norm(pot: Potential, p: float, N: int) -> NormValue:
    """(sum_{n<N} v_n^p)^(1/p) plus a bound on the neglected tail."""
    _check_p(p)
    v = pot.unit_cell_masses(N)
    value = float(np.sum(v**p) ** (1.0 / p))
    return NormValue(value, mass_tail_bound(pot, p, N), int(N))


def weak_norm_of_masses(v, p: float) -> float:
    """sup_s s #{v_n > s}^(1/p) for a finite sequence: max_j v_(j) j^(1/p), v sorted descending."""
    _check_p(p)
    v = np.sort(np.asarray(v, dtype=np.float64))[::-1]
    if v.size == 0 or v[0] <= 0.0:
        return 0.0
    j = np.arange(1, v.size + 1, dtype=np.float64)
    return float(np.max(v * j ** (1.0 / p)))


def weak_amalgam_norm(pot: Potential, p: float, N: int) -> float:
    return weak_norm_of_masses(pot.unit_cell_masses(N), p)


def weak_lp_norm(pot: Potential, p: float) -> float:
    """||V||_{L^p_w} for families whose distribution function is explicit (zero, power)."""
    _check_p(p)
    if pot.is_zero:
        return 0.0
    if pot.family != "power" or pot.support_start != 0.0:
        raise NotImplementedError("weak L^p norm is only available for the zero and power families")
    c, g = abs(pot.p["c"]), pot.p["gamma"]
    # |{x > 0 : c (1+x)^-g > s}| = (c/s)^(1/g) - 1 for 0 < s < c
    if g < 1.0 / p:
        return math.inf

    def neg(log_s):
        s = math.exp(log_s)
        meas = (c / s) ** (1.0 / g) - 1.0
        return -s * meas ** (1.0 / p) if meas > 0.0 else 0.0

    if g == 1.0 / p:
        return c  # s ((c/s)^p - 1)^(1/p) increases to c as s -> 0
    res = optimize.minimize_scalar(neg, bounds=(math.log(c) - 60.0, math.log(c)), method="bounded",
                                   options={"xatol": 1e-12})
    return float(-res.fun)


def _trace(pot, p, x_grid):
    x = np.asarray(x_grid, dtype=np.float64)
    if x.ndim != 1 or x.size == 0 or np.any(x <= 0.0):
        raise ValueError("x_grid must be a nonempty list of positive points")
    I = np.array([pot.cumulative_abs(float(t)) for t in x])
    return x, I / x ** (1.0 - 1.0 / p)


def dyadic_grid(lo_exp: int = 4, hi_exp: int = 20) -> np.ndarray:
    return 2.0 ** np.arange(lo_exp, hi_exp + 1)


def growth_check_strong(pot: Potential, p: float, x_grid: Optional[Sequence[float]] = None) -> GrowthTrace:
    """I(x) / x^(1-1/p) on the grid; tends to zero when V is in l^p(L^1)."""
    _check_p(p)
    x, ratio = _trace(pot, p, dyadic_grid() if x_grid is None else x_grid)
    return GrowthTrace(p, x, ratio)


def growth_check_weak(
    pot: Potential, p: float, x_grid: Optional[Sequence[float]] = None, norm: str = "amalgam"
) -> GrowthTrace:
    """Trace I(x)/x^(1-1/p) with the cap delta p/(p-1).

    ``norm="amalgam"`` takes delta from the weak norm of the first
    ceil(max x) masses (exactly the masses that I(x) sees); the cap is then
    guaranteed at integer x. ``norm="function"`` uses ||V||_{L^p_w}.
    """
    _check_p(p)
    x, ratio = _trace(pot, p, dyadic_grid() if x_grid is None else x_grid)
    if norm == "amalgam":
        delta = weak_amalgam_norm(pot, p, max(int(math.ceil(x.max())), 1))
    elif norm == "function":
        delta = weak_lp_norm(pot, p)
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return GrowthTrace(p, x, ratio, delta * p / (p - 1.0))


def growth_exponent(pot: Potential, x_grid: Optional[Sequence[float]] = None) -> Optional[float]:
    """Least-squares slope of log I(x) against log x; None if I vanishes on the grid."""
    x = np.asarray(GROWTH_FIT_GRID if x_grid is None else x_grid, dtype=np.float64)
    I = np.array([pot.cumulative_abs(float(t)) for t in x])
    if np.any(I <= 1e-12):
        return None
    slope, _ = np.polyfit(np.log(x), np.log(I), 1)
    return float(slope)


def holder_embedding_check(pot: Potential, p: float, N: int, tol: float = 1e-10) -> bool:
    """v_n^p <= int_n^{n+1} |V|^p on every cell n < N (Holder on a unit interval)."""
    _check_p(p)
    v = pot.unit_cell_masses(N)
    J = pot.cell_power_integrals(N, p)
    return bool(np.all(v**p <= J + tol * np.maximum(J, 1.0)))


def norm_report(pot: Potential, p: float, N: int, x_grid: Optional[Sequence[float]] = None,
                fit: bool = True, prefix: int = 16) -> NormReport:
    strong = amalgam_norm(pot, p, N)
    trace = growth_check_weak(pot, p, x_grid if x_grid is not None else dyadic_grid(0, max(int(math.log2(N)), 0)))
    return NormReport(
        p=p,
        N=N,
        lp_L1=strong.value,
        lp_L1_tail_bound=strong.tail_bound,
        lp_w_L1=weak_amalgam_norm(pot, p, N),
        growth_exponent=growth_exponent(pot) if fit else None,
        growth_ratio_trace=trace,
        masses_prefix=pot.unit_cell_masses(min(prefix, N)).tolist(),
    )
