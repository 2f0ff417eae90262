"""The spacing bound h(X) and the window-coverage check behind it.

For ``[alpha, beta]`` inside ``[a, inf)`` with
``beta - alpha >= h(X) = pi/X + 2 I(X) / (a X)`` the finite-interval
criterion

    (beta - alpha) X >= pi + (1/beta + 1/alpha) I(X)

holds, and it forces an eigenvalue of H_X in ``[alpha^2, beta^2]``.

Energy convention: windows are reported as ``[alpha^2, beta^2]``. The
one-quarter scaling ``[alpha^2/4, beta^2/4]`` that appears in some
statements of this result is not what the argument delivers, so it is not
used here.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .eigensolver import eigenvalues_in_window
from .potential import Potential, build_potential, PotentialSpec
from .prufer import Tolerance, f_batch

VIOLATION_TAU = 1e-8
ENERGY_WINDOW = "[alpha^2, beta^2]"


def h_of(pot: Potential, a: float, X: float) -> float:
    if not a > 0.0:
        raise ValueError(f"a must be > 0, got {a!r}")
    if not X > 0.0:
        raise ValueError(f"X must be > 0, got {X!r}")
    return math.pi / X + 2.0 / (a * X) * pot.cumulative_abs(X)


class Criterion(NamedTuple):
    holds: bool
    margin: float


def criterion_holds(pot: Potential, alpha: float, beta: float, X: float) -> Criterion:
    """Evaluate (beta - alpha) X >= pi + (1/beta + 1/alpha) I(X); margin is LHS - RHS."""
    if not (0.0 < alpha < beta):
        raise ValueError(f"need 0 < alpha < beta, got alpha={alpha!r}, beta={beta!r}")
    if not X > 0.0:
        raise ValueError(f"X must be > 0, got {X!r}")
    margin = (beta - alpha) * X - math.pi - (1.0 / beta + 1.0 / alpha) * pot.cumulative_abs(X)
    return Criterion(margin >= 0.0, margin)


@dataclass
class WindowRow:
    X: float
    alpha: float
    beta: float
    h: float
    eigen_count: int
    margin: float


@dataclass
class BoundReport:
    a: float
    X_values: list[float] = field(default_factory=list)
    h_values: list[float] = field(default_factory=list)
    windows_checked: int = 0
    violations: list[tuple[float, float, float]] = field(default_factory=list)
    slack_stats: dict[float, int] = field(default_factory=dict)
    rows: list[WindowRow] = field(default_factory=list)
    k_hi: float = math.nan
    stride_fraction: float = 0.25
    h_scale: float = 1.0
    energy_window: str = ENERGY_WINDOW
    energy_shift: float = 0.0  # reserved; constant shifts are not applied
    potential: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: "BoundReport") -> "BoundReport":
        self.X_values += other.X_values
        self.h_values += other.h_values
        self.windows_checked += other.windows_checked
        self.violations += other.violations
        self.slack_stats.update(other.slack_stats)
        self.rows += other.rows
        return self

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "k_hi": self.k_hi,
            "stride_fraction": self.stride_fraction,
            "h_scale": self.h_scale,
            "energy_window": self.energy_window,
            "energy_shift": self.energy_shift,
            "potential": self.potential,
            "X_values": list(self.X_values),
            "h_values": list(self.h_values),
            "windows_checked": self.windows_checked,
            "violations": [list(v) for v in self.violations],
            "slack_stats": {repr(float(x)): int(c) for x, c in self.slack_stats.items()},
            "passed": self.passed,
        }


def window_starts(a: float, k_hi: float, width: float, step: float) -> np.ndarray:
    """alpha = a, a + step, ... while alpha + width <= k_hi."""
    if width > k_hi - a:
        return np.zeros(0)
    n = int(math.floor((k_hi - width - a) / step + 1e-12))
    return a + step * np.arange(n + 1)


def verify_theorem(
    pot: Potential,
    a: float,
    X: float,
    k_hi: float,
    stride_fraction: float = 0.25,
    h_scale: float = 1.0,
    method: str = "phase",
    tol: Optional[Tolerance] = None,
    tau: float = VIOLATION_TAU,
) -> BoundReport:
    """Slide windows [alpha, alpha + h(X)] over [a, k_hi] and look for eigenvalues.

    ``method="phase"`` counts multiples of pi between f_alpha(X) and
    f_beta(X) (with slack tau X) and only runs a full eigenvalue search on
    windows where that count is zero. ``method="window"`` runs
    ``eigenvalues_in_window`` on every window. ``h_scale`` shrinks or widens
    the windows to probe how tight the bound is.
    """
    if not 0.0 < stride_fraction <= 1.0:
        raise ValueError("stride_fraction must lie in (0, 1]")
    if not k_hi > a:
        raise ValueError(f"need k_hi > a, got a={a!r}, k_hi={k_hi!r}")
    if method not in ("phase", "window"):
        raise ValueError(f"unknown method {method!r}")
    h = h_of(pot, a, X)
    width = h_scale * h
    step = stride_fraction * width
    alphas = window_starts(a, k_hi, width, step)
    betas = alphas + width
    report = BoundReport(a, [float(X)], [h], k_hi=k_hi, stride_fraction=stride_fraction, h_scale=h_scale,
                         potential=pot.spec.to_dict())
    if len(alphas) == 0:
        report.slack_stats[float(X)] = 0
        return report

    if method == "phase":
        ratio = width / step
        r = int(round(ratio))
        if abs(ratio - r) < 1e-9:
            grid = a + step * np.arange(len(alphas) + r)
            betas = grid[r:]
            F, _ = f_batch(pot, grid, X, tol)
            Fa, Fb = F[: len(alphas)], F[r:]
        else:
            Fa, _ = f_batch(pot, alphas, X, tol)
            Fb, _ = f_batch(pot, betas, X, tol)
        slack = tau * X
        counts = np.floor((Fb + slack) / math.pi) - np.ceil((Fa - slack) / math.pi) + 1
        counts = np.maximum(counts, 0).astype(np.int64)
    else:
        counts = np.zeros(len(alphas), dtype=np.int64)

    I_X = pot.cumulative_abs(X)
    for j, (al, be) in enumerate(zip(alphas, betas)):
        al, be = float(al), float(be)
        c = int(counts[j])
        if c == 0:
            found = eigenvalues_in_window(pot, X, max(al - tau, 1e-300), be + tau, tol)
            c = len(found)
        if c == 0:
            report.violations.append((float(X), al, be))
        margin = (be - al) * X - math.pi - (1.0 / be + 1.0 / al) * I_X
        report.rows.append(WindowRow(float(X), al, be, h, c, margin))
    report.windows_checked = len(alphas)
    report.slack_stats[float(X)] = int(min(r.eigen_count for r in report.rows))
    return report


def verify_bound(
    pot: Potential,
    a: float,
    X_values: Sequence[float],
    k_hi: float,
    stride_fraction: float = 0.25,
    h_scale: float = 1.0,
    method: str = "phase",
    tol: Optional[Tolerance] = None,
    threads: int = 1,
) -> BoundReport:
    """``verify_theorem`` over several interval lengths, merged in input order."""
    if not len(X_values):
        raise ValueError("X_values must be nonempty")

    def one(X):
        return verify_theorem(pot, a, X, k_hi, stride_fraction, h_scale, method, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, X_values))
    else:
        parts = [one(X) for X in X_values]
    report = parts[0]
    for p in parts[1:]:
        report.merge(p)
    return report


def sharpness_probe(X: float, m: int, epsilon: float) -> bool:
    """True when the free momentum window (m pi/X + eps, (m+1) pi/X - eps) has no eigenvalue."""
    if not X > 0.0:
        raise ValueError(f"X must be > 0, got {X!r}")
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not 0.0 < epsilon < math.pi / (2.0 * X):
        raise ValueError(f"need 0 < epsilon < pi/(2X) = {math.pi / (2 * X):g}")
    lo = m * math.pi / X + epsilon
    hi = (m + 1) * math.pi / X - epsilon
    free = build_potential(PotentialSpec("zero"))
    found = eigenvalues_in_window(free, X, lo, hi)
    # open window: drop anything sitting on the (excluded) ends
    inside = (found.eigen_momenta > lo) & (found.eigen_momenta < hi)
    return not np.any(inside)
