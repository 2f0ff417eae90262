"""Modified Prufer phase for the Dirichlet solution at momentum k.

With ``u(0) = 0, u'(0) = 1`` write ``u = R sin(kx + theta)`` and
``u' = k R cos(kx + theta)``. Then

    theta' = V / (2k) * (cos(2kx + 2 theta) - 1),   theta(0) = 0
    (log R)' = V / (2k) * sin(2kx + 2 theta),       R(0) = 1 / k

and the total phase ``f_k(x) = kx + theta_k(x)`` hits a multiple of pi
exactly where u vanishes.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .potential import Potential

# step cap as a multiple of 1/k: one period of cos(2kx)
HMAX_FACTOR = math.pi


class IntegrationError(ArithmeticError):
    def __init__(self, x: float, k: float):
        super().__init__(f"step size underflow at x={x!r} (k={k!r}); the phase equation looks stiff here")
        self.x = x
        self.k = k


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 1e-12

    def __post_init__(self):
        if not (self.rel >= 1e-13 and math.isfinite(self.rel)):
            raise ValueError(f"tol.rel must be >= 1e-13, got {self.rel!r}")
        if not (self.abs > 0.0 and math.isfinite(self.abs)):
            raise ValueError(f"tol.abs must be > 0, got {self.abs!r}")

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(max(self.rel * factor, 1e-13), self.abs * factor)


def default_tolerance() -> Tolerance:
    """Defaults, overridable through SPACINGBOUND_RTOL / SPACINGBOUND_ATOL."""
    return Tolerance(
        float(os.environ.get("SPACINGBOUND_RTOL", 1e-10)),
        float(os.environ.get("SPACINGBOUND_ATOL", 1e-12)),
    )


@dataclass
class PruferTrajectory:
    k: float
    X: float
    theta_end: float
    f_end: float
    err_estimate: float
    log_amplitude_end: Optional[float] = None
    checkpoints: Optional[np.ndarray] = None  # rows (x, theta)
    nsteps: int = 0

    @property
    def u_end(self) -> float:
        """u(X) reconstructed from the amplitude (needs ``amplitude=True``)."""
        if self.log_amplitude_end is None:
            raise ValueError("trajectory was integrated without the amplitude")
        return math.exp(self.log_amplitude_end) * math.sin(self.f_end)


def _check(k, X):
    if not (k > 0.0 and math.isfinite(k)):
        raise ValueError(f"momentum k must be > 0, got {k!r}")
    if not (X > 0.0 and math.isfinite(X)):
        raise ValueError(f"interval length X must be > 0, got {X!r}")


def tail_cut(pot: Potential, k: float, X: float, eps: float) -> tuple[float, float]:
    """Largest-saving integer cut ``x_c <= X`` with ``(I(X) - I(x_c)) / k <= eps``.

    Since ``|theta'| <= |V| / k`` the phase moves by at most that much on
    ``[x_c, X]``. Returns ``(x_c, bound)``.
    """
    total = pot.cumulative_abs(X)
    if total == 0.0:
        return 0.0, 0.0
    budget = eps * k
    lo, hi = 0, int(math.floor(X))
    if hi < 1 or total - pot.cumulative_abs(float(hi)) > budget:
        return X, 0.0
    while lo < hi:
        mid = (lo + hi) // 2
        if total - pot.cumulative_abs(float(mid)) <= budget:
            hi = mid
        else:
            lo = mid + 1
    return float(hi), (total - pot.cumulative_abs(float(hi))) / k


def _split(segs, points):
    """Insert extra segment ends at ``points`` (used for checkpoint sampling)."""
    a, b, kind, val = segs
    na, nb, nk, nv = [], [], [], []
    for lo, hi, kd, v in zip(a, b, kind, val):
        inner = points[(points > lo) & (points < hi)]
        edges = np.concatenate(([lo], inner, [hi]))
        na.extend(edges[:-1])
        nb.extend(edges[1:])
        nk.extend([kd] * (len(edges) - 1))
        nv.extend([v] * (len(edges) - 1))
    return (np.asarray(na, dtype=np.float64), np.asarray(nb, dtype=np.float64),
            np.asarray(nk, dtype=np.int32), np.asarray(nv, dtype=np.float64))


def integrate_phase(
    pot: Potential,
    k: float,
    X: float,
    tol: Optional[Tolerance] = None,
    amplitude: bool = False,
    checkpoints: Optional[int] = None,
) -> PruferTrajectory:
    """Integrate theta_k on [0, X] with an adaptive Dormand-Prince 5(4) pair.

    Steps are clipped to land on every breakpoint of the potential and the
    error is controlled on theta only. ``checkpoints=n`` additionally
    records theta at ``n`` equally spaced points of (0, X].
    """
    k, X = float(k), float(X)
    _check(k, X)
    tol = tol or default_tolerance()
    xs = None
    if checkpoints:
        xs = np.linspace(0.0, X, int(checkpoints) + 1)[1:]
    if pot.is_zero:
        cps = np.column_stack((xs, np.zeros_like(xs))) if xs is not None else None
        return PruferTrajectory(k, X, 0.0, k * X, 0.0, -math.log(k) if amplitude else None, cps)

    # the tail is only skipped when no diagnostics need the full path
    x_end, tail = (X, 0.0) if (amplitude or xs is not None) else tail_cut(pot, k, X, 0.1 * tol.abs)
    segs = pot.segments(x_end)
    if xs is not None:
        segs = _split(segs, xs)
    fam, c, p1, p2 = pot.kernel_family()
    status, theta, rho, err, nsteps, xfail, seg_theta = kernels.integrate_segments(
        k, *segs, fam, c, p1, p2, tol.rel, tol.abs, HMAX_FACTOR / k, bool(amplitude)
    )
    if status:
        raise IntegrationError(xfail, k)
    cps = None
    if xs is not None:
        ends = segs[1]
        cps = np.column_stack((xs, np.interp(xs, ends, seg_theta)))
    return PruferTrajectory(
        k=k,
        X=X,
        theta_end=float(theta),
        f_end=k * X + float(theta),
        err_estimate=float(err) + tail,
        log_amplitude_end=(-math.log(k) + float(rho)) if amplitude else None,
        checkpoints=cps,
        nsteps=int(nsteps),
    )


def f_at(pot: Potential, k: float, X: float, tol: Optional[Tolerance] = None) -> float:
    """Total phase f_k(X) = kX + theta_k(X)."""
    return integrate_phase(pot, k, X, tol).f_end


def f_batch(pot: Potential, ks, X: float, tol: Optional[Tolerance] = None) -> tuple[np.ndarray, np.ndarray]:
    """f_k(X) for an array of momenta; returns ``(f, err_estimate)``.

    One segment table is shared by all momenta, so the tail cut uses the
    smallest k (the most conservative choice).
    """
    ks = np.ascontiguousarray(ks, dtype=np.float64)
    X = float(X)
    if ks.size == 0:
        return np.zeros(0), np.zeros(0)
    _check(float(ks.min()), X)
    tol = tol or default_tolerance()
    if pot.is_zero:
        return ks * X, np.zeros_like(ks)
    x_end, tail_at_min = tail_cut(pot, float(ks.min()), X, 0.1 * tol.abs)
    segs = pot.segments(x_end)
    fam, c, p1, p2 = pot.kernel_family()
    status, theta, err, _, xfail = kernels.integrate_batch(
        ks, *segs, fam, c, p1, p2, tol.rel, tol.abs, HMAX_FACTOR
    )
    bad = np.flatnonzero(status)
    if bad.size:
        raise IntegrationError(float(xfail[bad[0]]), float(ks[bad[0]]))
    tail = tail_at_min * float(ks.min()) / ks
    return ks * X + theta, err + tail


def phase_difference_bound(pot: Potential, alpha: float, beta: float, X: float) -> float:
    """Lower bound (beta - alpha) X - (1/beta + 1/alpha) I(X) for f_beta(X) - f_alpha(X).

    Follows from |cos - 1| <= 2 in the phase equation.
    """
    if not (0.0 < alpha < beta):
        raise ValueError(f"need 0 < alpha < beta, got alpha={alpha!r}, beta={beta!r}")
    if not X > 0.0:
        raise ValueError(f"X must be > 0, got {X!r}")
    return (beta - alpha) * X - (1.0 / beta + 1.0 / alpha) * pot.cumulative_abs(X)
