"""Dirichlet eigenvalues of H_X = -d^2/dx^2 + V on [0, X].

Two independent routes:

* ``eigenvalues_in_window``: shooting in momentum. E = k^2 is an eigenvalue
  exactly when f_k(X) is a multiple of pi, and floor(f_k(X) / pi) counts
  the zeros of the Dirichlet solution in (0, X), so crossings are located
  on a k-grid and refined.
* ``fd_oracle_eigenvalues``: three-point finite differences, Sturm-sequence
  bisection on the tridiagonal matrix, Richardson extrapolation in h^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._backend import kernels
from .potential import Potential
from .prufer import Tolerance, default_tolerance, f_at, f_batch

ROOT_TOL = 1e-10
MAX_HALVINGS = 6


class MissedCrossingError(ArithmeticError):
    pass


class AmbiguousCountError(ArithmeticError):
    pass


class EigenWarning(UserWarning):
    pass


@dataclass
class EigenvalueSet:
    X: float
    k_window: tuple[float, float]
    eigen_momenta: np.ndarray
    eigen_energies: np.ndarray
    residuals: np.ndarray
    method: str
    warnings: list[str] = field(default_factory=list)
    # prufer_shooting: the multiple of pi hit by each eigenvalue
    indices: Optional[np.ndarray] = None
    # fd_oracle: mesh spacings actually used and the energies on each mesh
    mesh_sizes: Optional[np.ndarray] = None
    mesh_energies: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.eigen_energies)

    def to_dict(self) -> dict:
        d = {
            "X": self.X,
            "k_window": list(self.k_window),
            "eigen_momenta": self.eigen_momenta.tolist(),
            "eigen_energies": self.eigen_energies.tolist(),
            "residuals": self.residuals.tolist(),
            "method": self.method,
            "warnings": list(self.warnings),
        }
        if self.mesh_sizes is not None:
            d["mesh_sizes"] = self.mesh_sizes.tolist()
        return d


def _empty(X, window, method, note):
    z = np.zeros(0)
    return EigenvalueSet(X, window, z, z.copy(), z.copy(), method, [note])


def _refine_root(pot, X, m, ka, kb, ga, gb, tol, root_tol):
    """Root of g(k) = f_k(X) - m pi in [ka, kb] with ga <= 0 <= gb.

    Illinois regula falsi; a bisection step is forced whenever two
    iterations fail to halve the bracket. Returns ``(k, g(k))``.
    """
    target = m * math.pi
    best_k, best_g = (ka, ga) if abs(ga) < abs(gb) else (kb, gb)
    side = 0
    widths = [kb - ka, kb - ka]
    for _ in range(200):
        if abs(best_g) < 0.1 * root_tol or kb - ka <= 4e-16 * kb:
            break
        kc = kb - gb * (kb - ka) / (gb - ga)
        if not ka < kc < kb or (kb - ka) > 0.5 * widths[-2]:
            kc = 0.5 * (ka + kb)
            side = 0
        widths.append(kb - ka)
        gc = f_at(pot, kc, X, tol) - target
        if abs(gc) < abs(best_g):
            best_k, best_g = kc, gc
        if gc == 0.0:
            break
        if gc < 0.0:
            ka, ga = kc, gc
            if side == -1:
                gb *= 0.5
            side = -1
        else:
            kb, gb = kc, gc
            if side == 1:
                ga *= 0.5
            side = 1
    return best_k, best_g


def scan_pitch(pot: Potential, X: float, k_lo: float, samples: float = 4.0) -> float:
    """k-grid pitch pi/(samples X), shrunk by the phase budget 1 + I(X)/(k_lo X)."""
    return math.pi / (samples * X) / (1.0 + pot.cumulative_abs(X) / (k_lo * X))


def eigenvalues_in_window(
    pot: Potential,
    X: float,
    k_lo: float,
    k_hi: float,
    tol: Optional[Tolerance] = None,
    root_tol: float = ROOT_TOL,
    samples_per_spacing: float = 4.0,
    validate: bool = False,
) -> EigenvalueSet:
    """All k in [k_lo, k_hi] with f_k(X) in pi Z, i.e. eigenvalues k^2 of H_X."""
    X, k_lo, k_hi = float(X), float(k_lo), float(k_hi)
    if not (X > 0.0 and math.isfinite(X)):
        raise ValueError(f"X must be > 0, got {X!r}")
    if not (0.0 < k_lo and math.isfinite(k_hi)):
        raise ValueError(f"need a bounded window with k_lo > 0, got [{k_lo!r}, {k_hi!r}]")
    if samples_per_spacing < 4.0:
        raise ValueError("samples_per_spacing must be >= 4")
    window = (k_lo, k_hi)
    if k_hi - k_lo < 2.0 * root_tol:
        note = f"degenerate window [{k_lo!r}, {k_hi!r}]"
        warnings.warn(note, EigenWarning, stacklevel=2)
        return _empty(X, window, "prufer_shooting", note)
    tol = tol or default_tolerance()

    pitch = scan_pitch(pot, X, k_lo, samples_per_spacing)
    n = max(int(math.ceil((k_hi - k_lo) / pitch)), 1)
    ks = np.linspace(k_lo, k_hi, n + 1)
    F, _ = f_batch(pot, ks, X, tol)

    roots: dict[int, tuple[float, float]] = {}
    for end in (0, n):
        m = int(round(F[end] / math.pi))
        g = F[end] - m * math.pi
        if abs(g) <= root_tol:
            roots.setdefault(m, (float(ks[end]), g))

    stack = [(float(ks[j]), float(ks[j + 1]), float(F[j]), float(F[j + 1]), 0) for j in range(n - 1, -1, -1)]
    while stack:
        ka, kb, fa, fb, depth = stack.pop()
        ca, cb = math.floor(fa / math.pi), math.floor(fb / math.pi)
        if cb == ca and abs(fb - fa) <= math.pi:
            continue
        if abs(fb - fa) > math.pi or cb - ca != 1:
            if depth >= MAX_HALVINGS:
                raise MissedCrossingError(
                    f"phase jumps from {fa:.6g} to {fb:.6g} on [{ka!r}, {kb!r}] after {depth} halvings"
                )
            km = 0.5 * (ka + kb)
            fm = f_at(pot, km, X, tol)
            stack.append((km, kb, fm, fb, depth + 1))
            stack.append((ka, km, fa, fm, depth + 1))
            continue
        m = int(cb)
        if m in roots:
            continue
        roots[m] = _refine_root(pot, X, m, ka, kb, fa - m * math.pi, fb - m * math.pi, tol, root_tol)

    order = sorted(roots)
    k_star = np.array([roots[m][0] for m in order])
    res = np.array([abs(roots[m][1]) for m in order])
    inside = (k_star >= k_lo) & (k_star <= k_hi)
    k_star, res, idx = k_star[inside], res[inside], np.array(order, dtype=np.int64)[inside]
    result = EigenvalueSet(X, window, k_star, k_star**2, res, "prufer_shooting", indices=idx)
    if np.any(np.diff(k_star) <= 0.0):
        result.warnings.append("eigen momenta are not strictly increasing; crossing counts are not monotone here")
    if np.any(res >= root_tol):
        result.warnings.append(f"{int(np.sum(res >= root_tol))} residual(s) above root tolerance {root_tol:g}")
    if validate:
        oracle = fd_oracle_eigenvalues(pot, X, k_lo**2, k_hi**2)
        if len(oracle) != len(result):
            result.warnings.append(
                f"count mismatch: prufer found {len(result)}, finite-difference oracle {len(oracle)}"
            )
    for w in result.warnings:
        warnings.warn(w, EigenWarning, stacklevel=2)
    return result


def crossing_count(pot: Potential, X: float, k: float, tol: Optional[Tolerance] = None) -> int:
    """floor(f_k(X) / pi): the number of eigenvalues with momentum below k."""
    f = f_at(pot, k, X, tol)
    m = round(f / math.pi)
    if abs(f - m * math.pi) < 1e-9:
        raise AmbiguousCountError(f"f_k(X) = {f!r} is within 1e-9 of {m} pi; perturb k={k!r}")
    return max(int(math.floor(f / math.pi)), 0)


# -- finite-difference oracle ------------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    mesh_sizes: Optional[Sequence[float]] = None
    extrapolate: bool = True

    def __post_init__(self):
        if self.mesh_sizes is not None:
            h = np.asarray(self.mesh_sizes, dtype=np.float64)
            if h.ndim != 1 or h.size == 0 or np.any(h <= 0.0):
                raise ValueError("mesh_sizes must be a nonempty list of positive spacings")
            if np.any(np.diff(h) >= 0.0):
                raise ValueError("mesh_sizes must be strictly decreasing")


def default_meshes(X: float, E_hi: float, levels: int = 3) -> list[float]:
    h0 = min(1.0 / (10.0 * math.sqrt(max(E_hi, 1.0))), X / 64.0)
    return [h0 / 2**j for j in range(levels)]


_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _gl(pot, lo, hi):
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    pts = np.maximum(pts, 1e-300)
    return half * (pot.values(pts) @ _GL_W)


def node_potential(pot: Potential, X: float, n: int) -> np.ndarray:
    """Potential at the interior nodes of a uniform n-interval grid.

    Smooth families are sampled pointwise; anything with breakpoints gets
    exact cell averages over [x_i - h/2, x_i + h/2].
    """
    h = X / n
    x = h * np.arange(1, n)
    bps = pot.breakpoints(X)
    if len(bps) == 0:
        return pot.values(x)
    lo, hi = x - 0.5 * h, x + 0.5 * h
    i0 = np.searchsorted(bps, lo, side="right")
    i1 = np.searchsorted(bps, hi, side="left")
    cnt = i1 - i0
    total = np.zeros_like(x)
    for j in range(int(cnt.max()) + 1):
        use = cnt >= j
        a = np.where(j == 0, lo, bps[np.minimum(i0 + j - 1, len(bps) - 1)])
        b = np.where(j < cnt, bps[np.minimum(i0 + j, len(bps) - 1)], hi)
        seg = np.zeros_like(x)
        seg[use] = _gl(pot, a[use], b[use])
        total += seg
    return total / h


def _fd_energies(pot, X, n, idx_lo, idx_hi, rtol=1e-14):
    h = X / n
    diag = np.ascontiguousarray(2.0 / h**2 + node_potential(pot, X, n))
    off2 = 1.0 / h**4
    lo = float(diag.min()) - 2.0 / h**2
    hi = float(diag.max()) + 2.0 / h**2
    return np.asarray(kernels.eigs_by_index(diag, off2, idx_lo, idx_hi, lo, hi, rtol))


def _richardson(hs, table):
    """Neville extrapolation to h = 0 in the variable h^2; ``table`` rows per mesh."""
    t = np.asarray(hs) ** 2
    P = [row.copy() for row in table]
    m = len(P)
    for level in range(1, m):
        for i in range(m - 1, level - 1, -1):
            P[i] = (t[i - level] * P[i] - t[i] * P[i - 1]) / (t[i - level] - t[i])
    return P[-1]


def fd_oracle_eigenvalues(
    pot: Potential,
    X: float,
    E_lo: float,
    E_hi: float,
    cfg: Optional[OracleConfig] = None,
) -> EigenvalueSet:
    """Eigenvalues of H_X in [E_lo, E_hi] by finite differences (negative E allowed)."""
    X, E_lo, E_hi = float(X), float(E_lo), float(E_hi)
    if not E_lo < E_hi:
        raise ValueError(f"need E_lo < E_hi, got [{E_lo!r}, {E_hi!r}]")
    cfg = cfg or OracleConfig()
    meshes = list(cfg.mesh_sizes) if cfg.mesh_sizes is not None else default_meshes(X, E_hi)
    h_max = 1.0 / (10.0 * math.sqrt(E_hi)) if E_hi > 0.0 else math.inf
    if meshes[-1] > h_max * (1.0 + 1e-12):
        raise ValueError(f"finest mesh {meshes[-1]:g} does not resolve E_hi={E_hi:g}; need <= {h_max:g}")
    ns = [max(int(math.ceil(X / h - 1e-9)), 2) for h in meshes]
    hs = np.array([X / n for n in ns])
    if np.any(np.diff(hs) >= 0.0):
        raise ValueError("mesh sizes collapse to the same grid on this interval")

    # index range from the finest grid, padded so boundary eigenvalues can move in
    n_f = ns[-1]
    diag_f = np.ascontiguousarray(2.0 / hs[-1] ** 2 + node_potential(pot, X, n_f))
    off2_f = 1.0 / hs[-1] ** 4
    pad = 0.05 * (E_hi - E_lo) + 1e-6 * max(abs(E_lo), abs(E_hi), 1.0)
    i_lo = int(kernels.sturm_count(diag_f, off2_f, E_lo - pad))
    i_hi = int(kernels.sturm_count(diag_f, off2_f, E_hi + pad))
    i_hi = min(i_hi, min(ns) - 1)
    if i_hi <= i_lo:
        z = np.zeros(0)
        return EigenvalueSet(X, _kwin(E_lo, E_hi), z, z.copy(), z.copy(), "fd_oracle",
                             mesh_sizes=hs, mesh_energies=np.zeros((len(hs), 0)))

    table = [_fd_energies(pot, X, n, i_lo, i_hi) for n in ns]
    E = _richardson(hs, table) if (cfg.extrapolate and len(hs) > 1) else table[-1].copy()
    uncertainty = np.abs(E - table[-1]) + 1e-13 * np.maximum(np.abs(E), 1.0)
    keep = (E >= E_lo) & (E <= E_hi)
    notes = []
    near = (np.abs(E - E_lo) <= uncertainty) | (np.abs(E - E_hi) <= uncertainty)
    if np.any(near):
        notes.append(f"eigenvalue(s) {E[near].tolist()} within the discretization uncertainty of the window boundary")
        for w in notes:
            warnings.warn(w, EigenWarning, stacklevel=2)
    E_in = E[keep]
    return EigenvalueSet(
        X,
        _kwin(E_lo, E_hi),
        np.sign(E_in) * np.sqrt(np.abs(E_in)),
        E_in,
        uncertainty[keep],
        "fd_oracle",
        notes,
        mesh_sizes=hs,
        mesh_energies=np.array([row[keep] for row in table]),
    )


def _kwin(E_lo, E_hi):
    s = lambda e: math.copysign(math.sqrt(abs(e)), e)  # noqa: E731
    return (s(E_lo), s(E_hi))
