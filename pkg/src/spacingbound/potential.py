"""Decaying, locally integrable potentials on the half line.

Every family evaluates pointwise, reports where it is non-smooth and
computes the cumulative absolute mass ``I(x) = int_0^x |V(t)| dt``, in
closed form where one exists and otherwise by adaptive quadrature over unit
cells (cached).

Families and their parameters:

=================== ==================================== ==========================
family              V(x) for x >= support_start          params
=================== ==================================== ==========================
zero                0                                    --
exponential         c exp(-lam x)                        c, lam > 0
power               c (1 + x)^(-gamma)                   c, gamma > 0
wigner_von_neumann  c sin(omega x) (1 + x)^(-gamma)      c, omega > 0, gamma > 0
step_sequence       v_n on [n, n+1)                      c, eta > 0  (v_n = c (n+1)^-eta)
                                                         or values: [v_0, v_1, ...]
bump_train          h_j on [start_j, end_j)              bumps: [[start, end, h], ...]
random_decaying     c (n+1)^(-eta) u_n on [n, n+1)       c, eta > 0, seed
=================== ==================================== ==========================
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy import integrate

FAMILIES = (
    "zero",
    "exponential",
    "power",
    "wigner_von_neumann",
    "step_sequence",
    "bump_train",
    "random_decaying",
)
PIECEWISE = ("step_sequence", "bump_train", "random_decaying")

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 500

# kernel codes; keep in sync with _kernels.pyx
SEG_ZERO, SEG_CONST, SEG_SMOOTH = 0, 1, 2
_FAMILY_CODE = {"exponential": 1, "power": 2, "wigner_von_neumann": 3}


class PotentialError(ValueError):
    """Invalid potential specification; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


_REQUIRED: dict[str, tuple[str, ...]] = {
    "zero": (),
    "exponential": ("c", "lam"),
    "power": ("c", "gamma"),
    "wigner_von_neumann": ("c", "omega", "gamma"),
    "step_sequence": (),
    "bump_train": ("bumps",),
    "random_decaying": ("c", "eta", "seed"),
}
_OPTIONAL: dict[str, tuple[str, ...]] = {"step_sequence": ("c", "eta", "values")}
_POSITIVE = ("lam", "gamma", "omega", "eta")


@dataclass(frozen=True)
class PotentialSpec:
    family: str
    params: Mapping[str, Any] = field(default_factory=dict)
    support_start: float = 0.0

    def to_dict(self) -> dict:
        return {"family": self.family, "params": _plain(self.params), "support_start": float(self.support_start)}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PotentialSpec":
        if not isinstance(doc, Mapping):
            raise PotentialError("potential", "expected a key/value document")
        unknown = set(doc) - {"family", "params", "support_start"}
        if unknown:
            raise PotentialError(sorted(unknown)[0], "unknown field")
        if "family" not in doc:
            raise PotentialError("family", "missing")
        params = doc.get("params", {}) or {}
        if not isinstance(params, Mapping):
            raise PotentialError("params", "expected a key/value mapping")
        return cls(str(doc["family"]), dict(params), float(doc.get("support_start", 0.0)))


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _real(params, name):
    try:
        value = float(params[name])
    except (TypeError, ValueError):
        raise PotentialError(name, f"expected a real number, got {params[name]!r}") from None
    if not math.isfinite(value):
        raise PotentialError(name, "must be finite")
    return value


def _validate(spec: PotentialSpec) -> dict:
    if spec.family not in FAMILIES:
        raise PotentialError("family", f"unknown family {spec.family!r}; expected one of {', '.join(FAMILIES)}")
    if not (math.isfinite(spec.support_start) and spec.support_start >= 0.0):
        raise PotentialError("support_start", "must be a finite real >= 0")
    params = dict(spec.params)
    allowed = set(_REQUIRED[spec.family]) | set(_OPTIONAL.get(spec.family, ()))
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise PotentialError(unknown[0], f"not a parameter of family {spec.family!r}")
    for name in _REQUIRED[spec.family]:
        if name not in params:
            raise PotentialError(name, f"required for family {spec.family!r}")
    out: dict[str, Any] = {}
    if spec.family == "step_sequence":
        if "values" in params:
            if "eta" in params:
                raise PotentialError("values", "give either values or the (c, eta) rule, not both")
            vals = params["values"]
            if isinstance(vals, (str, bytes)) or not hasattr(vals, "__len__"):
                raise PotentialError("values", "expected a list of reals")
            try:
                arr = np.asarray(vals, dtype=np.float64)
            except (TypeError, ValueError):
                raise PotentialError("values", "expected a list of reals") from None
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise PotentialError("values", "expected a flat list of finite reals")
            out["values"] = arr
            return out
        if "eta" not in params:
            raise PotentialError("eta", "step_sequence needs either values or eta (rule v_n = c (n+1)^-eta)")
        out["c"] = _real(params, "c") if "c" in params else 1.0
        out["eta"] = _real(params, "eta")
    elif spec.family == "bump_train":
        bumps = params["bumps"]
        try:
            arr = np.asarray(bumps, dtype=np.float64).reshape(-1, 3) if len(bumps) else np.zeros((0, 3))
        except (TypeError, ValueError):
            raise PotentialError("bumps", "expected a list of [start, end, height] triples") from None
        if not np.all(np.isfinite(arr)):
            raise PotentialError("bumps", "entries must be finite")
        arr = arr[np.argsort(arr[:, 0], kind="stable")]
        if np.any(arr[:, 0] < 0.0) or np.any(arr[:, 1] <= arr[:, 0]):
            raise PotentialError("bumps", "each bump needs 0 <= start < end")
        if np.any(arr[1:, 0] < arr[:-1, 1]):
            raise PotentialError("bumps", "bumps must not overlap")
        out["bumps"] = arr
        return out
    else:
        for name in _REQUIRED[spec.family]:
            if name == "seed":
                try:
                    out["seed"] = int(params["seed"])
                except (TypeError, ValueError):
                    raise PotentialError("seed", "expected an integer") from None
                if out["seed"] < 0:
                    raise PotentialError("seed", "must be >= 0")
            else:
                out[name] = _real(params, name)
    for name in _POSITIVE:
        if name in out and not out[name] > 0.0:
            raise PotentialError(name, f"must be > 0, got {out[name]}")
    return out


class Potential:
    """A validated potential. Immutable apart from its append-only caches."""

    def __init__(self, spec: PotentialSpec):
        self.spec = spec
        self.family = spec.family
        self.p = _validate(spec)
        self.support_start = float(spec.support_start)
        self._lock = threading.RLock()
        self._cells = np.zeros(0)        # signed cell values of piecewise families
        self._cell_cum = np.zeros(1)     # |v| prefix sums, _cell_cum[n] = I(n) before support cut
        self._quad_cache = [0.0]         # I(n) at unit checkpoints, quadrature path

    def __repr__(self):
        return f"Potential({self.spec.to_dict()!r})"

    @property
    def is_zero(self) -> bool:
        if self.family == "zero":
            return True
        if self.family in ("exponential", "power", "wigner_von_neumann", "random_decaying"):
            return self.p["c"] == 0.0
        if self.family == "step_sequence":
            return ("values" in self.p and not np.any(self.p["values"])) or self.p.get("c", 1.0) == 0.0
        return not np.any(self.p["bumps"][:, 2])

    @property
    def has_closed_form(self) -> bool:
        return self.family != "wigner_von_neumann"

    # -- pointwise values -------------------------------------------------

    def _raw(self, x: np.ndarray) -> np.ndarray:
        f, p = self.family, self.p
        if f == "zero":
            return np.zeros_like(x)
        if f == "exponential":
            return p["c"] * np.exp(-p["lam"] * x)
        if f == "power":
            return p["c"] * (1.0 + x) ** (-p["gamma"])
        if f == "wigner_von_neumann":
            return p["c"] * np.sin(p["omega"] * x) * (1.0 + x) ** (-p["gamma"])
        if f == "bump_train":
            bumps = p["bumps"]
            out = np.zeros_like(x)
            if len(bumps):
                j = np.searchsorted(bumps[:, 0], x, side="right") - 1
                inside = (j >= 0) & (x < bumps[np.maximum(j, 0), 1])
                out[inside] = bumps[j[inside], 2]
            return out
        n = np.floor(x).astype(np.int64)
        return self.cell_values(int(n.max()) + 1 if n.size else 0)[n]

    def values(self, x) -> np.ndarray:
        """Vectorized V(x) for x > 0 (right-continuous at breakpoints)."""
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
            raise DomainError("potential is evaluated at x > 0 only")
        v = self._raw(np.atleast_1d(x))
        v = np.where(np.atleast_1d(x) < self.support_start, 0.0, v)
        return v.reshape(x.shape)

    def eval(self, x: float) -> float:
        if not x > 0.0:
            raise DomainError(f"potential is evaluated at x > 0 only, got x={x!r}")
        return float(self.values(np.array([float(x)]))[0])

    __call__ = eval

    def cell_values(self, n: int) -> np.ndarray:
        """Signed values of the first ``n`` unit cells (piecewise families)."""
        if self.family not in ("step_sequence", "random_decaying"):
            raise TypeError(f"{self.family} is not defined by unit-cell values")
        with self._lock:
            if len(self._cells) < n:
                self._extend_cells(n)
            return self._cells[:n]

    def _extend_cells(self, n):
        size = max(n, 2 * len(self._cells), 64)
        p = self.p
        idx = np.arange(size, dtype=np.float64)
        if self.family == "step_sequence":
            if "values" in p:
                vals = np.zeros(size)
                m = min(size, len(p["values"]))
                vals[:m] = p["values"][:m]
            else:
                vals = p["c"] * (idx + 1.0) ** (-p["eta"])
        else:
            # regenerated from the seed each time so every prefix is reproducible
            u = np.random.default_rng(p["seed"]).random(size)
            vals = p["c"] * (idx + 1.0) ** (-p["eta"]) * u
        cum = np.concatenate(([0.0], np.cumsum(np.abs(vals))))
        self._cells, self._cell_cum = vals, cum

    def breakpoints(self, upto: float) -> np.ndarray:
        """Sorted points in (0, upto) where V is not smooth."""
        pts: list[float] = []
        if self.support_start > 0.0:
            pts.append(self.support_start)
        if self.family in ("step_sequence", "random_decaying"):
            pts.extend(np.arange(1.0, math.ceil(upto)))
        elif self.family == "bump_train":
            pts.extend(self.p["bumps"][:, :2].ravel())
        arr = np.unique(np.asarray(pts, dtype=np.float64))
        return arr[(arr > 0.0) & (arr < upto)]

    # -- cumulative mass ---------------------------------------------------

    def _closed_G(self, x: float) -> float:
        """int_0^x |V_family| with support_start ignored."""
        f, p = self.family, self.p
        if f == "zero" or x <= 0.0:
            return 0.0
        if f == "exponential":
            return abs(p["c"]) * -math.expm1(-p["lam"] * x) / p["lam"]
        if f == "power":
            g = p["gamma"]
            if g == 1.0:
                return abs(p["c"]) * math.log1p(x)
            return abs(p["c"]) * math.expm1((1.0 - g) * math.log1p(x)) / (1.0 - g)
        if f == "bump_train":
            b = self.p["bumps"]
            overlap = np.clip(np.minimum(b[:, 1], x) - b[:, 0], 0.0, None)
            return float(np.sum(overlap * np.abs(b[:, 2])))
        n = int(math.floor(x))
        self.cell_values(n + 1)
        return float(self._cell_cum[n] + (x - n) * abs(self._cells[n]))

    def _cell_quad(self, lo: float, hi: float, power: float = 1.0) -> float:
        pts = self.breakpoints(hi)
        pts = pts[pts > lo]
        if self.family == "wigner_von_neumann":
            w = self.p["omega"]
            zeros = np.arange(math.ceil(lo * w / math.pi), math.floor(hi * w / math.pi) + 1) * math.pi / w
            pts = np.union1d(pts, zeros[(zeros > lo) & (zeros < hi)])
        lo_eff = max(lo, self.support_start)
        if hi <= lo_eff:
            return 0.0
        pts = pts[pts > lo_eff]

        fam, c, p1, p2 = self.kernel_family()
        if fam == 1:
            def f(t):
                return abs(c * math.exp(-p1 * t)) ** power
        elif fam == 2:
            def f(t):
                return abs(c * (1.0 + t) ** -p1) ** power
        elif fam == 3:
            def f(t):
                return abs(c * math.sin(p2 * t) * (1.0 + t) ** -p1) ** power
        else:
            def f(t):
                return abs(float(self._raw(np.array([t]))[0])) ** power

        val, err, *_ = integrate.quad(
            f, lo_eff, hi, points=pts if len(pts) else None, epsabs=QUAD_EPSABS,
            epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1,
        )
        # roundoff warnings are fine as long as the estimate is within tolerance
        if err > max(QUAD_EPSABS, QUAD_EPSREL * abs(val)) * 100:
            raise QuadratureError(f"quadrature of |V|^{power:g} on [{lo}, {hi}] did not converge", err)
        return val

    def _quad_checkpoint(self, n: int) -> float:
        with self._lock:
            cache = self._quad_cache
            while len(cache) <= n:
                m = len(cache) - 1
                cache.append(cache[-1] + self._cell_quad(float(m), float(m + 1)))
            return cache[n]

    def cumulative_abs(self, x: float, method: str = "auto") -> float:
        """I(x) = int_0^x |V(t)| dt.

        ``method`` is ``"auto"`` (closed form when the family has one),
        ``"closed"`` or ``"quad"`` (unit-cell checkpoints plus one partial cell).
        """
        x = float(x)
        if not (x >= 0.0) or math.isinf(x):
            raise DomainError(f"cumulative_abs needs finite x >= 0, got {x!r}")
        if method not in ("auto", "closed", "quad"):
            raise ValueError(f"unknown method {method!r}")
        if method == "closed" and not self.has_closed_form:
            raise ValueError(f"{self.family} has no closed-form integral")
        if method == "quad" or (method == "auto" and not self.has_closed_form):
            n = int(math.floor(x))
            return self._quad_checkpoint(n) + (self._cell_quad(float(n), x) if x > n else 0.0)
        s = self.support_start
        return max(self._closed_G(max(x, s)) - self._closed_G(s), 0.0) if x > s else 0.0

    def unit_cell_masses(self, N: int, method: str = "auto") -> np.ndarray:
        """(v_0, ..., v_{N-1}) with v_n = int_n^{n+1} |V|."""
        N = int(N)
        if N < 1:
            raise ValueError("N must be >= 1")
        if method == "auto" and self.family in ("step_sequence", "random_decaying") and self.support_start == 0.0:
            return np.abs(self.cell_values(N)).copy()
        cum = np.array([self.cumulative_abs(float(n), method) for n in range(N + 1)])
        return np.maximum(np.diff(cum), 0.0)

    def cell_power_integrals(self, N: int, p: float) -> np.ndarray:
        """int_n^{n+1} |V|^p for n < N, closed form where available."""
        f, pr, s = self.family, self.p, self.support_start
        out = np.empty(N)
        for n in range(N):
            lo, hi = max(float(n), s), float(n + 1)
            if hi <= lo or f == "zero":
                out[n] = 0.0
            elif f == "exponential":
                lam = pr["lam"]
                out[n] = abs(pr["c"]) ** p * (math.exp(-p * lam * lo) - math.exp(-p * lam * hi)) / (p * lam)
            elif f == "power":
                e = 1.0 - pr["gamma"] * p
                a = abs(pr["c"]) ** p
                out[n] = a * (math.log1p(hi) - math.log1p(lo)) if e == 0.0 else a * ((1 + hi) ** e - (1 + lo) ** e) / e
            elif f in ("step_sequence", "random_decaying"):
                out[n] = abs(self.cell_values(n + 1)[n]) ** p * (hi - lo)
            elif f == "bump_train":
                b = pr["bumps"]
                overlap = np.clip(np.minimum(b[:, 1], hi) - np.maximum(b[:, 0], lo), 0.0, None)
                out[n] = float(np.sum(overlap * np.abs(b[:, 2]) ** p))
            else:
                out[n] = self._cell_quad(float(n), hi, power=p)
        return out

    # -- kernel interface ---------------------------------------------------

    def segments(self, X: float):
        """Split [0, X] into pieces on which V is zero, constant or smooth.

        Returns ``(a, b, kind, value)`` arrays for the phase kernels.
        """
        X = float(X)
        f, s = self.family, self.support_start
        a: list[float] = []
        b: list[float] = []
        kind: list[int] = []
        val: list[float] = []

        def add(lo, hi, kd, v=0.0):
            lo, hi = max(lo, 0.0), min(hi, X)
            if hi <= lo:
                return
            if lo < s:
                add(lo, min(hi, s), SEG_ZERO)
                lo = s
                if hi <= lo:
                    return
            if kd == SEG_CONST and v == 0.0:
                kd = SEG_ZERO
            if kind and kd == SEG_ZERO and kind[-1] == SEG_ZERO and b[-1] == lo:
                b[-1] = hi
                return
            a.append(lo)
            b.append(hi)
            kind.append(kd)
            val.append(v)

        if f == "zero" or self.is_zero:
            add(0.0, X, SEG_ZERO)
        elif f in _FAMILY_CODE:
            add(0.0, X, SEG_SMOOTH)
        elif f == "bump_train":
            pos = 0.0
            for lo, hi, h in self.p["bumps"]:
                add(pos, lo, SEG_ZERO)
                add(lo, hi, SEG_CONST, float(h))
                pos = max(pos, hi)
            add(pos, X, SEG_ZERO)
        else:
            ncell = int(math.ceil(X))
            vals = self.cell_values(ncell)
            for n in range(ncell):
                add(float(n), float(n + 1), SEG_CONST, float(vals[n]))
        return (
            np.asarray(a, dtype=np.float64),
            np.asarray(b, dtype=np.float64),
            np.asarray(kind, dtype=np.int32),
            np.asarray(val, dtype=np.float64),
        )

    def kernel_family(self):
        """``(code, c, p1, p2)`` describing the smooth part for the kernels."""
        f, p = self.family, self.p
        if f == "exponential":
            return 1, p["c"], p["lam"], 0.0
        if f == "power":
            return 2, p["c"], p["gamma"], 0.0
        if f == "wigner_von_neumann":
            return 3, p["c"], p["gamma"], p["omega"]
        return 0, 0.0, 0.0, 0.0


def build_potential(spec: PotentialSpec | Mapping[str, Any]) -> Potential:
    if not isinstance(spec, PotentialSpec):
        spec = PotentialSpec.from_dict(spec)
    return Potential(spec)


def cumulative_abs(pot: Potential, x: float, method: str = "auto") -> float:
    return pot.cumulative_abs(x, method)


def unit_cell_masses(pot: Potential, N: int, method: str = "auto") -> np.ndarray:
    return pot.unit_cell_masses(N, method)


def constant_on(c: float, X: float) -> Potential:
    """V = c on [0, X) and zero afterwards (a one-bump train)."""
    return build_potential(PotentialSpec("bump_train", {"bumps": [[0.0, float(X), float(c)]]}))
