"""Pure-Python versions of the compiled kernels.

Same algorithms, same constants and the same step controller as
``_kernels.pyx``; used when the extension is unavailable or when
``SPACINGBOUND_PURE=1`` is set.
"""
from __future__ import annotations

import math

import numpy as np

SEG_ZERO, SEG_CONST, SEG_SMOOTH = 0, 1, 2
FAM_EXP, FAM_POWER, FAM_WVN = 1, 2, 3

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

_EPS = 2.220446049250313e-15


def _smooth_v(fam, c, p1, p2, x):
    if fam == FAM_EXP:
        return c * math.exp(-p1 * x)
    if fam == FAM_POWER:
        return c * (1.0 + x) ** (-p1)
    if fam == FAM_WVN:
        return c * math.sin(p2 * x) * (1.0 + x) ** (-p1)
    return 0.0


def _integrate(k, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2, rtol, atol, hmax, want_amp, seg_theta):
    cos, sin, fabs = math.cos, math.sin, abs
    half = 1.0 / (2.0 * k)
    th = rho = err_sum = 0.0
    h = min(0.1, 0.1 / k)
    nsteps = 0
    for s in range(len(seg_a)):
        x = float(seg_a[s])
        b = float(seg_b[s])
        kind = int(seg_kind[s])
        if kind == SEG_ZERO or b <= x:
            if seg_theta is not None:
                seg_theta[s] = th
            continue
        v = float(seg_val[s])
        v1 = v2 = v3 = v4 = v5 = v6 = v
        if kind == SEG_SMOOTH:
            v1 = _smooth_v(fam, c, p1, p2, x)
        arg = 2.0 * (k * x + th)
        k1 = v1 * half * (cos(arg) - 1.0)
        r1 = v1 * half * sin(arg)
        while x < b:
            last = False
            hs = min(h, hmax)
            if x + hs >= b or (b - x - hs) < 1e-12 * hs:
                hs = b - x
                last = True
            if hs < _EPS * max(1.0, fabs(x)) and not last:
                return 1, th, rho, err_sum, nsteps, x
            if kind == SEG_SMOOTH:
                v2 = _smooth_v(fam, c, p1, p2, x + C2 * hs)
                v3 = _smooth_v(fam, c, p1, p2, x + C3 * hs)
                v4 = _smooth_v(fam, c, p1, p2, x + C4 * hs)
                v5 = _smooth_v(fam, c, p1, p2, x + C5 * hs)
                v6 = _smooth_v(fam, c, p1, p2, x + hs)
            t = th + hs * A21 * k1
            a2 = 2.0 * (k * (x + C2 * hs) + t)
            k2 = v2 * half * (cos(a2) - 1.0)
            t = th + hs * (A31 * k1 + A32 * k2)
            a3 = 2.0 * (k * (x + C3 * hs) + t)
            k3 = v3 * half * (cos(a3) - 1.0)
            t = th + hs * (A41 * k1 + A42 * k2 + A43 * k3)
            a4 = 2.0 * (k * (x + C4 * hs) + t)
            k4 = v4 * half * (cos(a4) - 1.0)
            t = th + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)
            a5 = 2.0 * (k * (x + C5 * hs) + t)
            k5 = v5 * half * (cos(a5) - 1.0)
            t = th + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)
            a6 = 2.0 * (k * (x + hs) + t)
            k6 = v6 * half * (cos(a6) - 1.0)
            thn = th + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            a7 = 2.0 * (k * (x + hs) + thn)
            k7 = v6 * half * (cos(a7) - 1.0)
            lerr = fabs(hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7))
            errn = lerr / (atol + rtol * max(fabs(th), fabs(thn)))
            if errn <= 1.0:
                if want_amp:
                    r3 = v3 * half * sin(a3)
                    r4 = v4 * half * sin(a4)
                    r5 = v5 * half * sin(a5)
                    r6 = v6 * half * sin(a6)
                    rho += hs * (B1 * r1 + B3 * r3 + B4 * r4 + B5 * r5 + B6 * r6)
                    r1 = v6 * half * sin(a7)
                th = thn
                err_sum += lerr
                nsteps += 1
                k1 = k7
                x = b if last else x + hs
                fac = 5.0 if errn == 0.0 else min(5.0, max(0.2, 0.9 * errn ** -0.2))
                if not last or hs * fac > h:
                    h = hs * fac
            else:
                h = hs * max(0.2, 0.9 * errn ** -0.2)
        if seg_theta is not None:
            seg_theta[s] = th
    return 0, th, rho, err_sum, nsteps, 0.0


def integrate_segments(k, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2, rtol, atol, hmax, want_amp):
    seg_theta = np.zeros(len(seg_a), dtype=np.float64)
    status, th, rho, err, nsteps, xfail = _integrate(
        k, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2, rtol, atol, hmax, want_amp, seg_theta
    )
    return status, th, rho, err, nsteps, xfail, seg_theta


def integrate_batch(ks, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2, rtol, atol, hmax_factor):
    n = len(ks)
    status = np.zeros(n, dtype=np.int32)
    theta = np.zeros(n)
    err = np.zeros(n)
    nsteps = np.zeros(n, dtype=np.int64)
    xfail = np.zeros(n)
    for i, k in enumerate(ks):
        k = float(k)
        st, th, _, er, ns, xf = _integrate(
            k, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2, rtol, atol, hmax_factor / k, False, None
        )
        status[i], theta[i], err[i], nsteps[i], xfail[i] = st, th, er, ns, xf
    return status, theta, err, nsteps, xfail


def _sturm_counts(diag, off2, sigmas):
    """Vectorized over shifts: counts of eigenvalues below each sigma."""
    sigmas = np.asarray(sigmas, dtype=np.float64)
    q = diag[0] - sigmas
    count = (q < 0.0).astype(np.int64)
    # a pivot near 1e-300 sends the next one to -inf; that still counts
    # correctly and the pivot after it is d - sigma, as in the C loop
    with np.errstate(over="ignore", divide="ignore"):
        for d in diag[1:]:
            q = np.where(q == 0.0, 1e-300, q)
            q = d - sigmas - off2 / q
            count += q < 0.0
    return count


def sturm_count(diag, off2, sigma):
    return int(_sturm_counts(np.asarray(diag, dtype=np.float64), off2, [sigma])[0])


def eigs_by_index(diag, off2, i_lo, i_hi, lo, hi, tol):
    diag = np.asarray(diag, dtype=np.float64)
    idx = np.arange(i_lo, i_hi)
    a = np.full(idx.shape, float(lo))
    b = np.full(idx.shape, float(hi))
    active = np.ones(idx.shape, dtype=bool)
    while True:
        active &= (b - a) > tol * np.maximum(1.0, np.abs(a) + np.abs(b))
        mid = 0.5 * (a + b)
        active &= (mid > a) & (mid < b)
        if not active.any():
            break
        sel = np.flatnonzero(active)
        above = _sturm_counts(diag, off2, mid[sel]) > idx[sel]
        b[sel[above]] = mid[sel[above]]
        a[sel[~above]] = mid[sel[~above]]
    return 0.5 * (a + b)
