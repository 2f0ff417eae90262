# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the Prufer phase integrator and tridiagonal Sturm counts.

Both functions mirror ``_fallback`` exactly (same step controller, same
bisection schedule) so results agree to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, pow, fabs, fmax, fmin, sqrt

cnp.import_array()

# segment kinds
DEF SEG_ZERO = 0
DEF SEG_CONST = 1
DEF SEG_SMOOTH = 2

# smooth family codes
DEF FAM_EXP = 1
DEF FAM_POWER = 2
DEF FAM_WVN = 3

# Dormand-Prince 5(4)
DEF C2 = 0.2
DEF C3 = 0.3
DEF C4 = 0.8
DEF C5 = 0.8888888888888888
DEF A21 = 0.2
DEF A31 = 0.075
DEF A32 = 0.225
DEF A41 = 0.9777777777777777
DEF A42 = -3.7333333333333334
DEF A43 = 3.5555555555555554
DEF A51 = 2.9525986892242035
DEF A52 = -11.595793324188385
DEF A53 = 9.822892851699436
DEF A54 = -0.2908093278463649
DEF A61 = 2.8462752525252526
DEF A62 = -10.757575757575758
DEF A63 = 8.906422717743473
DEF A64 = 0.2784090909090909
DEF A65 = -0.2735313036020583
DEF B1 = 0.09114583333333333
DEF B3 = 0.44923629829290207
DEF B4 = 0.6510416666666666
DEF B5 = -0.322376179245283
DEF B6 = 0.13095238095238096
DEF E1 = 0.0012326388888888888
DEF E3 = -0.0042527702905061394
DEF E4 = 0.03697916666666667
DEF E5 = -0.05086379716981132
DEF E6 = 0.0419047619047619
DEF E7 = -0.025


cdef inline double smooth_v(int fam, double c, double p1, double p2, double x) noexcept nogil:
    if fam == FAM_EXP:
        return c * exp(-p1 * x)
    elif fam == FAM_POWER:
        return c * pow(1.0 + x, -p1)
    elif fam == FAM_WVN:
        return c * sin(p2 * x) * pow(1.0 + x, -p1)
    return 0.0


cdef inline void rhs(double k, double x, double th, double v, double* dth, double* drho) noexcept nogil:
    cdef double arg = 2.0 * (k * x + th)
    cdef double s = v * (1.0 / (2.0 * k))
    dth[0] = s * (cos(arg) - 1.0)
    drho[0] = s * sin(arg)


cdef int integrate_core(
    double k,
    const double[:] seg_a, const double[:] seg_b, const int[:] seg_kind, const double[:] seg_val,
    int fam, double c, double p1, double p2,
    double rtol, double atol, double hmax, bint want_amp,
    double* theta_out, double* rho_out, double* err_out, long* nsteps_out, double* xfail_out,
    double* seg_theta,
) noexcept nogil:
    cdef Py_ssize_t nseg = seg_a.shape[0]
    cdef Py_ssize_t s
    cdef double th = 0.0, rho = 0.0, err_sum = 0.0
    cdef double h = fmin(0.1, 0.1 / k)
    cdef double x, b, hs, v1, v2, v3, v4, v5, v6, v7, tol, errn, fac, thn, rhon
    cdef double k1, k2, k3, k4, k5, k6, k7
    cdef double r1, r2, r3, r4, r5, r6, r7
    cdef double lerr, hmin
    cdef long nsteps = 0
    cdef int kind
    cdef bint last
    for s in range(nseg):
        x = seg_a[s]
        b = seg_b[s]
        kind = seg_kind[s]
        if kind == SEG_ZERO or b <= x:
            if seg_theta != NULL:
                seg_theta[s] = th
            continue
        v1 = seg_val[s]
        v2 = v1; v3 = v1; v4 = v1; v5 = v1; v6 = v1; v7 = v1
        if kind == SEG_SMOOTH:
            v1 = smooth_v(fam, c, p1, p2, x)
        rhs(k, x, th, v1, &k1, &r1)
        while x < b:
            last = False
            hs = fmin(h, hmax)
            if x + hs >= b or (b - x - hs) < 1e-12 * hs:
                hs = b - x
                last = True
            hmin = 2.220446049250313e-15 * fmax(1.0, fabs(x))
            if hs < hmin and not last:
                xfail_out[0] = x
                theta_out[0] = th
                rho_out[0] = rho
                err_out[0] = err_sum
                nsteps_out[0] = nsteps
                return 1
            if kind == SEG_SMOOTH:
                v2 = smooth_v(fam, c, p1, p2, x + C2 * hs)
                v3 = smooth_v(fam, c, p1, p2, x + C3 * hs)
                v4 = smooth_v(fam, c, p1, p2, x + C4 * hs)
                v5 = smooth_v(fam, c, p1, p2, x + C5 * hs)
                v6 = smooth_v(fam, c, p1, p2, x + hs)
                v7 = v6
            rhs(k, x + C2 * hs, th + hs * A21 * k1, v2, &k2, &r2)
            rhs(k, x + C3 * hs, th + hs * (A31 * k1 + A32 * k2), v3, &k3, &r3)
            rhs(k, x + C4 * hs, th + hs * (A41 * k1 + A42 * k2 + A43 * k3), v4, &k4, &r4)
            rhs(k, x + C5 * hs, th + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), v5, &k5, &r5)
            rhs(k, x + hs, th + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5), v6, &k6, &r6)
            thn = th + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            rhs(k, x + hs, thn, v7, &k7, &r7)
            lerr = fabs(hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7))
            tol = atol + rtol * fmax(fabs(th), fabs(thn))
            errn = lerr / tol
            if errn <= 1.0:
                if want_amp:
                    rho = rho + hs * (B1 * r1 + B3 * r3 + B4 * r4 + B5 * r5 + B6 * r6)
                th = thn
                err_sum += lerr
                nsteps += 1
                k1 = k7
                r1 = r7
                if last:
                    x = b
                else:
                    x = x + hs
                if errn == 0.0:
                    fac = 5.0
                else:
                    fac = fmin(5.0, fmax(0.2, 0.9 * pow(errn, -0.2)))
                if not last or hs * fac > h:
                    h = hs * fac
            else:
                h = hs * fmax(0.2, 0.9 * pow(errn, -0.2))
        if seg_theta != NULL:
            seg_theta[s] = th
    theta_out[0] = th
    rho_out[0] = rho
    err_out[0] = err_sum
    nsteps_out[0] = nsteps
    return 0


def integrate_segments(
    double k,
    double[:] seg_a, double[:] seg_b, int[:] seg_kind, double[:] seg_val,
    int fam, double c, double p1, double p2,
    double rtol, double atol, double hmax, bint want_amp,
):
    """Integrate theta (and log R - log R(0)) across the segments for one k.

    Returns ``(status, theta, rho, err, nsteps, x_fail, seg_theta)``.
    """
    cdef double theta = 0.0, rho = 0.0, err = 0.0, xfail = 0.0
    cdef long nsteps = 0
    cdef int status
    seg_theta = np.zeros(seg_a.shape[0], dtype=np.float64)
    cdef double[:] st = seg_theta
    cdef double* stp = NULL
    if seg_a.shape[0] > 0:
        stp = &st[0]
    with nogil:
        status = integrate_core(k, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2,
                                rtol, atol, hmax, want_amp,
                                &theta, &rho, &err, &nsteps, &xfail, stp)
    return status, theta, rho, err, nsteps, xfail, seg_theta


def integrate_batch(
    double[:] ks,
    double[:] seg_a, double[:] seg_b, int[:] seg_kind, double[:] seg_val,
    int fam, double c, double p1, double p2,
    double rtol, double atol, double hmax_factor,
):
    """Phase at the right end for many momenta. ``hmax = hmax_factor / k``.

    Returns ``(status, theta, err, nsteps, x_fail)`` arrays.
    """
    cdef Py_ssize_t n = ks.shape[0], i
    theta = np.zeros(n, dtype=np.float64)
    err = np.zeros(n, dtype=np.float64)
    xfail = np.zeros(n, dtype=np.float64)
    nsteps = np.zeros(n, dtype=np.int64)
    status = np.zeros(n, dtype=np.int32)
    cdef double[:] th_v = theta, er_v = err, xf_v = xfail
    cdef long[:] ns_v = nsteps
    cdef int[:] st_v = status
    cdef double rho, kk
    cdef long ns
    with nogil:
        for i in range(n):
            kk = ks[i]
            st_v[i] = integrate_core(kk, seg_a, seg_b, seg_kind, seg_val, fam, c, p1, p2,
                                     rtol, atol, hmax_factor / kk, False,
                                     &th_v[i], &rho, &er_v[i], &ns, &xf_v[i], NULL)
            ns_v[i] = ns
    return status, theta, err, nsteps, xfail


cdef inline long sturm_count_core(const double[:] diag, double off2, double sigma) noexcept nogil:
    cdef Py_ssize_t n = diag.shape[0], i
    cdef long count = 0
    cdef double q = diag[0] - sigma
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - sigma - off2 / q
        if q < 0.0:
            count += 1
    return count


def sturm_count(double[:] diag, double off2, double sigma):
    """Number of eigenvalues below ``sigma`` of the tridiagonal matrix with
    constant squared off-diagonal ``off2``."""
    cdef long r
    with nogil:
        r = sturm_count_core(diag, off2, sigma)
    return r


def eigs_by_index(double[:] diag, double off2, long i_lo, long i_hi, double lo, double hi, double tol):
    """Eigenvalues with indices ``i_lo <= i < i_hi`` (0-based, ascending) by
    bisection on the Sturm count, each bracketed in ``[lo, hi]``."""
    cdef long m = i_hi - i_lo, j, idx
    out = np.empty(m, dtype=np.float64)
    cdef double[:] ov = out
    cdef double a, b, mid
    with nogil:
        for j in range(m):
            idx = i_lo + j
            a = lo
            b = hi
            while b - a > tol * fmax(1.0, fabs(a) + fabs(b)):
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break
                if sturm_count_core(diag, off2, mid) > idx:
                    b = mid
                else:
                    a = mid
            ov[j] = 0.5 * (a + b)
    return out
