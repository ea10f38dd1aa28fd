# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Fock-space assembly of the restricted Gaussian and
vectorised region classification. Mirrors ``_core_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, sqrt, atan2, cos, sin, lgamma, INFINITY

cnp.import_array()


def gaussian_fock_matrix(double n, double complex m, int N):
    """Matrix elements <j,k|G|j',k'> of the normally ordered restricted Gaussian.

    Index of |j,k> is j*N + k.  Entries outside the j-k = j'-k' sectors are 0.
    """
    cdef double mabs = sqrt(m.real * m.real + m.imag * m.imag)
    cdef double D = (n + 1.0) * (n + 1.0) - mabs * mabs
    cdef double g = (n * (n + 1.0) - mabs * mabs) / D
    cdef double cabs = mabs / D
    cdef double theta = atan2(m.imag, m.real)
    cdef double log_c = log(cabs) if cabs > 0.0 else -INFINITY
    cdef double log_g = log(fabs(g)) if g != 0.0 else -INFINITY
    cdef double sign_g = -1.0 if g < 0.0 else 1.0

    cdef cnp.ndarray[double, ndim=1] lf_arr = np.empty(N + 1)
    cdef double[:] lf = lf_arr
    cdef int i
    for i in range(N + 1):
        lf[i] = lgamma(i + 1.0)

    out_arr = np.zeros((N * N, N * N), dtype=np.complex128)
    cdef double complex[:, :] out = out_arr

    cdef int d, ad, L, a, b, j, k, jp, kp, s, s_lo, s_hi, ec, eg
    cdef double base, acc, lt, sgn
    cdef double complex val
    for d in range(-(N - 1), N):
        ad = d if d >= 0 else -d
        L = N - ad
        for a in range(L):
            if d >= 0:
                j = d + a
                k = a
            else:
                j = a
                k = a - d
            for b in range(a, L):
                if d >= 0:
                    jp = d + b
                    kp = b
                else:
                    jp = b
                    kp = b - d
                base = 0.5 * (lf[j] + lf[k] + lf[jp] + lf[kp])
                s_lo = d if d > 0 else 0
                s_hi = j if j < jp else jp
                acc = 0.0
                for s in range(s_lo, s_hi + 1):
                    ec = j + jp - 2 * s
                    eg = 2 * s - d
                    lt = base - lf[j - s] - lf[jp - s] - lf[s] - lf[s - d]
                    if ec != 0:
                        if cabs == 0.0:
                            continue
                        lt += ec * log_c
                    if eg != 0:
                        if g == 0.0:
                            continue
                        lt += eg * log_g
                    acc += exp(lt)
                if acc == 0.0:
                    continue
                sgn = 1.0 if (j + jp) % 2 == 0 else -1.0
                if ad % 2 == 1:
                    sgn *= sign_g
                acc *= sgn / D
                val = acc * (cos(theta * (j - jp)) + 1j * sin(theta * (j - jp)))
                out[j * N + k, jp * N + kp] = val
                out[jp * N + kp, j * N + k] = val.conjugate()
    return out_arr


def classify_grid(double[:] n, double[:] mabs, double eps):
    """Region codes 0..3 (invalid, wigner-only, entangled, separable), margins
    and boundary flags for each (n, |m|) pair."""
    cdef Py_ssize_t size = n.shape[0], i
    region_arr = np.empty(size, dtype=np.int8)
    margin_arr = np.empty(size, dtype=np.float64)
    pure_arr = np.empty(size, dtype=np.bool_)
    pb_arr = np.empty(size, dtype=np.bool_)
    cdef signed char[:] region = region_arr
    cdef double[:] margin = margin_arr
    cdef cnp.npy_bool[:] pure = pure_arr
    cdef cnp.npy_bool[:] pb = pb_arr
    cdef double x, a, sc, tr_slack, pure_slack, p_slack
    for i in range(size):
        x = n[i]
        a = mabs[i]
        sc = 1.0
        if fabs(x) > sc:
            sc = fabs(x)
        if a > sc:
            sc = a
        tr_slack = x + 0.5 - a
        pure_slack = x * (x + 1.0) - a * a
        p_slack = x - a
        pure[i] = fabs(pure_slack) <= eps * sc * sc
        pb[i] = fabs(p_slack) <= eps * sc
        if tr_slack <= eps * sc:
            region[i] = 0
            margin[i] = tr_slack
        elif pure_slack < -eps * sc * sc:
            region[i] = 1
            margin[i] = pure_slack
        elif p_slack < -eps * sc:
            region[i] = 2
            margin[i] = p_slack
        else:
            region[i] = 3
            margin[i] = p_slack
    return region_arr, margin_arr, pure_arr, pb_arr
