"""Independent reference constructions shared by the tests."""

import math

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln


def ladder_ops(N):
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
    eye = np.eye(N)
    return np.kron(a, eye), np.kron(eye, a)


def brute_force_gaussian(n, m, N):
    """``D^-1 exp(-c a+b+) g^(Na+Nb) exp(-c* ab)`` from dense matrix exponentials.

    Each factor only moves quanta in pairs, and the outer ones only raise or
    only lower, so no padding is needed for exact retained entries.
    """
    D = (n + 1.0) ** 2 - abs(m) ** 2
    c = m / D
    g = (n * (n + 1.0) - abs(m) ** 2) / D
    A, B = ladder_ops(N)
    j = np.arange(N)
    tot = (j[:, None] + j[None, :]).ravel().astype(float)
    left = expm(-c * (A.T @ B.T))
    right = expm(-np.conj(c) * (A @ B))
    return left @ np.diag(np.power(complex(g), tot)) @ right / D


def gaussian_char_fn(n, m, alpha, beta):
    V = np.array(
        [
            [n + 0.5, 0, 0, m],
            [0, n + 0.5, np.conj(m), 0],
            [0, m, n + 0.5, 0],
            [np.conj(m), 0, 0, n + 0.5],
        ],
        dtype=complex,
    )
    v = np.array([alpha, np.conj(alpha), beta, np.conj(beta)])
    return np.exp(-0.5 * (v.conj() @ V @ v))


def displacement_element(gamma, p, j):
    """``<p|D(gamma)|j>`` from the associated-Laguerre closed form."""
    lo, hi = min(p, j), max(p, j)
    if hi == p:
        z = gamma
    else:
        z = -np.conj(gamma)
    r2 = abs(gamma) ** 2
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * r2
    return math.exp(log_mag) * z ** (hi - lo) * eval_genlaguerre(lo, hi - lo, r2)


def pure_ppt_spectrum(lam, N):
    """Eigenvalues of the partial transpose of a truncated Schmidt state:
    ``c_j^2`` and ``+-|c_j c_k|`` for ``j < k``."""
    c = math.sqrt(1 - abs(lam) ** 2) * np.abs(lam) ** np.arange(N)
    ev = list(c**2)
    for j in range(N):
        for k in range(j + 1, N):
            ev += [c[j] * c[k], -c[j] * c[k]]
    return np.sort(ev)
