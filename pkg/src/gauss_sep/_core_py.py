"""Pure numpy implementations of the kernels in ``_core.pyx``.

Used when the compiled extension is unavailable or ``GAUSS_SEP_PURE_PYTHON``
is set. Results agree with the compiled versions to rounding.
"""

import numpy as np
from scipy.special import gammaln


def gaussian_fock_matrix(n, m, N):
    m = complex(m)
    mabs = abs(m)
    D = (n + 1.0) ** 2 - mabs**2
    g = (n * (n + 1.0) - mabs**2) / D
    cabs = mabs / D
    theta = np.angle(m)
    lf = gammaln(np.arange(N + 1) + 1.0)
    out = np.zeros((N * N, N * N), dtype=complex)

    # zero bases are masked out below; 0.0 keeps the arithmetic finite
    log_c = np.log(cabs) if cabs > 0 else 0.0
    log_g = np.log(abs(g)) if g != 0 else 0.0
    s = np.arange(N)[None, None, :]
    for d in range(-(N - 1), N):
        idx = np.arange(N - abs(d))
        j = idx + max(d, 0)
        k = j - d
        jj, jp = j[:, None, None], j[None, :, None]
        valid = (s >= max(d, 0)) & (s <= np.minimum(jj, jp))
        ec = jj + jp - 2 * s
        eg = 2 * s - d
        # zero bases only contribute through a zero exponent
        valid &= (ec == 0) | (cabs > 0)
        valid &= (eg == 0) | (g != 0)
        sv = np.where(valid, s, 0)
        lt = (
            0.5 * (lf[jj] + lf[k[:, None, None]] + lf[jp] + lf[k[None, :, None]])
            - lf[np.clip(jj - sv, 0, None)]
            - lf[np.clip(jp - sv, 0, None)]
            - lf[sv]
            - lf[np.clip(sv - d, 0, None)]
            + np.where(ec != 0, ec * log_c, 0.0)
            + np.where(eg != 0, eg * log_g, 0.0)
        )
        acc = np.where(valid, np.exp(np.where(valid, lt, -np.inf)), 0.0).sum(axis=2)
        sgn = np.where((j[:, None] + j[None, :]) % 2 == 0, 1.0, -1.0)
        if abs(d) % 2 == 1 and g < 0:
            sgn = -sgn
        block = acc * sgn / D * np.exp(1j * theta * (j[:, None] - j[None, :]))
        rows = j * N + k
        out[np.ix_(rows, rows)] = block
    return out


def classify_grid(n, mabs, eps):
    n = np.asarray(n, dtype=float)
    a = np.asarray(mabs, dtype=float)
    sc = np.maximum(np.maximum(1.0, np.abs(n)), a)
    tr_slack = n + 0.5 - a
    pure_slack = n * (n + 1.0) - a * a
    p_slack = n - a
    region = np.full(n.shape, 3, dtype=np.int8)
    margin = p_slack.copy()
    entangled = p_slack < -eps * sc
    wigner = pure_slack < -eps * sc * sc
    invalid = tr_slack <= eps * sc
    region[entangled] = 2
    region[wigner] = 1
    margin[wigner] = pure_slack[wigner]
    region[invalid] = 0
    margin[invalid] = tr_slack[invalid]
    pure = np.abs(pure_slack) <= eps * sc * sc
    pb = np.abs(p_slack) <= eps * sc
    return region, margin, pure, pb
