"""Explicit convex decompositions of P-representable Gaussians into products
of coherent states, obtained by quadrature of the Gaussian P-function."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import gammaln

from .covariance import (
    EPS_BND,
    EPS_P,
    I4,
    E,
    GaussianParams,
    build_restricted_v,
    hermitian_eigvalsh,
    p_matrix,
)
from .errors import DomainError, InvalidArgumentError, NotPRepresentableError
from .fock import FockDensityOp, _as_cutoff

# x = (Re a, Im a, Re b, Im b)  ->  v = (a, a*, b, b*)
_T = np.kron(np.eye(2), np.array([[1, 1j], [1, -1j]]))
_T_INV = np.linalg.inv(_T)
_CHUNK = 2048


@dataclass(frozen=True)
class WernerComponent:
    weight: float
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class DecompositionReport:
    components: list
    trace_distance: float
    nodes_per_axis: int
    p_eigenvalues: tuple
    cutoff: int


def _shifted_eigenvalues(params: GaussianParams) -> np.ndarray:
    v = build_restricted_v(params)
    return hermitian_eigvalsh(v.entries - 0.5 * I4)


def _require_p_representable(params: GaussianParams):
    lo = float(_shifted_eigenvalues(params)[0])
    if lo < -EPS_BND:
        raise NotPRepresentableError(
            f"n={params.n:g}, |m|={params.m_abs:g} violates n >= |m|: the state is not "
            "P-representable, hence entangled (or not a state at all)",
            inequality="n >= |m|",
        )
    return lo


def p_function_value(params: GaussianParams, alpha: complex, beta: complex) -> float:
    """Gaussian P-function ``sqrt(det P)/pi^2 exp(-v^+ P v / 2)``.

    Requires strict P-representability ``n > |m| + eps``; on the boundary
    the P-function contains a delta factor and has no pointwise value.
    """
    _require_p_representable(params)
    try:
        P = p_matrix(build_restricted_v(params))
    except NotPRepresentableError as exc:
        raise NotPRepresentableError(
            f"n={params.n:g}, |m|={params.m_abs:g} is on (or within {EPS_P:g} of) the "
            "boundary n = |m| where the P-function is a delta function",
            inequality="n > |m|",
        ) from exc
    v = np.array([alpha, np.conj(alpha), beta, np.conj(beta)])
    quad = float(np.real(np.conj(v) @ P.entries @ v))
    det = float(np.prod(P.eigenvalues()))
    return math.sqrt(det) / math.pi**2 * math.exp(-0.5 * quad)


def p_covariance(params: GaussianParams) -> np.ndarray:
    """Real 4x4 covariance of the P-function in ``(Re a, Im a, Re b, Im b)``.

    Equal to ``T^-1 E (V - I/2) E T^-+``; finite (possibly singular) even on
    the delta-function boundary, where the P-function has no density.
    """
    v = build_restricted_v(params)
    cov = _T_INV @ E @ (v.entries - 0.5 * I4) @ E @ _T_INV.conj().T
    if np.max(np.abs(cov.imag)) > 1e-12:
        raise AssertionError("P covariance is not real")
    cov = cov.real
    return 0.5 * (cov + cov.T)


def decompose(params: GaussianParams, nodes_per_axis: int) -> list[WernerComponent]:
    """Product-coherent-state decomposition of a P-representable Gaussian.

    Every coherent projector carries a factor ``exp(-|a|^2 - |b|^2)`` times a
    polynomial in the amplitudes, so the P-function is first multiplied by
    that factor: the tilted Gaussian keeps the principal axes of the
    P-function, with variances ``s/(1+2s)``.  A Gauss-Hermite rule with
    ``nodes_per_axis`` nodes per axis then integrates the polynomial part,
    and each node weight is multiplied back by ``exp(|a|^2 + |b|^2)``.

    Axes whose variance vanishes exactly (the delta-function directions at
    ``n = |m|``) carry a single node at the origin; nearly vanishing ones are
    rejected.  Weights are positive and renormalised to sum to 1.
    """
    if isinstance(nodes_per_axis, bool) or int(nodes_per_axis) != nodes_per_axis or nodes_per_axis < 3:
        raise InvalidArgumentError(f"nodes_per_axis must be an integer >= 3, got {nodes_per_axis!r}")
    nodes_per_axis = int(nodes_per_axis)
    _require_p_representable(params)

    var, axes = np.linalg.eigh(p_covariance(params))
    degenerate = var <= EPS_BND
    near = (~degenerate) & (var <= EPS_P)
    if np.any(near):
        raise DomainError(
            f"P-function axis variance {float(var[near].min()):.3e} is within {EPS_P:g} of zero; "
            "too close to n = |m| for a quadrature, use the exact delta-function case n = |m|",
            inequality="n - |m| > 1e-6 or n = |m|",
        )
    var = np.where(degenerate, 0.0, var)
    tilted = var / (1.0 + 2.0 * var)

    z, w = hermegauss(nodes_per_axis)
    w = w / math.sqrt(2 * math.pi)
    grids_z = [np.zeros(1) if deg else z for deg in degenerate]
    grids_w = [np.ones(1) if deg else w for deg in degenerate]
    zz = np.stack([g.ravel() for g in np.meshgrid(*grids_z, indexing="ij")], axis=1)
    ww = np.prod(np.stack([g.ravel() for g in np.meshgrid(*grids_w, indexing="ij")], axis=1), axis=1)
    x = (zz * np.sqrt(tilted)) @ axes.T
    # integral of the P-function against exp(-|x|^2)
    mass = float(np.prod(1.0 / np.sqrt(1.0 + 2.0 * var)))
    ww = mass * ww * np.exp(np.sum(x * x, axis=1))
    ww = ww / ww.sum()
    alpha = x[:, 0] + 1j * x[:, 1]
    beta = x[:, 2] + 1j * x[:, 3]
    return [WernerComponent(float(p), complex(a), complex(b)) for p, a, b in zip(ww, alpha, beta)]


def coherent_vector(alpha: complex, N: int) -> np.ndarray:
    """Truncated ``<j|alpha> = exp(-|alpha|^2/2) alpha^j / sqrt(j!)``."""
    return coherent_vectors(np.array([alpha]), N)[:, 0]


def coherent_vectors(alphas: np.ndarray, N: int) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=complex)
    j = np.arange(N)[:, None]
    mag = np.abs(alphas)
    safe = np.log(np.where(mag > 0, mag, 1.0))
    logmag = np.where(mag[None, :] > 0, j * safe[None, :], np.where(j == 0, 0.0, -np.inf))
    logmag = logmag - 0.5 * gammaln(j + 1.0)
    phase = np.exp(1j * j * np.angle(alphas)[None, :])
    return np.exp(logmag - 0.5 * np.abs(alphas)[None, :] ** 2) * phase


def reconstruct_fock(components, cutoff) -> FockDensityOp:
    """``sum_k w_k |alpha_k><alpha_k| (x) |beta_k><beta_k|`` on the truncated space."""
    cutoff = _as_cutoff(cutoff)
    N = cutoff.per_mode
    weights = np.array([c.weight for c in components], dtype=float)
    alphas = np.array([c.alpha for c in components], dtype=complex)
    betas = np.array([c.beta for c in components], dtype=complex)
    if weights.size == 0:
        raise InvalidArgumentError("no components")
    if np.any(weights <= 0):
        raise InvalidArgumentError("component weights must be positive")
    total = np.zeros((N * N, N * N), dtype=complex)
    for start in range(0, weights.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        ca = coherent_vectors(alphas[sl], N)
        cb = coherent_vectors(betas[sl], N)
        # column i is |alpha_i> (x) |beta_i>
        prod = (ca[:, None, :] * cb[None, :, :]).reshape(N * N, -1)
        total += (prod * weights[sl]) @ prod.conj().T
    total = 0.5 * (total + total.conj().T)
    return FockDensityOp(total, cutoff, 1.0 - float(np.trace(total).real))


def trace_distance(rho1: FockDensityOp, rho2: FockDensityOp) -> float:
    """Half the trace norm of ``rho1 - rho2``."""
    if rho1.cutoff != rho2.cutoff:
        raise InvalidArgumentError(
            f"cutoff mismatch: {rho1.cutoff.per_mode} vs {rho2.cutoff.per_mode}"
        )
    diff = rho1.matrix - rho2.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def decomposition_report(params: GaussianParams, nodes_per_axis: int, cutoff=35) -> DecompositionReport:
    """Decompose, reconstruct on ``cutoff`` and measure the trace distance to
    the direct Fock construction."""
    from .fock import build_gaussian_fock

    cutoff = _as_cutoff(cutoff)
    comps = decompose(params, nodes_per_axis)
    rec = reconstruct_fock(comps, cutoff)
    ref = build_gaussian_fock(params, cutoff, strict=False)
    try:
        p_eigs = tuple(float(x) for x in p_matrix(build_restricted_v(params)).eigenvalues())
    except NotPRepresentableError:
        p_eigs = (math.inf,) * 4
    return DecompositionReport(comps, trace_distance(rec, ref), nodes_per_axis, p_eigs, cutoff.per_mode)


def components_to_json(components) -> str:
    rows = [
        {
            "weight": c.weight,
            "alpha_re": c.alpha.real,
            "alpha_im": c.alpha.imag,
            "beta_re": c.beta.real,
            "beta_im": c.beta.imag,
        }
        for c in components
    ]
    return json.dumps(rows)


def components_from_json(text: str) -> list[WernerComponent]:
    return [
        WernerComponent(
            float(r["weight"]),
            complex(r["alpha_re"], r["alpha_im"]),
            complex(r["beta_re"], r["beta_im"]),
        )
        for r in json.loads(text)
    ]
