r"""Covariance-type 4x4 matrices of two-mode Gaussian operators and the
analytic validity / positivity / separability criteria built on them.

All matrices use the basis order :math:`(\alpha^*, \alpha, \beta^*, \beta)`,
so that the characteristic function reads
:math:`C(\alpha, \beta) = \exp(-\tfrac12 v^\dagger V v)` with
:math:`v^\dagger = [\alpha^*, \alpha, \beta^*, \beta]`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError, NotPRepresentableError, SingularMatrixError

#: absolute tolerance on eigenvalues and inequality slacks at region boundaries
EPS_BND = 1e-9
#: strictness margin below which V - I/2 is treated as singular
EPS_P = 1e-6
#: largest tolerated asymmetry before a matrix is rejected as non-Hermitian
HERMITIAN_ATOL = 1e-12

E = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)
T_A = np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
)
I4 = np.eye(4, dtype=complex)
# V -> (E T_a E) V (E T_a E) realises the partial transpose on mode a
_PT_V = E @ T_A @ E


def _finite(*values) -> bool:
    return all(math.isfinite(v.real) and math.isfinite(v.imag) for v in map(complex, values))


@dataclass(frozen=True)
class GaussianParams:
    """Parameters ``(n, m)`` of the restricted covariance form.

    ``n`` is the mean photon number per mode and ``m`` the pair-correlation
    amplitude ``-<ab>``.  Negative ``n`` is accepted; whether the parameters
    describe a state is decided by :func:`classify`.
    """

    n: float
    m: complex = 0j

    def __post_init__(self):
        if not _finite(self.n, self.m) or isinstance(self.n, complex):
            raise InvalidArgumentError(f"non-finite or complex n / m: n={self.n!r}, m={self.m!r}")
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "m", complex(self.m))

    @classmethod
    def from_polar(cls, n: float, m_abs: float, m_phase: float = 0.0) -> "GaussianParams":
        if not _finite(n, m_abs, m_phase):
            raise InvalidArgumentError("non-finite n, |m| or phase")
        return cls(n, cmath.rect(m_abs, m_phase) if m_phase else complex(m_abs))

    @property
    def m_abs(self) -> float:
        return abs(self.m)


@dataclass(frozen=True)
class StandardVParams:
    n1: float = 0.0
    n2: float = 0.0
    m1: complex = 0j
    m2: complex = 0j
    ms: complex = 0j
    mc: complex = 0j

    def __post_init__(self):
        if not _finite(self.n1, self.n2, self.m1, self.m2, self.ms, self.mc):
            raise InvalidArgumentError("non-finite standard-form parameter")


class Kind(str, enum.Enum):
    V = "V"
    W = "W"
    P = "P"


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """A Hermitian 4x4 matrix tagged as characteristic (V), Wigner (W) or P form.

    The entries are symmetrised on construction; inputs whose asymmetry
    exceeds :data:`HERMITIAN_ATOL` (relative to the largest entry) are rejected.
    """

    entries: np.ndarray
    kind: Kind = Kind.V

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.shape != (4, 4):
            raise InvalidArgumentError(f"expected a 4x4 matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(a))))
        asym = float(np.max(np.abs(a - a.conj().T)))
        if asym > HERMITIAN_ATOL * scale:
            raise InvalidArgumentError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        a = 0.5 * (a + a.conj().T)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "kind", Kind(self.kind))

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues in ascending order."""
        return hermitian_eigvalsh(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def allclose(self, other: "CovMatrix", atol: float = 1e-12) -> bool:
        return self.kind == other.kind and np.allclose(self.entries, other.entries, rtol=0, atol=atol)


def hermitian_eigvalsh(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a (nearly) Hermitian matrix after symmetrising."""
    a = np.asarray(a, dtype=complex)
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def _require_kind(mat: CovMatrix, kind: Kind):
    if not isinstance(mat, CovMatrix):
        raise InvalidArgumentError(f"expected CovMatrix, got {type(mat).__name__}")
    if mat.kind != kind:
        raise InvalidArgumentError(f"expected a {kind.value} matrix, got {mat.kind.value}")


def build_restricted_v(params: GaussianParams) -> CovMatrix:
    """Characteristic-function matrix of the restricted (EPR-like) family."""
    d = params.n + 0.5
    m = params.m
    v = np.array(
        [
            [d, 0, 0, m],
            [0, d, m.conjugate(), 0],
            [0, m, d, 0],
            [m.conjugate(), 0, 0, d],
        ],
        dtype=complex,
    )
    return CovMatrix(v, Kind.V)


def build_standard_v(p: StandardVParams) -> CovMatrix:
    c = np.conjugate
    d1, d2 = p.n1 + 0.5, p.n2 + 0.5
    v = np.array(
        [
            [d1, p.m1, p.ms, p.mc],
            [c(p.m1), d1, c(p.mc), c(p.ms)],
            [c(p.ms), p.mc, d2, p.m2],
            [c(p.mc), p.ms, c(p.m2), d2],
        ],
        dtype=complex,
    )
    return CovMatrix(v, Kind.V)


def _dual(mat: CovMatrix, target: Kind) -> CovMatrix:
    lo = float(np.min(np.abs(mat.eigenvalues())))
    if lo <= 1e-12:
        raise SingularMatrixError(f"{mat.kind.value} matrix is singular (min |eigenvalue| {lo:.3e})", lo)
    return CovMatrix(E @ np.linalg.inv(mat.entries) @ E, target)


def v_to_w(v: CovMatrix) -> CovMatrix:
    """Wigner-function matrix ``W = E V^-1 E``."""
    _require_kind(v, Kind.V)
    return _dual(v, Kind.W)


def w_to_v(w: CovMatrix) -> CovMatrix:
    _require_kind(w, Kind.W)
    return _dual(w, Kind.V)


def p_matrix(v: CovMatrix, eps: float = EPS_P) -> CovMatrix:
    """Matrix ``P = E (V - I/2)^-1 E`` of the Gaussian P-function.

    Raises
    ------
    NotPRepresentableError
        If ``V - I/2`` has an eigenvalue at or below ``eps``: either the
        P-function is not a non-negative function (entangled or unphysical
        states) or it degenerates into a delta function.
    """
    _require_kind(v, Kind.V)
    shifted = v.entries - 0.5 * I4
    lo = float(hermitian_eigvalsh(shifted)[0])
    if lo <= eps:
        raise NotPRepresentableError(
            f"V - I/2 has min eigenvalue {lo:.6g} <= {eps:g}; "
            "the P-function is singular or negative (need n > |m| for the restricted form)",
            inequality="V - I/2 > 0 (n > |m|)",
        )
    return CovMatrix(E @ np.linalg.inv(shifted) @ E, Kind.P)


def partial_transpose_v(v: CovMatrix) -> CovMatrix:
    """Characteristic-function matrix of the state transposed on mode a."""
    _require_kind(v, Kind.V)
    return CovMatrix(_PT_V @ v.entries @ _PT_V, Kind.V)


def min_eig_v(v: CovMatrix) -> float:
    _require_kind(v, Kind.V)
    return float(v.eigenvalues()[0])


def min_eig_positive(v: CovMatrix) -> float:
    """Smallest eigenvalue of ``V + E/2``; non-negative iff the operator is positive."""
    _require_kind(v, Kind.V)
    return float(hermitian_eigvalsh(v.entries + 0.5 * E)[0])


def min_eig_p(v: CovMatrix) -> float:
    """Smallest eigenvalue of ``V - I/2``; non-negative iff P-representable."""
    _require_kind(v, Kind.V)
    return float(hermitian_eigvalsh(v.entries - 0.5 * I4)[0])


def check_trace_class(v: CovMatrix, eps: float = EPS_BND) -> bool:
    return min_eig_v(v) > eps


def check_positive_operator(v: CovMatrix, eps: float = EPS_BND) -> bool:
    return min_eig_positive(v) >= -eps


def check_p_representable(v: CovMatrix, eps: float = EPS_BND) -> bool:
    return min_eig_p(v) >= -eps


def restricted_inequalities(params: GaussianParams) -> tuple[bool, bool, bool]:
    """Closed-form versions of the three checks for the restricted family.

    Returns ``(trace_class, positive, p_representable)`` from
    ``n + 1/2 > |m|``, ``n + 1/2 >= sqrt(|m|^2 + 1/4)`` and ``n >= |m|``.
    The square-root form of the positivity condition stays correct for
    negative ``n`` where ``n(n+1) >= |m|^2`` alone does not.
    """
    n, a = params.n, params.m_abs
    return n + 0.5 > a, n + 0.5 >= math.sqrt(a * a + 0.25), n >= a


class Region(str, enum.Enum):
    InvalidTraceClass = "InvalidTraceClass"
    WignerOnly = "WignerOnly"
    Entangled = "Entangled"
    Separable = "Separable"

    @property
    def code(self) -> int:
        return _REGION_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Region":
        return _REGIONS[int(code)]


_REGIONS = (Region.InvalidTraceClass, Region.WignerOnly, Region.Entangled, Region.Separable)
_REGION_CODES = {r: i for i, r in enumerate(_REGIONS)}


@dataclass(frozen=True)
class Classification:
    """Region of the ``(n, |m|)`` plane a parameter pair falls in.

    ``margin`` is the signed slack of the deciding inequality: ``n - |m|``
    for separable and entangled points, ``n(n+1) - |m|^2`` for points with
    only a positive Wigner function, ``n + 1/2 - |m|`` for invalid ones.
    """

    region: Region
    on_pure_boundary: bool
    on_p_boundary: bool
    margin: float

    @property
    def is_state(self) -> bool:
        return self.region in (Region.Entangled, Region.Separable)


def classify(params: GaussianParams, eps: float = EPS_BND) -> Classification:
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps!r}")
    region, margin, pure, pb = kernels.classify_grid(
        np.array([params.n]), np.array([params.m_abs]), eps
    )
    return Classification(Region.from_code(region[0]), bool(pure[0]), bool(pb[0]), float(margin[0]))
