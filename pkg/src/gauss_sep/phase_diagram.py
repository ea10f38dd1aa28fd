"""Region sweeps over the ``(n, |m|)`` plane with optional Fock-oracle checks,
emitted as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .covariance import EPS_BND, GaussianParams, Region
from .errors import InvalidArgumentError, TruncationError
from .fock import FockCutoff, build_gaussian_fock, min_eigenvalue, partial_transpose_fock, suggest_cutoff

log = logging.getLogger(__name__)

MAX_STEPS = 2001
#: eigenvalues above this are read as non-negative by the oracle
ORACLE_EIG_TOL = 1e-7
#: oracle verdicts within this distance of a boundary are not compared
ORACLE_BAND = 1e-3
FORMATS = ("csv", "json")
COLUMNS = ("n", "m_abs", "region", "margin", "oracle_min_eig", "oracle_ppt_min_eig", "agree")


def _r12(x: float) -> float:
    """Round to the 12 significant digits used on output."""
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class SweepSpec:
    n_range: tuple = (0.0, 2.0)
    m_range: tuple = (0.0, 2.0)
    steps_n: int = 21
    steps_m: int = 21
    m_phase: float = 0.0
    oracle_fraction: float = 0.0
    oracle_cutoff: FockCutoff = field(default_factory=lambda: FockCutoff(60))
    eps: float = EPS_BND

    def __post_init__(self):
        for name in ("n_range", "m_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise InvalidArgumentError(f"{name} must be an ordered finite pair, got {(lo, hi)}")
        if self.m_range[0] < 0:
            raise InvalidArgumentError("m_range must be non-negative (it spans |m|)")
        for name in ("steps_n", "steps_m"):
            s = getattr(self, name)
            if int(s) != s or not 2 <= s <= MAX_STEPS:
                raise InvalidArgumentError(f"{name} must be an integer in [2, {MAX_STEPS}], got {s!r}")
        if not 0.0 <= self.oracle_fraction <= 1.0:
            raise InvalidArgumentError(f"oracle_fraction must lie in [0, 1], got {self.oracle_fraction!r}")
        if not math.isfinite(self.m_phase):
            raise InvalidArgumentError("m_phase must be finite")

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        n = np.array([_r12(x) for x in np.linspace(*self.n_range, int(self.steps_n))])
        m = np.array([_r12(x) for x in np.linspace(*self.m_range, int(self.steps_m))])
        return n, m


@dataclass(frozen=True)
class SweepRecord:
    n: float
    m_abs: float
    region: Region
    margin: float
    oracle_min_eig: float | None = None
    oracle_ppt_min_eig: float | None = None
    agree: bool | None = None


def boundary_distances(n: float, m_abs: float) -> dict[str, float]:
    """Euclidean distances in the ``(n, |m|)`` plane to the three boundaries.

    ``p``: ``|m| = n``; ``trace``: ``|m| = n + 1/2``; ``pure``: the
    hyperbola branch ``|m| = sqrt(n(n+1))``, ``n >= 0``.
    """
    d_p = abs(m_abs - n) / math.sqrt(2.0)
    d_tr = abs(m_abs - n - 0.5) / math.sqrt(2.0)
    return {"p": d_p, "trace": d_tr, "pure": _distance_to_pure_curve(n, m_abs)}


def _distance_to_pure_curve(n: float, m_abs: float) -> float:
    # parametrise the branch by t = n' >= 0; dense scan, then golden-section refine
    def sq(t):
        return (t - n) ** 2 + (math.sqrt(t * (t + 1.0)) - m_abs) ** 2

    scale = max(1.0, abs(n), m_abs)
    ts = np.concatenate([np.linspace(0.0, 1e-2, 200), np.linspace(0.0, 4.0 * scale + 2.0, 4001)])
    vals = (ts - n) ** 2 + (np.sqrt(ts * (ts + 1.0)) - m_abs) ** 2
    i = int(np.argmin(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, ts.size - 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    for _ in range(80):
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        if sq(c) < sq(d):
            b = d
        else:
            a = c
    return math.sqrt(min(sq(0.5 * (a + b)), float(vals[i])))


def _oracle_eligible_indices(regions: np.ndarray, fraction: float) -> list[int]:
    if fraction <= 0.0:
        return []
    stride = math.ceil(1.0 / fraction)
    chosen = []
    for code in range(1, 4):  # every region except InvalidTraceClass
        idx = np.flatnonzero(regions == code)
        chosen.extend(int(i) for i in idx[::stride])
    return sorted(chosen)


def oracle_check(n: float, m: complex, region: Region, cutoff: FockCutoff) -> tuple[float, float, bool]:
    """Fock min eigenvalue, partial-transpose min eigenvalue and agreement flag.

    Agreement compares the sign of each eigenvalue (tolerance
    :data:`ORACLE_EIG_TOL`) with the analytic verdict; a comparison within
    :data:`ORACLE_BAND` of its boundary is not counted.
    """
    params = GaussianParams(n, m)
    G = build_gaussian_fock(params, cutoff=None if cutoff is None else _auto_within(params, cutoff))
    ev = min_eigenvalue(G)
    ppt = min_eigenvalue(partial_transpose_fock(G))
    dist = boundary_distances(n, abs(m))
    agree = True
    if dist["pure"] > ORACLE_BAND:
        agree &= (ev >= -ORACLE_EIG_TOL) == (region in (Region.Entangled, Region.Separable))
    if dist["p"] > ORACLE_BAND:
        agree &= (ppt >= -ORACLE_EIG_TOL) == (region is Region.Separable)
    return ev, ppt, bool(agree)


def _auto_within(params: GaussianParams, cap: FockCutoff) -> FockCutoff:
    N = suggest_cutoff(params)
    if N > cap.per_mode:
        raise TruncationError(
            f"point needs cutoff {N} > oracle cutoff {cap.per_mode}", suggested_cutoff=N
        )
    return FockCutoff(N)


def sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Classify every grid point (row-major, ``n`` outer) and oracle-check a
    deterministic stratified subsample."""
    n_vals, m_vals = spec.grid()
    nn, mm = np.meshgrid(n_vals, m_vals, indexing="ij")
    nn, mm = nn.ravel(), mm.ravel()
    regions, margins, _, _ = kernels.classify_grid(nn, mm, spec.eps)

    oracle = {}
    phase = np.exp(1j * spec.m_phase)
    for i in _oracle_eligible_indices(regions, spec.oracle_fraction):
        region = Region.from_code(regions[i])
        try:
            oracle[i] = oracle_check(float(nn[i]), complex(mm[i] * phase), region, spec.oracle_cutoff)
        except TruncationError as exc:
            log.warning("oracle skipped at n=%g |m|=%g: %s", nn[i], mm[i], exc)

    records = []
    for i in range(nn.size):
        ev, ppt, agree = oracle.get(i, (None, None, None))
        records.append(
            SweepRecord(
                float(nn[i]),
                float(mm[i]),
                Region.from_code(regions[i]),
                _r12(float(margins[i])),
                None if ev is None else _r12(ev),
                None if ppt is None else _r12(ppt),
                agree,
            )
        )
    return records


# -- emission -----------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Region):
        return x.value
    return f"{x:.12g}"


def emit(records, fmt: str = "csv") -> bytes:
    """Serialise records as UTF-8 CSV or JSON with LF line endings."""
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    records = list(records)
    if not records:
        raise InvalidArgumentError("no records to emit")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue().encode("utf-8")
    body = ",\n".join(
        "  {" + ", ".join(f'"{c}": {_json_value(getattr(r, c))}' for c in COLUMNS) + "}" for r in records
    )
    return ("[\n" + body + "\n]\n").encode("utf-8")


def _json_value(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Region):
        return json.dumps(x.value)
    return _fmt(x) if math.isfinite(x) else json.dumps(str(x))


def parse(data: bytes | str, fmt: str = "csv") -> list[SweepRecord]:
    """Inverse of :func:`emit`."""
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "json":
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append(
            SweepRecord(
                float(row["n"]),
                float(row["m_abs"]),
                Region(row["region"]),
                float(row["margin"]),
                _opt_float(row["oracle_min_eig"]),
                _opt_float(row["oracle_ppt_min_eig"]),
                _opt_bool(row["agree"]),
            )
        )
    return out


def _opt_float(x):
    if x is None or x == "":
        return None
    return float(x)


def _opt_bool(x):
    if x is None or x == "":
        return None
    if isinstance(x, bool):
        return x
    return {"true": True, "false": False}[x]

