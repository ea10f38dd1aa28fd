"""Command-line interface: ``gauss-sep <command> ...``.

Exit codes: 0 success, 2 usage error, 3 domain error (for example
decomposing an entangled state), 4 other numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import covariance as cov
from . import fock, phase_diagram, werner
from .errors import DomainError, GaussSepError, InvalidArgumentError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _g(x) -> str:
    return f"{x:.12g}"


def _add_state_args(p):
    p.add_argument("--n", type=_finite_float, required=True, help="mean photon number per mode")
    p.add_argument("--m-abs", type=_finite_float, help="|m|, pair-correlation magnitude")
    p.add_argument("--m-phase", type=_finite_float, default=None, help="phase of m in radians (default 0)")
    p.add_argument("--m-re", type=_finite_float, help="Re m (alternative to --m-abs)")
    p.add_argument("--m-im", type=_finite_float, help="Im m (alternative to --m-abs)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gauss-sep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify (n, m) in the phase diagram")
    _add_state_args(p)
    p.add_argument("--eps", type=_finite_float, default=cov.EPS_BND)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("oracle", help="compare analytic verdicts with the Fock-space oracle")
    _add_state_args(p)
    p.add_argument("--cutoff", type=_positive_int, help="Fock cutoff per mode (default: automatic)")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("decompose", help="Werner decomposition of a separable state")
    _add_state_args(p)
    p.add_argument("--nodes", type=_positive_int, required=True, help="quadrature nodes per axis")
    p.add_argument("--cutoff", type=_positive_int, default=35, help="Fock cutoff for the trace distance")
    p.add_argument("--out", help="write the component list (JSON) here instead of stdout")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("sweep", help="phase-diagram data over (n, |m|)")
    p.add_argument("--n-min", type=_finite_float, default=0.0)
    p.add_argument("--n-max", type=_finite_float, required=True)
    p.add_argument("--m-min", type=_finite_float, default=0.0)
    p.add_argument("--m-max", type=_finite_float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True, help="grid points per axis")
    p.add_argument("--m-phase", type=_finite_float, default=0.0)
    p.add_argument("--oracle-fraction", type=_finite_float, default=0.0)
    p.add_argument("--oracle-cutoff", type=_positive_int, default=60)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=phase_diagram.FORMATS, default="csv")

    p = sub.add_parser("wavefunction", help="position wave function of the two-mode squeezed state")
    p.add_argument("--lambda", dest="lam", type=_finite_float, required=True)
    p.add_argument("--x1", type=_finite_float, required=True)
    p.add_argument("--x2", type=_finite_float, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _params(args) -> cov.GaussianParams:
    rect = args.m_re is not None or args.m_im is not None
    if rect and (args.m_abs is not None or args.m_phase is not None):
        raise UsageError("give either --m-abs [--m-phase] or --m-re/--m-im, not both")
    if rect:
        return cov.GaussianParams(args.n, complex(args.m_re or 0.0, args.m_im or 0.0))
    if args.m_abs is None:
        raise UsageError("one of --m-abs or --m-re/--m-im is required")
    if args.m_abs < 0:
        raise UsageError("--m-abs must be non-negative")
    return cov.GaussianParams.from_polar(args.n, args.m_abs, args.m_phase or 0.0)


def _write(out, fields: dict, fmt: str):
    if fmt == "json":
        out.write(json.dumps(fields, indent=2) + "\n")
        return
    for key, value in fields.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = _g(value)
        elif isinstance(value, complex):
            value = f"{_g(value.real)}{'+' if value.imag >= 0 else '-'}{_g(abs(value.imag))}j"
        out.write(f"{key}: {value}\n")


def _analytic(params: cov.GaussianParams) -> dict:
    v = cov.build_restricted_v(params)
    return {
        "trace_class": cov.check_trace_class(v),
        "positive": cov.check_positive_operator(v),
        "p_representable": cov.check_p_representable(v),
    }


def cmd_classify(args, out):
    if not args.eps > 0:
        raise UsageError("--eps must be positive")
    params = _params(args)
    c = cov.classify(params, args.eps)
    fields = {
        "region": c.region.value,
        "margin": c.margin,
        "on_pure_boundary": c.on_pure_boundary,
        "on_p_boundary": c.on_p_boundary,
    }
    fields.update(_analytic(params))
    _write(out, fields, args.format)


def cmd_oracle(args, out):
    params = _params(args)
    c = cov.classify(params)
    if c.region is cov.Region.InvalidTraceClass:
        raise DomainError(
            f"n={params.n:g}, |m|={params.m_abs:g} violates the trace-class condition n + 1/2 > |m|",
            inequality="n + 1/2 > |m|",
        )
    G = fock.build_gaussian_fock(params, cutoff=args.cutoff, strict=False)
    ev = fock.min_eigenvalue(G)
    ppt = fock.min_eigenvalue(fock.partial_transpose_fock(G))
    n_a, n_b, m_out = fock.moments(G)
    fields = {"region": c.region.value}
    fields.update(_analytic(params))
    fields.update(
        {
            "cutoff": G.N,
            "trace_deficit": G.trace_deficit,
            "fock_min_eig": ev,
            "ppt_min_eig": ppt,
            "moment_error_n_a": abs(n_a - params.n),
            "moment_error_n_b": abs(n_b - params.n),
            "moment_error_m": abs(m_out - params.m),
            "fock_positive": ev >= -phase_diagram.ORACLE_EIG_TOL,
            "fock_ppt": ppt >= -phase_diagram.ORACLE_EIG_TOL,
        }
    )
    _write(out, fields, args.format)


def cmd_decompose(args, out):
    params = _params(args)
    if args.nodes < 3:
        raise UsageError("--nodes must be at least 3")
    report = werner.decomposition_report(params, args.nodes, args.cutoff)
    payload = werner.components_to_json(report.components)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload + "\n")
        summary = out
    else:
        out.write(payload + "\n")
        summary = sys.stderr
    _write(
        summary,
        {
            "components": len(report.components),
            "nodes_per_axis": report.nodes_per_axis,
            "cutoff": report.cutoff,
            "trace_distance": report.trace_distance,
        },
        args.format,
    )


def cmd_sweep(args, out):
    try:
        spec = phase_diagram.SweepSpec(
            n_range=(args.n_min, args.n_max),
            m_range=(args.m_min, args.m_max),
            steps_n=args.steps,
            steps_m=args.steps,
            m_phase=args.m_phase,
            oracle_fraction=args.oracle_fraction,
            oracle_cutoff=fock.FockCutoff(args.oracle_cutoff),
        )
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from None
    data = phase_diagram.emit(phase_diagram.sweep(spec), args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        out.write(data.decode("utf-8"))


def cmd_wavefunction(args, out):
    value = fock.position_wavefunction(args.lam, args.x1, args.x2)
    if args.format == "json":
        _write(out, {"lambda": args.lam, "x1": args.x1, "x2": args.x2, "psi": value}, "json")
    else:
        out.write(_g(value) + "\n")


COMMANDS = {
    "classify": cmd_classify,
    "oracle": cmd_oracle,
    "decompose": cmd_decompose,
    "sweep": cmd_sweep,
    "wavefunction": cmd_wavefunction,
}


def _wants_json(argv) -> bool:
    for i, a in enumerate(argv):
        if a == "--format=json" or (a == "--format" and i + 1 < len(argv) and argv[i + 1] == "json"):
            return True
    return False


def _report(err, code: str, message: str, as_json: bool, **extra):
    if as_json:
        err.write(json.dumps({"error_code": code, "message": message, **extra}) + "\n")
    else:
        err.write(f"error [{code}]: {message}\n")


def run(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    as_json = _wants_json(argv)
    handler = logging.StreamHandler(err)
    handler.setFormatter(logging.Formatter("warning: %(message)s"))
    pkg_log = logging.getLogger("gauss_sep")
    pkg_log.addHandler(handler)
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        _report(err, "usage_error", str(exc), as_json)
        return EXIT_USAGE
    except DomainError as exc:
        _report(err, exc.error_code, str(exc), as_json, inequality=exc.inequality)
        return EXIT_DOMAIN
    except InvalidArgumentError as exc:
        _report(err, exc.error_code, str(exc), as_json)
        return EXIT_USAGE
    except GaussSepError as exc:
        _report(err, exc.error_code, str(exc), as_json)
        return EXIT_NUMERIC
    finally:
        pkg_log.removeHandler(handler)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
