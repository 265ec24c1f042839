"""Command-line interface: ``focklab <subcommand> [options]``.

Every numeric option can also come from an environment variable named
FOCKLAB_<OPTION> (for example FOCKLAB_ALPHA); an explicit flag wins over
the environment, which wins over the built-in default.

Exit codes: 0 success, 2 input error, 3 size limit, 4 verification or
stability failure.  Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, hgraph, verification
from .errors import SizeLimitError, StabilityError
from .fock_core import FockVector, FockWeight
from .operators import (
    KINDS,
    MAX_SIZE,
    apply_hankel_exact,
    apply_htoeplitz_exact,
    apply_toeplitz_exact,
    build,
    operator_to_csv,
    operator_to_json,
)
from .symbols import SymbolSyntaxError, parse, render

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_VERIFY = 0, 2, 3, 4

ENV_PREFIX = "FOCKLAB_"

# option name -> (type, default); these honour FOCKLAB_<NAME> overrides
DEFAULTS = {
    "alpha": (float, 1.0),
    "tol": (float, 1e-10),
    "rows": (int, 8),
    "cols": (int, None),
    "block": (int, 8),
    "ncols": (int, 16),
    "nmax": (int, 40),
    "n": (int, 25),
    "eps": (float, 1e-12),
}

FORMATS = {
    "matrix": ("json", "csv"),
    "apply": ("json",),
    "commutator": ("json",),
    "hsnorm": ("json",),
    "defect": ("json", "csv"),
    "berezin": ("csv", "json"),
    "graph": ("dot", "csv", "json"),
    "verify": ("text", "json"),
}

APPLY = {"toeplitz": apply_toeplitz_exact, "hankel": apply_hankel_exact, "htoeplitz": apply_htoeplitz_exact}


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors become InputError so they reach the JSON error path."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _pair(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def _dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False) + "\n"


def _int_list(text: str, name: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated integers, got {text!r}") from None


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def _resolve(args: argparse.Namespace) -> None:
    """Fill options left unset on the command line from env, then defaults."""
    for name, (typ, default) in DEFAULTS.items():
        if not hasattr(args, name) or getattr(args, name) is not None:
            continue
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            try:
                value = typ(env)
            except ValueError:
                raise InputError(f"{ENV_PREFIX}{name.upper()}={env!r} is not a valid {typ.__name__}") from None
        else:
            value = default
        setattr(args, name, value)
    if args.format is None:
        args.format = FORMATS[args.command][0]
    if args.format not in FORMATS[args.command]:
        raise InputError(f"{args.command} supports formats {', '.join(FORMATS[args.command])}; got {args.format!r}")
    if getattr(args, "alpha", 1.0) <= 0:
        raise InputError("alpha must be positive")
    if getattr(args, "tol", 1.0) <= 0:
        raise InputError("tol must be positive")


def _symbol(text: str):
    return parse(text)


# -- subcommands ---------------------------------------------------------------
# Each returns (text, exit code); nothing is written until the text is complete.

def cmd_matrix(args) -> tuple[str, int]:
    phi = _symbol(args.symbol)
    A = build(args.kind, phi, args.rows, args.cols, FockWeight(args.alpha))
    text = operator_to_csv(A) if args.format == "csv" else _dumps(operator_to_json(A))
    return text, EXIT_OK


def _input_vector(args, w: FockWeight) -> FockVector:
    if args.basis is not None:
        if args.basis < 0:
            raise InputError("--basis must be >= 0")
        return FockVector.basis(args.basis, w)
    try:
        raw = json.loads(args.vector)
        coeffs = {int(k): complex(*v) if isinstance(v, list) else complex(v) for k, v in raw.items()}
    except (ValueError, TypeError, AttributeError) as exc:
        raise InputError(f'--vector expects JSON like {{"0": [1, 0]}}: {exc}') from None
    if any(k < 0 for k in coeffs):
        raise InputError("basis indices must be >= 0")
    return FockVector(coeffs, w)


def cmd_apply(args) -> tuple[str, int]:
    phi = _symbol(args.symbol)
    w = FockWeight(args.alpha)
    f = _input_vector(args, w)
    g = APPLY[args.kind](phi, f)
    out = {
        "kind": args.kind,
        "symbol": render(phi),
        "alpha": args.alpha,
        "input": {str(n): _pair(c) for n, c in f},
        "output": {str(n): _pair(c) for n, c in g},
    }
    return _dumps(out), EXIT_OK


def cmd_commutator(args) -> tuple[str, int]:
    phi, psi = _symbol(args.phi), _symbol(args.psi)
    rep = analysis.commutator_report(phi, psi, args.block, FockWeight(args.alpha), args.tol)
    out = {"phi": render(phi), "psi": render(psi), "alpha": args.alpha, **rep.to_json()}
    return _dumps(out), EXIT_OK


def cmd_hsnorm(args) -> tuple[str, int]:
    phi = _symbol(args.symbol)
    if not 1 <= args.ncols <= MAX_SIZE:
        raise SizeLimitError(f"ncols must lie in [1, {MAX_SIZE}]")
    w = FockWeight(args.alpha)
    column_norms = [apply_htoeplitz_exact(phi, FockVector.basis(n, w)).norm_sq() for n in range(args.ncols)]
    partial, total = [], 0.0
    for c in column_norms:
        total += c
        partial.append(total)
    out = {"symbol": render(phi), "alpha": args.alpha, "ncols": args.ncols, "partial_sum": total, "partial_sums": partial}
    return _dumps(out), EXIT_OK


def cmd_defect(args) -> tuple[str, int]:
    phi = _symbol(args.symbol)
    if args.nmax < 0:
        raise InputError("nmax must be >= 0")
    seq = analysis.defect_sequence(phi, args.nmax + 1, FockWeight(args.alpha))
    if args.format == "csv":
        rows = ["n,defect,scale,zero"]
        rows += [f"{n},{v:.17g},{s:.17g},{int(seq.is_zero(n))}" for n, (v, s) in enumerate(zip(seq.values, seq.scales))]
        return "\n".join(rows) + "\n", EXIT_OK
    return _dumps({"symbol": render(phi), "alpha": args.alpha, **seq.to_json()}), EXIT_OK


def cmd_berezin(args) -> tuple[str, int]:
    phi = _symbol(args.symbol)
    radii = _float_list(args.radii, "radii")
    if any(r < 0 for r in radii):
        raise InputError("radii must be non-negative")
    rows = analysis.berezin_decay_table(phi, radii, FockWeight(args.alpha), args.angle)
    if args.format == "csv":
        return analysis.decay_table_csv(rows), EXIT_OK
    out = {
        "symbol": render(phi),
        "alpha": args.alpha,
        "angle": args.angle,
        "values": [{"radius": r, "value": _pair(v), "abs": abs(v)} for r, v in rows],
    }
    return _dumps(out), EXIT_OK


def _graph_input(args):
    if args.symbol is not None:
        if args.xs is not None or args.ys is not None:
            raise InputError("give either --symbol or --xs/--ys, not both")
        return _symbol(args.symbol), None
    if args.xs is None and args.ys is None:
        raise InputError("graph needs --symbol or --xs/--ys")
    return None, (_int_list(args.xs or "", "xs"), _int_list(args.ys or "", "ys"))


def cmd_graph(args) -> tuple[str, int]:
    phi, params = _graph_input(args)
    if not 1 <= args.n <= MAX_SIZE:
        raise SizeLimitError(f"n must lie in [1, {MAX_SIZE}]")
    if args.compare and phi is None:
        raise InputError("--compare needs --symbol")
    if phi is not None:
        g = hgraph.from_symbol(phi, args.n, args.eps, FockWeight(args.alpha))
    else:
        g = hgraph.from_params(args.n, *params)
    if args.format == "dot":
        return hgraph.to_dot(g), EXIT_OK
    if args.format == "csv":
        return hgraph.to_csv(g), EXIT_OK
    out = {"n": g.n, "arcs": [list(a) for a in g.sorted_arcs()], "degrees": hgraph.degree_report(g).to_json()}
    if phi is not None:
        p = hgraph.symbol_to_params(phi)
        out["symbol"] = render(phi)
        out["params"] = {"xs": p.xs, "ys": p.ys, "zero_offset": p.zero_offset}
        if args.compare:
            xs = [x for x in p.xs if x > 0 and x < args.n]
            ys = [y for y in p.ys if y < args.n]
            diff = hgraph.compare(g, hgraph.from_params(args.n, xs, ys))
            out["compare"] = {k: [list(a) for a in v] if isinstance(v, list) else v for k, v in diff.items()}
    else:
        out["params"] = {"xs": params[0], "ys": params[1]}
    return _dumps(out), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    numbers = _int_list(args.criteria, "criteria") if args.criteria else None
    if numbers and any(k not in verification.CRITERIA for k in numbers):
        raise InputError(f"criteria must be among {sorted(verification.CRITERIA)}")
    results = verification.run_all(numbers)
    code = EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
    if args.format == "json":
        return _dumps({"passed": code == EXIT_OK, "criteria": [r.to_json() for r in results]}), code
    return verification.format_table(results) + "\n", code


COMMANDS = {
    "matrix": cmd_matrix,
    "apply": cmd_apply,
    "commutator": cmd_commutator,
    "hsnorm": cmd_hsnorm,
    "defect": cmd_defect,
    "berezin": cmd_berezin,
    "graph": cmd_graph,
    "verify": cmd_verify,
}


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--alpha", type=float, help="Gaussian weight α > 0 (default 1, env FOCKLAB_ALPHA)")
    common.add_argument("--format", help="output format; allowed values depend on the subcommand")
    common.add_argument("--out", type=Path, help="write to this file instead of stdout")

    parser = _Parser(prog="focklab", description="H-Toeplitz operators on the Fock space.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("matrix", parents=[common], help="truncated operator block")
    p.add_argument("--symbol", required=True)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int, help="defaults to --rows")

    p = sub.add_parser("apply", parents=[common], help="apply an operator exactly to a finite vector")
    p.add_argument("--symbol", required=True)
    p.add_argument("--kind", choices=KINDS, default="htoeplitz")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--basis", type=int, help="apply to e_n")
    src.add_argument("--vector", help='JSON object, e.g. {"0": [1, 0], "2": [0, 1]}')

    p = sub.add_parser("commutator", parents=[common], help="commutator of two H-Toeplitz operators")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--block", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("hsnorm", parents=[common], help="Hilbert-Schmidt partial sums")
    p.add_argument("--symbol", required=True)
    p.add_argument("--ncols", type=int)

    p = sub.add_parser("defect", parents=[common], help="compactness defect sequence")
    p.add_argument("--symbol", required=True)
    p.add_argument("--nmax", type=int)

    p = sub.add_parser("berezin", parents=[common], help="Berezin transform decay table")
    p.add_argument("--symbol", required=True)
    p.add_argument("--radii", default="0,1,2,3,4,5")
    p.add_argument("--angle", type=float, default=0.0, help="ray angle in radians")

    p = sub.add_parser("graph", parents=[common], help="directed H-Toeplitz graph")
    p.add_argument("--symbol")
    p.add_argument("--xs", help="upper offsets, comma-separated")
    p.add_argument("--ys", help="lower offsets, comma-separated")
    p.add_argument("--n", type=int, help="vertex count")
    p.add_argument("--eps", type=float)
    p.add_argument("--compare", action="store_true", help="include the arc difference against the literal rule")

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--criteria", help="comma-separated subset, e.g. 1,3,10")
    return parser


def _fail(code: int, exc: BaseException) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    pos = getattr(exc, "position", None)
    if pos is not None:
        err["position"] = list(pos) if isinstance(pos, tuple) else pos
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        return _fail(EXIT_INPUT, exc)
    try:
        _resolve(args)
        if getattr(args, "cols", None) is None and args.command == "matrix":
            args.cols = args.rows
        text, code = COMMANDS[args.command](args)
    except SymbolSyntaxError as exc:
        return _fail(EXIT_INPUT, exc)
    except SizeLimitError as exc:
        return _fail(EXIT_LIMIT, exc)
    except StabilityError as exc:
        return _fail(EXIT_VERIFY, exc)
    except ValueError as exc:
        return _fail(EXIT_INPUT, exc)
    if args.out is not None:
        try:
            args.out.write_text(text)
        except OSError as exc:
            return _fail(EXIT_INPUT, exc)
    else:
        sys.stdout.write(text)
    return code
