"""Command-line front end.

Exit codes: 0 success / all laws pass, 1 some law failed, 2 bad input,
3 an internal invariant was violated (the witness is printed).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from itertools import product
from typing import Any, Sequence

from .catalog import catalog, isometry_from_name, lattice_from_name
from .classification import classify, defect, graded_dimension
from .errors import InputError, InvariantViolation
from .exact import CycNum, RootOfUnity, rat_str
from .lattice import Lattice, isometry_order
from .twist import B_alpha_beta, C_alpha_beta, TwistData, b_alpha, twist_data

SCHEMA = "twistlat/1"


def report_schema() -> dict:
    """JSON Schema every emitted report conforms to."""
    from importlib.resources import files

    return json.loads(files("twistlat").joinpath("schema.json").read_text(encoding="utf-8"))


class _Fail(Exception):
    """A requested check ran to completion and failed (exit 1)."""

    def __init__(self, report: dict) -> None:
        super().__init__("law failure")
        self.report = report


# -- input ---------------------------------------------------------------------------


def _parse_json_arg(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc


def _int_matrix(data: Any, what: str) -> list[list[int]]:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise InputError(f"{what} must be a nonempty list of rows")
    out = []
    for row in data:
        cur = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise InputError(f"{what} entries must be integers, got {x!r}")
            try:
                q = Fraction(x)
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"{what} entry {x!r} is not a number") from exc
            if q.denominator != 1:
                raise InputError(f"{what} entry {x!r} is not an integer")
            cur.append(int(q))
        out.append(cur)
    return out


def load_input(args: argparse.Namespace, need_sigma: bool = True) -> tuple[Lattice, Any]:
    """Lattice and (optionally) isometry from flags or an input JSON document."""
    lat_src: dict = {}
    sig_src: dict = {}
    if getattr(args, "input", None):
        try:
            with open(args.input, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.input} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise InputError("input document must be a JSON object")
        lat_src = dict(doc.get("lattice") or {})
        sig_src = dict(doc.get("sigma") or {})
    if args.lattice:
        lat_src = {"name": args.lattice}
    if getattr(args, "gram", None):
        lat_src = {"gram": _parse_json_arg(args.gram, "--gram")}
    if getattr(args, "sigma", None):
        sig_src = {"name": args.sigma}
    if getattr(args, "sigma_matrix", None):
        sig_src = {"matrix": _parse_json_arg(args.sigma_matrix, "--sigma-matrix")}

    if "gram" in lat_src:
        lat = Lattice(_int_matrix(lat_src["gram"], "Gram matrix"), "inline")
    elif "name" in lat_src:
        lat = lattice_from_name(str(lat_src["name"]))
    else:
        raise InputError("no lattice given (use --lattice, --gram or --input)")
    if not need_sigma:
        return lat, None
    if "matrix" in sig_src:
        sigma = isometry_order(_int_matrix(sig_src["matrix"], "isometry matrix"), lat)
    elif "name" in sig_src:
        sigma = isometry_from_name(str(sig_src["name"]), lat)
    else:
        raise InputError("no isometry given (use --sigma, --sigma-matrix or --input)")
    return lat, sigma


def _twist(args: argparse.Namespace) -> TwistData:
    lat, sigma = load_input(args)
    return twist_data(lat, sigma)


def _box(rank: int, radius: int) -> list[tuple[int, ...]]:
    if radius < 0:
        raise InputError("--box must be nonnegative")
    return [tuple(v) for v in product(range(-radius, radius + 1), repeat=rank)]


def _lambda(t: TwistData, index: int | None):
    if index is None:
        return None
    reps = classify(t).z_sigma.coset_reps
    if not 0 <= index < len(reps):
        raise InputError(f"--lambda index {index} out of range 0..{len(reps) - 1}")
    return reps[index]


# -- serialization --------------------------------------------------------------------


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return rat_str(x)
    if isinstance(x, (CycNum, RootOfUnity)):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _vec(v: Sequence) -> list:
    return [rat_str(Fraction(x)) if not isinstance(x, int) else x for x in v]


def _input_echo(t: TwistData) -> dict:
    return {
        "lattice": {"name": t.lattice.name, "gram": [list(r) for r in t.lattice.gram]},
        "sigma": {"matrix": [list(r) for r in t.sigma.matrix], "order": t.order},
    }


def _text(data: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(data, dict):
        width = max((len(str(k)) for k in data), default=0)
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{str(k)}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_inline(v)}")
    elif isinstance(data, list):
        for v in data:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(data))
    return lines


def _flat(v: Any) -> bool:
    if isinstance(v, dict):
        return False
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)
    return True


def _inline(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=False)
    if v is None:
        return "-"
    return str(v)


def emit(payload: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    body = {"schema": SCHEMA, **_jsonable(payload)}
    if as_json:
        out.write(json.dumps(body, indent=2) + "\n")
    else:
        out.write("\n".join(_text(body)) + "\n")


# -- subcommands ------------------------------------------------------------------------


def cmd_catalog(args: argparse.Namespace) -> dict:
    return {"command": "catalog", **catalog()}


def cmd_classify(args: argparse.Namespace) -> dict:
    t = _twist(args)
    rep = classify(t)
    return {"command": "classify", "input": _input_echo(t), **rep.to_json()}


def cmd_defect(args: argparse.Namespace) -> dict:
    t = _twist(args)
    res = defect(t)
    return {
        "command": "defect",
        "input": _input_echo(t),
        "defect": res.defect,
        "defect_square": res.defect_square,
        "center_orders": {
            "z_sigma": res.center_orders.z_sigma,
            "q_sigma_mod_image": res.center_orders.q_sigma_mod_image,
            "perp_mod_image": res.center_orders.perp_mod_image,
        },
        "radical": [_vec(x) for x in res.radical],
    }


def cmd_gdim(args: argparse.Namespace) -> dict:
    t = _twist(args)
    rep = classify(t)
    try:
        cutoff = Fraction(args.cutoff)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad --cutoff {args.cutoff!r}") from exc
    lam = _lambda(t, args.lam) if args.lam is not None else rep.z_sigma.coset_reps[0]
    g = graded_dimension(t, lam, cutoff, rep.defect)
    return {"command": "gdim", "input": _input_echo(t), **rep.to_json(), "cutoff": rat_str(cutoff),
            "lambda": _vec(lam), "graded_dimension": g.to_json()}


def cmd_constants(args: argparse.Namespace) -> dict:
    t = _twist(args)
    box = _box(t.lattice.rank, args.box)
    b_table = [{"alpha": list(a), "b": rat_str(b_alpha(t, a))} for a in box]
    pairs = []
    for a in box:
        for c in box:
            pairs.append({
                "alpha": list(a),
                "beta": list(c),
                "B": str(B_alpha_beta(t, a, c)),
                "C": rat_str(C_alpha_beta(t, a, c).as_fraction()),
            })
    return {
        "command": "constants",
        "input": _input_echo(t),
        "box": args.box,
        "note": "B as an element of Q(zeta_n) written in powers zn of exp(2 pi i/n); C as q with C = exp(2 pi i q)",
        "b": b_table,
        "pairs": pairs,
    }


def cmd_cocycle(args: argparse.Namespace) -> dict:
    t = _twist(args)
    eps = t.epsilon
    n = t.lattice.rank
    signs = [[eps(t.lattice.basis_vector(i), t.lattice.basis_vector(j)) for j in range(n)] for i in range(n)]
    box = _box(n, args.box)
    return {
        "command": "cocycle",
        "input": _input_echo(t),
        "basis_signs": signs,
        "eta_character_bits": list(t.eta.character_bits),
        "eta": [{"alpha": list(a), "eta": t.eta(a)} for a in box],
    }


def cmd_verify(args: argparse.Namespace) -> dict:
    from .fock.laws import LAWS, Grid, GridTooLarge, LawContext, negative_controls, resolve_law, verify_law
    from .fock.mstate import build_engine

    t = _twist(args)
    try:
        degree = Fraction(args.grid_degree)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad --grid-degree {args.grid_degree!r}") from exc
    if degree < 0:
        raise InputError("--grid-degree must be nonnegative")
    if args.law == "all":
        ids = list(LAWS)
    else:
        try:
            ids = [resolve_law(x) for x in args.law.split(",")]
        except KeyError as exc:
            raise InputError(f"{exc.args[0]}; known: {', '.join(LAWS)}") from exc
    lam = _lambda(t, args.lam)
    grid = Grid(degree=degree, span=args.span, max_points=args.max_points)
    ctx = LawContext(t, build_engine(t, lam), grid)
    try:
        reports = [verify_law(x, ctx) for x in ids]
        controls = negative_controls(ctx) if args.controls else []
    except GridTooLarge as exc:
        raise InputError(str(exc)) from exc
    payload = {
        "command": "verify",
        "input": _input_echo(t),
        "lambda": _vec(lam) if lam is not None else None,
        "grid_degree": rat_str(degree),
        "passed": all(r.passed for r in reports),
        "laws": [r.to_json() for r in reports],
    }
    if controls:
        payload["negative_controls"] = [r.to_json() for r in controls]
    if not payload["passed"]:
        raise _Fail(payload)
    return payload


# -- parser ------------------------------------------------------------------------------


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lattice", help="catalog lattice: Z:n, A:n, D:n or E8")
    p.add_argument("--gram", help="inline Gram matrix as JSON, e.g. '[[2,-1],[-1,2]]'")
    p.add_argument("--sigma", help="catalog isometry: identity, negation, perm:(1 2)..., coxeter")
    p.add_argument("--sigma-matrix", dest="sigma_matrix", help="inline isometry matrix as JSON (acts on coordinate columns)")
    p.add_argument("--input", help='JSON file {"lattice": {"name"|"gram"}, "sigma": {"name"|"matrix"}}')
    p.add_argument("--json", action="store_true", help="emit JSON instead of aligned text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistlat", description="Twisted modules over lattice vertex algebras, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list built-in lattices and isometries")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)

    for name, func, hlp in [
        ("classify", cmd_classify, "Z_sigma, P_sigma, Q_sigma, defect and lift order"),
        ("defect", cmd_defect, "defect d(sigma) with the commutator-pairing cross-check"),
    ]:
        p = sub.add_parser(name, help=hlp)
        _add_input(p)
        p.set_defaults(func=func)

    p = sub.add_parser("gdim", help="classification plus the graded dimension q-series")
    _add_input(p)
    p.add_argument("--cutoff", default="4", help="highest q-power (a multiple of 1/N)")
    p.add_argument("--lambda", dest="lam", type=int, default=None, help="index into the Z_sigma representatives")
    p.set_defaults(func=cmd_gdim)

    for name, func, hlp in [
        ("constants", cmd_constants, "tables of b_alpha, B_{alpha,beta}, C_{alpha,beta}"),
        ("cocycle", cmd_cocycle, "cocycle signs on the basis and eta on a box"),
    ]:
        p = sub.add_parser(name, help=hlp)
        _add_input(p)
        p.add_argument("--box", type=int, default=1, help="coordinate box radius")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="check operator identities on a truncated twisted module")
    _add_input(p)
    p.add_argument("--law", default="all", help="law id (L1..L15, UB), law name, comma list, or 'all'")
    p.add_argument("--lambda", dest="lam", type=int, default=None, help="index into the Z_sigma representatives")
    p.add_argument("--grid-degree", dest="grid_degree", default="2", help="largest state degree sampled")
    p.add_argument("--span", type=int, default=1, help="exponent window width")
    p.add_argument("--max-points", dest="max_points", type=int, default=200000, help="grid budget per law")
    p.add_argument("--controls", action="store_true", help="also run the corrupted-constant negative controls")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    as_json = getattr(args, "json", False)
    try:
        payload = args.func(args)
    except _Fail as fail:
        emit(fail.report, as_json)
        return 1
    except InvariantViolation as exc:
        emit({"error": "invariant-violation", "message": str(exc), "witness": repr(exc.witness)}, as_json)
        return 3
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"twistlat: invalid input: {exc}\n")
        return 2
    emit(payload, as_json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
