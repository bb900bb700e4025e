"""Command-line interface: JSON in, JSON-lines out, deterministic for a given seed."""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import cover, serialize
from .constants import CurveParams
from .elliptic import RatPoint, WeierstrassCurve
from .morphism import Morphism
from .mwlattice import MWModel
from .qjson import unq

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _read_lines(path):
    text = sys.stdin.read() if path == "-" else open(path).read()
    stripped = text.strip()
    if stripped.startswith("["):
        return json.loads(stripped)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _morphism(data) -> Morphism:
    if isinstance(data, list):
        return Morphism.from_ints(data)
    if isinstance(data, dict) and "entries" in data:
        return Morphism.from_json(data)
    if isinstance(data, dict) and "matrix" in data:
        return _morphism(data["matrix"])
    raise InputError("expected a matrix (list of rows) or a morphism object")


def _trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


class Writer:
    def __init__(self, path):
        self.fh = open(path, "w") if path else sys.stdout

    def emit(self, obj):
        self.fh.write(serialize.canonical_json(obj) + "\n")

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def cmd_reduce(args, out):
    out.emit(serialize.reduce_certificate(_morphism(_read_json(args.input))))
    return EXIT_OK


def cmd_approx(args, out):
    out.emit(serialize.approx_certificate(_morphism(_read_json(args.input)), args.Q))
    return EXIT_OK


def cmd_enumerate(args, out):
    out.emit(serialize.enumerate_certificate(args.g, args.r, args.M))
    return EXIT_OK


def cmd_bounds(args, out):
    if not args.params:
        raise InputError("bounds needs --params")
    out.emit(serialize.bounds_certificate(CurveParams.from_json(_read_json(args.params))))
    return EXIT_OK


def _simulate_one(kind, rng, sc, model):
    g, r, s = int(sc.get("g", 3)), int(sc.get("r", 2)), int(sc.get("s", 2))
    pivot = sc.get("pivot")
    pivot = int(pivot) if pivot is not None else None
    if kind == "prop_a":
        args = cover.plant_prop_a(rng, g, r, s, pivot=pivot, model=model, xi_zero=bool(sc.get("xi_zero", False)))
        return serialize.cover_certificate(*args)
    if kind == "special":
        m, phi, x, y, xi, basis, eps, K1 = cover.plant_special(rng, g, r, s, pivot=pivot)
        return serialize.special_certificate(m, phi, x, y, xi, basis.K, eps, K1)
    if kind == "quasi_special":
        m, qs, *_ = cover.plant_reverse(rng, g, r, s)
        return serialize.quasi_special_certificate(qs.tphi, g)
    if kind == "reverse":
        m, qs, p_idx, x, xi, xi_p, eps, K3, c_p, eps_p = cover.plant_reverse(rng, g, r, s)
        return serialize.reverse_certificate(m, qs.tphi, g, p_idx, x, xi, xi_p, eps, K3, c_p, eps_p)
    raise InputError(f"unknown scenario kind {kind!r}")


def cmd_simulate(args, out):
    sc = _read_json(args.scenario) if args.scenario else {}
    kind = sc.get("kind", "prop_a")
    trials = int(sc.get("trials", 10))
    seed = args.seed if args.seed is not None else int(sc.get("seed", 0))
    model = MWModel.from_json(_read_json(args.model)) if args.model else None
    status = EXIT_OK
    for t in range(trials):
        cert = _simulate_one(kind, _trial_rng(seed, t), sc, model)
        cert["trial"] = t
        if serialize.verify(cert):
            status = EXIT_FAILED
        out.emit(cert)
    return status


def cmd_heights(args, out):
    data = _read_json(args.input)
    curve = WeierstrassCurve.from_json(data["curve"])
    points = [curve.point(*(unq(c) for c in p)) if p != "inf" else RatPoint() for p in data["points"]]
    precision = Fraction(args.precision) if args.precision else unq(data.get("precision", "1/1000000"))
    out.emit(serialize.heights_certificate(curve, points, precision))
    return EXIT_OK


def cmd_verify(args, out):
    try:
        docs = _read_lines(args.input)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc
    status = EXIT_OK
    for i, doc in enumerate(docs):
        fails = serialize.verify(doc)
        kind = doc.get("type") if isinstance(doc, dict) else None
        out.emit({"item": i, "type": kind, "ok": not fails, "failures": fails})
        if fails:
            status = EXIT_FAILED
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussred", description="Gauss-reduced morphisms, approximation certificates and lattice simulations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--precision", default=None, help="rational, e.g. 1/1000000")
    common.add_argument("--params", default=None, help="curve parameter JSON")
    common.add_argument("--model", default=None, help="lattice model JSON")
    common.add_argument("--scenario", default=None, help="simulation scenario JSON")
    common.add_argument("--out", default=None, help="write JSON-lines here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("reduce", parents=[common], help="Gauss-reduce a matrix")
    s.add_argument("input", help="matrix JSON file, or - for stdin")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("approx", parents=[common], help="Dirichlet approximation certificate")
    s.add_argument("input")
    s.add_argument("--Q", type=int, default=2)
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("enumerate", parents=[common], help="list Gauss-reduced integer matrices of bounded height")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--M", type=int, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("bounds", parents=[common], help="effective constants report")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", parents=[common], help="planted-witness simulations")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("heights", parents=[common], help="canonical heights and the pairing Gram")
    s.add_argument("input", help='JSON with "curve" and "points"')
    s.set_defaults(func=cmd_heights)

    s = sub.add_parser("verify", parents=[common], help="replay certificates")
    s.add_argument("input", help="JSON-lines certificate file, or - for stdin")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    out = Writer(args.out)
    try:
        return args.func(args, out)
    except (InputError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_INPUT
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
