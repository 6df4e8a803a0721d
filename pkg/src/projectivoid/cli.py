"""Batch command line: ``python -m projectivoid <command> [flags]``.

Every output embeds the run configuration.  Exit codes: 0 success, 2 config
error, 3 input error, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import cech, picard, projmaps, projmod
from .errors import NotACocycle, NotAUnit, ProjectivoidError, WindowTooSmall
from .field_arith import FieldModel, is_prime
from .jsonio import (
    InputError,
    elem_from_json,
    elem_to_json,
    exp_from_json,
    exp_to_json,
    model_from_json,
    model_to_json,
    series_from_json,
    series_to_json,
)
from .series import invert, is_unit, multiply_back

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


@dataclass
class RunConfig:
    command: str
    p: int = 2
    depth: int = 0
    prec: int = 3
    window: str = "2"
    seed: int = 0
    params: dict = field(default_factory=dict)

    def validate(self):
        if not is_prime(self.p):
            raise ConfigError(f"--p {self.p} is not prime")
        if self.depth < 0:
            raise ConfigError("--depth must be non-negative")
        if self.prec < 1:
            raise ConfigError("--prec must be positive")
        try:
            w = Fraction(self.window)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"--window {self.window!r} is not a number") from exc
        if w < 0:
            raise ConfigError("--window must be non-negative")
        return self


# --------------------------------------------------------------------------
# commands


def _read_json(path):
    if path is None:
        raise ConfigError("--in is required for this command")
    try:
        with open(path, encoding="utf-8") if path != "-" else _stdin() as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _stdin():
    class _Wrap:
        def __enter__(self):
            return sys.stdin

        def __exit__(self, *exc):
            return False
    return _Wrap()


def _degrees(cfg: RunConfig, args):
    raw = args.d_list if args.d_list is not None else args.d
    if raw is None:
        raise ConfigError("give --d or --d-list")
    try:
        return [exp_from_json(x.strip(), cfg.p) for x in str(raw).split(",") if x.strip()]
    except InputError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_cohomology(cfg: RunConfig, args) -> str:
    n = args.n
    W = Fraction(cfg.window)
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(asdict(cfg), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "d", "k", "W"] + [f"h{r}" for r in range(n + 1)] + ["threshold_W"])
    for d in _degrees(cfg, args):
        cx = cech.build_cech_complex(n, d, cfg.depth, W, p=cfg.p)
        h = cech.cohomology_dims(cx)
        writer.writerow([n, exp_to_json(d, cfg.p), cfg.depth, str(W)] + h + [str(cx.threshold)])
    return buf.getvalue()


def _load_series(cfg: RunConfig, args):
    doc = _read_json(args.inp)
    model = model_from_json(doc["model"]) if "model" in doc else \
        FieldModel(args.kind, cfg.p, cfg.depth, cfg.prec)
    return series_from_json(doc.get("series", doc), model, depth=cfg.depth)


def cmd_units(cfg: RunConfig, args) -> dict:
    f = _load_series(cfg, args)
    out = {"precision": str(f.model.exp(f.prec)), "model": model_to_json(f.model)}
    try:
        unit = is_unit(f)
    except ProjectivoidError as exc:
        out.update(is_unit=None, reason=str(exc))
        return out
    out["is_unit"] = unit
    if unit:
        g = invert(f)
        ok = multiply_back(f, g)
        out.update(inverse=series_to_json(g), verified=ok)
        if not ok:
            raise VerificationFailure("multiply-back failed", out)
    return out


def cmd_invert(cfg: RunConfig, args) -> dict:
    f = _load_series(cfg, args)
    try:
        g = invert(f)
    except NotAUnit as exc:
        raise InputError(f"not a unit: {exc}") from exc
    ok = multiply_back(f, g)
    out = {"inverse": series_to_json(g), "verified": ok, "precision": str(f.model.exp(f.prec))}
    if not ok:
        raise VerificationFailure("multiply-back failed", out)
    return out


def _cocycle_from_json(doc, p):
    try:
        n = int(doc["n"])
        p = int(doc.get("p", p))
        entries = {}
        for e in doc["entries"]:
            entries[(int(e["i"]), int(e["j"]))] = picard.ResidueUnit(
                int(e["lambda"]) % p, exp_from_json(e["alpha"], p))
        return picard.UnitCocycle(n, p, entries)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad cocycle document: {exc}") from exc


def cmd_classify(cfg: RunConfig, args) -> dict:
    doc = _read_json(args.inp)
    try:
        c = _cocycle_from_json(doc, cfg.p)
        cls = picard.classify_residue_cocycle(c)
    except (NotACocycle, NotAUnit) as exc:
        raise VerificationFailure(str(exc), {"valid": False, "reason": str(exc)}) from exc
    # recompute the witness identity before claiming validity
    valid = all(u.alpha == cls.degree.value and
                cls.witness[i] * pow(cls.witness[j], -1, c.p) % c.p == u.lam
                for (i, j), u in c.entries.items())
    out = {"degree": exp_to_json(cls.degree, c.p), "witness": list(cls.witness), "valid": valid}
    if not valid:
        raise VerificationFailure("witness does not reproduce the cocycle", out)
    return out


def cmd_theta(cfg: RunConfig, args) -> dict:
    if args.d is None:
        raise ConfigError("--d is required")
    d = exp_from_json(args.d, cfg.p)
    k = cfg.depth if args.depth_given else None
    tower = picard.theta_on_twisting(args.n, d, args.steps, cfg.p, k)
    degrees = [exp_to_json(c.degree, cfg.p) for c in tower]
    verified = all(b.degree * cfg.p == a.degree for a, b in zip(tower, tower[1:])) and \
        tower[0].degree.value == d
    out = {"tower": degrees, "verified": verified}
    if not verified:
        raise VerificationFailure("theta tower failed its compatibility check", out)
    return out


def _ring_from_json(obj) -> projmod.RingSpec:
    try:
        kind = obj.get("kind", "residue")
        p, k = int(obj["p"]), int(obj["k"])
        nvars = int(obj.get("nvars", 1))
        laurent = tuple(bool(x) for x in obj.get("laurent", [False] * nvars))
        if kind == "residue":
            return projmod.RingSpec.residue(p, k, nvars, laurent)
        return projmod.RingSpec.truncated(p, k, int(obj["d"]), nvars, laurent)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad ring description {obj!r}: {exc}") from exc


def _matrix_from_json(doc):
    ring = _ring_from_json(doc.get("ring", {}))
    rows = doc.get("entries")
    if not isinstance(rows, list) or not rows:
        raise InputError("matrix needs a nonempty 'entries' list")
    U = [[series_from_json(x, ring.model, ring.k, ring.nvars, ring.laurent, ring.window)
          for x in row] for row in rows]
    if "dim" in doc and int(doc["dim"]) != len(U):
        raise InputError("'dim' does not match the entries")
    return ring, U


def _matrix_to_json(A):
    return [[series_to_json(x) for x in row] for row in A]


def cmd_qs(cfg: RunConfig, args) -> dict:
    ring, U = _matrix_from_json(_read_json(args.inp))
    if ring.kind != "residue":
        raise InputError("qs-basis works over the residue ring")
    fb = projmod.residue_free_basis(U)
    verified = fb.free and projmod.verify_basis(
        [[x.with_window(fb.ring.window) for x in row] for row in U], fb.B, fb.C)
    out = {"status": fb.status, "rank": fb.rank, "verified": verified,
           "B": _matrix_to_json(fb.B) if fb.free else None,
           "C": _matrix_to_json(fb.C) if fb.free else None}
    if fb.free and not verified:
        raise VerificationFailure("basis certificate failed", out)
    return out


def _datum_from_json(doc) -> projmaps.LnDatum:
    try:
        model = model_from_json(doc["model"])
        secs = [[series_from_json(s, model) for s in level] for level in doc["sections"]]
        lambdas = doc.get("lambdas")
        if lambdas is not None:
            lambdas = [elem_from_json(x, model) for x in lambdas]
        return projmaps.LnDatum(int(doc["m"]), int(doc["n"]), int(doc["N"]),
                                exp_from_json(doc["d0"], model.p), secs, lambdas)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad datum document: {exc}") from exc


def datum_to_json(D: projmaps.LnDatum) -> dict:
    return {"m": D.m, "n": D.n, "N": D.N, "d0": exp_to_json(D.d0, D.p),
            "model": model_to_json(D.model),
            "lambdas": [elem_to_json(x) for x in D.lambdas],
            "sections": [[series_to_json(s) for s in level] for level in D.sections]}


def _map_report(M: projmaps.ProjectivoidMap) -> dict:
    tables = []
    for (j, i, r), q in sorted(M.tables.items()):
        tables.append({"chart": j, "level": i, "target": r,
                       "numerator": series_to_json(q.num), "denominator": series_to_json(q.den),
                       "simplified": series_to_json(q.simplified) if q.simplified is not None else None})
    return {"tables": tables, "checks": M.checks, "generation": M.generation.status,
            "verified": M.verified}


def cmd_build_map(cfg: RunConfig, args) -> dict:
    D = _datum_from_json(_read_json(args.inp))
    M = projmaps.build_map(D)
    out = {"datum": datum_to_json(D), **_map_report(M)}
    if not M.verified:
        raise VerificationFailure("map checks failed", out)
    return out


def cmd_pullback(cfg: RunConfig, args) -> dict:
    doc = _read_json(args.inp)
    D = _datum_from_json(doc.get("datum", doc))
    if args.d is None:
        raise ConfigError("--d is required")
    M = projmaps.build_map(D)
    d = exp_from_json(args.d, D.p)
    cls = projmaps.pullback_class(M, d)
    expected = d * D.d0
    verified = M.verified and cls.degree.value == expected
    out = {"degree": exp_to_json(cls.degree, D.p), "expected": exp_to_json(expected, D.p),
           "witness": list(cls.witness or []), "verified": verified}
    if not verified:
        raise VerificationFailure("pullback does not match d * d0", out)
    return out


def cmd_koszul(cfg: RunConfig, args) -> dict:
    h = cech.koszul_oracle(args.n, args.s, cfg.depth, cfg.p)
    exact = all(x == 0 for x in h[1:])
    expected_h0 = (args.s * cfg.p ** cfg.depth) ** (args.n + 1)
    out = {"homology": h, "exact": exact, "h0_expected": expected_h0,
           "verified": exact and h[0] == expected_h0}
    if not out["verified"]:
        raise VerificationFailure("Koszul complex is not a resolution", out)
    return out


COMMANDS = {
    "cohomology": cmd_cohomology,
    "units": cmd_units,
    "invert": cmd_invert,
    "classify-cocycle": cmd_classify,
    "theta": cmd_theta,
    "qs-basis": cmd_qs,
    "build-map": cmd_build_map,
    "pullback": cmd_pullback,
    "koszul": cmd_koszul,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--prec", type=int, default=3)
    common.add_argument("--window", default="2")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--in", dest="inp", default=None)
    common.add_argument("--out", default=None)
    parser = argparse.ArgumentParser(prog="projectivoid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("cohomology", "theta", "koszul"):
            sp.add_argument("--n", type=int, default=1)
        if name in ("cohomology", "theta", "pullback"):
            sp.add_argument("--d", default=None)
        if name == "cohomology":
            sp.add_argument("--d-list", dest="d_list", default=None)
        if name == "theta":
            sp.add_argument("--steps", type=int, default=3)
        if name == "koszul":
            sp.add_argument("--s", type=int, default=1)
        if name in ("units", "invert"):
            sp.add_argument("--kind", choices=["charp", "mixed"], default="mixed")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    args.depth_given = args.depth is not None
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "p", "depth", "prec", "window", "seed", "depth_given", "out")
              and v is not None}
    cfg = RunConfig(args.command, args.p, args.depth or 0, args.prec, str(args.window),
                    args.seed, params)
    code = EXIT_OK
    try:
        cfg.validate()
        result = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WindowTooSmall as exc:
        print(f"config error: WindowTooSmall: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        result = exc.payload or {"verified": False, "reason": str(exc)}
        code = EXIT_VERIFY
    except (InputError, ProjectivoidError, KeyError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(result, dict):
        text = json.dumps({"config": asdict(cfg), **result}, sort_keys=True, indent=2) + "\n"
    else:
        text = result
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
