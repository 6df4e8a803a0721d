"""JSON encodings for exponents, field elements, series, matrices, cocycles and data.

Exponents are strings ``"a/p^k"`` with ``p`` written numerically (``"3/2^2"``)
or plain integers.  A coefficient is an integer, or

* charp: ``{"digits": [[exponent, digit], ...]}``
* mixed: ``{"shift": E, "coeffs": [c_0, ..., c_(q-1)]}``

A series is ``{"terms": [[[exponent, ...], coefficient], ...]}`` plus optional
``nvars``, ``depth``, ``laurent`` and ``window``; the field model comes from the
enclosing document.
"""
from __future__ import annotations

from fractions import Fraction

from .field_arith import CHARP, MIXED, FieldElem, FieldModel, PAdicExp
from .series import TateSeries


class InputError(ValueError):
    """Malformed or inconsistent JSON input."""


def exp_to_json(x, p: int):
    e = x if isinstance(x, PAdicExp) else PAdicExp.from_value(x, p)
    return str(e)


def exp_from_json(text, p: int) -> Fraction:
    try:
        return PAdicExp.parse(text, p).value
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad exponent {text!r}: {exc}") from exc


def model_to_json(model: FieldModel) -> dict:
    return {"kind": model.kind, "p": model.p, "k": model.k, "m": model.m}


def model_from_json(obj) -> FieldModel:
    try:
        return FieldModel(obj["kind"], int(obj["p"]), int(obj["k"]), int(obj["m"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad field model {obj!r}: {exc}") from exc


def elem_to_json(x: FieldElem):
    model = x.model
    if model.kind == CHARP:
        return {"digits": [[str(e), d] for e, d in x.digits()], "prec": str(x.precision)}
    shift, coeffs = x.coefficients()
    return {"shift": shift, "coeffs": list(coeffs), "prec": str(x.precision)}


def elem_from_json(obj, model: FieldModel) -> FieldElem:
    try:
        if isinstance(obj, int):
            return model.from_int(obj)
        if model.kind == CHARP:
            x = model.from_digits({exp_from_json(e, model.p): int(d) for e, d in obj["digits"]})
        else:
            x = model.from_coeffs(obj["coeffs"], int(obj.get("shift", 0)))
        if "prec" in obj:
            x = x.truncate(model.units(exp_from_json(obj["prec"], model.p)))
        return x
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad coefficient {obj!r}") from exc


def series_to_json(f: TateSeries) -> dict:
    p = f.model.p
    return {
        "nvars": f.nvars,
        "depth": f.depth,
        "laurent": list(f.laurent),
        "window": str(f.window),
        "terms": [[[exp_to_json(x, p) for x in f.exponent(e)], elem_to_json(c)]
                  for e, c in sorted(f.terms.items())],
    }


def series_from_json(obj, model: FieldModel, depth=None, nvars=None, laurent=None,
                     window=None) -> TateSeries:
    if not isinstance(obj, dict) or "terms" not in obj:
        raise InputError("a series needs a 'terms' list")
    try:
        terms = {}
        for exps, c in obj["terms"]:
            key = tuple(exp_from_json(e, model.p) for e in exps)
            terms[key] = elem_from_json(c, model)
        depth = int(obj.get("depth", depth if depth is not None else model.k))
        nvars = int(obj.get("nvars", nvars if nvars is not None else
                            (len(next(iter(terms))) if terms else 1)))
        laurent = obj.get("laurent", laurent)
        window = Fraction(str(obj.get("window", window if window is not None else 0)))
        return TateSeries.from_exponents(model, terms, depth, nvars, laurent, window)
    except InputError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad series: {exc}") from exc
