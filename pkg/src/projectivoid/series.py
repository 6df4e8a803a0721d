"""Finite slices of the perfectoid Tate algebra and its Laurent variants.

A :class:`TateSeries` is a finitely supported map from exponent tuples to
field elements.  Exponents are stored as integers counted in ``1/p^depth``
("exponent units").  Laurent variables may go down to ``-window``; products
that would leave the window drop the offending terms and set the sticky
``truncated`` flag.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as iproduct

from .errors import (
    DepthOverflow,
    NotAUnit,
    ShapeMismatch,
    UnresolvedAtPrecision,
    ZeroSeries,
)
from .field_arith import INF, FieldElem, FieldModel, PAdicExp, TiltElem


class TateSeries:
    __slots__ = ("model", "nvars", "depth", "laurent", "window", "terms", "prec", "truncated")

    def __init__(self, model: FieldModel, nvars: int, depth: int, terms=None, laurent=None,
                 window=0, prec=None, truncated=False):
        self.model = model
        self.nvars = nvars
        self.depth = depth
        self.laurent = tuple(laurent) if laurent is not None else (False,) * nvars
        if len(self.laurent) != nvars:
            raise ShapeMismatch("one sign policy per variable")
        self.window = Fraction(window)
        self.prec = model.N if prec is None else min(prec, model.N)
        self.truncated = truncated
        lo = self.lower_bound
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ShapeMismatch(f"exponent {e} has the wrong number of variables")
            for ei, lau in zip(e, self.laurent):
                if ei < (lo if lau else 0):
                    raise ShapeMismatch(f"exponent {e} violates the sign policy or window")
            if not isinstance(c, FieldElem):
                c = model.from_int(c)
            if c.model != model:
                raise ShapeMismatch("coefficient from a different field model")
            if not c.is_zero():
                clean[e] = c
        self.terms = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def from_exponents(cls, model, terms, depth, nvars=None, laurent=None, window=0):
        """Build from ``{(exponent, ...): coefficient}`` with exponents in Z[1/p]."""
        q = model.p ** depth
        conv = {}
        for e, c in terms.items():
            if not isinstance(e, tuple):
                e = (e,)
            units = []
            for x in e:
                x = Fraction(x.value if isinstance(x, PAdicExp) else x) * q
                if x.denominator != 1:
                    raise DepthOverflow(f"exponent {e} needs depth > {depth}")
                units.append(x.numerator)
            key = tuple(units)
            if not isinstance(c, FieldElem):
                c = model.from_int(c)
            conv[key] = conv[key] + c if key in conv else c
            nvars = len(key)
        if nvars is None:
            raise ValueError("nvars is required for an empty series")
        return cls(model, nvars, depth, conv, laurent, window)

    def _like(self, terms, prec=None, truncated=None):
        return TateSeries(self.model, self.nvars, self.depth, terms, self.laurent, self.window,
                          self.prec if prec is None else prec,
                          self.truncated if truncated is None else truncated)

    def zero(self):
        return self._like({}, truncated=False)

    def one(self):
        return self.constant(self.model.one())

    def constant(self, c):
        if not isinstance(c, FieldElem):
            c = self.model.from_int(c)
        return self._like({(0,) * self.nvars: c}, truncated=False)

    def monomial(self, exponents, c=1):
        """Monomial with exponents given in Z[1/p]."""
        units = tuple(self.to_units(x) for x in exponents)
        if not isinstance(c, FieldElem):
            c = self.model.from_int(c)
        return self._like({units: c}, truncated=False)

    # -- shape helpers ----------------------------------------------------

    @property
    def q(self) -> int:
        return self.model.p ** self.depth

    @property
    def lower_bound(self) -> int:
        return -math.floor(self.window * self.q)

    @property
    def shape(self):
        return (self.model, self.nvars, self.depth, self.laurent, self.window)

    def to_units(self, x) -> int:
        x = Fraction(x.value if isinstance(x, PAdicExp) else x) * self.q
        if x.denominator != 1:
            raise DepthOverflow(f"exponent needs depth > {self.depth}")
        return x.numerator

    def exponent(self, units) -> tuple:
        """Exponent tuple in Z[1/p] for a stored key."""
        return tuple(Fraction(e, self.q) for e in units)

    def _check(self, other):
        if isinstance(other, (int, FieldElem)):
            return self.constant(other)
        if not isinstance(other, TateSeries):
            raise TypeError(f"cannot combine TateSeries with {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatch("series live in different rings")
        return other

    def is_zero(self) -> bool:
        return not self.terms

    def is_disk(self) -> bool:
        return not any(self.laurent)

    def total_degrees(self) -> set:
        return {Fraction(sum(e), self.q) for e in self.terms}

    def _min_val(self):
        vals = [c.val_units() for c in self.terms.values()]
        return min(vals) if vals else self.prec

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return self._like(out, min(self.prec, other.prec), self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, FieldElem):
            return self.scale(other)
        other = self._check(other)
        lo = self.lower_bound
        lau = self.laurent
        out: dict = {}
        clipped = False
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(l and x < lo for x, l in zip(e, lau)):
                    clipped = True
                    continue
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        prec = min(self.prec + other._min_val(), other.prec + self._min_val())
        return self._like(out, prec, self.truncated or other.truncated or clipped)

    __rmul__ = __mul__

    def scale(self, c: FieldElem):
        prec = min(self.prec + c._val_bound(), c.prec + self._min_val())
        return self._like({e: c * x for e, x in self.terms.items()}, prec)

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, prec: int):
        return self._like({e: c.truncate(prec) for e, c in self.terms.items()}, min(prec, self.prec))

    def to_model(self, model: FieldModel):
        return TateSeries(model, self.nvars, self.depth,
                          {e: c.to_model(model) for e, c in self.terms.items()},
                          self.laurent, self.window,
                          model.N if self.prec >= self.model.N else self.prec, self.truncated)

    def with_window(self, window, laurent=None):
        return TateSeries(self.model, self.nvars, self.depth, self.terms,
                          self.laurent if laurent is None else laurent, window, self.prec,
                          self.truncated)

    def with_depth(self, depth: int):
        if depth < self.depth:
            raise DepthOverflow("cannot lower the exponent depth")
        f = self.model.p ** (depth - self.depth)
        return TateSeries(self.model, self.nvars, depth,
                          {tuple(x * f for x in e): c for e, c in self.terms.items()},
                          self.laurent, self.window, self.prec, self.truncated)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, FieldElem)):
            other = self.constant(other)
        if not isinstance(other, TateSeries):
            return NotImplemented
        return self.shape == other.shape and self.terms == other.terms

    def congruent(self, other, prec=None) -> bool:
        diff = self - other
        if prec is None:
            prec = diff.prec
        return all(c.truncate(prec).is_zero() for c in diff.terms.values())

    def __hash__(self):
        return hash((self.shape, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "TateSeries(0)"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"X{i}^{Fraction(x, self.q)}" for i, x in enumerate(e) if x)
            parts.append(f"{self.terms[e]!r}" + (f"*{mono}" if mono else ""))
        return "TateSeries(" + " + ".join(parts) + ")"


# --------------------------------------------------------------------------
# Spec-level operations


def s_add(f: TateSeries, g: TateSeries) -> TateSeries:
    return f + g


def s_mul(f: TateSeries, g: TateSeries) -> TateSeries:
    return f * g


def gauss_norm(f: TateSeries):
    """Gauss norm in valuation form: the minimal coefficient valuation."""
    if f.is_zero():
        return INF
    return f.model.exp(min(c.val_units() for c in f.terms.values()))


def norm_report(f: TateSeries):
    """``(gauss_norm, exact)``; a truncated series only yields a bound."""
    return gauss_norm(f), not f.truncated


def normalize(f: TateSeries):
    """Return ``(lam, g)`` with ``g = lam * f`` of Gauss norm 0.

    ``lam`` inverts the coefficient of minimal valuation; ties go to the
    lexicographically smallest exponent tuple.
    """
    if f.is_zero():
        raise ZeroSeries("cannot normalize the zero series")
    vmin = min(c.val_units() for c in f.terms.values())
    key = min(e for e, c in f.terms.items() if c.val_units() == vmin)
    lam = f.terms[key].inverse()
    return lam, f.scale(lam)


def is_unit(f: TateSeries) -> bool:
    """Unit criterion ``val(f_0) < val(f_a)`` for every ``a != 0``."""
    if not f.is_disk():
        raise ShapeMismatch("the unit criterion is stated for the disk algebra")
    zero = (0,) * f.nvars
    c0 = f.terms.get(zero)
    others = [c.val_units() for e, c in f.terms.items() if e != zero]
    if c0 is None:
        if others and min(others) < f.prec:
            return False
        raise UnresolvedAtPrecision("constant term and all others vanish at precision")
    v0 = c0.val_units()
    if any(v <= v0 for v in others):
        return False
    if v0 >= f.prec:
        raise UnresolvedAtPrecision("absent coefficients are not resolved below val(f_0)")
    return True


def _working_model(f: TateSeries, v0: int) -> FieldModel:
    extra = -(-2 * max(v0, 0) // f.model.q) + 1
    return f.model.with_precision(f.model.m + extra)


def invert(f: TateSeries) -> TateSeries:
    """Inverse of a unit via ``f_0^-1 * sum_j (1 - f/f_0)^j``.

    Stored digits of ``f`` are read as exact, and the computation runs at a
    raised working precision so that ``f * g == 1 mod pi^m`` holds for the
    returned ``g`` (see :func:`multiply_back`).
    """
    try:
        unit = is_unit(f)
    except UnresolvedAtPrecision as exc:
        raise NotAUnit(f"unit criterion unresolved: {exc}") from exc
    if not unit:
        raise NotAUnit("constant term does not strictly dominate")
    zero = (0,) * f.nvars
    v0 = f.terms[zero].val_units()
    wm = _working_model(f, v0)
    fw = f.to_model(wm)
    inv0 = fw.terms[zero].inverse()
    h = fw.one() - fw.scale(inv0)
    delta = h._min_val() if not h.is_zero() else wm.N
    target = wm.N
    total = fw.one()
    power = fw.one()
    steps = -(-target // max(delta, 1)) + 1
    for _ in range(steps):
        power = (power * h).truncate(target)
        if power.is_zero():
            break
        total = total + power
    g = total.scale(inv0)
    return g.to_model(f.model)


def multiply_back(f: TateSeries, g: TateSeries, m: int | None = None) -> bool:
    """Check ``f * g == 1 mod pi^m`` with both inputs' digits read as exact."""
    m = f.model.m if m is None else m
    vals = [c.val_units() for c in g.terms.values()] or [0]
    wm = f.model.with_precision(m + -(-2 * max(0, -min(vals)) // f.model.q) + 2)
    r = f.to_model(wm) * g.to_model(wm) - 1
    target = m * f.model.q
    return r.prec >= target and all(c.val_units() >= target for c in r.terms.values())


def evaluate(f: TateSeries, x) -> FieldElem:
    """Evaluate at a point of the perfectoid disk given as tilt sequences.

    ``X_i^(a/p^j)`` is read as ``(x_i)_j ** a``, so coordinate ``i`` must have
    more than ``j`` components.
    """
    x = tuple(x)
    if len(x) != f.nvars:
        raise ShapeMismatch("one tilt coordinate per variable")
    for xi in x:
        if not isinstance(xi, TiltElem) or xi.model != f.model:
            raise ShapeMismatch("coordinates must be tilts in the series' field model")
    p = f.model.p
    cache: dict = {}
    total = f.model.zero()
    for e, c in f.terms.items():
        term = c
        for i, units in enumerate(e):
            if units == 0:
                continue
            a, j = units, f.depth
            while j > 0 and a % p == 0:
                a //= p
                j -= 1
            if j >= len(x[i]):
                raise DepthOverflow(f"coordinate {i} needs {j + 1} tilt components")
            key = (i, j, a)
            if key not in cache:
                cache[key] = x[i][j] ** a
            term = term * cache[key]
        total = total + term
    return total


def random_series(rng, model: FieldModel, nvars: int, depth: int, nterms: int,
                  max_exp: int = 2, unit_bias: float = 0.5) -> TateSeries:
    """Seeded random disk series, used by tests and the acceptance suite."""
    q = model.p ** depth
    terms = {}
    exps = list(iproduct(range(max_exp * q + 1), repeat=nvars))
    for _ in range(nterms):
        e = exps[rng.randrange(len(exps))]
        terms[e] = _random_elem(rng, model)
    if rng.random() < unit_bias:
        terms[(0,) * nvars] = _random_elem(rng, model, max_val=0)
    return TateSeries(model, nvars, depth, terms)


def _random_elem(rng, model, max_val=None):
    span = model.N if max_val is None else max_val + 1
    v = rng.randrange(max(span, 1))
    digit = rng.randrange(1, model.p)
    x = model.s_power(v, digit)
    if rng.random() < 0.5:
        x = x + model.s_power(v + 1 + rng.randrange(model.q), rng.randrange(model.p))
    return x
