"""Exponents in Z[1/p], two truncated perfectoid field models, and tilts.

Both field models are written in terms of the root ``s = pi^(1/p^k)`` of the
pseudouniformizer.  Valuations and precisions are kept internally as integers
counted in powers of ``s`` ("s-units"); the public API converts them to
:class:`PAdicExp` values.

* ``charp``: truncations of ``F_p((t^(1/p^k)))`` with ``pi = t``.  An element
  is a finite map ``exponent -> digit``.
* ``mixed``: the Kummer model ``Z[u]/(u^(p^k) - p)`` with ``pi = p`` and
  ``u = p^(1/p^k)``.  An element is ``p^E * sum c_i u^i`` with integer
  coefficients, ``0 <= i < p^k``.

Every element records the absolute precision to which it is known.  Products
follow the usual rule ``prec(xy) = min(prec x + val y, prec y + val x)``, capped
at the model precision ``m``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthOverflow, NotInvertibleAtPrecision

INF = math.inf

CHARP = "charp"
MIXED = "mixed"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def p_depth(x, p: int) -> int:
    """Return ``j`` such that the denominator of ``x`` is ``p^j``."""
    den = Fraction(x).denominator
    j = 0
    while den % p == 0:
        den //= p
        j += 1
    if den != 1:
        raise ValueError(f"{x} is not in Z[1/{p}]")
    return j


# --------------------------------------------------------------------------
# Exponents


class PAdicExp:
    """An element ``numerator / p^depth`` of Z[1/p], kept normalized."""

    __slots__ = ("numerator", "depth", "p")

    def __init__(self, numerator: int, depth: int = 0, p: int = 2):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        numerator = int(numerator)
        while depth > 0 and numerator % p == 0:
            numerator //= p
            depth -= 1
        self.numerator = numerator
        self.depth = depth
        self.p = p

    @classmethod
    def from_value(cls, x, p: int) -> "PAdicExp":
        x = Fraction(x)
        return cls(x.numerator * p ** p_depth(x, p) // x.denominator, p_depth(x, p), p)

    @classmethod
    def parse(cls, text, p: int) -> "PAdicExp":
        """Parse ``"a/p^k"``, ``"a/2^k"``, ``"a/b"`` or an integer."""
        if isinstance(text, PAdicExp):
            return text
        if isinstance(text, (int, Fraction)):
            return cls.from_value(text, p)
        s = str(text).replace(" ", "")
        m = re.fullmatch(r"([+-]?\d+)/(p|\d+)\^(\d+)", s)
        if m:
            base = p if m.group(2) == "p" else int(m.group(2))
            if base != p:
                raise ValueError(f"exponent {text!r} is not over p={p}")
            return cls(int(m.group(1)), int(m.group(3)), p)
        return cls.from_value(Fraction(s), p)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.p ** self.depth)

    def _coerce(self, other):
        if isinstance(other, PAdicExp):
            if other.p != self.p:
                raise ValueError("exponents over different primes")
            return other.value
        if isinstance(other, float) and math.isinf(other):
            return other
        return Fraction(other)

    def __add__(self, other):
        o = self._coerce(other)
        if isinstance(o, float):
            return o
        return PAdicExp.from_value(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return PAdicExp.from_value(self.value - o, self.p)

    def __neg__(self):
        return PAdicExp(-self.numerator, self.depth, self.p)

    def __mul__(self, n):
        return PAdicExp.from_value(self.value * Fraction(n), self.p)

    __rmul__ = __mul__

    def __truediv__(self, n):
        return PAdicExp.from_value(self.value / Fraction(n), self.p)

    def __eq__(self, other):
        try:
            return self.value == self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __le__(self, other):
        return self.value <= self._coerce(other)

    def __gt__(self, other):
        return self.value > self._coerce(other)

    def __ge__(self, other):
        return self.value >= self._coerce(other)

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        if self.depth == 0:
            return str(self.numerator)
        return f"{self.numerator}/{self.p}^{self.depth}"

    def __repr__(self):
        return f"PAdicExp({self})"


def exp_add(a: PAdicExp, b: PAdicExp) -> PAdicExp:
    if a.p != b.p:
        raise ValueError("exponents over different primes")
    return a + b


# --------------------------------------------------------------------------
# Models


@dataclass(frozen=True)
class FieldModel:
    """A truncated perfectoid field: prime ``p``, root depth ``k``, precision ``m``."""

    kind: str
    p: int
    k: int
    m: int

    def __post_init__(self):
        if self.kind not in (CHARP, MIXED):
            raise ValueError(f"unknown field model kind {self.kind!r}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 0 or self.m < 1:
            raise ValueError("need k >= 0 and m >= 1")

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def N(self) -> int:
        """Model precision in s-units."""
        return self.m * self.q

    def with_precision(self, m: int) -> "FieldModel":
        return FieldModel(self.kind, self.p, self.k, m)

    def units(self, e) -> int:
        """Convert an exponent of pi into s-units, or raise DepthOverflow."""
        x = Fraction(e.value if isinstance(e, PAdicExp) else e) * self.q
        if x.denominator != 1:
            raise DepthOverflow(f"exponent {e} needs depth > {self.k}")
        return x.numerator

    def exp(self, units: int) -> PAdicExp:
        return PAdicExp(units, self.k, self.p)

    def zero(self, prec=None) -> "FieldElem":
        return FieldElem._make(self, _zero_data(self), self.N if prec is None else prec)

    def one(self) -> "FieldElem":
        return self.from_int(1)

    def from_int(self, n: int) -> "FieldElem":
        if self.kind == CHARP:
            return FieldElem._make(self, {0: n % self.p}, self.N)
        return FieldElem._make(self, (0, (n,) + (0,) * (self.q - 1)), self.N)

    def monomial(self, e, digit: int = 1) -> "FieldElem":
        """``[digit] * pi^e`` with ``[digit]`` the Teichmueller lift (charp: the digit)."""
        return self.s_power(self.units(e), digit)

    def s_power(self, units: int, digit: int = 1) -> "FieldElem":
        if self.kind == CHARP:
            return FieldElem._make(self, {units: digit % self.p}, self.N)
        a, r = divmod(units, self.q)
        w = teichmuller(digit, self.p, self.m + abs(a) + 2)
        coeffs = [0] * self.q
        coeffs[r] = w
        return FieldElem._make(self, (a, tuple(coeffs)), self.N)

    def from_digits(self, digits) -> "FieldElem":
        """charp element from ``{exponent: digit}`` with exponents in Z[1/p]."""
        if self.kind != CHARP:
            raise ValueError("from_digits is for the charp model")
        return FieldElem._make(self, {self.units(e): d for e, d in dict(digits).items()}, self.N)

    def from_coeffs(self, coeffs, shift: int = 0) -> "FieldElem":
        """mixed element ``p^shift * sum coeffs[i] u^i``."""
        if self.kind != MIXED:
            raise ValueError("from_coeffs is for the mixed model")
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > self.q:
            raise DepthOverflow(f"{len(coeffs)} coefficients for u^(p^k) = p with p^k = {self.q}")
        coeffs += [0] * (self.q - len(coeffs))
        return FieldElem._make(self, (shift, tuple(coeffs)), self.N)


def teichmuller(digit: int, p: int, m: int) -> int:
    """Teichmueller representative of ``digit mod p`` modulo ``p^m``."""
    mod = p ** m
    x = digit % p
    if x == 0:
        return 0
    for _ in range(m + 1):
        x = pow(x, p, mod)
    return x


def _zero_data(model):
    return {} if model.kind == CHARP else (0, (0,) * model.q)


# --------------------------------------------------------------------------
# Elements


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class FieldElem:
    __slots__ = ("model", "prec", "_data")

    def __init__(self, *args, **kwargs):
        raise TypeError("use FieldModel constructors")

    @classmethod
    def _make(cls, model, data, prec):
        obj = object.__new__(cls)
        obj.model = model
        obj.prec = min(int(prec), model.N)
        obj._data = _reduce(model, data, obj.prec)
        return obj

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        if self.model.kind == CHARP:
            return not self._data
        return not any(self._data[1])

    def val_units(self):
        """Valuation in s-units, or ``None`` if zero at precision."""
        if self.is_zero():
            return None
        if self.model.kind == CHARP:
            return min(self._data)
        e, coeffs = self._data
        q, p = self.model.q, self.model.p
        return e * q + min(vp(c, p) * q + i for i, c in enumerate(coeffs) if c)

    def _val_bound(self) -> int:
        v = self.val_units()
        return self.prec if v is None else v

    def valuation(self):
        v = self.val_units()
        return INF if v is None else self.model.exp(v)

    @property
    def precision(self) -> PAdicExp:
        return self.model.exp(self.prec)

    def digits(self):
        """charp: sorted ``[(exponent, digit)]``."""
        if self.model.kind != CHARP:
            raise ValueError("digits() is for the charp model")
        return [(self.model.exp(e), d) for e, d in sorted(self._data.items())]

    def coefficients(self):
        """mixed: ``(shift, coeffs)`` with value ``p^shift * sum coeffs[i] u^i``."""
        if self.model.kind != MIXED:
            raise ValueError("coefficients() is for the mixed model")
        return self._data

    def residue(self) -> int:
        """Image in the residue field F_p; requires valuation >= 0."""
        v = self.val_units()
        if v is None or v > 0:
            return 0
        if v < 0:
            raise ValueError("element is not integral")
        if self.model.kind == CHARP:
            return self._data.get(0, 0)
        e, coeffs = self._data
        return coeffs[0] * self.model.p ** e % self.model.p

    def leading(self):
        """``(digit, val_units)`` of the leading term."""
        v = self.val_units()
        if v is None:
            raise NotInvertibleAtPrecision("zero at precision has no leading term")
        if self.model.kind == CHARP:
            return self._data[v], v
        w = self.shift(-v)
        return w.residue(), v

    def is_monomial(self) -> bool:
        """True iff the element is ``[c] * pi^e`` (Teichmueller digit) at its precision."""
        if self.is_zero():
            return False
        if self.model.kind == CHARP:
            return len(self._data) == 1
        c, v = self.leading()
        return self == self.model.s_power(v, c).truncate(self.prec)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, FieldElem):
            other = self.model.from_int(other)
        if other.model != self.model:
            raise ValueError("elements of different field models")
        return other

    def __add__(self, other):
        other = self._check(other)
        prec = min(self.prec, other.prec)
        if self.model.kind == CHARP:
            out = dict(self._data)
            for e, d in other._data.items():
                out[e] = (out.get(e, 0) + d) % self.model.p
            return FieldElem._make(self.model, out, prec)
        e1, c1 = self._data
        e2, c2 = other._data
        e = min(e1, e2)
        p = self.model.p
        s1, s2 = p ** (e1 - e), p ** (e2 - e)
        return FieldElem._make(self.model, (e, tuple(a * s1 + b * s2 for a, b in zip(c1, c2))), prec)

    __radd__ = __add__

    def __neg__(self):
        if self.model.kind == CHARP:
            return FieldElem._make(self.model, {e: -d % self.model.p for e, d in self._data.items()}, self.prec)
        e, c = self._data
        return FieldElem._make(self.model, (e, tuple(-x for x in c)), self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        prec = min(self.prec + other._val_bound(), other.prec + self._val_bound())
        model = self.model
        if model.kind == CHARP:
            out: dict = {}
            p = model.p
            for e1, d1 in self._data.items():
                for e2, d2 in other._data.items():
                    e = e1 + e2
                    if e < prec:
                        out[e] = (out.get(e, 0) + d1 * d2) % p
            return FieldElem._make(model, out, prec)
        e1, c1 = self._data
        e2, c2 = other._data
        q, p = model.q, model.p
        out = [0] * q
        for i, a in enumerate(c1):
            if not a:
                continue
            for j, b in enumerate(c2):
                if not b:
                    continue
                t = i + j
                if t >= q:
                    out[t - q] += a * b * p
                else:
                    out[t] += a * b
        return FieldElem._make(model, (e1 + e2, tuple(out)), prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.model.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, units: int) -> "FieldElem":
        """Exact multiplication by ``s^units``; precision shifts along."""
        model = self.model
        prec = self.prec + units
        if model.kind == CHARP:
            return FieldElem._make(model, {e + units: d for e, d in self._data.items()}, prec)
        e, coeffs = self._data
        q, p = model.q, model.p
        parts = [(divmod(i + units, q), c) for i, c in enumerate(coeffs)]
        amin = min(a for (a, _), _ in parts)
        out = [0] * q
        for (a, r), c in parts:
            out[r] += c * p ** (a - amin)
        return FieldElem._make(model, (e + amin, tuple(out)), prec)

    def truncate(self, prec: int) -> "FieldElem":
        return FieldElem._make(self.model, self._data, min(prec, self.prec))

    def to_model(self, model: FieldModel) -> "FieldElem":
        """Reinterpret the stored digits in another precision of the same field.

        Digits are read as exact; moving to a larger ``m`` keeps the element's
        own precision unless it was the old model cap, in which case the digits
        are taken as exact up to the new cap.
        """
        if (model.kind, model.p, model.k) != (self.model.kind, self.model.p, self.model.k):
            raise ValueError("to_model only changes the precision")
        prec = model.N if self.prec >= self.model.N else self.prec
        return FieldElem._make(model, self._data, prec)

    def inverse(self) -> "FieldElem":
        """Inverse known to precision ``prec - 2 * val`` (s-units)."""
        v = self.val_units()
        if v is None:
            raise NotInvertibleAtPrecision("element is zero at its precision")
        w = self.shift(-v)
        rel = w.prec
        if rel <= 0:
            raise NotInvertibleAtPrecision("no digits known after removing the valuation")
        model = self.model
        w0 = w.residue()
        y = model.from_int(pow(w0, -1, model.p)).truncate(rel)
        if model.kind == MIXED:
            # lift the constant-term inverse p-adically before Newton steps in u
            e, coeffs = w._data
            c0 = coeffs[0] * model.p ** e
            mod = model.p ** (model.m + 1)
            y = model.from_int(pow(c0 % mod, -1, mod)).truncate(rel)
        two = model.from_int(2)
        for _ in range(rel.bit_length() + 2):
            err = (w * y - 1)
            if err.truncate(rel).is_zero():
                break
            y = y * (two - w * y)
        y = y.truncate(rel)
        return y.shift(-v)

    def pth_root(self) -> "FieldElem":
        """Exact p-th root in the charp model (Frobenius is bijective)."""
        model = self.model
        if model.kind != CHARP:
            raise ValueError("general p-th roots are only available in the charp model")
        out = {}
        for e, d in self._data.items():
            if e % model.p:
                raise DepthOverflow(f"p-th root of s^{e} needs depth > {model.k}")
            out[e // model.p] = d
        return FieldElem._make(model, out, self.prec // model.p)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.model.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.model == other.model and self.prec == other.prec and self._data == other._data

    def congruent(self, other, prec=None) -> bool:
        """Equality modulo ``s^prec`` (default: the smaller of the two precisions)."""
        other = self._check(other)
        if prec is None:
            prec = min(self.prec, other.prec)
        return (self - other).truncate(prec).is_zero()

    def __hash__(self):
        if self.model.kind == CHARP:
            return hash((self.model, self.prec, frozenset(self._data.items())))
        return hash((self.model, self.prec, self._data))

    def __repr__(self):
        if self.is_zero():
            body = "0"
        elif self.model.kind == CHARP:
            body = " + ".join(f"{d}*t^{self.model.exp(e)}" for e, d in sorted(self._data.items()))
        else:
            e, c = self._data
            body = " + ".join(f"{x}*u^{i}" for i, x in enumerate(c) if x)
            if e:
                body = f"p^{e}*({body})"
        return f"<{body} + O(pi^{self.precision})>"


def _reduce(model, data, prec):
    if model.kind == CHARP:
        p = model.p
        return {e: d % p for e, d in data.items() if e < prec and d % p}
    e, coeffs = data
    q, p = model.q, model.p
    out = []
    for i, c in enumerate(coeffs):
        if c:
            keep = _ceil_div(prec - i, q) - e
            c = c % p ** keep if keep > 0 else 0
        out.append(c)
    if not any(out):
        return (0, (0,) * q)
    g = min(vp(c, p) for c in out if c)
    if g:
        scale = p ** g
        out = [c // scale for c in out]
    return (e + g, tuple(out))


def f_mul(x: FieldElem, y: FieldElem) -> FieldElem:
    return x * y


def f_val(x: FieldElem):
    return x.valuation()


def f_inv(x: FieldElem) -> FieldElem:
    return x.inverse()


# --------------------------------------------------------------------------
# Tilts


class TiltElem:
    """A compatible sequence ``(x_0, x_1, ...)`` with ``x_{i+1}^p = x_i``."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)
        if not self.components:
            raise ValueError("a tilt element needs at least one component")

    @property
    def model(self) -> FieldModel:
        return self.components[0].model

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __mul__(self, other: "TiltElem") -> "TiltElem":
        n = min(len(self), len(other))
        return TiltElem(a * b for a, b in zip(self.components[:n], other.components[:n]))

    def is_compatible(self) -> bool:
        p = self.model.p
        return all(
            (self.components[i + 1] ** p).congruent(self.components[i])
            for i in range(len(self) - 1)
        )

    def __eq__(self, other):
        return isinstance(other, TiltElem) and self.components == other.components

    def __repr__(self):
        return f"TiltElem{self.components!r}"


def tilt_monomial(e, model: FieldModel, N: int, digit: int = 1) -> TiltElem:
    """The sequence ``([digit] pi^(e/p^i))_{i<N}``; component ``i`` kept to precision ``m/p^i``."""
    e = PAdicExp.parse(e, model.p)
    if N < 1:
        raise ValueError("tilt length must be positive")
    units = model.units(e)
    if units % model.p ** (N - 1):
        raise DepthOverflow(f"{e}/p^{N - 1} is not representable at depth {model.k}")
    comps = []
    for i in range(N):
        comps.append(model.s_power(units // model.p ** i, digit).truncate(model.N // model.p ** i))
    return TiltElem(comps)


def tilt_of(x: FieldElem, N: int) -> TiltElem:
    """Tilt of a charp element: its successive exact p-th roots."""
    comps = [x]
    for _ in range(N - 1):
        comps.append(comps[-1].pth_root())
    return TiltElem(comps)


def sharp(x: TiltElem) -> FieldElem:
    return x.components[0]
