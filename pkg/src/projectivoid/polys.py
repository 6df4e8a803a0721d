"""Sparse (Laurent) polynomials over F_p with integer exponents.

These are the rings reached after clearing p-power-root exponents
(``X_i = Y_i^(p^k)``).  Univariate rings are Euclidean, which is what the
free-basis algorithm in :mod:`projectivoid.projmod` relies on.
"""
from __future__ import annotations


class FpPoly:
    __slots__ = ("p", "nvars", "terms")

    def __init__(self, p: int, nvars: int, terms=None):
        self.p = p
        self.nvars = nvars
        self.terms = {tuple(e): c % p for e, c in (terms or {}).items() if c % p}

    @classmethod
    def const(cls, p, nvars, c):
        return cls(p, nvars, {(0,) * nvars: c})

    @classmethod
    def mono(cls, p, nvars, exps, c=1):
        return cls(p, nvars, {tuple(exps): c})

    def _new(self, terms):
        return FpPoly(self.p, self.nvars, terms)

    def _coerce(self, other):
        if isinstance(other, int):
            return FpPoly.const(self.p, self.nvars, other)
        return other

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = (out.get(e, 0) + c) % self.p
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        p = self.p
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return self._new(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = FpPoly.const(self.p, self.nvars, other)
        return isinstance(other, FpPoly) and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"Y{i}^{x}" for i, x in enumerate(e) if x)
            parts.append(f"{self.terms[e]}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # -- univariate Euclidean structure ------------------------------------

    def degree(self):
        return max(e[0] for e in self.terms) if self.terms else None

    def low_degree(self):
        return min(e[0] for e in self.terms) if self.terms else None

    def is_monomial(self):
        return len(self.terms) == 1

    def is_constant(self):
        return all(not any(e) for e in self.terms) and bool(self.terms)

    def is_polynomial(self):
        return all(x >= 0 for e in self.terms for x in e)

    def is_unit(self, laurent: bool) -> bool:
        if laurent:
            return self.is_monomial()
        return self.is_constant()

    def unit_inverse(self):
        (e, c), = self.terms.items()
        return self._new({tuple(-x for x in e): pow(c, -1, self.p)})

    def norm(self, laurent: bool):
        """Euclidean size: degree (polynomials) or degree span (Laurent)."""
        if laurent:
            return self.degree() - self.low_degree()
        return self.degree()

    def divmod(self, other: "FpPoly", laurent: bool):
        """Univariate division with remainder of smaller Euclidean size."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        p = self.p
        if laurent:
            sa, sb = self.low_degree() or 0, other.low_degree()
            a = _shift(self, -sa) if self.terms else self
            b = _shift(other, -sb)
        else:
            sa = sb = 0
            a, b = self, other
        db = b.degree()
        lead_inv = pow(b.terms[(db,)], -1, p)
        quo: dict = {}
        rem = dict(a.terms)
        while rem:
            dr = max(e[0] for e in rem)
            if dr < db:
                break
            c = rem[(dr,)] * lead_inv % p
            s = dr - db
            quo[(s,)] = c
            for (eb,), cb in b.terms.items():
                k = (eb + s,)
                v = (rem.get(k, 0) - c * cb) % p
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        q = self._new(quo)
        r = self._new(rem)
        if laurent:
            q = _shift(q, sa - sb)
            r = _shift(r, sa)
        return q, r


def _shift(f: FpPoly, s: int) -> FpPoly:
    return FpPoly(f.p, f.nvars, {(e[0] + s,): c for e, c in f.terms.items()})
