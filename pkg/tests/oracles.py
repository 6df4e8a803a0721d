"""Independent brute-force oracles used to derive and freeze expected values.

Nothing here calls into the library's algorithms; the oracles work on plain
integers, tuples and Fractions so that they can cross-check it.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb


# --------------------------------------------------------------------------
# Lattice enumeration


def lattice_points(n, d, k, p, lower, upper):
    """All tuples in ``(1/p^k Z)^(n+1)`` with entries in ``[lower, upper]`` summing to ``d``."""
    q = p ** k
    D = Fraction(d) * q
    if D.denominator != 1:
        return []
    lo, hi = int(Fraction(lower) * q), int(Fraction(upper) * q)
    out = []
    for head in itertools.product(range(lo, hi + 1), repeat=n):
        last = D.numerator - sum(head)
        if lo <= last <= hi:
            out.append(tuple(Fraction(x, q) for x in head + (last,)))
    return sorted(out)


def h0_lattice(n, d, k, p=2):
    """Nonnegative monomials of degree ``d``."""
    d = Fraction(d)
    if d < 0:
        return []
    return lattice_points(n, d, k, p, 0, d)


def hn_lattice(n, d, k, W, p=2):
    """All-negative monomials of degree ``d`` with entries at least ``-W``."""
    q = p ** k
    return lattice_points(n, d, k, p, -Fraction(W), Fraction(-1, q))


def classical_h0(n, d):
    return comb(d + n, n) if d >= 0 else 0


def classical_hn(n, d):
    return comb(-d - 1, n) if d <= -n - 1 else 0


def koszul_quotient_dim(n, s, k=0, p=2):
    """Monomials ``Y^a`` with every ``a_i < s p^k``: a basis of ``A/(T_i^s)``."""
    e = s * p ** k
    return sum(1 for _ in itertools.product(range(e), repeat=n + 1))


# --------------------------------------------------------------------------
# Chain rings O/pi^L on plain integer vectors


class ChainRing:
    """``O / u^L`` for ``O = F_p[[u]]`` (charp) or ``Z_p[u]/(u^q - p)`` (mixed).

    Elements are integer tuples ``c`` meaning ``sum c_i u^i``; ``u`` is the
    uniformizer ``pi^(1/q)``.
    """

    def __init__(self, kind, p, q, L):
        self.kind, self.p, self.q, self.L = kind, p, q, L
        self.size = L if kind == "charp" else q

    def reduce(self, c):
        c = list(c)
        p, q, L = self.p, self.q, self.L
        if self.kind == "charp":
            c = (c + [0] * L)[:L]
            return tuple(x % p for x in c)
        for i in range(len(c) - 1, q - 1, -1):
            c[i - q] += p * c[i]
        c = (c + [0] * q)[:q]
        out = []
        for i, x in enumerate(c):
            keep = -(-(L - i) // q)
            out.append(x % p ** keep if keep > 0 else 0)
        return tuple(out)

    def zero(self):
        return (0,) * self.size

    def const(self, n):
        return self.reduce([n])

    def u_power(self, e):
        if self.kind == "charp":
            return self.reduce([0] * e + [1]) if e < self.L else self.zero()
        a, r = divmod(e, self.q)
        c = [0] * self.q
        c[r] = self.p ** a
        return self.reduce(c)

    def add(self, a, b):
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.reduce([x - y for x, y in zip(a, b)])

    def mul(self, a, b):
        out = [0] * (len(a) + len(b))
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self.reduce(out)

    def is_zero(self, a):
        return not any(a)

    def val(self, a):
        if self.is_zero(a):
            return None
        if self.kind == "charp":
            return min(i for i, x in enumerate(a) if x)
        best = None
        for i, x in enumerate(a):
            if x:
                v = 0
                while x % self.p == 0:
                    x //= self.p
                    v += 1
                best = v * self.q + i if best is None else min(best, v * self.q + i)
        return best

    def div_u(self, a, v):
        """A representative of ``a / u^v`` (requires ``val(a) >= v``)."""
        if self.kind == "charp":
            return self.reduce(list(a[v:]))
        r = (-v) % self.q
        c = (v + r) // self.q
        folded = [0] * r + list(a)
        for i in range(len(folded) - 1, self.q - 1, -1):
            folded[i - self.q] += self.p * folded[i]
        folded = folded[:self.q]
        scale = self.p ** c
        assert all(x % scale == 0 for x in folded)
        return self.reduce([x // scale for x in folded])

    def unit_inverse(self, w):
        w0 = w[0] % self.p
        y = self.const(pow(w0, -1, self.p))
        two = self.const(2)
        for _ in range(2 * self.L.bit_length() + 4):
            y = self.mul(y, self.sub(two, self.mul(w, y)))
        assert self.mul(w, y) == self.const(1)
        return y


def chain_solvable(R: ChainRing, A, b):
    """Whether ``A x = b`` has a solution over ``R`` (Smith-style diagonalization)."""
    A = [list(row) for row in A]
    b = list(b)
    rows, cols = len(A), len(A[0]) if A else 0
    used_r, used_c = set(), set()
    pivots = []
    while True:
        best = None
        for i in range(rows):
            if i in used_r:
                continue
            for j in range(cols):
                if j in used_c:
                    continue
                v = R.val(A[i][j])
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, pi, pj = best
        used_r.add(pi)
        used_c.add(pj)
        pivots.append((pi, v))
        inv = R.unit_inverse(R.div_u(A[pi][pj], v))
        for i in range(rows):
            if i == pi or R.is_zero(A[i][pj]):
                continue
            f = R.mul(R.div_u(A[i][pj], v), inv)
            A[i] = [R.sub(x, R.mul(f, y)) for x, y in zip(A[i], A[pi])]
            b[i] = R.sub(b[i], R.mul(f, b[pi]))
        for j in range(cols):
            if j == pj or R.is_zero(A[pi][j]):
                continue
            f = R.mul(R.div_u(A[pi][j], v), inv)
            for i in range(rows):
                A[i][j] = R.sub(A[i][j], R.mul(f, A[i][pj]))
    for i in range(rows):
        if i not in used_r and not R.is_zero(b[i]):
            return False
    for i, v in pivots:
        vb = R.val(b[i])
        if vb is not None and vb < v:
            return False
    return True


def ring_elem(R: ChainRing, x, model_q):
    """Convert an integral library field element into ``R`` (digits read as exact)."""
    if R.kind == "charp":
        c = [0] * R.L
        for e, d in x.digits():
            units = int(e.value * model_q)
            if units < R.L:
                c[units] = d
        return R.reduce(c)
    shift, coeffs = x.coefficients()
    assert shift >= 0
    return R.reduce([c * x.model.p ** shift for c in coeffs])


def inverse_search(f, box, E):
    """Search for ``g`` with support in ``box`` and coefficients in ``pi^-E O`` such
    that ``f g == 1 mod pi^m``.  Returns True if such a ``g`` exists.

    ``f`` must have integral coefficients.  The search is exhaustive over that
    finite family because it is posed as a linear system over ``O/pi^(m+E)``.
    """
    model = f.model
    q = model.q
    R = ChainRing(model.kind, model.p, q, (model.m + E) * q)
    terms = {e: ring_elem(R, c, q) for e, c in f.terms.items()}
    unknowns = list(itertools.product(*(range(b + 1) for b in box)))
    rows = sorted({tuple(a + x for a, x in zip(al, e)) for al in unknowns for e in terms})
    zero = (0,) * f.nvars
    if zero not in rows:
        rows.append(zero)
    A = []
    for beta in rows:
        row = []
        for al in unknowns:
            e = tuple(x - a for x, a in zip(beta, al))
            row.append(terms.get(e, R.zero()))
        A.append(row)
    b = [R.u_power(E * q) if beta == zero else R.zero() for beta in rows]
    return chain_solvable(R, A, b)


def multiply_back_oracle(f, g, E):
    """``f * g == 1 mod pi^m`` recomputed in the chain ring, with ``g`` scaled by ``pi^E``."""
    model = f.model
    q = model.q
    R = ChainRing(model.kind, model.p, q, (model.m + E) * q)
    wide = model.with_precision(model.m + E)
    acc = {}
    for e1, c1 in f.terms.items():
        x1 = ring_elem(R, c1, q)
        for e2, c2 in g.terms.items():
            x2 = ring_elem(R, c2.to_model(wide).shift(E * q), q)
            key = tuple(a + b for a, b in zip(e1, e2))
            acc[key] = R.add(acc.get(key, R.zero()), R.mul(x1, x2))
    zero = (0,) * f.nvars
    acc[zero] = R.sub(acc.get(zero, R.zero()), R.u_power(E * q))
    return all(R.is_zero(x) for x in acc.values())


# --------------------------------------------------------------------------
# Cocycles and towers


def twisting_entries(n, d, mu, p):
    """``(i, j) -> (mu_i / mu_j mod p, d)`` for the class of degree ``d`` with witness ``mu``."""
    return {(i, j): (mu[i] * pow(mu[j], -1, p) % p, Fraction(d))
            for i, j in itertools.combinations(range(n + 1), 2)}


def theta_tower(d, N, p):
    return [Fraction(d) / p ** i for i in range(N)]
