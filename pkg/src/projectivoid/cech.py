"""Cech complexes of twisting sheaves on the standard cover of projectivoid space.

Exponents are stored internally as integer tuples in units of ``1/p^k``.  The
piece of ``C^r`` on a face ``S`` is spanned by monomials of total degree ``d``
with ``a_i >= 0`` off ``S`` and ``a_i >= -W`` on ``S``.  Restriction to a larger
face only loosens these bounds, so the windowed complex is always closed under
the differentials.  What the window can do is cut off the top-degree
cohomology: all-negative monomials below ``-W`` are dropped.  The engine
reports the smallest window past which nothing is lost and refuses (by
default) to compute below it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .errors import WindowTooSmall
from .field_arith import CHARP, FieldModel, p_depth
from .linalg import chain_ring_image_length, rank_mod_p


def _q(p: int, k: int) -> int:
    return p ** k


def _to_units(x, q: int):
    """Exact conversion of a rational to units of ``1/q``; ``None`` if not on the lattice."""
    v = Fraction(x) * q
    return v.numerator if v.denominator == 1 else None


def window_threshold(n: int, d, k: int, p: int = 2) -> Fraction:
    """Smallest window ``W`` from which every all-negative monomial of degree ``d`` fits.

    An all-negative monomial has every exponent ``<= -1/q`` so each exponent is
    at least ``d + n/q``.  For ``d < 0`` at least one negative step is needed
    before the Laurent part of the top face is visible at all.
    """
    d = Fraction(d)
    if d >= 0:
        return Fraction(0)
    q = _q(p, k)
    return max(Fraction(1, q), -d - Fraction(n, q))


def _enumerate_units(D: int, lower, upper):
    """Integer tuples with ``lower[i] <= x_i <= upper[i]`` and sum ``D``, lexicographic."""
    n1 = len(lower)
    out = []
    # suffix sums of bounds for pruning
    lo_suf = [0] * (n1 + 1)
    hi_suf = [0] * (n1 + 1)
    for i in range(n1 - 1, -1, -1):
        lo_suf[i] = lo_suf[i + 1] + lower[i]
        hi_suf[i] = hi_suf[i + 1] + upper[i]

    def rec(i, rest, prefix):
        if i == n1:
            if rest == 0:
                out.append(tuple(prefix))
            return
        lo = max(lower[i], rest - hi_suf[i + 1])
        hi = min(upper[i], rest - lo_suf[i + 1])
        for x in range(lo, hi + 1):
            prefix.append(x)
            rec(i + 1, rest - x, prefix)
            prefix.pop()

    rec(0, D, [])
    return out


@dataclass(frozen=True)
class GradedPiece:
    n: int
    d: Fraction
    k: int
    W: Fraction
    face: tuple
    p: int
    units: tuple = field(repr=False)

    @property
    def q(self) -> int:
        return _q(self.p, self.k)

    @property
    def basis(self) -> list:
        return [tuple(Fraction(x, self.q) for x in a) for a in self.units]

    def __len__(self):
        return len(self.units)


def enumerate_monomials(n: int, d, k: int, W, S, p: int = 2,
                        strictly_negative: bool = False) -> GradedPiece:
    """Monomial basis of the degree-``d`` piece on face ``S`` within window ``W``.

    With ``strictly_negative`` only tuples whose entries are all negative are
    kept, which is the top-cohomology basis when ``S`` is the full face.
    """
    q = _q(p, k)
    S = tuple(sorted(set(S)))
    d = Fraction(d)
    W = Fraction(W)
    D = _to_units(d, q)
    piece = dict(n=n, d=d, k=k, W=W, face=S, p=p)
    if D is None:
        return GradedPiece(units=(), **piece)
    w = floor(W * q)
    lower = [-w if i in S else 0 for i in range(n + 1)]
    if strictly_negative:
        if len(S) != n + 1:
            return GradedPiece(units=(), **piece)
        upper = [-1] * (n + 1)
    else:
        upper = [D - sum(lower) + lower[i] for i in range(n + 1)]
    if any(lo > hi for lo, hi in zip(lower, upper)):
        return GradedPiece(units=(), **piece)
    return GradedPiece(units=tuple(_enumerate_units(D, lower, upper)), **piece)


@dataclass
class CechComplex:
    n: int
    d: Fraction
    k: int
    W: Fraction
    p: int
    coeff: object
    threshold: Fraction
    spaces: list
    differentials: list

    @property
    def dims(self) -> list:
        return [len(s) for s in self.spaces]

    @property
    def chain_length(self):
        """Length of the coefficient ring: 1 for F_p, ``d~ * p^k`` for the chain ring."""
        if self.coeff == "Fp":
            return 1
        return self.coeff * _q(self.p, self.k)


def _faces(n: int, size: int):
    return list(itertools.combinations(range(n + 1), size))


def _compose_zero(d1, d0, p: int) -> bool:
    for col in d0:
        acc: dict = {}
        for mid, c in col.items():
            for r, x in d1[mid].items():
                acc[r] = (acc.get(r, 0) + c * x) % p
        if any(acc.values()):
            return False
    return True


def build_cech_complex(n: int, d, k: int, W, coeff="Fp", p: int = 2,
                       strict: bool = True) -> CechComplex:
    """Assemble the windowed Cech complex of ``O(d)`` on the standard cover.

    ``coeff`` is ``"Fp"`` or a positive integer ``d~`` selecting the chain ring
    ``F_p[t^(1/p^k)]/(t^d~)``.  With ``strict`` a window below the reported
    threshold raises :class:`WindowTooSmall`.
    """
    if coeff != "Fp" and not (isinstance(coeff, int) and coeff >= 1):
        raise ValueError("coeff must be 'Fp' or a positive truncation level")
    d = Fraction(d)
    W = Fraction(W)
    if W < 0:
        raise ValueError("window must be non-negative")
    p_depth(d, p)  # rejects degrees outside Z[1/p]
    thr = window_threshold(n, d, k, p)
    if strict and W < thr:
        raise WindowTooSmall(
            f"window {W} is below the threshold {thr} for n={n}, d={d}, k={k}", thr)
    spaces = []
    index = []
    for r in range(n + 1):
        basis = []
        for S in _faces(n, r + 1):
            basis.extend((S, a) for a in enumerate_monomials(n, d, k, W, S, p).units)
        spaces.append(basis)
        index.append({b: i for i, b in enumerate(basis)})
    diffs = []
    for r in range(n):
        cols = []
        for S, a in spaces[r]:
            col = {}
            for j in range(n + 1):
                if j in S:
                    continue
                T = tuple(sorted(S + (j,)))
                sign = -1 if T.index(j) % 2 else 1
                col[index[r + 1][(T, a)]] = sign
            cols.append(col)
        diffs.append(cols)
    for r in range(n - 1):
        if not _compose_zero(diffs[r + 1], diffs[r], p):
            raise AssertionError("d o d != 0")
    return CechComplex(n, d, k, W, p, coeff, thr, spaces, diffs)


def _image_size(cx: CechComplex, r: int) -> int:
    if r < 0 or r >= cx.n:
        return 0
    cols = cx.differentials[r]
    if cx.coeff == "Fp":
        return rank_mod_p(cols, cx.p)
    model = FieldModel(CHARP, cx.p, cx.k, cx.coeff)
    return chain_ring_image_length(cols, model)


def cohomology_dims(cx: CechComplex) -> list:
    """``(h^0, ..., h^n)``: dimensions over F_p, or lengths over the chain ring."""
    L = cx.chain_length
    out = []
    for r in range(cx.n + 1):
        ker = L * cx.dims[r] - _image_size(cx, r)
        out.append(ker - _image_size(cx, r - 1))
    return out


def hn_basis(n: int, d, k: int, W, p: int = 2) -> list:
    """All-negative monomials of degree ``d < 0`` within depth ``k`` and window ``W``."""
    if Fraction(d) >= 0:
        raise ValueError("top cohomology basis needs d < 0")
    return enumerate_monomials(n, d, k, W, range(n + 1), p, strictly_negative=True).basis


def _koszul_degree_piece(n: int, e: int, D: int):
    """Bases of K_i in internal degree ``D``: pairs (subset I, exponent b)."""
    pieces = []
    for i in range(n + 2):
        basis = []
        rest = D - e * i
        if rest >= 0:
            monos = _enumerate_units(rest, [0] * (n + 1), [rest] * (n + 1))
            for I in itertools.combinations(range(n + 1), i):
                basis.extend((I, b) for b in monos)
        pieces.append(basis)
    return pieces


def koszul_oracle(n: int, s: int, k: int = 0, p: int = 2) -> list:
    """Homology dimensions ``(H_0, ..., H_{n+1})`` of the Koszul complex on ``T_i^s``.

    The ring is ``F_p[T_0^(1/p^k), ..., T_n^(1/p^k)]``; in the variables
    ``Y_i = T_i^(1/p^k)`` the sequence is ``Y_i^(s p^k)``.  Homology is computed
    degree by degree up to ``(n+1) s p^k``, past which the quotient vanishes.
    """
    e = s * _q(p, k)
    totals = [0] * (n + 2)
    for D in range((n + 1) * e + 1):
        pieces = _koszul_degree_piece(n, e, D)
        idx = [{b: j for j, b in enumerate(piece)} for piece in pieces]
        ranks = [0] * (n + 2)  # ranks[i] = rank of K_i -> K_{i-1}
        for i in range(1, n + 2):
            cols = []
            for I, b in pieces[i]:
                col = {}
                for t, j in enumerate(I):
                    J = I[:t] + I[t + 1:]
                    bb = list(b)
                    bb[j] += e
                    col[idx[i - 1][(J, tuple(bb))]] = 1 if t % 2 == 0 else p - 1
                cols.append(col)
            ranks[i] = rank_mod_p(cols, p)
        for i in range(n + 2):
            nxt = ranks[i + 1] if i + 1 < n + 2 else 0
            totals[i] += len(pieces[i]) - ranks[i] - nxt
    return totals
