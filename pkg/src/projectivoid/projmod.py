"""Finite projective modules given by idempotent matrices, and their free bases.

Two rings are modelled, both as :class:`TateSeries` with ``CharP``
coefficients:

* the residue ring ``F_p[X^(1/p^k)]`` (optionally Laurent per variable), with
  coefficients in ``F_p`` (precision one, only the ``t^0`` digit);
* the truncated integral ring ``A_d = (F_p[t^(1/p^k)]/(t^d))[X^(1/p^k)]``.

Over a univariate residue ring clearing the root exponents gives a principal
ideal domain, where column echelon form produces a basis together with a
certificate.  Bases lift to ``A_d`` by Nakayama: ``t`` is nilpotent of order at
most ``d * p^k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DepthOverflow, NotIdempotent, ResidueBasisInvalid, ShapeMismatch
from .field_arith import CHARP, FieldModel
from .polys import FpPoly
from .series import TateSeries

RESIDUE = "residue"
TRUNCATED = "truncated"


@dataclass(frozen=True)
class RingSpec:
    kind: str
    p: int
    k: int
    nvars: int = 1
    laurent: tuple = ()
    d: int = 1
    window: int = 64

    def __post_init__(self):
        if self.kind not in (RESIDUE, TRUNCATED):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("truncation level must be at least 1")
        if not self.laurent:
            object.__setattr__(self, "laurent", (False,) * self.nvars)
        if len(self.laurent) != self.nvars:
            raise ShapeMismatch("one Laurent flag per variable")

    @classmethod
    def residue(cls, p, k, nvars=1, laurent=(), window=64):
        return cls(RESIDUE, p, k, nvars, tuple(laurent), 1, window)

    @classmethod
    def truncated(cls, p, k, d, nvars=1, laurent=(), window=64):
        return cls(TRUNCATED, p, k, nvars, tuple(laurent), d, window)

    @property
    def model(self) -> FieldModel:
        if self.kind == RESIDUE:
            return FieldModel(CHARP, self.p, 0, 1)
        return FieldModel(CHARP, self.p, self.k, self.d)

    @property
    def nilpotency(self) -> int:
        """Order of nilpotency of ``t`` (1 for the residue ring)."""
        return 1 if self.kind == RESIDUE else self.d * self.p ** self.k

    def zero(self) -> TateSeries:
        return TateSeries(self.model, self.nvars, self.k, {}, self.laurent, self.window)

    def one(self) -> TateSeries:
        return self.zero().one()

    def const(self, c) -> TateSeries:
        return self.zero().constant(c)

    def element(self, terms) -> TateSeries:
        """``{exponent tuple or scalar: coefficient}`` with exponents in Z[1/p]."""
        return TateSeries.from_exponents(self.model, dict(terms), self.k, self.nvars,
                                         self.laurent, self.window)

    def t_power(self, e, digit=1):
        """The coefficient ``digit * t^e`` (truncated ring only)."""
        return self.model.monomial(e, digit)

    @property
    def residue_ring(self) -> "RingSpec":
        return RingSpec.residue(self.p, self.k, self.nvars, self.laurent, self.window)

    def reduce(self, f: TateSeries) -> TateSeries:
        """Reduction modulo ``t`` into the residue ring."""
        res = self.residue_ring
        model = res.model
        terms = {}
        for e, c in f.terms.items():
            r = c.residue()
            if r:
                terms[e] = model.from_int(r)
        return TateSeries(model, self.nvars, self.k, terms, self.laurent, self.window)

    def lift(self, f: TateSeries) -> TateSeries:
        """Digitwise lift of a residue element (constants in ``t``)."""
        model = self.model
        terms = {e: model.from_int(c.residue()) for e, c in f.terms.items()}
        return TateSeries(model, self.nvars, self.k, terms, self.laurent, self.window)


# --------------------------------------------------------------------------
# Matrices (lists of rows)


def mat_mul(A, B):
    n, m = len(A), len(B[0]) if B else 0
    if A and len(A[0]) != len(B):
        raise ShapeMismatch("inner dimensions differ")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(len(B)):
                a, b = A[i][l], B[l][j]
                if a.is_zero() or b.is_zero():
                    continue
                acc = a * b if acc is None else acc + a * b
            row.append(acc if acc is not None else A[i][0].zero() if A[i] else B[0][j].zero())
        out.append(row)
    return out


def mat_eq(A, B) -> bool:
    if len(A) != len(B) or any(len(a) != len(b) for a, b in zip(A, B)):
        return False
    return all((x - y).is_zero() for ra, rb in zip(A, B) for x, y in zip(ra, rb))


def identity(ring: RingSpec, r: int):
    return [[ring.one() if i == j else ring.zero() for j in range(r)] for i in range(r)]


def mat_map(f, A):
    return [[f(x) for x in row] for row in A]


def _square(U):
    r = len(U)
    if r == 0 or any(len(row) != r for row in U):
        raise ShapeMismatch("matrix must be square and nonempty")
    return r


def check_idempotent(U) -> bool:
    _square(U)
    return mat_eq(mat_mul(U, U), U)


# --------------------------------------------------------------------------
# Clearing root exponents


@dataclass(frozen=True)
class ClearedMeta:
    p: int
    k: int
    nvars: int
    laurent: tuple
    window: int


def clear_exponents(U, k: int | None = None):
    """Substitute ``X_i = Y_i^(p^k)`` entrywise.

    Returns ``(matrix of FpPoly, ClearedMeta)``; :func:`restore_exponents`
    undoes the substitution.  Coefficients are read modulo ``t``.
    """
    r0 = U[0][0]
    p, nvars = r0.model.p, r0.nvars
    if k is None:
        k = max(x.depth for row in U for x in row)
    q = p ** k
    out = []
    for row in U:
        new_row = []
        for x in row:
            terms = {}
            for e, c in x.terms.items():
                ys = []
                for u in e:
                    y = Fraction(u * q, x.q)
                    if y.denominator != 1:
                        raise DepthOverflow(f"exponent {Fraction(u, x.q)} has depth above {k}")
                    ys.append(y.numerator)
                terms[tuple(ys)] = c.residue()
            new_row.append(FpPoly(p, nvars, terms))
        out.append(new_row)
    return out, ClearedMeta(p, k, nvars, r0.laurent, int(r0.window))


def restore_exponents(A, meta: ClearedMeta):
    """Inverse of :func:`clear_exponents` into the residue ring."""
    ring = RingSpec.residue(meta.p, meta.k, meta.nvars, meta.laurent,
                            max(meta.window, _needed_window(A, meta)))
    model = ring.model
    return [[TateSeries(model, meta.nvars, meta.k,
                        {e: model.from_int(c) for e, c in f.terms.items()},
                        ring.laurent, ring.window) for f in row] for row in A], ring


def _needed_window(A, meta: ClearedMeta) -> int:
    low = 0
    for row in A:
        for f in row:
            for e in f.terms:
                low = min(low, *e)
    q = meta.p ** meta.k
    return -((low) // q)


# --------------------------------------------------------------------------
# Column echelon form over F_p[Y] / F_p[Y^{+-1}]


def _poly_is_unit(f: FpPoly, laurent) -> bool:
    if len(f.terms) != 1:
        return False
    (e, _), = f.terms.items()
    return all(x == 0 or lau for x, lau in zip(e, laurent))


class _ColumnReducer:
    """Column operations on ``A`` tracking ``V`` and ``V^-1`` with ``A_orig V = A``."""

    def __init__(self, A, laurent):
        self.A = [list(row) for row in A]
        n = len(A[0])
        p, nv = A[0][0].p, A[0][0].nvars
        self.zero = FpPoly(p, nv)
        self.one = FpPoly.const(p, nv, 1)
        self.V = [[self.one if i == j else self.zero for j in range(n)] for i in range(n)]
        self.Vi = [[self.one if i == j else self.zero for j in range(n)] for i in range(n)]
        self.laurent = laurent

    def swap(self, a, b):
        if a == b:
            return
        for M in (self.A, self.V):
            for row in M:
                row[a], row[b] = row[b], row[a]
        self.Vi[a], self.Vi[b] = self.Vi[b], self.Vi[a]

    def addmul(self, a, b, c):
        """column a -= c * column b."""
        if c.is_zero():
            return
        for M in (self.A, self.V):
            for row in M:
                row[a] = row[a] - c * row[b]
        self.Vi[b] = [x + c * y for x, y in zip(self.Vi[b], self.Vi[a])]

    def scale(self, a, u):
        """column a *= u for a unit u."""
        ui = u.unit_inverse()
        for M in (self.A, self.V):
            for row in M:
                row[a] = row[a] * u
        self.Vi[a] = [x * ui for x in self.Vi[a]]


def _echelon(A, laurent, euclidean: bool):
    """Column echelon form; returns (reducer, rank) or (reducer, None) when stuck."""
    red = _ColumnReducer(A, laurent)
    nrows, ncols = len(A), len(A[0])
    pc = 0
    for i in range(nrows):
        if pc == ncols:
            break
        while True:
            live = [c for c in range(pc, ncols) if not red.A[i][c].is_zero()]
            if not live:
                break
            if euclidean:
                lau = laurent[0]
                best = min(live, key=lambda c: (red.A[i][c].norm(lau), c))
            else:
                units = [c for c in live if _poly_is_unit(red.A[i][c], laurent)]
                if not units:
                    if len(live) == 1 and live[0] == pc:
                        break
                    return red, None
                best = units[0]
            red.swap(pc, best)
            piv = red.A[i][pc]
            others = [c for c in range(pc + 1, ncols) if not red.A[i][c].is_zero()]
            if not others:
                break
            for c in others:
                if euclidean:
                    quo, _ = red.A[i][c].divmod(piv, laurent[0])
                else:
                    quo = red.A[i][c] * piv.unit_inverse()
                red.addmul(c, pc, quo)
        if pc < ncols and not red.A[i][pc].is_zero():
            piv = red.A[i][pc]
            if euclidean:
                lau = laurent[0]
                lead = piv.terms[(piv.degree(),)]
                if lau:
                    u = FpPoly(piv.p, 1, {(-piv.low_degree(),): pow(lead, -1, piv.p)})
                else:
                    u = FpPoly.const(piv.p, 1, pow(lead, -1, piv.p))
                red.scale(pc, u)
            pc += 1
    return red, pc


@dataclass
class FreeBasis:
    status: str
    B: list = field(repr=False)
    C: list = field(repr=False)
    rank: int
    verified: bool
    ring: RingSpec = None

    @property
    def free(self) -> bool:
        return self.status == "free"


def verify_basis(U, B, C) -> bool:
    """``U B = B``, ``B C = U`` and ``C B = I`` exactly."""
    r = len(B[0]) if B else 0
    if r == 0:
        return all(x.is_zero() for row in U for x in row)
    one, zero = U[0][0].one(), U[0][0].zero()
    ident = [[one if i == j else zero for j in range(r)] for i in range(r)]
    return mat_eq(mat_mul(U, B), B) and mat_eq(mat_mul(B, C), U) and mat_eq(mat_mul(C, B), ident)


def residue_free_basis(U) -> FreeBasis:
    """Free basis ``B`` of ``im U`` with certificate ``C`` over the residue ring.

    Univariate rings are handled completely by column echelon form.  In more
    variables only unit pivots are used; when that stalls the status is
    ``"unknown"`` and no basis is claimed.
    """
    r = _square(U)
    if not check_idempotent(U):
        raise NotIdempotent("U*U != U")
    A, meta = clear_exponents(U)
    euclidean = meta.nvars == 1
    red, rank = _echelon(A, meta.laurent, euclidean)
    if rank is None:
        return FreeBasis("unknown", [], [], 0, False)
    Bp = [row[:rank] for row in red.A]
    Cp = [row for row in red.Vi[:rank]]
    if rank == 0:
        ring = RingSpec.residue(meta.p, meta.k, meta.nvars, meta.laurent, meta.window)
        B = [[] for _ in range(r)]
        return FreeBasis("free", B, [], 0, verify_basis(U, B, []), ring)
    (B, C), ring = _restore_pair(Bp, Cp, meta)
    Uw = [[x.with_depth(meta.k).with_window(ring.window) for x in row] for row in U]
    return FreeBasis("free", B, C, rank, verify_basis(Uw, B, C), ring)


def _restore_pair(Bp, Cp, meta):
    low = max(meta.window, _needed_window(Bp, meta), _needed_window(Cp, meta))
    meta = ClearedMeta(meta.p, meta.k, meta.nvars, meta.laurent, low)
    B, ring = restore_exponents(Bp, meta)
    C, _ = restore_exponents(Cp, meta)
    return (B, C), ring


def left_inverse(B0):
    """A left inverse of a residue matrix (univariate), or ``None``."""
    Bt = [list(col) for col in zip(*B0)]
    if not Bt:
        return None
    A, meta = clear_exponents(Bt)
    if meta.nvars != 1:
        return None
    red, rank = _echelon(A, meta.laurent, True)
    s = len(Bt)
    if rank != s:
        return None
    H = [row[:s] for row in red.A]
    for i in range(s):
        if not _poly_is_unit(H[i][i], meta.laurent):
            return None
    # H lower triangular with unit diagonal: L^T = V[:, :s] H^-1
    Hinv = _lower_triangular_inverse(H, meta.laurent)
    Vs = [row[:s] for row in red.V]
    Lt = _poly_mat_mul(Vs, Hinv)
    L = [list(col) for col in zip(*Lt)]
    (Lr, _), _ = _restore_pair(L, L, meta)
    return Lr


def _poly_mat_mul(A, B):
    zero = A[0][0] * 0
    return [[sum((A[i][l] * B[l][j] for l in range(len(B))), zero) for j in range(len(B[0]))]
            for i in range(len(A))]


def _lower_triangular_inverse(H, laurent):
    s = len(H)
    zero = H[0][0] * 0
    X = [[zero] * s for _ in range(s)]
    for j in range(s):
        for i in range(j, s):
            acc = FpPoly.const(H[0][0].p, H[0][0].nvars, 1 if i == j else 0)
            for l in range(j, i):
                acc = acc - H[i][l] * X[l][j]
            X[i][j] = acc * H[i][i].unit_inverse()
    return X


# --------------------------------------------------------------------------
# Nakayama lifting


@dataclass
class LiftedBasis:
    B: list = field(repr=False)
    C: list = field(repr=False)
    rank: int
    verified: bool
    iterations: int


def nakayama_lift(U, B0, ring: RingSpec, C0=None) -> LiftedBasis:
    """Lift a residue basis ``B0`` of ``im(U mod t)`` to a basis of ``im U`` over ``A_d``.

    ``B = U * lift(B0)``.  With ``L`` a lift of a left inverse of ``B0``,
    ``M = L B`` is unipotent and its inverse is a finite Neumann series of at
    most ``d * p^k`` terms; the certificate is ``C = M^-1 L U``.
    """
    r = _square(U)
    if not check_idempotent(U):
        raise NotIdempotent("U*U != U")
    U0 = mat_map(ring.reduce, U)
    if not B0 or len(B0) != r:
        raise ResidueBasisInvalid("residue basis has the wrong shape")
    s = len(B0[0])
    B0w = [[x.with_window(ring.window) for x in row] for row in B0]
    if any(all(B0w[i][j].is_zero() for i in range(r)) for j in range(s)):
        raise ResidueBasisInvalid("residue basis has a zero column")
    if C0 is None:
        L0 = left_inverse(B0w)
        if L0 is None:
            raise ResidueBasisInvalid("residue basis has no left inverse")
        L0 = [[x.with_window(ring.window) for x in row] for row in L0]
        C0 = mat_mul(L0, U0)
    else:
        C0 = [[x.with_window(ring.window) for x in row] for row in C0]
    if not verify_basis(U0, B0w, C0):
        raise ResidueBasisInvalid("residue basis fails its certificate modulo t")
    L = mat_map(ring.lift, C0)
    B = mat_mul(U, mat_map(ring.lift, B0w))
    M = mat_mul(L, B)
    ident = identity(ring, s)
    Nil = [[ident[i][j] - M[i][j] for j in range(s)] for i in range(s)]
    # M^-1 = sum_j Nil^j, Nil^(d p^k) = 0
    Minv = ident
    power = ident
    iterations = 0
    for _ in range(ring.nilpotency):
        power = mat_mul(power, Nil)
        if all(x.is_zero() for row in power for x in row):
            break
        Minv = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(Minv, power)]
        iterations += 1
    C = mat_mul(mat_mul(Minv, L), U)
    return LiftedBasis(B, C, s, verify_basis(U, B, C), iterations)


# --------------------------------------------------------------------------
# Jacobson radical check


def is_ring_unit(f: TateSeries, ring: RingSpec) -> bool:
    """Units of ``A_d[X]`` are exactly lifts of residue units (``t`` is nilpotent)."""
    g = ring.reduce(f) if ring.kind == TRUNCATED else f
    if len(g.terms) != 1:
        return False
    (e, _), = g.terms.items()
    return all(x == 0 or lau for x, lau in zip(e, ring.laurent))


def jacobson_unit_check(f: TateSeries, ring: RingSpec, samples=(), seed: int = 0) -> bool:
    """True iff ``1 - f g`` is a unit for ``g`` in 1, each ``X_i^(1/p^k)``, and ``samples``."""
    gs = [ring.one()]
    step = Fraction(1, ring.p ** ring.k)
    for i in range(ring.nvars):
        e = [0] * ring.nvars
        e[i] = step
        gs.append(ring.element({tuple(e): 1}))
    gs.extend(samples)
    import random
    rng = random.Random(seed)
    for _ in range(3):
        gs.append(random_element(rng, ring))
    return all(is_ring_unit(ring.one() - f * g, ring) for g in gs)


# --------------------------------------------------------------------------
# Random idempotents from known factorizations


def random_element(rng, ring: RingSpec, nterms: int = 2, max_deg: int = 2,
                   with_t: bool = True) -> TateSeries:
    q = ring.p ** ring.k
    terms = {}
    for _ in range(nterms):
        e = tuple(Fraction(rng.randint(-max_deg * q if lau else 0, max_deg * q), q)
                  for lau in ring.laurent)
        c = rng.randrange(ring.p)
        if ring.kind == TRUNCATED and with_t and rng.random() < 0.5:
            tu = rng.randint(1, ring.nilpotency - 1) if ring.nilpotency > 1 else 0
            coeff = ring.model.s_power(tu, c)
        else:
            coeff = ring.model.from_int(c)
        terms[e] = terms[e] + coeff if e in terms else coeff
    return ring.element(terms)


def random_idempotent(rng, ring: RingSpec, r: int, rank: int, nops: int = 3):
    """``U = P D P^-1`` with ``P`` a product of elementary matrices and ``D = diag(1^rank, 0)``.

    Returns ``(U, P, Pinv)``; the factorization is the known answer.
    """
    P = identity(ring, r)
    Pinv = identity(ring, r)
    for _ in range(nops):
        a, b = rng.sample(range(r), 2)
        c = random_element(rng, ring)
        E = identity(ring, r)
        E[a][b] = c
        Ei = identity(ring, r)
        Ei[a][b] = -c
        P = mat_mul(P, E)
        Pinv = mat_mul(Ei, Pinv)
    D = [[ring.one() if i == j and i < rank else ring.zero() for j in range(r)] for i in range(r)]
    U = mat_mul(mat_mul(P, D), Pinv)
    return U, P, Pinv
