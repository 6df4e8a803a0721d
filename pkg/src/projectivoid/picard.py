"""Line bundles on projectivoid space through unit cocycles on the standard cover.

Residue-level units on ``U_i cap U_j`` are monomials ``lam * (T_i/T_j)^alpha``
and are stored in that classified form.  The cocycle convention is
``c_ij * c_jk = c_ik`` for ``i < j < k``, and a class of degree ``d`` with
witness ``mu`` has ``c_ij = (mu_i / mu_j) * (T_i/T_j)^d``.

The truncated-integral experiments work over ``A = F_p[t^(1/p^k)]/(t^L)`` with
sections on ``U_S`` given as degree-zero Laurent series in ``T_0..T_n`` whose
exponents are nonnegative off ``S``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cech import build_cech_complex, cohomology_dims
from .errors import DepthOverflow, LiftMismatch, NotACocycle, NotAUnit
from .field_arith import CHARP, MIXED, FieldModel, PAdicExp, p_depth, teichmuller
from .series import TateSeries


@dataclass(frozen=True)
class ResidueUnit:
    lam: int
    alpha: Fraction

    def __post_init__(self):
        if self.lam == 0:
            raise NotAUnit("scalar of a residue unit must be nonzero")
        object.__setattr__(self, "alpha", Fraction(self.alpha))


@dataclass(frozen=True)
class UnitCocycle:
    n: int
    p: int
    entries: dict
    level: str = "residue"

    def __post_init__(self):
        want = set(itertools.combinations(range(self.n + 1), 2))
        if set(self.entries) != want:
            raise NotACocycle("cocycle needs exactly one entry per pair i < j")
        clean = {}
        for key, u in self.entries.items():
            lam = u.lam % self.p
            if lam == 0:
                raise NotAUnit(f"entry {key} has zero scalar mod {self.p}")
            clean[key] = ResidueUnit(lam, u.alpha)
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, ij):
        i, j = ij
        if i < j:
            return self.entries[(i, j)]
        u = self.entries[(j, i)]
        return ResidueUnit(pow(u.lam, -1, self.p), -u.alpha)

    def __mul__(self, other: "UnitCocycle") -> "UnitCocycle":
        if (self.n, self.p) != (other.n, other.p):
            raise ValueError("cocycles on different covers")
        return UnitCocycle(self.n, self.p, {
            ij: ResidueUnit(u.lam * other.entries[ij].lam % self.p, u.alpha + other.entries[ij].alpha)
            for ij, u in self.entries.items()})


@dataclass(frozen=True)
class PicClass:
    degree: PAdicExp
    witness: tuple = None


def _monomial_vector(n: int, i: int, j: int, alpha: Fraction) -> list:
    v = [Fraction(0)] * (n + 1)
    v[i] += alpha
    v[j] -= alpha
    return v


def twisting_cocycle(n: int, d, p: int = 2) -> UnitCocycle:
    d = PAdicExp.parse(d, p).value
    return UnitCocycle(n, p, {ij: ResidueUnit(1, d) for ij in itertools.combinations(range(n + 1), 2)})


def coboundary(mu, p: int) -> UnitCocycle:
    """The cocycle ``mu_i / mu_j`` of nonzero scalars."""
    n = len(mu) - 1
    if any(m % p == 0 for m in mu):
        raise NotAUnit("coboundary scalars must be nonzero")
    return UnitCocycle(n, p, {(i, j): ResidueUnit(mu[i] * pow(mu[j], -1, p) % p, 0)
                              for i, j in itertools.combinations(range(n + 1), 2)})


def verify_cocycle(c: UnitCocycle) -> bool:
    """Exact triple-overlap check, comparing monomial vectors and scalars."""
    p = c.p
    for i, j, k in itertools.combinations(range(c.n + 1), 3):
        a, b, ac = c.entries[(i, j)], c.entries[(j, k)], c.entries[(i, k)]
        if a.lam * b.lam % p != ac.lam:
            return False
        lhs = [x + y for x, y in zip(_monomial_vector(c.n, i, j, a.alpha),
                                     _monomial_vector(c.n, j, k, b.alpha))]
        if lhs != _monomial_vector(c.n, i, k, ac.alpha):
            return False
    return True


def classify_residue_cocycle(c: UnitCocycle) -> PicClass:
    """Degree and normalized witness (``mu_0 = 1``) of a residue unit cocycle."""
    if not verify_cocycle(c):
        raise NotACocycle("triple products do not match")
    p = c.p
    d = c.entries[(0, 1)].alpha
    mu = [1] + [pow(c.entries[(0, j)].lam, -1, p) for j in range(1, c.n + 1)]
    for (i, j), u in c.entries.items():
        if u.alpha != d or mu[i] * pow(mu[j], -1, p) % p != u.lam:
            raise NotACocycle(f"entry {(i, j)} is inconsistent with the recovered class")
    return PicClass(PAdicExp.from_value(d, p), tuple(mu))


def same_up_to_scalar(mu, nu, p: int) -> bool:
    s = nu[0] * pow(mu[0], -1, p)
    return all(m * s % p == v % p for m, v in zip(mu, nu))


# --------------------------------------------------------------------------
# Raw units on overlaps


def unit_from_series(f: TateSeries, i: int, j: int) -> ResidueUnit:
    """Extract ``lam * (T_i/T_j)^alpha`` from a unit on ``U_i cap U_j``.

    ``f`` is a series in ``T_0..T_n``.  Only monomials supported on ``T_i, T_j``
    with opposite exponents are units there; anything else is rejected.
    """
    if len(f.terms) != 1:
        raise NotAUnit("only monomials are units on an overlap")
    (e, c), = f.terms.items()
    if c.val_units() != 0:
        raise NotAUnit("coefficient is not a unit")
    if any(x for l, x in enumerate(e) if l not in (i, j)) or e[i] != -e[j]:
        raise NotAUnit(f"monomial {f.exponent(e)} is not a power of T_{i}/T_{j}")
    return ResidueUnit(c.residue(), Fraction(e[i], f.q))


def unit_to_series(u: ResidueUnit, n: int, i: int, j: int, model: FieldModel, depth: int,
                   window=None) -> TateSeries:
    e = [Fraction(0)] * (n + 1)
    e[i], e[j] = u.alpha, -u.alpha
    if window is None:
        window = abs(u.alpha) + 1
    return TateSeries.from_exponents(model, {tuple(e): u.lam}, depth, n + 1,
                                     (True,) * (n + 1), window)


def cocycle_from_series(n: int, p: int, table: dict) -> UnitCocycle:
    return UnitCocycle(n, p, {ij: unit_from_series(f, *ij) for ij, f in table.items()})


# --------------------------------------------------------------------------
# Deformation check on A_{2d} -> A_d


@dataclass
class DeformationReport:
    dtilde: int
    kernel_h1: list
    kernel_h1_zero: bool
    lifts_matched: bool
    levels: int
    witness: dict = field(repr=False, default=None)


class _FaceAlgebra:
    """Degree-zero sections over ``F_p[t^(1/p^k)]/(t^L)`` on faces of the cover."""

    def __init__(self, n, p, k, L, depth, window):
        self.n = n
        self.model = FieldModel(CHARP, p, k, L)
        self.depth = depth
        self.window = window

    def series(self, terms) -> TateSeries:
        return TateSeries(self.model, self.n + 1, self.depth, terms, (True,) * (self.n + 1),
                          self.window)

    def one(self):
        return self.series({(0,) * (self.n + 1): self.model.one()})

    def check(self, f: TateSeries):
        if f.truncated:
            raise LiftMismatch("window exceeded during lift arithmetic", None)
        return f

    def inverse(self, f: TateSeries) -> TateSeries:
        """Inverse of a unit whose residue is a monomial (``t`` is nilpotent)."""
        lead = [(e, c) for e, c in f.terms.items() if c.val_units() == 0]
        if len(lead) != 1:
            raise NotAUnit("residue of the section is not a monomial")
        e, c = lead[0]
        cinv = c.inverse()
        m_inv = self.series({tuple(-x for x in e): cinv})
        x = self.check(m_inv * f) - self.one()
        out, power = self.one(), self.one()
        for _ in range(self.model.N):
            power = self.check(power * (-x))
            if power.is_zero():
                break
            out = out + power
        return self.check(out * m_inv)


def _random_face_unit(rng, alg: _FaceAlgebra, i: int, nterms: int = 2) -> TateSeries:
    """``1 + (terms of positive t-valuation)`` with monomials regular on ``U_i``."""
    q = alg.model.p ** alg.depth
    terms = {(0,) * (alg.n + 1): alg.model.one()}
    for _ in range(nterms):
        e = [0] * (alg.n + 1)
        for l in range(alg.n + 1):
            if l != i:
                e[l] = rng.randint(0, q)
        e[i] = -sum(e)
        tv = rng.randint(1, alg.model.N - 1)
        c = alg.model.s_power(tv, rng.randrange(1, alg.model.p))
        key = tuple(e)
        terms[key] = terms[key] + c if key in terms else c
    return alg.series(terms)


def _mult_coboundary(alg, g, n):
    return {(i, j): alg.check(g[i] * alg.inverse(g[j]))
            for i, j in itertools.combinations(range(n + 1), 2)}


def _additive_homotopy(h: dict, n: int, p: int):
    """Solve ``g_i - g_j = h_ij`` monomial by monomial on a degree-zero cocycle.

    ``h`` maps pairs to ``{exponent: digit}``.  Returns ``g`` (``{i: {...}}``) or
    raises :class:`LiftMismatch` carrying the offending monomial.
    """
    g = {i: {} for i in range(n + 1)}
    monos = set()
    for vals in h.values():
        monos.update(vals)
    for a in monos:
        coeff = {ij: vals.get(a, 0) for ij, vals in h.items()}
        if sum(a) != 0:
            raise LiftMismatch(f"non-homogeneous term {a}", {"monomial": a, "values": coeff})
        neg = [l for l, x in enumerate(a) if x < 0]
        for (i, j), v in coeff.items():
            if v % p and any(l not in (i, j) for l in neg):
                raise LiftMismatch(f"term {a} is not regular on U_{i}{j}",
                                   {"monomial": a, "values": coeff})
        if not neg:
            g[0][a] = 0
            for j in range(1, n + 1):
                g[j][a] = -coeff[(0, j)]
        elif len(neg) == 1:
            v = neg[0]
            if v < n:
                g[v][a] = coeff[(v, v + 1 if v + 1 <= n else v)]
            else:
                g[v][a] = -coeff[(0, v)]
        else:
            if any(v % p for v in coeff.values()):
                raise LiftMismatch(f"term {a} gives a nonzero class in degree zero",
                                   {"monomial": a, "values": coeff})
    # check the solution exactly
    for (i, j), vals in h.items():
        keys = set(vals) | set(g[i]) | set(g[j])
        for a in keys:
            if (g[i].get(a, 0) - g[j].get(a, 0) - vals.get(a, 0)) % p:
                lhs = g[i].get(a, 0) - g[j].get(a, 0)
                raise LiftMismatch(f"no additive primitive at {a} on {(i, j)}",
                                   {"monomial": a, "pair": (i, j), "delta_g": lhs,
                                    "h": vals.get(a, 0)})
    return g


def _canonical_lift(alg, c: UnitCocycle):
    out = {}
    for (i, j), u in c.entries.items():
        e = [0] * (c.n + 1)
        a = Fraction(u.alpha) * alg.model.p ** alg.depth
        if a.denominator != 1:
            raise DepthOverflow(f"degree {u.alpha} needs more depth")
        e[i], e[j] = int(a), -int(a)
        out[(i, j)] = alg.series({tuple(e): alg.model.from_int(u.lam)})
    return out


def match_lifts(alg: _FaceAlgebra, n: int, lift_a: dict, lift_b: dict):
    """Find ``G`` with ``lift_b = lift_a * delta(G)``, level by level in ``t``.

    Raises :class:`LiftMismatch` if the ratio is not a coboundary.
    """
    p = alg.model.p
    ratio = {ij: alg.check(lift_b[ij] * alg.inverse(lift_a[ij])) for ij in lift_a}
    # residue of the ratio must be the trivial class
    try:
        res = cocycle_from_series(n, p, {ij: _residue_series(alg, f) for ij, f in ratio.items()})
        cls = classify_residue_cocycle(res)
    except (NotAUnit, NotACocycle) as exc:
        raise LiftMismatch(f"lifts reduce to different residue cocycles: {exc}", None) from exc
    if cls.degree.value != 0:
        raise LiftMismatch("lifts reduce to different degrees", {"degree": str(cls.degree)})
    mu = cls.witness
    G = {i: alg.series({(0,) * (n + 1): alg.model.from_int(pow(mu[i], -1, p))}) for i in range(n + 1)}
    # absorb the scalar part: ratio * delta(G)^-1 is 1 mod t
    dG = _mult_coboundary(alg, G, n)
    ratio = {ij: alg.check(ratio[ij] * alg.inverse(dG[ij])) for ij in ratio}
    one = alg.one()
    levels = 0
    for level in range(1, alg.model.N):
        h = {}
        for ij, f in ratio.items():
            diff = f - one
            vals = {}
            for e, c in diff.terms.items():
                v = c.val_units()
                if v < level:
                    raise LiftMismatch("ratio is not 1 modulo the current level",
                                       {"pair": ij, "level": level})
                if v == level:
                    vals[e] = c.leading()[0]
            if vals:
                h[ij] = vals
        if not h:
            continue
        levels += 1
        h = {ij: h.get(ij, {}) for ij in ratio}
        g = _additive_homotopy(h, n, p)
        step = {i: alg.one() + alg.series({a: alg.model.s_power(level, v)
                                            for a, v in gi.items() if v % p})
                for i, gi in g.items()}
        G = {i: alg.check(G[i] * step[i]) for i in G}
        ds = _mult_coboundary(alg, step, n)
        ratio = {ij: alg.check(ratio[ij] * alg.inverse(ds[ij])) for ij in ratio}
    for ij, f in ratio.items():
        if not (f - one).is_zero():
            raise LiftMismatch("ratio did not reduce to 1", {"pair": ij})
    dG = _mult_coboundary(alg, G, n)
    for ij in lift_a:
        if not (alg.check(lift_a[ij] * dG[ij]) - lift_b[ij]).is_zero():
            raise LiftMismatch("recomputed coboundary does not match", {"pair": ij})
    return G, levels


def _residue_series(alg, f):
    terms = {}
    for e, c in f.terms.items():
        r = c.residue()
        if r:
            terms[e] = alg.model.from_int(r)
    return alg.series(terms)


def make_lifts(c: UnitCocycle, dtilde: int, k: int = 0, seed: int = 0, window: int = 64):
    """Two independent lifts of ``c`` to ``A_(2 dtilde)``.

    ``lift_a = canon * delta(u)`` and ``lift_b = canon * delta(u') * (1 + t^dtilde z)``
    with random units ``u, u'`` that are 1 modulo ``t^(1/p^k)`` and a random
    additive degree-zero cocycle ``z``.
    """
    rng = random.Random(seed)
    depth = max(k, max(p_depth(u.alpha, c.p) for u in c.entries.values()))
    alg = _FaceAlgebra(c.n, c.p, k, 2 * dtilde, depth, window)
    canon = _canonical_lift(alg, c)
    ua = {i: _random_face_unit(rng, alg, i) for i in range(c.n + 1)}
    ub = {i: _random_face_unit(rng, alg, i) for i in range(c.n + 1)}
    da, db = _mult_coboundary(alg, ua, c.n), _mult_coboundary(alg, ub, c.n)
    y = {i: _random_face_unit(rng, alg, i) - alg.one() for i in range(c.n + 1)}
    tq = alg.model.s_power(dtilde * alg.model.q)
    lift_a, lift_b = {}, {}
    for (i, j) in canon:
        z = y[i] - y[j]
        kern = alg.check(alg.one() + z.scale(tq))
        lift_a[(i, j)] = alg.check(canon[(i, j)] * da[(i, j)])
        lift_b[(i, j)] = alg.check(alg.check(canon[(i, j)] * db[(i, j)]) * kern)
    return alg, lift_a, lift_b


def sabotage(alg: _FaceAlgebra, lifts: dict, n: int) -> dict:
    """Mutate one entry by a term that is not a coboundary in degree zero."""
    out = dict(lifts)
    e = [0] * (n + 1)
    e[0], e[1] = -1 * alg.model.p ** alg.depth, -1 * alg.model.p ** alg.depth
    bad = alg.series({tuple(e): alg.model.s_power(1)})
    out[(0, 1)] = alg.check(out[(0, 1)] * (alg.one() + bad))
    return out


def deformation_check(dtilde: int, c: UnitCocycle, k: int = 0, seed: int = 0,
                      lifts=None, window: int = 64) -> DeformationReport:
    """Kernel-H^1 vanishing and explicit matching of two lifts to ``A_(2 dtilde)``."""
    if dtilde < 1:
        raise ValueError("truncation level must be positive")
    if not verify_cocycle(c):
        raise NotACocycle("input is not a residue cocycle")
    cx = build_cech_complex(c.n, 0, k, 1, coeff=dtilde, p=c.p)
    h = cohomology_dims(cx)
    kernel_zero = all(x == 0 for x in h[1:])
    if lifts is None:
        alg, lift_a, lift_b = make_lifts(c, dtilde, k, seed, window)
    else:
        alg, lift_a, lift_b = lifts
    G, levels = match_lifts(alg, c.n, lift_a, lift_b)
    return DeformationReport(dtilde, h, kernel_zero, True, levels, G)


# --------------------------------------------------------------------------
# theta on twisting classes


def _frobenius_root(f: TateSeries, depth: int) -> TateSeries:
    """Exact p-th root of a charp series: coefficients and exponents."""
    p = f.model.p
    if all(x % p == 0 for e in f.terms for x in e):
        g = f
    elif f.depth + 1 > depth:
        raise DepthOverflow(f"p-th root needs exponent depth {f.depth + 1} > {depth}")
    else:
        g = f.with_depth(f.depth + 1)
    terms = {tuple(x // p for x in e): c.pth_root() for e, c in g.terms.items()}
    return TateSeries(f.model, f.nvars, g.depth, terms, f.laurent, f.window, f.prec)


def sharp_monomial_series(f: TateSeries, target: FieldModel) -> TateSeries:
    """Apply sharp coefficientwise (``T -> T``, ``[c] t^e -> [c] pi^e``)."""
    terms = {}
    for e, c in f.terms.items():
        if not c.is_monomial():
            raise NotAUnit("sharp is only multiplicative on monomial coefficients")
        dig, v = c.leading()
        terms[e] = target.s_power(v, dig) if target.kind == MIXED else target.s_power(v, dig)
    return TateSeries(target, f.nvars, f.depth, terms, f.laurent, f.window)


def theta_on_twisting(n: int, d, N: int, p: int = 2, k: int | None = None,
                      target_kind: str = MIXED) -> list:
    """The inverse system ``(O(d), O(d/p), ..., O(d/p^(N-1)))`` via sharp.

    The tilt-side twisting cocycle has entries ``(T_i/T_j)^d``; level ``l`` takes
    its ``p^l``-th Frobenius root, applies sharp and classifies on the residue
    level.  ``k`` bounds the exponent depth (default: just enough).
    """
    d = PAdicExp.parse(d, p)
    need = d.depth + N - 1 if d.numerator else 0
    if k is None:
        k = need
    # room for N - 1 Frobenius roots, each dividing the precision by p
    tilt_model = FieldModel(CHARP, p, k, p ** N)
    target = FieldModel(target_kind, p, k, 1)
    base = twisting_cocycle(n, d, p)
    level0 = {ij: unit_to_series(u, n, ij[0], ij[1], tilt_model, max(d.depth, 0))
              for ij, u in base.entries.items()}
    if d.depth > k:
        raise DepthOverflow(f"degree {d} needs depth {d.depth} > {k}")
    out = []
    current = level0
    for level in range(N):
        if level:
            current = {ij: _frobenius_root(f, k) for ij, f in current.items()}
        sharpened = {ij: sharp_monomial_series(f, target) for ij, f in current.items()}
        cls = classify_residue_cocycle(cocycle_from_series(n, p, sharpened))
        out.append(cls)
    for a, b in zip(out, out[1:]):
        if b.degree * p != a.degree:
            raise AssertionError("theta tower is not p-compatible")
    return out
