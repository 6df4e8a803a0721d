"""Maps from projectivoid space ``P^m`` to ``P^n`` described by towers of sections.

A datum has, for each level ``i < N``, sections ``s_0^(i), ..., s_n^(i)`` of the
twisting class of degree ``d_0 / p^i`` (homogeneous series in ``T_0..T_m``),
and scalars ``lam_i`` with ``lam_i * (s_j^(i+1))^p = s_j^(i)``.  The map sends
``(X_r/X_j)^(1/p^i)`` to the formal quotient ``s_r^(i) / s_j^(i)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DepthOverflow,
    NotAUnit,
    NotGenerating,
    NotSharpLiftable,
    ShapeMismatch,
    TowerInvalid,
)
from .field_arith import CHARP, MIXED, FieldElem, FieldModel, PAdicExp
from .linalg import solve_mod_p
from .picard import PicClass, ResidueUnit, UnitCocycle, classify_residue_cocycle
from .polys import FpPoly
from .series import TateSeries, evaluate, normalize

GENERATES = "Generates"
COMMON_ZERO = "CommonZero"
UNKNOWN = "Unknown"


@dataclass
class LnDatum:
    m: int
    n: int
    N: int
    d0: Fraction
    sections: list
    lambdas: list = None

    def __post_init__(self):
        self.d0 = Fraction(self.d0)
        if self.N < 1 or len(self.sections) != self.N:
            raise ShapeMismatch("one list of sections per level")
        if any(len(level) != self.n + 1 for level in self.sections):
            raise ShapeMismatch(f"each level needs {self.n + 1} sections")
        first = self.sections[0][0]
        depth = max(s.depth for level in self.sections for s in level)
        for level in self.sections:
            for s in level:
                if s.nvars != self.m + 1 or s.model != first.model or not s.is_disk():
                    raise ShapeMismatch("sections must be disk series in T_0..T_m over one model")
        self.sections = [[s.with_depth(depth) for s in level] for level in self.sections]
        if self.lambdas is None:
            self.lambdas = [first.model.one() for _ in range(self.N - 1)]
        self.lambdas = [x if isinstance(x, FieldElem) else first.model.from_int(x)
                        for x in self.lambdas]
        if len(self.lambdas) != self.N - 1:
            raise ShapeMismatch("one compatibility scalar between consecutive levels")

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def model(self) -> FieldModel:
        return self.sections[0][0].model

    @property
    def depth(self) -> int:
        return self.sections[0][0].depth

    def degree(self, i: int) -> Fraction:
        return self.d0 / self.p ** i


def _check_homogeneous(D: LnDatum):
    for i, level in enumerate(D.sections):
        for j, s in enumerate(level):
            degs = s.total_degrees()
            if degs and degs != {D.degree(i)}:
                raise ShapeMismatch(f"section s_{j}^({i}) is not homogeneous of degree {D.degree(i)}")


def tower_discrepancies(D: LnDatum) -> list:
    """``(i, j, lam_i * (s_j^(i+1))^p - s_j^(i))`` for every nonzero discrepancy."""
    _check_homogeneous(D)
    out = []
    for i in range(D.N - 1):
        for j in range(D.n + 1):
            diff = (D.sections[i + 1][j] ** D.p).scale(D.lambdas[i]) - D.sections[i][j]
            if not diff.is_zero():
                out.append((i, j, diff))
    return out


def check_tower(D: LnDatum) -> bool:
    return not tower_discrepancies(D)


def coordinate_datum(n: int, N: int, model: FieldModel, depth: int | None = None) -> LnDatum:
    """``s_j^(i) = T_j^(1/p^i)`` on ``P^n``."""
    depth = N - 1 if depth is None else depth
    p = model.p
    secs = []
    for i in range(N):
        level = []
        for j in range(n + 1):
            e = [Fraction(0)] * (n + 1)
            e[j] = Fraction(1, p ** i)
            level.append(TateSeries.from_exponents(model, {tuple(e): 1}, depth, n + 1))
        secs.append(level)
    return LnDatum(n, n, N, 1, secs)


def veronese_datum(N: int, model: FieldModel) -> LnDatum:
    """``m = 1, n = 2, d_0 = 2``: ``(T_0^2, T_0 T_1, T_1^2)`` with its root tower."""
    p = model.p
    secs = []
    for i in range(N):
        r = Fraction(1, p ** i)
        exps = [(2 * r, 0), (r, r), (0, 2 * r)]
        secs.append([TateSeries.from_exponents(model, {e: 1}, N - 1, 2) for e in exps])
    return LnDatum(1, 2, N, 2, secs)


# --------------------------------------------------------------------------
# Generation


@dataclass
class GenerationResult:
    status: str
    point: tuple = None
    certificate: dict = field(default=None, repr=False)


def _cleared_residue_polys(sections):
    """Residue images in ``F_p[Y]`` (``Y_i = T_i^(1/p^depth)``) of the normalized sections.

    Each nonzero section is first scaled to Gauss norm one; a global scalar on a
    section does not move its zero locus.  Also reports whether every
    normalized section is defined over the residue field, which is what makes
    a residue-level common zero a genuine one.
    """
    out = []
    exact = True
    for s in sections:
        if not s.is_zero():
            _, s = normalize(s)
        terms = {}
        for e, c in s.terms.items():
            r = c.residue()
            if r:
                terms[e] = r
            if not _is_residue_digit(c):
                exact = False
        if len(s.terms) > 1 and s.model.kind == MIXED:
            # Teichmueller lifts are not additive: only monomials are exact
            exact = False
        out.append(FpPoly(s.model.p, s.nvars, terms))
    return out, exact


def _is_residue_digit(c: FieldElem) -> bool:
    return c.is_monomial() and c.val_units() == 0


def _monomials(nvars: int, deg: int):
    if nvars == 1:
        return [(deg,)]
    out = []
    for a in range(deg, -1, -1):
        out.extend((a,) + rest for rest in _monomials(nvars - 1, deg - a))
    return out


def _power_certificate(polys, D: int, nvars: int, p: int, max_extra: int):
    """For each variable find ``Y_v^(D+e)`` in the degree-``D+e`` part of the ideal."""
    cert = {}
    for v in range(nvars):
        found = None
        for e in range(max_extra + 1):
            monos = _monomials(nvars, D + e)
            idx = {mo: i for i, mo in enumerate(monos)}
            cols, labels = [], []
            for r, f in enumerate(polys):
                for mult in _monomials(nvars, e):
                    col = {}
                    for ex, c in f.terms.items():
                        key = tuple(a + b for a, b in zip(ex, mult))
                        col[idx[key]] = (col.get(idx[key], 0) + c) % p
                    cols.append(col)
                    labels.append((r, mult))
            target = [0] * nvars
            target[v] = D + e
            sol = solve_mod_p(cols, {idx[tuple(target)]: 1}, p)
            if sol is not None:
                found = {"degree": D + e, "combination": [(labels[c], x) for c, x in sorted(sol.items())]}
                break
        if found is None:
            return None
        cert[v] = found
    return cert


class _GF:
    """``F_p[z]/(f)`` with ``f`` monic irreducible; elements are coefficient tuples."""

    def __init__(self, p: int, e: int):
        self.p, self.e = p, e
        self.f = _irreducible(p, e)

    def elements(self):
        return list(itertools.product(range(self.p), repeat=self.e))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def mul(self, a, b):
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for deg in range(2 * e - 2, e - 1, -1):
            c = prod[deg]
            if c:
                for i, fc in enumerate(self.f[:e]):
                    prod[deg - e + i] = (prod[deg - e + i] - c * fc) % p
                prod[deg] = 0
        return tuple(prod[:e])

    def pow(self, a, n):
        out = self.one
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    @property
    def zero(self):
        return (0,) * self.e

    @property
    def one(self):
        return (1,) + (0,) * (self.e - 1)

    def const(self, c):
        return (c % self.p,) + (0,) * (self.e - 1)


def _irreducible(p: int, e: int) -> tuple:
    """Lexicographically first monic irreducible of degree ``e`` (coefficients low to high)."""
    if e == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=e):
        f = FpPoly(p, 1, {(i,): c for i, c in enumerate(low)}) + FpPoly.mono(p, 1, (e,))
        if low[0] == 0:
            continue
        if all(not _divides(g, f) for d in range(1, e // 2 + 1) for g in _monic_polys(p, d)):
            return tuple(low) + (1,)
    raise ValueError("no irreducible polynomial found")


def _monic_polys(p, d):
    for low in itertools.product(range(p), repeat=d):
        yield FpPoly(p, 1, {(i,): c for i, c in enumerate(low)}) + FpPoly.mono(p, 1, (d,))


def _divides(g, f) -> bool:
    _, r = f.divmod(g, False)
    return r.is_zero()


def _eval_poly(F: _GF, f: FpPoly, point):
    total = F.zero
    for e, c in f.terms.items():
        term = F.const(c)
        for x, a in zip(point, e):
            if a:
                term = F.mul(term, F.pow(x, a))
        total = F.add(total, term)
    return total


def _projective_points(F: _GF, nvars: int):
    elems = F.elements()
    for lead in range(nvars):
        for rest in itertools.product(elems, repeat=nvars - lead - 1):
            yield (F.zero,) * lead + (F.one,) + rest


def check_generation(sections, search_bound: int = 2, cert_degree: int | None = None) -> GenerationResult:
    """Sound but incomplete test that level-0 sections have no common zero.

    ``Generates`` comes with a certificate expressing a power of every variable
    through the sections; ``CommonZero`` with a point over ``F_(p^e)``,
    ``e <= search_bound``; otherwise ``Unknown``.  A residue-level common zero
    is only reported as ``CommonZero`` when the normalized sections are
    defined over the residue field; otherwise it proves nothing.
    """
    polys, exact = _cleared_residue_polys(sections)
    p, nvars = sections[0].model.p, sections[0].nvars
    degs = {sum(e) for f in polys for e in f.terms}
    if len(degs) > 1:
        raise ShapeMismatch("sections must be homogeneous of one degree")
    if not degs:
        return GenerationResult(COMMON_ZERO, tuple((1,) for _ in range(nvars)))
    D = degs.pop()
    if cert_degree is None:
        cert_degree = search_bound
    cert = _power_certificate(polys, D, nvars, p, cert_degree)
    if cert is not None:
        return GenerationResult(GENERATES, None, cert)
    for e in range(1, search_bound + 1):
        F = _GF(p, e)
        for pt in _projective_points(F, nvars):
            if all(_eval_poly(F, f, pt) == F.zero for f in polys):
                if not exact:
                    return GenerationResult(UNKNOWN)
                return GenerationResult(COMMON_ZERO, _frobenius_point(F, pt, sections[0].depth))
    return GenerationResult(UNKNOWN)


def _frobenius_point(F: _GF, pt, depth: int):
    """Point in ``T``-coordinates: ``T_i = Y_i^(p^depth)``."""
    return tuple(F.pow(x, F.p ** depth) for x in pt)


# --------------------------------------------------------------------------
# Maps


@dataclass
class SectionQuotient:
    num: TateSeries
    den: TateSeries
    level: int
    simplified: TateSeries = None


@dataclass
class ProjectivoidMap:
    datum: LnDatum
    tables: dict
    checks: dict
    generation: GenerationResult

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


def _simplify(num: TateSeries, den: TateSeries, window):
    """``num / den`` as a Laurent series when ``den`` is a monomial, else ``None``."""
    if len(den.terms) != 1:
        return None
    (e, c), = den.terms.items()
    try:
        cinv = c.inverse()
    except Exception:
        return None
    lau = (True,) * num.nvars
    terms = {tuple(a - b for a, b in zip(ex, e)): x * cinv for ex, x in num.terms.items()}
    return TateSeries(num.model, num.nvars, num.depth, terms, lau, window)


def build_map(D: LnDatum, search_bound: int = 1) -> ProjectivoidMap:
    if not check_tower(D):
        raise TowerInvalid("sections do not form a p-power tower")
    gen = check_generation(D.sections[0], search_bound)
    if gen.status == COMMON_ZERO:
        raise NotGenerating(f"sections have a common zero at {gen.point}")
    window = 2 * (abs(D.d0) + 1)
    tables = {}
    for j in range(D.n + 1):
        for i in range(D.N):
            for r in range(D.n + 1):
                num, den = D.sections[i][r], D.sections[i][j]
                tables[(j, i, r)] = SectionQuotient(num, den, i, _simplify(num, den, window))
    checks = {"gluing": _check_gluing(D, tables), "p_power": _check_p_power(D, tables),
              "triple": _check_triple(D, tables)}
    return ProjectivoidMap(D, tables, checks, gen)


def _check_gluing(D, tables) -> bool:
    """``gamma_j((T_k/T_j)^(1/p^i)) * gamma_k((T_j/T_k)^(1/p^i)) = 1`` by cross-multiplication."""
    for i in range(D.N):
        for j, k in itertools.combinations(range(D.n + 1), 2):
            a, b = tables[(j, i, k)], tables[(k, i, j)]
            if not (a.num * b.num - a.den * b.den).is_zero():
                return False
    return True


def _check_p_power(D, tables) -> bool:
    """``(s_r^(i+1)/s_j^(i+1))^p = s_r^(i)/s_j^(i)``; the scalars cancel."""
    p = D.p
    for (j, i, r), a in tables.items():
        if i + 1 >= D.N:
            continue
        b = tables[(j, i + 1, r)]
        if not ((b.num ** p) * a.den - (b.den ** p) * a.num).is_zero():
            return False
    return True


def _check_triple(D, tables) -> bool:
    """``gamma_j(T_k/T_j) = gamma_j(T_l/T_j) * gamma_l(T_k/T_l)``."""
    for i in range(D.N):
        for j, k, l in itertools.permutations(range(D.n + 1), 3):
            a, b, c = tables[(j, i, k)], tables[(j, i, l)], tables[(l, i, k)]
            if not (a.num * b.den * c.den - b.num * c.num * a.den).is_zero():
                return False
    return True


def in_chart(M: ProjectivoidMap, j: int, x) -> bool:
    """Whether ``x`` lies in the distinguished open where ``s_j`` generates.

    ``x`` is a tuple of tilt sequences (one per source coordinate); the test is
    ``s_j(x) != 0`` and ``|s_r(x)| <= |s_j(x)|`` for all ``r``.
    """
    level = M.datum.sections[0]
    vj = evaluate(level[j], x).val_units()
    if vj is None:
        return False
    for s in level:
        v = evaluate(s, x).val_units()
        if v is not None and v < vj:
            return False
    return True


# --------------------------------------------------------------------------
# Pullback of twisting classes


def _monomial_quotient(num: TateSeries, den: TateSeries):
    """``(coefficient, exponent units)`` with ``num = c * T^e * den``, or ``NotAUnit``."""
    if den.is_zero() or num.is_zero():
        raise NotAUnit("zero section in a quotient")
    en, cn = max(num.terms.items())
    ed, cd = max(den.terms.items())
    c = cn * cd.inverse()
    e = tuple(a - b for a, b in zip(en, ed))
    lau = (True,) * num.nvars
    window = max([abs(x) for x in e] + [0]) / num.q + 1
    shifted = TateSeries(num.model, num.nvars, num.depth,
                         {tuple(a + b for a, b in zip(ex, e)): x * c for ex, x in den.terms.items()},
                         lau, window + max([-min(ex) for ex in den.terms] + [0]) / num.q)
    target = TateSeries(num.model, num.nvars, num.depth, num.terms, lau, shifted.window)
    if not (target - shifted).is_zero():
        raise NotAUnit("quotient is not a monomial")
    return c, e


def _monomial_power(T_index: int, units: int, like: TateSeries) -> TateSeries:
    e = [0] * like.nvars
    e[T_index] = units
    return TateSeries(like.model, like.nvars, like.depth, {tuple(e): like.model.one()})


def pullback_class(M: ProjectivoidMap, d) -> PicClass:
    """Class of the pullback of ``O(d)`` on the source ``P^m``.

    With ``d = a / p^i``, the target transition ``(X_r/X_s)^d`` pulls back to
    ``(s_r^(i)/s_s^(i))^a``.  On source chart ``U_l`` the frame is compared
    with ``T_l^(a d_i)`` through a target chart chosen for ``l``; the resulting
    standard-cover cocycle is read off by monomial extraction and classified.
    """
    D = M.datum
    d = PAdicExp.parse(d, D.p)
    i = d.depth
    if i >= D.N:
        raise DepthOverflow(f"degree {d} needs tower level {i} >= N = {D.N}")
    a = d.numerator
    sign = 1 if a >= 0 else -1
    a = abs(a)
    level = D.sections[i]
    nonzero = [r for r, s in enumerate(level) if not s.is_zero()]
    if not nonzero:
        raise NotAUnit("all sections vanish")
    chart = {l: nonzero[(l + 1) % len(nonzero)] for l in range(D.m + 1)}
    e_units = a * D.degree(i) * level[0].q
    if e_units.denominator != 1:
        raise DepthOverflow("pulled-back degree needs more exponent depth")
    e_units = int(e_units)
    entries = {}
    for l, k in itertools.combinations(range(D.m + 1), 2):
        # frames h_l = T_l^e / s_{a(l)}^a; cocycle h_l * g_{a(l) a(k)} * h_k^-1 where
        # g is the pulled-back target transition read from the table of chart a(k)
        g = M.tables[(chart[k], i, chart[l])]
        num = _monomial_power(l, e_units, level[0]) * g.num ** a * level[chart[k]] ** a
        den = level[chart[l]] ** a * g.den ** a * _monomial_power(k, e_units, level[0])
        c, e = _monomial_quotient(num, den)
        lam = c.residue()
        if lam == 0 or any(x for t, x in enumerate(e) if t not in (l, k)) or e[l] != -e[k]:
            raise NotAUnit(f"pulled-back transition on U_{l}{k} is not a unit monomial")
        alpha = Fraction(e[l], level[0].q)
        if sign < 0:
            lam, alpha = pow(lam, -1, D.p), -alpha
        entries[(l, k)] = ResidueUnit(lam, alpha)
    if D.m == 0:
        return PicClass(PAdicExp(0, 0, D.p), (1,))
    return classify_residue_cocycle(UnitCocycle(D.m, D.p, entries))


# --------------------------------------------------------------------------
# Tilting map data


def _coeff_root(c: FieldElem) -> FieldElem:
    return c.pth_root()


def _series_root(f: TateSeries, depth: int) -> TateSeries:
    p = f.model.p
    if f.depth + 1 > depth and any(x % p for e in f.terms for x in e):
        raise DepthOverflow("p-th root of the sections needs more exponent depth")
    g = f if all(x % p == 0 for e in f.terms for x in e) else f.with_depth(f.depth + 1)
    terms = {tuple(x // p for x in e): _coeff_root(c) for e, c in g.terms.items()}
    out = TateSeries(f.model, f.nvars, g.depth, terms, f.laurent, f.window, f.prec)
    return out.with_depth(depth) if out.depth < depth else out


def _sharp_coeff(c: FieldElem, target: FieldModel) -> FieldElem:
    if not c.is_monomial():
        raise NotSharpLiftable(f"coefficient {c!r} is not a monomial digit")
    digit, v = c.leading()
    return target.s_power(v, digit).truncate(c.prec)


def _flat_coeff(c: FieldElem, target: FieldModel) -> FieldElem:
    """Inverse of sharp on monomial digits: ``[c] pi^e -> c t^e``."""
    if not c.is_monomial():
        raise NotSharpLiftable(f"coefficient {c!r} is not a Teichmueller monomial")
    digit, v = c.leading()
    return target.s_power(v, digit).truncate(c.prec)


def _map_coeffs(f: TateSeries, fn, target: FieldModel) -> TateSeries:
    return TateSeries(target, f.nvars, f.depth, {e: fn(c, target) for e, c in f.terms.items()},
                      f.laurent, f.window)


def tilt_datum(D: LnDatum, N: int, target: FieldModel | None = None) -> LnDatum:
    """Expand a single-level charp datum into its tower of Frobenius roots.

    With a mixed ``target`` every level is then sent through sharp
    coefficientwise, which needs monomial sections with monomial coefficients.
    """
    if D.model.kind != CHARP:
        raise ValueError("tilt_datum expects a charp datum")
    depth = max(D.depth, D.depth + N - 1)
    levels = [[s.with_depth(depth) for s in D.sections[0]]]
    for _ in range(N - 1):
        levels.append([_series_root(s, depth) for s in levels[-1]])
    if target is not None and target.kind == MIXED:
        if any(len(s.terms) > 1 for level in levels for s in level):
            raise NotSharpLiftable("sharp is additive only on monomial sections")
        levels = [[_map_coeffs(s, _sharp_coeff, target) for s in level] for level in levels]
    out = LnDatum(D.m, D.n, N, D.d0, levels)
    if not check_tower(out):
        raise TowerInvalid("tilted tower fails the p-power check")
    return out


def untilt_datum(T: LnDatum, target: FieldModel | None = None) -> LnDatum:
    """Single-level charp datum of a tower; mixed towers go back through sharp^-1."""
    if T.model.kind == MIXED:
        if target is None:
            target = FieldModel(CHARP, T.p, T.model.k, T.model.m)
        if any(len(s.terms) > 1 for level in T.sections for s in level):
            raise NotSharpLiftable("mixed-characteristic sections must be monomials")
        if any(not lam.is_monomial() or lam.val_units() != 0 for lam in T.lambdas):
            raise NotSharpLiftable("compatibility scalars must be Teichmueller units")
        levels = [[_map_coeffs(s, _flat_coeff, target) for s in level] for level in T.sections]
    else:
        levels = T.sections
    if not check_tower(T):
        raise TowerInvalid("input tower fails the p-power check")
    base = LnDatum(T.m, T.n, 1, T.d0, [levels[0]])
    # every level must be the Frobenius root of the previous one
    depth = T.depth
    cur = [s.with_depth(depth) for s in levels[0]]
    for i in range(1, T.N):
        cur = [_series_root(s, depth) for s in cur]
        if any(not (a - b).is_zero() for a, b in zip(cur, levels[i])):
            raise NotSharpLiftable(f"level {i} is not the Frobenius root of level {i - 1}")
    return base


def data_equal(A: LnDatum, B: LnDatum) -> bool:
    if (A.m, A.n, A.N, A.d0, A.model) != (B.m, B.n, B.N, B.d0, B.model):
        return False
    depth = max(A.depth, B.depth)
    for la, lb in zip(A.sections, B.sections):
        for a, b in zip(la, lb):
            if not (a.with_depth(depth) - b.with_depth(depth)).is_zero():
                return False
    return True
