"""Sparse exact linear algebra over F_p and over finite chain rings.

Matrices are column lists of sparse dicts ``{row: value}``; that is how the
Cech and Koszul differentials are assembled.
"""
from __future__ import annotations

from .field_arith import FieldElem, FieldModel


def rank_mod_p(columns, p: int) -> int:
    """Rank of a sparse matrix over F_p given as a list of ``{row: value}`` columns."""
    pivots: dict = {}
    rank = 0
    for col in columns:
        v = {r: x % p for r, x in col.items() if x % p}
        while v:
            r = max(v)
            if r not in pivots:
                inv = pow(v[r], -1, p)
                pivots[r] = {k: x * inv % p for k, x in v.items()}
                rank += 1
                break
            piv = pivots[r]
            c = v[r]
            for k, x in piv.items():
                y = (v.get(k, 0) - c * x) % p
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
    return rank


def solve_mod_p(columns, target: dict, p: int):
    """Solve ``A x = target`` over F_p; return ``{column: value}`` or ``None``."""
    pivots: dict = {}
    for j, col in enumerate(columns):
        v = {r: x % p for r, x in col.items() if x % p}
        combo = {j: 1}
        while v:
            r = max(v)
            if r not in pivots:
                inv = pow(v[r], -1, p)
                pivots[r] = ({k: x * inv % p for k, x in v.items()},
                             {k: x * inv % p for k, x in combo.items()})
                break
            pv, pc = pivots[r]
            c = v[r]
            for k, x in pv.items():
                y = (v.get(k, 0) - c * x) % p
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
            for k, x in pc.items():
                y = (combo.get(k, 0) - c * x) % p
                if y:
                    combo[k] = y
                else:
                    combo.pop(k, None)
    v = {r: x % p for r, x in target.items() if x % p}
    sol: dict = {}
    while v:
        r = max(v)
        if r not in pivots:
            return None
        pv, pc = pivots[r]
        c = v[r]
        for k, x in pv.items():
            y = (v.get(k, 0) - c * x) % p
            if y:
                v[k] = y
            else:
                v.pop(k, None)
        for k, x in pc.items():
            sol[k] = (sol.get(k, 0) + c * x) % p
    return {k: x for k, x in sol.items() if x}


def chain_ring_image_length(columns, model: FieldModel) -> int:
    """Composition length of the image of a matrix over a finite chain ring.

    The ring is ``F_p[s]/(s^L)`` realized as integral charp elements of
    ``model`` (``L = model.N``).  Entries may be ints or :class:`FieldElem`.
    Full pivoting on minimal valuation gives the diagonal normal form
    ``diag(s^e_i)``; the image has length ``sum(L - e_i)``.
    """
    L = model.N
    rows: dict = {}
    for j, col in enumerate(columns):
        for r, x in col.items():
            if not isinstance(x, FieldElem):
                x = model.from_int(x)
            if not x.is_zero():
                rows.setdefault(r, {})[j] = x
    length = 0
    while rows:
        best = None
        for r, row in rows.items():
            for j, x in row.items():
                v = x.val_units()
                if best is None or v < best[0]:
                    best = (v, r, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        e, pr, pj = best
        length += L - e
        prow = rows.pop(pr)
        pinv = prow[pj].shift(-e).inverse()
        for r in list(rows):
            row = rows[r]
            y = row.get(pj)
            if y is None:
                continue
            factor = y.shift(-e) * pinv
            for j, x in prow.items():
                z = row.get(j, model.zero()) - factor * x
                if z.is_zero():
                    row.pop(j, None)
                else:
                    row[j] = z
            row.pop(pj, None)
            if not row:
                del rows[r]
        for row in rows.values():
            row.pop(pj, None)
    return length
