"""Torsion of a sutured handlebody, used as a search lower bound.

The relative cell complex of (H, R-) is built from the curve system: the
cells of R+ (regions, alpha edges, cut arcs joining the boundary cycles of
each region, alpha curves that meet no suture), one disk per alpha curve and
one 3-cell.  Loops that avoid every alpha curve are trivial in H, so the only
deck transformations come from crossing alpha curves; crossing disk ``i``
from its left to its right multiplies by ``t_i``.

The multivariable torsion is specialised to one variable by a Kronecker
substitution ``t_i -> t^(w_i)`` chosen so that distinct monomials stay
distinct, which keeps the sum of absolute coefficients intact.
"""

from __future__ import annotations

from fractions import Fraction

from .alexander import bareiss_det
from .laurent import LaurentPoly
from .suture_model import CurveSystem

ONE = LaurentPoly.constant(1)
ZERO = LaurentPoly()


def _int_rank_columns(rows: list[list[int]], ncols: int) -> list[int]:
    """Pivot columns of an integer matrix (Gaussian elimination over Q)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return pivots


def _int_det(rows: list[list[int]]) -> Fraction:
    n = len(rows)
    m = [[Fraction(x) for x in r] for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def sutured_torsion(cs: CurveSystem) -> LaurentPoly:
    n = cs.n_darts
    plus = [r for r in range(cs.n_regions) if cs.signs[r] > 0]
    cycles: dict[int, list[tuple[int, ...]]] = {r: [] for r in plus}
    for cyc in cs.face_cycles:
        r = cs.region[cyc[0]]
        if r in cycles:
            cycles[r].append(cyc)
    edges = [d for d in range(n) if cs.alpha[d] >= 0 and cs.fwd[d] and cs.signs[cs.region[d]] > 0]
    eidx = {d: k for k, d in enumerate(edges)}
    markers = [v for v, cyc in enumerate(cs.vertices)
               if len(cyc) == 2 and cs.alpha[cyc[0]] >= 0 and cs.signs[cs.region[cyc[0]]] > 0]
    midx = {v: k for k, v in enumerate(markers)}

    # Kronecker weights: width of t_i exponents is at most the number of
    # matrix entries involving t_i
    width = [1] * cs.n_alpha
    for d in edges:
        width[cs.alpha[d]] += 1
    weight = []
    w = 1
    for i in range(cs.n_alpha):
        weight.append(w)
        w *= width[i] + 1

    def tinv(i):
        return LaurentPoly.monomial(1, -weight[i])

    cuts = []  # (marker index or None at start, at end)
    for r in plus:
        cyc = sorted(cycles[r], key=min)
        if len(cyc) < 2:
            continue
        ends = [midx.get(cs.vertex_of[c[0]]) for c in cyc]
        base = next((k for k, e in enumerate(ends) if e is None), 0)
        for k in range(len(cyc)):
            if k != base:
                cuts.append((ends[base], ends[k]))
    n1 = len(edges) + len(cuts)

    cols: list[dict[int, LaurentPoly]] = []
    for r in plus[1:]:
        col: dict[int, LaurentPoly] = {}
        for cyc in cycles[r]:
            for d in cyc:
                if cs.alpha[d] < 0:
                    continue
                if cs.fwd[d]:
                    k, v = eidx[d], -tinv(cs.alpha[d])
                else:
                    k, v = eidx[cs.theta[d]], ONE
                col[k] = col.get(k, ZERO) + v
        cols.append(col)
    for i in range(cs.n_alpha):
        col = {}
        for d in edges:
            if cs.alpha[d] == i:
                col[eidx[d]] = ONE
        cols.append(col)

    d1 = [[0] * n1 for _ in markers]
    for j, (a, b) in enumerate(cuts):
        c = len(edges) + j
        if b is not None:
            d1[b][c] += 1
        if a is not None:
            d1[a][c] -= 1
    if markers:
        piv = _int_rank_columns(d1, n1)
        if len(piv) < len(markers):
            return ZERO
        scale = _int_det([[row[c] for c in piv] for row in d1])
    else:
        piv, scale = [], Fraction(1)
    keep = [k for k in range(n1) if k not in set(piv)]
    if len(keep) != len(cols):
        return ZERO
    kpos = {k: i for i, k in enumerate(keep)}
    mat = [[ZERO] * len(cols) for _ in keep]
    for j, col in enumerate(cols):
        for k, v in col.items():
            if k in kpos:
                mat[kpos[k]][j] = mat[kpos[k]][j] + v
    det = bareiss_det(mat)
    if scale.denominator != 1 or abs(scale) != 1:
        # scale is a unit in every case met in practice; fall back to exact division
        det = det.exact_div(LaurentPoly.constant(int(scale)))
    return det


def torsion_norm(cs: CurveSystem) -> int:
    return sutured_torsion(cs).l1_norm()
