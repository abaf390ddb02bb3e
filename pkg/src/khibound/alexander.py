"""Alexander polynomial of a knot diagram and the induced KHI lower bound.

Two independent routes are provided:

* :func:`alexander_poly` -- Fox calculus on the Wirtinger presentation,
  followed by a fraction-free (Bareiss) determinant of a codimension-one minor.
* :func:`alexander_state_sum` -- a state sum over bijections between
  crossings and regions (the Leibniz expansion of the crossing/region matrix),
  computed by backtracking directly from the PD code.
"""

from __future__ import annotations

from .knot_io import KnotDiagram, shadow
from .laurent import LaurentPoly

T = LaurentPoly.monomial(1, 1)
ONE = LaurentPoly.constant(1)
ZERO = LaurentPoly()


def bareiss_det(m: list[list[LaurentPoly]]) -> LaurentPoly:
    """Determinant by fraction-free Gaussian elimination over Z[t, 1/t]."""
    n = len(m)
    if n == 0:
        return ONE
    a = [row[:] for row in m]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not a[r][k].is_zero()), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
            a[i][k] = ZERO
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def wirtinger_arcs(d: KnotDiagram) -> dict[int, int]:
    """Map each strand label to the index of the over-arc containing it."""
    parent = {lab: lab for x in d.crossings for lab in x}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in d.crossings:
        a, b = find(x[1]), find(x[3])
        if a != b:
            parent[a] = b
    roots = sorted({find(lab) for lab in parent})
    idx = {r: i for i, r in enumerate(roots)}
    return {lab: idx[find(lab)] for lab in parent}


def fox_matrix(d: KnotDiagram) -> list[list[LaurentPoly]]:
    """Abelianised Fox Jacobian: one row per crossing, one column per arc."""
    arcs = wirtinger_arcs(d)
    n = max(arcs.values()) + 1
    rows = []
    for i, x in enumerate(d.crossings):
        row = [ZERO] * n
        k, a_in, a_out = arcs[x[1]], arcs[x[0]], arcs[x[2]]
        if d.crossing_signs[i] > 0:
            # x_out = x_k x_in x_k^-1
            entries = ((k, ONE - T), (a_in, T), (a_out, -ONE))
        else:
            # x_out = x_k^-1 x_in x_k, row multiplied by t
            entries = ((k, T - ONE), (a_in, ONE), (a_out, -T))
        for col, v in entries:
            row[col] = row[col] + v
        rows.append(row)
    return rows


def alexander_poly(d: KnotDiagram) -> LaurentPoly:
    """Symmetric Alexander polynomial with value 1 at t = 1."""
    if d.c == 0:
        return ONE
    m = fox_matrix(d)
    minor = [row[1:] for row in m[1:]]
    return bareiss_det(minor).normalized()


def region_matrix(d: KnotDiagram) -> tuple[list[dict[int, LaurentPoly]], int, int]:
    """Crossing/region matrix rows (sparse) and two adjacent regions to delete.

    Corner weights follow Alexander's labelling: with the under-strand
    running from slot 0 to slot 2, the corners right of it get ``t, -t``
    (behind, ahead) and the corners on its left ``1, -1`` (ahead, behind).
    """
    sh = shadow(d)
    rows = []
    for i in range(d.c):
        c01, c12, c23, c30 = (sh.corner_face(i, k) for k in range(4))
        row = {}
        corner_w = _corner_weights(d.crossing_signs[i])
        for k, f in enumerate((c01, c12, c23, c30)):
            row[f] = row.get(f, ZERO) + corner_w[k]
        rows.append({f: v for f, v in row.items() if not v.is_zero()})
    # two regions adjacent across the edge labelled 1
    tail, head = sh.edges[min(sh.edges)]
    r1 = sh.face_of[tail]
    r2 = sh.face_of[head]
    return rows, r1, r2


def _corner_weights(sign: int) -> tuple[LaurentPoly, ...]:
    # corners (0,1), (1,2), (2,3), (3,0); only the under-strand matters
    return (T, -T, ONE, -ONE)


def alexander_state_sum(d: KnotDiagram) -> LaurentPoly:
    """Alexander polynomial as a signed sum over crossing-to-region states."""
    if d.c == 0:
        return ONE
    rows, r1, r2 = region_matrix(d)
    regions = sorted({f for row in rows for f in row} - {r1, r2})
    col = {f: j for j, f in enumerate(regions)}
    n = d.c
    if len(regions) != n:
        raise ValueError("region count mismatch")
    options = [[(col[f], v) for f, v in sorted(row.items()) if f in col] for row in rows]
    total = ZERO
    assign = [0] * n
    used = [False] * n

    def rec(i: int, acc: LaurentPoly):
        nonlocal total
        if i == n:
            total = total + acc * _perm_sign(assign)
            return
        for j, v in options[i]:
            if not used[j]:
                used[j] = True
                assign[i] = j
                rec(i + 1, acc * v)
                used[j] = False

    rec(0, ONE)
    return total.normalized()


def _perm_sign(p: list[int]) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def khi_lower_bound(p: LaurentPoly) -> int:
    """Sum of absolute values of the coefficients."""
    return p.l1_norm()


def seifert_genus_lower_bound(p: LaurentPoly) -> int:
    return p.max_exp
