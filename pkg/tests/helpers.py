"""Shared fixtures: random relabelling and a brute-force isomorphism oracle."""

from __future__ import annotations

import random

from khibound.suture_model import CurveSystem


def relabel_randomly(cs: CurveSystem, rng: random.Random) -> CurveSystem:
    """Same system with darts and region ids permuted at random."""
    n = cs.n_darts
    perm = list(range(n))
    rng.shuffle(perm)  # old dart d becomes perm[d]
    rperm = list(range(cs.n_regions))
    rng.shuffle(rperm)
    inv = [0] * n
    for d, p in enumerate(perm):
        inv[p] = d
    signs = [0] * cs.n_regions
    for r, s in enumerate(cs.signs):
        signs[rperm[r]] = s
    return CurveSystem(
        cs.genus, cs.n_alpha,
        [perm[cs.theta[inv[p]]] for p in range(n)],
        [perm[cs.sigma[inv[p]]] for p in range(n)],
        [cs.alpha[inv[p]] for p in range(n)],
        [cs.fwd[inv[p]] for p in range(n)],
        [rperm[cs.region[inv[p]]] for p in range(n)],
        signs,
    )


def _component(cs: CurveSystem, start: int) -> list[int]:
    seen, stack = {start}, [start]
    while stack:
        d = stack.pop()
        for e in (cs.theta[d], cs.sigma[d]):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return sorted(seen)


def isomorphic(a: CurveSystem, b: CurveSystem) -> bool:
    """Is there a dart bijection preserving theta, sigma, disk labels,
    alpha orientations and regions, with region signs equal or all flipped?

    Plain backtracking over the image of one dart per component."""
    if (a.genus, a.n_alpha, a.n_darts, a.n_regions) != (b.genus, b.n_alpha, b.n_darts, b.n_regions):
        return False
    for flip in (1, -1):
        if _match(a, b, {}, {}, flip):
            return True
    return False


def _match(a, b, dmap: dict, rmap: dict, flip: int) -> bool:
    free = [d for d in range(a.n_darts) if d not in dmap]
    if not free:
        return True
    start = free[0]
    used = set(dmap.values())
    for image in range(b.n_darts):
        if image in used:
            continue
        dm, rm = dict(dmap), dict(rmap)
        if _extend(a, b, start, image, dm, rm, flip) and _match(a, b, dm, rm, flip):
            return True
    return False


def _extend(a, b, s, t, dm, rm, flip) -> bool:
    used = set(dm.values())
    stack = [(s, t)]
    while stack:
        x, y = stack.pop()
        if x in dm:
            if dm[x] != y:
                return False
            continue
        if y in used:
            return False
        if a.alpha[x] != b.alpha[y]:
            return False
        if a.alpha[x] >= 0 and a.fwd[x] != b.fwd[y]:
            return False
        rx, ry = a.region[x], b.region[y]
        if rm.get(rx, ry) != ry:
            return False
        if a.signs[rx] * flip != b.signs[ry]:
            return False
        if ry in rm.values() and rm.get(rx) != ry:
            return False
        rm[rx] = ry
        dm[x] = y
        used.add(y)
        stack.append((a.theta[x], b.theta[y]))
        stack.append((a.sigma[x], b.sigma[y]))
    return True
