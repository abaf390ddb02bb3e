"""Sutures and meridian disks on a closed surface as a combinatorial map.

A :class:`CurveSystem` is the graph alpha ∪ gamma embedded in a closed
oriented surface.  Vertices are transverse alpha/gamma crossings (4-valent,
rotation ``alpha_out, gamma_left, alpha_in, gamma_right``) plus degree-2
marker vertices that carry closed curves meeting nothing.  The complement of
the graph need not consist of disks: each dart records the region on its
right, and regions are planar surfaces whose boundary cycles are the face
orbits of ``sigma . theta`` with that region label.

gamma orientation is derived: every gamma dart is forward iff the positive
side R+ is on its left.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import CurveSystemError, InvalidInput, NonSeparating, TooFewIntersections

FORMAT_HEADER = "curvesystem 1"

# Non-crossing matchings of six hexagon points a..f (0..5).  The original
# configuration crosses straight through: a-f, b-e, c-d.  The two bypass
# outputs are its rotations by one step either way.
HEX_ORIGINAL = frozenset({frozenset({0, 5}), frozenset({1, 4}), frozenset({2, 3})})
HEX_PLUS = frozenset({frozenset({0, 1}), frozenset({2, 5}), frozenset({3, 4})})
HEX_MINUS = frozenset({frozenset({0, 3}), frozenset({1, 2}), frozenset({4, 5})})


def rotate_matching(m, k: int):
    return frozenset(frozenset((x + k) % 6 for x in pair) for pair in m)


@dataclass(frozen=True, order=True)
class BypassArc:
    disk: int
    position: int
    side: int


@dataclass(frozen=True)
class RegionComponent:
    sign: int
    euler: int
    regions: tuple[int, ...]


@dataclass(frozen=True)
class RegionReport:
    components: tuple[RegionComponent, ...]
    counts: tuple[int, ...]

    @property
    def euler_pair(self) -> tuple[int, int]:
        plus = sum(c.euler for c in self.components if c.sign > 0)
        minus = sum(c.euler for c in self.components if c.sign < 0)
        return plus, minus


class CurveSystem:
    """Immutable alpha/gamma curve system.

    Arrays are indexed by dart: ``theta`` (edge partner), ``sigma`` (next dart
    counterclockwise at the same vertex), ``alpha`` (disk index, or -1 for a
    gamma dart), ``fwd`` (dart runs along the curve orientation) and
    ``region`` (region on the right).  ``signs[r]`` is +1 or -1.
    """

    def __init__(self, genus, n_alpha, theta, sigma, alpha, fwd, region, signs, check=True):
        self.genus = int(genus)
        self.n_alpha = int(n_alpha)
        self.theta = tuple(theta)
        self.sigma = tuple(sigma)
        self.alpha = tuple(alpha)
        self.region = tuple(region)
        self.signs = tuple(signs)
        # gamma orientation follows the sides
        self.fwd = tuple(
            f if a >= 0 else self.signs[self.region[t]] > 0
            for f, a, t in zip(fwd, self.alpha, self.theta)
        )
        if check:
            self.validate()

    # -- basic structure ---------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.theta)

    def is_alpha(self, d: int) -> bool:
        return self.alpha[d] >= 0

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(c) for c in _orbits(self.sigma))

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        out = [0] * self.n_darts
        for i, cyc in enumerate(self.vertices):
            for d in cyc:
                out[d] = i
        return tuple(out)

    @cached_property
    def face_cycles(self) -> tuple[tuple[int, ...], ...]:
        phi = [self.sigma[self.theta[d]] for d in range(self.n_darts)]
        return tuple(tuple(c) for c in _orbits(phi))

    @cached_property
    def n_regions(self) -> int:
        return len(self.signs)

    @cached_property
    def region_cycles(self) -> tuple[int, ...]:
        out = [0] * self.n_regions
        for cyc in self.face_cycles:
            out[self.region[cyc[0]]] += 1
        return tuple(out)

    def region_euler(self, r: int) -> int:
        return 2 - self.region_cycles[r]

    def euler(self) -> int:
        v = len(self.vertices)
        e = self.n_darts // 2
        return v - e + sum(2 - b for b in self.region_cycles)

    def opposite(self, d: int) -> int:
        """The dart continuing the same curve through the origin of ``d``."""
        s = self.sigma[d]
        return s if self.sigma[s] == d else self.sigma[s]

    def is_crossing(self, d: int) -> bool:
        return self.sigma[self.sigma[d]] != d

    @cached_property
    def counts(self) -> tuple[int, ...]:
        n = [0] * self.n_alpha
        for d in range(self.n_darts):
            if self.alpha[d] >= 0 and self.fwd[d] and self.is_crossing(d):
                n[self.alpha[d]] += 1
        return tuple(n)

    def alpha_points(self, i: int) -> list[int]:
        """Forward alpha darts of disk ``i`` at crossings, in curve order.

        The walk starts at the lowest-numbered such dart.
        """
        starts = [d for d in range(self.n_darts)
                  if self.alpha[d] == i and self.fwd[d] and self.is_crossing(d)]
        if not starts:
            return []
        s = min(starts)
        out = [s]
        d = self.opposite(self.theta[s])
        while d != s:
            if self.is_crossing(d):
                out.append(d)
            d = self.opposite(self.theta[d])
        return out

    @cached_property
    def gamma_components(self) -> tuple[tuple[int, ...], ...]:
        """gamma components as tuples of forward darts."""
        seen = set()
        out = []
        for s in range(self.n_darts):
            if self.alpha[s] >= 0 or not self.fwd[s] or s in seen:
                continue
            comp = []
            d = s
            while d not in seen:
                seen.add(d)
                comp.append(d)
                d = self.opposite(self.theta[d])
            out.append(tuple(comp))
        return tuple(out)

    # -- validation ---------------------------------------------------------

    def validate(self):
        n = self.n_darts
        if self.genus < 1:
            raise InvalidInput("genus must be at least 1")

        def bad(msg):
            raise CurveSystemError(msg)

        for arr, name in ((self.sigma, "sigma"), (self.alpha, "alpha"), (self.region, "region"),
                          (self.fwd, "fwd")):
            if len(arr) != n:
                bad(f"{name} has wrong length")
        if sorted(self.sigma) != list(range(n)):
            bad("sigma is not a permutation")
        for d in range(n):
            t = self.theta[d]
            if t == d or not 0 <= t < n or self.theta[t] != d:
                bad(f"theta is not a fixed-point-free involution at {d}")
            if self.alpha[d] != self.alpha[t] or self.fwd[d] == self.fwd[t]:
                bad(f"edge {d} has inconsistent labels")
            if not 0 <= self.region[d] < len(self.signs):
                bad(f"dart {d} has no region")
            if self.alpha[d] >= self.n_alpha:
                bad(f"dart {d} names an unknown disk")
        for cyc in self.vertices:
            if len(cyc) == 2:
                a, b = cyc
                if self.alpha[a] != self.alpha[b] or self.fwd[a] == self.fwd[b]:
                    bad("marker vertex joins different curves")
            elif len(cyc) == 4:
                kinds = [self.alpha[d] >= 0 for d in cyc]
                if kinds not in ([True, False, True, False], [False, True, False, True]):
                    bad("crossing does not alternate alpha and gamma")
                for k in range(2):
                    a, b = cyc[k], cyc[k + 2]
                    if self.alpha[a] != self.alpha[b] or self.fwd[a] == self.fwd[b]:
                        bad("crossing strands do not continue")
            else:
                bad(f"vertex of degree {len(cyc)}")
        used = set(self.region)
        if used != set(range(len(self.signs))):
            bad("unused region ids")
        for s in self.signs:
            if s not in (1, -1):
                bad("region signs must be +1 or -1")
        for cyc in self.face_cycles:
            if len({self.region[d] for d in cyc}) != 1:
                bad("face cycle meets two regions")
        for d in range(n):
            same = self.signs[self.region[d]] == self.signs[self.region[self.theta[d]]]
            if same != (self.alpha[d] >= 0):
                bad("region signs do not alternate across gamma")
        if any(b < 1 for b in self.region_cycles):
            bad("region without boundary")
        if self.euler() != 2 - 2 * self.genus:
            bad(f"Euler characteristic {self.euler()} != {2 - 2 * self.genus}")
        present = {a for a in self.alpha if a >= 0}
        if present != set(range(self.n_alpha)):
            bad("some disk boundary is missing")

    # -- analysis -------------------------------------------------------------

    def side_components(self) -> list[RegionComponent]:
        """Components of the surface cut along gamma."""
        parent = list(range(self.n_regions))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        alpha_edges = [d for d in range(self.n_darts) if self.alpha[d] >= 0 and self.fwd[d]]
        for d in alpha_edges:
            a, b = find(self.region[d]), find(self.region[self.theta[d]])
            if a != b:
                parent[a] = b
        groups: dict[int, list[int]] = {}
        for r in range(self.n_regions):
            groups.setdefault(find(r), []).append(r)
        euler = {root: sum(self.region_euler(r) for r in rs) for root, rs in groups.items()}
        for d in alpha_edges:
            euler[find(self.region[d])] -= 1
        for cyc in self.vertices:
            if len(cyc) == 2 and self.alpha[cyc[0]] >= 0:
                euler[find(self.region[cyc[0]])] += 1
        comps = [RegionComponent(self.signs[rs[0]], euler[root], tuple(rs))
                 for root, rs in groups.items()]
        comps.sort(key=lambda c: c.regions)
        return comps

    def bigons(self) -> list[tuple[int, int]]:
        """Disk faces bounded by one alpha arc and one gamma arc, as (alpha dart, gamma dart)."""
        out = []
        for cyc in self.face_cycles:
            if len(cyc) != 2 or self.region_cycles[self.region[cyc[0]]] != 1:
                continue
            a, g = cyc if self.alpha[cyc[0]] >= 0 else cyc[::-1]
            if self.alpha[a] >= 0 and self.alpha[g] < 0 and self.is_crossing(a) and self.is_crossing(g):
                out.append((a, g))
        return out

    # -- serialization -------------------------------------------------------

    def serialize(self) -> str:
        lines = [FORMAT_HEADER, f"genus {self.genus}", f"disks {self.n_alpha}",
                 f"darts {self.n_darts}"]
        for d in range(self.n_darts):
            curve = f"a{self.alpha[d]}" if self.alpha[d] >= 0 else "g"
            lines.append(f"d {d} {self.theta[d]} {self.sigma[d]} {curve} {int(self.fwd[d])} {self.region[d]}")
        lines.append(f"regions {self.n_regions}")
        lines.append("s " + " ".join("+" if s > 0 else "-" for s in self.signs))
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "CurveSystem":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        try:
            if lines[0] != FORMAT_HEADER:
                raise ValueError("bad header")
            genus = int(lines[1].split()[1])
            n_alpha = int(lines[2].split()[1])
            n = int(lines[3].split()[1])
            theta, sigma, alpha, fwd, region = [], [], [], [], []
            for k in range(n):
                parts = lines[4 + k].split()
                if parts[0] != "d" or int(parts[1]) != k:
                    raise ValueError(f"bad dart line {k}")
                theta.append(int(parts[2]))
                sigma.append(int(parts[3]))
                alpha.append(int(parts[4][1:]) if parts[4] != "g" else -1)
                fwd.append(parts[5] == "1")
                region.append(int(parts[6]))
            nr = int(lines[4 + n].split()[1])
            signs = [1 if s == "+" else -1 for s in lines[5 + n].split()[1:]]
            if len(signs) != nr or lines[6 + n] != "end":
                raise ValueError("bad region block")
        except (IndexError, ValueError) as exc:
            raise InvalidInput(f"cannot parse curve system: {exc}") from exc
        return cls(genus, n_alpha, theta, sigma, alpha, fwd, region, signs)

    def __eq__(self, other):
        return isinstance(other, CurveSystem) and self.serialize() == other.serialize()

    def __hash__(self):
        return hash(self.serialize())

    def __repr__(self):
        return f"CurveSystem(genus={self.genus}, counts={list(self.counts)}, gamma={len(self.gamma_components)})"

    # -- canonical form ------------------------------------------------------

    @cached_property
    def _canon(self) -> tuple[list[int], tuple]:
        return _canonical_order(self)

    def canonical(self) -> "CurveSystem":
        order, _ = self._canon
        if order == list(range(self.n_darts)):
            return self
        return _relabel(self, order)

    def key(self) -> tuple:
        return self._canon[1]

    def key_digest(self) -> str:
        return hashlib.sha256(repr(self.key()).encode()).hexdigest()[:24]


# ------------------------------------------------------------------ canonical form

def _components(cs: CurveSystem) -> list[list[int]]:
    seen = [False] * cs.n_darts
    out = []
    for s in range(cs.n_darts):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            d = stack.pop()
            comp.append(d)
            for e in (cs.theta[d], cs.sigma[d]):
                if not seen[e]:
                    seen[e] = True
                    stack.append(e)
        out.append(sorted(comp))
    return out


def _bfs(cs: CurveSystem, start: int) -> list[int]:
    order = [start]
    num = {start: 0}
    i = 0
    while i < len(order):
        d = order[i]
        for e in (cs.sigma[d], cs.theta[d]):
            if e not in num:
                num[e] = len(order)
                order.append(e)
        i += 1
    return order


def _local_code(cs: CurveSystem, order: list[int]) -> tuple:
    num = {d: i for i, d in enumerate(order)}
    rnum: dict[int, int] = {}
    code = []
    for d in order:
        r = rnum.setdefault(cs.region[d], len(rnum))
        code.append((num[cs.theta[d]], num[cs.sigma[d]], cs.alpha[d],
                     int(cs.fwd[d]) if cs.alpha[d] >= 0 else 0, r))
    return tuple(code)


def _canonical_order(cs: CurveSystem) -> tuple[list[int], tuple]:
    """Dart order minimising the code, and the resulting key.

    Components are placed by their own minimal code.  Region ids are global
    (first appearance), so components with equal codes, and equally good
    starting darts within one component, are tried in every order; choices
    leading to the same region numbering are merged.
    """
    infos = []
    for comp in _components(cs):
        alphas = [cs.alpha[d] for d in comp if cs.alpha[d] >= 0]
        if alphas:
            m = min(alphas)
            starts = [d for d in comp if cs.alpha[d] == m and cs.fwd[d]]
        else:
            starts = comp
        best, orders = None, []
        for s in starts:
            order = _bfs(cs, s)
            code = _local_code(cs, order)
            if best is None or code < best:
                best, orders = code, [order]
            elif code == best:
                orders.append(order)
        infos.append((best, orders))
    infos.sort(key=lambda p: (len(p[0]), p[0]))

    # state: (region ids, dart order, components of the current group left)
    states = [({}, [], ())]
    k = 0
    while k < len(infos):
        group = [k]
        while k + len(group) < len(infos) and infos[k + len(group)][0] == infos[k][0]:
            group.append(k + len(group))
        k += len(group)
        states = [(rm, order, tuple(group)) for rm, order, _ in states]
        for _ in range(len(group)):
            best_seg, nxt, seen = None, [], set()
            for rm, order, left in states:
                for ci in left:
                    for o in infos[ci][1]:
                        rm2 = dict(rm)
                        seg = tuple(rm2.setdefault(cs.region[d], len(rm2)) for d in o)
                        if best_seg is not None and seg > best_seg:
                            continue
                        if best_seg is None or seg < best_seg:
                            best_seg, nxt, seen = seg, [], set()
                        rest = tuple(c for c in left if c != ci)
                        sig = (tuple(sorted(rm2.items())), rest)
                        if sig in seen:
                            continue
                        seen.add(sig)
                        nxt.append((rm2, order + o, rest))
            states = nxt
    order = states[0][1]
    num = {d: i for i, d in enumerate(order)}
    rnum: dict[int, int] = {}
    code = []
    for d in order:
        r = rnum.setdefault(cs.region[d], len(rnum))
        code.append((num[cs.theta[d]], num[cs.sigma[d]], cs.alpha[d],
                     int(cs.fwd[d]) if cs.alpha[d] >= 0 else 0, r))
    signs = [0] * len(rnum)
    for old, new in rnum.items():
        signs[new] = cs.signs[old]
    signs = tuple(signs)
    flipped = tuple(-s for s in signs)
    key = (cs.genus, cs.n_alpha, tuple(code), min(signs, flipped))
    return order, key


def _relabel(cs: CurveSystem, order: list[int]) -> CurveSystem:
    num = {d: i for i, d in enumerate(order)}
    rnum: dict[int, int] = {}
    for d in order:
        rnum.setdefault(cs.region[d], len(rnum))
    signs = [0] * len(rnum)
    for old, new in rnum.items():
        signs[new] = cs.signs[old]
    return CurveSystem(
        cs.genus, cs.n_alpha,
        [num[cs.theta[d]] for d in order],
        [num[cs.sigma[d]] for d in order],
        [cs.alpha[d] for d in order],
        [cs.fwd[d] for d in order],
        [rnum[cs.region[d]] for d in order],
        signs,
        check=False,
    )


def memo_key(cs: CurveSystem) -> tuple:
    """Canonical key, equal for systems that differ only by dart relabelling."""
    return cs.key()


# ------------------------------------------------------------------ surgery

def _splice(cs: CurveSystem, ports: set[int], wire: dict, new: list[tuple[int, bool]],
            new_cycles: list[list[int]]) -> CurveSystem:
    """Remove the vertices owning ``ports`` and reconnect the loose ends.

    ``wire`` is a symmetric map between ports and new darts (written
    ``("n", k)``); unwired ports must come in edge pairs and vanish.  New darts
    are ``(disk, fwd)`` and sit on vertices given by ``new_cycles``.
    """
    used: set[int] = set()
    theta_new: dict = {}
    inh: dict = {}

    def walk(r):
        regs = []
        while True:
            used.add(r)
            regs.append(cs.region[r])
            q = cs.theta[r]
            if q not in ports:
                return q, regs
            used.add(q)
            t = wire[q]
            if isinstance(t, tuple):
                return t, regs
            r = t

    keep = [d for d in range(cs.n_darts) if d not in ports]
    for s in keep:
        q = cs.theta[s]
        if q not in ports:
            continue
        used.add(q)
        t = wire[q]
        if isinstance(t, tuple):
            partner, regs = t, []
        else:
            partner, regs = walk(t)
        theta_new[s] = partner
        inh[s] = [cs.region[s]] + regs
    for k in range(len(new)):
        t = wire[("n", k)]
        partner, regs = walk(t)
        theta_new[("n", k)] = partner
        inh[("n", k)] = regs

    markers = []
    for r in sorted(ports):
        if r in used or r not in wire:
            continue
        if isinstance(wire[r], tuple):
            continue
        regs1, regs2 = [], []
        x = r
        while True:
            used.add(x)
            regs1.append(cs.region[x])
            q = cs.theta[x]
            if q not in ports:
                raise CurveSystemError("open chain during splice")
            used.add(q)
            regs2.append(cs.region[q])
            x = wire[q]
            if x == r:
                break
        markers.append((cs.alpha[r], cs.fwd[r], regs1, regs2))
    leftover = [p for p in ports if p not in used]
    for p in leftover:
        if p in wire or cs.theta[p] not in ports or cs.theta[p] in wire:
            raise CurveSystemError("dangling port during splice")

    idx = {d: i for i, d in enumerate(keep)}
    base = len(keep)
    for k in range(len(new)):
        idx[("n", k)] = base + k
    mbase = base + len(new)
    total = mbase + 2 * len(markers)

    theta = [0] * total
    sigma = [0] * total
    alpha = [0] * total
    fwd = [False] * total
    inherit: list[list[int]] = [[] for _ in range(total)]
    for d in keep:
        i = idx[d]
        theta[i] = idx[theta_new.get(d, cs.theta[d])]
        sigma[i] = idx[cs.sigma[d]]
        alpha[i] = cs.alpha[d]
        fwd[i] = cs.fwd[d]
        inherit[i] = inh.get(d, [cs.region[d]])
    for k, (a, f) in enumerate(new):
        i = base + k
        theta[i] = idx[theta_new[("n", k)]]
        alpha[i] = a
        fwd[i] = f
        inherit[i] = inh[("n", k)]
    for cyc in new_cycles:
        for j, k in enumerate(cyc):
            sigma[base + k] = base + cyc[(j + 1) % len(cyc)]
    for m, (a, f, regs1, regs2) in enumerate(markers):
        i, j = mbase + 2 * m, mbase + 2 * m + 1
        theta[i], theta[j] = j, i
        sigma[i], sigma[j] = j, i
        alpha[i] = alpha[j] = a
        fwd[i], fwd[j] = f, not f
        inherit[i], inherit[j] = regs1, regs2

    parent = list(range(cs.n_regions))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[a] = b

    for regs in inherit:
        for r in regs[1:]:
            union(regs[0], r)
    phi = [sigma[theta[d]] for d in range(total)]
    for cyc in _orbits(phi):
        for d in cyc[1:]:
            union(inherit[cyc[0]][0], inherit[d][0])
    rid: dict[int, int] = {}
    region = []
    for d in range(total):
        region.append(rid.setdefault(find(inherit[d][0]), len(rid)))
    signs = [0] * len(rid)
    for old in range(cs.n_regions):
        root = find(old)
        if root in rid:
            s = cs.signs[old]
            if signs[rid[root]] not in (0, s):
                raise CurveSystemError("splice merged regions of opposite sides")
            signs[rid[root]] = s
    return CurveSystem(cs.genus, cs.n_alpha, theta, sigma, alpha, fwd, region, signs)


def remove_bigon(cs: CurveSystem, a: int, g: int) -> CurveSystem:
    """Push the gamma arc ``g`` across the alpha arc ``a`` of a bigon face."""
    u, v = cs.theta[g], cs.theta[a]
    if cs.vertex_of[u] == cs.vertex_of[v]:
        raise CurveSystemError("degenerate bigon")
    a_u = cs.sigma[cs.sigma[a]]
    a_v = cs.sigma[cs.sigma[v]]
    g_u = cs.sigma[cs.sigma[u]]
    g_v = cs.sigma[cs.sigma[g]]
    ports = set(cs.vertices[cs.vertex_of[a]]) | set(cs.vertices[cs.vertex_of[v]])
    wire = {a_u: a_v, a_v: a_u, g_u: g_v, g_v: g_u}
    return _splice(cs, ports, wire, [], [])


def reduce_to_minimal_position(cs: CurveSystem) -> CurveSystem:
    """Remove alpha/gamma bigons until none is left; returns a canonical system."""
    while True:
        bs = cs.bigons()
        if not bs:
            return cs.canonical()
        cs = remove_bigon(cs, *bs[0])


def is_minimal(cs: CurveSystem) -> bool:
    return not cs.bigons()


def intersection_counts(cs: CurveSystem) -> list[int]:
    return list(cs.counts)


def region_report(cs: CurveSystem, require_two: bool = False) -> RegionReport:
    comps = tuple(cs.side_components())
    if require_two and len(comps) != 2:
        raise NonSeparating(f"gamma cuts the surface into {len(comps)} pieces, not 2")
    return RegionReport(comps, cs.counts)


def enumerate_bypass_arcs(cs: CurveSystem, i: int) -> list[BypassArc]:
    n = cs.counts[i]
    if n < 3:
        raise TooFewIntersections(f"disk {i} meets gamma {n} times; a bypass needs 3")
    return [BypassArc(i, j, side) for j in range(n) for side in (0, 1)]


def _bypass_raw(cs: CurveSystem, arc: BypassArc, matching) -> CurveSystem:
    pts = cs.alpha_points(arc.disk)
    n = len(pts)
    if n < 3 or not 0 <= arc.position < n:
        raise CurveSystemError(f"no bypass at {arc}")
    ao = [pts[(arc.position + k) % n] for k in range(3)]
    gl = [cs.sigma[x] for x in ao]
    ai = [cs.sigma[x] for x in gl]
    gr = [cs.sigma[x] for x in ai]
    ports = set(ao) | set(gl) | set(ai) | set(gr)
    # hexagon boundary points: a, b, c on the left, d, e, f on the right
    hexpts = [gl[0], gl[1], gl[2], gr[2], gr[1], gr[0]]
    crossing = [p for p in matching if p in (frozenset({2, 5}), frozenset({0, 3}))]
    if len(crossing) != 1:
        raise CurveSystemError("bypass matching must cross the arc once")
    left, right = sorted(crossing[0])
    wire: dict = {}
    for pair in matching:
        if pair == crossing[0]:
            continue
        x, y = sorted(pair)
        wire[hexpts[x]] = hexpts[y]
        wire[hexpts[y]] = hexpts[x]
    disk = arc.disk
    # new vertex: alpha_out, gamma_left, alpha_in, gamma_right
    new = [(disk, True), (-1, False), (disk, False), (-1, False)]
    links = {0: ao[2], 1: hexpts[left], 2: ai[0], 3: hexpts[right]}
    for k, p in links.items():
        wire[("n", k)] = p
        wire[p] = ("n", k)
    return _splice(cs, ports, wire, new, [[0, 1, 2, 3]])


def bypass(cs: CurveSystem, arc: BypassArc) -> tuple[CurveSystem, CurveSystem]:
    """The two bypass outputs along ``arc``, each reduced to minimal position.

    The arc runs beside the disk boundary past three consecutive crossings;
    both sides of the boundary give isotopic arcs, so ``side`` does not change
    the result.
    """
    out = []
    for m in (HEX_PLUS, HEX_MINUS):
        out.append(reduce_to_minimal_position(_bypass_raw(cs, arc, m)))
    return out[0], out[1]


def is_base_case(cs: CurveSystem) -> bool:
    if cs.n_alpha == 0:
        raise InvalidInput("genus 0 systems are not allowed")
    return all(n <= 2 for n in cs.counts)


@dataclass(frozen=True)
class VanishingRuleSet:
    v0: bool = False
    v1: bool = False
    v2: bool = False

    @classmethod
    def sharpen(cls) -> "VanishingRuleSet":
        return cls(True, True, True)

    def names(self) -> list[str]:
        return [n for n, on in (("V0", self.v0), ("V1", self.v1), ("V2", self.v2)) if on]

    @classmethod
    def from_names(cls, names) -> "VanishingRuleSet":
        names = {n.upper() for n in names}
        unknown = names - {"V0", "V1", "V2"}
        if unknown:
            raise InvalidInput(f"unknown vanishing rules {sorted(unknown)}")
        return cls("V0" in names, "V1" in names, "V2" in names)


def decomposed_suture_count(cs: CurveSystem) -> int:
    """Suture components on the ball left after cutting along every disk.

    Needs every disk to meet gamma exactly twice; each cut disk then carries
    one suture arc joining its two points on either side.
    """
    if any(n != 2 for n in cs.counts):
        raise InvalidInput("decomposition needs every count equal to 2")
    link: dict[int, list[int]] = {}

    def join(a, b):
        link.setdefault(a, []).append(b)
        link.setdefault(b, []).append(a)

    for d in range(cs.n_darts):
        if cs.alpha[d] < 0 and d < cs.theta[d]:
            join(d, cs.theta[d])
    for i in range(cs.n_alpha):
        p, q = cs.alpha_points(i)
        join(cs.sigma[p], cs.sigma[q])
        join(cs.sigma[cs.sigma[cs.sigma[p]]], cs.sigma[cs.sigma[cs.sigma[q]]])
    seen = set()
    comps = 0
    for s in link:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for y in link[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return comps


def firing_rule(cs: CurveSystem, rules: VanishingRuleSet) -> str | None:
    if rules.v0 and any(n == 0 for n in cs.counts):
        return "V0"
    if rules.v1 and cs.genus >= 1 and len(cs.gamma_components) > 1:
        if any(c.euler == 1 for c in cs.side_components()):
            return "V1"
    if rules.v2 and is_base_case(cs) and all(n == 2 for n in cs.counts):
        if decomposed_suture_count(cs) > 1:
            return "V2"
    return None


def leaf_value(cs: CurveSystem, rules: VanishingRuleSet = VanishingRuleSet()) -> int:
    if not is_base_case(cs):
        raise InvalidInput("leaf_value needs a base case")
    return 0 if firing_rule(cs, rules) else 1


def _orbits(perm) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for s in range(len(perm)):
        if seen[s]:
            continue
        cyc = []
        d = s
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(cyc)
    return out
