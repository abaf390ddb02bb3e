"""Sutured handlebody of a knot diagram as a :class:`CurveSystem`.

The handlebody is the complement of a neighbourhood of the diagram's shadow.
Its boundary is cellulated with two sheets, top (T) and bottom (B), each made
of one square per crossing and one strip per shadow edge; the sheets meet
along the equator, which is the union of the face boundaries.  The bounded
faces give the meridian disks.  The sutures are one curve around each
crossing, one meridian of the knot, and a band sum of all of these pushed off
to one side.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .cellmap import CellMap
from .errors import BandCollision, BandCycle, ValidityFailure
from .knot_io import KnotDiagram, Shadow4Valent, shadow
from .suture_model import CurveSystem, reduce_to_minimal_position, region_report

MERIDIAN = "m"
BAND_SUM = "delta"

AUX = ("aux",)


@dataclass(frozen=True)
class MeridianDiskSet:
    faces: tuple[int, ...]  # shadow face of each disk, in disk order

    @property
    def g(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class SutureSpec:
    crossing_curves: tuple[str, ...]
    meridian_curve: str
    band_sum_curve: str
    bands: tuple[tuple[str, str], ...]


class FineSurface:
    """Cellulated boundary surface with alpha and beta curves drawn on it."""

    def __init__(self, sh: Shadow4Valent):
        self.sh = sh
        self.disk_faces = tuple(sh.bounded_faces())
        self.disk_of = {f: i for i, f in enumerate(self.disk_faces)}
        self.m, self.dart = _base_map(sh, self._face_label)
        self._edge_pos = {lab: j for j, lab in enumerate(sh.edges)}
        self.curves: dict[str, list[int]] = {}
        self.side: dict[str, int] = {}  # +1: bands attach on the left of a curve

    def attach_darts(self, name: str) -> list[int]:
        """Darts of a curve whose left side faces the bands."""
        ds = self.curve_darts(name)
        if self.side.get(name, 1) > 0:
            return ds
        return [self.m.theta[d] for d in ds]

    def _face_label(self, f: int) -> tuple:
        return ("alpha", self.disk_of[f]) if f in self.disk_of else ("unb",)

    @property
    def genus(self) -> int:
        return (2 - self.m.euler()) // 2

    # -- beta curves ---------------------------------------------------------

    def add_crossing_curve(self, v: int, name: str) -> list[int]:
        """Curve around crossing ``v``: arcs cut off the under arms on the top
        sheet and the over arms on the bottom sheet.  Returns its darts in order."""
        pts = [self.m.subdivide(self.dart[(("corner", v, j), True)]) for j in range(4)]
        # at a corner point, the top square lies left of the forward dart and
        # the bottom square left of the backward dart
        lab = ("gamma", name)
        darts = []
        for j, (start, end) in enumerate(((3, 0), (0, 1), (1, 2), (2, 3))):
            top = j % 2 == 0
            x = pts[start][1] if top else pts[start][0]
            y = pts[end][1] if top else pts[end][0]
            a, _ = self.m.insert_edge(x, y, lab)
            darts.append(a)
        self.curves[name] = darts
        return darts

    def add_meridian(self, label: int, name: str) -> list[int]:
        """Meridian of the knot across the strip of shadow edge ``label``."""
        r = self.m.subdivide(self.dart[(("sideR", label), True)])
        lpt = self.m.subdivide(self.dart[(("sideL", label), True)])
        lab = ("gamma", name)
        a, _ = self.m.insert_edge(r[1], lpt[0], lab)   # across the top strip
        b, _ = self.m.insert_edge(lpt[1], r[0], lab)   # back across the bottom strip
        self.curves[name] = [a, b]
        return [a, b]

    # -- curve walking -------------------------------------------------------

    def next_on_curve(self, d: int) -> int:
        t = self.m.theta[d]
        lab = self.m.label[d]
        nxt = [x for x in self.m.vertex_darts(t) if x != t and self.m.label[x] == lab]
        if len(nxt) != 1:
            raise ValidityFailure(3, f"curve {lab} is not simple at dart {d}")
        return nxt[0]

    def curve_darts(self, name: str) -> list[int]:
        s = self.curves[name][0]
        out = [s]
        d = self.next_on_curve(s)
        while d != s:
            out.append(d)
            d = self.next_on_curve(d)
        return out

    # -- bands ---------------------------------------------------------------

    def _band_search(self, src: str, targets: list[str], allowed: set[int] | None = None):
        """0-1 BFS through faces from the left side of ``src`` to the left side
        of any curve in ``targets``.  Crossing an alpha edge costs 1, other
        equator and auxiliary edges cost 0; curves and bands are walls."""
        m = self.m
        fidx = m.face_index()
        nf = max(fidx) + 1
        face_darts: list[list[int]] = [[] for _ in range(nf)]
        for d in range(m.n_darts()):
            face_darts[fidx[d]].append(d)

        def ok(f):
            return allowed is None or m.rcell[face_darts[f][0]] in allowed

        starts = {}
        for d in self.attach_darts(src):
            if ok(fidx[m.theta[d]]):
                starts.setdefault(fidx[m.theta[d]], d)
        goals = {}
        for name in targets:
            for d in self.attach_darts(name):
                if ok(fidx[m.theta[d]]):
                    goals.setdefault(fidx[m.theta[d]], (name, d))
        dist: list = [None] * nf
        prev: list = [None] * nf
        dq = deque()
        for f in sorted(starts):
            dist[f] = 0
            dq.append(f)
        while dq:
            f = dq.popleft()
            for d in face_darts[f]:
                kind = m.label[d][0]
                if kind in ("gamma", "band"):
                    continue
                g = fidx[m.theta[d]]
                if not ok(g):
                    continue
                w = 1 if kind == "alpha" else 0
                nd = dist[f] + w
                if dist[g] is None or nd < dist[g]:
                    dist[g] = nd
                    prev[g] = (f, d)
                    if w:
                        dq.append(g)
                    else:
                        dq.appendleft(g)
        reach = [f for f in goals if dist[f] is not None]
        if not reach:
            return None
        end = min(reach, key=lambda f: (dist[f], f))
        crossed = []
        f = end
        while prev[f] is not None:
            f, d = prev[f]
            crossed.append(d)
        crossed.reverse()
        return dist[end], starts[f], goals[end], crossed

    def draw_band(self, src: str, dst: str, idx: int, allowed: set[int] | None = None) -> int:
        """Draw a band core from the attaching side of ``src`` to that of ``dst``.

        Returns the number of alpha edges the band crosses."""
        found = self._band_search(src, [dst], allowed)
        if found is None:
            raise BandCollision(f"no band from {src} to {dst} avoids the curves")
        cost, d0, (_, d1), crossed = found
        m = self.m
        lab = ("band", idx)
        # corners: after ``back`` lies the face right of the split dart,
        # after ``fwd`` the face on its left
        pts = [m.subdivide(d0)]
        pts += [m.subdivide(d) for d in crossed]
        end = m.subdivide(d1)
        for k in range(len(pts)):
            x = pts[k][1]
            y = pts[k + 1][0] if k + 1 < len(pts) else end[1]
            m.insert_edge(x, y, lab)
        return cost

    def square_cells(self, v: int) -> set[int]:
        return {2 * v, 2 * v + 1}

    def strip_cells(self, label: int) -> set[int]:
        j = self._edge_pos[label]
        base = 2 * self.sh.n_vertices + 2 * j
        return {base, base + 1}

    def strand_bands(self, start_label: int, root: str,
                     reverse: bool = False) -> list[tuple[str, str, set[int]]]:
        """Bands along the knot, starting at the curve ``root`` on edge
        ``start_label`` and joining each newly reached crossing curve to the
        previous one.  Sets the attaching side of every curve: the side facing
        the strand the bands follow.  Returns (src, dst, allowed cells)."""
        sh = self.sh
        self.side[root] = 1 if reverse else -1  # toward the next crossing of the walk
        visited: set[int] = set()
        out = []
        cur, cells = root, set(self.strip_cells(start_label))
        lab = start_label
        while len(visited) < sh.n_vertices:
            u, k = sh.edges[lab][0 if reverse else 1]
            cells |= self.square_cells(u)
            if u not in visited:
                visited.add(u)
                name = f"x{u}"
                # slots 0, 2 lie right of the crossing curve, slots 1, 3 left
                self.side[name] = 1 if k % 2 else -1
                out.append((cur, name, cells))
                cur, cells = name, set(self.square_cells(u))
            lab = sh.labels[u][(k + 2) % 4]
            cells |= self.strip_cells(lab)
        return out

    def plan_bands(self, names: list[str], root: str) -> list[tuple[str, str]]:
        """Grow a tree of bands from ``root``, always drawing the cheapest next band."""
        tree = [root]
        rest = [n for n in names if n != root]
        bands = []
        while rest:
            best = None
            for src in tree:
                found = self._band_search(src, rest)
                if found is None:
                    continue
                key = (found[0], tree.index(src))
                if best is None or key < best[0]:
                    best = (key, src, found[2][0])
            if best is None:
                raise BandCollision("remaining curves cannot be reached by a band")
            _, src, dst = best
            self.draw_band(src, dst, len(bands))
            bands.append((src, dst))
            tree.append(dst)
            rest.remove(dst)
        return bands

    def trace_band_sum(self, name: str) -> list[int]:
        """Draw the boundary of a neighbourhood of the curves plus bands, on the
        side where the bands attach, as a new curve ``name``."""
        m = self.m
        in_y = [m.label[d][0] in ("gamma", "band") for d in range(m.n_darts())]

        def sigma_y(x):
            y = m.sigma[x]
            while not in_y[y]:
                y = m.sigma[y]
            return y

        seen = set()
        orbits = []
        for s in range(m.n_darts()):
            if not in_y[s] or s in seen:
                continue
            orb = []
            d = s
            while d not in seen:
                seen.add(d)
                orb.append(d)
                d = sigma_y(m.theta[d])
            orbits.append(orb)
        big = [o for o in orbits if any(m.label[d][0] == "band" for d in o)]
        if len(big) != 1 or len(orbits) != len(self.curves) + 1:
            raise BandCycle(f"band neighbourhood has {len(orbits)} boundary curves")
        crossings = []
        for d in big[0]:
            t = m.theta[d]
            stop = sigma_y(t)
            x = m.sigma[t]
            while x != stop:
                crossings.append(x)
                x = m.sigma[x]
        if not crossings:
            raise BandCycle("band-sum curve meets no edge")
        lab = ("gamma", name)
        pts = [m.subdivide(x) for x in crossings]
        first = None
        for k in range(len(pts)):
            a, _ = m.insert_edge(pts[k][1], pts[(k + 1) % len(pts)][0], lab)
            if first is None:
                first = a
        for d in range(len(m.label)):
            if m.label[d][0] == "band":
                m.label[d] = AUX
        self.curves[name] = [first]
        return self.curve_darts(name)

    # -- extraction ------------------------------------------------------------

    def to_curve_system(self, plus_curve: str) -> CurveSystem:
        """Collapse to the alpha/gamma graph with region labels."""
        m = self.m
        n = m.n_darts()
        is_curve = [m.label[d][0] in ("alpha", "gamma") for d in range(n)]
        fidx = m.face_index()
        parent = list(range(max(fidx) + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for d in range(n):
            if not is_curve[d]:
                a, b = find(fidx[d]), find(fidx[m.theta[d]])
                if a != b:
                    parent[a] = b

        # orientation of every curve dart: walk each loop from its lowest dart
        fwd = [None] * n
        for s in range(n):
            if not is_curve[s] or fwd[s] is not None:
                continue
            d = s
            while fwd[d] is None:
                fwd[d] = True
                fwd[m.theta[d]] = False
                d = self.next_on_curve(d)

        crossing_v = set()
        for cyc in m.vertex_orbits():
            kinds = [m.label[d][0] for d in cyc if is_curve[d]]
            if "alpha" in kinds and "gamma" in kinds:
                if kinds not in (["alpha", "gamma"] * 2, ["gamma", "alpha"] * 2):
                    raise ValidityFailure(0, "curve crossing is not transverse")
                crossing_v.update(cyc)
        gm_id: dict[int, int] = {}
        for d in range(n):
            if is_curve[d] and d in crossing_v:
                gm_id[d] = len(gm_id)
        starts = sorted(gm_id, key=gm_id.get)
        theta, sigma, alpha, gfwd, region = [], [], [], [], []
        visited = set()
        for d in starts:
            x = d
            visited.add(x)
            y = m.theta[x]
            while y not in crossing_v:
                visited.add(y)
                x = self.next_on_curve(x)
                visited.add(x)
                y = m.theta[x]
            visited.add(y)
            theta.append(gm_id[y])
            s = m.sigma[d]
            while not is_curve[s]:
                s = m.sigma[s]
            sigma.append(gm_id[s])
            lab = m.label[d]
            alpha.append(lab[1] if lab[0] == "alpha" else -1)
            gfwd.append(bool(fwd[d]))
            region.append(find(fidx[d]))
        for s in range(n):
            if not is_curve[s] or s in visited or not fwd[s]:
                continue
            d = s
            while d not in visited:
                visited.add(d)
                visited.add(m.theta[d])
                d = self.next_on_curve(d)
            i = len(theta)
            lab = m.label[s]
            a = lab[1] if lab[0] == "alpha" else -1
            theta += [i + 1, i]
            sigma += [i + 1, i]
            alpha += [a, a]
            gfwd += [True, False]
            region += [find(fidx[s]), find(fidx[m.theta[s]])]
        rid: dict[int, int] = {}
        region = [rid.setdefault(r, len(rid)) for r in region]
        # sides: regions joined across alpha edges
        side = list(range(len(rid)))

        def sfind(x):
            while side[x] != x:
                side[x] = side[side[x]]
                x = side[x]
            return x

        for d in range(len(theta)):
            if alpha[d] >= 0:
                a, b = sfind(region[d]), sfind(region[theta[d]])
                if a != b:
                    side[a] = b
        roots = sorted({sfind(r) for r in range(len(rid))})
        if len(roots) != 2:
            raise ValidityFailure(2, f"gamma cuts the surface into {len(roots)} pieces")
        p = self.curves[plus_curve][0]
        plus_root = sfind(rid[find(fidx[m.theta[p]])])
        signs = [1 if sfind(r) == plus_root else -1 for r in range(len(rid))]
        return CurveSystem(self.genus, len(self.disk_faces), theta, sigma, alpha, gfwd, region, signs)


def _base_map(sh: Shadow4Valent, face_label) -> tuple[CellMap, dict]:
    edges: dict = {}
    faces: list = []
    c = sh.n_vertices
    for v in range(c):
        for k in range(4):
            edges[("armT", v, k)] = ("arm",)
            edges[("armB", v, k)] = ("arm",)
            edges[("corner", v, k)] = face_label(sh.corner_face(v, k))
    for lab, ((v, k), (u, m)) in sh.edges.items():
        edges[("sideL", lab)] = face_label(sh.corner_face(v, k))
        edges[("sideR", lab)] = face_label(sh.corner_face(v, (k - 1) % 4))
    for v in range(c):
        top = []
        for k in range(4):
            top += [(("armT", v, k), True), (("corner", v, k), True)]
        faces.append(top)
        bottom = []
        for k in range(4):
            bottom += [(("armB", v, k), True), (("corner", v, k), True)]
        faces.append([(e, not f) for e, f in reversed(bottom)])
    for lab, ((v, k), (u, m)) in sh.edges.items():
        faces.append([(("armT", v, k), False), (("sideR", lab), True),
                      (("armT", u, m), False), (("sideL", lab), False)])
        faces.append([(("sideL", lab), True), (("armB", u, m), True),
                      (("sideR", lab), False), (("armB", v, k), True)])
    return CellMap.from_faces(edges, faces)


def crossing_curve(sh: Shadow4Valent, v: int) -> list[int]:
    """Disks met by the curve around crossing ``v``, in order along the curve.

    Each entry is a disk index, or -1 for the unbounded face (no disk).
    """
    fs = FineSurface(sh)
    fs.add_crossing_curve(v, "x")
    word = []
    for d in fs.curve_darts("x"):
        t = fs.m.theta[d]
        for x in fs.m.vertex_darts(t):
            lab = fs.m.label[x]
            if lab[0] == "alpha":
                word.append(lab[1])
                break
            if lab[0] == "unb":
                word.append(-1)
                break
    return word


def band_sum(fs: FineSurface, names: list[str], bands: list[tuple[str, str]], name: str = BAND_SUM) -> list[int]:
    """Join the named curves by the given bands and draw the pushed-off sum."""
    parent = {n: n for n in names}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in bands:
        if a not in parent or b not in parent or a == b:
            raise BandCycle(f"band {a}-{b} does not join two curves")
        ra, rb = find(a), find(b)
        if ra == rb:
            raise BandCycle(f"band {a}-{b} closes a cycle")
        parent[ra] = rb
    if len({find(n) for n in names}) != 1:
        raise BandCycle("bands do not connect all curves")
    for i, (a, b) in enumerate(bands):
        fs.draw_band(a, b, i)
    return fs.trace_band_sum(name)


def build_fine_surface(d: KnotDiagram, bands: str = "strand", start: int | None = None,
                       reverse: bool = False) -> tuple[FineSurface, SutureSpec]:
    sh = shadow(d)
    fs = FineSurface(sh)
    names = []
    for v in range(d.c):
        name = f"x{v}"
        fs.add_crossing_curve(v, name)
        names.append(name)
    # meridian on the edge leaving crossing 0 along its under-strand
    if start is None:
        start = d.crossings[0][2]
    fs.add_meridian(start, MERIDIAN)
    if bands == "strand":
        plan = fs.strand_bands(start, MERIDIAN, reverse)
        for i, (a, b, cells) in enumerate(plan):
            fs.draw_band(a, b, i, cells)
        pairs = [(a, b) for a, b, _ in plan]
    else:
        pairs = fs.plan_bands(names + [MERIDIAN], MERIDIAN)
    fs.trace_band_sum(BAND_SUM)
    return fs, SutureSpec(tuple(names), MERIDIAN, BAND_SUM, tuple(pairs))


def unknot_system() -> CurveSystem:
    """Solid torus with one meridian disk and two parallel sutures."""
    theta = [6, 3, 4, 1, 2, 7, 0, 5]
    sigma = [1, 2, 3, 0, 5, 6, 7, 4]
    alpha = [0, -1, 0, -1, 0, -1, 0, -1]
    fwd = [True, False, False, False, True, False, False, False]
    region = [0, 0, 1, 1, 1, 1, 0, 0]
    return CurveSystem(1, 1, theta, sigma, alpha, fwd, region, [1, -1])


def check_sutured(cs: CurveSystem, g: int, fs: FineSurface | None = None):
    """Assert the three hypotheses on the built sutured handlebody."""
    n_gamma = len(cs.gamma_components)
    if n_gamma != g + 1:
        raise ValidityFailure(1, f"{n_gamma} suture components, expected {g + 1}")
    rep = region_report(cs)
    if len(rep.components) != 2:
        raise ValidityFailure(2, f"{len(rep.components)} sides")
    plus, minus = rep.euler_pair
    if plus != minus:
        raise ValidityFailure(2, f"sides have Euler characteristics {plus} and {minus}")
    if fs is not None:
        for name in fs.curves:
            lab = ("gamma", name)
            for dd in fs.curve_darts(name):
                for x in fs.m.vertex_darts(dd):
                    other = fs.m.label[x]
                    if other[0] == "gamma" and other != lab:
                        raise ValidityFailure(3, f"curve {name} touches {other[1]}")


@dataclass(frozen=True)
class BuildChoice:
    start: int  # strand label carrying the meridian
    reverse: bool  # bands follow the knot against its orientation
    torsion: int  # torsion norm of the result

    def describe(self) -> str:
        return f"start={self.start} reverse={int(self.reverse)} torsion={self.torsion}"


def _build_one(d: KnotDiagram, start: int, reverse: bool) -> CurveSystem:
    fs, _ = build_fine_surface(d, "strand", start, reverse)
    g = d.c + 1
    if fs.genus != g:
        raise ValidityFailure(0, f"surface genus {fs.genus}, expected {g}")
    cs = fs.to_curve_system(MERIDIAN)
    check_sutured(cs, g, fs)
    return reduce_to_minimal_position(cs)


def choose_construction(d: KnotDiagram, exhaustive: bool = True) -> tuple[CurveSystem, BuildChoice]:
    """Build the sutured handlebody, trying every start edge and direction.

    Different band routes give different sutured handlebodies, all valid;
    the one with the smallest torsion norm is kept, since that norm bounds
    every search from below.  The scan stops early once the torsion norm
    meets the Alexander bound, which no construction can beat.
    """
    from .alexander import alexander_poly
    from .torsion import torsion_norm

    if d.c == 0:
        cs = unknot_system()
        check_sutured(cs, 1)
        return cs, BuildChoice(0, False, 1)
    floor = alexander_poly(d).l1_norm()
    labels = sorted(shadow(d).edges)
    first = d.crossings[0][2]
    order = [(first, False)] + [(lab, rev) for rev in (False, True) for lab in labels
                                if (lab, rev) != (first, False)]
    best = None
    for start, rev in order if exhaustive else order[:1]:
        cs = _build_one(d, start, rev)
        t = torsion_norm(cs)
        if best is None or t < best[1].torsion:
            best = (cs, BuildChoice(start, rev, t))
        if t <= floor:
            break
    return best


def build_sutured_handlebody(d: KnotDiagram, choice: BuildChoice | None = None) -> CurveSystem:
    """Sutured handlebody of ``d``; with ``choice`` given, rebuild exactly that one."""
    if choice is not None and d.c > 0:
        return _build_one(d, choice.start, choice.reverse)
    return choose_construction(d)[0]


def random_curve_system(rng, max_genus: int = 5, max_moves: int = 3) -> CurveSystem:
    """A random valid system: a random diagram with a random band route,
    followed by up to ``max_moves`` random bypass moves."""
    from .knot_io import random_diagram
    from .suture_model import BypassArc, bypass

    d = random_diagram(rng, max_crossings=max_genus - 1)
    labels = sorted(shadow(d).edges)
    cs = _build_one(d, rng.choice(labels), rng.random() < 0.5)
    for _ in range(rng.randint(0, max_moves)):
        disks = [i for i, n in enumerate(cs.counts) if n >= 3]
        if not disks:
            break
        i = rng.choice(disks)
        out = bypass(cs, BypassArc(i, rng.randrange(cs.counts[i]), 0))
        cs = out[rng.randrange(2)]
    return cs
