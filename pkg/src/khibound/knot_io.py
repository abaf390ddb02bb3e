"""Knot diagrams: PD/DT parsing, validation, the bundled knot table and shadows.

PD convention: each crossing is a 4-tuple of strand labels, starting with the
incoming under-strand and continuing counterclockwise.
"""

from __future__ import annotations

import ast
import hashlib
import random
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from itertools import product

from .errors import LabelMultiplicity, MalformedSyntax, MultiComponent, NonPlanar, UnknownName

Dart = tuple[int, int]  # (crossing index, slot 0..3)


@dataclass(frozen=True)
class KnotDiagram:
    crossings: tuple[tuple[int, int, int, int], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(tuple(int(v) for v in x) for x in self.crossings))
        _validate(self)

    @property
    def c(self) -> int:
        return len(self.crossings)

    @cached_property
    def _orientation(self) -> dict[Dart, bool]:
        return _orient(self.crossings)

    def is_incoming(self, dart: Dart) -> bool:
        """True when the strand at ``dart`` enters its crossing."""
        return self._orientation[dart]

    @cached_property
    def crossing_signs(self) -> tuple[int, ...]:
        # +1 when the over-strand runs from slot 3 to slot 1
        return tuple(1 if self._orientation[(i, 3)] else -1 for i in range(self.c))

    @cached_property
    def writhe(self) -> int:
        return sum(self.crossing_signs)

    def occurrences(self, label: int) -> list[Dart]:
        return [(i, k) for i, x in enumerate(self.crossings) for k in range(4) if x[k] == label]

    def strand_order(self) -> list[int]:
        """Labels in the order met when walking the knot from label 1."""
        if not self.c:
            return []
        return _walk(self.crossings, self._orientation)

    def serialize(self) -> str:
        return "[" + ",".join("[" + ",".join(map(str, x)) + "]" for x in self.crossings) + "]"

    @cached_property
    def pd_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()[:16]

    def __str__(self):
        return f"{self.name or 'knot'} {self.serialize()}"


def _slot_table(crossings) -> dict[int, list[Dart]]:
    occ: dict[int, list[Dart]] = {}
    for i, x in enumerate(crossings):
        for k, lab in enumerate(x):
            occ.setdefault(lab, []).append((i, k))
    return occ


def _orient(crossings) -> dict[Dart, bool]:
    """Decide for every slot whether its strand enters the crossing.

    Under slots are fixed by convention (0 in, 2 out).  Over slots are fixed by
    propagating the rule that each label has one incoming and one outgoing
    occurrence; anything left undetermined falls back to consecutive labelling.
    """
    n = 2 * len(crossings)
    occ = _slot_table(crossings)
    inc: dict[Dart, bool] = {}
    for i in range(len(crossings)):
        inc[(i, 0)] = True
        inc[(i, 2)] = False
    over_bit: dict[int, bool] = {}  # crossing -> slot 1 is incoming

    def other(d: Dart) -> Dart:
        a, b = occ[crossings[d[0]][d[1]]]
        return b if a == d else a

    def set_over(i: int, slot1_in: bool, stack: list):
        if i in over_bit:
            return over_bit[i] == slot1_in
        over_bit[i] = slot1_in
        inc[(i, 1)] = slot1_in
        inc[(i, 3)] = not slot1_in
        stack.extend([(i, 1), (i, 3)])
        return True

    def propagate(stack: list) -> bool:
        while stack:
            d = stack.pop()
            o = other(d)
            want = not inc[d]
            if o in inc:
                if inc[o] != want:
                    return False
                continue
            # o is an over slot of a crossing not yet decided
            j, k = o
            if not set_over(j, want if k == 1 else not want, stack):
                return False
        return True

    stack = [(i, k) for i in range(len(crossings)) for k in (0, 2)]
    if not propagate(stack):
        raise MultiComponent("inconsistent strand orientation")
    for i, x in enumerate(crossings):
        if i in over_bit:
            continue
        b, d = x[1], x[3]
        slot1_in = (d - b) % n != 1  # b -> d means slot 1 is incoming
        st: list = []
        if not set_over(i, slot1_in, st) or not propagate(st):
            raise MultiComponent("inconsistent strand orientation")
    return inc


def _walk(crossings, inc) -> list[int]:
    occ = _slot_table(crossings)
    start = 1 if 1 in occ else min(occ)
    order = [start]
    lab = start
    while True:
        # head occurrence of lab
        head = next(d for d in occ[lab] if inc[d])
        i, k = head
        nxt = crossings[i][(k + 2) % 4]
        if nxt == start:
            break
        order.append(nxt)
        if len(order) > len(occ):
            break
        lab = nxt
    return order


def _faces(crossings) -> list[list[Dart]]:
    occ = _slot_table(crossings)

    def theta(d: Dart) -> Dart:
        a, b = occ[crossings[d[0]][d[1]]]
        return b if a == d else a

    seen: set[Dart] = set()
    faces = []
    for i in range(len(crossings)):
        for k in range(4):
            d = (i, k)
            if d in seen:
                continue
            cyc = []
            while d not in seen:
                seen.add(d)
                cyc.append(d)
                t = theta(d)
                d = (t[0], (t[1] + 1) % 4)
            faces.append(cyc)
    return faces


def _validate(d: KnotDiagram):
    xs = d.crossings
    c = len(xs)
    for x in xs:
        if len(x) != 4:
            raise MalformedSyntax(f"crossing {x} does not have 4 labels")
        if any(v <= 0 for v in x):
            raise MalformedSyntax(f"crossing {x} has a non-positive label")
    if c == 0:
        return
    occ = _slot_table(xs)
    bad = sorted(lab for lab in set(occ) | set(range(1, 2 * c + 1)) if len(occ.get(lab, [])) != 2)
    if bad:
        raise LabelMultiplicity(f"labels not appearing exactly twice: {bad}")
    inc = _orient(xs)
    for lab, (a, b) in occ.items():
        if inc[a] == inc[b]:
            raise MultiComponent(f"label {lab} has inconsistent orientation")
    if len(_walk(xs, inc)) != 2 * c:
        raise MultiComponent("diagram has more than one component")
    nf = len(_faces(xs))
    if c - 2 * c + nf != 2:
        raise NonPlanar(f"V - E + F = {c - 2 * c + nf} != 2")


def parse_pd(text: str, name: str | None = None) -> KnotDiagram:
    """Parse ``"[[1,4,2,5],[3,6,4,1],[5,2,6,3]]"`` (also ``PD[X[..],..]`` and tuple forms)."""
    s = text.strip()
    if s.startswith("PD"):
        s = s[2:]
    s = s.replace("X[", "[").replace("(", "[").replace(")", "]")
    if not s.startswith("["):
        s = "[" + s + "]"
    try:
        data = ast.literal_eval(s)
    except (ValueError, SyntaxError) as exc:
        raise MalformedSyntax(f"cannot parse PD code {text!r}") from exc
    if not isinstance(data, (list, tuple)):
        raise MalformedSyntax(f"PD code must be a list of 4-tuples: {text!r}")
    if len(data) == 4 and all(isinstance(v, int) for v in data):
        data = [data]
    out = []
    for x in data:
        if not isinstance(x, (list, tuple)) or len(x) != 4 or not all(isinstance(v, int) for v in x):
            raise MalformedSyntax(f"bad crossing entry {x!r}")
        out.append(tuple(x))
    return KnotDiagram(tuple(out), name=name)


# ---------------------------------------------------------------- DT codes


def parse_dt(text: str) -> list[int]:
    s = text.strip().strip("[]()").replace(",", " ")
    try:
        vals = [int(v) for v in s.split()]
    except ValueError as exc:
        raise MalformedSyntax(f"cannot parse DT code {text!r}") from exc
    return vals


def dt_to_pd(dt: list[int] | str, name: str | None = None) -> KnotDiagram:
    """Realise a Dowker-Thistlethwaite code as a planar PD diagram.

    Positive even entries mark crossings whose even visit is the under pass.
    The planar embedding is found by trying the local handedness of every
    crossing (first crossing fixed) and keeping the first assignment with
    ``c + 2`` faces.
    """
    if isinstance(dt, str):
        dt = parse_dt(dt)
    c = len(dt)
    if c == 0:
        return KnotDiagram((), name=name)
    evens = [abs(v) for v in dt]
    if sorted(evens) != list(range(2, 2 * c + 1, 2)):
        raise MalformedSyntax(f"DT code {dt} is not a permutation of the even labels")
    # positions 1..2c; crossing id per position
    cross_of = {}
    visits = []
    for idx, e in enumerate(dt):
        o = 2 * idx + 1
        cross_of[o] = idx
        cross_of[abs(e)] = idx
        visits.append((o, abs(e), e > 0))
    n = 2 * c

    def edge_in(p):  # label of edge arriving at position p
        return p - 1 if p > 1 else n

    def edge_out(p):
        return p

    for bits in product((True, False), repeat=c - 1):
        bits = (True,) + bits
        # slots per crossing: list of (label, role) in CCW order
        rot = []
        for idx, (o, e, _) in enumerate(visits):
            oi, oo, ei, eo = edge_in(o), edge_out(o), edge_in(e), edge_out(e)
            rot.append([oi, ei, oo, eo] if bits[idx] else [oi, eo, oo, ei])
        if len(_faces_from_rot(rot)) != c + 2:
            continue
        crossings = []
        for idx, (o, e, even_under) in enumerate(visits):
            under_p = e if even_under else o
            under_in = edge_in(under_p)
            r = rot[idx]
            k = r.index(under_in)
            # a label may occur twice at one crossing (kink); pick the under-in occurrence
            if r.count(under_in) == 2:
                k = _kink_slot(r, under_in, edge_out(under_p))
            crossings.append(tuple(r[(k + j) % 4] for j in range(4)))
        return KnotDiagram(tuple(crossings), name=name)
    raise NonPlanar(f"DT code {dt} has no planar realisation")


def _kink_slot(r, lab_in, lab_out):
    for k in range(4):
        if r[k] == lab_in and r[(k + 2) % 4] == lab_out:
            return k
    return r.index(lab_in)


def _faces_from_rot(rot: list[list[int]]) -> list[list[Dart]]:
    return _faces(tuple(tuple(r) for r in rot))


# ---------------------------------------------------------------- bundled table

_TABLE: dict[str, tuple[str, KnotDiagram]] | None = None


def _load_table() -> dict[str, tuple[str, KnotDiagram]]:
    global _TABLE
    if _TABLE is None:
        text = resources.files("khibound").joinpath("data/knots.txt").read_text()
        table = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, dt, pd = (f.strip() for f in line.split("|"))
            table[name] = (dt, parse_pd(pd, name=name))
        _TABLE = table
    return _TABLE


def bundled_names() -> list[str]:
    return list(_load_table())


def lookup(name: str) -> KnotDiagram:
    key = name.strip().replace("₁", "_1")
    aliases = {"0_1": "unknot", "O": "unknot"}
    key = aliases.get(key, key)
    table = _load_table()
    if key not in table:
        raise UnknownName(f"unknown knot {name!r}; bundled: {', '.join(table)}")
    return table[key][1]


def bundled_dt(name: str) -> str:
    return _load_table()[name][0]


def resolve(spec: str, dt: bool = False) -> KnotDiagram:
    """A knot name, a PD code, or (with ``dt=True``) a DT code."""
    if dt:
        return dt_to_pd(spec)
    s = spec.strip()
    if s.startswith("[") or s.startswith("PD") or s.startswith("X["):
        return parse_pd(s)
    return lookup(s)


# ---------------------------------------------------------------- shadow


@dataclass(frozen=True)
class Shadow4Valent:
    """The 4-valent planar graph obtained by forgetting crossing information.

    Darts are ``(vertex, slot)`` pairs; the rotation at each vertex is the
    slot order 0,1,2,3 (counterclockwise).  ``faces[f]`` lists the darts whose
    right-hand side is face ``f``.  For the crossingless unknot there are no
    vertices and two faces.
    """

    n_vertices: int
    edges: dict[int, tuple[Dart, Dart]]  # label -> (tail dart, head dart)
    faces: tuple[tuple[Dart, ...], ...]
    unbounded: int
    labels: tuple[tuple[int, int, int, int], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges) if self.n_vertices else 1

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def theta(self, d: Dart) -> Dart:
        a, b = self.edges[self.labels[d[0]][d[1]]]
        return b if a == d else a

    @staticmethod
    def sigma(d: Dart, k: int = 1) -> Dart:
        return (d[0], (d[1] + k) % 4)

    @cached_property
    def face_of(self) -> dict[Dart, int]:
        return {d: f for f, cyc in enumerate(self.faces) for d in cyc}

    def corner_face(self, v: int, k: int) -> int:
        """Face containing the corner between slots ``k`` and ``k+1`` at ``v``."""
        return self.face_of[(v, (k + 1) % 4)]

    def bounded_faces(self) -> list[int]:
        return [f for f in range(self.n_faces) if f != self.unbounded]

    def euler(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces


def shadow(d: KnotDiagram) -> Shadow4Valent:
    if d.c == 0:
        return Shadow4Valent(0, {}, ((), ()), 0, ())
    occ = _slot_table(d.crossings)
    edges = {}
    for lab, (a, b) in occ.items():
        edges[lab] = (b, a) if d.is_incoming(a) else (a, b)
    faces = tuple(tuple(f) for f in _faces(d.crossings))
    # face on the left of label 1 = right of its head dart
    head = edges[min(edges)][1]
    unb = next(i for i, f in enumerate(faces) if head in f)
    return Shadow4Valent(d.c, edges, faces, unb, d.crossings)


# ---------------------------------------------------------------- random diagrams


def braid_closure(word: list[int], n_strands: int, name: str | None = None) -> KnotDiagram:
    """PD code of the closure of a braid word (``±i`` for ``sigma_i^{±1}``).

    The permutation of the braid must be a single cycle.
    """
    pos = list(range(1, n_strands + 1))  # current edge label at each position
    nxt = n_strands + 1
    crossings = []
    for g in word:
        i = abs(g) - 1
        a, b = pos[i], pos[i + 1]
        new_l, new_r = nxt, nxt + 1
        nxt += 2
        if g > 0:
            crossings.append([b, new_r, new_l, a])
        else:
            crossings.append([a, b, new_r, new_l])
        pos[i], pos[i + 1] = new_l, new_r
    # identify top labels with bottom labels
    ren = {pos[j]: j + 1 for j in range(n_strands)}
    crossings = [[ren.get(v, v) for v in x] for x in crossings]
    occ: dict[int, int] = {}
    for x in crossings:
        for v in x:
            occ[v] = occ.get(v, 0) + 1
    if any(k != 2 for k in occ.values()):
        raise MultiComponent("braid closure has an untouched strand")
    raw = tuple(tuple(x) for x in crossings)
    inc = _orient(raw)
    order = _walk(raw, inc)
    if len(order) != len(occ):
        raise MultiComponent("braid closure is a link")
    relabel = {lab: k + 1 for k, lab in enumerate(order)}
    return KnotDiagram(tuple(tuple(relabel[v] for v in x) for x in raw), name=name)


def random_diagram(rng: random.Random, max_crossings: int = 8, min_crossings: int = 1) -> KnotDiagram:
    """A random knot diagram from a braid closure whose permutation is one cycle."""
    while True:
        c = rng.randint(min_crossings, max_crossings)
        n = rng.randint(2, min(4, c + 1)) if c >= 2 else 2
        word = [rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(c)]
        perm = list(range(n))
        for g in word:
            i = abs(g) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        seen, j, steps = set(), 0, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            steps += 1
        if steps != n or len({abs(g) for g in word}) != n - 1:
            continue
        return braid_closure(word, n)
