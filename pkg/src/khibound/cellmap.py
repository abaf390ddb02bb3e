"""Oriented cellular maps on closed surfaces (rotation systems with darts).

This is the construction-time scratch structure: every face is a disk, so
the rotation system alone determines the surface.  Curves are drawn by
subdividing edges and inserting new edges inside faces.

Conventions: ``sigma[d]`` is the next dart counterclockwise around the origin
vertex of ``d``; ``theta[d]`` is the reverse dart.  The face orbit of ``d``
under ``sigma . theta`` is the face on the right of ``d``, and the corner
between ``x`` and ``sigma[x]`` lies on the left of ``x``.
"""

from __future__ import annotations


class CellMap:
    def __init__(self):
        self.theta: list[int] = []
        self.sigma: list[int] = []
        self.label: list[tuple] = []
        self.rcell: list[int] = []  # base face on the right of each dart

    # -- construction ------------------------------------------------------

    @classmethod
    def from_faces(cls, edges: dict, faces: list[list[tuple]]) -> tuple["CellMap", dict]:
        """Build a map from edge ids and faces.

        ``edges`` maps an edge id to its label.  Each face is a list of
        ``(edge_id, forward)`` pairs traversed with the face on the left.
        Returns the map and ``{(edge_id, forward): dart}``.
        """
        m = cls()
        dart = {}
        for eid, lab in edges.items():
            a, b = len(m.theta), len(m.theta) + 1
            m.theta += [b, a]
            m.sigma += [-1, -1]
            m.label += [lab, lab]
            m.rcell += [-1, -1]
            dart[(eid, True)] = a
            dart[(eid, False)] = b
        for fi, face in enumerate(faces):
            ds = [dart[s] for s in face]
            for d in ds:
                m.rcell[m.theta[d]] = fi
            for k, d in enumerate(ds):
                nxt = ds[(k + 1) % len(ds)]
                if m.sigma[nxt] != -1:
                    raise ValueError(f"dart {nxt} used twice as a face successor")
                m.sigma[nxt] = m.theta[d]
        if -1 in m.sigma:
            raise ValueError("some darts are not on any face")
        return m, dart

    # -- queries ----------------------------------------------------------

    def n_darts(self) -> int:
        return len(self.theta)

    def vertex_orbits(self) -> list[list[int]]:
        return _orbits(self.sigma)

    def face_orbits(self) -> list[list[int]]:
        phi = [self.sigma[self.theta[d]] for d in range(len(self.theta))]
        return _orbits(phi)

    def face_index(self) -> list[int]:
        out = [0] * len(self.theta)
        for i, cyc in enumerate(self.face_orbits()):
            for d in cyc:
                out[d] = i
        return out

    def euler(self) -> int:
        return len(self.vertex_orbits()) - len(self.theta) // 2 + len(self.face_orbits())

    def vertex_darts(self, d: int) -> list[int]:
        out = [d]
        x = self.sigma[d]
        while x != d:
            out.append(x)
            x = self.sigma[x]
        return out

    def prev(self, d: int) -> int:
        x = d
        while self.sigma[x] != d:
            x = self.sigma[x]
        return x

    # -- edits --------------------------------------------------------------

    def _new_pair(self, lab, ca=-1, cb=-1) -> tuple[int, int]:
        a, b = len(self.theta), len(self.theta) + 1
        self.theta += [b, a]
        self.sigma += [a, b]
        self.label += [lab, lab]
        self.rcell += [ca, cb]
        return a, b

    def subdivide(self, x: int) -> tuple[int, int]:
        """Put a new vertex on the edge of ``x`` next to the origin of ``x``.

        Returns ``(back, fwd)``: the darts at the new vertex pointing to the
        origin of ``x`` and away from it.  ``x`` keeps ending at the new vertex.
        """
        y = self.theta[x]
        back, fwd = self._new_pair(self.label[x], self.rcell[y], self.rcell[x])
        self.theta[x], self.theta[back] = back, x
        self.theta[y], self.theta[fwd] = fwd, y
        self.sigma[back], self.sigma[fwd] = fwd, back
        return back, fwd

    def insert_edge(self, x: int, y: int, lab) -> tuple[int, int]:
        """Insert an edge from the corner after ``x`` to the corner after ``y``.

        Both corners must lie on the same face; returns the new darts
        ``(at x's vertex, at y's vertex)``.
        """
        fx = self.face_of_corner(x)
        fy = self.face_of_corner(y)
        if fx != fy:
            raise ValueError("corners are on different faces")
        cell = self.rcell[self.theta[x]]
        a, b = self._new_pair(lab, cell, cell)
        sx, sy = self.sigma[x], self.sigma[y]
        self.sigma[x], self.sigma[a] = a, sx
        if y == x:
            # both ends in the same corner: order x -> a -> b -> old sigma
            self.sigma[a], self.sigma[b] = b, sx
        else:
            self.sigma[y], self.sigma[b] = b, sy
        return a, b

    def face_of_corner(self, x: int) -> frozenset:
        """Face (as a frozenset of darts) containing the corner after ``x``."""
        d = self.theta[x]
        out = [d]
        e = self.sigma[self.theta[d]]
        while e != d:
            out.append(e)
            e = self.sigma[self.theta[e]]
        return frozenset(out)


def _orbits(perm: list[int]) -> list[list[int]]:
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
