"""Dimension bookkeeping for instanton L-space surgeries.

A knot whose instanton knot homology has rank one in Alexander gradings
``0, ±(g-1), ±g`` and vanishes elsewhere (with ``g >= 2``) is an instanton
L-space knot.  This module records the graded dimensions of the sutured
instanton homology of the knot complement for the two slopes used in that
argument, and evaluates the closed-form dimension of framed instanton
homology of rational surgeries.

Gradings for slopes with even ``q`` are half-integers; tables store them
doubled so everything stays an integer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import HypothesisNotMet, InvalidGenus, InvalidInput, InvalidSlope


@dataclass(frozen=True)
class GradingProfile:
    g: int
    dims: dict[int, int]

    def __post_init__(self):
        if self.g < 1:
            raise InvalidInput("genus must be positive")
        for i, d in self.dims.items():
            if d < 0:
                raise InvalidInput(f"negative dimension at grading {i}")
            if abs(i) > self.g and d:
                raise InvalidInput(f"grading {i} lies outside [-g, g]")
            if self.dims.get(-i, 0) != d:
                raise InvalidInput(f"dims not symmetric at grading {i}")
        if self.dim(self.g) < 1:
            raise InvalidInput("top grading must be nonzero")

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def total(self) -> int:
        return sum(self.dims.values())


def lspace_profile(g: int) -> GradingProfile:
    """The profile singled out by :func:`matches_hypothesis`."""
    return GradingProfile(g, {i: 1 for i in {0, g - 1, 1 - g, g, -g}})


def matches_hypothesis(prof: GradingProfile) -> bool:
    if prof.g < 2:
        return False
    wanted = {0, prof.g - 1, prof.g}
    return all(prof.dim(i) == (1 if abs(i) in wanted else 0) for i in range(-prof.g, prof.g + 1))


@dataclass(frozen=True)
class SlopeDimTable:
    """Graded dimensions for the suture of slope ``p/q`` on the knot complement.

    ``dims2`` is keyed by twice the grading.  ``partial`` tables only record a
    window of gradings; ``inferred`` lists (doubled) gradings whose values are
    deduced rather than read off directly.
    """

    p: int
    q: int
    g: int
    dims2: dict[int, int]
    partial: bool = False
    inferred: frozenset[int] = field(default_factory=frozenset)

    @property
    def half_integer(self) -> bool:
        return self.q % 2 == 0

    @property
    def top(self) -> Fraction:
        return self.g + Fraction(abs(self.q) - 1, 2)

    def dim(self, i) -> int:
        two_i = Fraction(i) * 2
        if two_i.denominator != 1:
            raise InvalidInput(f"grading {i} is not a half-integer")
        return self.dims2.get(int(two_i), 0)

    def gradings(self) -> list[Fraction]:
        return [Fraction(k, 2) for k in sorted(self.dims2)]

    def total(self) -> int:
        return sum(self.dims2.values())

    def check(self) -> list[str]:
        """Violated table invariants (empty when the table is consistent)."""
        bad = []
        if gcd(self.p, self.q) != 1:
            bad.append("slope not reduced")
        parity = 1 if self.half_integer else 0
        for k, d in self.dims2.items():
            if k % 2 != parity:
                bad.append(f"grading {Fraction(k, 2)} has the wrong parity")
            if self.dims2.get(-k, 0) != d:
                bad.append(f"not symmetric at {Fraction(k, 2)}")
            if d and abs(Fraction(k, 2)) > self.top:
                bad.append(f"grading {Fraction(k, 2)} beyond the support bound {self.top}")
        if not self.partial and self.dim(self.top) == 0:
            bad.append("top grading vanishes")
        return bad


def _require_genus(g: int):
    if g < 2:
        raise HypothesisNotMet(f"genus {g}: the hypothesis needs g >= 2")


def _check_profile(g: int, prof: GradingProfile | None):
    _require_genus(g)
    if prof is not None and (prof.g != g or not matches_hypothesis(prof)):
        raise HypothesisNotMet("grading profile does not match the L-space shape")


def ladder_one_minus(g: int, prof: GradingProfile | None = None) -> SlopeDimTable:
    """Graded dimensions for slope ``1 / (-2g-1)``.

    Rank one at ``±2g``, zero for ``g+1 <= |i| <= 2g-1``, rank one for
    ``|i| <= g``.  The values at ``±1`` are inferred from symmetry of the
    ladder rather than stated directly, and flagged as such.
    """
    _check_profile(g, prof)
    dims: dict[int, int] = {}
    for i in range(-2 * g, 2 * g + 1):
        a = abs(i)
        dims[2 * i] = 1 if a == 2 * g or a <= g else 0
    dims = {k: v for k, v in dims.items() if v}
    return SlopeDimTable(1, -2 * g - 1, g, dims, inferred=frozenset({2, -2}))


def middle_table(g: int, prof: GradingProfile | None = None) -> SlopeDimTable:
    """Graded dimensions for slope ``2 / (-4g-1)`` in gradings ``|i| <= g``."""
    _check_profile(g, prof)
    dims = {2 * i: 1 for i in range(-g, g + 1)}
    return SlopeDimTable(2, -4 * g - 1, g, dims, partial=True)


def i_sharp_at_minus(g: int, prof: GradingProfile | None = None) -> int:
    """dim of framed instanton homology of ``-2g-1`` surgery."""
    t = middle_table(g, prof)
    total = sum(t.dim(i) for i in range(-g, g + 1))
    if total != abs(-2 * g - 1):
        raise AssertionError(f"dimension {total} is not |-2g-1| = {2 * g + 1}")
    return total


@dataclass(frozen=True)
class SurgeryQuery:
    p: int
    q: int
    g: int
    scenario: int = 1

    def __post_init__(self):
        if self.q < 1 or gcd(self.p, self.q) != 1:
            raise InvalidSlope(f"slope {self.p}/{self.q} must have q >= 1 and gcd(p, q) = 1")
        if self.g < 2:
            raise InvalidGenus(f"genus {self.g} < 2")
        if self.scenario not in (1, 2):
            raise InvalidInput(f"scenario must be 1 or 2, got {self.scenario}")

    @property
    def r(self) -> Fraction:
        return Fraction(self.p, self.q)


def surgery_dim(query: SurgeryQuery) -> int:
    p, q, g = query.p, query.q, query.g
    if query.scenario == 1:
        return p if p >= (2 * g - 1) * q else (4 * g - 2) * q - p
    return -p if p <= (1 - 2 * g) * q else (4 * g - 2) * q + p


def surgery_dims(p: int, q: int, g: int) -> tuple[int, int]:
    """Both scenarios; exactly one of them applies to a given knot."""
    return surgery_dim(SurgeryQuery(p, q, g, 1)), surgery_dim(SurgeryQuery(p, q, g, 2))


def parse_slope(text: str) -> tuple[int, int]:
    """``"P/Q"`` or ``"P"`` to a pair, not yet validated."""
    try:
        if "/" in text:
            a, b = text.split("/", 1)
            return int(a), int(b)
        return int(text), 1
    except ValueError as exc:
        raise InvalidSlope(f"cannot parse slope {text!r}") from exc


def parse_slope_grid(spec: str) -> list[tuple[int, int]]:
    """Slopes from ``"PMIN:PMAX/QMIN:QMAX"`` (unreduced pairs skipped) or a
    comma-separated list of ``P/Q``."""
    if ":" in spec:
        try:
            ps, qs = spec.split("/", 1)
            p0, p1 = (int(x) for x in ps.split(":"))
            q0, q1 = (int(x) for x in qs.split(":")) if ":" in qs else (int(qs), int(qs))
        except ValueError as exc:
            raise InvalidSlope(f"cannot parse slope grid {spec!r}") from exc
        return [(p, q) for q in range(q0, q1 + 1) for p in range(p0, p1 + 1)
                if q >= 1 and gcd(p, q) == 1]
    return [parse_slope(s.strip()) for s in spec.split(",") if s.strip()]
