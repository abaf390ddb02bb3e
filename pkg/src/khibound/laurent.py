"""Integer Laurent polynomials in one variable ``t``.

Coefficients are stored sparsely as ``{exponent: coefficient}`` with no zero
entries, so equality and hashing are structural.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class LaurentPoly:
    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = int(v)
                if v:
                    c[int(e)] = c.get(int(e), 0) + v
                    if c[int(e)] == 0:
                        del c[int(e)]
        self._c = c

    @classmethod
    def constant(cls, v: int) -> "LaurentPoly":
        return cls({0: v})

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0) -> "LaurentPoly":
        """Build from a dense coefficient list starting at exponent ``low``."""
        return cls({low + k: v for k, v in enumerate(coeffs)})

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self._c)

    def coefficient(self, e: int) -> int:
        return self._c.get(e, 0)

    def is_zero(self) -> bool:
        return not self._c

    @property
    def max_exp(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree")
        return max(self._c)

    @property
    def min_exp(self) -> int:
        if not self._c:
            raise ValueError("zero polynomial has no degree")
        return min(self._c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        out = dict(self._c)
        for e, v in other._c.items():
            out[e] = out.get(e, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: v * other for e, v in self._c.items()})
        out: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + v1 * v2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t**k``."""
        return LaurentPoly({e + k: v for e, v in self._c.items()})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Divide exactly; raises ``ArithmeticError`` if ``other`` does not divide ``self``."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        rem = dict(self._c)
        dlead_e = other.max_exp
        dlead = other._c[dlead_e]
        floor = self.min_exp - other.min_exp
        quot: dict[int, int] = {}
        while rem:
            top = max(rem)
            shift = top - dlead_e
            q, r = divmod(rem[top], dlead)
            if r or shift < floor:
                raise ArithmeticError("inexact division")
            quot[shift] = q
            for e, v in other._c.items():
                k = e + shift
                nv = rem.get(k, 0) - q * v
                if nv:
                    rem[k] = nv
                else:
                    rem.pop(k, None)
        return LaurentPoly(quot)

    def __call__(self, t):
        if isinstance(t, int):
            t = Fraction(t)
        out = sum((v * t**e for e, v in self._c.items()), Fraction(0) if isinstance(t, Fraction) else 0)
        if isinstance(out, Fraction) and out.denominator == 1:
            return int(out)
        return out

    def evaluate(self, t):
        return self(t)

    def l1_norm(self) -> int:
        return sum(abs(v) for v in self._c.values())

    def is_symmetric(self) -> bool:
        return all(self._c.get(-e, 0) == v for e, v in self._c.items())

    def normalized(self) -> "LaurentPoly":
        """Return ``±t**k * self`` that is symmetric under t -> 1/t with value 1 at t = 1.

        Raises ``ValueError`` when no such normalisation exists (odd span or
        ``|p(1)| != 1``).
        """
        if self.is_zero():
            raise ValueError("cannot normalise the zero polynomial")
        lo, hi = self.min_exp, self.max_exp
        if (lo + hi) % 2:
            raise ValueError(f"odd span polynomial cannot be symmetrised: {self}")
        p = self.shift(-(lo + hi) // 2)
        v1 = p(1)
        if v1 not in (1, -1):
            raise ValueError(f"p(1) = {v1}; not an Alexander polynomial")
        return p * v1

    def to_json(self) -> dict[str, int]:
        return {str(e): v for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, d: Mapping[str, int]) -> "LaurentPoly":
        return cls({int(e): v for e, v in d.items()})

    def __repr__(self):
        return f"LaurentPoly({self._c!r})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e in sorted(self._c, reverse=True):
            v = self._c[e]
            sign = "-" if v < 0 else "+"
            a = abs(v)
            if e == 0:
                body = str(a)
            else:
                mono = "t" if e == 1 else f"t^{e}"
                body = mono if a == 1 else f"{a}{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def parse_laurent(text: str) -> LaurentPoly:
    """Parse strings like ``"t^2 - 3t + 5 - 3t^-1 + t^-2"``."""
    import re

    s = text.replace(" ", "").replace("{", "").replace("}", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"([+-])(\d*)(t(?:\^(-?\d+))?)?", s)
    consumed = "".join(a + b + c for a, b, c, _ in terms)
    if consumed != s:
        raise ValueError(f"cannot parse polynomial {text!r}")
    out: dict[int, int] = {}
    for sign, num, tpart, exp in terms:
        if not num and not tpart:
            raise ValueError(f"cannot parse polynomial {text!r}")
        v = int(num) if num else 1
        if sign == "-":
            v = -v
        e = 0 if not tpart else (int(exp) if exp else 1)
        out[e] = out.get(e, 0) + v
    return LaurentPoly(out)
