"""Exact arithmetic in the ring Q[sqrt(k) : k squarefree].

An element is a finite sum  sum_k c_k * sqrt(k)  over squarefree integers
k >= 1 with nonzero rational coefficients c_k; the k = 1 slot is the rational
part.  Products reduce by pulling square factors out of sqrt(j)*sqrt(k), so
every element has one canonical form and equality is a dictionary comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

# Radicands stay inside one machine word.  Python ints never wrap, so this is
# an explicit refusal rather than an overflow guard.
RADICAND_LIMIT = 2**63 - 1

_Scalar = Union[int, Fraction]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s*s*m and m squarefree, by trial division."""
    if n <= 0:
        raise ValueError("radicand must be positive, got %r" % n)
    if n > RADICAND_LIMIT:
        raise OverflowError("radicand %d exceeds the machine-word bound" % n)
    s, m = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                m *= d
        d += 1 if d == 2 else 2
    return s, m * n


class Radical:
    """Immutable element of Q[sqrt(k)], stored as {squarefree radicand: Fraction}."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[int, Fraction] | None = None):
        clean: dict[int, Fraction] = {}
        if terms:
            for k, c in terms.items():
                if k <= 0:
                    raise ValueError("radicand must be positive, got %r" % k)
                if k > RADICAND_LIMIT:
                    raise OverflowError("radicand %d exceeds the machine-word bound" % k)
                c = Fraction(c)
                if c:
                    clean[k] = c
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def from_rational(cls, q: _Scalar) -> "Radical":
        return cls({1: Fraction(q)})

    @classmethod
    def sqrt(cls, n: int) -> "Radical":
        """sqrt(n) for a positive integer n, reduced to canonical form."""
        s, m = _squarefree_split(n)
        return cls({m: Fraction(s)})

    @classmethod
    def inv_sqrt(cls, n: int) -> "Radical":
        """1/sqrt(n):  with n = s*s*m squarefree-split this is sqrt(m)/(s*m)."""
        s, m = _squarefree_split(n)
        return cls({m: Fraction(1, s * m)})

    @classmethod
    def inv_sqrt_rational(cls, q: _Scalar) -> "Radical":
        """1/sqrt(q) for a positive rational q = a/b, via 1/sqrt(ab) * b."""
        q = Fraction(q)
        if q <= 0:
            raise ValueError("inv_sqrt_rational needs a positive rational")
        return cls.inv_sqrt(q.numerator * q.denominator) * q.denominator

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "Radical | None":
        if isinstance(other, Radical):
            return other
        if isinstance(other, (int, Fraction)):
            return Radical.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Radical(out)

    __radd__ = __add__

    def __neg__(self):
        return Radical({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for j, a in self._terms.items():
            for k, b in o._terms.items():
                s, m = _squarefree_split(j * k)
                c = out.get(m, Fraction(0)) + a * b * s
                if c:
                    out[m] = c
                elif m in out:
                    del out[m]
        return Radical(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(k == 1 for k in self._terms)

    def rational_part(self) -> Fraction:
        return self._terms.get(1, Fraction(0))

    def terms(self) -> Iterable[tuple[int, Fraction]]:
        return sorted(self._terms.items())

    # -- float side ---------------------------------------------------------

    def evalf(self) -> float:
        """Float value; each sqrt is one correctly-rounded double, so the
        error is bounded by a few ulp per term."""
        return sum(float(c) * math.sqrt(k) for k, c in self._terms.items())

    # -- text form ----------------------------------------------------------

    def text(self) -> str:
        """Canonical text: '+'-joined `p/q*sqrt(k)` terms sorted by radicand,
        rational slot printed bare.  Round-trips exactly through parse_radical."""
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items()):
            body = str(c) if k == 1 else "%s*sqrt(%d)" % (c, k)
            parts.append(body)
        out = parts[0]
        for body in parts[1:]:
            out += body if body.startswith("-") else "+" + body
        return out

    def __repr__(self):
        return "Radical(%s)" % self.text()


ZERO = Radical()
ONE = Radical.from_rational(1)


def parse_radical(text: str) -> Radical:
    """Parse the canonical text form (spaces tolerated, signs inline)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty radical literal")
    if s == "0":
        return Radical()
    # split into signed chunks without touching the '-' inside no chunk
    chunks: list[str] = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0:
            chunks.append(cur)
            cur = ch if ch == "-" else ""
        else:
            cur += ch
    chunks.append(cur)
    total: dict[int, Fraction] = {}
    for chunk in chunks:
        if not chunk or chunk in "+-":
            raise ValueError("malformed radical literal %r" % text)
        coef, rad = chunk, 1
        if "sqrt(" in chunk:
            coef, _, tail = chunk.partition("sqrt(")
            if not tail.endswith(")"):
                raise ValueError("unterminated sqrt(...) in %r" % text)
            rad = int(tail[:-1])
            coef = coef[:-1] if coef.endswith("*") else coef
            if coef in ("", "-"):
                coef += "1"
        try:
            c = Fraction(coef)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("bad coefficient %r in %r" % (coef, text)) from exc
        term = Radical.sqrt(rad) * c
        for k, v in term._terms.items():
            nv = total.get(k, Fraction(0)) + v
            if nv:
                total[k] = nv
            elif k in total:
                del total[k]
    return Radical(total)
