"""Exact Laurent polynomials in q over the integers.

These back the Kauffman bracket and Jones polynomial state sums, and the
graded Euler characteristics of the homology engines.  Everything is exact
integer arithmetic; coefficients are stored sparsely by exponent.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Tuple


class NotDivisible(Exception):
    """Exact Laurent division left a remainder."""


class LaurentPoly:
    """A Laurent polynomial sum(c_e * q^e) with integer coefficients.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, int] | Iterable[Tuple[int, int]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: Dict[int, int] = {}
        for e, c in items:
            if c:
                acc[e] = acc.get(e, 0) + c
                if not acc[e]:
                    del acc[e]
        self._coeffs = {e: acc[e] for e in sorted(acc)}

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    @classmethod
    def q(cls, exponent: int = 1, coeff: int = 1) -> "LaurentPoly":
        return cls({exponent: coeff})

    def coefficient(self, exponent: int) -> int:
        return self._coeffs.get(exponent, 0)

    def items(self):
        return self._coeffs.items()

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def min_degree(self) -> int:
        if not self._coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self._coeffs)

    def max_degree(self) -> int:
        if not self._coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self._coeffs)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc = dict(self._coeffs)
        for e, c in other._coeffs.items():
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        acc = dict(self._coeffs)
        for e, c in other._coeffs.items():
            acc[e] = acc.get(e, 0) - c
        return LaurentPoly(acc)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._coeffs.items()})

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self._coeffs.items()})
        acc: Dict[int, int] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers are not defined for polynomials")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, m: int) -> "LaurentPoly":
        """Multiply by q^m."""
        return LaurentPoly({e + m: c for e, c in self._coeffs.items()})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises NotDivisible if a remainder is left."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        rem = dict(self._coeffs)
        lead = other.max_degree()
        lead_c = other.coefficient(lead)
        out: Dict[int, int] = {}
        while rem:
            top = max(rem)
            c, r = divmod(rem[top], lead_c)
            if r:
                raise NotDivisible(f"coefficient {rem[top]} not divisible by {lead_c}")
            e = top - lead
            out[e] = c
            for oe, oc in other._coeffs.items():
                k = oe + e
                rem[k] = rem.get(k, 0) - oc * c
                if not rem[k]:
                    del rem[k]
        return LaurentPoly(out)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __str__(self) -> str:
        """Render like ``q^6 + q^4 + q^2 + 1``, exponents descending.

        The q^0 term is rendered as a bare integer; q^1 as ``q``.
        """
        if not self._coeffs:
            return "0"
        parts = []
        for e in sorted(self._coeffs, reverse=True):
            c = self._coeffs[e]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                var = "q" if e == 1 else f"q^{e}"
                body = var if mag == 1 else f"{mag}{var}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def parse_laurent(text: str) -> LaurentPoly:
    """Parse the textual form produced by str(LaurentPoly)."""
    text = text.strip()
    if text == "0":
        return LaurentPoly.zero()
    tokens = text.replace("-", "+-").split("+")
    acc: Dict[int, int] = {}
    for tok in tokens:
        tok = tok.strip()
        if not tok:
            continue
        neg = tok.startswith("-")
        if neg:
            tok = tok[1:].strip()
        if "q" in tok:
            head, _, tail = tok.partition("q")
            coeff = int(head) if head.strip() else 1
            exp = int(tail[1:]) if tail.startswith("^") else 1
        else:
            coeff = int(tok)
            exp = 0
        acc[exp] = acc.get(exp, 0) + (-coeff if neg else coeff)
    return LaurentPoly(acc)


# q + q^-1, the graded dimension of the rank-2 circle module.
def circle_poly() -> LaurentPoly:
    return LaurentPoly({1: 1, -1: 1})


# ---------------------------------------------------------------------------
# Kauffman bracket and Jones polynomial (state sums)
# ---------------------------------------------------------------------------

def kauffman_bracket(d) -> LaurentPoly:
    """State sum over all 2^n resolutions: sum (-q)^|u| (q+q^-1)^|D_u|.

    Exponential in the crossing number; kept as an independent oracle for
    the homology engines.
    """
    import itertools

    from .links import resolve

    circ = circle_poly()
    total = LaurentPoly.zero()
    for u in itertools.product((0, 1), repeat=d.n):
        w = sum(u)
        r = resolve(d, u)
        total = total + LaurentPoly({w: (-1) ** w}) * circ ** r.circle_count
    return total


def unnormalized_jones(d) -> LaurentPoly:
    """J_hat(L) = (-1)^{n_-} q^{n_+ - 2 n_-} <L>."""
    shift = d.n_pos - 2 * d.n_neg
    return kauffman_bracket(d) * LaurentPoly({shift: (-1) ** d.n_neg})


def normalized_jones(d) -> LaurentPoly:
    """J(L) = J_hat(L) / (q + q^-1); exact for every nonempty link."""
    if d.n == 0 and d.total_free == 0:
        raise ValueError("normalized Jones needs a nonempty link")
    return unnormalized_jones(d).exact_div(circle_poly())
