"""Exact arithmetic for q-Laurent polynomials, truncated x-series and cyclotomic numbers.

All exponents of q and x are stored as doubled integers, so half-integer
powers such as q^{1/2} or (qx)^{(j+j'+1)/2} stay exact.  Coefficients are
arbitrary-precision integers, with Fractions allowed wherever a division
produces them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping


def _clean(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if c}


class HalfLaurent:
    """Laurent polynomial in q^{1/2}.

    Terms are kept in a dict mapping doubled exponent -> coefficient, so
    ``q^{3/2}`` is stored under key 3 and ``q^{-2}`` under key -4.
    Instances are treated as immutable; every operation returns a new value.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        self.terms = _clean(dict(terms)) if terms else {}

    @staticmethod
    def monomial(coeff, q2: int = 0) -> "HalfLaurent":
        return HalfLaurent({q2: coeff}) if coeff else HalfLaurent()

    @staticmethod
    def const(coeff) -> "HalfLaurent":
        return HalfLaurent.monomial(coeff, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = HalfLaurent.const(other)
        if not isinstance(other, HalfLaurent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "HalfLaurent":
        if isinstance(other, int):
            other = HalfLaurent.const(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            nc = out.get(e, 0) + c
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
        res = HalfLaurent.__new__(HalfLaurent)
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self) -> "HalfLaurent":
        res = HalfLaurent.__new__(HalfLaurent)
        res.terms = {e: -c for e, c in self.terms.items()}
        return res

    def __sub__(self, other) -> "HalfLaurent":
        if isinstance(other, int):
            other = HalfLaurent.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "HalfLaurent":
        return (-self) + other

    def __mul__(self, other) -> "HalfLaurent":
        if isinstance(other, (int, Fraction)):
            if not other:
                return HalfLaurent()
            res = HalfLaurent.__new__(HalfLaurent)
            res.terms = {e: c * other for e, c in self.terms.items()}
            return res
        if not isinstance(other, HalfLaurent):
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                k = e1 + e2
                nc = out.get(k, 0) + c1 * c2
                if nc:
                    out[k] = nc
                else:
                    out.pop(k, None)
        res = HalfLaurent.__new__(HalfLaurent)
        res.terms = out
        return res

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HalfLaurent":
        if n < 0:
            raise ValueError("negative powers are not Laurent polynomials in general")
        result = HalfLaurent.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, q2: int) -> "HalfLaurent":
        """Multiply by q^{q2/2}."""
        res = HalfLaurent.__new__(HalfLaurent)
        res.terms = {e + q2: c for e, c in self.terms.items()}
        return res

    def q_inverse(self) -> "HalfLaurent":
        """Substitute q -> q^{-1}."""
        res = HalfLaurent.__new__(HalfLaurent)
        res.terms = {-e: c for e, c in self.terms.items()}
        return res

    def min_q2(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return min(self.terms)

    def max_q2(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(self.terms)

    def coeff(self, q2: int):
        return self.terms.get(q2, 0)

    def has_integer_exponents(self) -> bool:
        return all(e % 2 == 0 for e in self.terms)

    def evaluate(self, q):
        """Evaluate at a numeric q (Fraction or float); q must be nonzero."""
        total = 0
        for e, c in self.terms.items():
            if e % 2 == 0:
                total += c * q ** (e // 2)
            else:
                total += c * q ** (e / 2)
        return total

    def divexact(self, other: "HalfLaurent") -> "HalfLaurent":
        """Exact division; raises ValueError when the remainder is nonzero."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return HalfLaurent()
        rem = dict(self.terms)
        dlead = other.max_q2()
        dcoeff = other.terms[dlead]
        dwidth = dlead - other.min_q2()
        out: dict = {}
        while rem:
            rlead = max(rem)
            if rlead - min(rem) < dwidth:
                raise ValueError("division did not reduce; remainder nonzero")
            c = rem[rlead]
            if isinstance(c, int) and isinstance(dcoeff, int) and c % dcoeff == 0:
                f = c // dcoeff
            else:
                f = Fraction(c) / Fraction(dcoeff)
                if f.denominator == 1:
                    f = f.numerator
            shift = rlead - dlead
            out[shift] = f
            for e, dc in other.terms.items():
                k = e + shift
                nc = rem.get(k, 0) - f * dc
                if nc:
                    rem[k] = nc
                else:
                    rem.pop(k, None)
            if rem and max(rem) >= rlead:
                raise ValueError("division did not reduce; remainder nonzero")
        return HalfLaurent(out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                bits.append(f"{c}")
            else:
                pw = f"q^{e // 2}" if e % 2 == 0 else f"q^{e}/2".replace(f"{e}/2", f"({e}/2)")
                if c == 1:
                    bits.append(pw)
                elif c == -1:
                    bits.append(f"-{pw}")
                else:
                    bits.append(f"{c}*{pw}")
        s = " + ".join(bits).replace("+ -", "- ")
        return s


HL_ZERO = HalfLaurent()
HL_ONE = HalfLaurent.const(1)


def quantum_brace(n: int) -> HalfLaurent:
    """{n} = q^{n/2} - q^{-n/2}."""
    if n == 0:
        return HalfLaurent()
    return HalfLaurent({n: 1, -n: -1})


def quantum_int(n: int) -> HalfLaurent:
    """[n] = {n}/{1} = q^{(n-1)/2} + q^{(n-3)/2} + ... + q^{-(n-1)/2}."""
    if n == 0:
        return HalfLaurent()
    if n > 0:
        return HalfLaurent({e2: 1 for e2 in range(-(n - 1), n, 2)})
    return HalfLaurent({e2: -1 for e2 in range(-(-n - 1), -n, 2)})


def qbinom_balanced(n: int, k: int) -> HalfLaurent:
    """[n k]_q = q^{(n-k)k/2} [n][n-1]...[n-k+1] / ([k]...[1]).

    Defined for any integer n and k >= 0; always lands in Z[q^{+-1}]
    (integer exponents only).  Equals (q^n; q^{-1})_k / (q; q)_k.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    num = HL_ONE
    for t in range(k):
        num = num * (HL_ONE - HalfLaurent.monomial(1, 2 * (n - t)))
    den = HL_ONE
    for t in range(1, k + 1):
        den = den * (HL_ONE - HalfLaurent.monomial(1, 2 * t))
    return num.divexact(den)


class XSeries:
    """Series in x^{1/2} with HalfLaurent coefficients, truncated above.

    ``coeffs`` maps doubled x-exponent to a HalfLaurent; ``order2`` is the
    doubled truncation order (terms with x-exponent >= order2/2 are unknown
    and never stored).  ``order2=None`` marks an exact polynomial value with
    no truncation.
    """

    __slots__ = ("coeffs", "order2")

    def __init__(self, coeffs: Mapping[int, HalfLaurent] | None = None,
                 order2: int | None = None):
        cc = {}
        if coeffs:
            for e, c in coeffs.items():
                if not isinstance(c, HalfLaurent):
                    c = HalfLaurent.const(c)
                if c and (order2 is None or e < order2):
                    cc[e] = c
        self.coeffs = cc
        self.order2 = order2

    @staticmethod
    def monomial(coeff: HalfLaurent, x2: int = 0, order2: int | None = None) -> "XSeries":
        return XSeries({x2: coeff}, order2)

    @staticmethod
    def const(c, order2: int | None = None) -> "XSeries":
        return XSeries({0: HalfLaurent.const(c)}, order2)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, XSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and self.order2 == other.order2

    def coeff(self, x2: int) -> HalfLaurent:
        return self.coeffs.get(x2, HL_ZERO)

    def min_x2(self) -> int:
        if not self.coeffs:
            raise ValueError("zero series has no degree")
        return min(self.coeffs)

    def truncate(self, order2: int | None) -> "XSeries":
        if order2 is None:
            return self
        if self.order2 is not None and self.order2 < order2:
            order2 = self.order2
        return XSeries({e: c for e, c in self.coeffs.items() if e < order2}, order2)

    def _join_order(self, other: "XSeries") -> int | None:
        if self.order2 is None:
            return other.order2
        if other.order2 is None:
            return self.order2
        return min(self.order2, other.order2)

    def __add__(self, other: "XSeries") -> "XSeries":
        order2 = self._join_order(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            nc = out.get(e, HL_ZERO) + c
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
        return XSeries(out, order2)

    def __neg__(self) -> "XSeries":
        return XSeries({e: -c for e, c in self.coeffs.items()}, self.order2)

    def __sub__(self, other: "XSeries") -> "XSeries":
        return self + (-other)

    def __mul__(self, other) -> "XSeries":
        if isinstance(other, (int, Fraction, HalfLaurent)):
            if isinstance(other, (int, Fraction)):
                other = HalfLaurent.const(other)
            return XSeries({e: c * other for e, c in self.coeffs.items()}, self.order2)
        if not isinstance(other, XSeries):
            return NotImplemented
        # truncation order of a product: each factor's unknown tail enters
        # shifted by the other factor's minimal exponent
        order2 = None
        if self.order2 is not None:
            order2 = self.order2 + (other.min_x2() if other.coeffs else 0)
        if other.order2 is not None:
            o = other.order2 + (self.min_x2() if self.coeffs else 0)
            order2 = o if order2 is None else min(order2, o)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                k = e1 + e2
                if order2 is not None and k >= order2:
                    continue
                nc = out.get(k, HL_ZERO) + c1 * c2
                if nc:
                    out[k] = nc
                else:
                    out.pop(k, None)
        return XSeries(out, order2)

    __rmul__ = __mul__

    def shift(self, q2: int = 0, x2: int = 0) -> "XSeries":
        """Multiply by the monomial q^{q2/2} x^{x2/2}."""
        order2 = None if self.order2 is None else self.order2 + x2
        return XSeries({e + x2: (c.shift(q2) if q2 else c) for e, c in self.coeffs.items()},
                       order2)

    def q_inverse(self) -> "XSeries":
        return XSeries({e: c.q_inverse() for e, c in self.coeffs.items()}, self.order2)

    def evaluate_q(self, q) -> dict:
        """Evaluate every coefficient at numeric q; returns {x2: value}."""
        return {e: c.evaluate(q) for e, c in self.coeffs.items()}

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"XSeries(0, order2={self.order2})"
        bits = []
        for e in sorted(self.coeffs):
            half = "" if e % 2 == 0 else "/2"
            ee = e // 2 if e % 2 == 0 else e
            bits.append(f"({self.coeffs[e]})*x^{ee}{half}")
        tail = "" if self.order2 is None else f" + O(x^{self.order2}/2)"
        return " + ".join(bits) + tail


XS_ONE = XSeries({0: HL_ONE})


def poch_multiply(s: XSeries, base: tuple[int, int], direction: int, length: int) -> XSeries:
    """Multiply s by the Pochhammer product prod_{i<length} (1 - q^{i*direction} * base).

    base is a monomial given as (q2, x2) doubled exponents with implicit
    coefficient 1.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    q2, x2 = base
    for t in range(length):
        factor = XSeries({0: HL_ONE, x2: HalfLaurent.monomial(-1, q2 + 2 * t * direction)})
        s = s * factor
    return s


def _geometric_divide(s: XSeries, q2: int, x2: int) -> XSeries:
    """Multiply s by 1/(1 - q^{q2/2} x^{x2/2}) expanded at x=0; requires x2 > 0."""
    if x2 <= 0:
        raise ValueError("geometric expansion at x=0 needs positive x-exponent")
    if s.order2 is None:
        raise ValueError("cannot invert a factor against an untruncated series")
    out = dict(s.coeffs)
    order2 = s.order2
    # repeatedly shift by the monomial and accumulate
    frontier = s.coeffs
    while frontier:
        nxt: dict = {}
        for e, c in frontier.items():
            k = e + x2
            if k >= order2:
                continue
            nxt[k] = c.shift(q2)
        for e, c in nxt.items():
            nc = out.get(e, HL_ZERO) + c
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
        frontier = nxt
    return XSeries(out, order2)


def poch_divide(s: XSeries, base: tuple[int, int], direction: int, length: int) -> XSeries:
    """Divide s by prod_{i<length} (1 - q^{i*direction} * base), expanding at x=0.

    Every factor must have positive x-exponent; factors carrying x^{-1}
    must be rewritten by the caller (see the state-sum module) before this
    is called.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    q2, x2 = base
    if length > 0 and x2 <= 0:
        raise ValueError("poch_divide requires base with positive x-exponent")
    for t in range(length):
        s = _geometric_divide(s, q2 + 2 * t * direction, x2)
    return s


def substitute_q_inverse(s: XSeries) -> XSeries:
    """q -> q^{-1} on every coefficient; an involution."""
    return s.q_inverse()


def _binom_frac(top: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= (top - i)
        out /= (i + 1)
    return out


def expand_at_one(c: HalfLaurent, h_order: int) -> list[Fraction]:
    """Exact Taylor coefficients of c(q = 1+h) up to and including h^{h_order}.

    Half-integer q-powers are expanded with the binomial series for
    (1+h)^{e/2}, which is exact over the rationals.
    """
    out = [Fraction(0)] * (h_order + 1)
    for e2, coeff in c.terms.items():
        top = Fraction(e2, 2)
        for k in range(h_order + 1):
            out[k] += Fraction(coeff) * _binom_frac(top, k)
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(p: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the p-th cyclotomic polynomial."""
    if p < 1:
        raise ValueError("p must be positive")
    # start from z^p - 1 and strip off Phi_d for proper divisors d
    poly = [-1] + [0] * (p - 1) + [1]
    for d in range(1, p):
        if p % d == 0:
            phi_d = list(cyclotomic_poly(d))
            poly = _polydiv_exact(poly, phi_d)
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for shift in range(len(out) - 1, -1, -1):
        c = num[shift + len(den) - 1]
        if c % den[-1] != 0:
            raise ValueError("inexact polynomial division")
        f = c // den[-1]
        out[shift] = f
        if f:
            for i, dc in enumerate(den):
                num[shift + i] -= f * dc
    if any(num):
        raise ValueError("inexact polynomial division")
    return out


class CycElem:
    """Element of the cyclotomic field Q(zeta_p), reduced modulo Phi_p.

    Stored as a coefficient vector over the power basis 1, z, ..., z^{d-1}
    where d = deg Phi_p; coefficients are Fractions.
    """

    __slots__ = ("p", "vec")

    def __init__(self, p: int, vec: Iterable):
        self.p = p
        d = len(cyclotomic_poly(p)) - 1
        v = [Fraction(x) for x in vec]
        if len(v) > d:
            v = _cyc_reduce(p, v)
        v += [Fraction(0)] * (d - len(v))
        self.vec = tuple(v)

    @staticmethod
    def zero(p: int) -> "CycElem":
        return CycElem(p, [])

    @staticmethod
    def one(p: int) -> "CycElem":
        return CycElem(p, [1])

    @staticmethod
    def root_power(p: int, k: int) -> "CycElem":
        """zeta_p^k as a reduced element."""
        k %= p
        return CycElem(p, [0] * k + [1])

    def is_zero(self) -> bool:
        return not any(self.vec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycElem):
            return NotImplemented
        return self.p == other.p and self.vec == other.vec

    def __hash__(self):
        return hash((self.p, self.vec))

    def __add__(self, other: "CycElem") -> "CycElem":
        self._check(other)
        return CycElem(self.p, [a + b for a, b in zip(self.vec, other.vec)])

    def __sub__(self, other: "CycElem") -> "CycElem":
        self._check(other)
        return CycElem(self.p, [a - b for a, b in zip(self.vec, other.vec)])

    def __neg__(self) -> "CycElem":
        return CycElem(self.p, [-a for a in self.vec])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.p, [a * other for a in self.vec])
        self._check(other)
        d = len(self.vec)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.vec):
            if not a:
                continue
            for j, b in enumerate(other.vec):
                if b:
                    prod[i + j] += a * b
        return CycElem(self.p, prod)

    __rmul__ = __mul__

    def _check(self, other: "CycElem"):
        if self.p != other.p:
            raise ValueError("mixed cyclotomic orders")

    def __repr__(self) -> str:
        bits = []
        for i, a in enumerate(self.vec):
            if a:
                base = "1" if i == 0 else ("z" if i == 1 else f"z^{i}")
                bits.append(f"{a}*{base}" if i else f"{a}")
        return " + ".join(bits) if bits else "0"


def _cyc_reduce(p: int, vec: list[Fraction]) -> list[Fraction]:
    phi = cyclotomic_poly(p)
    d = len(phi) - 1
    v = list(vec)
    for i in range(len(v) - 1, d - 1, -1):
        c = v[i]
        if c:
            v[i] = Fraction(0)
            for j in range(d):
                v[i - d + j] -= c * phi[j]
    return v[:d]


def _int_binom(e: int, k: int) -> int:
    """binom(e, k) for any integer e and k >= 0."""
    out = 1
    for i in range(k):
        out = out * (e - i) // (i + 1)
    return out


def expand_at_root(c: HalfLaurent, p: int, h_order: int) -> list[CycElem]:
    """Taylor coefficients of c(q = zeta_p + h) up to h^{h_order}, exactly.

    Requires integer q-exponents; half powers have no canonical expansion
    at a p-th root of unity.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    if not c.has_integer_exponents():
        raise ValueError("expand_at_root needs integer q-exponents")
    out = [CycElem.zero(p) for _ in range(h_order + 1)]
    for e2, coeff in c.terms.items():
        e = e2 // 2
        for k in range(h_order + 1):
            b = _int_binom(e, k)
            if b:
                out[k] = out[k] + CycElem.root_power(p, e - k) * (b * Fraction(coeff))
    return out
