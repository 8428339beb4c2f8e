"""Semisimple-side invariants: colored Jones, Alexander, Habiro coefficients, tails.

Conventions: q-exponents are exact half-integers; J_n is normalized so the
unknot gives [n+1]; the Alexander polynomial is symmetric with value 1 at
x = 1.  Colored Jones values come from the same extended R-matrix weights
as the two-variable state sum, specialized at x = q^{-n-1} with states in
{0..n}, quantum-traced over the closed strands.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .braid import BraidWord, closure_components
from .qalg import (
    HL_ONE,
    HL_ZERO,
    HalfLaurent,
    qbinom_balanced,
    quantum_brace,
    quantum_int,
)


# ------------------------------------------------------------------ alexander


@dataclass(frozen=True)
class AlexanderPoly:
    """Symmetrized Alexander polynomial; `poly` is Laurent in x, Δ(1) = 1."""

    poly: HalfLaurent

    @property
    def d(self) -> int:
        """Maximal x-exponent; genus for fibered knots."""
        if self.poly.is_zero():
            return 0
        return self.poly.max_q2() // 2

    def coeff(self, k: int) -> int:
        return self.poly.coeff(2 * k)

    def in_y(self) -> list[int]:
        """Coefficients of Δ as a polynomial in y = x + x^{-1} - 2."""
        d = self.d
        # x^k + x^{-k} satisfies the Chebyshev-style recurrence in (y+2)
        pows = [[2], [2, 1]]  # p_0 = 2, p_1 = y + 2
        for _ in range(2, d + 1):
            prev, back = pows[-1], pows[-2]
            nxt = [0] * (len(prev) + 1)
            for e, c in enumerate(prev):
                nxt[e] += 2 * c
                nxt[e + 1] += c
            for e, c in enumerate(back):
                nxt[e] -= c
            pows.append(nxt)
        out = [0] * (d + 1)
        out[0] = self.coeff(0)
        for k in range(1, d + 1):
            for e, c in enumerate(pows[k]):
                out[e] += self.coeff(k) * c
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def evaluate(self, x: Fraction) -> Fraction:
        return self.poly.evaluate(x)


def _burau_reduced(letter: int, strands: int) -> list[list[HalfLaurent]]:
    n = strands - 1
    t = HalfLaurent.monomial(1, 2)
    tinv = HalfLaurent.monomial(1, -2)
    m = [[HL_ONE if r == c else HL_ZERO for c in range(n)] for r in range(n)]
    i = abs(letter)  # 1-based generator index; acts on reduced basis u_1..u_n
    k = i - 1
    if letter > 0:
        m[k][k] = -t
        if k >= 1:
            m[k][k - 1] = t
        if k + 1 < n:
            m[k][k + 1] = HL_ONE
    else:
        m[k][k] = -tinv
        if k >= 1:
            m[k][k - 1] = HL_ONE
        if k + 1 < n:
            m[k][k + 1] = tinv
    return m


def _mat_mul(a, b):
    n = len(a)
    out = [[HL_ZERO] * n for _ in range(n)]
    for r in range(n):
        for k in range(n):
            if a[r][k].is_zero():
                continue
            for c in range(n):
                if not b[k][c].is_zero():
                    out[r][c] = out[r][c] + a[r][k] * b[k][c]
    return out


def _det(m) -> HalfLaurent:
    n = len(m)
    if n == 0:
        return HL_ONE
    if n == 1:
        return m[0][0]
    total = HL_ZERO
    for c in range(n):
        if m[0][c].is_zero():
            continue
        minor = [[row[cc] for cc in range(n) if cc != c] for row in m[1:]]
        term = m[0][c] * _det(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def alexander(b: BraidWord) -> AlexanderPoly:
    """Symmetric Alexander polynomial via the reduced Burau determinant."""
    if closure_components(b) != 1:
        raise ValueError("Alexander polynomial computed for knots only")
    n = b.strands
    if n == 1:
        return AlexanderPoly(HL_ONE)
    size = n - 1
    acc = [[HL_ONE if r == c else HL_ZERO for c in range(size)] for r in range(size)]
    for l in b.letters:
        acc = _mat_mul(acc, _burau_reduced(l, n))
    delta = [[(HL_ONE if r == c else HL_ZERO) - acc[r][c] for c in range(size)]
             for r in range(size)]
    det = _det(delta)
    fan = HalfLaurent({2 * k: 1 for k in range(n)})  # 1 + t + ... + t^{n-1}
    raw = det.divexact(fan)
    shift = -(raw.max_q2() + raw.min_q2()) // 2
    sym = raw.shift(shift)
    if sym != sym.q_inverse():
        raise AssertionError("Burau determinant failed to symmetrize")
    at_one = sym.evaluate(Fraction(1))
    if at_one == -1:
        sym = -sym
    elif at_one != 1:
        raise AssertionError(f"Alexander normalization broke: value {at_one} at 1")
    return AlexanderPoly(sym)


# -------------------------------------------------------------- colored Jones

_weight_cache: dict = {}


def _jones_weight(color: int, sign: int, i: int, j: int, ip: int, jp: int) -> HalfLaurent:
    """Extended R-matrix entry at x = q^{-color-1}, states restricted to 0..color."""
    key = (color, sign, i, j, ip, jp)
    try:
        return _weight_cache[key]
    except KeyError:
        pass
    n = color
    if sign > 0:
        if i < jp:
            w = HL_ZERO
        else:
            # q^{j j'} (qx)^{(j+j'+1)/2} [i; i-j']_q (q^{j+1}x; q)_{i-j'}
            w = HalfLaurent.monomial(1, 2 * j * jp - n * (j + jp + 1))
            w = w * qbinom_balanced(i, i - jp)
            for t in range(i - jp):
                w = w * (HL_ONE - HalfLaurent.monomial(1, 2 * (j - n + t)))
    else:
        if j < ip:
            w = HL_ZERO
        else:
            # q^{-i i'} (qx)^{-(i+i'+1)/2} [j; j-i']_{q^{-1}} (q^{-i-1}x^{-1}; q^{-1})_{j-i'}
            w = HalfLaurent.monomial(1, -2 * i * ip + n * (i + ip + 1))
            w = w * qbinom_balanced(j, j - ip).q_inverse()
            for t in range(j - ip):
                w = w * (HL_ONE - HalfLaurent.monomial(1, 2 * (n - i - t)))
    _weight_cache[key] = w
    return w


def colored_jones(b: BraidWord, color: int, normalized: bool = True) -> HalfLaurent:
    """J_color of the closure (J_n(unknot) = [n+1]); set normalized=False for J'_n."""
    if closure_components(b) != 1:
        raise ValueError("colored Jones computed for knots only")
    n = color
    total = HL_ZERO
    for bottom in product(range(n + 1), repeat=b.strands - 1):
        start = (0,) + bottom
        dp = {start: HL_ONE}
        for letter in b.letters:
            pos = abs(letter) - 1
            sign = 1 if letter > 0 else -1
            ndp: dict = {}
            for tup, amp in dp.items():
                i, j = tup[pos], tup[pos + 1]
                for ip in range(max(0, i + j - n), min(n, i + j) + 1):
                    jp = i + j - ip
                    w = _jones_weight(n, sign, i, j, ip, jp)
                    if w.is_zero():
                        continue
                    ntup = tup[:pos] + (ip, jp) + tup[pos + 2:]
                    prev = ndp.get(ntup)
                    contrib = amp * w
                    ndp[ntup] = contrib if prev is None else prev + contrib
            dp = ndp
        amp = dp.get(start)
        if amp is None or amp.is_zero():
            continue
        # quantum trace over the closed strands
        weight = HalfLaurent.monomial(1, sum(n - 2 * s for s in bottom))
        total = total + amp * weight
    if normalized:
        return total * quantum_int(n + 1)
    return total


def jones_table(b: BraidWord, top: int) -> list[HalfLaurent]:
    """Normalized J_0..J_top."""
    return [colored_jones(b, n) for n in range(top + 1)]


# -------------------------------------------------------------------- Habiro


@dataclass(frozen=True)
class HabiroData:
    coeffs: list[HalfLaurent]
    derivs_at_one: list[Fraction]


def _brace_falling(m: int, k: int) -> HalfLaurent:
    out = HL_ONE
    for t in range(k):
        out = out * quantum_brace(m - t)
    return out


def _sym_qbinom(n: int, k: int) -> HalfLaurent:
    """Symmetric q-binomial, invariant under q -> 1/q (0 <= k <= n)."""
    return qbinom_balanced(n, k).shift(-k * (n - k))


def habiro_coefficients(values: list[HalfLaurent]) -> HabiroData:
    """Cyclotomic-expansion coefficients a_n from normalized J_0..J_N.

    Every division is exact in Z[q^{±1/2}]; a remainder signals a convention
    mismatch upstream and raises.
    """
    coeffs: list[HalfLaurent] = []
    derivs: list[Fraction] = []
    for n in range(len(values)):
        acc = HL_ZERO
        for i in range(n + 1):
            c = quantum_int(2 * i + 2) * _sym_qbinom(2 * n + 1, n + 1 + i)
            c = c.divexact(quantum_int(n + i + 2))
            term = c * values[i]
            acc = acc + term if (n - i) % 2 == 0 else acc - term
        a = acc.divexact(_brace_falling(2 * n + 1, 2 * n)) if n else acc
        if not a.has_integer_exponents():
            raise ValueError(f"a_{n} landed outside Z[q^{{±1}}]: {a!r}")
        coeffs.append(a)
        derivs.append(sum((Fraction(e2, 2) * c for e2, c in a.terms.items()),
                          Fraction(0)))
    return HabiroData(coeffs, derivs)


def reconstruct_jones(coeffs: list[HalfLaurent], n: int) -> HalfLaurent:
    """[n+1] · Σ_k a_k ∏_{i=1}^k (y+2-q^i-q^{-i}) at the color-n point.

    The evaluation point is y+2 = q^{n+1}+q^{-n-1}: the k-th product then
    vanishes exactly for k > n, and the identity pins down the a_k.
    """
    y2 = HalfLaurent({2 * (n + 1): 1, -2 * (n + 1): 1})
    acc = HL_ZERO
    prod_ = HL_ONE
    for k, a in enumerate(coeffs):
        if k:
            prod_ = prod_ * (y2 - HalfLaurent({2 * k: 1, -2 * k: 1}))
            if prod_.is_zero():
                break
        acc = acc + a * prod_
    return acc * quantum_int(n + 1)


# ------------------------------------------------------- tails and stability


@dataclass(frozen=True)
class TailResult:
    stabilized: bool
    stabilized_from: int | None
    tail: HalfLaurent | None
    shifts: list[int]


def _unnormalized_shifted(values: list[HalfLaurent]) -> tuple[list[HalfLaurent], list[int]]:
    shifted, shifts = [], []
    for n, jn in enumerate(values):
        raw = jn.divexact(quantum_int(n + 1))
        if not raw.has_integer_exponents():
            raise ValueError("unnormalized colored Jones left Z[q^{±1}]")
        lo = raw.min_q2()
        shifts.append(lo // 2)
        shifted.append(raw.shift(-lo))
    return shifted, shifts


def _truncate_window(p: HalfLaurent, lo2: int, width: int) -> tuple:
    return tuple(p.coeff(lo2 + 2 * t) for t in range(width))


def tail(values: list[HalfLaurent], q_window: int) -> TailResult:
    """Tail of the knot: stabilized limit of min-degree-shifted J_n/[n+1]."""
    if len(values) < 3:
        raise ValueError("need at least three colors to detect stabilization")
    shifted, shifts = _unnormalized_shifted(values)
    windows = [_truncate_window(p, 0, q_window) for p in shifted]
    n0 = None
    for n in range(len(values) - 1):
        if all(windows[m] == windows[m + 1] for m in range(n, len(values) - 1)):
            n0 = n
            break
    if n0 is None:
        return TailResult(False, None, None, shifts)
    series = HalfLaurent({2 * t: c for t, c in enumerate(windows[-1]) if c})
    return TailResult(True, n0, series, shifts)


@dataclass(frozen=True)
class StabilitySeries:
    """Per-x-coefficient stabilization data of the colored Jones family.

    phi_raw[k] is the unnormalized coefficient (from J_n/[n+1]); phi[k] is
    the normalized one, phi[k] = (phi_raw[k] - phi_raw[k-1])/(1-q) as a
    truncated q-series.  Both are reported on q-exponents below q_window
    (negative exponents included).  Entries are None when the table was too
    short for that coefficient to stabilize on the requested window.
    """

    phi_raw: list[HalfLaurent | None]
    phi: list[HalfLaurent | None]
    q_window: int
    stabilized_from: list[int | None]


def _low_part(p: HalfLaurent, bound2: int) -> HalfLaurent:
    return HalfLaurent({e2: c for e2, c in p.terms.items() if e2 < bound2})


def stability_series(values: list[HalfLaurent], x_order: int, q_window: int,
                     slack: int | None = None) -> StabilitySeries:
    """Extract the coefficientwise limit shape of min-shifted J_n/[n+1].

    Each color n only determines coefficient k on a window roughly n+1 wide,
    and subtracting a finite prefix of coefficient k taints deeper levels
    past that prefix, so every level carries an explicit trusted exponent
    bound.  Certified widths roughly halve per level: recovering x_order
    coefficients needs a table of length about 2^x_order * q_window.
    `slack` bounds how far below 0 later coefficients may start.
    """
    shifted, _ = _unnormalized_shifted(values)
    if slack is None:
        slack = x_order + 1
    big = 1 << 60
    bound2 = 2 * q_window
    levels: dict[int, tuple[HalfLaurent, int]] = {
        n: (shifted[n], big) for n in range(len(values))
    }
    phi_raw: list[HalfLaurent | None] = []
    stab_from: list[int | None] = []
    for _ in range(x_order):
        usable = sorted(n for n, (_, valid) in levels.items() if valid >= bound2)
        lows = {n: _low_part(levels[n][0], bound2) for n in usable}
        n0 = None
        for idx, n in enumerate(usable[:-1]):
            if all(lows[m] == lows[n] for m in usable[idx + 1:]):
                n0 = n
                break
        if n0 is None:
            phi_raw.append(None)
            stab_from.append(None)
            break
        phi_raw.append(lows[n0])
        stab_from.append(n0)
        # subtraction prefix: widest certified prefix among stabilized levels
        best_n, best_b = None, -big
        for n in usable:
            if n < n0:
                continue
            b = min(levels[n][1], 2 * (n + 1) - 2 * slack)
            if b > best_b:
                best_n, best_b = n, b
        prefix = _low_part(levels[best_n][0], best_b)
        nxt: dict[int, tuple[HalfLaurent, int]] = {}
        for n, (series, valid) in levels.items():
            nvalid = min(valid, best_b) - 2 * (n + 1)
            if nvalid <= -2 * slack:
                continue
            nxt[n] = ((series - prefix).shift(-2 * (n + 1)), nvalid)
        levels = nxt
    while len(phi_raw) < x_order:
        phi_raw.append(None)
        stab_from.append(None)
    # normalized version: phi_k = (phi_raw[k] - phi_raw[k-1]) · (1+q+q^2+...)
    geom = HalfLaurent({2 * t: 1 for t in range(q_window + slack + 1)})
    phi: list[HalfLaurent | None] = []
    prev = HL_ZERO
    for cur in phi_raw:
        if cur is None:
            phi.append(None)
            continue
        phi.append(_low_part((cur - prev) * geom, bound2))
        prev = cur
    return StabilitySeries(phi_raw=phi_raw, phi=phi, q_window=q_window,
                           stabilized_from=stab_from)
