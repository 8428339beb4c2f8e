"""Inverted and stratified state sums over a labeled closed-braid diagram.

Every valid state assigns an integer to each segment, compatible with the
sign labeling; its summand is a product of extended R-matrix entries and
strand prefactors, expanded as a power series at x=0.  Under a niceness
certificate the states below a given x-degree form a finite set and the
inverted sum returns a truncated two-variable series whose normalization
is the knot's series.  For all-minus labelings of strongly quasinegative
words, the sum is instead organized by boundary weight and each series
coefficient is watched for stabilization across strata.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .braid import DiagramGraph
from .inversion import (InversionDatum, NicenessCertificate, closed_components,
                        degree_lp, ell, niceness_check, validate_datum)
from .lp import solve_lp
from .qalg import (HL_ONE, HL_ZERO, HalfLaurent, XSeries, poch_divide,
                   poch_multiply, qbinom_balanced)

DEFAULT_SIGN_RULE = "tangle"


@dataclass(frozen=True)
class RContext:
    """One crossing evaluation: sign, the four state values, truncation.

    i, j sit on the bottom-left and bottom-right segments, ip, jp on the
    top-left and top-right; x_order2 is the doubled truncation exponent of
    the requested expansion.
    """

    sign: int
    i: int
    j: int
    ip: int
    jp: int
    x_order2: int


def r_matrix(ctx: RContext) -> XSeries:
    """Extended R-matrix entry as a series in x, expanded at x=0.

    Returns the zero series when charge conservation fails or no condition
    row matches.  A nonzero value has minimal x-exponent sign*(j+jp+1)/2;
    denominators are rewritten so only factors with positive x-exponent
    get inverted (a factor 1-q^a/x turns into the monomial -q^{-a}x over
    1-q^{-a}x).
    """
    return _r_matrix(ctx.sign, ctx.i, ctx.j, ctx.ip, ctx.jp, ctx.x_order2)


@lru_cache(maxsize=1 << 18)
def _r_exact(sign: int, i: int, j: int, ip: int, jp: int) -> XSeries:
    """Untruncated entry for the two finite rows (polynomial support)."""
    if sign > 0:
        coef = qbinom_balanced(i, i - jp).shift(2 * j * jp)
        s = XSeries.monomial(coef).shift(q2=j + jp + 1, x2=j + jp + 1)
        return poch_multiply(s, (2 * (j + 1), 2), 1, i - jp)
    coef = qbinom_balanced(j, j - ip).q_inverse().shift(-2 * i * ip)
    s = XSeries.monomial(coef).shift(q2=-(i + ip + 1), x2=-(i + ip + 1))
    return poch_multiply(s, (-2 * (i + 1), -2), -1, j - ip)


@lru_cache(maxsize=1 << 18)
def _r_matrix(sign: int, i: int, j: int, ip: int, jp: int, order2: int) -> XSeries:
    zero = XSeries({}, order2)
    if i + j != ip + jp:
        return zero
    if sign > 0:
        if (i >= jp >= 0) or (0 > i >= jp):
            return _r_exact(sign, i, j, ip, jp).truncate(order2)
        if jp >= 0 > i:
            m2 = j + jp + 1
            coef = qbinom_balanced(i, jp).shift(2 * j * jp)
            s = XSeries.monomial(coef, 0, order2 - m2).shift(q2=m2, x2=m2)
            return poch_divide(s, (2 * j, 2), -1, jp - i).truncate(order2)
        return zero
    if (j >= ip >= 0) or (0 > j >= ip):
        return _r_exact(sign, i, j, ip, jp).truncate(order2)
    if ip >= 0 > j:
        m2 = ip - i - 2 * j - 1
        coef = qbinom_balanced(j, ip).q_inverse().shift(-2 * i * ip)
        s = XSeries.monomial(coef, 0, order2 - m2)
        s = s.shift(q2=-(i + ip + 1), x2=-(i + ip + 1))
        for t in range(ip - j):
            s = -(s.shift(q2=2 * (i - t), x2=2))
            s = poch_divide(s, (2 * (i - t), 2), 1, 1)
        return s.truncate(order2)
    return zero


def state_degree(g: DiagramGraph, values: Sequence[int]) -> Fraction:
    """Minimal x-exponent of the state's summand (the degree functional)."""
    total = 1 - g.word.strands
    for c in g.crossings:
        total += c.sign * (values[c.br] + values[c.tr] + 1)
    return Fraction(total, 2)


@lru_cache(maxsize=1 << 18)
def _r_profile(sign: int, i: int, j: int, ip: int, jp: int,
               order2: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Staircase of (x-shift, least q-shift) pairs of the cached entry.

    Sorted by x-shift with strictly decreasing q-shift; entries another one
    dominates (smaller or equal on both axes) are useless for reach minima
    and are dropped.
    """
    f = _r_matrix(sign, i, j, ip, jp, order2)
    xs: list[int] = []
    qs: list[int] = []
    for e, c in sorted((e, min(c.terms)) for e, c in f.coeffs.items()):
        if not qs or c < qs[-1]:
            xs.append(e)
            qs.append(c)
    return tuple(xs), tuple(qs)


@lru_cache(maxsize=1 << 18)
def _r_slices(sign: int, i: int, j: int, ip: int, jp: int,
              order2: int) -> tuple[tuple[int, int, int, tuple], ...]:
    """Cached entry as dense (x-shift, least q-shift, stride, coeffs) rows.

    Each x-slice becomes a coefficient list over an arithmetic progression
    of q-exponents;  nearly every slice is parity-pure so the stride is
    usually 2, with a stride-1 fallback for mixed slices.
    """
    f = _r_matrix(sign, i, j, ip, jp, order2)
    rows = []
    for e, c in sorted(f.coeffs.items()):
        qmin = min(c.terms)
        stride = 2 if all((q - qmin) % 2 == 0 for q in c.terms) else 1
        dense = [0] * ((max(c.terms) - qmin) // stride + 1)
        for q, v in c.terms.items():
            dense[(q - qmin) // stride] = v
        rows.append((e, qmin, stride, tuple(dense)))
    return tuple(rows)


def evaluate_state(g: DiagramGraph, datum: InversionDatum, values: Sequence[int],
                   x_order2: int, q_order2: Optional[int] = None) -> XSeries:
    """Truncated expansion of P(s): strand prefactors times crossing entries.

    Zero when some crossing factor vanishes.  Each factor is truncated at
    its own minimal degree plus the slack left over the state's total
    degree, so the product is exact below x_order2/2.

    With q_order2 the result is additionally exact only up to that doubled
    q-power.  All values are known here, so each remaining factor's least
    q-shift is known too; partial terms that no continuation can bring
    back below the cutoff are dropped as the product is built.  This keeps
    the q-width of intermediates near the final width instead of the much
    larger exact-product width.
    """
    n = g.word.strands
    deg2 = 1 - n + sum(c.sign * (values[c.br] + values[c.tr] + 1) for c in g.crossings)
    slack2 = x_order2 - deg2
    if slack2 <= 0:
        return XSeries({}, x_order2)
    q2 = sum(-1 - 2 * values[g.bottoms[p]] for p in range(1, n))
    out = XSeries({0: HL_ONE}).shift(q2=q2, x2=1 - n)
    keys = []
    for c in g.crossings:
        i, j = values[c.bl], values[c.br]
        ip, jp = values[c.tl], values[c.tr]
        key = (c.sign, i, j, ip, jp, c.sign * (j + jp + 1) + slack2)
        if _r_matrix(*key).is_zero():
            return XSeries({}, x_order2)
        keys.append(key)
    if q_order2 is None:
        for key in keys:
            out = out * _r_matrix(*key)
        return out.truncate(x_order2)
    # the crossing factors commute, so multiply the positive ones first:
    # they carry the large downward shifts, and once they are consumed the
    # staircase over what remains is tight and kills doomed terms early
    keys.sort(key=lambda key: -key[0])
    # reach[k] is the staircase of (total x-shift, least q-shift) over the
    # factors k..; a partial term only survives if some remaining shift
    # lands it under both cutoffs, so each x-slice gets its own q cutoff.
    reach: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((0,), (0,))]
    for key in reversed(keys):
        pxs, pqs = _r_profile(*key)
        rxs, rqs = reach[-1]
        cand = [(px + rx, pq + rq)
                for px, pq in zip(pxs, pqs)
                for rx, rq in zip(rxs, rqs)]
        cand.sort()
        xs: list[int] = []
        qs: list[int] = []
        for x, q in cand:
            if not qs or q < qs[-1]:
                xs.append(x)
                qs.append(q)
        reach.append((tuple(xs), tuple(qs)))
    reach.reverse()

    rxs, rqs = reach[0]
    idx = bisect_left(rxs, x_order2 - (1 - n)) - 1
    if idx < 0 or q2 >= q_order2 - rqs[idx]:
        return XSeries({}, x_order2)
    # partial product slices as dense stride-1 lists: slice e1 holds the
    # coefficient of q^{(base+i)/2} x^{e1/2} at list position i
    partial: dict[int, tuple[int, list]] = {1 - n: (q2, [1])}
    for k, key in enumerate(keys):
        rxs, rqs = reach[k + 1]
        rows_list = _r_slices(*key)
        cuts: dict[int, int] = {}
        bases: dict[int, int] = {}
        for e1, (ab, _) in partial.items():
            for e2, bb, _, _ in rows_list:
                e = e1 + e2
                if e not in cuts:
                    idx = bisect_left(rxs, x_order2 - e) - 1
                    cuts[e] = q_order2 - rqs[idx] if idx >= 0 else None
                cut = cuts[e]
                if cut is None:
                    continue
                b = ab + bb
                if b < cut and b < bases.get(e, cut):
                    bases[e] = b
        accs = {e: (b, [0] * (cuts[e] - b)) for e, b in bases.items()}
        for e1, (ab, alist) in partial.items():
            for e2, bb, sb, blist in rows_list:
                entry = accs.get(e1 + e2)
                if entry is None:
                    continue
                base, acc = entry
                off0 = ab + bb - base
                top = len(acc)
                len_b = len(blist)
                for ia, va in enumerate(alist):
                    off = off0 + ia
                    if off >= top:
                        break
                    if not va:
                        continue
                    nb = (top - off + sb - 1) // sb
                    for t, vb in enumerate(blist if nb >= len_b else blist[:nb]):
                        if vb:
                            acc[off + sb * t] += va * vb
        partial = {}
        for e, (base, acc) in accs.items():
            lo = 0
            hi = len(acc)
            while lo < hi and not acc[lo]:
                lo += 1
            while hi > lo and not acc[hi - 1]:
                hi -= 1
            if hi > lo:
                partial[e] = (base + lo, acc[lo:hi])
        if not partial:
            return XSeries({}, x_order2)
    return XSeries({e: HalfLaurent({base + i: v for i, v in enumerate(acc) if v})
                    for e, (base, acc) in partial.items()}, x_order2)


# ------------------------------------------------------------- enumeration


def state_boxes(g: DiagramGraph, datum: InversionDatum,
                bound) -> Optional[list[tuple[int, int]]]:
    """Exact per-segment value ranges over the degree <= bound polyhedron.

    One LP pair per segment, sharing the constraint system of the niceness
    check plus the degree cap.  Returns None when no integer point can
    exist (empty relaxation or an empty coordinate range).
    """
    sigma, tau, a_eq, b_eq, a_ge, b_ge, cost, const, _ = degree_lp(g, datum)
    n_seg = g.n_segments
    cap_row = [-v for v in cost]
    a_ge = a_ge + [cap_row]
    b_ge = b_ge + [const - Fraction(bound)]
    boxes: list[tuple[int, int]] = []
    for e in range(n_seg):
        obj = [Fraction(0)] * n_seg
        obj[e] = Fraction(1)
        lo = solve_lp(obj, a_eq, b_eq, a_ge, b_ge)
        if lo.status == "infeasible":
            return None
        hi = solve_lp([-v for v in obj], a_eq, b_eq, a_ge, b_ge)
        if lo.status != "optimal" or hi.status != "optimal":
            raise ArithmeticError("unbounded segment range under a degree cap")
        u_lo, u_hi = math.ceil(lo.value), math.floor(-hi.value)
        if u_lo > u_hi:
            return None
        if sigma[e] > 0:
            boxes.append((u_lo, u_hi))
        else:
            boxes.append((-1 - u_hi, -1 - u_lo))
    return boxes


def _condition_ok(sign: int, i: int, j: int, ip: int, jp: int) -> bool:
    if sign > 0:
        return (i >= jp >= 0) or (0 > i >= jp) or (jp >= 0 > i)
    return (j >= ip >= 0) or (0 > j >= ip) or (ip >= 0 > j)


def _state_walk(g: DiagramGraph, datum: InversionDatum, bound: Fraction,
                boxes: Sequence[tuple[int, int]], cert: NicenessCertificate,
                fix_first: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """DFS over valid states of degree <= bound, in canonical order.

    Bottom boundary values are chosen ascending position by position, then
    each crossing splits the incoming charge across its top segments; tops
    identified with bottoms through the closure only get checked.  Partial
    assignments are cut with the certificate's reconstruction of the
    degree functional, a lower bound on every completion.
    """
    n_seg = g.n_segments
    signs = datum.signs
    denom = math.lcm(bound.denominator, cert.beta.denominator,
                     *(a.denominator for a in cert.alpha),
                     *(v.denominator for v in cert.gamma))
    alpha_i = [int(a * denom) for a in cert.alpha]
    bound_i = int(bound * denom)
    gamma_rows: list[tuple[int, int, int]] = []
    rows_at: list[list[int]] = [[] for _ in range(n_seg)]
    for (_, p, q), ga in zip(cert.supports, cert.gamma):
        gi = int(ga * denom)
        if gi:
            rows_at[p].append(len(gamma_rows))
            rows_at[q].append(len(gamma_rows))
            gamma_rows.append((p, q, gi))
    row_cnt = [0] * len(gamma_rows)
    base = [1 if signs[e] < 0 else 0 for e in range(n_seg)]
    running = int(cert.beta * denom) + sum(a * b for a, b in zip(alpha_i, base))
    value: list[Optional[int]] = [None] * n_seg
    free_bottoms = [g.bottoms[p] for p in range(1, g.word.strands)]
    crossings = g.crossings

    def assign(e: int, v: int) -> int:
        nonlocal running
        value[e] = v
        d = alpha_i[e] * (abs(v) - base[e])
        for ri in rows_at[e]:
            row_cnt[ri] += 1
            if row_cnt[ri] == 2:
                p, q, gi = gamma_rows[ri]
                d += gi * (value[p] - value[q])
        running += d
        return d

    def unassign(e: int, d: int) -> None:
        nonlocal running
        running -= d
        for ri in rows_at[e]:
            row_cnt[ri] -= 1
        value[e] = None

    def bottoms_stage(bi: int) -> Iterator[tuple[int, ...]]:
        if bi == len(free_bottoms):
            yield from cross_stage(0)
            return
        e = free_bottoms[bi]
        lo, hi = boxes[e]
        if bi == 0 and fix_first is not None:
            lo = hi = fix_first
        for v in range(lo, hi + 1):
            d = assign(e, v)
            if running <= bound_i:
                yield from bottoms_stage(bi + 1)
            unassign(e, d)

    def cross_stage(k: int) -> Iterator[tuple[int, ...]]:
        if k == len(crossings):
            yield tuple(value)
            return
        c = crossings[k]
        i, j = value[c.bl], value[c.br]
        tlv, trv = value[c.tl], value[c.tr]
        if tlv is not None and trv is not None:
            if i + j == tlv + trv and _condition_ok(c.sign, i, j, tlv, trv):
                yield from cross_stage(k + 1)
            return
        if tlv is not None:
            jp = i + j - tlv
            lo, hi = boxes[c.tr]
            if lo <= jp <= hi and _condition_ok(c.sign, i, j, tlv, jp):
                d = assign(c.tr, jp)
                if running <= bound_i:
                    yield from cross_stage(k + 1)
                unassign(c.tr, d)
            return
        if trv is not None:
            ip = i + j - trv
            lo, hi = boxes[c.tl]
            if lo <= ip <= hi and _condition_ok(c.sign, i, j, ip, trv):
                d = assign(c.tl, ip)
                if running <= bound_i:
                    yield from cross_stage(k + 1)
                unassign(c.tl, d)
            return
        lo, hi = boxes[c.tl]
        lo2, hi2 = boxes[c.tr]
        for ip in range(max(lo, i + j - hi2), min(hi, i + j - lo2) + 1):
            jp = i + j - ip
            if not _condition_ok(c.sign, i, j, ip, jp):
                continue
            d1 = assign(c.tl, ip)
            d2 = assign(c.tr, jp)
            if running <= bound_i:
                yield from cross_stage(k + 1)
            unassign(c.tr, d2)
            unassign(c.tl, d1)

    pin = 0 if signs[g.open_segment] > 0 else -1
    d0 = assign(g.open_segment, pin)
    if running <= bound_i:
        yield from bottoms_stage(0)
    unassign(g.open_segment, d0)


def enumerate_states(g: DiagramGraph, datum: InversionDatum, bound,
                     cert: Optional[NicenessCertificate] = None) -> Iterator[tuple[int, ...]]:
    """Every valid state with degree <= bound, each exactly once.

    Requires a niceness certificate (computed here when not supplied);
    refuses to run without one since the state set can then be infinite.
    """
    if cert is None:
        cert = niceness_check(g, datum)
    if not cert.nice:
        raise ValueError("state enumeration requires a nice labeling; "
                         "use the stratified route instead")
    bound = Fraction(bound)
    if bound < cert.min_degree:
        return
    boxes = state_boxes(g, datum, bound)
    if boxes is None:
        return
    yield from _state_walk(g, datum, bound, boxes, cert)


def _sum_states(g: DiagramGraph, datum: InversionDatum, bound: Fraction,
                boxes: Sequence[tuple[int, int]], cert: NicenessCertificate,
                zorder2: int, fix_first: Optional[int] = None) -> tuple[XSeries, int]:
    """Sum of P(s) over the degree <= bound states, truncated below zorder2.

    Same walk as _state_walk, but the summand product is accumulated along
    the search tree so shared prefixes are multiplied once.  Partial
    products are truncated with the certificate's running lower bound on
    the completed degree, which keeps exactly the terms that can still
    land under the truncation order.
    """
    n_seg = g.n_segments
    n = g.word.strands
    signs = datum.signs
    denom = math.lcm(bound.denominator, cert.beta.denominator,
                     *(a.denominator for a in cert.alpha),
                     *(v.denominator for v in cert.gamma))
    alpha_i = [int(a * denom) for a in cert.alpha]
    bound_i = int(bound * denom)
    gamma_rows: list[tuple[int, int, int]] = []
    rows_at: list[list[int]] = [[] for _ in range(n_seg)]
    for (_, p, q), ga in zip(cert.supports, cert.gamma):
        gi = int(ga * denom)
        if gi:
            rows_at[p].append(len(gamma_rows))
            rows_at[q].append(len(gamma_rows))
            gamma_rows.append((p, q, gi))
    row_cnt = [0] * len(gamma_rows)
    base = [1 if signs[e] < 0 else 0 for e in range(n_seg)]
    running = int(cert.beta * denom) + sum(a * b for a, b in zip(alpha_i, base))
    value: list[Optional[int]] = [None] * n_seg
    free_bottoms = [g.bottoms[p] for p in range(1, n)]
    crossings = g.crossings
    total = XSeries({}, zorder2)
    count = 0

    def slack2() -> int:
        return zorder2 - (-(-2 * running) // denom)

    def assign(e: int, v: int) -> int:
        nonlocal running
        value[e] = v
        d = alpha_i[e] * (abs(v) - base[e])
        for ri in rows_at[e]:
            row_cnt[ri] += 1
            if row_cnt[ri] == 2:
                p, q, gi = gamma_rows[ri]
                d += gi * (value[p] - value[q])
        running += d
        return d

    def unassign(e: int, d: int) -> None:
        nonlocal running
        running -= d
        for ri in rows_at[e]:
            row_cnt[ri] -= 1
        value[e] = None

    def bottoms_stage(bi: int) -> None:
        if bi == len(free_bottoms):
            q2 = sum(-1 - 2 * value[g.bottoms[p]] for p in range(1, n))
            pre = XSeries({0: HL_ONE}).shift(q2=q2, x2=1 - n)
            cross_stage(0, pre)
            return
        e = free_bottoms[bi]
        lo, hi = boxes[e]
        if bi == 0 and fix_first is not None:
            lo = hi = fix_first
        for v in range(lo, hi + 1):
            d = assign(e, v)
            if running <= bound_i:
                bottoms_stage(bi + 1)
            unassign(e, d)

    def descend(k: int, prod: XSeries) -> None:
        c = crossings[k]
        i, j = value[c.bl], value[c.br]
        ip, jp = value[c.tl], value[c.tr]
        sl = slack2()
        f = _r_matrix(c.sign, i, j, ip, jp, c.sign * (j + jp + 1) + sl)
        if f.is_zero():
            return
        nxt = prod * f
        if nxt.coeffs:
            nxt = nxt.truncate(nxt.min_x2() + sl)
        if nxt.is_zero():
            return
        cross_stage(k + 1, nxt)

    def cross_stage(k: int, prod: XSeries) -> None:
        nonlocal total, count
        if k == len(crossings):
            total = total + prod.truncate(zorder2)
            count += 1
            return
        c = crossings[k]
        i, j = value[c.bl], value[c.br]
        tlv, trv = value[c.tl], value[c.tr]
        if tlv is not None and trv is not None:
            if i + j == tlv + trv and _condition_ok(c.sign, i, j, tlv, trv):
                descend(k, prod)
            return
        if tlv is not None:
            jp = i + j - tlv
            lo, hi = boxes[c.tr]
            if lo <= jp <= hi and _condition_ok(c.sign, i, j, tlv, jp):
                d = assign(c.tr, jp)
                if running <= bound_i:
                    descend(k, prod)
                unassign(c.tr, d)
            return
        if trv is not None:
            ip = i + j - trv
            lo, hi = boxes[c.tl]
            if lo <= ip <= hi and _condition_ok(c.sign, i, j, ip, trv):
                d = assign(c.tl, ip)
                if running <= bound_i:
                    descend(k, prod)
                unassign(c.tl, d)
            return
        lo, hi = boxes[c.tl]
        lo2, hi2 = boxes[c.tr]
        for ip in range(max(lo, i + j - hi2), min(hi, i + j - lo2) + 1):
            jp = i + j - ip
            if not _condition_ok(c.sign, i, j, ip, jp):
                continue
            d1 = assign(c.tl, ip)
            d2 = assign(c.tr, jp)
            if running <= bound_i:
                descend(k, prod)
            unassign(c.tr, d2)
            unassign(c.tl, d1)

    pin = 0 if signs[g.open_segment] > 0 else -1
    d0 = assign(g.open_segment, pin)
    if running <= bound_i:
        bottoms_stage(0)
    unassign(g.open_segment, d0)
    return total, count


# ------------------------------------------------------------ inverted sum


@dataclass(frozen=True)
class FKResult:
    """Truncated series of a nice pair, normalized and raw.

    series is (x^{1/2} - x^{-1/2}) times zinv at matching truncation; d_k
    is the leading x-exponent of zinv, ell the labeling's integer, and
    leading_is_monomial records whether the leading coefficient is a
    single q-power (its exponent then equals ell, its sign is reported
    verbatim in the series).
    """

    series: XSeries
    zinv: XSeries
    d_k: int
    ell: int
    leading_is_monomial: bool
    metadata: dict

    def f_series(self) -> XSeries:
        """The series with the half x-power stripped: sum f_n x^{d-1+n}."""
        return self.series.shift(x2=-1)


def _partial_sum(args) -> tuple[XSeries, int]:
    g, datum, bound, boxes, cert, order2, first = args
    return _sum_states(g, datum, bound, boxes, cert, order2, first)


def inverted_sum(g: DiagramGraph, datum: InversionDatum, x_order: int,
                 rule: str = DEFAULT_SIGN_RULE,
                 cert: Optional[NicenessCertificate] = None,
                 workers: int = 1) -> FKResult:
    """Sum the state expansions below the truncation and normalize.

    x_order is the exclusive integer order of the reported f-series, so
    coefficients of x^0 .. x^{x_order-1} of series/x^{1/2} are exact.  The
    global sign is (-1)^s with s the closed component count under the
    given connection rule.  Workers > 1 splits the enumeration by the
    first free boundary value; partial sums merge in ascending order, so
    the result does not depend on the worker count.
    """
    if cert is None:
        cert = niceness_check(g, datum)
    if not cert.nice:
        raise ValueError("inverted sum requires a nice labeling")
    order2 = 2 * x_order + 2
    bound = Fraction(order2 - 1, 2)
    if bound < cert.min_degree:
        raise ValueError("truncation order sits below the minimal degree")
    boxes = state_boxes(g, datum, bound)
    total = XSeries({}, order2)
    count = 0
    if boxes is not None:
        first_box = boxes[g.bottoms[1]] if g.word.strands > 1 else None
        if workers > 1 and first_box is not None and first_box[1] > first_box[0]:
            jobs = [(g, datum, bound, boxes, cert, order2, v)
                    for v in range(first_box[0], first_box[1] + 1)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part, n in pool.map(_partial_sum, jobs):
                    total = total + part
                    count += n
        else:
            total, count = _sum_states(g, datum, bound, boxes, cert, order2)
    comps = closed_components(g, datum, rule)
    sign = -1 if comps % 2 else 1
    zinv = total if sign > 0 else -total
    if zinv.is_zero():
        raise ArithmeticError("empty state sum despite a nice certificate")
    series = zinv.shift(x2=1) - zinv.shift(x2=-1)
    dk2 = zinv.min_x2()
    if dk2 % 2:
        raise ArithmeticError("leading x-exponent is not an integer")
    lead = zinv.coeff(dk2)
    metadata = {
        "strands": g.word.strands,
        "letters": list(g.word.letters),
        "datum": datum.string(g),
        "x_order": x_order,
        "sign_rule": rule,
        "components": comps,
        "sign": sign,
        "states": count,
        "min_degree": str(cert.min_degree),
    }
    return FKResult(series=series, zinv=zinv, d_k=dk2 // 2, ell=ell(g, datum),
                    leading_is_monomial=len(lead.terms) == 1, metadata=metadata)


# ----------------------------------------------------------- stratified sum


@dataclass(frozen=True)
class QSeriesTrunc:
    """A q-series known below the doubled exponent q_order2."""

    series: HalfLaurent
    q_order2: int

    def coeff(self, q2: int):
        return self.series.coeff(q2)


@dataclass(frozen=True)
class OscillationReport:
    """Period-2 tail of one x-coefficient: parity limits and their mean."""

    even: QSeriesTrunc
    odd: QSeriesTrunc
    average: QSeriesTrunc


@dataclass(frozen=True)
class StratifiedResult:
    """Weight-stratified sum with per-coefficient stabilization records.

    strata[w] is the raw sum over states of boundary weight w, partials[w]
    the raw running total.  The reported object is the normalized f-side:
    sign*(x^{1/2}-x^{-1/2}) times the running total with the half x-power
    stripped, so coefficient(2k) approximates f-series coefficient of x^k.
    last_change maps a doubled (x, q) exponent pair of the f-side to the
    last weight that changed it.  Coefficients still moving near
    max_weight are never reported as settled: they either appear in
    oscillation (period-2 tails, with the parity limits and their average)
    or make is_stabilized return False.
    """

    x_order2: int
    q_order2: int
    max_weight: int
    settle: int
    sign: int
    strata: tuple[XSeries, ...]
    partials: tuple[XSeries, ...]
    f_partials: tuple[XSeries, ...]
    last_change: dict
    oscillation: dict

    def coefficient(self, x2: int) -> QSeriesTrunc:
        """Final f-side partial of one x-coefficient (check stabilization)."""
        return QSeriesTrunc(self.f_partials[-1].coeff(x2), self.q_order2)

    def stabilization_weight(self, x2: int) -> int:
        touched = [w for (e, _), w in self.last_change.items() if e == x2]
        return max(touched, default=0)

    def is_stabilized(self, x2: int) -> bool:
        return self.stabilization_weight(x2) <= self.max_weight - self.settle


def _stratum_states(g: DiagramGraph, weight: int, budget: int,
                    x_order2: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Valid all-minus states whose boundary weight is exactly the given one.

    When x_order2 is given, branches whose summand degree provably lands at
    or above it are cut: every remaining negative crossing raises the
    degree by at least 1/2, every remaining positive one lowers it by at
    most weight+1/2 (each of the two right-hand values sits on a level
    whose magnitudes sum to strands+weight with the other strands taking
    at least one each, so neither exceeds weight+1).  Cut states evaluate
    to zero under the truncation, so the stratum sum is unchanged.
    """
    n = g.word.strands
    n_seg = g.n_segments
    value: list[Optional[int]] = [None] * n_seg
    free_bottoms = [g.bottoms[p] for p in range(1, n)]
    crossings = g.crossings
    nodes = 0
    rem_bound = [0] * (len(crossings) + 1)
    for k in range(len(crossings) - 1, -1, -1):
        step = 1 if crossings[k].sign < 0 else -(2 * weight + 1)
        rem_bound[k] = rem_bound[k + 1] + step

    def tick() -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise RuntimeError(
                f"stratum {weight} exceeded the node budget of {budget}; "
                "raise it explicitly if the braid warrants the cost")

    def keep(k: int, deg2: int) -> bool:
        return x_order2 is None or deg2 + rem_bound[k] < x_order2

    def bottoms_stage(bi: int, left: int) -> Iterator[tuple[int, ...]]:
        if bi == len(free_bottoms):
            if left == 0 and keep(0, 1 - n):
                yield from cross_stage(0, 1 - n)
            return
        e = free_bottoms[bi]
        spread = left if bi + 1 < len(free_bottoms) else 0
        for t in range(left - spread, left + 1):
            tick()
            value[e] = -1 - t
            yield from bottoms_stage(bi + 1, left - t)
            value[e] = None

    def cross_stage(k: int, deg2: int) -> Iterator[tuple[int, ...]]:
        if k == len(crossings):
            yield tuple(value)
            return
        c = crossings[k]
        i, j = value[c.bl], value[c.br]
        tlv, trv = value[c.tl], value[c.tr]
        if tlv is not None and trv is not None:
            if i + j == tlv + trv and _condition_ok(c.sign, i, j, tlv, trv):
                d = deg2 + c.sign * (j + trv + 1)
                if keep(k + 1, d):
                    yield from cross_stage(k + 1, d)
            return
        if tlv is not None:
            jp = i + j - tlv
            if jp <= -1 and _condition_ok(c.sign, i, j, tlv, jp):
                d = deg2 + c.sign * (j + jp + 1)
                if keep(k + 1, d):
                    tick()
                    value[c.tr] = jp
                    yield from cross_stage(k + 1, d)
                    value[c.tr] = None
            return
        if trv is not None:
            ip = i + j - trv
            if ip <= -1 and _condition_ok(c.sign, i, j, ip, trv):
                d = deg2 + c.sign * (j + trv + 1)
                if keep(k + 1, d):
                    tick()
                    value[c.tl] = ip
                    yield from cross_stage(k + 1, d)
                    value[c.tl] = None
            return
        for ip in range(i + j + 1, 0):
            jp = i + j - ip
            if jp > -1 or not _condition_ok(c.sign, i, j, ip, jp):
                continue
            d = deg2 + c.sign * (j + jp + 1)
            if not keep(k + 1, d):
                continue
            tick()
            value[c.tl] = ip
            value[c.tr] = jp
            yield from cross_stage(k + 1, d)
            value[c.tl] = value[c.tr] = None

    value[g.bottoms[0]] = -1
    yield from bottoms_stage(0, weight)
    value[g.bottoms[0]] = None


def _q_truncate(s: XSeries, q_order2: int) -> XSeries:
    out = {}
    for e, c in s.coeffs.items():
        kept = {k: v for k, v in c.terms.items() if k < q_order2}
        if kept:
            out[e] = HalfLaurent(kept)
    return XSeries(out, s.order2)


def _halve(a: HalfLaurent, b: HalfLaurent) -> HalfLaurent:
    terms = {}
    for e in set(a.terms) | set(b.terms):
        v = Fraction(a.coeff(e)) + Fraction(b.coeff(e))
        v /= 2
        if v:
            terms[e] = int(v) if v.denominator == 1 else v
    return HalfLaurent(terms)


def stratified_sum(g: DiagramGraph, datum: InversionDatum, x_order2: int,
                   q_order2: int, max_weight: int, settle: int = 2,
                   node_budget: int = 2_000_000,
                   rule: str = DEFAULT_SIGN_RULE) -> StratifiedResult:
    """Accumulate the all-minus state sum stratum by stratum.

    The boundary weight of a state is -n plus the total magnitude of its
    bottom values; each stratum is finite and summed exactly, truncated
    jointly in x and q.  The reported object is the normalized f-side:
    the raw sum carries the same global sign as the inverted sum, and
    ``coefficient(2*k)`` approximates the f-series coefficient of x^k
    (the half x-power is stripped, as everywhere else in this package).
    The caller asserts the word is strongly quasinegative; each stratum
    enforces a hard node budget and fails loudly rather than grind on a
    word whose strata blow up.  After the last stratum, coefficients that
    changed within the settle window are checked for a period-2 tail
    against the last four partials (each parity must repeat once): when
    every one of them alternates, the x-coefficient gets an oscillation
    report carrying the parity partials and their average.
    """
    if not validate_datum(g, datum):
        raise ValueError("datum is not valid")
    if any(s > 0 for s in datum.signs):
        raise ValueError("stratified sum needs the all-minus labeling")
    sign = -1 if closed_components(g, datum, rule) % 2 else 1
    strata: list[XSeries] = []
    partials: list[XSeries] = []
    f_partials: list[XSeries] = []
    last_change: dict[tuple[int, int], int] = {}
    running = XSeries({}, x_order2)
    for w in range(max_weight + 1):
        acc_slices: dict[int, dict[int, object]] = {}
        for values in _stratum_states(g, w, node_budget, x_order2):
            s = evaluate_state(g, datum, values, x_order2, q_order2)
            for e, c in s.coeffs.items():
                tgt = acc_slices.setdefault(e, {})
                for q, v in c.terms.items():
                    nv = tgt.get(q, 0) + v
                    if nv:
                        tgt[q] = nv
                    else:
                        del tgt[q]
        acc = XSeries({e: HalfLaurent(t) for e, t in acc_slices.items() if t},
                      x_order2)
        acc = _q_truncate(acc, q_order2)
        strata.append(acc)
        running = running + acc
        partials.append(running)
        fs = running - running.shift(x2=-2)
        if sign < 0:
            fs = -fs
        f_partials.append(fs)
        prev = f_partials[-2] if w else XSeries({}, fs.order2)
        for e in set(fs.coeffs) | set(prev.coeffs):
            a, b = fs.coeff(e), prev.coeff(e)
            for k in set(a.terms) | set(b.terms):
                if a.coeff(k) != b.coeff(k):
                    last_change[(e, k)] = w

    oscillation: dict[int, OscillationReport] = {}
    if max_weight >= 3:
        unstable: dict[int, list[int]] = {}
        for (e, k), w in last_change.items():
            if w > max_weight - settle:
                unstable.setdefault(e, []).append(k)
        for e, qs in unstable.items():
            periodic = True
            for k in qs:
                vals = [f_partials[w].coeff(e).coeff(k)
                        for w in range(max_weight - 3, max_weight + 1)]
                if vals[0] != vals[2] or vals[1] != vals[3]:
                    periodic = False
                    break
            if not periodic:
                continue
            even = f_partials[max_weight if max_weight % 2 == 0 else max_weight - 1]
            odd = f_partials[max_weight if max_weight % 2 == 1 else max_weight - 1]
            ev, od = even.coeff(e), odd.coeff(e)
            oscillation[e] = OscillationReport(
                even=QSeriesTrunc(ev, q_order2),
                odd=QSeriesTrunc(od, q_order2),
                average=QSeriesTrunc(_halve(ev, od), q_order2))
    return StratifiedResult(x_order2=x_order2, q_order2=q_order2,
                            max_weight=max_weight, settle=settle, sign=sign,
                            strata=tuple(strata), partials=tuple(partials),
                            f_partials=tuple(f_partials),
                            last_change=last_change, oscillation=oscillation)
