"""Sign labelings of closed-braid diagrams and their niceness certificates.

A labeling (datum) assigns '+' or '-' to every segment so that each
crossing shows one of five admissible patterns per crossing sign.  From a
valid datum we derive the global sign (number of closed components of the
'-' multicycle), the ground state, the integer ell, and an exact-LP
certificate that only finitely many states can land in any fixed x-degree
of the state sum.  All LP work is exact rational so the certificates can
be rechecked independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .braid import (BraidWord, Crossing, DiagramGraph, closure_components,
                    diagram, knot_traversal, normalize, random_walk)
from .lp import solve_lp

# Admissible (bl, br, tl, tr) sign patterns, keyed by crossing sign.  The
# two crossing signs share the jump patterns, the all-equal patterns, and
# differ in which mixed column pattern is stable.
_ROW_B = (-1, 1, -1, 1)   # positive-crossing pattern whose R-value holds with no inequality
_ROW_D = (1, -1, 1, -1)   # negative-crossing counterpart

ALLOWED_PATTERNS: dict[int, tuple[tuple[int, int, int, int], ...]] = {
    1: ((-1, -1, -1, -1), _ROW_B, (-1, 1, 1, -1), (1, -1, -1, 1), (1, 1, 1, 1)),
    -1: ((-1, -1, -1, -1), (-1, 1, 1, -1), (1, -1, -1, 1), _ROW_D, (1, 1, 1, 1)),
}


@dataclass(frozen=True)
class InversionDatum:
    """Total sign assignment, indexed by segment id."""

    signs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(self.signs))
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("segment signs must be +1 or -1")

    def string(self, g: DiagramGraph) -> str:
        """'+'/'-' characters ordered along the knot from the open strand's bottom end."""
        return "".join("+" if self.signs[e] > 0 else "-" for e in knot_traversal(g))

    @staticmethod
    def from_string(g: DiagramGraph, text: str) -> "InversionDatum":
        order = knot_traversal(g)
        if len(text) != len(order):
            raise ValueError(f"expected {len(order)} signs, got {len(text)}")
        signs = [0] * g.n_segments
        for ch, e in zip(text, order):
            if ch not in "+-":
                raise ValueError(f"bad sign character {ch!r}")
            signs[e] = 1 if ch == "+" else -1
        return InversionDatum(tuple(signs))

    def flip_open(self, g: DiagramGraph) -> "InversionDatum":
        signs = list(self.signs)
        signs[g.open_segment] = -signs[g.open_segment]
        return InversionDatum(tuple(signs))


def _pattern(signs: Sequence[int], c: Crossing) -> tuple[int, int, int, int]:
    return (signs[c.bl], signs[c.br], signs[c.tl], signs[c.tr])


def validate_datum(g: DiagramGraph, datum: InversionDatum) -> bool:
    if len(datum.signs) != g.n_segments:
        raise ValueError("datum does not cover every segment")
    return all(_pattern(datum.signs, c) in ALLOWED_PATTERNS[c.sign] for c in g.crossings)


def enumerate_data(g: DiagramGraph) -> list[InversionDatum]:
    """Every valid labeling, by DFS over crossings with propagation.

    Order is deterministic (patterns ascending per crossing, idle segments
    '-' before '+').
    """
    crossings = g.crossings
    assign: dict[int, int] = {}
    out: list[InversionDatum] = []

    def place(k: int) -> None:
        if k == len(crossings):
            idle = [e for e in g.segment_ids() if e not in assign]

            def fill(t: int) -> None:
                if t == len(idle):
                    out.append(InversionDatum(tuple(assign[e] for e in g.segment_ids())))
                    return
                for s in (-1, 1):
                    assign[idle[t]] = s
                    fill(t + 1)
                    del assign[idle[t]]

            fill(0)
            return
        c = crossings[k]
        slots = c.slots
        for pat in ALLOWED_PATTERNS[c.sign]:
            new: dict[int, int] = {}
            ok = True
            for e, s in zip(slots, pat):
                have = assign.get(e, new.get(e))
                if have is None:
                    new[e] = s
                elif have != s:
                    ok = False
                    break
            if ok:
                assign.update(new)
                place(k + 1)
                for e in new:
                    del assign[e]

    place(0)
    return out


def closed_components(g: DiagramGraph, datum: InversionDatum, rule: str = "tangle") -> int:
    """Closed components of the multicycle carried by the '-' segments.

    At each crossing the incoming '-' slots are matched to the outgoing
    ones.  A single '-' in and out is matched directly.  When all four
    slots are '-', the default rule matches by turnbacks (bl->tl, br->tr)
    at a positive crossing and by strand continuation (bl->tr, br->tl) at
    a negative one, and the component running through the open segment is
    not counted: the strand is cut there, so that component is an arc of
    the one-one tangle rather than a closed curve.  Idle '-' circles
    count one component each (again minus the cut one).

    The default is the unique rule of this shape found to make the signed
    sum agree across every labeling of the same word, on a panel of
    twelve knots with both parities of open-segment sign represented.
    The naive variants 'jump' and 'strand' (uniform matching at all '-'
    crossings, no cut adjustment) are kept for diagnostics; both break
    labeling independence on the trefoil and figure-eight fixtures.
    """
    if rule not in ("strand", "jump", "tangle"):
        raise ValueError(f"unknown connection rule {rule!r}")
    if not validate_datum(g, datum):
        raise ValueError("datum is not valid")
    signs = datum.signs
    nxt: dict[int, int] = {}
    engaged: set[int] = set()
    for c in g.crossings:
        engaged.update(c.slots)
        ins = [e for e in (c.bl, c.br) if signs[e] < 0]
        outs = [e for e in (c.tl, c.tr) if signs[e] < 0]
        if len(ins) == 1:
            nxt[ins[0]] = outs[0]
        elif len(ins) == 2:
            turnback = c.sign > 0 if rule == "tangle" else rule == "jump"
            if turnback:
                nxt[c.bl], nxt[c.br] = c.tl, c.tr
            else:
                nxt[c.bl], nxt[c.br] = c.tr, c.tl
    count = sum(1 for e in g.segment_ids() if signs[e] < 0 and e not in engaged)
    seen: set[int] = set()
    for start in nxt:
        if start in seen:
            continue
        count += 1
        e = start
        while e not in seen:
            seen.add(e)
            e = nxt[e]
    if rule == "tangle" and signs[g.open_segment] < 0:
        count -= 1
    return count


def ground_state(g: DiagramGraph, datum: InversionDatum) -> tuple[int, ...]:
    """The unique {0,-1} valid state: 0 on '+', -1 on '-'."""
    if not validate_datum(g, datum):
        raise ValueError("datum is not valid")
    return tuple(0 if s > 0 else -1 for s in datum.signs)


def ell(g: DiagramGraph, datum: InversionDatum) -> int:
    """The integer ell from the datum: strand terms plus one rational per crossing."""
    if not validate_datum(g, datum):
        raise ValueError("datum is not valid")
    signs = datum.signs
    quad = -2 * sum(signs[g.bottoms[p]] for p in range(1, g.word.strands))
    for c in g.crossings:
        quad += c.sign * (1 + signs[c.br] * signs[c.tr])
    if quad % 4:
        raise ArithmeticError("ell did not come out an integer")
    return quad // 4


def ell_homogeneous(b: BraidWord) -> int:
    """Shortcut w/2 - sum(eps_i)/2 for homogeneous words."""
    homog, eps = b.is_homogeneous()
    if not homog:
        raise ValueError("word is not homogeneous")
    num = b.writhe - sum(eps.values())
    if num % 2:
        raise ArithmeticError("ell did not come out an integer")
    return num // 2


def segment_columns(g: DiagramGraph) -> list[int]:
    """Strand position each segment lives on (well defined through the closure)."""
    col = [-1] * g.n_segments
    for p, e in enumerate(g.bottoms):
        col[e] = p
    for c in g.crossings:
        col[c.tl] = c.pos
        col[c.tr] = c.pos + 1
    return col


def natural_datum(g: DiagramGraph) -> InversionDatum:
    """Column-constant datum of a homogeneous word: position i carries eps_i.

    Position 0 (never a right column) carries '+'.  Admissible at every
    crossing precisely because each generator keeps one sign.
    """
    homog, eps = g.word.is_homogeneous()
    if not homog:
        raise ValueError("natural datum needs a homogeneous word")
    col = segment_columns(g)
    signs = tuple(eps.get(col[e], 1) for e in g.segment_ids())
    datum = InversionDatum(signs)
    assert validate_datum(g, datum)
    return datum


# ------------------------------------------------------------- niceness LP


def degree_functional(g: DiagramGraph, values: Sequence) -> Fraction:
    """x-degree of a state's summand: -(n-1)/2 + sum_c sgn(c)(j+j'+1)/2."""
    total = Fraction(1 - g.word.strands, 2)
    for c in g.crossings:
        total += c.sign * Fraction(values[c.br] + values[c.tr] + 1, 2)
    return total


def support_rows(g: DiagramGraph, datum: InversionDatum) -> list[tuple[int, int, int]]:
    """(crossing index, p, q) with a_p - a_q >= 0 on every valid state.

    A crossing contributes the pair of difference inequalities
    sgn(c)(i-j') >= 0 and sgn(c)(i'-j) >= 0 exactly when the datum pattern
    matches signs across both diagonals; on the two crossing-stable mixed
    patterns the R-value's support condition follows from the signs alone.
    """
    rows = []
    for k, c in enumerate(g.crossings):
        pat = _pattern(datum.signs, c)
        if c.sign > 0 and pat != _ROW_B:
            rows.append((k, c.bl, c.tr))
            rows.append((k, c.tl, c.br))
        elif c.sign < 0 and pat != _ROW_D:
            rows.append((k, c.br, c.tl))
            rows.append((k, c.tr, c.bl))
    return rows


@dataclass(frozen=True)
class NicenessCertificate:
    """Outcome of the degree-properness check for one (diagram, datum) pair.

    nice requires the exact LP minimum to exist, be >= 0, and the recession
    cone to contain no nonzero ray of nonpositive degree drift.  When nice,
    (alpha, gamma, beta) reconstruct the degree functional on every feasible
    point as beta + sum alpha_e |a_e| + sum gamma_j (a_p - a_q).  When not,
    ray is an integer recession direction witnessing the failure.

    beta is the functional's value extended to the all-zero labeling, which
    sits outside the feasible set whenever '-' segments exist; it can be
    negative even though min_degree >= 0 (every '-' segment contributes at
    least alpha_e to the gap).
    """

    nice: bool
    min_degree: Optional[Fraction]
    coercive: bool
    alpha: Optional[tuple[Fraction, ...]] = None
    gamma: Optional[tuple[Fraction, ...]] = None
    beta: Optional[Fraction] = None
    supports: tuple[tuple[int, int, int], ...] = ()
    ray: Optional[tuple[int, ...]] = None

    def evaluate(self, datum: InversionDatum, values: Sequence) -> Fraction:
        """beta + sum alpha|a| + sum gamma (a_p - a_q) at the given state."""
        if not self.nice:
            raise ValueError("no reconstruction on a non-nice certificate")
        total = Fraction(self.beta)
        for a, al in zip(values, self.alpha):
            total += al * abs(a)
        for (_, p, q), ga in zip(self.supports, self.gamma):
            total += ga * (values[p] - values[q])
        return total

    def to_json(self) -> dict:
        frac = lambda v: None if v is None else str(v)
        return {
            "nice": self.nice,
            "min_degree": frac(self.min_degree),
            "coercive": self.coercive,
            "alpha": None if self.alpha is None else [frac(a) for a in self.alpha],
            "gamma": None if self.gamma is None else [
                {"crossing": k, "greater": p, "less": q, "value": frac(v)}
                for (k, p, q), v in zip(self.supports, self.gamma)
            ],
            "beta": frac(self.beta),
            "ray": None if self.ray is None else list(self.ray),
        }


def _integer_ray(vec: Sequence[Fraction]) -> tuple[int, ...]:
    scale = math.lcm(*(v.denominator for v in vec))
    ints = [int(v * scale) for v in vec]
    g = math.gcd(*ints)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def degree_lp(g: DiagramGraph, datum: InversionDatum):
    """LP data of the degree functional in shifted coordinates u >= 0.

    a_e = sigma_e u_e + tau_e, so u counts the distance from the ground
    value on each segment.  Returns (sigma, tau, a_eq, b_eq, a_ge, b_ge,
    cost, const, supports): the equalities pin the open segment and encode
    charge conservation, the inequality rows are the crossing supports,
    and cost.u + const is the x-degree of the state's summand.
    """
    n_seg = g.n_segments
    signs = datum.signs
    sigma = [1 if s > 0 else -1 for s in signs]
    tau = [0 if s > 0 else -1 for s in signs]
    zero = [Fraction(0)] * n_seg

    a_eq: list[list[Fraction]] = []
    b_eq: list[Fraction] = []
    pin = list(zero)
    pin[g.open_segment] = Fraction(1)
    a_eq.append(pin)
    b_eq.append(Fraction(0))
    for c in g.crossings:
        row = list(zero)
        rhs = Fraction(0)
        for e, way in ((c.bl, 1), (c.br, 1), (c.tl, -1), (c.tr, -1)):
            row[e] += way * sigma[e]
            rhs -= way * tau[e]
        a_eq.append(row)
        b_eq.append(rhs)

    supports = tuple(support_rows(g, datum))
    a_ge: list[list[Fraction]] = []
    b_ge: list[Fraction] = []
    for _, p, q in supports:
        row = list(zero)
        row[p] += sigma[p]
        row[q] -= sigma[q]
        a_ge.append(row)
        b_ge.append(Fraction(tau[q] - tau[p]))

    cost = list(zero)
    const = Fraction(1 - g.word.strands, 2)
    for c in g.crossings:
        for e in (c.br, c.tr):
            cost[e] += Fraction(c.sign * sigma[e], 2)
        const += Fraction(c.sign * (tau[c.br] + tau[c.tr] + 1), 2)
    return sigma, tau, a_eq, b_eq, a_ge, b_ge, cost, const, supports


def niceness_check(g: DiagramGraph, datum: InversionDatum) -> NicenessCertificate:
    """Exact-LP properness check of the degree functional over valid states.

    Works in shifted coordinates u_e >= 0, where a_e = u_e on '+' segments
    and a_e = -1 - u_e on '-' segments; the open segment is pinned to its
    ground value.  Exactly one of: the functional is coercive on the
    polyhedron (nice, with dual multipliers as certificate), or there is a
    recession ray along which it does not grow (returned as witness).
    """
    if not validate_datum(g, datum):
        raise ValueError("datum is not valid")
    n_seg = g.n_segments
    sigma, tau, a_eq, b_eq, a_ge, b_ge, cost, const, supports = degree_lp(g, datum)
    zero = [Fraction(0)] * n_seg

    res = solve_lp(cost, a_eq, b_eq, a_ge, b_ge, const)
    if res.status == 'infeasible':
        raise AssertionError("polyhedron lost its ground state")
    if res.status == 'unbounded':
        ray = _integer_ray([s * r for s, r in zip(sigma, res.ray)])
        return NicenessCertificate(nice=False, min_degree=None, coercive=False,
                                   supports=supports, ray=ray)

    # Recession cone: directions r >= 0 with all homogeneous constraints
    # kept, nonpositive degree drift, normalized to sum 1.
    rec_eq = [row[:] for row in a_eq] + [[Fraction(1)] * n_seg]
    rec_b = [Fraction(0)] * len(a_eq) + [Fraction(1)]
    rec_ge = [row[:] for row in a_ge] + [[-v for v in cost]]
    rec_bge = [Fraction(0)] * (len(a_ge) + 1)
    rec = solve_lp(list(zero), rec_eq, rec_b, rec_ge, rec_bge)
    if rec.status == 'optimal':
        ray = _integer_ray([s * r for s, r in zip(sigma, rec.x)])
        return NicenessCertificate(nice=False, min_degree=res.value, coercive=False,
                                   supports=supports, ray=ray)

    alpha = tuple(res.reduced)
    gamma = tuple(res.y_ge)
    assert all(a >= 0 for a in alpha) and all(v >= 0 for v in gamma)
    beta = res.value - sum(a for a, t in zip(alpha, tau) if t)
    return NicenessCertificate(nice=res.value >= 0, min_degree=res.value,
                               coercive=True, alpha=alpha, gamma=gamma,
                               beta=beta, supports=supports)


# ------------------------------------------------------------------ search


@dataclass
class SearchResult:
    """Outcome of a datum search; hit is None when the budget ran out."""

    hit: Optional[tuple[BraidWord, InversionDatum, NicenessCertificate]]
    words_tried: int
    data_tried: int
    seed: int
    trace: tuple[str, ...]


def search_datum(b: BraidWord, budget: int = 200, seed: int = 0,
                 max_strands: int | None = None) -> SearchResult:
    """Walk braid moves from b until some representative admits a nice datum.

    Each emitted normalized word is enumerated and LP-checked; within a
    word the lexicographically smallest nice datum string wins, so the
    result depends only on the seed and budget.  The trace records every
    word visited, making the hit reproducible.
    """
    if closure_components(b) != 1:
        raise ValueError("datum search is defined for knots")
    words_tried = 0
    data_tried = 0
    trace: list[str] = []
    for word in random_walk(b, seed=seed, iterations=budget, max_strands=max_strands):
        if words_tried >= budget:
            break
        words_tried += 1
        trace.append(str(word))
        gw = diagram(word)
        best: Optional[tuple[str, InversionDatum, NicenessCertificate]] = None
        for datum in enumerate_data(gw):
            data_tried += 1
            cert = niceness_check(gw, datum)
            if cert.nice:
                key = datum.string(gw)
                if best is None or key < best[0]:
                    best = (key, datum, cert)
        if best is not None:
            return SearchResult(hit=(word, best[1], best[2]), words_tried=words_tried,
                                data_tried=data_tried, seed=seed, trace=tuple(trace))
    return SearchResult(hit=None, words_tried=words_tried, data_tried=data_tried,
                        seed=seed, trace=tuple(trace))


def data_up_to_flip(g: DiagramGraph, data: Sequence[InversionDatum]) -> int:
    """Count labelings modulo flipping the open segment's sign."""
    seen: set[tuple[int, ...]] = set()
    count = 0
    for d in data:
        if d.signs in seen:
            continue
        count += 1
        seen.add(d.signs)
        flipped = d.flip_open(g)
        if validate_datum(g, flipped):
            seen.add(flipped.signs)
    return count
