"""Braid words, closed-diagram incidence structure, and word rewriting.

A braid word is a sequence of signed Artin generators, written bottom to
top.  Closing the braid identifies the top of every strand position with
its bottom; the leftmost strand is left open (cut) for the state sum, but
the cut lives inside a single segment, so the segment count is always
2 * #crossings (or one segment per uncrossed strand position).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional


@dataclass(frozen=True)
class BraidWord:
    """Word in the braid group B_n; letters are nonzero ints, sign = crossing sign."""

    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("need at least one strand")
        object.__setattr__(self, "letters", tuple(self.letters))
        for l in self.letters:
            if l == 0 or abs(l) >= self.strands:
                raise ValueError(f"letter {l} out of range for {self.strands} strands")

    @staticmethod
    def parse(text: str, strands: int | None = None) -> "BraidWord":
        """Parse whitespace-separated signed indices, e.g. "1 -2 1 -2"."""
        letters = tuple(int(tok) for tok in text.split())
        if strands is None:
            strands = max((abs(l) for l in letters), default=0) + 1
        return BraidWord(strands, letters)

    def __str__(self) -> str:
        return " ".join(str(l) for l in self.letters) if self.letters else "(empty)"

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def writhe(self) -> int:
        return sum(1 if l > 0 else -1 for l in self.letters)

    def permutation(self) -> list[int]:
        """perm[p] = top position reached by the strand entering at bottom position p (0-based)."""
        perm = list(range(self.strands))
        for l in self.letters:
            i = abs(l) - 1
            perm = [_swap_apply(p, i) for p in perm]
        return perm

    def is_homogeneous(self) -> tuple[bool, dict[int, int]]:
        """True when every generator index occurs with one fixed sign.

        Also returns the sign per used index.
        """
        eps: dict[int, int] = {}
        for l in self.letters:
            s = 1 if l > 0 else -1
            if eps.setdefault(abs(l), s) != s:
                return False, {}
        return True, eps


def _swap_apply(p: int, i: int) -> int:
    if p == i:
        return i + 1
    if p == i + 1:
        return i
    return p


def closure_components(b: BraidWord) -> int:
    """Number of link components of the closed braid."""
    perm = b.permutation()
    seen = [False] * b.strands
    count = 0
    for start in range(b.strands):
        if seen[start]:
            continue
        count += 1
        p = start
        while not seen[p]:
            seen[p] = True
            p = perm[p]
    return count


def mirror(b: BraidWord) -> BraidWord:
    return BraidWord(b.strands, tuple(-l for l in b.letters))


def band_generator(u: int, v: int, strands: int) -> BraidWord:
    """Positively embedded band (sigma_v ... sigma_{u+1}) sigma_u (...)^{-1}."""
    if not (1 <= u <= v <= strands - 1):
        raise ValueError("band indices out of range")
    prefix = list(range(v, u, -1))
    word = prefix + [u] + [-g for g in reversed(prefix)]
    return BraidWord(strands, tuple(word))


def shift(b: BraidWord, k: int, strands: int) -> BraidWord:
    """Reindex every generator i to i+k inside a larger braid group."""
    return BraidWord(strands, tuple(l + k if l > 0 else l - k for l in b.letters))


def connected_sum(b1: BraidWord, b2: BraidWord, m: int = 1) -> BraidWord:
    """Closure gives the connected sum; joins with one crossing sigma_{n1}^m."""
    if m not in (1, -1):
        raise ValueError("m must be +1 or -1")
    n1 = b1.strands
    total = n1 + b2.strands
    letters = b1.letters + (m * n1,) + shift(b2, n1, total).letters
    return BraidWord(total, letters)


# ----------------------------------------------------------------- diagram


@dataclass(frozen=True)
class Crossing:
    """One crossing with its sign, leftmost strand position (0-based), and segment ids."""

    sign: int
    pos: int
    bl: int
    br: int
    tl: int
    tr: int

    @property
    def slots(self) -> tuple[int, int, int, int]:
        return (self.bl, self.br, self.tl, self.tr)


@dataclass(frozen=True)
class DiagramGraph:
    """Closed-braid incidence structure: crossings and segments.

    Segments are numbered 0..n_segments-1.  bottoms[p] is the segment at
    the very bottom (and, through the closure, the very top) of strand
    position p; bottoms[0] is the open segment carrying the cut.
    """

    word: BraidWord
    n_segments: int
    crossings: tuple[Crossing, ...]
    bottoms: tuple[int, ...]

    @property
    def open_segment(self) -> int:
        return self.bottoms[0]

    def segment_ids(self) -> range:
        return range(self.n_segments)


def diagram(b: BraidWord) -> DiagramGraph:
    n = b.strands
    # provisional ids: one per bottom position, two fresh per crossing
    parent = list(range(n))

    def fresh() -> int:
        parent.append(len(parent))
        return len(parent) - 1

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        parent[find(x)] = find(y)

    cur = list(range(n))
    raw_crossings = []
    for l in b.letters:
        i = abs(l) - 1
        bl, br = cur[i], cur[i + 1]
        tl, tr = fresh(), fresh()
        raw_crossings.append((1 if l > 0 else -1, i, bl, br, tl, tr))
        cur[i], cur[i + 1] = tl, tr
    # trace closure: top of position p is the same segment as bottom of p.
    # The open strand's cut sits inside bottoms[0]; identification is the same.
    for p in range(n):
        union(cur[p], p)

    # renumber classes in deterministic order of first appearance
    relabel: dict[int, int] = {}

    def canon(x: int) -> int:
        r = find(x)
        if r not in relabel:
            relabel[r] = len(relabel)
        return relabel[r]

    bottoms = tuple(canon(p) for p in range(n))
    crossings = tuple(
        Crossing(sign, pos, canon(bl), canon(br), canon(tl), canon(tr))
        for sign, pos, bl, br, tl, tr in raw_crossings
    )
    n_segments = len(relabel)
    return DiagramGraph(word=b, n_segments=n_segments, crossings=crossings, bottoms=bottoms)


def knot_traversal(g: DiagramGraph) -> list[int]:
    """Segments in the order the knot passes through them, each listed once.

    Starts at the bottom end of the open strand and follows the braid
    upward, wrapping through the closure arcs, until it reaches the open
    strand's top end.  Requires the closure to be a knot.
    """
    b = g.word
    if closure_components(b) != 1:
        raise ValueError("traversal order defined for knots only")
    # crossings per position, bottom to top
    per_pos: list[list[int]] = [[] for _ in range(b.strands)]
    for k, c in enumerate(g.crossings):
        per_pos[c.pos].append(k)
        per_pos[c.pos + 1].append(k)

    order: list[int] = [g.open_segment]
    pos, height = 0, -1  # height = index of last crossing passed at this position
    while True:
        nxt = next((k for k in per_pos[pos] if k > height), None)
        if nxt is None:
            if pos == 0:
                break
            if not per_pos[pos]:
                raise AssertionError("freestanding position on a knot closure")
            # the segment continues through the closure arc at this position
            height = -1
            continue
        c = g.crossings[nxt]
        if pos == c.pos:
            out_seg, out_pos = c.tr, c.pos + 1
        else:
            out_seg, out_pos = c.tl, c.pos
        order.append(out_seg)
        pos, height = out_pos, nxt
    # the final stretch up position 0 is the open segment again; keep first visit only
    if len(order) > 1:
        assert order[-1] == g.open_segment
        order.pop()
    return order


# ------------------------------------------------------------------- moves


def free_reduce(b: BraidWord) -> BraidWord:
    out: list[int] = []
    for l in b.letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return BraidWord(b.strands, tuple(out))


def apply_move(b: BraidWord, move: str, position: int = 0,
               generator: int | None = None) -> BraidWord:
    """Apply one braid/Markov move; raises ValueError when inapplicable.

    Moves: 'relation-commute', 'relation-yang-baxter', 'conjugate',
    'stabilize', 'destabilize', 'free-reduce'.  'conjugate' takes the
    signed generator; 'stabilize' takes position=+1 or -1 for the sign
    of the new crossing.
    """
    L = list(b.letters)
    if move == "free-reduce":
        if position + 1 >= len(L) or L[position] != -L[position + 1]:
            raise ValueError("no canceling pair at position")
        del L[position:position + 2]
        return BraidWord(b.strands, tuple(L))
    if move == "relation-commute":
        if position + 1 >= len(L) or abs(abs(L[position]) - abs(L[position + 1])) < 2:
            raise ValueError("letters do not commute at position")
        L[position], L[position + 1] = L[position + 1], L[position]
        return BraidWord(b.strands, tuple(L))
    if move == "relation-yang-baxter":
        if position + 2 >= len(L):
            raise ValueError("no room for braid relation")
        a, c, a2 = L[position], L[position + 1], L[position + 2]
        if a != a2 or abs(abs(a) - abs(c)) != 1 or (a > 0) != (c > 0):
            raise ValueError("braid relation does not match at position")
        L[position:position + 3] = [c, a, c]
        return BraidWord(b.strands, tuple(L))
    if move == "conjugate":
        if generator is None or generator == 0 or abs(generator) >= b.strands:
            raise ValueError("conjugation needs a valid signed generator")
        return BraidWord(b.strands, (-generator,) + b.letters + (generator,))
    if move == "stabilize":
        sign = 1 if position >= 0 else -1
        return BraidWord(b.strands + 1, b.letters + (sign * b.strands,))
    if move == "destabilize":
        g = b.strands - 1
        if not L or abs(L[-1]) != g or sum(1 for l in L if abs(l) == g) != 1:
            raise ValueError("word is not in destabilizable form")
        return BraidWord(b.strands - 1, tuple(L[:-1]))
    raise ValueError(f"unknown move {move!r}")


def _letter_key(l: int) -> tuple[int, int]:
    return (abs(l), 0 if l > 0 else 1)


def normalize(b: BraidWord) -> BraidWord:
    """Cyclically free-reduce, then pick the lex-least rotation.

    Cancellation across the rotation seam counts as an obvious reduction
    too; without it, conjugation moves would inflate words forever.  The
    letter order is (generator index ascending, then + before -).
    """
    letters = list(free_reduce(b).letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    if not letters:
        return BraidWord(b.strands, ())
    rotations = [tuple(letters[k:] + letters[:k]) for k in range(len(letters))]
    best = min(rotations, key=lambda rot: [_letter_key(l) for l in rot])
    return BraidWord(b.strands, best)


def applicable_moves(b: BraidWord, max_strands: int) -> list[tuple]:
    """All (move, position, generator) triples apply_move would accept."""
    moves: list[tuple] = []
    L = b.letters
    for i in range(len(L) - 1):
        if L[i] == -L[i + 1]:
            moves.append(("free-reduce", i, None))
        if abs(abs(L[i]) - abs(L[i + 1])) >= 2:
            moves.append(("relation-commute", i, None))
    for i in range(len(L) - 2):
        if L[i] == L[i + 2] and abs(abs(L[i]) - abs(L[i + 1])) == 1 and (L[i] > 0) == (L[i + 1] > 0):
            moves.append(("relation-yang-baxter", i, None))
    for g in range(1, b.strands):
        moves.append(("conjugate", 0, g))
        moves.append(("conjugate", 0, -g))
    if b.strands < max_strands:
        moves.append(("stabilize", 1, None))
        moves.append(("stabilize", -1, None))
    g = b.strands - 1
    if L and b.strands >= 2 and abs(L[-1]) == g and sum(1 for l in L if abs(l) == g) == 1:
        moves.append(("destabilize", 0, None))
    return moves


def random_walk(b: BraidWord, seed: int, iterations: int,
                moves_per_iteration: int = 3,
                visitor: Optional[Callable[[BraidWord], bool]] = None,
                max_strands: int | None = None) -> Iterator[BraidWord]:
    """Reproducible random walk over braid/Markov moves.

    Yields normalized, deduplicated words; the visitor may return False to
    stop the walk early.
    """
    rng = random.Random(seed)
    if max_strands is None:
        max_strands = b.strands + 3
    emitted = set()
    cur = b

    def emit(word: BraidWord):
        key = (word.strands, word.letters)
        if key in emitted:
            return None
        emitted.add(key)
        return word

    cur = normalize(cur)
    first = emit(cur)
    if first is not None:
        if visitor is not None and visitor(first) is False:
            return
        yield first
    for _ in range(iterations):
        for _ in range(moves_per_iteration):
            options = applicable_moves(cur, max_strands)
            if not options:
                break
            move, posn, gen = rng.choice(options)
            cur = apply_move(cur, move, posn, gen)
        cur = normalize(cur)
        out = emit(cur)
        if out is not None:
            if visitor is not None and visitor(out) is False:
                return
            yield out
