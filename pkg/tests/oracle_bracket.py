"""Kauffman bracket oracle for the n=1 colored Jones value.

Independent of the R-matrix code: smooths every crossing both ways, counts
loops with a union-find, applies the writhe correction, and substitutes
q = A^4.  Exponential in the word length, so only for short braids.
"""

from __future__ import annotations

from fkseries.braid import BraidWord
from fkseries.qalg import HalfLaurent


class _UF:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, a: int) -> None:
        self.parent.setdefault(a, a)

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> int:
        return len({self.find(a) for a in self.parent})


def bracket_jones_one(b: BraidWord) -> HalfLaurent:
    """J'_1 of the closure of b (unknot normalized to 1), as a q-polynomial."""
    acc: dict[int, int] = {}
    m = len(b.letters)
    for mask in range(1 << m):
        uf = _UF()
        for p in range(b.strands):
            uf.add(p)
        arc = list(range(b.strands))
        nxt = b.strands
        e_a = 0
        for idx, letter in enumerate(b.letters):
            i = abs(letter) - 1
            cupcap = (mask >> idx) & 1
            if not cupcap:
                # identity smoothing: A for a positive crossing, A^{-1} for negative
                e_a += 1 if letter > 0 else -1
            else:
                e_a += -1 if letter > 0 else 1
                uf.union(arc[i], arc[i + 1])
                uf.add(nxt)
                arc[i] = arc[i + 1] = nxt
                nxt += 1
        for p in range(b.strands):
            uf.union(arc[p], p)
        loops = uf.classes()
        # multiply A^{e_a} by (-A^2 - A^{-2})^{loops-1}
        sign = -1 if (loops - 1) % 2 else 1
        from math import comb
        for k in range(loops):
            e = e_a + 2 * (loops - 1 - k) - 2 * k
            acc[e] = acc.get(e, 0) + sign * comb(loops - 1, k)
    w = b.writhe
    out: dict[int, int] = {}
    wsign = -1 if w % 2 else 1
    for e, c in acc.items():
        if c:
            ee = e - 3 * w
            out[ee] = out.get(ee, 0) + wsign * c
    if any(e % 4 for e in out):
        raise AssertionError("bracket exponents not divisible by 4 after correction")
    return HalfLaurent({e // 2: c for e, c in out.items()})
