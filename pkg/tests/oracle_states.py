"""Brute-force enumeration of valid states inside a value box.

Independent oracle: validity is spelled out directly from the R-value
support conditions (case split on the crossing sign), not from the LP
constraint builder under test.
"""

from fkseries.braid import DiagramGraph


def _sign_ok(v: int, sign: int) -> bool:
    return v >= 0 if sign > 0 else v <= -1


def _support_ok(c, vals) -> bool:
    i, j = vals[c.bl], vals[c.br]
    ip, jp = vals[c.tl], vals[c.tr]
    if c.sign > 0:
        return (i >= jp >= 0) or (0 > i >= jp) or (jp >= 0 > i)
    return (j >= ip >= 0) or (0 > j >= ip) or (ip >= 0 > j)


def box_states(g: DiagramGraph, datum, lo: int, hi: int) -> list[tuple[int, ...]]:
    """All valid states with every entry in [lo, hi], as segment-indexed tuples."""
    signs = datum.signs
    vals: dict[int, int] = {}
    res: list[tuple[int, ...]] = []
    bots = list(g.bottoms)

    def place_crossing(k: int) -> None:
        if k == len(g.crossings):
            res.append(tuple(vals[e] for e in g.segment_ids()))
            return
        c = g.crossings[k]
        i, j = vals[c.bl], vals[c.br]
        candidates = [vals[c.tl]] if c.tl in vals else range(lo, hi + 1)
        for ip in candidates:
            if not _sign_ok(ip, signs[c.tl]):
                continue
            jp = i + j - ip
            if not (lo <= jp <= hi) or not _sign_ok(jp, signs[c.tr]):
                continue
            new_tl = c.tl not in vals
            if new_tl:
                vals[c.tl] = ip
            if c.tr in vals:
                if vals[c.tr] != jp:
                    if new_tl:
                        del vals[c.tl]
                    continue
                new_tr = False
            else:
                vals[c.tr] = jp
                new_tr = True
            if _support_ok(c, vals):
                place_crossing(k + 1)
            if new_tl:
                del vals[c.tl]
            if new_tr:
                del vals[c.tr]

    def place_bottom(k: int) -> None:
        if k == len(bots):
            place_crossing(0)
            return
        e = bots[k]
        if e == g.open_segment:
            vals[e] = 0 if signs[e] > 0 else -1
            place_bottom(k + 1)
            del vals[e]
            return
        for v in range(lo, hi + 1):
            if _sign_ok(v, signs[e]):
                vals[e] = v
                place_bottom(k + 1)
                del vals[e]

    place_bottom(0)
    return res
