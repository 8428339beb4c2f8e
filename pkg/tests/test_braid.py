import pytest
from hypothesis import given, settings, strategies as st

from fkseries.braid import (
    BraidWord,
    apply_move,
    applicable_moves,
    band_generator,
    closure_components,
    connected_sum,
    diagram,
    free_reduce,
    knot_traversal,
    mirror,
    normalize,
    random_walk,
    shift,
)


def words(max_strands=4, max_len=8):
    def build(n, raw):
        letters = tuple(g if s > 0 else -g for g, s in ((abs(r) % (n - 1) + 1, r) for r in raw))
        return BraidWord(n, letters)

    return st.builds(
        build,
        st.integers(2, max_strands),
        st.lists(st.integers(-100, 100).filter(lambda r: r != 0), max_size=max_len),
    )


# ------------------------------------------------------------- basic word ops


def test_parse_and_format():
    b = BraidWord.parse("1 -2 1 -2")
    assert b.strands == 3 and b.letters == (1, -2, 1, -2)
    assert BraidWord.parse(str(b)) == b
    assert BraidWord.parse("1 1 1", strands=4).strands == 4
    with pytest.raises(ValueError):
        BraidWord(2, (2,))
    with pytest.raises(ValueError):
        BraidWord(3, (0,))


def test_writhe_and_mirror():
    b = BraidWord(3, (1, -2, 1, -2))
    assert b.writhe == 0
    assert mirror(BraidWord(2, (1, 1, 1))).letters == (-1, -1, -1)
    assert mirror(mirror(b)) == b
    assert mirror(b).writhe == -b.writhe


def test_closure_components():
    assert closure_components(BraidWord(2, (1,))) == 1
    assert closure_components(BraidWord(3, ())) == 3
    assert closure_components(BraidWord(3, (1, -2, 1, -2))) == 1
    assert closure_components(BraidWord(3, (1,))) == 2
    assert closure_components(BraidWord(3, (2, 2))) == 3


def test_is_homogeneous():
    ok, eps = BraidWord(3, (1, -2, 1, -2)).is_homogeneous()
    assert ok and eps == {1: 1, 2: -1}
    ok, _ = BraidWord(2, (1, -1)).is_homogeneous()
    assert not ok


# ---------------------------------------------------------------- structure


def test_band_generator_words():
    assert band_generator(1, 1, 2).letters == (1,)
    assert band_generator(2, 2, 4).letters == (2,)
    assert band_generator(1, 2, 3).letters == (2, 1, -2)


def test_band_generator_permutation():
    # the band switches bottom positions u and v+1, fixing everything else
    for u in range(1, 4):
        for v in range(u, 4):
            perm = band_generator(u, v, 5).permutation()
            expect = list(range(5))
            expect[u - 1], expect[v] = expect[v], expect[u - 1]
            assert perm == expect, (u, v)


def test_connected_sum():
    tref = BraidWord(2, (1, 1, 1))
    both = connected_sum(tref, tref)
    assert both.strands == 4
    assert both.letters == (1, 1, 1, 2, 3, 3, 3)
    assert closure_components(both) == 1
    # summing with the 1-strand unknot is a bare stabilization
    stab = connected_sum(tref, BraidWord(1, ()))
    assert stab.letters == (1, 1, 1, 2) and stab.strands == 3
    assert shift(tref, 2, 5).letters == (3, 3, 3)


# ------------------------------------------------------------------ diagram


def test_segment_counts():
    g = diagram(BraidWord(1, ()))
    assert len(g.crossings) == 0 and g.n_segments == 1

    g = diagram(BraidWord(2, (1, 1, 1)))
    assert len(g.crossings) == 3 and g.n_segments == 6

    g = diagram(BraidWord(3, (2, -1, 2, -1)))
    assert len(g.crossings) == 4 and g.n_segments == 8


def test_diagram_shape_figure_eight():
    g = diagram(BraidWord(3, (1, -2, 1, -2)))
    assert g.n_segments == 8
    assert g.bottoms == (0, 1, 2)
    assert g.open_segment == 0
    signs = [c.sign for c in g.crossings]
    assert signs == [1, -1, 1, -1]
    # both appearances of every segment, across crossing slots and closure
    incid = [0] * g.n_segments
    for c in g.crossings:
        for s in c.slots:
            incid[s] += 1
    assert all(k == 2 for k in incid)


@given(words())
@settings(max_examples=150, deadline=None)
def test_slot_accounting(b):
    """Every closed segment absorbs exactly two crossing slots."""
    g = diagram(b)
    incid = [0] * g.n_segments
    for c in g.crossings:
        for s in c.slots:
            incid[s] += 1
    crossed = [False] * b.strands
    for l in b.letters:
        crossed[abs(l) - 1] = crossed[abs(l)] = True
    idle = sum(1 for f in crossed if not f)
    assert sum(incid) == 4 * len(g.crossings)
    assert g.n_segments == 2 * len(g.crossings) + idle
    assert sorted(set(incid)) in ([0], [2], [0, 2])


def test_knot_traversal_trefoil():
    g = diagram(BraidWord(2, (1, 1, 1)))
    assert knot_traversal(g) == [0, 3, 4, 1, 2, 5]


def test_knot_traversal_rejects_links():
    with pytest.raises(ValueError):
        knot_traversal(diagram(BraidWord(3, (1,))))


@given(words())
@settings(max_examples=150, deadline=None)
def test_knot_traversal_is_permutation(b):
    if closure_components(b) != 1:
        return
    g = diagram(b)
    order = knot_traversal(g)
    assert order[0] == g.open_segment
    assert sorted(order) == list(range(g.n_segments))


# -------------------------------------------------------------------- moves


def test_move_examples():
    assert apply_move(BraidWord(2, (1, -1)), "free-reduce", 0).letters == ()
    assert apply_move(BraidWord(4, (1, 3)), "relation-commute", 0).letters == (3, 1)
    assert apply_move(BraidWord(3, (1, 2, 1)), "relation-yang-baxter", 0).letters == (2, 1, 2)
    assert apply_move(BraidWord(3, (-1, -2, -1)), "relation-yang-baxter", 0).letters == (-2, -1, -2)
    b = BraidWord(2, (1, 1, 1))
    up = apply_move(b, "stabilize", +1)
    assert up.strands == 3 and up.letters == (1, 1, 1, 2)
    assert apply_move(up, "destabilize") == b
    conj = apply_move(b, "conjugate", generator=1)
    assert conj.letters == (-1, 1, 1, 1, 1)


def test_inapplicable_moves_raise():
    b = BraidWord(3, (2, 1))
    for move, pos in [("free-reduce", 0), ("relation-commute", 0),
                      ("relation-yang-baxter", 0), ("destabilize", 0)]:
        with pytest.raises(ValueError):
            apply_move(b, move, pos)
    with pytest.raises(ValueError):
        apply_move(b, "conjugate", generator=5)
    with pytest.raises(ValueError):
        apply_move(b, "no-such-move")


def test_normalize_examples():
    assert normalize(BraidWord(3, (2, 1))).letters == (1, 2)
    assert normalize(BraidWord(3, (1, -1, 2))).letters == (2,)
    assert normalize(BraidWord(3, (2, 1, -2))).letters == (1,)
    assert normalize(BraidWord(3, ())).letters == ()
    # + sorts before - at equal index
    assert normalize(BraidWord(2, (-1, 1, 1))).letters == (1,)
    assert normalize(BraidWord(3, (-2, 1))).letters == (1, -2)


@given(words())
@settings(max_examples=200, deadline=None)
def test_normalize_idempotent(b):
    nb = normalize(b)
    assert normalize(nb) == nb
    assert closure_components(nb) == closure_components(b)


@given(words(), st.integers(0, 10 ** 6))
@settings(max_examples=200, deadline=None)
def test_moves_preserve_closure(b, pick):
    options = applicable_moves(b, max_strands=b.strands + 1)
    if not options:
        return
    move, pos, gen = options[pick % len(options)]
    after = apply_move(b, move, pos, gen)
    assert closure_components(after) == closure_components(b)
    if move in ("relation-commute", "relation-yang-baxter", "conjugate", "free-reduce"):
        assert after.writhe == b.writhe and after.strands == b.strands
    elif move == "stabilize":
        assert after.strands == b.strands + 1
        assert after.writhe == b.writhe + (1 if pos >= 0 else -1)
    elif move == "destabilize":
        assert after.strands == b.strands - 1
        assert abs(after.writhe - b.writhe) == 1


# -------------------------------------------------------------- random walk


def test_walk_zero_iterations():
    b = BraidWord(3, (2, 1))
    out = list(random_walk(b, seed=7, iterations=0))
    assert out == [normalize(b)]


def test_walk_is_deterministic_and_deduped():
    b = BraidWord(3, (1, -2, 1, -2))
    one = list(random_walk(b, seed=11, iterations=40))
    two = list(random_walk(b, seed=11, iterations=40))
    assert one == two
    keys = [(w.strands, w.letters) for w in one]
    assert len(keys) == len(set(keys))
    assert all(normalize(w) == w for w in one)


def test_walk_visitor_stops():
    b = BraidWord(3, (1, -2, 1, -2))
    seen = []

    def visit(w):
        seen.append(w)
        return len(seen) < 3

    list(random_walk(b, seed=5, iterations=100, visitor=visit))
    assert len(seen) == 3


def test_walk_matches_bfs_orbit():
    """Brute-force move closure of a small word, capped at 3 strands."""
    start = BraidWord(3, (1, -2))
    orbit = set()
    frontier = [normalize(start)]
    while frontier:
        w = frontier.pop()
        key = (w.strands, w.letters)
        if key in orbit:
            continue
        orbit.add(key)
        for move, pos, gen in applicable_moves(w, max_strands=3):
            frontier.append(normalize(apply_move(w, move, pos, gen)))
    expected = {
        (1, ()),
        (2, (1,)), (2, (-1,)),
        (3, (1, 2)), (3, (1, -2)), (3, (-1, 2)), (3, (-1, -2)),
    }
    assert orbit == expected
    # one move per iteration makes the walk take exactly the BFS's steps
    walked = {(w.strands, w.letters)
              for w in random_walk(start, seed=3, iterations=300,
                                   moves_per_iteration=1, max_strands=3)}
    assert walked == orbit
