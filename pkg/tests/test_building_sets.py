import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from nestohedra import building_sets as bs
from nestohedra import face_lattice as fl
from nestohedra.errors import CapacityError, InputError, PreconditionError

AS3_SETS = [[1], [2], [3], [4], [1, 2], [2, 3], [3, 4], [1, 2, 3], [2, 3, 4], [1, 2, 3, 4]]


def fam(*sets):
    return [bs.mask_of(s) for s in sets]


def as3():
    return bs.BuildingSet.from_sets(AS3_SETS, 4)


# -- subsets ---------------------------------------------------------------


def test_mask_roundtrip():
    assert bs.mask_of([1, 3]) == 0b101
    assert bs.indices_of(0b101) == (1, 3)
    assert bs.format_subset(0b111) == "{1,2,3}"
    assert bs.parse_subset("{2,4}") == 0b1010


def test_canonical_order_is_cardinality_then_lex():
    b = as3()
    keys = [bs.canonical_key(m) for m in b.elements]
    assert keys == sorted(keys)
    assert b.as_lists() == AS3_SETS


# -- validation ------------------------------------------------------------


def test_validate_minimal_connected():
    r = bs.validate(fam([1], [2], [1, 2]), 2)
    assert r.valid and r.connected


def test_validate_axiom_two_violation():
    r = bs.validate(fam([1], [2], [3], [1, 2], [2, 3]), 3)
    assert not r.valid
    (v,) = r.violations
    assert v.missing == bs.mask_of([1, 2, 3])
    assert set(v.witnesses) == {bs.mask_of([1, 2]), bs.mask_of([2, 3])}


def test_validate_missing_singleton():
    r = bs.validate(fam([1], [1, 2]), 2)
    assert not r.valid
    assert any(v.missing == bs.mask_of([2]) for v in r.violations)


def test_validate_as3():
    r = bs.validate(fam(*AS3_SETS), 4)
    assert r.valid and r.connected


@pytest.mark.parametrize("bad", [[], [0], [5], 0, 16])
def test_malformed_subset_is_input_error(bad):
    with pytest.raises(InputError):
        bs.validate([bad], 4)


def test_ground_capacity(monkeypatch):
    monkeypatch.setenv("NESTO_MAX_GROUND", "5")
    with pytest.raises(CapacityError):
        bs.preset("simplex", 5)
    bs.preset("simplex", 4)


def test_invalid_building_set_rejected():
    with pytest.raises(InputError):
        bs.BuildingSet(3, tuple(fam([1], [2], [3], [1, 2], [2, 3])))


# -- closure / restriction / product ---------------------------------------


def test_closure_forced_sets():
    c = bs.closure(fam([1, 2], [2, 3]), 3)
    assert c.as_lists() == [[1], [2], [3], [1, 2], [2, 3], [1, 2, 3]]


def test_closure_fixed_point():
    b = as3()
    assert bs.closure(b.elements, 4) == b


def test_closure_of_cube_base_plus_23_is_as3():
    base = fam([1], [2], [3], [4], [1, 2], [3, 4], [1, 2, 3, 4])
    c = bs.closure(base + fam([2, 3]), 4)
    assert c == as3() and len(c) == 10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(1, 2**n - 1), max_size=6))))
def test_closure_matches_oracle(case):
    n, family = case
    c = bs.closure(family, n)
    assert c.members == oracles.closure_oracle(family, n)


def test_restriction_examples():
    r = bs.restriction(as3(), [1, 2, 3])
    assert r.as_lists() == [[1], [2], [3], [1, 2], [2, 3], [1, 2, 3]]
    assert bs.restriction(as3(), [3]).as_lists() == [[1]]
    p = bs.restriction(bs.preset("permutohedron", 3), [1, 3])
    assert p == bs.preset("permutohedron", 1)
    with pytest.raises(InputError):
        bs.restriction(as3(), 0)


def test_product_examples():
    pt = bs.BuildingSet.from_sets([[1]], 1)
    assert bs.product(pt, pt).as_lists() == [[1], [2]]
    seg = bs.preset("simplex", 1)
    p = bs.product(seg, seg)
    assert p.as_lists() == [[1], [2], [3], [4], [1, 2], [3, 4]]
    assert not p.is_connected


def test_product_capacity(monkeypatch):
    monkeypatch.setenv("NESTO_MAX_GROUND", "6")
    a = bs.preset("simplex", 3)
    with pytest.raises(CapacityError):
        bs.product(a, a)


# -- substitution / connectify ---------------------------------------------


def test_substitution_identity_like():
    pt = bs.BuildingSet.from_sets([[1]], 1)
    seg = bs.preset("simplex", 1)
    assert bs.substitution(seg, [pt, pt]).as_lists() == [[1], [2], [1, 2]]


def test_substitution_rejects_disconnected_base():
    pt = bs.BuildingSet.from_sets([[1]], 1)
    with pytest.raises(PreconditionError):
        bs.substitution(bs.product(pt, pt), [pt, pt])


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


@pytest.mark.parametrize(
    "base,parts",
    [
        (("simplex", 1), [("simplex", 1), ("associahedron", 2)]),
        (("associahedron", 2), [("simplex", 1), ("cube", 2), ("simplex", 2)]),
        (("simplex", 2), [("permutohedron", 2), ("simplex", 1), ("simplex", 1)]),
    ],
)
def test_substitution_f_polynomial_is_product(base, parts):
    b = bs.preset(*base)
    ps = [bs.preset(*p) for p in parts]
    sub = bs.substitution(b, ps)
    expected = oracles.f_vector_literal(b.members, b.ground_size)
    for p in ps:
        expected = _poly_mul(expected, oracles.f_vector_literal(p.members, p.ground_size))
    assert fl.f_vector_from_building_set(sub) == expected


def test_connectify_identity_on_connected():
    c, m = bs.connectify(as3())
    assert c == as3()
    assert all(k == v for k, v in m.items())


def test_connectify_two_points():
    # two single-point components merge into a single point (both are Δ⁰)
    c, _ = bs.connectify(bs.BuildingSet.from_sets([[1], [2]], 2))
    assert c.is_connected
    assert fl.f_vector_from_building_set(c) == (1,)


def test_connectify_segment_times_segment_is_square():
    seg = bs.preset("simplex", 1)
    c, m = bs.connectify(bs.product(seg, seg))
    assert c.is_connected and c.dim == 2
    assert fl.f_vector_from_building_set(c) == (4, 4, 1)
    assert len(m) == 4


def _literal_f_of_disconnected(b):
    """f-polynomial of a disconnected set: product over its components."""
    f = (1,)
    for comp in bs.components(b):
        f = _poly_mul(f, oracles.f_vector_literal(bs.restriction(b, comp).members, comp.bit_count()))
    return f


def test_connectify_preserves_f_vector_random():
    rng = random.Random(7)
    for _ in range(25):
        parts = []
        for _ in range(rng.randint(2, 3)):
            n = rng.randint(1, 3)
            parts.append(bs.closure([rng.randrange(1, 2**n) for _ in range(3)] + [2**n - 1], n))
        b = parts[0]
        for p in parts[1:]:
            b = bs.product(b, p)
        c, _ = bs.connectify(b)
        assert c.is_connected
        assert fl.f_vector_from_building_set(c) == _literal_f_of_disconnected(b)


# -- graphs and presets ----------------------------------------------------


def test_path_graph_gives_intervals():
    b = bs.graphical(bs.parse_edges("1-2,2-3,3-4"))
    assert b == as3()


def test_complete_graph_gives_power_set():
    for n in range(2, 6):
        edges = ",".join(f"{a}-{b}" for a in range(1, n + 1) for b in range(a + 1, n + 1))
        assert bs.graphical(bs.parse_edges(edges)) == bs.preset("permutohedron", n - 1)


def test_triangle_graph_power_set():
    assert bs.graphical(bs.parse_edges("1-2,2-3,3-1")) == bs.preset("permutohedron", 2)


def test_edgeless_graph():
    b = bs.graphical(bs.Graph(3, ()))
    assert b.as_lists() == [[1], [2], [3]]
    assert not b.is_connected


def test_graph_rejects_loops_and_multi_edges():
    with pytest.raises(InputError):
        bs.parse_edges("1-1")
    with pytest.raises(InputError):
        bs.parse_edges("1-2,2-1")
    with pytest.raises(InputError):
        bs.parse_edges("1-x")


def test_graphical_matches_networkx_oracle():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 6)
        edges = [e for e in oracles.random_connected_edges(rng, n) if rng.random() < 0.7]
        b = bs.graphical(bs.Graph(n, tuple(edges)))
        assert b.members == oracles.connected_sets_oracle(n, edges)


def test_presets():
    assert bs.preset("simplex", 2).as_lists() == [[1], [2], [3], [1, 2, 3]]
    assert bs.preset("cube", 3).as_lists() == [[1], [2], [3], [4], [1, 2], [3, 4], [1, 2, 3, 4]]
    assert len(bs.preset("permutohedron", 2)) == 7
    assert bs.preset("associahedron", 3) == as3()
    with pytest.raises(InputError):
        bs.preset("dodecahedron", 3)


def test_json_roundtrip():
    b = as3()
    text = b.to_json()
    assert bs.from_json(text) == b
    assert bs.from_json(json.loads(text)) == b
    with pytest.raises(InputError):
        bs.from_json("{not json")
    with pytest.raises(InputError):
        bs.from_json({"sets": []})


# -- 2-splits and flagness -------------------------------------------------


def test_two_split_examples():
    b = as3()
    assert bs.two_split(b, [1, 2, 3]) == (bs.mask_of([1]), bs.mask_of([2, 3]))
    assert bs.two_split(b, [1, 2, 3, 4]) == (bs.mask_of([1, 2]), bs.mask_of([3, 4]))
    assert bs.two_split(b, [1, 2]) == (bs.mask_of([1]), bs.mask_of([2]))
    assert bs.two_split(bs.preset("simplex", 2), [1, 2, 3]) is None
    with pytest.raises(InputError):
        bs.two_split(b, [1, 3])


def test_is_flag_examples():
    for n in range(2, 5):
        assert not bs.is_flag(bs.preset("simplex", n))
    assert bs.is_flag(bs.preset("simplex", 1))
    for n in range(1, 5):
        assert bs.is_flag(bs.preset("cube", n))
        assert bs.is_flag(bs.preset("associahedron", n))
        assert bs.is_flag(bs.preset("permutohedron", n))
    with pytest.raises(PreconditionError):
        bs.is_flag(bs.product(bs.preset("simplex", 1), bs.preset("simplex", 1)))


def test_minimal_nonfaces_of_simplex():
    mnf = list(bs.minimal_nonfaces(bs.preset("simplex", 2)))
    assert mnf == [(1, 2, 4)]


def test_is_flag_agrees_with_nerve_oracle():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(2, 4)
        b = bs.closure([rng.randrange(1, 2**n) for _ in range(rng.randint(0, 4))] + [2**n - 1], n)
        fs = fl.facet_system_from_building_set(b)
        assert bs.is_flag(b) == oracles.flag_polytope_literal(fs.dim, fs.vertices, fs.num_facets)


def test_graphical_sets_are_flag():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 6)
        b = bs.graphical(bs.Graph(n, tuple(oracles.random_connected_edges(rng, n))))
        assert bs.is_flag(b)


def test_are_equivalent():
    path = bs.graphical(bs.parse_edges("1-2,2-3,3-4"))
    relabelled = bs.graphical(bs.parse_edges("3-1,1-4,4-2"))
    assert bs.are_equivalent(path, relabelled) is not None
    assert bs.are_equivalent(path, bs.preset("cube", 3)) is None
