"""Acceptance criteria 1-7.  Each test prints one PASS/FAIL line and the
terminal summary repeats them."""

import itertools
import random
import sys
import time
from functools import lru_cache
from math import comb

import pytest

import _audit
import _systems
import oracles
from nestohedra import building_sets as bs
from nestohedra import face_lattice as fl
from nestohedra import geometry as geo
from nestohedra import shaving_plan as sp

SEED = 20261014

# Values below were produced by oracles.f_vector_literal + oracles.gamma_sympy
# and frozen; test_criterion_1 re-derives them before comparing.
FROZEN_GAMMA = {
    ("cube", 1): (1,),
    ("cube", 2): (1, 0),
    ("cube", 3): (1, 0),
    ("cube", 4): (1, 0, 0),
    ("cube", 5): (1, 0, 0),
    ("cube", 6): (1, 0, 0, 0),
    ("permutohedron", 2): (1, 2),
    ("permutohedron", 3): (1, 8),
    ("associahedron", 3): (1, 3),
    ("simplex", 2): (1, -1),
}


def _graph_bs(nodes, edges):
    return bs.graphical(bs.Graph(nodes, tuple(edges)))


def build_catalog():
    """Graphical building sets of paths, cycles, stars, complete graphs and
    200 seeded random connected graphs, on 2..6 nodes (dimension <= 5)."""
    cat = []
    for k in range(2, 7):
        cat.append((f"path{k}", _graph_bs(k, [(i, i + 1) for i in range(1, k)])))
        if k >= 3:
            cat.append((f"cycle{k}", _graph_bs(k, [(i, i + 1) for i in range(1, k)] + [(1, k)])))
        cat.append((f"star{k}", _graph_bs(k, [(1, i) for i in range(2, k + 1)])))
        cat.append((f"complete{k}", _graph_bs(k, list(itertools.combinations(range(1, k + 1), 2)))))
    rng = random.Random(SEED)
    for i in range(200):
        k = rng.randint(2, 6)
        cat.append((f"random{i}", _graph_bs(k, oracles.random_connected_edges(rng, k))))
    return cat


CATALOG = build_catalog()


def distinct(catalog):
    seen, out = set(), []
    for name, b in catalog:
        key = (b.ground_size, b.elements)
        if key not in seen:
            seen.add(key)
            out.append((name, b))
    return out


def leq(a, b):
    return len(a) == len(b) and all(x <= y for x, y in zip(a, b))


# -- 1 ----------------------------------------------------------------------


def test_criterion_1_exact_gamma_values():
    failures = []
    slowest = 0.0
    for (name, n), frozen in FROZEN_GAMMA.items():
        b = bs.preset(name, n)
        derived = oracles.gamma_sympy(oracles.f_vector_literal(b.members, b.ground_size))
        if derived != frozen:
            failures.append(f"oracle {name}{n}: {derived} != frozen {frozen}")
        t0 = time.perf_counter()
        got = sp.direct_gamma(b)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        if got != frozen:
            failures.append(f"{name}{n}: {got} != {frozen}")
        if elapsed >= 1.0:
            failures.append(f"{name}{n}: {elapsed:.2f}s >= 1s")
    for n in range(1, 7):
        if fl.gamma_vector(fl.cube_system(n)) != (1,) + (0,) * (n // 2):
            failures.append(f"cube_system({n})")
    _audit.record(not failures, 1, f"{len(FROZEN_GAMMA)} values exact, slowest {slowest:.3f}s" if not failures else "; ".join(failures))
    assert not failures


# -- 2 ----------------------------------------------------------------------


def test_criterion_2_as3_example():
    m = bs.mask_of
    b = bs.preset("associahedron", 3)
    plan = sp.plan_flag(b)
    want_base = bs.BuildingSet.from_sets([[1], [2], [3], [4], [1, 2], [3, 4], [1, 2, 3, 4]], 4)
    want_steps = [
        (m([1, 2, 3]), (m([1, 2]), m([3]))),
        (m([2, 3, 4]), (m([2]), m([3, 4]))),
        (m([2, 3]), (m([2]), m([3]))),
    ]
    got_steps = [(s.subset, s.parts) for s in plan.steps]
    ok = plan.base == want_base and got_steps == want_steps and len(plan.steps) == len(b) - (2 * 3 + 1) == 3
    _audit.record(ok, 2, "; ".join(str(s) for s in plan.steps))
    assert plan.base == want_base
    assert got_steps == want_steps
    assert len(plan.steps) == len(b) - (2 * 3 + 1) == 3


# -- 3 ----------------------------------------------------------------------


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    failures = []
    members = distinct(CATALOG)
    for name, b in members:
        if not bs.is_flag(b):
            failures.append(f"{name} not flag")
            continue
        plan = sp.plan_flag(b)
        g_plan, trace = sp.gamma_via_plan(plan)
        g_direct = sp.direct_gamma(b)
        if g_plan != g_direct:
            failures.append(f"{name}: plan {g_plan} != direct {g_direct}")
        if b.ground_size <= 4:
            lit = oracles.gamma_sympy(oracles.f_vector_literal(b.members, b.ground_size))
            if lit != g_direct:
                failures.append(f"{name}: literal oracle {lit} != {g_direct}")
    elapsed = time.perf_counter() - t0
    detail = f"{len(members)} distinct flag sets ({len(CATALOG)} catalog entries), {elapsed:.1f}s"
    _audit.record(not failures and elapsed < 600, 3, detail if not failures else "; ".join(failures[:5]))
    assert not failures
    assert elapsed < 600


# -- 4 ----------------------------------------------------------------------


def _nested_pairs(rng, count):
    pairs = []
    while len(pairs) < count * 7 // 10:
        k = rng.randint(2, 6)
        big = oracles.random_connected_edges(rng, k)
        b2 = _graph_bs(k, big)
        sub = [e for e in big if rng.random() < 0.6]
        b1 = _graph_bs(k, sub)
        if not b1.is_connected:
            continue
        pairs.append((f"graph {sub} <= {big}", b1, b2))
    while len(pairs) < count:
        k = rng.randint(3, 6)
        b = _graph_bs(k, oracles.random_connected_edges(rng, k))
        prefixes = list(sp.plan_flag(b).prefixes())
        if len(prefixes) < 2:
            continue
        i, j = sorted(rng.sample(range(len(prefixes)), 2))
        b1 = bs.BuildingSet(k, tuple(prefixes[i]))
        b2 = bs.BuildingSet(k, tuple(prefixes[j]))
        pairs.append((f"plan prefix {i} <= {j} of {b}", b1, b2))
    return pairs


def test_criterion_4_gal_bounds_monotone():
    failures = []
    members = distinct(CATALOG)
    for name, b in members:
        g = sp.direct_gamma(b)
        pe = sp.permutohedron_gamma(b.dim)
        if any(x < 0 for x in g):
            failures.append(f"{name}: negative {g}")
        if not leq(g, pe):
            failures.append(f"{name}: {g} not <= Pe {pe}")
    pairs = _nested_pairs(random.Random(SEED + 4), 100)
    for desc, b1, b2 in pairs:
        assert b1.issubset(b2) and bs.is_flag(b1) and bs.is_flag(b2)
        g1, g2 = sp.direct_gamma(b1), sp.direct_gamma(b2)
        if not leq(g1, g2):
            failures.append(f"{desc}: {g1} not <= {g2}")
    report = sp.verify_gamma_claims([b for _, b in members[:40]])
    if not report.passed:
        failures.extend(str(c) for c in report.failures)
    detail = f"{len(members)} catalog sets nonnegative and bounded, {len(pairs)} nested pairs monotone"
    _audit.record(not failures, 4, detail if not failures else "; ".join(failures[:5]))
    assert not failures


# -- 5 ----------------------------------------------------------------------


def test_criterion_5_geometry():
    t0 = time.perf_counter()
    failures = []
    members = [(n, b) for n, b in distinct(CATALOG) if b.dim <= 4]
    vertices_checked = 0
    for name, b in members:
        hrep, _ = geo.cubical_realization(sp.plan_flag(b))
        inc = geo.enumerate_vertices(hrep)
        nm = geo.normals_check(hrep, b)
        dz = geo.delzant_check(hrep, inc)
        eq = geo.combinatorial_equivalence(inc, fl.facet_system_from_building_set(b))
        vertices_checked += dz.vertices_checked
        if not nm.passed:
            failures.append(f"{name}: normals {nm}")
        if not dz.passed:
            failures.append(f"{name}: determinants {[v.determinant for v in dz.violations]}")
        if not eq:
            failures.append(f"{name}: incidence differs")
    cubical_time = time.perf_counter() - t0

    pe4 = bs.preset("permutohedron", 4)
    t1 = time.perf_counter()
    hrep = geo.standard_realization(pe4)
    inc = geo.enumerate_vertices(hrep)
    pe_time = time.perf_counter() - t1
    if len(hrep.inequalities) != 30 or len(inc.vertices) != 120:
        failures.append(f"Pe4: {len(hrep.inequalities)} inequalities, {len(inc.vertices)} vertices")
    if inc.f_vector() != fl.f_vector_from_building_set(pe4):
        failures.append(f"Pe4 f-vector {inc.f_vector()}")
    if pe_time > 120:
        failures.append(f"Pe4 took {pe_time:.1f}s")
    detail = (
        f"{len(members)} cubical realizations ({vertices_checked} vertex determinants) in {cubical_time:.1f}s; "
        f"Pe4 standard 120 vertices in {pe_time:.2f}s"
    )
    _audit.record(not failures, 5, detail if not failures else "; ".join(failures[:5]))
    assert not failures


# -- 6 ----------------------------------------------------------------------


def _padd(a, b):
    n = max(len(a), len(b))
    return tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def _trim(p, length):
    assert all(c == 0 for c in p[length:])
    return tuple(p[:length]) + (0,) * (length - len(p))


def simplex_f(m):
    return tuple(comb(m + 1, i + 1) for i in range(m + 1))


@lru_cache(maxsize=None)
def simplex_gamma_oracle(m):
    return oracles.gamma_sympy(simplex_f(m))


def _flag_random_system(rng):
    """A flag simple polytope of dim 2..4 reached by codim-2 shaves."""
    dim = rng.randint(2, 4)
    if rng.random() < 0.5:
        fs = fl.cube_system(dim)
    else:
        k = dim + 1
        fs = fl.facet_system_from_building_set(_graph_bs(k, oracles.random_connected_edges(rng, k)))
    for _ in range(rng.randint(0, 2)):
        fs = fl.shave(fs, _codim2_face(rng, fs))
    return fs


def _codim2_face(rng, fs):
    v = rng.choice(fs.vertices)
    return fl.face_of(fs, rng.sample(fl.bits(v), 2))


def test_criterion_6_shaving_identities():
    rng = random.Random(SEED + 6)
    failures = []
    flag_cases = 0
    for trial in range(500):
        flag_track = trial % 2 == 0
        p = _flag_random_system(rng) if flag_track else _systems.random_system(rng, max_dim=4, max_shaves=2)
        g = _codim2_face(rng, p) if flag_track else _systems.random_face(rng, p)
        n, k = p.dim, g.dim
        c = n - k
        q = fl.shave(p, g, label="NEW")
        g_sys = fl.face_subsystem(p, g)

        f_p, f_q, f_g = fl.f_vector(p), fl.f_vector(q), fl.f_vector(g_sys)
        want_f = _padd(_padd(f_p, _pmul(f_g, simplex_f(c - 1))), tuple(-x for x in f_g))
        if _trim(want_f, n + 1) != f_q:
            failures.append(f"trial {trial}: f {f_q} != {want_f}")

        gam_p, gam_q, gam_g = fl.gamma_vector(p), fl.gamma_vector(q), fl.gamma_vector(g_sys)
        extra = (0,) + _pmul(gam_g, simplex_gamma_oracle(c - 2))
        want_g = _trim(_padd(gam_p, extra), n // 2 + 1)
        if want_g != gam_q:
            failures.append(f"trial {trial}: gamma {gam_q} != {want_g}")

        new_facet = fl.face_subsystem(q, ["NEW"])
        model = fl.product_system(g_sys, fl.simplex_system(c - 1))
        if fl.are_isomorphic(new_facet, model, max_facets=64) is None:
            failures.append(f"trial {trial}: new facet not G x simplex")

        if c == 2 and fl.is_flag_polytope(p):
            flag_cases += 1
            if not fl.is_flag_polytope(q):
                failures.append(f"trial {trial}: codim-2 shave lost flagness")
    ok = not failures and flag_cases >= 100
    detail = f"500 shaves, {flag_cases} codim-2 shaves of flag polytopes stayed flag"
    _audit.record(ok, 6, detail if not failures else "; ".join(failures[:5]))
    assert not failures
    assert flag_cases >= 100


# -- 7 ----------------------------------------------------------------------


def test_criterion_7_dehn_sommerville():
    # add a sweep of products, faces and shaves on top of what the run built
    rng = random.Random(SEED + 7)
    for _ in range(100):
        p = _systems.random_system(rng, max_dim=4, max_shaves=3)
        fl.face_subsystem(p, _systems.random_face(rng, p, min_codim=1))
        fl.product_system(p, fl.simplex_system(rng.randint(0, 2)))
    for _, b in distinct(CATALOG):
        fl.facet_system_from_building_set(b)
    bad = _audit.drain()
    ok = not bad and not _audit.violations
    detail = f"{len(_audit.checked)} distinct facet systems audited so far, {len(_audit.violations)} violations"
    _audit.record(ok, 7, detail)
    assert ok, _audit.violations[:3]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
