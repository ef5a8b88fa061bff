"""Exact rational realizations of nestohedra.

Two realizations are provided:

* :func:`standard_realization` -- the Minkowski sum of simplices, cut out of
  the hyperplane ``sum x_i = |B|`` by ``sum_{i in S} x_i >= |B|_S|``;
* :func:`cubical_realization` -- start from ``[-1, 1]^n`` and shave one
  codimension-2 face per plan step with ``l = l1 + l2``, ``b = b1 + b2 - eps``.

All arithmetic uses :class:`fractions.Fraction` or Python integers.
Inequalities are read as ``normal . x <= rhs``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Sequence

from .building_sets import BuildingSet, format_subset, indices_of, parse_subset
from .errors import InputError, NotSimpleError, PreconditionError, RealizationError
from .face_lattice import FacetSystem
from .shaving_plan import ShavingPlan, SplitTree

Rational = Fraction


@dataclass(frozen=True)
class Inequality:
    label: str
    normal: tuple[int, ...]
    rhs: Fraction


@dataclass(frozen=True)
class Hyperplane:
    coeffs: tuple[int, ...]
    rhs: Fraction


@dataclass(frozen=True)
class HRepresentation:
    """Inequalities ``l . x <= b`` in ``R^dim``, optionally inside a hyperplane."""

    dim: int
    inequalities: tuple[Inequality, ...]
    hyperplane: Hyperplane | None = None

    def __post_init__(self):
        ineqs = []
        for q in self.inequalities:
            normal = tuple(q.normal)
            if len(normal) != self.dim:
                raise InputError(f"normal of {q.label} has length {len(normal)}, expected {self.dim}")
            if not all(isinstance(c, int) for c in normal):
                raise InputError(f"normal of {q.label} is not integral")
            ineqs.append(Inequality(q.label, normal, Fraction(q.rhs)))
        labels = [q.label for q in ineqs]
        if len(set(labels)) != len(labels):
            raise InputError("inequality labels must be unique")
        object.__setattr__(self, "inequalities", tuple(ineqs))
        if self.hyperplane is not None:
            h = self.hyperplane
            if len(h.coeffs) != self.dim or not any(h.coeffs):
                raise InputError("bad hyperplane")
            object.__setattr__(self, "hyperplane", Hyperplane(tuple(h.coeffs), Fraction(h.rhs)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.inequalities)

    def inequality(self, label: str) -> Inequality:
        for q in self.inequalities:
            if q.label == label:
                return q
        raise InputError(f"no inequality labelled {label!r}")

    def with_inequality(self, q: Inequality) -> "HRepresentation":
        return HRepresentation(self.dim, self.inequalities + (q,), self.hyperplane)

    @property
    def polytope_dim(self) -> int:
        return self.dim - (1 if self.hyperplane is not None else 0)


@dataclass(frozen=True)
class Vertex:
    coords: tuple[Fraction, ...]
    tight: frozenset[str]


@dataclass(frozen=True)
class VertexIncidence:
    """Vertices with the labels of their tight inequalities.

    ``eliminated`` is the coordinate dropped to work inside the ambient
    hyperplane, if there is one.
    """

    dim: int
    labels: tuple[str, ...]
    vertices: tuple[Vertex, ...]
    eliminated: int | None = None

    def reduced_coords(self, v: Vertex) -> tuple[Fraction, ...]:
        if self.eliminated is None:
            return v.coords
        return v.coords[: self.eliminated] + v.coords[self.eliminated + 1 :]

    @property
    def tight_sets(self) -> set[frozenset[str]]:
        return {v.tight for v in self.vertices}

    @property
    def unused_labels(self) -> tuple[str, ...]:
        """Inequalities tight at no vertex, i.e. not defining a facet."""
        used = set().union(*(v.tight for v in self.vertices))
        return tuple(lab for lab in self.labels if lab not in used)

    def f_vector(self) -> tuple[int, ...]:
        d = self.dim
        faces: set[frozenset[str]] = set()
        for v in self.vertices:
            tight = sorted(v.tight)
            for r in range(d + 1):
                faces.update(frozenset(c) for c in itertools.combinations(tight, r))
        f = [0] * (d + 1)
        for face in faces:
            f[d - len(face)] += 1
        return tuple(f)


# ---------------------------------------------------------------------------
# exact linear algebra


def _bareiss(matrix: list[list[int]], ncols: int) -> tuple[list[list[int]], int] | None:
    """Fraction-free elimination of the first ``len(matrix)`` columns.

    Returns the reduced matrix and the signed determinant of the square
    part, or ``None`` if it is singular.
    """
    m = [row[:] for row in matrix]
    d = len(m)
    sign = 1
    prev = 1
    for k in range(d):
        if m[k][k] == 0:
            for p in range(k + 1, d):
                if m[p][k] != 0:
                    m[k], m[p] = m[p], m[k]
                    sign = -sign
                    break
            else:
                return None
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, d):
            row_i = m[i]
            factor = row_i[k]
            for j in range(k + 1, ncols):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return m, sign * m[d - 1][d - 1]


def _det(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 1
    out = _bareiss([list(r) for r in rows], len(rows))
    return 0 if out is None else out[1]


def _solve(normals: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[tuple[int, ...], int] | None:
    """Solve a square integer system; returns ``(X, D)`` with ``x = X / D``, ``D > 0``.

    ``D`` is the last Bareiss pivot, i.e. +-det, so ``X`` is integral by
    Cramer's rule and back substitution stays in integers.
    """
    d = len(normals)
    aug = [list(normals[i]) + [rhs[i]] for i in range(d)]
    out = _bareiss(aug, d + 1)
    if out is None:
        return None
    u, _ = out
    big = u[d - 1][d - 1]
    x = [0] * d
    for i in range(d - 1, -1, -1):
        row = u[i]
        acc = row[d] * big
        for j in range(i + 1, d):
            acc -= row[j] * x[j]
        q, r = divmod(acc, row[i])
        if r:
            raise ArithmeticError("non-integral Cramer numerator")
        x[i] = q
    if big < 0:
        return tuple(-v for v in x), -big
    return tuple(x), big


def _rank(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(c) for c in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class _Reduced:
    """Inequalities in ``R^d`` after eliminating the hyperplane variable."""

    dim: int
    normals: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    eliminated: int | None
    hyperplane: Hyperplane | None

    def int_rows(self) -> tuple[list[tuple[int, ...]], list[int]]:
        """Each row scaled by a positive integer to clear denominators."""
        normals, rhs = [], []
        for a, b in zip(self.normals, self.rhs):
            s = lcm(*(c.denominator for c in a), b.denominator)
            normals.append(tuple(int(c * s) for c in a))
            rhs.append(int(b * s))
        return normals, rhs

    def lift(self, y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if self.eliminated is None:
            return tuple(y)
        p = self.eliminated
        c = self.hyperplane.coeffs
        others = [i for i in range(len(c)) if i != p]
        xp = (self.hyperplane.rhs - sum(c[i] * yi for i, yi in zip(others, y))) / c[p]
        return tuple(y[:p]) + (xp,) + tuple(y[p:])


def _reduce(hrep: HRepresentation) -> _Reduced:
    if hrep.hyperplane is None:
        return _Reduced(
            hrep.dim,
            tuple(tuple(Fraction(c) for c in q.normal) for q in hrep.inequalities),
            tuple(q.rhs for q in hrep.inequalities),
            None,
            None,
        )
    c = hrep.hyperplane.coeffs
    r = hrep.hyperplane.rhs
    p = max(i for i in range(len(c)) if c[i] != 0)
    normals, rhs = [], []
    for q in hrep.inequalities:
        a = q.normal
        t = Fraction(a[p], c[p])
        normals.append(tuple(a[i] - t * c[i] for i in range(len(a)) if i != p))
        rhs.append(q.rhs - t * r)
    return _Reduced(hrep.dim - 1, tuple(normals), tuple(rhs), p, hrep.hyperplane)


def _check_bounded(normals: Sequence[tuple[int, ...]], d: int) -> None:
    """Raise if the recession cone ``{r : A r <= 0}`` is nonzero."""
    if not normals or _rank(normals) < d:
        raise InputError("unbounded system (normals do not span)")
    if d == 1:
        if not (any(a[0] > 0 for a in normals) and any(a[0] < 0 for a in normals)):
            raise InputError("unbounded system")
        return
    for combo in itertools.combinations(normals, d - 1):
        ray = []
        for j in range(d):
            minor = [[row[k] for k in range(d) if k != j] for row in combo]
            ray.append((-1) ** j * _det(minor))
        if not any(ray):
            continue
        dots = [sum(a * r for a, r in zip(row, ray)) for row in normals]
        if all(x <= 0 for x in dots) or all(x >= 0 for x in dots):
            raise InputError(f"unbounded system (recession direction {tuple(ray)})")


def _basic_solutions(
    normals: Sequence[tuple[int, ...]], rhs: Sequence[int], d: int, required: int | None = None
) -> dict[tuple[Fraction, ...], frozenset[int]]:
    """Feasible solutions of every nonsingular d-subset, with their tight rows."""
    m = len(normals)
    found: dict[tuple[Fraction, ...], frozenset[int]] = {}
    if required is None:
        combos: Iterable[tuple[int, ...]] = itertools.combinations(range(m), d)
    else:
        rest = [i for i in range(m) if i != required]
        combos = (c + (required,) for c in itertools.combinations(rest, d - 1))
    for combo in combos:
        sol = _solve([normals[i] for i in combo], [rhs[i] for i in combo])
        if sol is None:
            continue
        x, big = sol
        tight = []
        for i in range(m):
            lhs = 0
            for a, xi in zip(normals[i], x):
                lhs += a * xi
            bound = rhs[i] * big
            if lhs > bound:
                break
            if lhs == bound:
                tight.append(i)
        else:
            point = tuple(Fraction(xi, big) for xi in x)
            if point not in found:
                found[point] = frozenset(tight)
    return found


def _assemble(hrep: HRepresentation, red: _Reduced, found) -> VertexIncidence:
    labels = hrep.labels
    d = red.dim
    verts = []
    for y, tight in found.items():
        if len(tight) != d:
            raise NotSimpleError(f"vertex {tuple(map(str, y))} is tight on {len(tight)} inequalities, expected {d}")
        verts.append(Vertex(red.lift(y), frozenset(labels[i] for i in tight)))
    verts.sort(key=lambda v: v.coords)
    return VertexIncidence(d, labels, tuple(verts), red.eliminated)


def enumerate_vertices(hrep: HRepresentation) -> VertexIncidence:
    """All vertices, by solving every nonsingular d-subset of inequalities.

    Raises :class:`InputError` for unbounded or empty systems and
    :class:`NotSimpleError` if some vertex is tight on more than ``d``
    inequalities.
    """
    red = _reduce(hrep)
    normals, rhs = red.int_rows()
    _check_bounded(normals, red.dim)
    found = _basic_solutions(normals, rhs, red.dim)
    if not found:
        raise InputError("empty polytope")
    return _assemble(hrep, red, found)


# ---------------------------------------------------------------------------
# realizations


def standard_realization(b: BuildingSet) -> HRepresentation:
    """P_B in ``R^(n+1)``: ``sum x = |B|`` and ``-sum_{i in S} x_i <= -|B|_S|``."""
    if not b.is_connected:
        raise PreconditionError("standard realization needs a connected building set")
    m = b.ground_size
    ineqs = []
    for s in b.facets:
        count = sum(1 for e in b.elements if e & ~s == 0)
        normal = tuple(-1 if s >> i & 1 else 0 for i in range(m))
        ineqs.append(Inequality(format_subset(s), normal, Fraction(-count)))
    hyper = Hyperplane((1,) * m, Fraction(len(b)))
    return HRepresentation(m, tuple(ineqs), hyper)


def cube_normals(tree: SplitTree) -> dict[int, tuple[int, ...]]:
    """``+e_axis`` for the lexicographically smaller child, ``-e_axis`` for the other."""
    internal = tree.internal_nodes()
    n = len(internal)
    out = {}
    for node in internal:
        kids = sorted((node.left.subset, node.right.subset), key=indices_of)
        for sign, kid in zip((1, -1), kids):
            out[kid] = tuple(sign if i == node.axis else 0 for i in range(n))
    return out


def cube_realization(tree: SplitTree) -> HRepresentation:
    """``[-1, 1]^n`` with one inequality per non-root tree node."""
    normals = cube_normals(tree)
    n = len(tree.internal_nodes())
    order = sorted(normals, key=lambda m: (m.bit_count(), indices_of(m)))
    return HRepresentation(n, tuple(Inequality(format_subset(s), normals[s], Fraction(1)) for s in order))


def cubical_realization(
    plan: ShavingPlan, epsilon_scale: Fraction = Fraction(1, 2)
) -> tuple[HRepresentation, tuple[Fraction, ...]]:
    """Delzant realization of P_B grown from the cube one shaving at a time.

    ``eps_j`` is ``epsilon_scale`` times the smallest positive slack of the
    new normal on the current vertices; the vertex list is maintained
    incrementally (kept vertices plus solutions through the new facet).
    """
    if plan.tree is None:
        raise PreconditionError("cubical realization needs a plan that starts from the cube")
    if not 0 < epsilon_scale < 1:
        raise InputError("epsilon_scale must lie strictly between 0 and 1")
    hrep = cube_realization(plan.tree)
    d = hrep.dim
    normals = [q.normal for q in hrep.inequalities]
    rhs = [q.rhs for q in hrep.inequalities]
    index = {q.label: i for i, q in enumerate(hrep.inequalities)}
    verts = {v.coords: frozenset(index[lab] for lab in v.tight) for v in enumerate_vertices(hrep).vertices}
    eps_trace = []
    for j, step in enumerate(plan.steps, start=1):
        if len(step.parts) != 2:
            raise PreconditionError(f"step {j} is not a codimension-2 shaving")
        i1, i2 = (index[format_subset(p)] for p in step.parts)
        normal = tuple(a + b for a, b in zip(normals[i1], normals[i2]))
        top = rhs[i1] + rhs[i2]
        slack = {x: top - sum(a * c for a, c in zip(normal, x)) for x in verts}
        on_face = {x for x, s in slack.items() if s == 0}
        if not on_face:
            raise RealizationError(f"step {j}: face {step} is empty in the current geometry")
        gaps = [s for s in slack.values() if s > 0]
        if not gaps:
            raise RealizationError(f"step {j}: every vertex lies on the shaved face")
        eps = epsilon_scale * min(gaps)
        label = format_subset(step.subset)
        new_idx = len(normals)
        normals.append(normal)
        rhs.append(top - eps)
        index[label] = new_idx
        hrep = hrep.with_inequality(Inequality(label, normal, top - eps))

        kept = {x: t for x, t in verts.items() if slack[x] > eps}
        removed = set(verts) - set(kept)
        if removed != on_face:
            raise RealizationError(f"step {j}: the cut removes vertices off the face")
        red = _reduce(hrep)
        int_normals, int_rhs = red.int_rows()
        fresh = _basic_solutions(int_normals, int_rhs, d, required=new_idx)
        if len(fresh) != 2 * len(on_face):
            raise RealizationError(f"step {j}: expected {2 * len(on_face)} new vertices, got {len(fresh)}")
        for x, t in fresh.items():
            if len(t) != d:
                raise NotSimpleError(f"step {j}: new vertex tight on {len(t)} facets")
        verts = {**kept, **fresh}
        eps_trace.append(eps)
    return hrep, tuple(eps_trace)


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class DelzantViolation:
    coords: tuple[Fraction, ...]
    tight: tuple[str, ...]
    determinant: int


@dataclass(frozen=True)
class DelzantReport:
    passed: bool
    vertices_checked: int
    violations: tuple[DelzantViolation, ...]


def delzant_check(hrep: HRepresentation, incidence: VertexIncidence) -> DelzantReport:
    """Tight normals at every vertex must have determinant +-1.

    With an ambient hyperplane the normals are taken in the coordinates left
    after eliminating one variable, which for ``sum x_i = const`` are the
    coordinates with respect to the basis ``e_i - e_{n+1}``.
    """
    red = _reduce(hrep)
    for a in red.normals:
        if any(c.denominator != 1 for c in a):
            raise InputError("reduced normals are not integral")
    normal_of = {lab: tuple(int(c) for c in a) for lab, a in zip(hrep.labels, red.normals)}
    bad = []
    for v in incidence.vertices:
        if len(v.tight) != red.dim:
            raise NotSimpleError(f"vertex tight on {len(v.tight)} facets")
        tight = tuple(sorted(v.tight))
        det = _det([normal_of[lab] for lab in tight])
        if abs(det) != 1:
            bad.append(DelzantViolation(v.coords, tight, det))
    return DelzantReport(not bad, len(incidence.vertices), tuple(bad))


@dataclass(frozen=True)
class NormalsReport:
    passed: bool
    bad_coefficients: tuple[str, ...]
    support_violations: tuple[tuple[str, str], ...]


def normals_check(hrep: HRepresentation, b: BuildingSet | None = None) -> NormalsReport:
    """Coefficients in {0, +-1}; with ``b`` also check that disjoint
    facets whose union is not in ``b`` have disjoint supports."""
    bad = tuple(q.label for q in hrep.inequalities if any(c not in (-1, 0, 1) for c in q.normal))
    support_bad = []
    if b is not None:
        supp = {}
        for q in hrep.inequalities:
            supp[parse_subset(q.label)] = {i for i, c in enumerate(q.normal) if c}
        for s1, s2 in itertools.combinations(sorted(supp, key=indices_of), 2):
            if s1 & s2 or (s1 | s2) in b.members:
                continue
            if supp[s1] & supp[s2]:
                support_bad.append((format_subset(s1), format_subset(s2)))
    return NormalsReport(not bad and not support_bad, bad, tuple(support_bad))


def combinatorial_equivalence(incidence: VertexIncidence, fs: FacetSystem) -> bool:
    """Whether tight sets map onto the vertex facet sets of ``fs`` label by label."""
    if set(incidence.labels) != set(fs.labels):
        raise InputError("inequality labels and facet labels differ")
    idx = {lab: i for i, lab in enumerate(fs.labels)}
    mapped = set()
    for v in incidence.vertices:
        m = 0
        for lab in v.tight:
            m |= 1 << idx[lab]
        mapped.add(m)
    return len(mapped) == len(incidence.vertices) and mapped == set(fs.vertices)


# ---------------------------------------------------------------------------
# export


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def hrep_to_dict(hrep: HRepresentation) -> dict:
    h = hrep.hyperplane
    return {
        "dim": hrep.dim,
        "hyperplane": None if h is None else {"coeffs": list(h.coeffs), "rhs": format_rational(h.rhs)},
        "ineqs": [
            {"label": q.label, "normal": list(q.normal), "rhs": format_rational(q.rhs)} for q in hrep.inequalities
        ],
    }


def hrep_from_dict(data) -> HRepresentation:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        h = data["hyperplane"]
        hyper = None if h is None else Hyperplane(tuple(h["coeffs"]), parse_rational(h["rhs"]))
        ineqs = tuple(
            Inequality(q["label"], tuple(q["normal"]), parse_rational(q["rhs"])) for q in data["ineqs"]
        )
        return HRepresentation(data["dim"], ineqs, hyper)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad H-representation JSON: {exc}") from exc


def incidence_to_dict(inc: VertexIncidence) -> dict:
    return {
        "dim": inc.dim,
        "vertices": [
            {"coords": [format_rational(c) for c in v.coords], "tight": sorted(v.tight)} for v in inc.vertices
        ],
    }


def _facet_cycles(inc: VertexIncidence) -> list[list[int]]:
    """Vertex indices of each 2-dimensional facet, cyclically ordered and
    oriented counterclockwise seen from outside."""
    pts = [inc.reduced_coords(v) for v in inc.vertices]
    n = len(pts)
    centre = tuple(sum(p[k] for p in pts) / n for k in range(3))
    faces = []
    for lab in inc.labels:
        on = [i for i, v in enumerate(inc.vertices) if lab in v.tight]
        if len(on) < 3:
            continue
        nbr = {i: [j for j in on if j != i and len(inc.vertices[i].tight & inc.vertices[j].tight) == 2] for i in on}
        cycle = [on[0]]
        prev = None
        while True:
            cur = cycle[-1]
            nxt = next(j for j in nbr[cur] if j != prev)
            if nxt == cycle[0]:
                break
            prev = cur
            cycle.append(nxt)
        if len(cycle) != len(on):
            raise InputError(f"facet {lab} is not a polygon")
        p0, p1, p2 = (pts[i] for i in cycle[:3])
        u = [p1[k] - p0[k] for k in range(3)]
        w = [p2[k] - p0[k] for k in range(3)]
        cross = (u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
        fc = [sum(pts[i][k] for i in cycle) / len(cycle) for k in range(3)]
        outward = [fc[k] - centre[k] for k in range(3)]
        if sum(c * o for c, o in zip(cross, outward)) < 0:
            cycle.reverse()
        faces.append(cycle)
    return faces


def to_off(inc: VertexIncidence) -> str:
    """ASCII OFF; coordinates are decimal approximations, for viewing only."""
    if inc.dim != 3:
        raise InputError(f"OFF export needs a 3-dimensional polytope, got dimension {inc.dim}")
    faces = _facet_cycles(inc)
    edges = sum(
        1
        for a, b in itertools.combinations(inc.vertices, 2)
        if len(a.tight & b.tight) == inc.dim - 1
    )
    lines = ["OFF", f"{len(inc.vertices)} {len(faces)} {edges}"]
    for v in inc.vertices:
        lines.append(" ".join(f"{float(c):.10g}" for c in inc.reduced_coords(v)))
    for cyc in faces:
        lines.append(" ".join(str(x) for x in [len(cyc)] + cyc))
    return "\n".join(lines) + "\n"


def export(obj, fmt: str, path: str | Path | None = None) -> str:
    """Serialize an H-representation, incidence or epsilon trace.

    ``fmt`` is ``"json"`` or ``"off"``; an H-representation exported to OFF
    is enumerated first.  The text is returned and, if ``path`` is given,
    also written there.
    """
    if fmt == "json":
        if isinstance(obj, HRepresentation):
            text = json.dumps(hrep_to_dict(obj), indent=1)
        elif isinstance(obj, VertexIncidence):
            text = json.dumps(incidence_to_dict(obj), indent=1)
        else:
            text = json.dumps([format_rational(x) for x in obj])
    elif fmt == "off":
        inc = enumerate_vertices(obj) if isinstance(obj, HRepresentation) else obj
        text = to_off(inc)
    else:
        raise InputError(f"unknown export format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
