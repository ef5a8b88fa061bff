"""Combinatorics of simple polytopes given by their facet-vertex incidences.

A :class:`FacetSystem` stores an n-dimensional simple polytope as a list of
facet labels and a set of vertices, each vertex being the bit mask of the
``n`` facets containing it.  Faces are identified with their maximal
defining facet sets.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Iterator, Sequence

from . import _config
from .building_sets import BuildingSet, format_subset
from .errors import CapacityError, ConsistencyError, InputError, NotSimpleError, PreconditionError


def bits(mask: int) -> tuple[int, ...]:
    """0-based positions of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def mask_of_bits(positions: Iterable[int]) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


@dataclass(frozen=True)
class FacetSystem:
    """Abstract simple polytope.

    Attributes
    ----------
    dim : int
        Dimension ``n``.
    labels : tuple of str
        Unique facet labels; facet ``i`` is ``labels[i]``.
    vertices : tuple of int
        Facet-index masks, one per vertex, each with exactly ``dim`` bits.
        Stored in lexicographic order of their index lists.
    """

    dim: int
    labels: tuple[str, ...]
    vertices: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise InputError("facet labels must be unique")
        if self.dim < 0:
            raise InputError("dimension must be nonnegative")
        verts = sorted(set(self.vertices), key=bits)
        if not verts:
            raise InputError("a facet system needs at least one vertex")
        limit = 1 << len(labels)
        seen = 0
        for v in verts:
            if v < 0 or v >= limit:
                raise InputError(f"vertex {bits(v)} refers to a missing facet")
            if v.bit_count() != self.dim:
                raise NotSimpleError(f"vertex {bits(v)} lies on {v.bit_count()} facets, expected {self.dim}")
            seen |= v
        if seen != limit - 1:
            missing = [labels[i] for i in range(len(labels)) if not seen >> i & 1]
            raise InputError(f"facets without vertices: {missing}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vertices", tuple(verts))

    @property
    def num_facets(self) -> int:
        return len(self.labels)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def facet_index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise InputError(f"no facet labelled {label!r}") from None

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Mask of the facets meeting facet ``i`` (excluding ``i``)."""
        adj = [0] * self.num_facets
        for v in self.vertices:
            for i in bits(v):
                adj[i] |= v
        return tuple(a & ~(1 << i) for i, a in enumerate(adj))

    def to_json(self) -> str:
        return json.dumps(
            {"dim": self.dim, "facets": list(self.labels), "vertices": [list(bits(v)) for v in self.vertices]}
        )

    @classmethod
    def from_json(cls, data) -> "FacetSystem":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        try:
            return cls(
                data["dim"],
                tuple(data["facets"]),
                tuple(mask_of_bits(v) for v in data["vertices"]),
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad facet-system JSON: {exc}") from exc


@dataclass(frozen=True)
class Face:
    """A nonempty face, given by its maximal defining facet set."""

    facets: int
    dim: int


def _resolve_facets(fs: FacetSystem, facets) -> int:
    if isinstance(facets, Face):
        return facets.facets
    if isinstance(facets, int):
        return facets
    out = 0
    for f in facets:
        idx = fs.facet_index(f) if isinstance(f, str) else f
        if not 0 <= idx < fs.num_facets:
            raise InputError(f"facet index {idx} out of range")
        out |= 1 << idx
    return out


def face_of(fs: FacetSystem, facets) -> Face:
    """The face cut out by a facet collection (labels, indices or a mask)."""
    mask = _resolve_facets(fs, facets)
    containing = [v for v in fs.vertices if v & mask == mask]
    if not containing:
        raise InputError("the facets have empty intersection")
    common = containing[0]
    for v in containing[1:]:
        common &= v
    return Face(common, fs.dim - common.bit_count())


# ---------------------------------------------------------------------------
# nestohedra


def _nested_sets(b: BuildingSet) -> Iterator[tuple[int, ...]]:
    """All nested families of facets of P_B, as tuples of facet indices.

    A family is nested when its members are pairwise nested or disjoint and
    no two or more pairwise-disjoint members have their union in ``b``.
    """
    facets = b.facets
    # for every facet, the elements of b strictly containing it
    uppers = [[u for u in b.elements if u != f and f & ~u == 0] for f in facets]

    def compatible(chosen: list[int], x: int) -> bool:
        fx = facets[x]
        for y in chosen:
            fy = facets[y]
            inter = fx & fy
            if inter and inter != fx and inter != fy:
                return False
        group = [facets[y] for y in chosen] + [fx]
        for u in uppers[x]:
            inside = [g for g in group if g != u and g & ~u == 0]
            top = [g for g in inside if not any(g != h and g & ~h == 0 for h in inside)]
            if len(top) >= 2:
                cover = 0
                for g in top:
                    cover |= g
                if cover == u:
                    return False
        return True

    def extend(chosen: list[int], start: int) -> Iterator[tuple[int, ...]]:
        yield tuple(chosen)
        for x in range(start, len(facets)):
            if compatible(chosen, x):
                chosen.append(x)
                yield from extend(chosen, x + 1)
                chosen.pop()

    yield from extend([], 0)


def facet_system_from_building_set(b: BuildingSet) -> FacetSystem:
    """Facet system of the nestohedron P_B of a connected building set.

    Facets are ``B \\ {[n+1]}`` labelled ``"{1,2}"`` etc.; vertices are the
    maximal nested families.  Ground size 1 gives the point.
    """
    if not b.is_connected:
        raise PreconditionError("building set is not connected; connectify first")
    n = b.dim
    vertices = [mask_of_bits(ns) for ns in _nested_sets(b) if len(ns) == n]
    return FacetSystem(n, tuple(format_subset(f) for f in b.facets), tuple(vertices))


def f_vector_from_building_set(b: BuildingSet) -> tuple[int, ...]:
    """f-vector of P_B counted directly from nested families of ``b``."""
    if not b.is_connected:
        raise PreconditionError("building set is not connected; connectify first")
    n = b.dim
    f = [0] * (n + 1)
    for ns in _nested_sets(b):
        if len(ns) > n:
            raise ConsistencyError(f"nested family of size {len(ns)} in dimension {n}")
        f[n - len(ns)] += 1
    return tuple(f)


# ---------------------------------------------------------------------------
# polynomials


def f_vector(fs: FacetSystem) -> tuple[int, ...]:
    """(f_0, ..., f_n).  In a simple polytope every subset of a vertex's
    facet set defines exactly one face, so faces of codimension ``k`` are
    the distinct k-subsets of vertex facet sets."""
    n = fs.dim
    seen: set[int] = set()
    for v in fs.vertices:
        positions = bits(v)
        for r in range(n + 1):
            for sub in itertools.combinations(positions, r):
                seen.add(mask_of_bits(sub))
    f = [0] * (n + 1)
    for s in seen:
        f[n - s.bit_count()] += 1
    return tuple(f)


@dataclass(frozen=True)
class PolynomialBundle:
    """f-, h-, gamma-vectors and the two-variable H-polynomial of one polytope.

    ``H2`` lists ``(alpha_power, t_power, coefficient)`` for the nonzero
    terms of ``H(alpha, t) = sum h_i alpha^(n-i) t^i``.
    """

    f: tuple[int, ...]
    h: tuple[int, ...]
    gamma: tuple[int, ...]
    H2: tuple[tuple[int, int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.f) - 1

    def H(self, alpha, t):
        return sum(c * alpha**a * t**b for a, b, c in self.H2)


def h_from_f(f: Sequence[int]) -> tuple[int, ...]:
    """Coefficients of f(t - 1)."""
    n = len(f) - 1
    return tuple(
        sum(f[i] * comb(i, k) * (-1) ** (i - k) for i in range(k, n + 1)) for k in range(n + 1)
    )


def gamma_from_h(h: Sequence[int]) -> tuple[int, ...]:
    """Expand a palindromic h into sum gamma_i t^i (1+t)^(n-2i)."""
    n = len(h) - 1
    if any(h[i] != h[n - i] for i in range(n + 1)):
        raise NotSimpleError(f"h-vector {tuple(h)} is not palindromic")
    rem = list(h)
    gamma = []
    for i in range(n // 2 + 1):
        g = rem[i]
        gamma.append(g)
        for j in range(n - 2 * i + 1):
            rem[i + j] -= g * comb(n - 2 * i, j)
    if any(rem):
        raise ConsistencyError(f"gamma expansion of {tuple(h)} left remainder {rem}")
    return tuple(gamma)


def polynomial_bundle(f: Sequence[int]) -> PolynomialBundle:
    f = tuple(int(x) for x in f)
    if not f or f[-1] != 1:
        raise InputError(f"f-vector must end with f_n = 1, got {f}")
    h = h_from_f(f)
    gamma = gamma_from_h(h)
    n = len(f) - 1
    H2 = tuple((n - i, i, h[i]) for i in range(n + 1) if h[i])
    return PolynomialBundle(f, h, gamma, H2)


def gamma_vector(fs: FacetSystem) -> tuple[int, ...]:
    return polynomial_bundle(f_vector(fs)).gamma


# ---------------------------------------------------------------------------
# operations on facet systems


def face_subsystem(fs: FacetSystem, face) -> FacetSystem:
    """The face as a simple polytope in its own right.

    Its facets are the facets of ``fs`` that meet the face without
    containing it, keeping their labels.
    """
    fc = face if isinstance(face, Face) else face_of(fs, face)
    d = fc.facets
    containing = [v for v in fs.vertices if v & d == d]
    if not containing:
        raise InputError("empty face")
    others = 0
    for v in containing:
        others |= v & ~d
    keep = bits(others)
    remap = {old: new for new, old in enumerate(keep)}
    vertices = [mask_of_bits(remap[i] for i in bits(v & ~d)) for v in containing]
    return FacetSystem(fc.dim, tuple(fs.labels[i] for i in keep), tuple(vertices))


def product_system(fs1: FacetSystem, fs2: FacetSystem) -> FacetSystem:
    """Cartesian product.  Labels are kept unless they collide, in which
    case they are tagged ``"1:"`` / ``"2:"``."""
    l1, l2 = fs1.labels, fs2.labels
    if set(l1) & set(l2):
        l1 = tuple("1:" + s for s in l1)
        l2 = tuple("2:" + s for s in l2)
    shift = fs1.num_facets
    vertices = [a | (b << shift) for a in fs1.vertices for b in fs2.vertices]
    return FacetSystem(fs1.dim + fs2.dim, l1 + l2, tuple(vertices))


def point_system() -> FacetSystem:
    return FacetSystem(0, (), (0,))


def simplex_system(m: int) -> FacetSystem:
    """The m-simplex; facets labelled ``"1".."m+1"``.  ``m = 0`` is a point."""
    if m < 0:
        raise InputError("simplex dimension must be nonnegative")
    if m == 0:
        return point_system()
    labels = tuple(str(i + 1) for i in range(m + 1))
    vertices = [mask_of_bits(c) for c in itertools.combinations(range(m + 1), m)]
    return FacetSystem(m, labels, tuple(vertices))


def polygon_system(k: int) -> FacetSystem:
    """A k-gon with edges ``"e1".."ek"``."""
    if k < 3:
        raise InputError("a polygon needs at least 3 sides")
    labels = tuple(f"e{i + 1}" for i in range(k))
    return FacetSystem(2, labels, tuple((1 << i) | (1 << ((i + 1) % k)) for i in range(k)))


def cube_system(n: int) -> FacetSystem:
    """The n-cube; facets ``"x1-", "x1+", ...``."""
    seg = FacetSystem(1, ("x1-", "x1+"), (1, 2))
    out = seg if n >= 1 else point_system()
    for i in range(2, n + 1):
        nxt = FacetSystem(1, (f"x{i}-", f"x{i}+"), (1, 2))
        out = product_system(out, nxt)
    return out


def _fresh_label(fs: FacetSystem, label: str) -> str:
    taken = set(fs.labels)
    while label in taken:
        label += "'"
    return label


def shave(fs: FacetSystem, face, label: str | None = None) -> FacetSystem:
    """Cut off a small neighbourhood of a face of codimension at least 2.

    A new facet is appended (last index).  Every vertex on the face is
    replaced by the ``k`` vertices obtained by swapping one of the face's
    ``k`` defining facets for the new one.
    """
    fc = face if isinstance(face, Face) else face_of(fs, face)
    d = fc.facets
    k = d.bit_count()
    if k < 2:
        raise InputError(f"can only shave faces of codimension >= 2, got {k}")
    new_label = _fresh_label(fs, label if label is not None else "F0")
    new_bit = 1 << fs.num_facets
    vertices = []
    hit = False
    for v in fs.vertices:
        if v & d == d:
            hit = True
            for i in bits(d):
                vertices.append((v & ~(1 << i)) | new_bit)
        else:
            vertices.append(v)
    if not hit:
        raise InputError("empty face")
    return FacetSystem(fs.dim, fs.labels + (new_label,), tuple(vertices))


class _Budget:
    def __init__(self, what: str):
        self.left = _config.enum_budget()
        self.what = what

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise CapacityError(f"{self.what} exceeded the enumeration budget")


def maximal_cliques(adj: Sequence[int], budget: _Budget | None = None) -> Iterator[int]:
    """Bron-Kerbosch with pivoting over bit-mask adjacency lists."""
    budget = budget or _Budget("clique enumeration")
    everything = mask_of_bits(range(len(adj)))

    def expand(r: int, p: int, x: int) -> Iterator[int]:
        budget.tick()
        if not p and not x:
            yield r
            return
        pool = p | x
        pivot = max(bits(pool), key=lambda u: (adj[u] & p).bit_count())
        for v in bits(p & ~adj[pivot]):
            vb = 1 << v
            yield from expand(r | vb, p & adj[v], x & adj[v])
            p &= ~vb
            x |= vb

    yield from expand(0, everything, 0)


def is_flag_polytope(fs: FacetSystem) -> bool:
    """Every family of pairwise-intersecting facets has a common vertex."""
    for clique in maximal_cliques(fs.adjacency):
        if not any(v & clique == clique for v in fs.vertices):
            return False
    return True


def are_isomorphic(fs1: FacetSystem, fs2: FacetSystem, max_facets: int = 24) -> tuple[int, ...] | None:
    """Facet bijection ``i -> result[i]`` carrying vertices onto vertices, or None."""
    if max(fs1.num_facets, fs2.num_facets) > max_facets:
        raise CapacityError(f"isomorphism search limited to {max_facets} facets")
    if (fs1.dim, fs1.num_facets, len(fs1.vertices)) != (fs2.dim, fs2.num_facets, len(fs2.vertices)):
        return None
    m = fs1.num_facets
    if m == 0:
        return ()

    def pair_counts(fs):
        table = [[0] * m for _ in range(m)]
        for v in fs.vertices:
            pos = bits(v)
            for a in pos:
                for b in pos:
                    table[a][b] += 1
        return table

    c1, c2 = pair_counts(fs1), pair_counts(fs2)

    def signature(table, i):
        return (table[i][i], tuple(sorted(table[i][j] for j in range(m) if j != i)))

    sig1 = [signature(c1, i) for i in range(m)]
    sig2 = [signature(c2, i) for i in range(m)]
    if sorted(sig1) != sorted(sig2):
        return None

    # visit facets of fs1 so that each one (after the first) meets an earlier one
    order: list[int] = []
    remaining = set(range(m))
    while remaining:
        start = min(remaining, key=lambda i: (sig1.count(sig1[i]), i))
        queue = [start]
        remaining.discard(start)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(bits(fs1.adjacency[u])):
                if w in remaining:
                    remaining.discard(w)
                    queue.append(w)

    target = set(fs2.vertices)
    image = [-1] * m
    used = [False] * m
    budget = _Budget("isomorphism search")

    def search(pos: int) -> bool:
        budget.tick()
        if pos == m:
            return all(mask_of_bits(image[i] for i in bits(v)) in target for v in fs1.vertices)
        i = order[pos]
        for j in range(m):
            if used[j] or sig2[j] != sig1[i]:
                continue
            if any(c1[i][order[q]] != c2[j][image[order[q]]] for q in range(pos)):
                continue
            image[i] = j
            used[j] = True
            if search(pos + 1):
                return True
            used[j] = False
        image[i] = -1
        return False

    return tuple(image) if search(0) else None
