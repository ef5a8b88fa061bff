"""Subsets of ``[m] = {1, ..., m}`` and building sets on them.

A subset is stored as an integer bit mask: bit ``i - 1`` is set when the
1-based ground index ``i`` belongs to it.  Public functions accept either
masks or iterables of 1-based indices wherever a subset is expected.

Building sets are immutable and kept in canonical order: by cardinality,
then lexicographically on the sorted index tuples.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from . import _config
from .errors import CapacityError, InputError, PreconditionError

SubsetLike = Union[int, Iterable[int]]


# ---------------------------------------------------------------------------
# subset arithmetic


def mask_of(indices: Iterable[int]) -> int:
    """Bit mask of a collection of 1-based indices."""
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    """Sorted 1-based indices of a bit mask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def full_mask(size: int) -> int:
    return (1 << size) - 1


def canonical_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Sort key: cardinality first, then lexicographic on indices."""
    return (mask.bit_count(), indices_of(mask))


def format_subset(mask: int) -> str:
    """``{1,2,5}``-style label; used as facet label throughout."""
    return "{" + ",".join(str(i) for i in indices_of(mask)) + "}"


def parse_subset(text: str) -> int:
    """Inverse of :func:`format_subset`."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise InputError(f"not a subset label: {text!r}")
    body = body[1:-1].strip()
    if not body:
        raise InputError("empty subset label")
    try:
        return mask_of(int(tok) for tok in body.split(","))
    except ValueError as exc:
        raise InputError(f"not a subset label: {text!r}") from exc


def _coerce_subset(s: SubsetLike, ground_size: int) -> int:
    if isinstance(s, bool):
        raise InputError(f"not a subset: {s!r}")
    if isinstance(s, int):
        mask = s
        if mask <= 0:
            raise InputError("empty subset")
        if mask >> ground_size:
            raise InputError(f"subset {format_subset(mask)} exceeds ground [{ground_size}]")
        return mask
    idx = list(s)
    if not idx:
        raise InputError("empty subset")
    for i in idx:
        if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= ground_size:
            raise InputError(f"index {i!r} outside ground [{ground_size}]")
    return mask_of(idx)


def _check_ground(ground_size: int) -> None:
    if not isinstance(ground_size, int) or ground_size < 1:
        raise InputError(f"ground size must be a positive integer, got {ground_size!r}")
    limit = _config.max_ground()
    if ground_size > limit:
        raise CapacityError(f"ground size {ground_size} exceeds the limit {limit}")


def _coerce_family(family: Iterable[SubsetLike], ground_size: int) -> list[int]:
    _check_ground(ground_size)
    return [_coerce_subset(s, ground_size) for s in family]


def _sorted_canonical(masks: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(masks), key=canonical_key))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    """One failed building-set axiom.

    ``axiom`` is 1 (missing singleton) or 2 (missing union).  ``witnesses``
    holds the offending pair for axiom 2 and is empty for axiom 1;
    ``missing`` is the subset that should have been present.
    """

    axiom: int
    missing: int
    witnesses: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.axiom == 1:
            return f"axiom 1: singleton {format_subset(self.missing)} missing"
        a, b = self.witnesses
        return (
            f"axiom 2: {format_subset(a)} and {format_subset(b)} intersect "
            f"but their union {format_subset(self.missing)} is missing"
        )


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    connected: bool
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return self.valid


def _violations(ground_size: int, members: set[int]) -> list[Violation]:
    out = [Violation(1, 1 << i) for i in range(ground_size) if (1 << i) not in members]
    ordered = sorted(members, key=canonical_key)
    for a, b in itertools.combinations(ordered, 2):
        if a & b and (a | b) not in members:
            out.append(Violation(2, a | b, (a, b)))
    return out


def validate(family: Iterable[SubsetLike], ground_size: int) -> ValidationReport:
    """Check both building-set axioms, collecting every violation.

    Malformed subsets (empty, out of range) raise :class:`InputError`
    instead of being reported.
    """
    members = set(_coerce_family(family, ground_size))
    violations = _violations(ground_size, members)
    return ValidationReport(
        valid=not violations,
        connected=full_mask(ground_size) in members,
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# the building-set value type


@dataclass(frozen=True)
class BuildingSet:
    """A validated building set on ``[ground_size]``.

    ``elements`` is always stored in canonical order; the constructor
    accepts masks or index iterables in any order and raises
    :class:`InputError` if an axiom fails.
    """

    ground_size: int
    elements: tuple[int, ...]

    def __post_init__(self):
        masks = _coerce_family(self.elements, self.ground_size)
        members = set(masks)
        bad = _violations(self.ground_size, members)
        if bad:
            raise InputError(f"not a building set: {bad[0]}")
        object.__setattr__(self, "elements", _sorted_canonical(members))

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], ground_size: int) -> "BuildingSet":
        return cls(ground_size, tuple(_coerce_family(sets, ground_size)))

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def full(self) -> int:
        return full_mask(self.ground_size)

    @property
    def dim(self) -> int:
        """Dimension of the nestohedron when the set is connected."""
        return self.ground_size - 1

    @property
    def is_connected(self) -> bool:
        return self.full in self.members

    @cached_property
    def facets(self) -> tuple[int, ...]:
        """Elements other than the ground set, i.e. the facets of P_B."""
        return tuple(e for e in self.elements if e != self.full)

    def __contains__(self, s) -> bool:
        if isinstance(s, int):
            return s in self.members
        return mask_of(s) in self.members

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def issubset(self, other: "BuildingSet") -> bool:
        return self.ground_size == other.ground_size and self.members <= other.members

    def as_lists(self) -> list[list[int]]:
        return [list(indices_of(e)) for e in self.elements]

    def to_json(self) -> str:
        return json.dumps({"ground_size": self.ground_size, "sets": self.as_lists()})

    def __str__(self) -> str:
        return "{" + ", ".join(format_subset(e) for e in self.elements) + "}"


def load_family(data) -> tuple[int, list[int]]:
    """Parse building-set JSON (a dict or a string) into a raw family.

    No axiom checks are made; use :func:`validate` or :func:`from_json`.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "ground_size" not in data or "sets" not in data:
        raise InputError('building-set JSON needs "ground_size" and "sets"')
    ground = data["ground_size"]
    _check_ground(ground)
    sets = data["sets"]
    if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
        raise InputError('"sets" must be a list of index lists')
    return ground, _coerce_family(sets, ground)


def from_json(data) -> BuildingSet:
    ground, family = load_family(data)
    return BuildingSet(ground, tuple(family))


# ---------------------------------------------------------------------------
# constructions


def closure(family: Iterable[SubsetLike], ground_size: int) -> BuildingSet:
    """Smallest building set on ``[ground_size]`` containing ``family``."""
    members = set(_coerce_family(family, ground_size))
    members.update(1 << i for i in range(ground_size))
    frontier = list(members)
    while frontier:
        fresh = []
        snapshot = list(members)
        for a in frontier:
            for b in snapshot:
                if a & b:
                    u = a | b
                    if u not in members:
                        members.add(u)
                        fresh.append(u)
        frontier = fresh
    return BuildingSet(ground_size, tuple(members))


def _compress(mask: int, support: Sequence[int]) -> int:
    """Re-index ``mask`` (a subset of ``support``) onto ``[len(support)]``."""
    out = 0
    for pos, i in enumerate(support):
        if mask >> (i - 1) & 1:
            out |= 1 << pos
    return out


def restriction(b: BuildingSet, s: SubsetLike) -> BuildingSet:
    """``B|_S`` re-indexed onto ``[|S|]`` by the order-preserving map."""
    mask = _coerce_subset(s, b.ground_size)
    support = indices_of(mask)
    kept = [e for e in b.elements if e & ~mask == 0]
    return BuildingSet(len(support), tuple(_compress(e, support) for e in kept))


def product(b1: BuildingSet, b2: BuildingSet) -> BuildingSet:
    """Disjoint union, with ``b2`` shifted past the ground of ``b1``."""
    ground = b1.ground_size + b2.ground_size
    _check_ground(ground)
    shift = b1.ground_size
    return BuildingSet(ground, b1.elements + tuple(e << shift for e in b2.elements))


def substitution(b: BuildingSet, parts: Sequence[BuildingSet]) -> BuildingSet:
    """Substitute connected building sets into the ground points of ``b``.

    Ground point ``i`` of ``b`` is blown up into a block carrying
    ``parts[i - 1]``; each element ``S`` of ``b`` becomes the union of the
    blocks over ``S``.
    """
    if not b.is_connected:
        raise PreconditionError("substitution needs a connected outer building set")
    if len(parts) != b.ground_size:
        raise PreconditionError(f"expected {b.ground_size} parts, got {len(parts)}")
    for p in parts:
        if not p.is_connected:
            raise PreconditionError(f"part {p} is not connected")
    ground = sum(p.ground_size for p in parts)
    _check_ground(ground)
    blocks = []
    elements = []
    offset = 0
    for p in parts:
        blocks.append(p.full << offset)
        elements.extend(e << offset for e in p.elements)
        offset += p.ground_size
    for s in b.elements:
        u = 0
        for i in indices_of(s):
            u |= blocks[i - 1]
        elements.append(u)
    return BuildingSet(ground, tuple(elements))


def components(b: BuildingSet) -> tuple[int, ...]:
    """Maximal elements of ``b``; they partition the ground set."""
    maximal = [e for e in b.elements if not any(e != f and e & ~f == 0 for f in b.elements)]
    return _sorted_canonical(maximal)


def connectify(b: BuildingSet) -> tuple[BuildingSet, dict[int, int]]:
    """Connected building set with a combinatorially equivalent nestohedron.

    Components are merged left to right in canonical order by
    ``B1(B2, {1}, ..., {1})``.  The returned dict maps every facet of P_B
    (every non-maximal element of ``b``) to the matching facet of the
    result.
    """
    comps = components(b)
    pieces = []
    for c in comps:
        support = indices_of(c)
        local = restriction(b, c)
        mapping = {e: _compress(e, support) for e in b.elements if e & ~c == 0}
        pieces.append((local, mapping))
    current, mapping = pieces[0]
    for nxt, nxt_map in pieces[1:]:
        one = BuildingSet(1, (1,))
        parts = [nxt] + [one] * (current.ground_size - 1)
        merged = substitution(current, parts)
        # block of current's ground point 1 is [k2]; point j >= 2 moves to k2 + j - 1
        k2 = nxt.ground_size

        def lift(mask: int) -> int:
            out = 0
            for i in indices_of(mask):
                out |= full_mask(k2) if i == 1 else 1 << (k2 + i - 2)
            return out

        mapping = {orig: lift(m) for orig, m in mapping.items()}
        mapping.update(nxt_map)
        current = merged
    maximal = set(comps)
    facet_map = {orig: m for orig, m in mapping.items() if orig not in maximal}
    return current, facet_map


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``1..node_count``."""

    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        _check_ground(self.node_count)
        seen = set()
        norm = []
        for edge in self.edges:
            try:
                a, b = edge
            except (TypeError, ValueError) as exc:
                raise InputError(f"edge {edge!r} is not a pair") from exc
            for v in (a, b):
                if not isinstance(v, int) or not 1 <= v <= self.node_count:
                    raise InputError(f"edge endpoint {v!r} outside 1..{self.node_count}")
            if a == b:
                raise InputError(f"loop at node {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise InputError(f"multiple edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        adj = [0] * self.node_count
        for a, b in self.edges:
            adj[a - 1] |= 1 << (b - 1)
            adj[b - 1] |= 1 << (a - 1)
        return tuple(adj)

    def to_json(self) -> str:
        return json.dumps({"nodes": self.node_count, "edges": [list(e) for e in self.edges]})


def parse_edges(text: str, node_count: int | None = None) -> Graph:
    """Parse ``"1-2,2-3"``; node count defaults to the largest endpoint."""
    edges = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            a, b = tok.split("-")
            edges.append((int(a), int(b)))
        except ValueError as exc:
            raise InputError(f"bad edge token {tok!r}") from exc
    if node_count is None:
        node_count = max((max(e) for e in edges), default=0)
    return Graph(node_count, tuple(edges))


def load_graph(data) -> Graph:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        raise InputError('graph JSON needs "nodes" and "edges"')
    return Graph(data["nodes"], tuple(tuple(e) for e in data["edges"]))


def graphical(g: Graph) -> BuildingSet:
    """All node sets inducing a connected subgraph."""
    adj = g.adjacency
    found = set()
    frontier = [1 << i for i in range(g.node_count)]
    found.update(frontier)
    while frontier:
        fresh = []
        for s in frontier:
            nbrs = 0
            for i in indices_of(s):
                nbrs |= adj[i - 1]
            nbrs &= ~s
            while nbrs:
                low = nbrs & -nbrs
                nbrs ^= low
                t = s | low
                if t not in found:
                    found.add(t)
                    fresh.append(t)
        frontier = fresh
    return BuildingSet(g.node_count, tuple(found))


# ---------------------------------------------------------------------------
# presets


def _balanced_tree_nodes(lo: int, hi: int) -> list[int]:
    """Nodes of the balanced binary split tree over ``[lo, hi]``."""
    node = mask_of(range(lo, hi + 1))
    if lo == hi:
        return [node]
    mid = lo + (hi - lo + 1 + 1) // 2 - 1
    return [node] + _balanced_tree_nodes(lo, mid) + _balanced_tree_nodes(mid + 1, hi)


PRESETS = ("simplex", "cube", "permutohedron", "associahedron")


def preset(name: str, n: int) -> BuildingSet:
    """Building set on ``[n + 1]`` of a named n-dimensional nestohedron."""
    if not isinstance(n, int) or n < 1:
        raise InputError(f"dimension must be a positive integer, got {n!r}")
    m = n + 1
    _check_ground(m)
    singletons = [1 << i for i in range(m)]
    if name == "simplex":
        return BuildingSet(m, tuple(singletons + [full_mask(m)]))
    if name == "permutohedron":
        if m > 20:
            raise CapacityError("permutohedron preset limited to ground size 20")
        return BuildingSet(m, tuple(range(1, 1 << m)))
    if name == "associahedron":
        return BuildingSet(
            m, tuple(mask_of(range(i, j + 1)) for i in range(1, m + 1) for j in range(i, m + 1))
        )
    if name == "cube":
        return BuildingSet(m, tuple(_balanced_tree_nodes(1, m)))
    raise InputError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


# ---------------------------------------------------------------------------
# predicates


def two_split(b: BuildingSet, s: SubsetLike) -> tuple[int, int] | None:
    """Split ``S`` into two disjoint elements of ``b``, if possible.

    Among all splits the most balanced is chosen (smallest cardinality
    difference), then the one whose first part is lexicographically least.
    The first part always contains the smallest index of ``S``.
    """
    mask = _coerce_subset(s, b.ground_size)
    if mask not in b.members:
        raise InputError(f"{format_subset(mask)} is not an element of the building set")
    best = None
    best_key = None
    size = mask.bit_count()
    for t in b.elements:
        if t == mask or t & ~mask:
            continue
        rest = mask & ~t
        if rest not in b.members:
            continue
        key = (abs(2 * t.bit_count() - size), indices_of(t))
        if best_key is None or key < best_key:
            best, best_key = (t, rest), key
    return best


def _partitions(target: int, pool: Sequence[int]) -> Iterator[list[int]]:
    """All partitions of ``target`` into members of ``pool``."""
    if target == 0:
        yield []
        return
    low = target & -target
    for p in pool:
        if p & low and p & ~target == 0:
            for tail in _partitions(target & ~p, pool):
                yield [p] + tail


def _has_sub_union(family: Sequence[int], members: frozenset[int]) -> bool:
    k = len(family)
    for r in range(2, k):
        for sub in itertools.combinations(family, r):
            u = 0
            for x in sub:
                u |= x
            if u in members:
                return True
    return False


def minimal_nonfaces(b: BuildingSet, min_size: int = 3) -> Iterator[tuple[int, ...]]:
    """Minimal non-faces of the nerve of P_B with at least ``min_size`` elements.

    These are exactly the pairwise-disjoint facet families whose union lies
    in ``b`` while no proper sub-family of two or more does.
    """
    members = b.members
    for u in b.elements:
        if u.bit_count() < max(min_size, 2):
            continue
        pool = [e for e in b.elements if e != u and e & ~u == 0]
        for part in _partitions(u, pool):
            if len(part) >= min_size and not _has_sub_union(part, members):
                yield tuple(sorted(part, key=canonical_key))


def is_flag(b: BuildingSet) -> bool:
    """Whether P_B is flag, decided on the building set itself."""
    if not b.is_connected:
        raise PreconditionError("is_flag needs a connected building set; connectify first")
    return next(minimal_nonfaces(b, 3), None) is None


def are_equivalent(b1: BuildingSet, b2: BuildingSet) -> tuple[int, ...] | None:
    """Brute-force search for a ground permutation mapping ``b1`` onto ``b2``.

    Returns the permutation as a tuple ``p`` with ``i -> p[i - 1]``, or
    ``None``.  Limited to ground size 8.
    """
    if b1.ground_size != b2.ground_size or len(b1) != len(b2):
        return None
    m = b1.ground_size
    if m > 8:
        raise CapacityError("equivalence search limited to ground size 8")
    if sorted(e.bit_count() for e in b1) != sorted(e.bit_count() for e in b2):
        return None
    target = b2.members
    for perm in itertools.permutations(range(1, m + 1)):
        if all(mask_of(perm[i - 1] for i in indices_of(e)) in target for e in b1.elements):
            return perm
    return None
