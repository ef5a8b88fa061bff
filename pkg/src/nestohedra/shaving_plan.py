"""Building a flag nestohedron from a cube by codimension-2 shavings.

The pipeline is

1. :func:`cube_subset` finds a sub-building-set ``B0`` whose nestohedron is
   a cube, recorded as a binary split tree;
2. :func:`plan_flag` orders the elements of ``B \\ B0`` into shaving steps,
   each with its two-part decomposition;
3. :func:`gamma_via_plan` replays the steps on facet systems and tracks the
   gamma-vector through the shaving recursion.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .building_sets import (
    BuildingSet,
    SubsetLike,
    _coerce_subset,
    canonical_key,
    closure,
    format_subset,
    indices_of,
    is_flag,
    preset,
    two_split,
)
from .errors import ConsistencyError, InputError, NotFlagError, PlanError, PreconditionError
from .face_lattice import (
    FacetSystem,
    f_vector_from_building_set,
    face_of,
    face_subsystem,
    facet_system_from_building_set,
    gamma_vector,
    polynomial_bundle,
    shave,
)


@dataclass(frozen=True)
class SplitTree:
    """Binary tree of subsets; leaves are singletons.

    ``axis`` is the 0-based coordinate assigned to an internal node (depth
    first preorder); it is ``None`` on leaves.
    """

    subset: int
    left: "SplitTree | None" = None
    right: "SplitTree | None" = None
    axis: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def nodes(self) -> list["SplitTree"]:
        """All nodes in preorder."""
        out = [self]
        if not self.is_leaf:
            out += self.left.nodes() + self.right.nodes()
        return out

    def internal_nodes(self) -> list["SplitTree"]:
        return [t for t in self.nodes() if not t.is_leaf]

    def to_nested(self):
        """Leaves become their index, internal nodes a two-element list."""
        if self.is_leaf:
            return indices_of(self.subset)[0]
        return [self.left.to_nested(), self.right.to_nested()]

    @classmethod
    def from_nested(cls, data) -> "SplitTree":
        counter = iter(range(10**9))

        def build(node):
            if isinstance(node, int):
                return cls(1 << (node - 1))
            if not isinstance(node, list) or len(node) != 2:
                raise InputError(f"bad tree node {node!r}")
            axis = next(counter)
            left, right = build(node[0]), build(node[1])
            if left.subset & right.subset:
                raise InputError("tree children overlap")
            return cls(left.subset | right.subset, left, right, axis)

        return build(data)


@dataclass(frozen=True)
class ShavingStep:
    subset: int
    parts: tuple[int, ...]
    stage: int

    def __str__(self) -> str:
        rhs = " | ".join(format_subset(p) for p in self.parts)
        return f"{format_subset(self.subset)} <- {rhs}"


@dataclass(frozen=True)
class ShavingPlan:
    """Ordered shavings turning P_base into P_target.

    For plans from :func:`plan_flag` with no explicit base, ``base`` is the
    cube building set and ``tree`` its split tree.
    """

    target: BuildingSet
    base: BuildingSet
    tree: SplitTree | None
    steps: tuple[ShavingStep, ...]

    @property
    def is_codim2(self) -> bool:
        return all(len(s.parts) == 2 for s in self.steps)

    def prefixes(self) -> Iterable[list[int]]:
        """Element lists of the intermediate families, base first."""
        current = list(self.base.elements)
        yield list(current)
        for s in self.steps:
            current.append(s.subset)
            yield list(current)

    def to_dict(self) -> dict:
        return {
            "B": [list(indices_of(e)) for e in self.target.elements],
            "B0": [list(indices_of(e)) for e in self.base.elements],
            "tree": self.tree.to_nested() if self.tree else None,
            "steps": [
                {"S": list(indices_of(s.subset)), "parts": [list(indices_of(p)) for p in s.parts], "stage": s.stage}
                for s in self.steps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------


def _split_tree(b: BuildingSet, node: int) -> SplitTree:
    if node.bit_count() == 1:
        return SplitTree(node)
    split = two_split(b, node)
    if split is None:
        raise NotFlagError(f"{format_subset(node)} has no split into two elements; P_B is not flag")
    left, right = split
    return SplitTree(node, _split_tree(b, left), _split_tree(b, right))


def _assign_axes(tree: SplitTree, counter: list[int]) -> SplitTree:
    if tree.is_leaf:
        return tree
    axis = counter[0]
    counter[0] += 1
    left = _assign_axes(tree.left, counter)
    right = _assign_axes(tree.right, counter)
    return SplitTree(tree.subset, left, right, axis)


def cube_subset(b: BuildingSet) -> tuple[BuildingSet, SplitTree]:
    """Sub-building-set of ``b`` with a cube as nestohedron, plus its tree.

    Each node is split by :func:`two_split` (most balanced, then
    lexicographically least first part).
    """
    if not b.is_connected:
        raise PreconditionError("cube_subset needs a connected building set")
    tree = _assign_axes(_split_tree(b, b.full), [0])
    b0 = BuildingSet(b.ground_size, tuple(t.subset for t in tree.nodes()))
    return b0, tree


def _maximal_inside(current: Iterable[int], s: int) -> tuple[int, ...]:
    inside = [t for t in current if t & ~s == 0]
    top = [t for t in inside if not any(t != u and t & ~u == 0 for u in inside)]
    # parts are disjoint: order them by smallest index
    return tuple(sorted(top, key=indices_of))


def decompose(current, s: SubsetLike) -> tuple[int, ...]:
    """Minimal disjoint representation of ``S`` by members of ``current``.

    ``current`` is a building set or any family containing every singleton;
    the result is the list of its maximal members inside ``S``, ordered by
    smallest index.
    """
    if isinstance(current, BuildingSet):
        ground = current.ground_size
        members = current.elements
    else:
        members = tuple(current)
        ground = max((m.bit_length() for m in members), default=1)
    mask = _coerce_subset(s, ground)
    parts = _maximal_inside(members, mask)
    cover = 0
    for p in parts:
        if cover & p:
            raise ConsistencyError("maximal members overlap; the family is not a building set")
        cover |= p
    if cover != mask:
        raise PreconditionError(f"{format_subset(mask)} is not covered; singletons missing")
    return parts


def _two_part_batch(current: set[int], i: int, j: int) -> set[int]:
    """``{S1 | S2 : S1, S2 in current, disjoint, I <= S1, J <= S2}``."""
    above_i = [t for t in current if i & ~t == 0]
    above_j = [t for t in current if j & ~t == 0]
    return {a | b for a in above_i for b in above_j if not a & b}


def _order_reverse_inclusion(masks: Iterable[int]) -> list[int]:
    return sorted(masks, key=lambda m: (-m.bit_count(), indices_of(m)))


def plan_flag(b: BuildingSet, base: BuildingSet | None = None) -> ShavingPlan:
    """Codimension-2 shaving plan from the cube (or from ``base``) to P_B.

    At every stage the minimal new element ``S`` is added together with
    everything its closure forces; the batch is applied in reverse
    inclusion order, each element decomposing into exactly two parts.
    """
    if not b.is_connected:
        raise PreconditionError("plan_flag needs a connected building set")
    if not is_flag(b):
        raise NotFlagError(f"P_B is not flag for B = {b}")
    if base is None:
        base, tree = cube_subset(b)
    else:
        tree = None
        if not base.issubset(b) or not base.is_connected:
            raise PreconditionError("base must be a connected sub-building-set of B")
        if not is_flag(base):
            raise NotFlagError(f"base {base} is not flag")
    current = set(base.elements)
    steps: list[ShavingStep] = []
    stage = 0
    while len(current) < len(b):
        stage += 1
        s = min((e for e in b.elements if e not in current), key=canonical_key)
        split = _maximal_inside(current, s)
        if len(split) != 2:
            raise ConsistencyError(
                f"minimal new element {format_subset(s)} decomposes into {len(split)} parts"
            )
        grown = set(closure(list(current) + [s], b.ground_size).elements)
        if not grown <= b.members:
            raise ConsistencyError("closure left the target building set")
        expected = current | _two_part_batch(current, *split)
        if grown != expected:
            raise ConsistencyError(f"closure batch for {format_subset(s)} disagrees with the two-part formula")
        for t in _order_reverse_inclusion(grown - current):
            parts = _maximal_inside(current, t)
            if len(parts) != 2:
                raise ConsistencyError(f"{format_subset(t)} decomposes into {len(parts)} parts")
            steps.append(ShavingStep(t, parts, stage))
            current.add(t)
    return ShavingPlan(b, base, tree, tuple(steps))


def plan_general(b_sub: BuildingSet, b_super: BuildingSet) -> ShavingPlan:
    """All of ``b_super \\ b_sub`` in reverse inclusion order, each with its
    full decomposition; faces of any codimension may be shaved."""
    if not (b_sub.is_connected and b_super.is_connected):
        raise PreconditionError("plan_general needs connected building sets")
    if not b_sub.issubset(b_super):
        raise PreconditionError("b_sub must be contained in b_super")
    current = set(b_sub.elements)
    steps = []
    for t in _order_reverse_inclusion(b_super.members - b_sub.members):
        parts = _maximal_inside(current, t)
        if len(parts) < 2:
            raise ConsistencyError(f"{format_subset(t)} already present")
        steps.append(ShavingStep(t, parts, 1))
        current.add(t)
    return ShavingPlan(b_super, b_sub, None, tuple(steps))


# ---------------------------------------------------------------------------
# gamma recursion


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def simplex_gamma(m: int) -> tuple[int, ...]:
    """gamma of the m-simplex; the empty simplex (m = -1) counts as 1."""
    if m <= 0:
        return (1,)
    return polynomial_bundle([comb(m + 1, i + 1) for i in range(m + 1)]).gamma


def shaving_gamma_update(gamma: Sequence[int], face_gamma: Sequence[int], n: int, face_dim: int) -> tuple[int, ...]:
    """gamma(Q) = gamma(P) + tau * gamma(G) * gamma(simplex of dim n - k - 2)."""
    inc = [0] + _poly_mul(face_gamma, simplex_gamma(n - face_dim - 2))
    size = n // 2 + 1
    out = list(gamma) + [0] * (size - len(gamma))
    for i, c in enumerate(inc):
        if c:
            if i >= size:
                raise ConsistencyError("gamma increment exceeds degree n/2")
            out[i] += c
    return tuple(out)


@dataclass(frozen=True)
class TraceEntry:
    index: int
    subset: int
    face_dim: int
    face_gamma: tuple[int, ...]
    gamma: tuple[int, ...]


@dataclass(frozen=True)
class GammaTrace:
    initial: tuple[int, ...]
    entries: tuple[TraceEntry, ...]
    system: FacetSystem = field(repr=False)

    @property
    def gammas(self) -> list[tuple[int, ...]]:
        return [self.initial] + [e.gamma for e in self.entries]

    def is_monotone(self) -> bool:
        seq = self.gammas
        return all(all(x <= y for x, y in zip(a, b)) for a, b in zip(seq, seq[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "face_gamma", "gamma"])
        w.writerow([0, "", " ".join(map(str, self.initial))])
        for e in self.entries:
            w.writerow([e.index, " ".join(map(str, e.face_gamma)), " ".join(map(str, e.gamma))])
        return buf.getvalue()


def gamma_via_plan(plan: ShavingPlan) -> tuple[tuple[int, ...], GammaTrace]:
    """Replay a plan on facet systems, updating gamma by the shaving formula.

    The final facet system is kept on the trace; it carries the target's
    facet labels and can be compared against P_target directly.
    """
    fs = facet_system_from_building_set(plan.base)
    n = fs.dim
    gamma = gamma_vector(fs)
    initial = gamma
    entries = []
    for idx, step in enumerate(plan.steps, start=1):
        try:
            face = face_of(fs, [format_subset(p) for p in step.parts])
        except InputError as exc:
            raise PlanError(f"step {idx} ({step}): {exc}") from exc
        if face.facets.bit_count() != len(step.parts):
            raise PlanError(f"step {idx} ({step}): face has codimension {face.facets.bit_count()}")
        g = face_subsystem(fs, face)
        face_gamma = gamma_vector(g)
        gamma = shaving_gamma_update(gamma, face_gamma, n, face.dim)
        fs = shave(fs, face, label=format_subset(step.subset))
        entries.append(TraceEntry(idx, step.subset, face.dim, face_gamma, gamma))
    return gamma, GammaTrace(initial, tuple(entries), fs)


# ---------------------------------------------------------------------------
# verification of the gamma claims


def direct_gamma(b: BuildingSet) -> tuple[int, ...]:
    return polynomial_bundle(f_vector_from_building_set(b)).gamma


@lru_cache(maxsize=None)
def permutohedron_gamma(n: int) -> tuple[int, ...]:
    return direct_gamma(preset("permutohedron", n))


@dataclass(frozen=True)
class Check:
    name: str
    subject: str
    passed: bool | None
    detail: str

    def __str__(self) -> str:
        tag = {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]
        return f"{tag} {self.name} {self.subject}: {self.detail}"


@dataclass(frozen=True)
class GammaReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]


def _fmt(v: Sequence[int]) -> str:
    return "(" + ", ".join(map(str, v)) + ")"


def verify_gamma_claims(
    bs: Sequence[BuildingSet],
    *,
    gal: bool = True,
    bounds: bool = True,
    monotone: bool = True,
    pairs: Sequence[tuple[int, int]] | None = None,
) -> GammaReport:
    """Check nonnegativity, the permutohedron bound and monotonicity.

    ``pairs`` are index pairs ``(i, j)`` into ``bs`` with ``bs[i]`` inside
    ``bs[j]``; by default every nested pair on a common ground is used.
    """
    checks = []
    gammas: dict[int, tuple[int, ...]] = {}
    for i, b in enumerate(bs):
        name = f"#{i} {b}"
        if not b.is_connected:
            checks.append(Check("gamma", name, None, "disconnected; connectify first"))
            continue
        if not is_flag(b):
            checks.append(Check("gamma", name, None, "not flag"))
            continue
        g = direct_gamma(b)
        gammas[i] = g
        if gal:
            ok = all(x >= 0 for x in g)
            checks.append(Check("gal", name, ok, f"gamma = {_fmt(g)}"))
        if bounds:
            pe = permutohedron_gamma(b.dim)
            ok = all(x <= y for x, y in zip(g, pe))
            checks.append(Check("bound", name, ok, f"{_fmt(g)} <= {_fmt(pe)}"))
    if monotone:
        if pairs is None:
            pairs = [
                (i, j)
                for i in gammas
                for j in gammas
                if i != j and bs[i].issubset(bs[j]) and bs[i].members != bs[j].members
            ]
        for i, j in pairs:
            if i not in gammas or j not in gammas:
                checks.append(Check("monotone", f"#{i} <= #{j}", None, "member skipped"))
                continue
            if not bs[i].issubset(bs[j]):
                checks.append(Check("monotone", f"#{i} <= #{j}", None, "not nested"))
                continue
            ok = all(x <= y for x, y in zip(gammas[i], gammas[j]))
            checks.append(Check("monotone", f"#{i} <= #{j}", ok, f"{_fmt(gammas[i])} <= {_fmt(gammas[j])}"))
    return GammaReport(tuple(checks))
