"""Finite topological spaces encoded by minimal open neighbourhoods.

A topology on a finite set is determined by the minimal open set U_x
containing each point x (equivalently by the specialization preorder);
the open sets are exactly the unions of minimal opens.  All predicates
here are computed directly from that encoding, so facts such as
"finite Hausdorff = discrete" come out as verified results rather than
baked-in assumptions.

Points are opaque hashables.  Internally a space keeps one bitmask per
point, which keeps the predicates cheap on spaces of up to a few dozen
points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

Point = Hashable


class InvalidSpace(ValueError):
    """Raised when minimal-open data does not describe a topology."""


class InvalidMap(ValueError):
    """Raised when a map between spaces is not well formed."""


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinSpace:
    """A finite topological space.

    ``points`` is an ordered tuple of point identifiers and ``min_open``
    maps each point x to the minimal open set containing it.  The data
    must satisfy x in U_x and the coherence law

        y in U_x  implies  U_y subset of U_x,

    which is exactly what it takes for the family {U_x} to generate a
    topology with U_x minimal at x.
    """

    __slots__ = ("points", "_index", "_mo")

    def __init__(self, points: Iterable[Point], min_open: Mapping[Point, Iterable[Point]]):
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise InvalidSpace("duplicate points")
        self._index = {p: i for i, p in enumerate(self.points)}
        masks = []
        for p in self.points:
            if p not in min_open:
                raise InvalidSpace(f"no minimal open given for point {p!r}")
            m = 0
            for q in min_open[p]:
                i = self._index.get(q)
                if i is None:
                    raise InvalidSpace(f"min_open({p!r}) mentions unknown point {q!r}")
                m |= 1 << i
            masks.append(m)
        for extra in set(min_open) - set(self.points):
            raise InvalidSpace(f"min_open defined for unknown point {extra!r}")
        self._mo = tuple(masks)
        for i, m in enumerate(self._mo):
            if not (m >> i) & 1:
                raise InvalidSpace(f"point {self.points[i]!r} missing from its own minimal open")
            for j in _iter_bits(m):
                if self._mo[j] & ~m:
                    raise InvalidSpace(
                        f"minimal opens incoherent: {self.points[j]!r} lies in "
                        f"U_{self.points[i]!r} but U_{self.points[j]!r} does not"
                    )

    # -- basic structure ------------------------------------------------

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: Point) -> bool:
        return p in self._index

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FinSpace)
            and self.points == other.points
            and self._mo == other._mo
        )

    def __hash__(self):
        return hash((self.points, self._mo))

    def __repr__(self):
        mo = {p: sorted(map(str, self.min_open(p))) for p in self.points}
        return f"FinSpace({list(self.points)!r}, {mo!r})"

    def index(self, p: Point) -> int:
        return self._index[p]

    def bits(self, subset: Iterable[Point]) -> int:
        m = 0
        for p in subset:
            m |= 1 << self._index[p]
        return m

    def unbits(self, mask: int) -> frozenset:
        return frozenset(self.points[i] for i in _iter_bits(mask))

    def min_open_bits(self, i: int) -> int:
        return self._mo[i]

    def min_open(self, p: Point) -> frozenset:
        return self.unbits(self._mo[self._index[p]])

    def min_open_map(self) -> dict:
        return {p: self.min_open(p) for p in self.points}

    # -- topology -------------------------------------------------------

    def is_open_bits(self, mask: int) -> bool:
        return all(not (self._mo[i] & ~mask) for i in _iter_bits(mask))

    def is_open(self, subset: Iterable[Point]) -> bool:
        return self.is_open_bits(self.bits(subset))

    def is_closed_bits(self, mask: int) -> bool:
        return self.is_open_bits(~mask & (1 << len(self.points)) - 1)

    def is_closed(self, subset: Iterable[Point]) -> bool:
        return self.is_closed_bits(self.bits(subset))

    def closure_bits(self, mask: int) -> int:
        return sum(1 << i for i in range(len(self.points)) if self._mo[i] & mask)

    def closure(self, subset: Iterable[Point]) -> frozenset:
        return self.unbits(self.closure_bits(self.bits(subset)))

    def interior_bits(self, mask: int) -> int:
        return sum(1 << i for i in _iter_bits(mask) if not (self._mo[i] & ~mask))

    def open_set_bits(self) -> list[int]:
        """All open sets, as bitmasks, ordered by (popcount, value).

        Full lattice enumeration is exponential and capped at 16 points;
        the predicates that run on larger spaces work from minimal opens
        without enumerating the lattice.
        """
        if len(self.points) > 16:
            raise InvalidSpace("open-set enumeration capped at 16 points")
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for m in frontier:
                for g in self._mo:
                    u = m | g
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return sorted(seen, key=lambda m: (bin(m).count("1"), m))

    def open_sets(self) -> list[frozenset]:
        return [self.unbits(m) for m in self.open_set_bits()]

    def subspace(self, subset: Iterable[Point]) -> "FinSpace":
        sub = self.bits(subset)
        pts = [p for p in self.points if (sub >> self._index[p]) & 1]
        mo = {p: self.unbits(self._mo[self._index[p]] & sub) for p in pts}
        return FinSpace(pts, mo)

    # subspace predicates on bitmasks, avoiding object construction in hot loops

    def _subspace_hausdorff(self, sub: int) -> bool:
        idx = list(_iter_bits(sub))
        for a, b in itertools.combinations(idx, 2):
            if self._mo[a] & self._mo[b] & sub:
                return False
        return True

    def is_hausdorff(self) -> bool:
        return self._subspace_hausdorff((1 << len(self.points)) - 1)

    def is_discrete(self) -> bool:
        return all(self._mo[i] == 1 << i for i in range(len(self.points)))


# -- constructions ------------------------------------------------------


def discrete(points: Iterable[Point]) -> FinSpace:
    pts = tuple(points)
    return FinSpace(pts, {p: {p} for p in pts})


def sierpinski(open_point: Point = "a", closed_point: Point = "b") -> FinSpace:
    return FinSpace(
        (open_point, closed_point),
        {open_point: {open_point}, closed_point: {open_point, closed_point}},
    )


def chain_space() -> FinSpace:
    """Two-point space {c, o} with {o} open and {c} not: U_c = {c, o}."""
    return FinSpace(("c", "o"), {"o": {"o"}, "c": {"c", "o"}})


def product(left: FinSpace, right: FinSpace) -> FinSpace:
    """Product space; minimal opens are U_y x U_z."""
    pts = [(y, z) for y in left.points for z in right.points]
    mo = {
        (y, z): {(y2, z2) for y2 in left.min_open(y) for z2 in right.min_open(z)}
        for (y, z) in pts
    }
    return FinSpace(pts, mo)


def disjoint_union(parts: Sequence[FinSpace]) -> FinSpace:
    """Disjoint union with each part open and closed; points are (i, p)."""
    pts = [(i, p) for i, part in enumerate(parts) for p in part.points]
    mo = {
        (i, p): {(i, q) for q in part.min_open(p)}
        for i, part in enumerate(parts)
        for p in part.points
    }
    return FinSpace(pts, mo)


class SpaceMap:
    """A set map between finite spaces; no continuity is assumed."""

    __slots__ = ("dom", "cod", "assignment")

    def __init__(self, dom: FinSpace, cod: FinSpace, assignment: Mapping[Point, Point]):
        self.dom = dom
        self.cod = cod
        for p in dom.points:
            if p not in assignment:
                raise InvalidMap(f"assignment missing domain point {p!r}")
            if assignment[p] not in cod:
                raise InvalidMap(f"assignment sends {p!r} outside the codomain")
        for extra in set(assignment) - set(dom.points):
            raise InvalidMap(f"assignment defined on unknown point {extra!r}")
        self.assignment = {p: assignment[p] for p in dom.points}

    def __call__(self, p: Point) -> Point:
        return self.assignment[p]

    def __eq__(self, other):
        return (
            isinstance(other, SpaceMap)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.assignment == other.assignment
        )

    def __repr__(self):
        return f"SpaceMap({self.assignment!r})"

    def image_bits(self, mask: int) -> int:
        out = 0
        for i in _iter_bits(mask):
            out |= 1 << self.cod.index(self.assignment[self.dom.points[i]])
        return out

    def image(self, subset: Iterable[Point]) -> frozenset:
        return self.cod.unbits(self.image_bits(self.dom.bits(subset)))

    def preimage_bits(self, mask: int) -> int:
        out = 0
        for i, p in enumerate(self.dom.points):
            if (mask >> self.cod.index(self.assignment[p])) & 1:
                out |= 1 << i
        return out

    def is_surjective(self) -> bool:
        return self.image_bits((1 << len(self.dom)) - 1) == (1 << len(self.cod)) - 1


def compose_maps(outer: SpaceMap, inner: SpaceMap) -> SpaceMap:
    if inner.cod != outer.dom:
        raise InvalidMap("maps are not composable")
    return SpaceMap(inner.dom, outer.cod, {p: outer(inner(p)) for p in inner.dom.points})


def identity_map(space: FinSpace) -> SpaceMap:
    return SpaceMap(space, space, {p: p for p in space.points})


@dataclass(frozen=True)
class MapProperties:
    continuous: bool
    open_map: bool
    surjective: bool
    quotient: bool
    local_homeomorphism: bool

    def as_dict(self) -> dict:
        return {
            "continuous": self.continuous,
            "open_map": self.open_map,
            "surjective": self.surjective,
            "quotient": self.quotient,
            "local_homeomorphism": self.local_homeomorphism,
        }


def final_min_open_bits(f: SpaceMap, c: Point) -> int:
    """Minimal set containing c whose preimage under f is open.

    The sets with open preimage form a topology (the final topology), so
    each point has a minimal such set; it is the least fixed point of
    V -> V  union  f(U_y) over y in the preimage of V.
    """
    dom, cod = f.dom, f.cod
    mask = 1 << cod.index(c)
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(dom.points):
            if (mask >> cod.index(f(p))) & 1:
                img = f.image_bits(dom.min_open_bits(i))
                if img & ~mask:
                    mask |= img
                    changed = True
    return mask


def _local_homeo_at(f: SpaceMap, i: int) -> bool:
    # If any open V containing x works, then so does the minimal open U_x:
    # U_x is open inside V, a homeomorphism onto an open image restricts to
    # one on U_x, and open subsets of open sets are open.  So testing U_x
    # alone decides the predicate.
    dom, cod = f.dom, f.cod
    w = dom.min_open_bits(i)
    members = list(_iter_bits(w))
    targets = [cod.index(f(dom.points[j])) for j in members]
    if len(set(targets)) != len(targets):
        return False
    fw = 0
    for t in targets:
        fw |= 1 << t
    if not cod.is_open_bits(fw):
        return False
    back = {t: j for j, t in zip(members, targets)}
    for j, t in zip(members, targets):
        # continuity of f restricted to W: f(U_y) within U_{f(y)} cap f(W)
        img = f.image_bits(dom.min_open_bits(j))
        if img & ~(cod.min_open_bits(t) & fw):
            return False
        # continuity of the inverse: preimages of minimal opens of f(W)
        pre = 0
        for t2 in _iter_bits(cod.min_open_bits(t) & fw):
            pre |= 1 << back[t2]
        if pre & ~dom.min_open_bits(j):
            return False
    return True


def is_quotient_map(f: SpaceMap) -> bool:
    """Surjective, and the codomain topology is the final topology."""
    return f.is_surjective() and all(
        final_min_open_bits(f, c) == f.cod.min_open_bits(j)
        for j, c in enumerate(f.cod.points)
    )


def is_local_homeomorphism(f: SpaceMap) -> bool:
    return all(_local_homeo_at(f, i) for i in range(len(f.dom.points)))


def classify_map(f: SpaceMap) -> MapProperties:
    """Decide continuity, openness, surjectivity, the quotient property and
    local homeomorphy of a map between finite spaces.

    Continuity and openness reduce to the minimal opens: f is continuous
    iff f(U_x) lies in U_{f(x)} for every x, and open iff every f(U_x) is
    open (images commute with the unions that build general opens).  The
    quotient property compares the codomain topology with the final
    topology, via their minimal opens.
    """
    dom, cod = f.dom, f.cod
    continuous = True
    open_map = True
    for i, p in enumerate(dom.points):
        img = f.image_bits(dom.min_open_bits(i))
        if img & ~cod.min_open_bits(cod.index(f(p))):
            continuous = False
        if not cod.is_open_bits(img):
            open_map = False
    return MapProperties(
        continuous, open_map, f.is_surjective(), is_quotient_map(f), is_local_homeomorphism(f)
    )


@dataclass(frozen=True)
class SpaceProperties:
    hausdorff: bool
    locally_hausdorff: bool
    t1: bool
    discrete: bool

    def as_dict(self) -> dict:
        return {
            "hausdorff": self.hausdorff,
            "locally_hausdorff": self.locally_hausdorff,
            "t1": self.t1,
            "discrete": self.discrete,
        }


def space_properties(space: FinSpace) -> SpaceProperties:
    """Separation properties, each computed from its definition.

    Two points admit disjoint open neighbourhoods iff their minimal opens
    are disjoint, and a point has a Hausdorff neighbourhood iff its
    minimal open is Hausdorff (shrinking preserves the property), so the
    definitions are evaluated on the canonical witnesses.
    """
    n = len(space.points)
    full = (1 << n) - 1
    hausdorff = space._subspace_hausdorff(full)
    locally_hausdorff = all(
        space._subspace_hausdorff(space.min_open_bits(i)) for i in range(n)
    )
    t1 = all(
        space.closure_bits(1 << i) == 1 << i for i in range(n)
    )
    return SpaceProperties(hausdorff, locally_hausdorff, t1, space.is_discrete())


@dataclass(frozen=True)
class CompactWitness:
    point: Point
    compact_neighbourhood: frozenset
    canonical_cover_size: int
    subcover_size: int


@dataclass(frozen=True)
class OpenSubsetEntry:
    subset: frozenset
    locally_compact: bool
    witnesses: tuple[CompactWitness, ...]


@dataclass(frozen=True)
class LocalCompactnessTrace:
    result: bool
    open_subsets: tuple[OpenSubsetEntry, ...]
    basis_result: bool
    equivalence_holds: bool


def _compact_witness(space: FinSpace, sub: int, i: int) -> CompactWitness:
    # Every subset of a finite space is compact; the witness extracts a
    # finite subcover from the canonical cover by relative minimal opens.
    k = space.min_open_bits(i) & sub
    cover = [space.min_open_bits(j) & sub for j in _iter_bits(k)]
    chosen = []
    remaining = k
    for m in cover:
        if remaining & m:
            chosen.append(m)
            remaining &= ~m
    return CompactWitness(space.points[i], space.unbits(k), len(cover), len(chosen))


def check_local_local_compactness(space: FinSpace) -> LocalCompactnessTrace:
    """Check that every point has a neighbourhood basis of compact sets.

    The check runs both sides of the equivalence "neighbourhood bases of
    compact sets exist iff every open subset is locally compact": it
    enumerates the nonempty open subsets and verifies each is locally
    compact, then verifies the basis condition directly, and records that
    the two verdicts agree.  On finite spaces both are always true; the
    trace documents why.
    """
    entries = []
    for mask in space.open_set_bits():
        if mask == 0:
            continue
        witnesses = tuple(_compact_witness(space, mask, i) for i in _iter_bits(mask))
        entries.append(
            OpenSubsetEntry(space.unbits(mask), all(w is not None for w in witnesses), witnesses)
        )
    opens_ok = all(e.locally_compact for e in entries)
    # direct side: for every x and open V containing x, U_x is a compact
    # neighbourhood of x inside V
    basis_ok = True
    for i in range(len(space.points)):
        for mask in space.open_set_bits():
            if (mask >> i) & 1 and space.min_open_bits(i) & ~mask:
                basis_ok = False
    return LocalCompactnessTrace(
        result=opens_ok and basis_ok,
        open_subsets=tuple(entries),
        basis_result=basis_ok,
        equivalence_holds=opens_ok == basis_ok,
    )


def quotient_space(space: FinSpace, partition: Iterable[Iterable[Point]]):
    """Quotient of a finite space by a partition, with the final topology.

    Returns (X, psi) where X has the partition blocks (as frozensets) for
    points and psi is the projection; psi is a quotient map by
    construction and this is re-verified before returning.
    """
    blocks = [frozenset(b) for b in partition]
    seen: set = set()
    for b in blocks:
        if not b:
            raise InvalidSpace("empty partition block")
        for p in b:
            if p not in space:
                raise InvalidSpace(f"partition mentions unknown point {p!r}")
            if p in seen:
                raise InvalidSpace(f"partition blocks overlap at {p!r}")
            seen.add(p)
    if len(seen) != len(space.points):
        raise InvalidSpace("partition does not cover the space")
    blocks.sort(key=lambda b: min(space.index(p) for p in b))
    block_of = {p: b for b in blocks for p in b}

    # minimal final-open of each block: close under "saturate the image of
    # every minimal open meeting the set", precomputed per block
    block_idx = {b: k for k, b in enumerate(blocks)}
    reach = [0] * len(blocks)
    for i, p in enumerate(space.points):
        img = 0
        for j in _iter_bits(space.min_open_bits(i)):
            img |= 1 << block_idx[block_of[space.points[j]]]
        reach[block_idx[block_of[p]]] |= img
    mo: dict = {}
    for k, b in enumerate(blocks):
        mask = 1 << k
        while True:
            grown = mask
            for j in _iter_bits(mask):
                grown |= reach[j]
            if grown == mask:
                break
            mask = grown
        mo[b] = {blocks[j] for j in _iter_bits(mask)}
    quotient = FinSpace(blocks, mo)
    psi = SpaceMap(space, quotient, block_of)
    if not is_quotient_map(psi):
        raise AssertionError("internal error: canonical projection not a quotient map")
    return quotient, psi


def hausdorff_cover_resolution(space: FinSpace, cover: Sequence[Iterable[Point]]):
    """Resolve a space covered by open Hausdorff subsets by their disjoint union.

    Returns (Y, psi) where Y is the disjoint union of the cover elements,
    each open and closed in Y, and psi is the tautological map.  psi is a
    surjective local homeomorphism; both facts are re-verified.
    """
    masks = []
    for k, part in enumerate(cover):
        mask = space.bits(part)
        if not space.is_open_bits(mask):
            raise InvalidSpace(f"cover element {k} is not open")
        if not space._subspace_hausdorff(mask):
            raise InvalidSpace(f"cover element {k} is not Hausdorff as a subspace")
        masks.append(mask)
    union = 0
    for m in masks:
        union |= m
    if union != (1 << len(space.points)) - 1:
        raise InvalidSpace("cover is not exhaustive")

    pts = []
    mo = {}
    assignment = {}
    for k, mask in enumerate(masks):
        for i in _iter_bits(mask):
            p = space.points[i]
            pts.append((k, p))
            # the cover element is open, so U_p is contained in it and the
            # subspace minimal open of p is U_p itself
            mo[(k, p)] = {(k, q) for q in space.min_open(p)}
            assignment[(k, p)] = p
    resolution = FinSpace(pts, mo)
    psi = SpaceMap(resolution, space, assignment)
    props = classify_map(psi)
    if not (props.local_homeomorphism and props.surjective):
        raise AssertionError("internal error: resolution map is not a surjective local homeomorphism")
    return resolution, psi


@dataclass(frozen=True)
class ClosedHausdorffCore:
    core: frozenset
    core_is_open: bool
    core_is_hausdorff: bool
    witnesses: dict

    def as_dict(self) -> dict:
        return {
            "core": sorted(map(str, self.core)),
            "core_is_open": self.core_is_open,
            "core_is_hausdorff": self.core_is_hausdorff,
            "witnesses": {str(p): sorted(map(str, w)) for p, w in self.witnesses.items()},
        }


def closed_hausdorff_core(space: FinSpace) -> ClosedHausdorffCore:
    """Points admitting a neighbourhood that is closed and Hausdorff.

    The returned report also asserts the two structural facts about the
    core: it is open, and Hausdorff in the subspace topology.
    """
    n = len(space.points)
    full = (1 << n) - 1
    closed_hausdorff = [
        full & ~m for m in space.open_set_bits() if space._subspace_hausdorff(full & ~m)
    ]
    core = 0
    witnesses = {}
    for i in range(n):
        for c in closed_hausdorff:
            if not (space.min_open_bits(i) & ~c):
                core |= 1 << i
                witnesses[space.points[i]] = space.unbits(c)
                break
    return ClosedHausdorffCore(
        core=space.unbits(core),
        core_is_open=space.is_open_bits(core),
        core_is_hausdorff=space._subspace_hausdorff(core),
        witnesses=witnesses,
    )
