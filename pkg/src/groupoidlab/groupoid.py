"""Finite topological groupoids and the equivalence relation of a surjection.

A groupoid is stored as its morphism set together with range, source,
composition, inverse, and a finite-space topology on the morphisms; the
unit space always carries the subspace topology.  Construction re-runs
the axioms (associativity over all composable triples, unit and inverse
laws), so a bad composition table or a cocycle fault in an extension
surfaces immediately with a witness.

The central construction is the relation groupoid of a surjection
psi: Y -> X, whose morphisms are the pairs (y, z) with psi(y) = psi(z)
and whose topology is the restriction of the product topology on Y x Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

import numpy as np

from .finspace import (
    FinSpace,
    MapProperties,
    SpaceMap,
    classify_map,
    is_local_homeomorphism,
    quotient_space,
)
from .labels import canonical_label

Morphism = Hashable


class GroupoidAxiomError(ValueError):
    """Raised when the structure maps fail a groupoid axiom."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NonPrincipalError(ValueError):
    code = "NON_PRINCIPAL"


class FinGroupoid:
    """A finite topological groupoid."""

    def __init__(
        self,
        topology: FinSpace,
        units: Iterable[Morphism],
        range_map: Mapping[Morphism, Morphism],
        source_map: Mapping[Morphism, Morphism],
        compose: Mapping[tuple, Morphism],
        inverse: Mapping[Morphism, Morphism],
        *,
        verify: bool = True,
    ):
        self.topology = topology
        self.morphisms = topology.points
        self.units = frozenset(units)
        self.range_map = dict(range_map)
        self.source_map = dict(source_map)
        self.compose = dict(compose)
        self.inverse = dict(inverse)
        self._props_cache = None
        if verify:
            self.verify_axioms()

    # -- accessors -------------------------------------------------------

    def r(self, m: Morphism) -> Morphism:
        return self.range_map[m]

    def s(self, m: Morphism) -> Morphism:
        return self.source_map[m]

    def inv(self, m: Morphism) -> Morphism:
        return self.inverse[m]

    def mul(self, a: Morphism, b: Morphism) -> Morphism:
        return self.compose[(a, b)]

    def composable(self, a: Morphism, b: Morphism) -> bool:
        return self.source_map[a] == self.range_map[b]

    def s_fiber(self, u: Morphism) -> tuple:
        return tuple(m for m in self.morphisms if self.source_map[m] == u)

    def r_fiber(self, u: Morphism) -> tuple:
        return tuple(m for m in self.morphisms if self.range_map[m] == u)

    def unit_space(self) -> FinSpace:
        return self.topology.subspace([m for m in self.morphisms if m in self.units])

    def unit_at(self, u: Morphism) -> Morphism:
        return u

    def orbits(self) -> list[tuple]:
        """Orbits of the unit space: u ~ v when some morphism joins them."""
        units = [m for m in self.morphisms if m in self.units]
        idx = {u: i for i, u in enumerate(units)}
        parent = list(range(len(units)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for m in self.morphisms:
            a, b = find(idx[self.range_map[m]]), find(idx[self.source_map[m]])
            if a != b:
                parent[a] = b
        groups: dict = {}
        for u in units:
            groups.setdefault(find(idx[u]), []).append(u)
        return [tuple(g) for g in sorted(groups.values(), key=lambda g: idx[g[0]])]

    def composable_pairs(self) -> list[tuple]:
        return [
            (a, b)
            for a in self.morphisms
            for b in self.morphisms
            if self.source_map[a] == self.range_map[b]
        ]

    def composable_triples(self):
        by_range: dict = {}
        for b in self.morphisms:
            by_range.setdefault(self.range_map[b], []).append(b)
        for a in self.morphisms:
            for b in by_range.get(self.source_map[a], ()):
                for c in by_range.get(self.source_map[b], ()):
                    yield a, b, c

    # -- validation --------------------------------------------------------

    def verify_axioms(self) -> None:
        morphs = self.morphisms
        mset = set(morphs)
        n = len(morphs)
        index = {m: i for i, m in enumerate(morphs)}
        for m in morphs:
            for table, name in ((self.range_map, "range"), (self.source_map, "source"), (self.inverse, "inverse")):
                if m not in table:
                    raise GroupoidAxiomError(f"{name} undefined on {m!r}", m)
                if table[m] not in mset:
                    raise GroupoidAxiomError(f"{name}({m!r}) is not a morphism", m)
        for u in self.units:
            if u not in mset:
                raise GroupoidAxiomError(f"unit {u!r} is not a morphism", u)
            if self.range_map[u] != u or self.source_map[u] != u:
                raise GroupoidAxiomError(f"unit {u!r} is not its own range and source", u)
        for m in morphs:
            if self.range_map[m] not in self.units or self.source_map[m] not in self.units:
                raise GroupoidAxiomError(f"range or source of {m!r} is not a unit", m)

        # integer composition table; -1 marks undefined
        comp = np.full((n, n), -1, dtype=np.int64)
        for (a, b), c in self.compose.items():
            if a not in mset or b not in mset or c not in mset:
                raise GroupoidAxiomError(f"composition entry ({a!r},{b!r})->{c!r} off the morphism set")
            comp[index[a], index[b]] = index[c]
        src = np.array([index[self.source_map[m]] for m in morphs])
        rng = np.array([index[self.range_map[m]] for m in morphs])
        defined = comp >= 0
        should = src[:, None] == rng[None, :]
        if (defined != should).any():
            a, b = (int(v) for v in np.argwhere(defined != should)[0])
            raise GroupoidAxiomError(
                f"composition defined on ({morphs[a]!r},{morphs[b]!r}) iff sources/ranges mismatch",
                (morphs[a], morphs[b]),
            )
        pa, pb = np.nonzero(defined)
        pc = comp[pa, pb]
        if (rng[pc] != rng[pa]).any() or (src[pc] != src[pb]).any():
            bad = int(np.argwhere((rng[pc] != rng[pa]) | (src[pc] != src[pb]))[0, 0])
            raise GroupoidAxiomError(
                "range/source of a composite disagree with the factors",
                (morphs[int(pa[bad])], morphs[int(pb[bad])]),
            )

        # unit laws
        unit_idx = np.array(sorted(index[u] for u in self.units))
        for ui in unit_idx:
            row = comp[ui]
            cols = np.nonzero(row >= 0)[0]
            if (row[cols] != cols).any():
                b = int(cols[int(np.argwhere(row[cols] != cols)[0, 0])])
                raise GroupoidAxiomError(f"left unit law fails at ({morphs[ui]!r},{morphs[b]!r})")
            col = comp[:, ui]
            rows = np.nonzero(col >= 0)[0]
            if (col[rows] != rows).any():
                a = int(rows[int(np.argwhere(col[rows] != rows)[0, 0])])
                raise GroupoidAxiomError(f"right unit law fails at ({morphs[a]!r},{morphs[ui]!r})")

        # associativity over all composable triples, via a join on the
        # middle morphism
        succ = [np.nonzero(defined[b])[0] for b in range(n)]
        counts = np.array([len(succ[int(b)]) for b in pb])
        if counts.sum():
            a_rep = np.repeat(pa, counts)
            ab_rep = np.repeat(pc, counts)
            c_all = np.concatenate([succ[int(b)] for b in pb])
            b_rep = np.repeat(pb, counts)
            bc = comp[b_rep, c_all]
            lhs = comp[ab_rep, c_all]
            rhs = comp[a_rep, bc]
            if (lhs != rhs).any() or (lhs < 0).any():
                bad = int(np.argwhere((lhs != rhs) | (lhs < 0))[0, 0])
                triple = (morphs[int(a_rep[bad])], morphs[int(b_rep[bad])], morphs[int(c_all[bad])])
                raise GroupoidAxiomError(
                    f"associativity fails at triple {triple!r}", triple
                )

        # inverse laws
        inv = np.array([index[self.inverse[m]] for m in morphs])
        if (inv[inv] != np.arange(n)).any():
            m = int(np.argwhere(inv[inv] != np.arange(n))[0, 0])
            raise GroupoidAxiomError(f"inverse is not involutive at {morphs[m]!r}", morphs[m])
        if (src[inv] != rng).any() or (rng[inv] != src).any():
            m = int(np.argwhere((src[inv] != rng) | (rng[inv] != src))[0, 0])
            raise GroupoidAxiomError(f"inverse swaps range and source incorrectly at {morphs[m]!r}", morphs[m])
        left = comp[np.arange(n), inv]
        if (left != rng).any():
            m = int(np.argwhere(left != rng)[0, 0])
            raise GroupoidAxiomError(f"m * inv(m) is not the unit at range({morphs[m]!r})", morphs[m])
        right = comp[inv, np.arange(n)]
        if (right != src).any():
            m = int(np.argwhere(right != src)[0, 0])
            raise GroupoidAxiomError(f"inv(m) * m is not the unit at source({morphs[m]!r})", morphs[m])


    # -- representation -----------------------------------------------------

    def __len__(self):
        return len(self.morphisms)

    def __repr__(self):
        return f"<FinGroupoid with {len(self.morphisms)} morphisms, {len(self.units)} units>"


class RelationGroupoid(FinGroupoid):
    """The groupoid of pairs identified by a surjection psi: Y -> X.

    Morphisms are pairs (y, z) with psi(y) = psi(z); r(y, z) = (y, y),
    s(y, z) = (z, z), (x, y)(y, z) = (x, z).  The base space Y and psi
    are retained so that orbit-space constructions can use the base
    topology even when a caller deliberately installs a different
    topology on the morphisms (the mismatch is what the openness test
    detects).
    """

    def __init__(self, base: FinSpace, psi: SpaceMap, topology: FinSpace, *, verify: bool = True):
        self.base = base
        self.psi = psi
        pairs = topology.points
        units = [(y, y) for (y, z) in pairs if y == z]
        range_map = {(y, z): (y, y) for (y, z) in pairs}
        source_map = {(y, z): (z, z) for (y, z) in pairs}
        inverse = {(y, z): (z, y) for (y, z) in pairs}
        pair_set = set(pairs)
        by_first: dict = {}
        for (y, z) in pairs:
            by_first.setdefault(y, []).append((y, z))
        compose = {}
        for (x, y) in pairs:
            for b in by_first.get(y, ()):
                compose[((x, y), b)] = (x, b[1])
        for key, val in compose.items():
            if val not in pair_set:
                raise GroupoidAxiomError("composite pair escapes the relation", key)
        super().__init__(topology, units, range_map, source_map, compose, inverse, verify=verify)

    def with_topology(self, topology: FinSpace) -> "RelationGroupoid":
        """Same algebraic groupoid with a different morphism topology."""
        if set(topology.points) != set(self.morphisms):
            raise ValueError("topology must be on the same morphism set")
        return RelationGroupoid(self.base, self.psi, topology)

    def with_discrete_topology(self) -> "RelationGroupoid":
        return self.with_topology(
            FinSpace(self.morphisms, {m: {m} for m in self.morphisms})
        )


def build_relation_groupoid(psi: SpaceMap) -> RelationGroupoid:
    """Build the relation groupoid of a surjection with the product-subspace
    topology: the minimal open at (y, z) is (U_y x U_z) intersected with
    the relation.  Axioms are re-verified on the result."""
    if not psi.is_surjective():
        raise ValueError("psi must be surjective")
    base = psi.dom
    fibers: dict = {}
    for y in base.points:
        fibers.setdefault(psi(y), []).append(y)
    pairs = [(y, z) for fib in fibers.values() for y in fib for z in fib]
    pair_set = set(pairs)
    min_open_list = {p: tuple(base.min_open(p)) for p in base.points}
    mo = {}
    for (y, z) in pairs:
        mo[(y, z)] = {
            (a, b)
            for a in min_open_list[y]
            for b in min_open_list[z]
            if (a, b) in pair_set
        }
    topology = FinSpace(pairs, mo)
    return RelationGroupoid(base, psi, topology)


def _orbit_base(groupoid: FinGroupoid):
    """Space to quotient for the orbit space, with unit labels.

    For a relation groupoid the retained base Y is used (its points are in
    canonical bijection u = (y, y) <-> y with the units, and for the
    untampered product-subspace topology the two agree); otherwise the
    unit space with its subspace topology.
    """
    if isinstance(groupoid, RelationGroupoid):
        return groupoid.base, {u: u[0] for u in groupoid.units}
    return groupoid.unit_space(), {u: u for u in groupoid.units}


def orbit_space(groupoid: FinGroupoid):
    """Quotient of the unit space by the orbit relation.

    Returns (X, q).  For an etale groupoid the quotient map is also open;
    this is asserted whenever the etale property holds.
    """
    base, label = _orbit_base(groupoid)
    partition = [frozenset(label[u] for u in orbit) for orbit in groupoid.orbits()]
    space, q = quotient_space(base, partition)
    if groupoid_properties(groupoid).etale and not classify_map(q).open_map:
        raise AssertionError("internal error: etale groupoid with non-open orbit map")
    return space, q


@dataclass(frozen=True)
class WanderingWitness:
    unit: Morphism
    neighbourhood: frozenset
    saturation: frozenset
    closure: frozenset
    compact: bool


@dataclass(frozen=True)
class GroupoidProperties:
    principal: bool
    etale: bool
    cartan_literal: bool
    cartan_trace: tuple[WanderingWitness, ...]

    def as_dict(self) -> dict:
        return {
            "principal": self.principal,
            "etale": self.etale,
            "cartan_literal": self.cartan_literal,
        }


def groupoid_properties(groupoid: FinGroupoid) -> GroupoidProperties:
    """Principality, the etale property, and the literal Cartan condition.

    etale means the range map is a local homeomorphism onto the unit
    space; the check delegates to the finite-space map classifier.  The
    literal Cartan condition (every unit has a wandering neighbourhood
    with relatively compact saturation) always holds at finite scale; it
    is computed anyway, with one witness per unit, because the meaningful
    finite surrogate is the separate r x s openness test.
    """
    if groupoid._props_cache is not None:
        return groupoid._props_cache
    pairs = {(groupoid.range_map[m], groupoid.source_map[m]) for m in groupoid.morphisms}
    principal = len(pairs) == len(groupoid.morphisms)

    units_ordered = [m for m in groupoid.morphisms if m in groupoid.units]
    unit_space = groupoid.topology.subspace(units_ordered)
    r_map = SpaceMap(
        groupoid.topology, unit_space, {m: groupoid.range_map[m] for m in groupoid.morphisms}
    )
    etale = is_local_homeomorphism(r_map)

    trace = []
    for u in units_ordered:
        nb = unit_space.min_open(u)
        sat = frozenset(
            m
            for m in groupoid.morphisms
            if groupoid.source_map[m] in nb and groupoid.range_map[m] in nb
        )
        closure = groupoid.topology.closure(sat)
        trace.append(WanderingWitness(u, nb, sat, closure, compact=True))
    cartan = all(w.compact for w in trace)
    props = GroupoidProperties(principal, etale, cartan, tuple(trace))
    groupoid._props_cache = props
    return props


@dataclass(frozen=True)
class FellCheck:
    is_fell_model: bool
    r_times_s_open: bool
    r_times_s_continuous: bool
    bijective: bool
    witness: frozenset | None

    def as_dict(self) -> dict:
        return {
            "is_fell_model": self.is_fell_model,
            "r_times_s_open": self.r_times_s_open,
            "r_times_s_continuous": self.r_times_s_continuous,
            "bijective": self.bijective,
            "witness": None if self.witness is None else sorted(map(canonical_label, self.witness)),
        }


def fell_check(groupoid: FinGroupoid) -> FellCheck:
    """Decide whether r x s is a topological isomorphism onto R(q).

    R(q) is the relation groupoid of the orbit quotient q, carrying the
    product topology of the unit space restricted to the relation.  For a
    principal groupoid r x s is automatically a bijection onto R(q); the
    content is whether it is continuous and open.  On failure the witness
    is a minimal open of the groupoid whose image is not open.
    """
    props = groupoid_properties(groupoid)
    if not props.principal:
        raise NonPrincipalError("fell_check requires a principal groupoid")
    base, label = _orbit_base(groupoid)
    orbit_of = {}
    for k, orbit in enumerate(groupoid.orbits()):
        for u in orbit:
            orbit_of[label[u]] = k
    classes: dict = {}
    for y in base.points:
        classes.setdefault(orbit_of[y], []).append(y)
    rq_pairs = [(y, z) for cls in classes.values() for y in cls for z in cls]
    rq_set = set(rq_pairs)
    min_open_list = {p: tuple(base.min_open(p)) for p in base.points}
    mo = {}
    for (y, z) in rq_pairs:
        mo[(y, z)] = {
            (a, b)
            for a in min_open_list[y]
            for b in min_open_list[z]
            if (a, b) in rq_set
        }
    rq_topology = FinSpace(rq_pairs, mo)
    assignment = {
        m: (label[groupoid.range_map[m]], label[groupoid.source_map[m]])
        for m in groupoid.morphisms
    }
    bijective = len(set(assignment.values())) == len(groupoid.morphisms) and len(
        groupoid.morphisms
    ) == len(rq_pairs)
    rxs = SpaceMap(groupoid.topology, rq_topology, assignment)
    continuous = True
    open_map = True
    witness = None
    for i, m in enumerate(groupoid.morphisms):
        mo_bits = groupoid.topology.min_open_bits(i)
        img = rxs.image_bits(mo_bits)
        if img & ~rq_topology.min_open_bits(rq_topology.index(assignment[m])):
            continuous = False
        if not rq_topology.is_open_bits(img):
            open_map = False
            if witness is None:
                witness = groupoid.topology.unbits(mo_bits)
    return FellCheck(
        is_fell_model=bijective and continuous and open_map,
        r_times_s_open=open_map,
        r_times_s_continuous=continuous,
        bijective=bijective,
        witness=witness,
    )


@dataclass(frozen=True)
class OrbitMapReport:
    bijective: bool
    compatible_with_projection: bool
    open_when_continuous: bool | None
    homeomorphism_when_quotient: bool | None
    psi_properties: MapProperties

    @property
    def all_verified(self) -> bool:
        return (
            self.bijective
            and self.compatible_with_projection
            and self.open_when_continuous is not False
            and self.homeomorphism_when_quotient is not False
        )

    def as_dict(self) -> dict:
        return {
            "bijective": self.bijective,
            "compatible_with_projection": self.compatible_with_projection,
            "open_when_continuous": self.open_when_continuous,
            "homeomorphism_when_quotient": self.homeomorphism_when_quotient,
            "psi_properties": self.psi_properties.as_dict(),
            "all_verified": self.all_verified,
        }


def orbit_map_check(psi: SpaceMap) -> OrbitMapReport:
    """Verify that x -> psi^{-1}(x) identifies the codomain with the orbit
    space of the relation groupoid of psi.

    Checks, in order: the map h is a bijection and h o psi is the orbit
    projection; if psi is continuous, h is open; if psi is a quotient
    map, h is a homeomorphism.  All clauses hold for every surjection;
    a False entry would indicate an implementation bug.
    """
    if not psi.is_surjective():
        raise ValueError("psi must be surjective")
    relation = build_relation_groupoid(psi)
    space, q = orbit_space(relation)
    fibers = {}
    for y in psi.dom.points:
        fibers.setdefault(psi(y), set()).add(y)
    h = {x: frozenset(fibers[x]) for x in psi.cod.points}
    bijective = set(h.values()) == set(space.points) and len(set(h.values())) == len(
        psi.cod.points
    )
    compatible = all(h[psi(y)] == q(y) for y in psi.dom.points)
    props = classify_map(psi)
    open_clause = None
    homeo_clause = None
    if bijective:
        h_map = SpaceMap(psi.cod, space, h)
        h_props = classify_map(h_map)
        if props.continuous:
            open_clause = h_props.open_map
        if props.quotient:
            homeo_clause = h_props.open_map and h_props.continuous and h_props.surjective
    return OrbitMapReport(bijective, compatible, open_clause, homeo_clause, props)
