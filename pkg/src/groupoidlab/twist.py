"""Cocycles with values in Z/n on finite groupoids, and Cech data on covers.

The circle is replaced by the n-th roots of unity throughout: a cocycle
entry k stands for exp(2*pi*i*k/n).  That keeps every cohomological
question exact and decidable by linear algebra mod n, at the price of a
stated approximation order.

Contents: verification of the 2-cocycle identity, coboundaries of
unit-normalized 1-cochains, a decision procedure for cohomologousness,
the central extension groupoid Z_n x G with twisted multiplication, and
alternating Cech cocycles on finite covers with a coboundary decision
that returns either a witness or an unsolvability certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .finspace import FinSpace
from .groupoid import FinGroupoid, GroupoidAxiomError, groupoid_properties
from .modlin import solve_mod


class CocycleError(ValueError):
    def __init__(self, message, code=None):
        super().__init__(message)
        self.code = code


class CechError(ValueError):
    def __init__(self, message, code=None):
        super().__init__(message)
        self.code = code


class TwoCocycle:
    """A normalized Z/n-valued 2-cocycle on the composable pairs of a
    finite groupoid, stored additively."""

    def __init__(self, groupoid: FinGroupoid, n: int, table: Mapping[tuple, int]):
        if n < 1:
            raise CocycleError("cocycle order must be positive")
        self.groupoid = groupoid
        self.n = n
        self.table = {pair: value % n for pair, value in table.items()}
        for (a, b) in self.table:
            if not groupoid.composable(a, b):
                raise CocycleError(f"table entry on non-composable pair ({a!r},{b!r})")

    @classmethod
    def trivial(cls, groupoid: FinGroupoid, n: int = 1) -> "TwoCocycle":
        return cls(groupoid, n, {pair: 0 for pair in groupoid.composable_pairs()})

    def value(self, a, b) -> int:
        try:
            return self.table[(a, b)]
        except KeyError:
            raise CocycleError(
                f"cocycle table missing composable pair ({a!r},{b!r})", code="MISSING_ENTRY"
            )

    def conjugate(self) -> "TwoCocycle":
        return TwoCocycle(self.groupoid, self.n, {p: -v for p, v in self.table.items()})

    def shift(self, pair: tuple, delta: int) -> "TwoCocycle":
        """Copy with one entry perturbed; used for fault injection."""
        table = dict(self.table)
        table[pair] = (table.get(pair, 0) + delta) % self.n
        return TwoCocycle(self.groupoid, self.n, table)

    def same_footing(self, other: "TwoCocycle") -> bool:
        return self.groupoid is other.groupoid and self.n == other.n

    def __eq__(self, other):
        return (
            isinstance(other, TwoCocycle)
            and self.same_footing(other)
            and self.table == other.table
        )


class OneCochain:
    """A Z/n-valued function on morphisms vanishing on units."""

    def __init__(self, groupoid: FinGroupoid, n: int, values: Mapping[Hashable, int]):
        self.groupoid = groupoid
        self.n = n
        self.values = {m: 0 for m in groupoid.morphisms}
        for m, v in values.items():
            if m not in self.values:
                raise CocycleError(f"cochain value on unknown morphism {m!r}")
            self.values[m] = v % n
        for u in groupoid.units:
            if self.values[u] % n:
                raise CocycleError(f"cochain does not vanish on unit {u!r}")

    def __call__(self, m) -> int:
        return self.values[m]


@dataclass(frozen=True)
class CocycleReport:
    valid: bool
    normalization_violations: tuple
    identity_violations: tuple

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "normalization_violations": [list(map(str, v)) for v in self.normalization_violations],
            "identity_violations": [list(map(str, v)) for v in self.identity_violations],
        }


def verify_two_cocycle(sigma: TwoCocycle) -> CocycleReport:
    """Check normalization on unit-adjacent pairs and the cocycle identity

        sigma(a,b) + sigma(ab,c) = sigma(b,c) + sigma(a,bc)   (mod n)

    on every composable triple.  Missing table entries raise with code
    MISSING_ENTRY; violations are collected into the report.
    """
    g = sigma.groupoid
    n = sigma.n
    norm_bad = []
    for m in g.morphisms:
        if sigma.value(g.r(m), m) % n:
            norm_bad.append((g.r(m), m))
        if sigma.value(m, g.s(m)) % n:
            norm_bad.append((m, g.s(m)))
    ident_bad = []
    for a, b, c in g.composable_triples():
        lhs = sigma.value(a, b) + sigma.value(g.mul(a, b), c)
        rhs = sigma.value(b, c) + sigma.value(a, g.mul(b, c))
        if (lhs - rhs) % n:
            ident_bad.append((a, b, c))
    return CocycleReport(not norm_bad and not ident_bad, tuple(norm_bad), tuple(ident_bad))


def coboundary_twist(b: OneCochain) -> TwoCocycle:
    """The coboundary  (db)(a, c) = b(a) + b(c) - b(ac)  of a 1-cochain.

    Normalization is automatic because b vanishes on units.
    """
    g = b.groupoid
    table = {
        (x, y): b(x) + b(y) - b(g.mul(x, y))
        for (x, y) in g.composable_pairs()
    }
    return TwoCocycle(g, b.n, table)


def _principal_witness(diff: TwoCocycle) -> OneCochain | None:
    """Explicit untwisting cochain for a principal groupoid.

    In a principal groupoid pick a base unit u0 per orbit and let beta(v)
    be the unique morphism v -> u0; then b(m) := d(m, beta(s(m))) solves
    db = d, by the cocycle identity applied to (m, m', beta) triples.
    """
    g = diff.groupoid
    by_pair = {(g.r(m), g.s(m)): m for m in g.morphisms}
    to_base = {}
    for orbit in g.orbits():
        u0 = orbit[0]
        for v in orbit:
            to_base[v] = by_pair[(v, u0)]
    values = {m: diff.value(m, to_base[g.s(m)]) for m in g.morphisms}
    b = OneCochain(g, diff.n, values)
    if coboundary_twist(b) == diff:
        return b
    return None  # pragma: no cover - the construction always satisfies db = d


def are_cohomologous(sigma1: TwoCocycle, sigma2: TwoCocycle) -> OneCochain | None:
    """Return a 1-cochain b with sigma1 = sigma2 + db, or None.

    For principal groupoids the witness is constructed directly (second
    cohomology of an equivalence relation vanishes); in general the
    defining equations b(x) + b(y) - b(xy) = (sigma1 - sigma2)(x, y) are
    solved as a linear system over Z/n in the non-unit values of b.
    """
    if not sigma1.same_footing(sigma2):
        raise CocycleError("cocycles live on different groupoids or orders")
    g = sigma1.groupoid
    n = sigma1.n
    diff = TwoCocycle(
        g, n, {p: sigma1.value(*p) - sigma2.value(*p) for p in g.composable_pairs()}
    )
    if groupoid_properties(g).principal:
        witness = _principal_witness(diff)
        if witness is not None:
            return witness
    unknowns = [m for m in g.morphisms if m not in g.units]
    col = {m: i for i, m in enumerate(unknowns)}
    rows, rhs = [], []
    for (x, y) in g.composable_pairs():
        row = [0] * len(unknowns)
        for m, c in ((x, 1), (y, 1), (g.mul(x, y), -1)):
            if m in col:
                row[col[m]] += c
        rows.append(row)
        rhs.append(diff.value(x, y))
    if not unknowns:
        if any(v % n for v in rhs):
            return None
        return OneCochain(g, n, {})
    res = solve_mod(rows, rhs, n)
    if not res.solvable:
        return None
    b = OneCochain(g, n, {m: res.solution[i] for m, i in col.items()})
    assert coboundary_twist(b) == diff
    return b


def extension_groupoid(groupoid: FinGroupoid, sigma: TwoCocycle) -> FinGroupoid:
    """The central extension Z_n x G with multiplication twisted by sigma:

        (w, a)(z, b) = (w + z + sigma(a, b), ab)
        (z, a)^{-1}  = (-z - sigma(a, a^{-1}), a^{-1})

    The morphism topology is the product of discrete Z_n with the
    topology of G.  Associativity of the result is equivalent to the
    cocycle identity and is re-verified rather than assumed, so an
    invalid sigma fails here with the violating triple.
    """
    if sigma.groupoid is not groupoid:
        raise CocycleError("cocycle is not defined on this groupoid")
    report = verify_two_cocycle(sigma)
    n = sigma.n
    morphs = [(z, m) for z in range(n) for m in groupoid.morphisms]
    mo = {
        (z, m): {(z, m2) for m2 in groupoid.topology.min_open(m)}
        for (z, m) in morphs
    }
    topology = FinSpace(morphs, mo)
    units = [(0, u) for u in groupoid.units]
    range_map = {(z, m): (0, groupoid.r(m)) for (z, m) in morphs}
    source_map = {(z, m): (0, groupoid.s(m)) for (z, m) in morphs}
    inverse = {
        (z, m): ((-z - sigma.value(m, groupoid.inv(m))) % n, groupoid.inv(m))
        for (z, m) in morphs
    }
    compose = {}
    for (a, b) in groupoid.composable_pairs():
        for w in range(n):
            for z in range(n):
                compose[((w, a), (z, b))] = ((w + z + sigma.value(a, b)) % n, groupoid.mul(a, b))
    ext = FinGroupoid(topology, units, range_map, source_map, compose, inverse)
    if not report.valid:  # pragma: no cover - verify_axioms raises first
        raise GroupoidAxiomError("invalid cocycle produced an associative extension")
    return ext


# -- Cech data on finite covers ------------------------------------------------


def _sort_with_sign(triple):
    """Sort a triple of indices, returning (sorted_triple, permutation_sign);
    sign 0 if any index repeats."""
    i, j, k = triple
    if i == j or j == k or i == k:
        return tuple(sorted(triple)), 0
    perm = sorted(range(3), key=lambda t: triple[t])
    inversions = sum(
        1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b]
    )
    return tuple(sorted(triple)), (-1) ** inversions


class CechData:
    """An alternating Z/n-valued assignment on the triple overlaps of a
    finite cover, constant on each overlap.

    ``entries`` may list triples in any index order; they are reduced to
    sorted triples by the sign rule.  Inconsistent orientations or
    nonzero values on repeated indices are kept for verify_cech to
    report rather than silently fixed.
    """

    def __init__(self, n: int, base_points: Iterable, cover: Mapping[int, Iterable], entries):
        if n < 1:
            raise CechError("coefficient order must be positive")
        self.n = n
        self.base_points = tuple(base_points)
        base_set = set(self.base_points)
        self.cover = {}
        for idx, part in cover.items():
            part = frozenset(part)
            if not part <= base_set:
                raise CechError(f"cover set {idx} is not a subset of the base")
            self.cover[int(idx)] = part
        self.indices = tuple(sorted(self.cover))
        self.raw_entries = tuple((int(i), int(j), int(k), int(v) % n) for (i, j, k, v) in entries)
        self.table = {}
        self.conflicts = []
        self.repeated_nonzero = []
        for (i, j, k, v) in self.raw_entries:
            key, sign = _sort_with_sign((i, j, k))
            if sign == 0:
                if v % n:
                    self.repeated_nonzero.append((i, j, k, v))
                continue
            canon = (sign * v) % n
            if key in self.table and self.table[key] != canon:
                self.conflicts.append((key, self.table[key], canon))
            else:
                self.table[key] = canon

    @property
    def index_count(self) -> int:
        return len(self.indices)

    def overlap(self, *indices) -> frozenset:
        out = None
        for i in indices:
            part = self.cover[i]
            out = part if out is None else out & part
        return out if out is not None else frozenset(self.base_points)

    def value(self, i: int, j: int, k: int) -> int:
        key, sign = _sort_with_sign((i, j, k))
        if sign == 0:
            return 0
        if key not in self.table:
            if self.overlap(*key):
                raise CechError(
                    f"lambda missing on triple {key} with nonempty overlap",
                    code="MISSING_TRIPLE",
                )
            return 0
        return (sign * self.table[key]) % self.n


@dataclass(frozen=True)
class CechReport:
    valid: bool
    antisymmetry_violations: tuple
    repeated_index_violations: tuple
    missing_triples: tuple
    cocycle_violations: tuple

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "antisymmetry_violations": [list(v[0]) for v in self.antisymmetry_violations],
            "repeated_index_violations": [list(v[:3]) for v in self.repeated_index_violations],
            "missing_triples": [list(t) for t in self.missing_triples],
            "cocycle_violations": [list(q) for q in self.cocycle_violations],
        }


def verify_cech(data: CechData) -> CechReport:
    """Check that the data is an alternating cocycle: antisymmetric under
    index transpositions, zero on repeated indices, with d(lambda) = 0

        lambda(j,k,l) - lambda(i,k,l) + lambda(i,j,l) - lambda(i,j,k) = 0

    on every nonempty quadruple overlap.  Triples with nonempty overlap
    but no table entry are reported as missing.
    """
    missing = []
    for key in itertools.combinations(data.indices, 3):
        if data.overlap(*key) and key not in data.table:
            missing.append(key)
    quad_bad = []
    if not missing and not data.conflicts:
        for (i, j, k, l) in itertools.combinations(data.indices, 4):
            if not data.overlap(i, j, k, l):
                continue
            total = (
                data.value(j, k, l)
                - data.value(i, k, l)
                + data.value(i, j, l)
                - data.value(i, j, k)
            )
            if total % data.n:
                quad_bad.append((i, j, k, l))
    return CechReport(
        valid=not (data.conflicts or data.repeated_nonzero or missing or quad_bad),
        antisymmetry_violations=tuple(data.conflicts),
        repeated_index_violations=tuple(data.repeated_nonzero),
        missing_triples=tuple(missing),
        cocycle_violations=tuple(quad_bad),
    )


@dataclass(frozen=True)
class CechCoboundaryResult:
    is_coboundary: bool
    witness: dict | None
    certificate: dict | None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "is_coboundary": self.is_coboundary,
            "witness": None
            if self.witness is None
            else {f"{i},{j}": v for (i, j), v in sorted(self.witness.items())},
            "certificate": None
            if self.certificate is None
            else {f"{i},{j},{k}": c for (i, j, k), c in sorted(self.certificate.items())},
            "note": self.note,
        }


def cech_is_coboundary(data: CechData) -> CechCoboundaryResult:
    """Decide whether lambda = d(mu) for constants mu_ij on the pairwise
    overlaps, solving   lambda_ijk = mu_jk - mu_ik + mu_ij   (mod n).

    Returns a witness mu, or a certificate: coefficients u_T on the
    triple equations with  sum u_T * (d mu)_T = 0  identically while
    sum u_T * lambda_T != 0 (mod n), which proves unsolvability.  The
    certificate speaks about the combinatorial nerve class with constant
    coefficients; no claim is made about finer coefficient systems.
    """
    report = verify_cech(data)
    if not report.valid:
        raise CechError("cech data does not verify; run verify_cech for details")
    triples = [
        key for key in itertools.combinations(data.indices, 3) if data.overlap(*key)
    ]
    pairs = [
        key
        for key in itertools.combinations(data.indices, 2)
        if data.overlap(*key)
    ]
    col = {p: i for i, p in enumerate(pairs)}
    rows, rhs = [], []
    for (i, j, k) in triples:
        row = [0] * len(pairs)
        for pair, c in (((j, k), 1), ((i, k), -1), ((i, j), 1)):
            if pair in col:
                row[col[pair]] += c
        rows.append(row)
        rhs.append(data.value(i, j, k))
    if not triples:
        return CechCoboundaryResult(True, {p: 0 for p in pairs}, None)
    if not pairs:
        if any(v % data.n for v in rhs):  # pragma: no cover - needs odd covers
            bad = {t: 1 for t, v in zip(triples, rhs) if v % data.n}
            return CechCoboundaryResult(False, None, bad)
        return CechCoboundaryResult(True, {}, None)
    res = solve_mod(rows, rhs, data.n)
    if res.solvable:
        witness = {p: res.solution[i] for p, i in col.items()}
        return CechCoboundaryResult(True, witness, None)
    cert = {t: int(c) for t, c in zip(triples, res.certificate) if c % data.n}
    value = sum(data.value(*t) * c for t, c in cert.items()) % data.n
    note = (
        "signed combination of triple equations eliminates all mu terms "
        f"but evaluates to {value} != 0 mod {data.n} on lambda"
    )
    return CechCoboundaryResult(False, None, cert, note)


def cech_coboundary(data: CechData, mu: Mapping[tuple, int]) -> dict:
    """The Cech coboundary d(mu) on the nonempty triple overlaps."""
    out = {}
    for key in itertools.combinations(data.indices, 3):
        if not data.overlap(*key):
            continue
        i, j, k = key
        out[key] = (
            mu.get((j, k), 0) - mu.get((i, k), 0) + mu.get((i, j), 0)
        ) % data.n
    return out


def cech_to_groupoid_cocycle(data: CechData, doubled) -> TwoCocycle:
    """Transport an alternating Cech cocycle to the relation groupoid of
    the doubled cover space.

    ``doubled`` is the model produced by the cover-algebra constructor:
    its relation groupoid has morphisms ((s, i), (s, j)) and its
    ``extended_value`` evaluates lambda with index 0 reading as a copy of
    index 1.  The groupoid cocycle is

        sigma( ((s,i),(s,j)), ((s,j),(s,k)) ) = -lambda_ijk   (mod n),

    the additive form of conjugation; d(lambda) = 0 makes it a cocycle,
    which is re-verified.
    """
    if doubled.cech is not data:
        raise CechError("doubled model was built from different cech data")
    relation = doubled.relation
    n = data.n
    table = {}
    for (a, b) in relation.composable_pairs():
        (s1, i), (s2, j) = a
        (s3, j2), (s4, k) = b
        table[(a, b)] = (-doubled.extended_value(i, j, k)) % n
    sigma = TwoCocycle(relation, n, table)
    report = verify_two_cocycle(sigma)
    if not report.valid:
        raise CechError(f"transported cocycle fails verification: {report}")
    return sigma
