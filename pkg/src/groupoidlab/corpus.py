"""Deterministic corpora of small spaces, maps, graphs and cochains.

Exhaustive generators drive the equivalence suites (every topology on a
few points, every partition); the random generators are seeded so that
verification runs are reproducible, and the CLI reads the seed from the
GROUPOIDLAB_SEED environment variable.
"""

from __future__ import annotations

import os
import random
from functools import lru_cache

from .finspace import FinSpace, SpaceMap, discrete

SEED_ENV_VAR = "GROUPOIDLAB_SEED"


def env_seed(default: int = 0) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


@lru_cache(maxsize=None)
def _topology_relations(n: int) -> tuple:
    """All reflexive transitive relations on range(n), as row bitmasks.

    A finite topology is the same thing as such a relation via
    U_x = {y : rel[x] has bit y}.
    """
    if n == 0:
        return ((),)
    out = []
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for choice in range(1 << len(pairs)):
        rows = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if (choice >> k) & 1:
                rows[i] |= 1 << j
        ok = True
        for i in range(n):
            m = rows[i]
            acc = m
            for j in range(n):
                if (m >> j) & 1:
                    acc |= rows[j]
            if acc != m:
                ok = False
                break
        if ok:
            out.append(tuple(rows))
    return tuple(out)


def all_topologies(n: int) -> list[FinSpace]:
    """Every topology on the labelled point set 0..n-1."""
    spaces = []
    pts = tuple(range(n))
    for rows in _topology_relations(n):
        mo = {i: {j for j in range(n) if (rows[i] >> j) & 1} for i in pts}
        spaces.append(FinSpace(pts, mo))
    return spaces


def all_partitions(points) -> list[list[frozenset]]:
    """Every partition of a finite iterable, in a deterministic order."""
    pts = list(points)
    if not pts:
        return [[]]
    first, rest = pts[0], pts[1:]
    out = []
    for sub in all_partitions(rest):
        out.append([frozenset({first})] + sub)
        for k in range(len(sub)):
            widened = list(sub)
            widened[k] = sub[k] | {first}
            out.append(widened)
    return out


def random_space(seed: int, max_points: int) -> FinSpace:
    """A random finite space with 1..max_points points."""
    rng = random.Random(seed)
    n = rng.randint(1, max_points)
    pts = tuple(range(n))
    # random preorder: close a random relation reflexively and transitively
    rows = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.3:
                rows[i] |= 1 << j
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = rows[i]
            for j in range(n):
                if (rows[i] >> j) & 1:
                    acc |= rows[j]
            if acc != rows[i]:
                rows[i] = acc
                changed = True
    mo = {i: {j for j in range(n) if (rows[i] >> j) & 1} for i in pts}
    return FinSpace(pts, mo)


def random_surjection(rng: random.Random, dom: FinSpace, cod_size: int) -> SpaceMap:
    """A random surjection from dom onto a random-topology codomain."""
    n = len(dom.points)
    cod_size = min(cod_size, n)
    cod = rng.choice(all_topologies(cod_size))
    targets = list(range(cod_size)) + [rng.randrange(cod_size) for _ in range(n - cod_size)]
    rng.shuffle(targets)
    return SpaceMap(dom, cod, {p: targets[i] for i, p in enumerate(dom.points)})


def random_partition(rng: random.Random, points) -> list[set]:
    pts = list(points)
    k = rng.randint(1, len(pts))
    blocks: list[set] = [set() for _ in range(k)]
    for i, p in enumerate(pts):
        if i < k:
            blocks[i].add(p)
        else:
            blocks[rng.randrange(k)].add(p)
    return [b for b in blocks if b]


def random_discrete_surjection(rng: random.Random, n: int) -> SpaceMap:
    """Random surjection between discrete spaces, as a quotient of a partition."""
    dom = discrete(tuple(range(n)))
    blocks = random_partition(rng, dom.points)
    cod = discrete(tuple(range(len(blocks))))
    assignment = {}
    for k, b in enumerate(blocks):
        for p in b:
            assignment[p] = k
    return SpaceMap(dom, cod, assignment)


def random_dag(rng: random.Random, n_vertices: int, edge_prob: float = 0.35):
    """A random acyclic directed graph as (vertices, edges).

    Edges are triples (id, range_vertex, source_vertex) oriented so that
    the vertex order is a topological order for the path direction.
    """
    vertices = [f"v{i}" for i in range(n_vertices)]
    edges = []
    eid = 0
    for i in range(n_vertices):
        for j in range(i + 1, n_vertices):
            while rng.random() < edge_prob:
                edges.append((f"e{eid}", vertices[i], vertices[j]))
                eid += 1
                if rng.random() < 0.7:
                    break
    return vertices, edges
