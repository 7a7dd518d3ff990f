"""Versioned JSON encodings for every value the command line touches.

Each document carries a ``schema`` field like ``finspace/1``.  Emission
is canonical: keys sorted, point identifiers rendered through one label
function, lists in deterministic order, so that parse-then-emit is the
identity on canonical form.  Errors carry a JSON-pointer-style path.
"""

from __future__ import annotations

from typing import Any, Mapping

from .finspace import FinSpace, SpaceMap
from .labels import canonical_label
from .graphfell import DirectedGraph, PeriodicGraph
from .groupoid import FinGroupoid, RelationGroupoid, build_relation_groupoid
from .twist import CechData, TwoCocycle


class SchemaError(ValueError):
    def __init__(self, message: str, path: str = "/"):
        super().__init__(f"{message} (at {path})")
        self.path = path


def _expect(doc: Any, kind: type, path: str):
    if not isinstance(doc, kind):
        raise SchemaError(f"expected {kind.__name__}, got {type(doc).__name__}", path)
    return doc


def _expect_schema(doc: Mapping, names: tuple, path: str) -> str:
    _expect(doc, dict, path)
    tag = doc.get("schema")
    if tag not in names:
        raise SchemaError(f"expected schema in {names}, got {tag!r}", path + "/schema")
    return tag


# -- finite spaces -----------------------------------------------------------


def space_to_json(space: FinSpace) -> dict:
    return {
        "schema": "finspace/1",
        "points": [canonical_label(p) for p in space.points],
        "min_open": {
            canonical_label(p): sorted(canonical_label(q) for q in space.min_open(p))
            for p in space.points
        },
    }


def space_from_json(doc: Mapping, path: str = "/") -> FinSpace:
    _expect_schema(doc, ("finspace/1",), path)
    points = _expect(doc.get("points"), list, path + "/points")
    mo = _expect(doc.get("min_open"), dict, path + "/min_open")
    try:
        return FinSpace(points, {p: set(v) for p, v in mo.items()})
    except ValueError as err:
        raise SchemaError(str(err), path)


def map_to_json(f: SpaceMap) -> dict:
    return {
        "schema": "spacemap/1",
        "dom": space_to_json(f.dom),
        "cod": space_to_json(f.cod),
        "assignment": {
            canonical_label(p): canonical_label(f(p)) for p in f.dom.points
        },
    }


def map_from_json(doc: Mapping, path: str = "/") -> SpaceMap:
    _expect_schema(doc, ("spacemap/1",), path)
    dom = space_from_json(_expect(doc.get("dom"), dict, path + "/dom"), path + "/dom")
    cod = space_from_json(_expect(doc.get("cod"), dict, path + "/cod"), path + "/cod")
    assignment = _expect(doc.get("assignment"), dict, path + "/assignment")
    try:
        return SpaceMap(dom, cod, assignment)
    except ValueError as err:
        raise SchemaError(str(err), path + "/assignment")


# -- groupoids ----------------------------------------------------------------


def groupoid_to_json(groupoid: FinGroupoid) -> dict:
    if isinstance(groupoid, RelationGroupoid):
        return {"schema": "relation_groupoid/1", "psi": map_to_json(groupoid.psi)}
    lab = canonical_label
    return {
        "schema": "fingroupoid/1",
        "topology": space_to_json(groupoid.topology),
        "units": sorted(lab(u) for u in groupoid.units),
        "range": {lab(m): lab(groupoid.r(m)) for m in groupoid.morphisms},
        "source": {lab(m): lab(groupoid.s(m)) for m in groupoid.morphisms},
        "inverse": {lab(m): lab(groupoid.inv(m)) for m in groupoid.morphisms},
        "compose": sorted(
            [lab(a), lab(b), lab(c)] for (a, b), c in groupoid.compose.items()
        ),
    }


def groupoid_from_json(doc: Mapping, path: str = "/") -> FinGroupoid:
    tag = _expect_schema(doc, ("fingroupoid/1", "relation_groupoid/1"), path)
    if tag == "relation_groupoid/1":
        psi = map_from_json(_expect(doc.get("psi"), dict, path + "/psi"), path + "/psi")
        try:
            return build_relation_groupoid(psi)
        except ValueError as err:
            raise SchemaError(str(err), path + "/psi")
    topology = space_from_json(
        _expect(doc.get("topology"), dict, path + "/topology"), path + "/topology"
    )
    compose_rows = _expect(doc.get("compose"), list, path + "/compose")
    compose = {}
    for k, row in enumerate(compose_rows):
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError("compose rows are [a, b, ab]", f"{path}/compose/{k}")
        compose[(row[0], row[1])] = row[2]
    try:
        return FinGroupoid(
            topology,
            units=_expect(doc.get("units"), list, path + "/units"),
            range_map=_expect(doc.get("range"), dict, path + "/range"),
            source_map=_expect(doc.get("source"), dict, path + "/source"),
            compose=compose,
            inverse=_expect(doc.get("inverse"), dict, path + "/inverse"),
        )
    except ValueError as err:
        raise SchemaError(str(err), path)


def morphism_labels(groupoid: FinGroupoid) -> dict:
    out = {}
    for m in groupoid.morphisms:
        lab = canonical_label(m)
        if lab in out:
            raise SchemaError(f"morphism labels collide at {lab!r}")
        out[lab] = m
    return out


def cocycle_to_json(sigma: TwoCocycle) -> dict:
    lab = canonical_label
    return {
        "schema": "two_cocycle/1",
        "n": sigma.n,
        "table": sorted(
            [lab(a), lab(b), int(v)] for (a, b), v in sigma.table.items()
        ),
    }


def cocycle_from_json(doc: Mapping, groupoid: FinGroupoid, path: str = "/") -> TwoCocycle:
    _expect_schema(doc, ("two_cocycle/1",), path)
    n = _expect(doc.get("n"), int, path + "/n")
    labels = morphism_labels(groupoid)
    table = {}
    rows = _expect(doc.get("table"), list, path + "/table")
    for k, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError("table rows are [a, b, value]", f"{path}/table/{k}")
        a, b, v = row
        if a not in labels or b not in labels:
            raise SchemaError(f"unknown morphism in ({a!r},{b!r})", f"{path}/table/{k}")
        table[(labels[a], labels[b])] = int(v)
    try:
        return TwoCocycle(groupoid, n, table)
    except ValueError as err:
        raise SchemaError(str(err), path + "/table")


def twisted_groupoid_to_json(groupoid: FinGroupoid, sigma: TwoCocycle) -> dict:
    return {
        "schema": "twisted_groupoid/1",
        "groupoid": groupoid_to_json(groupoid),
        "cocycle": cocycle_to_json(sigma),
    }


def twisted_groupoid_from_json(doc: Mapping, path: str = "/"):
    _expect_schema(doc, ("twisted_groupoid/1",), path)
    groupoid = groupoid_from_json(
        _expect(doc.get("groupoid"), dict, path + "/groupoid"), path + "/groupoid"
    )
    sigma = cocycle_from_json(
        _expect(doc.get("cocycle"), dict, path + "/cocycle"), groupoid, path + "/cocycle"
    )
    return groupoid, sigma


def element_to_json(element) -> dict:
    lab = canonical_label
    return {
        "schema": "algebra_element/1",
        "coeffs": sorted(
            [lab(m), v.real, v.imag] for m, v in element.coeffs.items()
        ),
    }


def element_from_json(doc: Mapping, groupoid: FinGroupoid, sigma, path: str = "/"):
    from .calgebra import AlgebraElement

    _expect_schema(doc, ("algebra_element/1",), path)
    labels = morphism_labels(groupoid)
    coeffs = {}
    rows = _expect(doc.get("coeffs"), list, path + "/coeffs")
    for k, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 3):
            raise SchemaError("coeff rows are [morphism, re, im]", f"{path}/coeffs/{k}")
        m, re_part, im_part = row
        if m not in labels:
            raise SchemaError(f"unknown morphism {m!r}", f"{path}/coeffs/{k}")
        coeffs[labels[m]] = complex(re_part, im_part)
    return AlgebraElement(groupoid, sigma, coeffs)


# -- cech data -----------------------------------------------------------------


def cech_to_json(data: CechData) -> dict:
    return {
        "schema": "cech/1",
        "n": data.n,
        "base_points": sorted(canonical_label(p) for p in data.base_points),
        "cover": {
            str(i): sorted(canonical_label(p) for p in data.cover[i])
            for i in data.indices
        },
        "lambda": sorted([i, j, k, v] for (i, j, k), v in data.table.items()),
    }


def cech_from_json(doc: Mapping, path: str = "/") -> CechData:
    _expect_schema(doc, ("cech/1",), path)
    n = _expect(doc.get("n"), int, path + "/n")
    base = _expect(doc.get("base_points"), list, path + "/base_points")
    cover_doc = _expect(doc.get("cover"), dict, path + "/cover")
    entries = _expect(doc.get("lambda"), list, path + "/lambda")
    cover = {}
    for key, pts in cover_doc.items():
        try:
            cover[int(key)] = set(_expect(pts, list, f"{path}/cover/{key}"))
        except ValueError:
            raise SchemaError("cover indices must be integers", f"{path}/cover/{key}")
    for k, row in enumerate(entries):
        if not (isinstance(row, list) and len(row) == 4):
            raise SchemaError("lambda rows are [i, j, k, value]", f"{path}/lambda/{k}")
    try:
        return CechData(n, base, cover, [tuple(r) for r in entries])
    except ValueError as err:
        raise SchemaError(str(err), path)


# -- graphs -------------------------------------------------------------------


def digraph_to_json(graph: DirectedGraph) -> dict:
    lab = canonical_label
    return {
        "schema": "digraph/1",
        "vertices": [lab(v) for v in graph.vertices],
        "edges": [
            {"id": lab(eid), "range": lab(r), "source": lab(s)}
            for (eid, r, s) in graph.edges
        ],
    }


def _digraph_body(doc: Mapping, path: str) -> DirectedGraph:
    vertices = _expect(doc.get("vertices"), list, path + "/vertices")
    edges_doc = _expect(doc.get("edges"), list, path + "/edges")
    edges = []
    for k, e in enumerate(edges_doc):
        _expect(e, dict, f"{path}/edges/{k}")
        for fieldname in ("id", "range", "source"):
            if fieldname not in e:
                raise SchemaError(f"edge missing {fieldname!r}", f"{path}/edges/{k}")
        edges.append((e["id"], e["range"], e["source"]))
    try:
        return DirectedGraph(vertices, edges)
    except ValueError as err:
        raise SchemaError(str(err), path)


def digraph_from_json(doc: Mapping, path: str = "/") -> DirectedGraph:
    _expect_schema(doc, ("digraph/1",), path)
    return _digraph_body(doc, path)


def periodic_to_json(pres: PeriodicGraph) -> dict:
    lab = canonical_label
    seam = lambda rows: [
        {"id": lab(eid), "range": lab(r), "source": lab(s)} for (eid, r, s) in rows
    ]
    return {
        "schema": "periodic_graph/1",
        "block": digraph_to_json(pres.block),
        "prefix": digraph_to_json(pres.prefix),
        "seam_prefix": seam(pres.seam_prefix),
        "seam_block": seam(pres.seam_block),
    }


def periodic_from_json(doc: Mapping, path: str = "/") -> PeriodicGraph:
    _expect_schema(doc, ("periodic_graph/1",), path)
    block = digraph_from_json(_expect(doc.get("block"), dict, path + "/block"), path + "/block")
    prefix = digraph_from_json(_expect(doc.get("prefix"), dict, path + "/prefix"), path + "/prefix")

    def seam(rows, sub):
        out = []
        for k, e in enumerate(_expect(rows, list, path + sub)):
            _expect(e, dict, f"{path}{sub}/{k}")
            out.append((e["id"], e["range"], e["source"]))
        return out

    try:
        return PeriodicGraph(
            block,
            prefix=prefix,
            seam_prefix=seam(doc.get("seam_prefix", []), "/seam_prefix"),
            seam_block=seam(doc.get("seam_block", []), "/seam_block"),
        )
    except ValueError as err:
        raise SchemaError(str(err), path)


def graph_input_from_json(doc: Mapping, path: str = "/"):
    tag = _expect_schema(doc, ("digraph/1", "periodic_graph/1"), path)
    if tag == "digraph/1":
        return digraph_from_json(doc, path)
    return periodic_from_json(doc, path)
