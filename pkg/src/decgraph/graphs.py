"""Decorated graphs of Hamiltonian circle actions on symplectic 4-manifolds.

A decorated graph records the fixed-point data of a circle action: isolated
fixed points are plain vertices placed at their moment value, fixed surfaces
are fat vertices carrying a size and a genus, and invariant spheres are edges
carrying an isotropy label n >= 1 and a homology class.  The moment-value gap
across an edge equals label * (class area), areas being exact rationals.

Graphs are immutable values.  Heights are derived from classes, labels and
the class vector; validation re-checks them.  Canonical serialization gives
a deterministic text form that doubles as the on-disk format and as the
equality key for the equivalence relation (vertical translation, change of
generic metric, flip).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .lattice import (
    RATIONAL,
    CohomologyVector,
    HomologyClass,
    LatticeError,
    SurfaceModel,
    adjunction_genus,
    pair,
    rat,
    rat_str,
)


class GraphError(ValueError):
    """Raised on malformed graph constructions and invalid parameters."""


@dataclass(frozen=True)
class FatData:
    size: Fraction
    genus: int
    cls: HomologyClass


@dataclass(frozen=True)
class Vertex:
    vid: str
    moment: Fraction
    fat: FatData | None = None

    @property
    def is_fat(self) -> bool:
        return self.fat is not None

    def birth(self) -> int:
        """Index of the blowup step that created this vertex (0 for base)."""
        return int(self.vid.split(".")[0])


@dataclass(frozen=True)
class Edge:
    bottom: str
    top: str
    label: int
    cls: HomologyClass


class LedgerEntry(NamedTuple):
    index: int  # exceptional index created by this step
    kind: str  # 'surface' | 'interior' | 'extremum'
    detail: str  # 'min'/'max' for surface/extremum, birth step for interior

    def __str__(self):
        return f"E{self.index}:{self.kind}:{self.detail}"

    @staticmethod
    def parse(text: str) -> "LedgerEntry":
        idx, kind, detail = text.split(":")
        return LedgerEntry(int(idx.lstrip("E")), kind, detail)


@dataclass(frozen=True)
class DecoratedGraph:
    model: SurfaceModel
    omega: CohomologyVector
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    ledger: tuple[LedgerEntry, ...]
    fiber: HomologyClass  # class of a generic free sphere joining the extrema

    @staticmethod
    def build(model, omega, vertices, edges, ledger, fiber) -> "DecoratedGraph":
        vertices = tuple(sorted(vertices, key=lambda v: (v.moment, v.vid)))
        edges = tuple(
            sorted(edges, key=lambda e: (e.cls.coeffs, e.label, e.bottom, e.top))
        )
        return DecoratedGraph(model, omega, vertices, edges, tuple(ledger), fiber)

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.vid == vid:
                return v
        raise GraphError(f"no vertex {vid!r}")

    @property
    def min_vertex(self) -> Vertex:
        return min(self.vertices, key=lambda v: (v.moment, v.vid))

    @property
    def max_vertex(self) -> Vertex:
        return max(self.vertices, key=lambda v: (v.moment, v.vid))

    @property
    def span(self) -> Fraction:
        return self.max_vertex.moment - self.min_vertex.moment

    def is_extremal(self, vid: str) -> bool:
        return vid in (self.min_vertex.vid, self.max_vertex.vid)

    def edges_above(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if e.bottom == vid]

    def edges_below(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if e.top == vid]

    def interior_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if not v.is_fat and not self.is_extremal(v.vid)]

    def area(self, e: Edge) -> Fraction:
        return pair(self.omega, e.cls)


# ---------------------------------------------------------------------------
# validation


def validate(g: DecoratedGraph) -> list[str]:
    """All rule violations, as human-readable strings; empty means valid."""
    bad: list[str] = []
    if g.omega.model != g.model:
        return [f"class vector is for {g.omega.model}, graph is for {g.model}"]
    if not g.vertices:
        return ["graph has no vertices"]
    mmin = min(v.moment for v in g.vertices)
    mmax = max(v.moment for v in g.vertices)
    if mmin == mmax:
        bad.append("minimum and maximum must be attained at distinct levels")
    if sum(1 for v in g.vertices if v.moment == mmin) != 1:
        bad.append("minimum attained on more than one component")
    if sum(1 for v in g.vertices if v.moment == mmax) != 1:
        bad.append("maximum attained on more than one component")

    ids = [v.vid for v in g.vertices]
    if len(set(ids)) != len(ids):
        bad.append("duplicate vertex ids")
    for v in g.vertices:
        if v.fat is None:
            continue
        if v.fat.size <= 0:
            bad.append(f"fat vertex {v.vid} has nonpositive size")
        if v.moment not in (mmin, mmax):
            bad.append(f"fat vertex {v.vid} sits at an interior moment value")
        if v.fat.genus < 0:
            bad.append(f"fat vertex {v.vid} has negative genus")
        if v.fat.cls.model != g.model:
            bad.append(f"fat vertex {v.vid} class is in the wrong lattice")
        elif pair(g.omega, v.fat.cls) != v.fat.size:
            bad.append(f"fat vertex {v.vid} size disagrees with its class area")

    known = set(ids)
    for e in g.edges:
        tag = f"edge {e.cls}({e.label})"
        if e.bottom not in known or e.top not in known:
            bad.append(f"{tag} references a missing vertex")
            continue
        if e.bottom == e.top:
            bad.append(f"{tag} is a loop")
            continue
        vb, vt = g.vertex(e.bottom), g.vertex(e.top)
        if not isinstance(e.label, int) or e.label < 1:
            bad.append(f"{tag} has a non-positive label")
            continue
        if vt.moment <= vb.moment:
            bad.append(f"{tag} does not increase the moment value")
        if e.cls.model != g.model:
            bad.append(f"{tag} class is in the wrong lattice")
            continue
        if vt.moment - vb.moment != e.label * pair(g.omega, e.cls):
            bad.append(f"{tag} breaks the area rule (gap != label * area)")
        if adjunction_genus(e.cls) != 0:
            bad.append(f"{tag} class is not an embedded-sphere class")
        if (vb.is_fat or vt.is_fat) and e.label != 1:
            bad.append(f"{tag} touches a fixed surface with label > 1")

    for v in g.vertices:
        if v.is_fat:
            continue
        above = g.edges_above(v.vid)
        below = g.edges_below(v.vid)
        if v.moment not in (mmin, mmax):
            if len(above) != 1 or len(below) != 1:
                bad.append(
                    f"interior vertex {v.vid} needs exactly one edge above and below"
                )
        labels = [e.label for e in above + below]
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if math.gcd(labels[i], labels[j]) != 1:
                    bad.append(f"vertex {v.vid} carries non-coprime edge labels")
    return bad


# ---------------------------------------------------------------------------
# base families


HIRZEBRUCH_FAMILIES = (
    "isolated_left",
    "isolated_right",
    "one_surface",
    "two_surfaces",
)


@dataclass(frozen=True)
class BaseFamilyParams:
    """Parameters naming one base graph of a minimal model.

    ``ell`` indexes the action; the isolated families additionally take a
    coprime positive pair (c, d) of edge labels, with (2*ell-1)*c - d >= 1
    required on the right-hand isolated family.
    """

    family: str
    ell: int
    c: int = 1
    d: int = 1

    def __post_init__(self):
        if self.family not in HIRZEBRUCH_FAMILIES:
            raise GraphError(f"unknown base family {self.family!r}")
        if self.family.startswith("isolated"):
            if self.c < 1 or self.d < 1 or math.gcd(self.c, self.d) != 1:
                raise GraphError("(c, d) must be coprime positive integers")
            if self.family == "isolated_right" and (2 * self.ell - 1) * self.c - self.d < 1:
                raise GraphError("isolated_right needs (2*ell-1)*c - d >= 1")


def base_hirzebruch(lam, delta1, params: BaseFamilyParams) -> DecoratedGraph:
    """One of the four base graphs on the one-point blowup of the plane."""
    lam, delta1 = rat(lam), rat(delta1)
    if not 0 < delta1 < lam:
        raise GraphError("need 0 < delta1 < lam")
    if not 1 <= params.ell or params.ell * (lam - delta1) >= lam:
        raise GraphError("ell out of range: need 1 <= ell < lam/(lam-delta1)")
    omega = CohomologyVector.rational(lam, [delta1])
    model = omega.model
    ell, c, d, n = params.ell, params.c, params.d, 2 * params.ell - 1
    L, E1 = model.unit("L"), model.unit("E1")
    fib = L - E1
    riser = ell * L - (ell - 1) * E1
    coriser = (1 - ell) * L + ell * E1
    a_fib, a_riser, a_coriser = (pair(omega, x) for x in (fib, riser, coriser))

    if params.family == "two_surfaces":
        vmin = Vertex("0.min", Fraction(0), FatData(a_riser, 0, riser))
        vmax = Vertex("0.max", a_fib, FatData(a_coriser, 0, coriser))
        edges = [Edge("0.min", "0.max", 1, fib), Edge("0.min", "0.max", 1, fib)]
        return DecoratedGraph.build(model, omega, [vmin, vmax], edges, [], fib)

    if params.family == "one_surface":
        vmin = Vertex("0.min", Fraction(0), FatData(a_fib, 0, fib))
        va = Vertex("0.a", a_coriser)
        vmax = Vertex("0.max", a_coriser + n * a_fib)
        edges = [
            Edge("0.min", "0.a", 1, coriser),
            Edge("0.a", "0.max", n, fib),
            Edge("0.min", "0.max", 1, riser),
        ]
        return DecoratedGraph.build(model, omega, [vmin, va, vmax], edges, [], riser)

    if params.family == "isolated_left":
        vmin = Vertex("0.min", Fraction(0))
        va = Vertex("0.a", d * a_fib)
        vb = Vertex("0.b", c * a_coriser)
        vmax = Vertex("0.max", d * a_fib + c * a_riser)
        edges = [
            Edge("0.min", "0.a", d, fib),
            Edge("0.a", "0.max", c, riser),
            Edge("0.min", "0.b", c, coriser),
            Edge("0.b", "0.max", n * c + d, fib),
        ]
        fiber = d * fib + c * riser
        return DecoratedGraph.build(model, omega, [vmin, va, vb, vmax], edges, [], fiber)

    # isolated_right
    vmin = Vertex("0.min", Fraction(0))
    va = Vertex("0.a", d * a_fib)
    vb = Vertex("0.b", d * a_fib + c * a_coriser)
    vmax = Vertex("0.max", c * a_riser)
    edges = [
        Edge("0.min", "0.a", d, fib),
        Edge("0.a", "0.b", c, coriser),
        Edge("0.b", "0.max", n * c - d, fib),
        Edge("0.min", "0.max", c, riser),
    ]
    fiber = c * riser
    return DecoratedGraph.build(model, omega, [vmin, va, vb, vmax], edges, [], fiber)


def base_ruled(lam_f, lam_b, genus: int, ell: int) -> DecoratedGraph:
    """The base graph on a trivial ruled surface over a genus >= 1 curve."""
    lam_f, lam_b = rat(lam_f), rat(lam_b)
    if lam_f <= 0 or lam_b <= 0:
        raise GraphError("need positive lam_f and lam_b")
    if genus < 1:
        raise GraphError("need genus >= 1")
    if not 0 <= ell or ell * lam_f >= lam_b:
        raise GraphError("ell out of range: need 0 <= ell < lam_b/lam_f")
    omega = CohomologyVector.ruled(lam_f, lam_b, [], genus)
    model = omega.model
    B, F = model.unit("B"), model.unit("F")
    bot, top = B - ell * F, B + ell * F
    vmin = Vertex("0.min", Fraction(0), FatData(pair(omega, bot), genus, bot))
    vmax = Vertex("0.max", lam_f, FatData(pair(omega, top), genus, top))
    edges = [Edge("0.min", "0.max", 1, F)]
    return DecoratedGraph.build(model, omega, [vmin, vmax], edges, [], F)


# ---------------------------------------------------------------------------
# canonical form


def _walk_sum(g: DecoratedGraph, vid: str, up: bool) -> HomologyClass:
    """Weighted class sum along the chain from a vertex to an extremum."""
    total = g.model.zero()
    while True:
        v = g.vertex(vid)
        if v.is_fat or g.is_extremal(vid):
            return total
        step = g.edges_above(vid) if up else g.edges_below(vid)
        if len(step) != 1:
            raise GraphError(f"vertex {vid} has no unique chain continuation")
        e = step[0]
        total = total + e.label * e.cls
        vid = e.top if up else e.bottom
    # unreachable


def break_free_edges(g: DecoratedGraph) -> DecoratedGraph:
    """Rewire every label-1 edge joining two interior fixed points.

    A generic invariant metric admits no free sphere with both poles at
    interior fixed points; such an edge splits into a free sphere from the
    lower pole to the maximum and one from the minimum to the upper pole.
    Classes follow conservation of the weighted chain sum.
    """
    while True:
        vmin, vmax = g.min_vertex, g.max_vertex
        interior = {v.vid for v in g.interior_vertices()}
        target = next(
            (e for e in g.edges if e.label == 1 and e.bottom in interior and e.top in interior),
            None,
        )
        if target is None:
            return g
        up_rest = _walk_sum(g, target.top, up=True)
        down_rest = _walk_sum(g, target.bottom, up=False)
        edges = [e for e in g.edges if e is not target]
        edges.append(Edge(target.bottom, vmax.vid, 1, target.cls + up_rest))
        edges.append(Edge(vmin.vid, target.top, 1, target.cls + down_rest))
        g = DecoratedGraph.build(g.model, g.omega, g.vertices, edges, g.ledger, g.fiber)


def strip_redundant(g: DecoratedGraph) -> DecoratedGraph:
    """Drop label-1 edges joining the minimum directly to the maximum."""
    vmin, vmax = g.min_vertex.vid, g.max_vertex.vid
    edges = [
        e
        for e in g.edges
        if not (e.label == 1 and e.bottom == vmin and e.top == vmax)
    ]
    return DecoratedGraph.build(g.model, g.omega, g.vertices, edges, g.ledger, g.fiber)


def translate(g: DecoratedGraph, base=Fraction(0)) -> DecoratedGraph:
    """Shift moment values so the minimum sits at ``base``."""
    shift = rat(base) - g.min_vertex.moment
    if shift == 0:
        return g
    vertices = [Vertex(v.vid, v.moment + shift, v.fat) for v in g.vertices]
    return DecoratedGraph.build(g.model, g.omega, vertices, g.edges, g.ledger, g.fiber)


def flip(g: DecoratedGraph) -> DecoratedGraph:
    """Turn the graph upside down (reparametrize the circle inversely)."""
    top = g.max_vertex.moment
    vertices = [Vertex(v.vid, top - v.moment, v.fat) for v in g.vertices]
    edges = [Edge(e.top, e.bottom, e.label, e.cls) for e in g.edges]
    return translate(
        DecoratedGraph.build(g.model, g.omega, vertices, edges, g.ledger, g.fiber)
    )


def canonical_lines(g: DecoratedGraph, with_ledger: bool = True) -> list[str]:
    """Deterministic line records: MODEL, OMEGA, V, C/E blocks, FIBER, LEDGER.

    Vertex identity is canonical (0 = minimum, 1 = maximum, then interior
    vertices in chain order), so equal graphs serialize to identical bytes
    regardless of construction history.
    """
    vmin, vmax = g.min_vertex, g.max_vertex
    chains = []
    for start in sorted(
        g.edges_above(vmin.vid), key=lambda e: (e.cls.coeffs, e.label, e.top)
    ):
        chain = [start]
        while chain[-1].top != vmax.vid:
            nxt = g.edges_above(chain[-1].top)
            if len(nxt) != 1:
                raise GraphError("cannot serialize: broken chain structure")
            chain.append(nxt[0])
        chains.append(chain)
    if sum(len(c) for c in chains) != len(g.edges):
        raise GraphError("cannot serialize: edges outside min-to-max chains")

    def edge_rec(e: Edge) -> tuple:
        return (
            str(g.vertex(e.bottom).moment),
            str(g.vertex(e.top).moment),
            e.label,
            e.cls.coeffs,
        )

    chains.sort(key=lambda ch: [edge_rec(e) for e in ch])

    index = {vmin.vid: 0, vmax.vid: 1}
    order = [vmin, vmax]
    for chain in chains:
        for e in chain[:-1]:
            if e.top not in index:
                index[e.top] = len(order)
                order.append(g.vertex(e.top))

    def vline(v: Vertex) -> str:
        if v.fat is None:
            return f"V {index[v.vid]} {rat_str(v.moment)} isolated"
        f = v.fat
        return (
            f"V {index[v.vid]} {rat_str(v.moment)} fat"
            f" size={rat_str(f.size)} genus={f.genus} class={f.cls}"
        )

    lines = [f"MODEL {g.model}", f"OMEGA {g.omega}"]
    lines.extend(vline(v) for v in order)
    for chain in chains:
        lines.append("C")
        for e in chain:
            lines.append(f"E {index[e.bottom]} {index[e.top]} {e.label} {e.cls}")
    lines.append(f"FIBER {g.fiber}")
    if with_ledger:
        lines.append("LEDGER " + " ".join(str(x) for x in g.ledger))
    return lines


def canonical_text(g: DecoratedGraph, with_ledger: bool = True) -> str:
    return "\n".join(canonical_lines(g, with_ledger)) + "\n"


def parse_graph(text: str) -> DecoratedGraph:
    """Rebuild a graph from its serialized form."""
    model = omega = None
    verts: dict[int, Vertex] = {}
    edges: list[Edge] = []
    ledger: list[LedgerEntry] = []
    fiber = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line == "C":
            continue
        tag, _, rest = line.partition(" ")
        if tag == "MODEL":
            parts = rest.split()
            kind = parts[0]
            opts = dict(p.split("=") for p in parts[1:])
            model = SurfaceModel(kind, int(opts["k"]), int(opts.get("genus", 0)))
        elif tag == "OMEGA":
            head, _, tail = rest.strip("()").partition(";")
            entries = [rat(x) for x in head.split(",")]
            entries += [rat(x) for x in tail.split(",") if x]
            omega = CohomologyVector(model, tuple(entries))
        elif tag == "V":
            parts = rest.split()
            idx, moment, kind = int(parts[0]), rat(parts[1]), parts[2]
            fat = None
            if kind == "fat":
                opts = dict(p.split("=", 1) for p in parts[3:])
                fat = FatData(
                    rat(opts["size"]), int(opts["genus"]), model.parse(opts["class"])
                )
            verts[idx] = Vertex(f"0.v{idx}", moment, fat)
        elif tag == "E":
            b, t, label, cls = rest.split()
            edges.append(
                Edge(f"0.v{int(b)}", f"0.v{int(t)}", int(label), model.parse(cls))
            )
        elif tag == "FIBER":
            fiber = model.parse(rest)
        elif tag == "LEDGER":
            ledger = [LedgerEntry.parse(p) for p in rest.split()] if rest else []
    if model is None or omega is None or fiber is None:
        raise GraphError("incomplete graph record")
    return DecoratedGraph.build(model, omega, verts.values(), edges, ledger, fiber)


def normal_form(g: DecoratedGraph) -> DecoratedGraph:
    """Canonical representative under translation, generic metric, and flip."""
    h = translate(strip_redundant(break_free_edges(g)))
    f = flip(h)
    if canonical_text(f, with_ledger=False) < canonical_text(h, with_ledger=False):
        return f
    return h


def generic_form(g: DecoratedGraph) -> DecoratedGraph:
    """Translate to base level and break non-generic free spheres.

    Unlike ``normal_form`` this keeps redundant edges and the original
    orientation, so it is safe to keep blowing up the result.
    """
    return translate(break_free_edges(g))


def equivalence_key(g: DecoratedGraph) -> str:
    return canonical_text(normal_form(g), with_ledger=False)


def equivalent(g1: DecoratedGraph, g2: DecoratedGraph) -> bool:
    """Same action up to translation, flips, and generic-metric moves."""
    if g1.model != g2.model or g1.omega != g2.omega:
        raise LatticeError("graphs to compare must share model and class vector")
    return equivalence_key(g1) == equivalence_key(g2)


def permute_exceptionals(g: DecoratedGraph, perm: dict[int, int]) -> DecoratedGraph:
    """Apply a permutation of exceptional indices to every class in sight."""
    head = 1 if g.model.kind == RATIONAL else 2

    def permute_cls(c: HomologyClass) -> HomologyClass:
        coeffs = list(c.coeffs)
        for i, j in perm.items():
            coeffs[head + j - 1] = c.coeffs[head + i - 1]
        return HomologyClass(g.model, tuple(coeffs))

    entries = list(g.omega.entries)
    for i, j in perm.items():
        entries[head + j - 1] = g.omega.entries[head + i - 1]
    omega = CohomologyVector(g.model, tuple(entries))
    vertices = [
        Vertex(v.vid, v.moment, None)
        if v.fat is None
        else Vertex(v.vid, v.moment, FatData(v.fat.size, v.fat.genus, permute_cls(v.fat.cls)))
        for v in g.vertices
    ]
    edges = [Edge(e.bottom, e.top, e.label, permute_cls(e.cls)) for e in g.edges]
    return DecoratedGraph.build(
        g.model, omega, vertices, edges, g.ledger, permute_cls(g.fiber)
    )


def render_dot(g: DecoratedGraph) -> str:
    """Deterministic DOT text; byte-identical for equal graphs."""
    lines = canonical_lines(g)
    out = ["digraph action {", "  rankdir=BT;"]
    for line in lines:
        if line.startswith("MODEL") or line.startswith("OMEGA"):
            out.append(f'  // {line}')
    for line in lines:
        if line.startswith("V "):
            parts = line.split()
            idx, moment, kind = parts[1], parts[2], parts[3]
            if kind == "fat":
                opts = dict(p.split("=", 1) for p in parts[4:])
                label = (
                    f"moment={moment}\\nsize={opts['size']} genus={opts['genus']}"
                    f"\\n{opts['class']}"
                )
                out.append(f'  n{idx} [shape=ellipse, label="{label}"];')
            else:
                out.append(f'  n{idx} [shape=point, xlabel="{moment}"];')
    for line in lines:
        if line.startswith("E "):
            _, b, t, label, cls = line.split()
            out.append(f'  n{b} -> n{t} [label="{label}: {cls}"];')
    out.append("}")
    return "\n".join(out) + "\n"
