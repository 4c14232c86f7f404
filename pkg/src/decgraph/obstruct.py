"""Positivity-of-intersections obstructions against extending cyclic actions.

Every fixed surface and every invariant sphere with a nontrivial stabilizer
is holomorphic for any invariant compatible almost complex structure, so its
class is *certified*: some holomorphic curve realizes it.  In integrable
mode, exceptional divisors and their proper transforms are certified as
well.  A graph is obstructed when a certified class meets a class required
by the cyclic action negatively: distinct holomorphic curves intersect
nonnegatively, so such an action admits no extension along this graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .enumeration import EnumerationResult
from .graphs import DecoratedGraph
from .lattice import (
    RATIONAL,
    HomologyClass,
    LatticeError,
    adjunction_genus,
    intersect,
)

STABILIZER_ONLY = "stabilizer"
INTEGRABLE_BLOWUP = "integrable"

RULE_NEGATIVE_PAIR = "negative_pair"  # distinct classes with C.R < 0
RULE_NEGATIVE_SQUARE = "negative_square"  # two representatives of C, C.C < 0

OBSTRUCTED = "obstructed"
UNOBSTRUCTED = "unobstructed"


@dataclass(frozen=True)
class CertifiedClass:
    """A class with a guaranteed holomorphic representative.

    ``label`` is the stabilizer order of the representing sphere, or None
    for a fixed surface.  The representative is pointwise fixed by the
    cyclic subgroup of order n exactly when it is a surface or its
    stabilizer order is divisible by n.
    """

    cls: HomologyClass
    justification: str  # 'stabilizer' | 'proper_transform'
    label: int | None

    def pointwise_fixed(self, n: int) -> bool:
        return self.label is None or self.label % n == 0


@dataclass(frozen=True)
class RequiredClass:
    """A class the cyclic action is known to fix a holomorphic curve in."""

    cls: HomologyClass
    fixed_by: int  # order of the cyclic group fixing the curve pointwise
    embedded: bool = True

    def __post_init__(self):
        if self.embedded and adjunction_genus(self.cls) != 0:
            raise LatticeError(
                f"{self.cls} asserted embedded but fails the genus-zero check"
            )


@dataclass(frozen=True)
class Certificate:
    certified: CertifiedClass
    required: RequiredClass
    intersection: int
    rule: str


@dataclass(frozen=True)
class GraphVerdict:
    graph: DecoratedGraph
    verdict: str
    certificate: Certificate | None


@dataclass(frozen=True)
class ObstructionReport:
    verdicts: tuple[GraphVerdict, ...]
    mode: str
    n: int
    vacuous: bool

    @property
    def all_obstructed(self) -> bool:
        return all(v.verdict == OBSTRUCTED for v in self.verdicts)


def is_proper_transform_shape(c: HomologyClass) -> bool:
    """Ei minus a subset of later exceptional classes, nothing else."""
    head = 1 if c.model.kind == RATIONAL else 2
    if any(x != 0 for x in c.coeffs[:head]):
        return False
    exc = c.coeffs[head:]
    positives = [i for i, x in enumerate(exc, start=1) if x == 1]
    if len(positives) != 1 or any(x not in (0, 1, -1) for x in exc):
        return False
    i = positives[0]
    return all(j > i for j, x in enumerate(exc, start=1) if x == -1)


def certified_classes(
    g: DecoratedGraph, n: int, mode: str = STABILIZER_ONLY
) -> list[CertifiedClass]:
    """All classes with guaranteed holomorphic representatives in the graph."""
    if n < 2:
        raise LatticeError("cyclic order must be at least 2")
    if mode not in (STABILIZER_ONLY, INTEGRABLE_BLOWUP):
        raise LatticeError(f"unknown certification mode {mode!r}")
    out = []
    for v in g.vertices:
        if v.is_fat:
            out.append(CertifiedClass(v.fat.cls, "stabilizer", None))
    for e in g.edges:
        if e.label >= 2:
            out.append(CertifiedClass(e.cls, "stabilizer", e.label))
        elif mode == INTEGRABLE_BLOWUP and is_proper_transform_shape(e.cls):
            out.append(CertifiedClass(e.cls, "proper_transform", e.label))
    out.sort(key=lambda c: (c.cls.coeffs, c.label is not None, c.label or 0))
    return out


def find_certificate(
    certified: list[CertifiedClass], required: list[RequiredClass]
) -> Certificate | None:
    """First contradiction in canonical order, preferring distinct classes."""
    for cert in certified:
        for req in required:
            if cert.cls != req.cls:
                prod = intersect(cert.cls, req.cls)
                if prod < 0:
                    return Certificate(cert, req, prod, RULE_NEGATIVE_PAIR)
    for cert in certified:
        for req in required:
            if cert.cls == req.cls:
                sq = intersect(cert.cls, cert.cls)
                if sq < 0 and not cert.pointwise_fixed(req.fixed_by):
                    return Certificate(cert, req, sq, RULE_NEGATIVE_SQUARE)
    return None


def check_nonextension(
    result: EnumerationResult,
    required: list[RequiredClass],
    n: int,
    mode: str = STABILIZER_ONLY,
) -> ObstructionReport:
    """Search every enumerated graph for a positivity contradiction.

    The cyclic action extends along no enumerated circle action exactly when
    every graph is obstructed.  An empty enumeration makes the claim
    vacuously true and is flagged as such.
    """
    verdicts = []
    for g in result.graphs:
        certified = certified_classes(g, n, mode)
        cert = find_certificate(certified, list(required))
        verdicts.append(
            GraphVerdict(g, OBSTRUCTED if cert else UNOBSTRUCTED, cert)
        )
    return ObstructionReport(tuple(verdicts), mode, n, vacuous=not result.graphs)


def last_blowup_classes(
    result: EnumerationResult, n: int = 2, mode: str = STABILIZER_ONLY
) -> set[HomologyClass]:
    """Certified classes that track the final two blowups of each graph.

    Per graph this selects the isotropy sphere left by the second-to-last
    blowup when it survives, and otherwise the fixed surface whose class
    shows the most exceptional terms (ties to the smaller coefficient
    vector).  In integrable mode the final exceptional divisor itself is
    reported too.  Used to cross-check a hand-derived case list: the engine
    set must stay inside it.
    """
    out: set[HomologyClass] = set()
    for g in result.graphs:
        k = g.model.k
        certified = certified_classes(g, n, mode)
        if mode == INTEGRABLE_BLOWUP:
            ek = g.model.exceptional(k)
            if any(c.cls == ek for c in certified):
                out.add(ek)
        if k >= 2:
            prev = g.model.exceptional(k - 1)
            if any(
                c.cls == prev and c.label is not None and c.label >= 2
                for c in certified
            ):
                out.add(prev)
                continue
        fats = [c.cls for c in certified if c.label is None]
        if fats:
            fats.sort(key=lambda c: (-len(c.exceptional_support()), c.coeffs))
            out.add(fats[0])
    return out
