"""Exhaustive enumeration of decorated graphs reachable by ordered blowups.

Starting from the base graphs of a minimal model, all admissible equivariant
blowups of a fixed ordered size list are applied breadth-first.  At every
level the children are brought to generic form and deduplicated up to
translation, flip, generic-metric moves, and (optionally) permutations of
exceptional indices carrying equal sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .blowup import BlowupRequest, apply_blowup, blowup_sites
from .graphs import (
    BaseFamilyParams,
    DecoratedGraph,
    GraphError,
    base_hirzebruch,
    base_ruled,
    canonical_text,
    generic_form,
    normal_form,
    permute_exceptionals,
)
from .lattice import pair, rat


class EnumerationError(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationSpec:
    """Base graphs, the ordered size list, and the dedup policy."""

    bases: tuple[DecoratedGraph, ...]
    sizes: tuple[Fraction, ...]
    permute_equal_sizes: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(rat(s) for s in self.sizes))
        if any(s <= 0 for s in self.sizes):
            raise EnumerationError("blowup sizes must be positive")
        if not self.bases:
            raise EnumerationError("no base graphs")
        models = {b.model for b in self.bases}
        if len(models) > 1:
            raise EnumerationError("base graphs must share one model")


@dataclass(frozen=True)
class LevelLog:
    depth: int
    size: Fraction
    sites: int
    kept: int
    merged: int


@dataclass(frozen=True)
class EnumerationResult:
    """Pairwise-inequivalent graphs (generic form) and per-level counts."""

    graphs: tuple[DecoratedGraph, ...]
    branch_log: tuple[LevelLog, ...]

    def normal_forms(self) -> list[DecoratedGraph]:
        return [normal_form(g) for g in self.graphs]


def _permutation_group(g: DecoratedGraph):
    """Permutations of blowup-created exceptional indices of equal size."""
    deltas = g.omega.deltas
    created = sorted(entry.index for entry in g.ledger)
    groups: dict[Fraction, list[int]] = {}
    for i in created:
        groups.setdefault(deltas[i - 1], []).append(i)
    groups = {k: v for k, v in groups.items() if len(v) > 1}
    if not groups:
        yield {}
        return
    keys = sorted(groups)
    for combo in itertools.product(
        *(itertools.permutations(groups[k]) for k in keys)
    ):
        perm = {}
        for k, images in zip(keys, combo):
            for src, dst in zip(groups[k], images):
                if src != dst:
                    perm[src] = dst
        yield perm


def dedup_key(g: DecoratedGraph, permute_equal_sizes: bool = True) -> str:
    """Smallest canonical text over the allowed relabelings."""
    if not permute_equal_sizes:
        return canonical_text(normal_form(g), with_ledger=False)
    return min(
        canonical_text(normal_form(permute_exceptionals(g, perm)), with_ledger=False)
        for perm in _permutation_group(g)
    )


def _dedup(graphs, permute: bool):
    chosen: dict[str, DecoratedGraph] = {}
    merged = 0
    for g in graphs:
        key = dedup_key(g, permute)
        old = chosen.get(key)
        if old is None:
            chosen[key] = g
        else:
            merged += 1
            if (g.ledger, canonical_text(g)) < (old.ledger, canonical_text(old)):
                chosen[key] = g
    ordered = [chosen[k] for k in sorted(chosen)]
    return ordered, merged


def enumerate_graphs(spec: EnumerationSpec) -> EnumerationResult:
    """Breadth-first closure of the base set under the ordered size list."""
    frontier, _ = _dedup([generic_form(b) for b in spec.bases], spec.permute_equal_sizes)
    log = []
    for depth, delta in enumerate(spec.sizes, start=1):
        children = []
        sites_total = 0
        for g in frontier:
            sites = blowup_sites(g, delta)
            sites_total += len(sites)
            for site in sites:
                child = apply_blowup(g, BlowupRequest(site, delta))
                children.append(generic_form(child))
        frontier, merged = _dedup(children, spec.permute_equal_sizes)
        log.append(LevelLog(depth, delta, sites_total, len(frontier), merged))
    for g in frontier:
        assert len(g.ledger) == len(spec.sizes)
        for i, s in enumerate(spec.sizes, start=1):
            assert pair(g.omega, g.model.exceptional(g.model.k - len(spec.sizes) + i)) == s
    return EnumerationResult(tuple(frontier), tuple(log))


def enumerate_levels(spec: EnumerationSpec) -> list[EnumerationResult]:
    """Like ``enumerate_graphs`` but keeping every intermediate level."""
    out = []
    for depth in range(len(spec.sizes) + 1):
        partial = EnumerationSpec(spec.bases, spec.sizes[:depth], spec.permute_equal_sizes)
        out.append(enumerate_graphs(partial))
    return out


# ---------------------------------------------------------------------------
# base families for the two scenario shapes


def hirzebruch_base_graphs(lam, delta1, reps) -> list[tuple[str, DecoratedGraph]]:
    """All base graphs over the one-point plane blowup, labeled by family.

    The symbolic coprime edge labels of the all-isolated families are
    instantiated at the given representatives; representatives violating a
    family's label constraint are skipped for that family only.
    """
    lam, delta1 = rat(lam), rat(delta1)
    out = []
    ell = 1
    while ell * (lam - delta1) < lam:
        out.append(
            (f"two_surfaces ell={ell}",
             base_hirzebruch(lam, delta1, BaseFamilyParams("two_surfaces", ell)))
        )
        out.append(
            (f"one_surface ell={ell}",
             base_hirzebruch(lam, delta1, BaseFamilyParams("one_surface", ell)))
        )
        for family in ("isolated_left", "isolated_right"):
            for c, d in reps:
                try:
                    params = BaseFamilyParams(family, ell, c, d)
                except GraphError:
                    continue
                out.append(
                    (f"{family} ell={ell} c={c} d={d}",
                     base_hirzebruch(lam, delta1, params))
                )
        ell += 1
    return out


def ruled_base_graphs(lam_f, lam_b, genus: int) -> list[tuple[str, DecoratedGraph]]:
    lam_f, lam_b = rat(lam_f), rat(lam_b)
    out = []
    ell = 0
    while ell * lam_f < lam_b:
        out.append((f"ruled ell={ell}", base_ruled(lam_f, lam_b, genus, ell)))
        ell += 1
    return out


# ---------------------------------------------------------------------------
# ledger pattern classification (three blowups on a ruled base)


TYPE_NAMES = ("I", "II", "III", "IV")


def classify_sequence_types(result: EnumerationResult) -> dict[str, list[DecoratedGraph]]:
    """Partition three-step ruled enumerations by blowup-site pattern.

    I   three surface blowups;
    II  surface, then interior at the point the first blowup created, then surface;
    III surface, surface, then interior at the point the first blowup created;
    IV  surface, surface, then interior at the point the second blowup created.

    Anything else lands under 'unclassified', which falsifies the case split.
    """
    buckets: dict[str, list[DecoratedGraph]] = {t: [] for t in TYPE_NAMES}
    buckets["unclassified"] = []
    for g in result.graphs:
        kinds = tuple(entry.kind for entry in g.ledger)
        details = tuple(entry.detail for entry in g.ledger)
        if len(g.ledger) != 3:
            buckets["unclassified"].append(g)
        elif kinds == ("surface", "surface", "surface"):
            buckets["I"].append(g)
        elif kinds == ("surface", "interior", "surface") and details[1] == "1":
            buckets["II"].append(g)
        elif kinds == ("surface", "surface", "interior") and details[2] == "1":
            buckets["III"].append(g)
        elif kinds == ("surface", "surface", "interior") and details[2] == "2":
            buckets["IV"].append(g)
        else:
            buckets["unclassified"].append(g)
    return buckets


# ---------------------------------------------------------------------------
# label-instantiation cross-check


def site_kind_tree(g: DecoratedGraph, sizes) -> tuple:
    """Nested multiset of admissible site kinds along the whole size list.

    Admissibility bounds depend only on sphere areas, never on edge labels,
    so the tree must agree across label representatives of one family; a
    disagreement would invalidate instantiating the symbolic labels at
    finitely many representatives.
    """
    sizes = [rat(s) for s in sizes]
    if not sizes:
        return ()
    branches = []
    for site in blowup_sites(g, sizes[0]):
        child = generic_form(apply_blowup(g, BlowupRequest(site, sizes[0])))
        branches.append((site.kind, site_kind_tree(child, sizes[1:])))
    return tuple(sorted(branches))


def cross_check_instantiation(lam, delta1, reps, sizes) -> None:
    """Raise unless all valid (c, d) representatives branch identically."""
    lam, delta1 = rat(lam), rat(delta1)
    for family in ("isolated_left", "isolated_right"):
        trees = {}
        ell = 1
        while ell * (lam - delta1) < lam:
            for c, d in reps:
                try:
                    params = BaseFamilyParams(family, ell, c, d)
                except GraphError:
                    continue
                g = base_hirzebruch(lam, delta1, params)
                trees[(ell, c, d)] = site_kind_tree(g, sizes)
            by_ell: dict[int, set] = {}
            for (l, c, d), tree in trees.items():
                by_ell.setdefault(l, set()).add(tree)
            for l, distinct in by_ell.items():
                if len(distinct) > 1:
                    raise EnumerationError(
                        f"{family} ell={l}: site-kind trees differ across the"
                        " label representatives; instantiation is unsound here"
                    )
            ell += 1
