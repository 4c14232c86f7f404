from fractions import Fraction as F

import pytest

from decgraph.blowup import BlowupRequest, apply_blowup, blowup_sites
from decgraph.graphs import (
    BaseFamilyParams,
    DecoratedGraph,
    Edge,
    FatData,
    GraphError,
    LedgerEntry,
    Vertex,
    base_hirzebruch,
    base_ruled,
    break_free_edges,
    canonical_text,
    equivalent,
    flip,
    generic_form,
    normal_form,
    parse_graph,
    permute_exceptionals,
    render_dot,
    translate,
    validate,
)
from decgraph.lattice import CohomologyVector, LatticeError, intersect, pair


def two_surface_base():
    return base_hirzebruch(1, F(1, 2), BaseFamilyParams("two_surfaces", 1))


def test_two_surfaces_base_matches_construction():
    g = two_surface_base()
    assert validate(g) == []
    fats = {str(v.fat.cls): (v.moment, v.fat.size) for v in g.vertices}
    assert fats == {"L": (F(0), F(1)), "E1": (F(1, 2), F(1, 2))}
    assert len(g.edges) == 2
    assert all(str(e.cls) == "L-E1" and e.label == 1 for e in g.edges)
    # the two surface classes add up to L+E1 and meet trivially
    classes = [v.fat.cls for v in g.vertices]
    assert str(classes[0] + classes[1]) == "L+E1"
    assert intersect(classes[0], classes[1]) == 0


def test_one_surface_base():
    g = base_hirzebruch(1, F(1, 2), BaseFamilyParams("one_surface", 1))
    assert validate(g) == []
    fat = [v for v in g.vertices if v.is_fat]
    assert len(fat) == 1 and str(fat[0].fat.cls) == "L-E1"
    assert g.max_vertex.moment == 1 and not g.max_vertex.is_fat
    assert sorted(str(e.cls) for e in g.edges) == ["E1", "L", "L-E1"]


def test_isolated_left_base():
    g = base_hirzebruch(1, F(1, 2), BaseFamilyParams("isolated_left", 1, 1, 1))
    assert validate(g) == []
    assert all(not v.is_fat for v in g.vertices) and len(g.vertices) == 4
    assert sorted(e.label for e in g.edges) == [1, 1, 1, 2]
    assert sorted(str(e.cls) for e in g.edges) == ["E1", "L", "L-E1", "L-E1"]


def test_isolated_right_base():
    g = base_hirzebruch(1, F(1, 2), BaseFamilyParams("isolated_right", 1, 2, 1))
    assert validate(g) == []
    assert sorted(e.label for e in g.edges) == [1, 1, 2, 2]
    # palindromic label chain: the graph equals its own flip
    assert equivalent(g, flip(g))


def test_base_parameter_errors():
    with pytest.raises(GraphError):
        base_hirzebruch(1, F(1, 2), BaseFamilyParams("two_surfaces", 2))
    with pytest.raises(GraphError):
        base_hirzebruch(1, F(3, 2), BaseFamilyParams("two_surfaces", 1))
    with pytest.raises(GraphError):
        BaseFamilyParams("isolated_right", 1, 1, 1)  # c - d >= 1 fails
    with pytest.raises(GraphError):
        BaseFamilyParams("isolated_left", 1, 2, 4)  # not coprime
    with pytest.raises(GraphError):
        BaseFamilyParams("nope", 1)


def test_ruled_base():
    g = base_ruled(1, 1, 2, 0)
    assert validate(g) == []
    sizes = sorted(v.fat.size for v in g.vertices)
    assert sizes == [1, 1]
    a, b = (v.fat.cls for v in g.vertices)
    assert a == b and intersect(a, a) == 0
    assert g.span == 1
    assert [v.fat.genus for v in g.vertices] == [2, 2]
    with pytest.raises(GraphError):
        base_ruled(1, 1, 2, 1)
    with pytest.raises(GraphError):
        base_ruled(1, 1, 0, 0)


def test_ruled_base_with_offset():
    g = base_ruled(1, 2, 1, 1)
    assert validate(g) == []
    assert sorted(v.fat.size for v in g.vertices) == [1, 3]
    assert g.span == 1
    assert {str(v.fat.cls) for v in g.vertices} == {"B-F", "B+F"}


def test_validate_catches_area_rule_violation():
    g = two_surface_base()
    bad_edges = [Edge(e.bottom, e.top, 3, e.cls) for e in g.edges[:1]] + list(g.edges[1:])
    bad = DecoratedGraph.build(g.model, g.omega, g.vertices, bad_edges, (), g.fiber)
    assert any("area rule" in v for v in validate(bad))


def test_validate_catches_interior_fat_vertex():
    g = two_surface_base()
    extra = Vertex("0.mid", F(1, 4), FatData(F(1, 2), 0, g.model.parse("E1")))
    bad = DecoratedGraph.build(
        g.model, g.omega, list(g.vertices) + [extra], g.edges, (), g.fiber
    )
    assert any("interior moment" in v for v in validate(bad))


def test_validate_catches_doubled_extremum_and_bad_labels():
    g = two_surface_base()
    extra = Vertex("0.top2", F(1, 2))
    bad = DecoratedGraph.build(
        g.model, g.omega, list(g.vertices) + [extra], g.edges, (), g.fiber
    )
    assert any("more than one component" in v for v in validate(bad))

    om = CohomologyVector.rational(1, [F(1, 2)])
    m = om.model
    vs = [Vertex("0.min", F(0)), Vertex("0.a", F(1)), Vertex("0.max", F(2))]
    es = [
        Edge("0.min", "0.a", 2, m.parse("L")),
        Edge("0.a", "0.max", 2, m.parse("L")),
    ]
    bad2 = DecoratedGraph.build(m, om, vs, es, (), m.parse("2L"))
    assert any("non-coprime" in v for v in validate(bad2))


def test_normal_form_idempotent():
    g = two_surface_base()
    seen = [g]
    for delta, end in ((F(1, 4), "max"), (F(1, 4), "min")):
        site = [s for s in blowup_sites(seen[-1], delta) if s.end == end][0]
        seen.append(generic_form(apply_blowup(seen[-1], BlowupRequest(site, delta))))
    for graph in seen + [base_ruled(1, 1, 2, 0)]:
        once = normal_form(graph)
        twice = normal_form(once)
        assert canonical_text(once) == canonical_text(twice)


def test_translation_and_flip_equivalence():
    g = two_surface_base()
    assert equivalent(g, translate(g, F(7, 3)))
    assert equivalent(g, flip(g))
    with pytest.raises(LatticeError):
        equivalent(g, base_ruled(1, 1, 2, 0))


def test_normal_form_strips_redundant_edges():
    g = base_ruled(1, 1, 2, 0)
    nf = normal_form(g)
    assert nf.edges == ()
    nf2 = normal_form(two_surface_base())
    assert nf2.edges == ()


def test_break_free_edges_conserves_chain_sums():
    # a proper-transform chain drawn with two adjacent breakable free edges
    om = CohomologyVector.rational(2, [F(1, 2), F(1, 4), F(1, 8), F(1, 16)])
    m = om.model
    P = m.parse
    vs = [
        Vertex("0.min", F(0), FatData(pair(om, P("L-E1")), 0, P("L-E1"))),
        Vertex("0.v1", F(1, 4)),
        Vertex("0.v2", F(3, 8)),
        Vertex("0.v3", F(7, 16)),
        Vertex("0.max", F(1, 2), FatData(pair(om, P("L-E2")), 0, P("L-E2"))),
    ]
    es = [
        Edge("0.min", "0.v1", 1, P("E1-E2")),
        Edge("0.v1", "0.v2", 1, P("E2-E3")),
        Edge("0.v2", "0.v3", 1, P("E3-E4")),
        Edge("0.v3", "0.max", 1, P("E4")),
    ]
    g = DecoratedGraph.build(m, om, vs, es, (), P("E1"))
    assert validate(g) == []
    broken = break_free_edges(g)
    assert validate(broken) == []
    interior = {v.vid for v in broken.interior_vertices()}
    assert not any(
        e.label == 1 and e.bottom in interior and e.top in interior for e in broken.edges
    )
    # every interior vertex now connects straight to both extrema
    for v in broken.interior_vertices():
        up = broken.edges_above(v.vid)[0]
        down = broken.edges_below(v.vid)[0]
        assert up.top == broken.max_vertex.vid
        assert down.bottom == broken.min_vertex.vid
        assert down.cls + up.cls == P("E1")  # chain sum conserved


def test_metric_move_pair_on_one_surface_first_blowup():
    # surface blowup of the one-surface base: the variant whose new chain
    # merges into the old one differs only by a change of generic metric
    g = base_hirzebruch(1, F(1, 2), BaseFamilyParams("one_surface", 1))
    site = [s for s in blowup_sites(g, F(1, 4)) if s.kind == "surface"][0]
    h = apply_blowup(g, BlowupRequest(site, F(1, 4)))
    om = CohomologyVector.rational(1, [F(1, 2), F(1, 4)])
    m = om.model
    P = m.parse
    vs = [
        Vertex("0.min", F(0), FatData(F(1, 4), 0, P("L-E1-E2"))),
        Vertex("0.a", F(1, 2)),
        Vertex("0.max", F(1)),
        Vertex("1.c", F(1, 4)),
    ]
    es = [
        Edge("0.min", "1.c", 1, P("E2")),
        Edge("1.c", "0.a", 1, P("E1-E2")),
        Edge("0.a", "0.max", 1, P("L-E1")),
        Edge("0.min", "0.max", 1, P("L")),
    ]
    unbroken = DecoratedGraph.build(m, om, vs, es, (LedgerEntry(2, "surface", "min"),), P("L"))
    assert validate(unbroken) == []
    assert equivalent(h, unbroken)


def test_metric_move_pair_on_second_level():
    # same move one blowup deeper, where the top has become a fixed surface
    g = base_hirzebruch(1, F(1, 2), BaseFamilyParams("one_surface", 1))
    top = [s for s in blowup_sites(g, F(1, 4)) if s.kind == "extremum"][0]
    g2 = apply_blowup(g, BlowupRequest(top, F(1, 4)))  # fixed surface E2 on top
    bot = [s for s in blowup_sites(g2, F(1, 4)) if s.end == "min"][0]
    g3 = generic_form(apply_blowup(g2, BlowupRequest(bot, F(1, 4))))

    om = CohomologyVector.rational(1, [F(1, 2), F(1, 4), F(1, 4)])
    m = om.model
    P = m.parse
    vs = [
        Vertex("0.min", F(0), FatData(F(1, 4), 0, P("L-E1-E3"))),
        Vertex("0.a", F(1, 2)),
        Vertex("2.c", F(1, 4)),
        Vertex("0.max", F(3, 4), FatData(F(1, 4), 0, P("E2"))),
    ]
    es = [
        Edge("0.min", "2.c", 1, P("E3")),
        Edge("2.c", "0.a", 1, P("E1-E3")),
        Edge("0.a", "0.max", 1, P("L-E1-E2")),
        Edge("0.min", "0.max", 1, P("L-E2")),
    ]
    ledger = (LedgerEntry(2, "extremum", "max"), LedgerEntry(3, "surface", "min"))
    unbroken = DecoratedGraph.build(m, om, vs, es, ledger, P("L-E2"))
    assert validate(unbroken) == []
    assert equivalent(g3, unbroken)


def test_serialization_round_trip():
    g = two_surface_base()
    site = blowup_sites(g, F(1, 4))[0]
    h = generic_form(apply_blowup(g, BlowupRequest(site, F(1, 4))))
    text = canonical_text(h)
    back = parse_graph(text)
    assert canonical_text(back) == text
    assert validate(back) == []
    assert back.ledger == h.ledger


def test_render_dot_deterministic_and_annotated():
    g = two_surface_base()
    dot = render_dot(g)
    assert dot == render_dot(parse_graph(canonical_text(g)))
    assert "size=1 " in dot and "size=1/2" in dot
    nf = normal_form(base_ruled(1, 1, 2, 0))
    ruled_dot = render_dot(nf)
    assert ruled_dot.count("ellipse") == 2
    assert "->" not in ruled_dot  # no non-redundant edges at all


def test_permute_exceptionals():
    g = two_surface_base()
    site = [s for s in blowup_sites(g, F(1, 4)) if s.end == "min"][0]
    h = generic_form(apply_blowup(g, BlowupRequest(site, F(1, 4))))
    site = [s for s in blowup_sites(h, F(1, 4)) if s.end == "min"][0]
    h = generic_form(apply_blowup(h, BlowupRequest(site, F(1, 4))))
    swapped = permute_exceptionals(h, {2: 3, 3: 2})
    assert validate(swapped) == []
    assert equivalent(h, swapped)  # the two blowups carry equal sizes


def test_equivalence_is_an_equivalence_relation():
    g = two_surface_base()
    variants = [g, translate(g, F(5, 7)), flip(g)]
    for a in variants:
        assert equivalent(a, a)
        for b in variants:
            assert equivalent(a, b) == equivalent(b, a)
            for c in variants:
                if equivalent(a, b) and equivalent(b, c):
                    assert equivalent(a, c)
