from fractions import Fraction as F

import pytest

from decgraph.blowup import BlowupRequest, apply_blowup, blowup_sites
from decgraph.enumeration import EnumerationResult, EnumerationSpec, enumerate_graphs
from decgraph.graphs import BaseFamilyParams, base_hirzebruch, base_ruled, generic_form
from decgraph.lattice import LatticeError, SurfaceModel, intersect
from decgraph.obstruct import (
    INTEGRABLE_BLOWUP,
    OBSTRUCTED,
    RULE_NEGATIVE_PAIR,
    RULE_NEGATIVE_SQUARE,
    STABILIZER_ONLY,
    UNOBSTRUCTED,
    RequiredClass,
    certified_classes,
    check_nonextension,
    is_proper_transform_shape,
    last_blowup_classes,
)

RULED_SIZES = (F(3, 5), F(7, 20), F(3, 10))


def ruled_result():
    return enumerate_graphs(
        EnumerationSpec((base_ruled(1, 1, 2, 0),), RULED_SIZES)
    )


def take(g, delta, **match):
    for s in blowup_sites(g, delta):
        if all(getattr(s, k) == v for k, v in match.items()):
            return generic_form(apply_blowup(g, BlowupRequest(s, delta)))
    raise AssertionError("site not found")


def test_proper_transform_shape():
    m = SurfaceModel("ruled", 3, 2)
    assert is_proper_transform_shape(m.parse("E2-E3"))
    assert is_proper_transform_shape(m.parse("E1"))
    assert is_proper_transform_shape(m.parse("E1-E2-E3"))
    assert not is_proper_transform_shape(m.parse("E3-E2"))
    assert not is_proper_transform_shape(m.parse("F-E1"))
    assert not is_proper_transform_shape(m.parse("E1+E2"))
    assert not is_proper_transform_shape(m.parse("2E1-E2"))
    assert not is_proper_transform_shape(m.parse("E1-2E3"))


def test_certified_stabilizer_classes():
    g = base_ruled(1, 1, 2, 0)
    g = take(g, F(3, 5), kind="surface")
    g = take(g, F(7, 20), kind="interior")
    cert = certified_classes(g, 2, STABILIZER_ONLY)
    by_cls = {str(c.cls): c for c in cert}
    assert set(by_cls) == {"B", "B-E1", "E2"}
    assert by_cls["E2"].label == 2 and by_cls["E2"].pointwise_fixed(2)
    assert not by_cls["E2"].pointwise_fixed(3)
    assert by_cls["B"].label is None and by_cls["B"].pointwise_fixed(5)


def test_certified_integrable_adds_proper_transforms():
    g = base_ruled(1, 1, 2, 0)
    g = take(g, F(3, 5), kind="surface")
    g = take(g, F(7, 20), kind="surface", end=g.ledger[0].detail)
    g = take(g, F(3, 10), kind="interior", vertex="2.c")  # type IV pattern
    stab = {str(c.cls) for c in certified_classes(g, 2, STABILIZER_ONLY)}
    full = certified_classes(g, 2, INTEGRABLE_BLOWUP)
    names = {str(c.cls) for c in full}
    assert "E2-E3" in names and "E2-E3" not in stab
    pt = [c for c in full if str(c.cls) == "E2-E3"][0]
    assert pt.justification == "proper_transform"
    assert not pt.pointwise_fixed(2)


def test_required_class_embedded_check():
    m = SurfaceModel("rational", 6)
    RequiredClass(m.parse("E1-E2"), 2)  # square -2, degree 0: a sphere class
    with pytest.raises(LatticeError):
        RequiredClass(m.parse("3L"), 2)  # genus one


def test_ruled_types_get_the_expected_rules():
    res = ruled_result()
    required = [RequiredClass(res.graphs[0].model.parse("E2-E3"), 2)]
    report = check_nonextension(res, required, 2, INTEGRABLE_BLOWUP)
    assert report.all_obstructed and not report.vacuous
    for v in report.verdicts:
        cert = v.certificate
        interior_step = [e for e in v.graph.ledger if e.kind == "interior"]
        if interior_step and interior_step[0].detail == "2":
            assert cert.rule == RULE_NEGATIVE_SQUARE
            assert str(cert.certified.cls) == "E2-E3" and cert.intersection == -2
        else:
            assert cert.rule == RULE_NEGATIVE_PAIR
            assert str(cert.certified.cls) == "E2" and cert.intersection == -1


def test_stabilizer_mode_misses_the_negative_square_case():
    res = ruled_result()
    required = [RequiredClass(res.graphs[0].model.parse("E2-E3"), 2)]
    stab = check_nonextension(res, required, 2, STABILIZER_ONLY)
    integ = check_nonextension(res, required, 2, INTEGRABLE_BLOWUP)
    assert not stab.all_obstructed and integ.all_obstructed
    # enlarging the mode never loses an obstruction
    for a, b in zip(stab.verdicts, integ.verdicts):
        if a.verdict == OBSTRUCTED:
            assert b.verdict == OBSTRUCTED


def test_unobstructed_when_nothing_intersects_negatively():
    base = base_hirzebruch(1, F(1, 2), BaseFamilyParams("two_surfaces", 1))
    res = enumerate_graphs(EnumerationSpec((base,), (F(1, 4),)))
    model = res.graphs[0].model
    required = [RequiredClass(model.parse("E1"), 2)]
    report = check_nonextension(res, required, 2, STABILIZER_ONLY)
    assert any(v.verdict == UNOBSTRUCTED for v in report.verdicts)


def test_certificates_reverify_independently():
    res = ruled_result()
    required = [RequiredClass(res.graphs[0].model.parse("E2-E3"), 2)]
    report = check_nonextension(res, required, 2, INTEGRABLE_BLOWUP)
    for v in report.verdicts:
        c = v.certificate
        assert intersect(c.certified.cls, c.required.cls) == c.intersection
        if c.rule == RULE_NEGATIVE_PAIR:
            assert c.certified.cls != c.required.cls and c.intersection < 0
        else:
            assert c.certified.cls == c.required.cls
            assert intersect(c.certified.cls, c.certified.cls) < 0
            assert not c.certified.pointwise_fixed(c.required.fixed_by)


def test_vacuous_report():
    report = check_nonextension(
        EnumerationResult((), ()), [], 2, STABILIZER_ONLY
    )
    assert report.vacuous and report.all_obstructed


def test_last_blowup_classes_toy_run():
    base = base_hirzebruch(1, F(1, 2), BaseFamilyParams("two_surfaces", 1))
    res = enumerate_graphs(EnumerationSpec((base,), (F(1, 4),)))
    model = res.graphs[0].model
    tracked = last_blowup_classes(res, 2, INTEGRABLE_BLOWUP)
    assert model.parse("E2") in tracked
    assert last_blowup_classes(EnumerationResult((), ()), 2) == set()


def test_certified_requires_sane_arguments():
    g = base_ruled(1, 1, 2, 0)
    with pytest.raises(LatticeError):
        certified_classes(g, 1, STABILIZER_ONLY)
    with pytest.raises(LatticeError):
        certified_classes(g, 2, "magic")
