"""Scenario definitions and the end-to-end verification pipeline.

A scenario bundles a blowup class vector, an ordered size list, the classes
the cyclic action fixes, a certification mode, and the curve lists for the
positivity checks.  Running one enumerates every circle action with that
class vector, then certifies that each enumerated action meets a fixed class
negatively, and finally replays the positivity and cone computations that
justify the construction itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import cone as cone_mod
from .cone import GeneratorList, builtin_generator_lists, cone_membership, nakai_check
from .enumeration import (
    EnumerationResult,
    EnumerationSpec,
    classify_sequence_types,
    cross_check_instantiation,
    enumerate_graphs,
    hirzebruch_base_graphs,
    ruled_base_graphs,
)
from .graphs import canonical_text, render_dot
from .lattice import (
    RATIONAL,
    RULED,
    CohomologyVector,
    HomologyClass,
    SurfaceModel,
    is_reduced,
    rat,
    rat_str,
    volume,
)
from .obstruct import (
    INTEGRABLE_BLOWUP,
    STABILIZER_ONLY,
    ObstructionReport,
    RequiredClass,
    check_nonextension,
    last_blowup_classes,
)

DEFAULT_REPS = ((1, 1), (1, 2), (2, 1))


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str  # 'rational' | 'ruled'
    lam: Fraction  # lam for the plane, lam_f for the ruled model
    lam_b: Fraction | None
    base_deltas: tuple[Fraction, ...]
    sizes: tuple[Fraction, ...]
    required: tuple[tuple[str, int], ...]  # (class text, cyclic order)
    n: int
    mode: str
    genus: int = 2
    reps: tuple[tuple[int, int], ...] = DEFAULT_REPS
    permute_equal_sizes: bool = True
    generator_key: str | None = None
    audit_curves: bool = False  # gate on every generator being a (-1)/(-2) class
    membership_targets: tuple[str, ...] = ()
    picard_prefix: int | None = None
    witness_family: str | None = None  # key into WITNESS_FAMILIES
    classify_types: bool = False
    advisory: bool = False
    expected_final_count: int | None = None

    @property
    def final_model(self) -> SurfaceModel:
        k = len(self.base_deltas) + len(self.sizes)
        if self.kind == RATIONAL:
            return SurfaceModel(RATIONAL, k)
        return SurfaceModel(RULED, k, self.genus)

    @property
    def final_omega(self) -> CohomologyVector:
        deltas = self.base_deltas + self.sizes
        if self.kind == RATIONAL:
            return CohomologyVector.rational(self.lam, deltas)
        return CohomologyVector.ruled(self.lam, self.lam_b, deltas, self.genus)

    def required_classes(self) -> list[RequiredClass]:
        model = self.final_model
        return [
            RequiredClass(model.parse(text), fixed_by) for text, fixed_by in self.required
        ]

    def base_graphs(self):
        if self.kind == RATIONAL:
            if len(self.base_deltas) != 1:
                raise ScenarioError("plane scenarios start from one base size")
            return hirzebruch_base_graphs(self.lam, self.base_deltas[0], self.reps)
        if self.base_deltas:
            raise ScenarioError("ruled scenarios start from the unblown surface")
        return ruled_base_graphs(self.lam, self.lam_b, self.genus)

    def enumeration_spec(self) -> EnumerationSpec:
        bases = tuple(g for _, g in self.base_graphs())
        return EnumerationSpec(bases, self.sizes, self.permute_equal_sizes)

    def generator_list(self) -> GeneratorList | None:
        if self.generator_key is None:
            return None
        return builtin_generator_lists(self.genus)[self.generator_key]


def _witness_in_six_blowup_family(c: HomologyClass) -> bool:
    """The hand-derived case list for the cp2-six scenario.

    E5; E1-Ei-E5 (i in 2..4); E1-Ei-E6 (i in 2..5); L minus three of
    E2..E5; L minus four of E2..E6.
    """
    coeffs = c.coeffs
    lead, exc = coeffs[0], coeffs[1:]
    if any(x not in (0, -1, 1) for x in coeffs):
        return False
    neg = {i for i, x in enumerate(exc, start=1) if x == -1}
    pos = {i for i, x in enumerate(exc, start=1) if x == 1}
    if lead == 0 and pos == {5} and not neg:
        return True
    if lead == 0 and pos == {1} and len(neg) == 2:
        if 5 in neg and neg - {5} <= {2, 3, 4}:
            return True
        if 6 in neg and neg - {6} <= {2, 3, 4, 5}:
            return True
        return False
    if lead == 1 and not pos:
        if len(neg) == 3 and neg <= {2, 3, 4, 5}:
            return True
        if len(neg) == 4 and neg <= {2, 3, 4, 5, 6}:
            return True
    return False


WITNESS_FAMILIES = {"six-blowup": _witness_in_six_blowup_family}


def _ruled_general_sizes(r: int) -> tuple[Fraction, ...]:
    if r <= 2 or r % 2 != 0:
        raise ScenarioError("the generalized ruled scenario needs an even r > 2")
    sizes = [Fraction(2 ** (2 * r - i) + 1, 2 ** (2 * r)) for i in range(1, r + 1)]
    sizes.append(Fraction(1, 2**r))
    return tuple(sizes)


def builtin_scenarios() -> dict[str, Scenario]:
    out = {}
    out["cp2-six"] = Scenario(
        name="cp2-six",
        kind=RATIONAL,
        lam=Fraction(1),
        lam_b=None,
        base_deltas=(Fraction(1, 2),),
        sizes=(
            Fraction(1, 4), Fraction(1, 4), Fraction(1, 4),
            Fraction(3, 16), Fraction(1, 8),
        ),
        required=(("E1-E2", 2), ("L-E3-E4", 2), ("E5-E6", 2)),
        n=2,
        mode=STABILIZER_ONLY,
        generator_key="plane-six",
        audit_curves=True,
        picard_prefix=7,
        witness_family="six-blowup",
    )
    out["cp2-six-alt"] = Scenario(
        name="cp2-six-alt",
        kind=RATIONAL,
        lam=Fraction(1),
        lam_b=None,
        base_deltas=(Fraction(1, 2),),
        sizes=out["cp2-six"].sizes,
        required=(("E1", 2), ("E5-E6", 2), ("L-E2-E3-E4", 2)),
        n=2,
        mode=STABILIZER_ONLY,
        generator_key="plane-six-alt",
        audit_curves=True,
    )
    out["ruled-three"] = Scenario(
        name="ruled-three",
        kind=RULED,
        lam=Fraction(1),
        lam_b=Fraction(1),
        base_deltas=(),
        sizes=(Fraction(3, 5), Fraction(7, 20), Fraction(3, 10)),
        required=(("E2-E3", 2),),
        n=2,
        mode=INTEGRABLE_BLOWUP,
        generator_key="ruled-three",
        membership_targets=("F", "B"),
        classify_types=True,
    )
    out["ruled-general-4"] = ruled_general_scenario(4)
    return out


def ruled_general_scenario(r: int) -> Scenario:
    sizes = _ruled_general_sizes(r)
    required = [(f"E{r}-E{r + 1}", r)]
    required += [(f"E{2 * i}-E{2 * i + 1}", 2) for i in range(1, r // 2)]
    return Scenario(
        name=f"ruled-general-{r}",
        kind=RULED,
        lam=Fraction(1),
        lam_b=Fraction(1),
        base_deltas=(),
        sizes=sizes,
        required=tuple(required),
        n=r,
        mode=INTEGRABLE_BLOWUP,
        advisory=True,
    )


def load_scenario(name_or_path: str) -> Scenario:
    builtins = builtin_scenarios()
    if name_or_path in builtins:
        return builtins[name_or_path]
    if name_or_path.startswith("ruled-general-"):
        return ruled_general_scenario(int(name_or_path.rsplit("-", 1)[1]))
    try:
        with open(name_or_path, encoding="utf-8") as fh:
            return parse_scenario_text(fh.read())
    except OSError as exc:
        raise ScenarioError(f"no builtin or readable scenario {name_or_path!r}: {exc}")


def parse_scenario_text(text: str) -> Scenario:
    """Parse the line-oriented key/value scenario format."""
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        fields[key] = value.strip()
    try:
        kind = fields["kind"]
        if kind not in (RATIONAL, RULED):
            raise ScenarioError(f"unknown kind {kind!r}")
        sizes = tuple(rat(x) for x in fields["sizes"].split())
        required = []
        for item in fields.get("required", "").split():
            cls_text, _, order = item.partition("@")
            required.append((cls_text, int(order or fields.get("n", "2"))))
        reps = DEFAULT_REPS
        if "reps" in fields:
            reps = tuple(
                tuple(int(x) for x in pair_.split(",")) for pair_ in fields["reps"].split()
            )
        if kind == RATIONAL:
            lam = rat(fields["lam"])
            lam_b = None
            base_deltas = tuple(rat(x) for x in fields["base-sizes"].split())
        else:
            lam = rat(fields["lam-f"])
            lam_b = rat(fields["lam-b"])
            base_deltas = ()
        return Scenario(
            name=fields.get("name", "custom"),
            kind=kind,
            lam=lam,
            lam_b=lam_b,
            base_deltas=base_deltas,
            sizes=sizes,
            required=tuple(required),
            n=int(fields.get("n", "2")),
            mode=fields.get("mode", STABILIZER_ONLY),
            genus=int(fields.get("genus", "2")),
            reps=reps,
            permute_equal_sizes=fields.get("permute-equal-sizes", "on") != "off",
            generator_key=fields.get("generators") or None,
            audit_curves=fields.get("audit-curves", "off") == "on",
            membership_targets=tuple(fields.get("membership", "").split()),
            picard_prefix=int(fields["picard-prefix"]) if "picard-prefix" in fields else None,
            witness_family=fields.get("witness-family") or None,
            classify_types=fields.get("classify-types", "off") == "on",
            advisory=fields.get("advisory", "off") == "on",
        )
    except (KeyError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}")


def scenario_text(s: Scenario) -> str:
    lines = [f"name {s.name}", f"kind {s.kind}"]
    if s.kind == RATIONAL:
        lines.append(f"lam {rat_str(s.lam)}")
        lines.append("base-sizes " + " ".join(rat_str(x) for x in s.base_deltas))
    else:
        lines.append(f"lam-f {rat_str(s.lam)}")
        lines.append(f"lam-b {rat_str(s.lam_b)}")
        lines.append(f"genus {s.genus}")
    lines.append("sizes " + " ".join(rat_str(x) for x in s.sizes))
    lines.append("required " + " ".join(f"{t}@{o}" for t, o in s.required))
    lines.append(f"n {s.n}")
    lines.append(f"mode {s.mode}")
    lines.append("reps " + " ".join(f"{c},{d}" for c, d in s.reps))
    lines.append(
        "permute-equal-sizes " + ("on" if s.permute_equal_sizes else "off")
    )
    if s.generator_key:
        lines.append(f"generators {s.generator_key}")
    if s.audit_curves:
        lines.append("audit-curves on")
    if s.membership_targets:
        lines.append("membership " + " ".join(s.membership_targets))
    if s.picard_prefix is not None:
        lines.append(f"picard-prefix {s.picard_prefix}")
    if s.witness_family:
        lines.append(f"witness-family {s.witness_family}")
    if s.classify_types:
        lines.append("classify-types on")
    if s.advisory:
        lines.append("advisory on")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class RunOutcome:
    scenario: Scenario
    report: dict
    result: EnumerationResult
    obstruction: ObstructionReport
    passed: bool

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def _certificate_json(cert) -> dict | None:
    if cert is None:
        return None
    return {
        "certified": str(cert.certified.cls),
        "certified_coeffs": list(cert.certified.cls.coeffs),
        "justification": cert.certified.justification,
        "stabilizer": cert.certified.label,
        "required": str(cert.required.cls),
        "required_coeffs": list(cert.required.cls.coeffs),
        "fixed_by": cert.required.fixed_by,
        "intersection": cert.intersection,
        "rule": cert.rule,
    }


def run_scenario(scenario: Scenario) -> RunOutcome:
    """Full pipeline: reducedness, enumeration, obstruction, cone checks."""
    report: dict = {
        "scenario": scenario.name,
        "model": scenario.final_model.as_json(),
        "omega": str(scenario.final_omega),
        "sizes": [rat_str(s) for s in scenario.sizes],
        "mode": scenario.mode,
        "n": scenario.n,
        "advisory": scenario.advisory,
    }
    gates: dict[str, bool] = {}

    omega = scenario.final_omega
    report["reduced"] = gates["reduced"] = is_reduced(omega)
    report["square"] = rat_str(volume(omega))
    gates["positive_square"] = volume(omega) > 0

    if scenario.kind == RATIONAL:
        cross_ok = True
        try:
            cross_check_instantiation(
                scenario.lam, scenario.base_deltas[0], scenario.reps, scenario.sizes
            )
        except Exception as exc:  # loud failure: instantiation unsound
            cross_ok = False
            report["cross_check_error"] = str(exc)
        report["cross_check"] = gates["cross_check"] = cross_ok

    result = enumerate_graphs(scenario.enumeration_spec())
    report["enumeration"] = {
        "levels": [
            {
                "depth": lv.depth,
                "size": rat_str(lv.size),
                "sites": lv.sites,
                "kept": lv.kept,
                "merged": lv.merged,
            }
            for lv in result.branch_log
        ],
        "final_count": len(result.graphs),
    }
    if scenario.expected_final_count is not None:
        gates["final_count"] = len(result.graphs) == scenario.expected_final_count

    obstruction = check_nonextension(
        result, scenario.required_classes(), scenario.n, scenario.mode
    )
    report["graphs"] = [
        {
            "ledger": [str(entry) for entry in v.graph.ledger],
            "verdict": v.verdict,
            "certificate": _certificate_json(v.certificate),
        }
        for v in obstruction.verdicts
    ]
    report["obstruction"] = {
        "all_obstructed": obstruction.all_obstructed,
        "vacuous": obstruction.vacuous,
    }
    if scenario.advisory:
        report["obstruction"]["advisory_verdict"] = (
            "extension excluded" if obstruction.all_obstructed else "inconclusive"
        )
    else:
        gates["all_obstructed"] = obstruction.all_obstructed

    if scenario.classify_types:
        buckets = classify_sequence_types(result)
        report["types"] = {k: len(v) for k, v in buckets.items()}
        gates["types_total"] = not buckets["unclassified"]

    if scenario.witness_family:
        family = WITNESS_FAMILIES[scenario.witness_family]
        witnesses = last_blowup_classes(result, scenario.n, scenario.mode)
        report["witness_classes"] = sorted(str(c) for c in witnesses)
        gates["witness_family"] = all(family(c) for c in witnesses)

    gens = scenario.generator_list()
    if gens is not None:
        nakai = nakai_check(omega, gens)
        report["nakai"] = {
            "square": rat_str(nakai.square),
            "pairings": [
                {"class": str(c), "pairing": rat_str(p)} for c, p in nakai.pairings
            ],
            "passed": nakai.passed,
        }
        gates["nakai"] = nakai.passed
        audit = cone_mod.curve_list_audit(gens)
        report["curve_audit"] = {
            "minus_one": audit.count("minus_one"),
            "minus_two": audit.count("minus_two"),
            "flagged": [str(e.cls) for e in audit.flagged],
        }
        if scenario.audit_curves:
            gates["curve_audit"] = not audit.flagged
        if scenario.picard_prefix:
            ok = cone_mod.verify_picard_basis(
                list(gens.generators[: scenario.picard_prefix])
            )
            report["picard_basis"] = gates["picard_basis"] = ok
        if scenario.membership_targets:
            memberships = {}
            ok = True
            for name in scenario.membership_targets:
                target = gens.model.parse(name)
                outcome = cone_membership(target, gens)
                if isinstance(outcome, cone_mod.ConeWitness):
                    memberships[name] = {
                        "member": True,
                        "witness": [rat_str(a) for a in outcome.coefficients],
                    }
                else:
                    ok = False
                    memberships[name] = {
                        "member": False,
                        "separating": [rat_str(a) for a in outcome.functional],
                    }
            report["membership"] = memberships
            gates["membership"] = ok

    report["gates"] = gates
    passed = all(gates.values())
    report["passed"] = passed
    return RunOutcome(scenario, report, result, obstruction, passed)


# ---------------------------------------------------------------------------
# file export


def export_graphs(result: EnumerationResult, out_dir, as_dot: bool = False) -> list[str]:
    """Write one file per graph plus a manifest; deterministic names."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    names = []
    for i, g in enumerate(result.graphs):
        name = f"graph-{i:03d}." + ("dot" if as_dot else "txt")
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(render_dot(g) if as_dot else canonical_text(g))
        names.append(name)
    manifest = {
        "count": len(result.graphs),
        "files": names,
        "levels": [
            {"depth": lv.depth, "size": rat_str(lv.size), "kept": lv.kept}
            for lv in result.branch_log
        ],
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return names
