"""Exact intersection theory on second homology of blowups.

Two surface models are supported: blowups of the projective plane, with
basis (L, E1, ..., Ek), and blowups of a ruled surface over a positive-genus
curve, with basis (B, F, E1, ..., Ek).  All pairings are integer or exact
rational (``fractions.Fraction``); no floats appear anywhere.

Sizes and cohomology classes are normalized so that every size label in a
decorated graph is the pairing of the class vector with the sphere's homology
class.  Class vectors are written (lam; d1..dk) for the plane model and
(lamF, lamB; d1..dk) for the ruled model.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction


RATIONAL = "rational"
RULED = "ruled"

MINUS_ONE = "minus_one"
MINUS_TWO = "minus_two"
NEITHER = "neither"


class LatticeError(ValueError):
    """Raised on model mismatches and malformed inputs."""


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/16', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise LatticeError(f"not an exact rational: {x!r}")


def rat_str(x: Fraction) -> str:
    """Serialize a rational as 'p/q', or 'p' when the denominator is 1."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SurfaceModel:
    """A blowup of the plane (kind='rational') or of a ruled surface.

    ``k`` counts exceptional classes.  ``genus`` is the base-curve genus and
    is only meaningful for the ruled kind, where it must be >= 1.
    """

    kind: str
    k: int
    genus: int = 0

    def __post_init__(self):
        if self.kind not in (RATIONAL, RULED):
            raise LatticeError(f"unknown model kind {self.kind!r}")
        if self.k < 0:
            raise LatticeError("k must be >= 0")
        if self.kind == RULED and self.genus < 1:
            raise LatticeError("ruled model requires genus >= 1")
        if self.kind == RATIONAL and self.genus != 0:
            raise LatticeError("plane model carries no genus")

    @property
    def rank(self) -> int:
        return (1 if self.kind == RATIONAL else 2) + self.k

    @property
    def basis_names(self) -> tuple[str, ...]:
        head = ("L",) if self.kind == RATIONAL else ("B", "F")
        return head + tuple(f"E{i}" for i in range(1, self.k + 1))

    def extend(self) -> "SurfaceModel":
        """The model with one more exceptional class."""
        return SurfaceModel(self.kind, self.k + 1, self.genus)

    def as_json(self) -> dict:
        return {"kind": self.kind, "k": self.k, "genus": self.genus}

    @staticmethod
    def from_json(data: dict) -> "SurfaceModel":
        return SurfaceModel(data["kind"], data["k"], data.get("genus", 0))

    def zero(self) -> "HomologyClass":
        return HomologyClass(self, (0,) * self.rank)

    def unit(self, name: str) -> "HomologyClass":
        """The basis class with the given name ('L', 'B', 'F', or 'Ei')."""
        try:
            pos = self.basis_names.index(name)
        except ValueError:
            raise LatticeError(f"{name!r} is not a basis class of {self}")
        coeffs = [0] * self.rank
        coeffs[pos] = 1
        return HomologyClass(self, tuple(coeffs))

    def exceptional(self, i: int) -> "HomologyClass":
        return self.unit(f"E{i}")

    def parse(self, text: str) -> "HomologyClass":
        return HomologyClass.parse(self, text)

    def __str__(self):
        if self.kind == RATIONAL:
            return f"rational k={self.k}"
        return f"ruled genus={self.genus} k={self.k}"


_TERM = re.compile(r"([+-]?)(\d*)(L|B|F|E(\d+))")


@dataclass(frozen=True)
class HomologyClass:
    """An integer class in the fixed basis of a surface model."""

    model: SurfaceModel
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.model.rank:
            raise LatticeError(
                f"coefficient vector of length {len(self.coeffs)} for {self.model}"
            )
        if not all(isinstance(c, int) for c in self.coeffs):
            raise LatticeError("homology coefficients must be integers")

    @staticmethod
    def parse(model: SurfaceModel, text: str) -> "HomologyClass":
        """Parse expressions like 'L-E1-E4-E5', '2B+3F-E2', '-E3', '0'."""
        text = text.replace(" ", "")
        if text in ("0", ""):
            return model.zero()
        coeffs = [0] * model.rank
        pos = 0
        for m in _TERM.finditer(text):
            if m.start() != pos:
                raise LatticeError(f"cannot parse class {text!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            mult = int(m.group(2)) if m.group(2) else 1
            name = m.group(3)
            try:
                idx = model.basis_names.index(name)
            except ValueError:
                raise LatticeError(f"{name!r} not in basis of {model}")
            coeffs[idx] += sign * mult
        if pos != len(text):
            raise LatticeError(f"cannot parse class {text!r}")
        return HomologyClass(model, tuple(coeffs))

    def _check(self, other: "HomologyClass"):
        if self.model != other.model:
            raise LatticeError(f"model mismatch: {self.model} vs {other.model}")

    def __add__(self, other):
        self._check(other)
        return HomologyClass(
            self.model, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other):
        self._check(other)
        return HomologyClass(
            self.model, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self):
        return HomologyClass(self.model, tuple(-a for a in self.coeffs))

    def __mul__(self, n: int):
        return HomologyClass(self.model, tuple(n * a for a in self.coeffs))

    __rmul__ = __mul__

    def embed(self, model: SurfaceModel) -> "HomologyClass":
        """Re-express in a model with more exceptional classes (zero-padded)."""
        if model.kind != self.model.kind or model.k < self.model.k:
            raise LatticeError(f"cannot embed {self.model} into {model}")
        pad = (0,) * (model.rank - self.model.rank)
        return HomologyClass(model, self.coeffs + pad)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def exceptional_support(self) -> tuple[int, ...]:
        """Indices i with a nonzero Ei coefficient."""
        head = 1 if self.model.kind == RATIONAL else 2
        return tuple(
            i for i in range(1, self.model.k + 1) if self.coeffs[head + i - 1] != 0
        )

    def coeff(self, name: str) -> int:
        return self.coeffs[self.model.basis_names.index(name)]

    def __str__(self):
        parts = []
        for name, c in zip(self.model.basis_names, self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else ("+" if parts else "")
            mag = abs(c)
            parts.append(f"{sign}{'' if mag == 1 else mag}{name}")
        return "".join(parts) if parts else "0"


def intersect(a: HomologyClass, b: HomologyClass) -> int:
    """Intersection number: L.L=1, Ei.Ei=-1, B.F=1, all else orthogonal."""
    a._check(b)
    if a.model.kind == RATIONAL:
        head = a.coeffs[0] * b.coeffs[0]
        start = 1
    else:
        head = a.coeffs[0] * b.coeffs[1] + a.coeffs[1] * b.coeffs[0]
        start = 2
    return head - sum(x * y for x, y in zip(a.coeffs[start:], b.coeffs[start:]))


def canonical_chern(model: SurfaceModel) -> HomologyClass:
    """Dual of the first Chern class: 3L - sum Ei, or 2B + (2-2g)F - sum Ei."""
    if model.kind == RATIONAL:
        coeffs = (3,) + (-1,) * model.k
    else:
        coeffs = (2, 2 - 2 * model.genus) + (-1,) * model.k
    return HomologyClass(model, coeffs)


def chern_pairing(c: HomologyClass) -> int:
    return intersect(canonical_chern(c.model), c)


def adjunction_genus(c: HomologyClass) -> Fraction:
    """1 + (c.c - <c1,c>)/2; zero exactly for embedded sphere classes."""
    return 1 + Fraction(intersect(c, c) - chern_pairing(c), 2)


def classify_negative(c: HomologyClass) -> str:
    """MINUS_ONE (square -1, c1-degree 1), MINUS_TWO (-2, 0), or NEITHER."""
    sq = intersect(c, c)
    deg = chern_pairing(c)
    if sq == -1 and deg == 1:
        return MINUS_ONE
    if sq == -2 and deg == 0:
        return MINUS_TWO
    return NEITHER


@dataclass(frozen=True)
class CohomologyVector:
    """A class vector (lam; d1..dk) or (lamF, lamB; d1..dk), exact entries."""

    model: SurfaceModel
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.model.rank:
            raise LatticeError(
                f"entry vector of length {len(self.entries)} for {self.model}"
            )
        object.__setattr__(self, "entries", tuple(rat(x) for x in self.entries))

    @staticmethod
    def rational(lam, deltas) -> "CohomologyVector":
        deltas = tuple(rat(d) for d in deltas)
        model = SurfaceModel(RATIONAL, len(deltas))
        return CohomologyVector(model, (rat(lam),) + deltas)

    @staticmethod
    def ruled(lam_f, lam_b, deltas, genus=1) -> "CohomologyVector":
        deltas = tuple(rat(d) for d in deltas)
        model = SurfaceModel(RULED, len(deltas), genus)
        return CohomologyVector(model, (rat(lam_f), rat(lam_b)) + deltas)

    @property
    def deltas(self) -> tuple[Fraction, ...]:
        start = 1 if self.model.kind == RATIONAL else 2
        return self.entries[start:]

    def delta(self, i: int) -> Fraction:
        return self.deltas[i - 1]

    def extend(self, delta) -> "CohomologyVector":
        return CohomologyVector(self.model.extend(), self.entries + (rat(delta),))

    def __str__(self):
        start = 1 if self.model.kind == RATIONAL else 2
        head = ",".join(rat_str(x) for x in self.entries[:start])
        tail = ",".join(rat_str(x) for x in self.entries[start:])
        return f"({head};{tail})"


def pair(omega: CohomologyVector, c: HomologyClass) -> Fraction:
    """Pairing of a class vector with a homology class.

    <omega, L> = lam, <omega, Ei> = di, <omega, B> = lamB, <omega, F> = lamF.
    """
    if omega.model != c.model:
        raise LatticeError(f"model mismatch: {omega.model} vs {c.model}")
    if omega.model.kind == RATIONAL:
        weights = omega.entries
    else:
        lam_f, lam_b = omega.entries[0], omega.entries[1]
        weights = (lam_b, lam_f) + omega.entries[2:]
    return sum((w * x for w, x in zip(weights, c.coeffs)), Fraction(0))


def volume(omega: CohomologyVector) -> Fraction:
    """Self-pairing: lam^2 - sum di^2, or 2*lamF*lamB - sum di^2."""
    if omega.model.kind == RATIONAL:
        head = omega.entries[0] ** 2
    else:
        head = 2 * omega.entries[0] * omega.entries[1]
    return head - sum((d * d for d in omega.deltas), Fraction(0))


def is_reduced(omega: CohomologyVector) -> bool:
    """Weakly decreasing sizes plus the model's sum inequality.

    Plane model (needs k >= 3): d1 + d2 + d3 <= lam.
    Ruled model (needs k >= 2): d1 + d2 <= lamF.
    """
    d = omega.deltas
    if omega.model.kind == RATIONAL:
        if omega.model.k < 3:
            raise LatticeError("reduced form needs k >= 3 for the plane model")
        bound, take = omega.entries[0], 3
    else:
        if omega.model.k < 2:
            raise LatticeError("reduced form needs k >= 2 for the ruled model")
        bound, take = omega.entries[0], 2
    if any(d[i] < d[i + 1] for i in range(len(d) - 1)):
        return False
    return sum(d[:take], Fraction(0)) <= bound


def det_int(rows: list[list[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for j in range(n - 1):
        if m[j][j] == 0:
            for i in range(j + 1, n):
                if m[i][j] != 0:
                    m[j], m[i] = m[i], m[j]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(j + 1, n):
            for c in range(j + 1, n):
                m[i][c] = (m[i][c] * m[j][j] - m[i][j] * m[j][c]) // prev
            m[i][j] = 0
        prev = m[j][j]
    return sign * m[n - 1][n - 1]


def basis_check(classes: list[HomologyClass]) -> bool:
    """Whether the classes form an integral basis (determinant +-1)."""
    if not classes:
        raise LatticeError("empty class list")
    model = classes[0].model
    for c in classes:
        if c.model != model:
            raise LatticeError("basis candidates must share one model")
    if len(classes) != model.rank:
        raise LatticeError(
            f"need exactly {model.rank} classes for {model}, got {len(classes)}"
        )
    return abs(det_int([list(c.coeffs) for c in classes])) == 1


def enumerate_negative_classes(
    model: SurfaceModel, coefficient_bound: int
) -> list[HomologyClass]:
    """All classes with coefficients in [-bound, bound] of square -1 or -2.

    Box search; returns a deterministic, coefficient-sorted list of classes
    classified MINUS_ONE or MINUS_TWO.
    """
    if coefficient_bound < 1:
        raise LatticeError("coefficient bound must be >= 1")
    span = range(-coefficient_bound, coefficient_bound + 1)
    found = []
    for coeffs in itertools.product(span, repeat=model.rank):
        c = HomologyClass(model, coeffs)
        if classify_negative(c) != NEITHER:
            found.append(c)
    found.sort(key=lambda c: c.coeffs)
    return found


def solve_rational(matrix, rhs):
    """Solve a square exact-rational linear system by Gaussian elimination.

    Used as the dual-basis oracle in tests; returns a list of Fractions or
    raises LatticeError if the matrix is singular.
    """
    n = len(matrix)
    m = [[rat(x) for x in row] + [rat(b)] for row, b in zip(matrix, rhs)]
    for j in range(n):
        piv = next((i for i in range(j, n) if m[i][j] != 0), None)
        if piv is None:
            raise LatticeError("singular system")
        m[j], m[piv] = m[piv], m[j]
        inv = 1 / m[j][j]
        m[j] = [x * inv for x in m[j]]
        for i in range(n):
            if i != j and m[i][j] != 0:
                f = m[i][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[j])]
    return [m[i][n] for i in range(n)]
