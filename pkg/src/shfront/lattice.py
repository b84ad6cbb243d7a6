"""Hexagonal and square Fourier lattices and exact front directions.

Directions are only representable through rational data: a direction vector
(sqrt(3)*a, b) on the hexagonal lattice or (a, b) on the square lattice with
integer a, b.  This makes the cotangent of the angle an element of sqrt(3)*Q
(hex) or Q (square), which is exactly the class of angles with a spectral gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

Kind = Literal["hex", "square"]

SQRT3 = math.sqrt(3.0)

# Cartesian generators
HEX_K1 = (1.0, 0.0)
HEX_K2 = (-0.5, SQRT3 / 2.0)
HEX_K3 = (-0.5, -SQRT3 / 2.0)
SQUARE_K1 = (1.0, 0.0)
SQUARE_K2 = (0.0, 1.0)


class LatticeError(ValueError):
    pass


def _check_kind(kind: str) -> None:
    if kind not in ("hex", "square"):
        raise LatticeError(f"unknown lattice kind {kind!r}")


@dataclass(frozen=True)
class LatticeVector:
    n1: int
    n2: int
    kind: Kind

    @property
    def kx(self) -> float:
        if self.kind == "hex":
            return self.n1 - 0.5 * self.n2
        return float(self.n1)

    @property
    def ky(self) -> float:
        if self.kind == "hex":
            return 0.5 * SQRT3 * self.n2
        return float(self.n2)

    @property
    def norm_sq_int(self) -> int:
        """|gamma|^2, which is an integer on both lattices."""
        if self.kind == "hex":
            return self.n1 * self.n1 - self.n1 * self.n2 + self.n2 * self.n2
        return self.n1 * self.n1 + self.n2 * self.n2

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq_int)

    @property
    def is_critical(self) -> bool:
        return self.norm_sq_int == 1

    def vec(self) -> tuple[float, float]:
        return (self.kx, self.ky)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(self.n1 + other.n1, self.n2 + other.n2, self.kind)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.n1, -self.n2, self.kind)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return self + (-other)

    def scale(self, m: int) -> "LatticeVector":
        return LatticeVector(m * self.n1, m * self.n2, self.kind)


def generators(kind: Kind) -> list[LatticeVector]:
    """k1, k2 (and k3 = -k1-k2 for hex)."""
    _check_kind(kind)
    if kind == "hex":
        return [LatticeVector(1, 0, "hex"), LatticeVector(0, 1, "hex"), LatticeVector(-1, -1, "hex")]
    return [LatticeVector(1, 0, "square"), LatticeVector(0, 1, "square")]


def critical_modes(kind: Kind) -> list[LatticeVector]:
    gens = generators(kind)
    return gens + [-g for g in gens]


@dataclass(frozen=True)
class AngleSpec:
    """Direction vector (sqrt(3)*a, b) for hex, (a, b) for square.

    cot(theta) = sqrt(3)*a/b (hex) or a/b (square); b = 0 is the x axis.
    """

    a: int
    b: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise LatticeError("zero direction vector")
        g = math.gcd(self.a, self.b)
        if g != 1:
            object.__setattr__(self, "a", self.a // g)
            object.__setattr__(self, "b", self.b // g)

    @property
    def is_axis(self) -> bool:
        return self.b == 0 and self.a > 0

    def cot_ratio(self) -> Fraction | None:
        """p/q of the cotangent multiplier, None on the x axis."""
        if self.b == 0:
            return None
        return Fraction(self.a, self.b)

    def __str__(self) -> str:
        if self.is_axis:
            return "0"
        return f"{self.a}/{self.b}"


AXIS_X = AngleSpec(1, 0)


def parse_angle(text: str, kind: Kind) -> AngleSpec:
    """Accepts '0'/'axis', 'pi/6' (hex), 'pi/4' (square) or a cotangent ratio 'p/q'.

    The ratio p/q means cot(theta) = sqrt(3)*p/q on the hexagonal lattice and
    cot(theta) = p/q on the square lattice.  Floating angles are refused.
    """
    _check_kind(kind)
    t = text.strip().lower().replace(" ", "")
    if t in ("0", "axis", "axis_x", "x"):
        return AXIS_X
    if t == "pi/6":
        if kind != "hex":
            raise LatticeError("pi/6 has an irrational cotangent on the square lattice")
        return AngleSpec(1, 1)
    if t == "pi/4":
        if kind != "square":
            raise LatticeError("pi/4 is not representable on the hexagonal lattice")
        return AngleSpec(1, 1)
    if t.startswith("cot="):
        t = t[4:]
    try:
        frac = Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeError(f"cannot parse exact angle {text!r}") from exc
    if "." in t or "e" in t:
        raise LatticeError(f"floating angle {text!r} refused; give a ratio p/q")
    return AngleSpec(frac.numerator, frac.denominator)


@dataclass(frozen=True)
class Direction:
    kind: Kind
    angle: AngleSpec
    d: tuple[float, float]
    d_perp: tuple[float, float]
    proj: tuple[float, ...]
    degenerate_mode: int | None  # 1-based generator index with d.k_j = 0
    gap_admissible: bool = True
    theta: float = field(default=0.0)

    def axial(self, g: LatticeVector) -> float:
        return self.d[0] * g.kx + self.d[1] * g.ky

    def transverse(self, g: LatticeVector) -> float:
        return self.d_perp[0] * g.kx + self.d_perp[1] * g.ky

    def proj_sq(self, j: int) -> float:
        """(d.k_j)^2 for 1-based j, from exact integer arithmetic."""
        return _proj_sq_exact(self.kind, self.angle, j)


def _proj_numerators(kind: Kind, a: int, b: int) -> tuple[list[int], int, bool]:
    """Integer numerators n_j with d.k_j = s * n_j / (2 * sqrt(N)), plus N.

    For hex s = sqrt(3) (so d.k_j = sqrt(3) n_j / (2 sqrt(N))), N = 3a^2 + b^2.
    For square s = 2, N = a^2 + b^2.
    """
    if kind == "hex":
        n = 3 * a * a + b * b
        # d = (sqrt3 a, b)/sqrt(N); k1 = (1,0); k2 = (-1/2, sqrt3/2)
        return [2 * a, b - a, -a - b], n, True
    n = a * a + b * b
    return [a, b], n, False


def _proj_sq_exact(kind: Kind, angle: AngleSpec, j: int) -> float:
    nums, n, is_hex = _proj_numerators(kind, angle.a, angle.b)
    num = nums[j - 1]
    if is_hex:
        return float(Fraction(3 * num * num, 4 * n))
    return float(Fraction(num * num, n))


def _in_sector(kind: Kind, a: int, b: int) -> bool:
    if b < 0 or a <= 0:
        return False
    if kind == "hex":
        return a >= b  # cot >= sqrt(3)  <=>  theta <= pi/6
    return a > b  # theta < pi/4


def make_direction(kind: Kind, angle: AngleSpec) -> Direction:
    _check_kind(kind)
    a, b = angle.a, angle.b
    if not _in_sector(kind, a, b):
        sector = "[0, pi/6]" if kind == "hex" else "[0, pi/4)"
        raise LatticeError(f"angle {angle} lies outside the fundamental sector {sector}")
    if kind == "hex":
        x, y = SQRT3 * a, float(b)
    else:
        x, y = float(a), float(b)
    r = math.hypot(x, y)
    d = (x / r, y / r)
    d_perp = (-d[1], d[0])
    nums, n, is_hex = _proj_numerators(kind, a, b)
    rootn = math.sqrt(n)
    if is_hex:
        proj = tuple(SQRT3 * m / (2.0 * rootn) for m in nums)
    else:
        proj = tuple(m / rootn for m in nums)
    # exact zero detection from the integer numerators
    degenerate = None
    for j, m in enumerate(nums, start=1):
        if m == 0:
            degenerate = j
    proj = tuple(0.0 if m == 0 else p for m, p in zip(nums, proj))
    if b == 0:
        d, d_perp = (1.0, 0.0), (0.0, 1.0)
    theta = math.atan2(d[1], d[0])
    return Direction(kind, AngleSpec(a, b), d, d_perp, proj, degenerate, True, theta)


def symmetry_images(kind: Kind, angle: AngleSpec) -> list[AngleSpec]:
    """All images of a direction vector under the lattice point group (D6 or D4)."""
    _check_kind(kind)
    out = []
    a, b = Fraction(angle.a), Fraction(angle.b)
    vecs = []
    for _ in range(6 if kind == "hex" else 4):
        vecs.append((a, b))
        vecs.append((a, -b))
        if kind == "hex":
            # rotation by 60 degrees of (sqrt3 a, b)
            a, b = (a - b) / 2, (3 * a + b) / 2
        else:
            a, b = -b, a
    for va, vb in vecs:
        den = math.lcm(va.denominator, vb.denominator)
        out.append(AngleSpec(int(va * den), int(vb * den)))
    return out


def reduce_to_sector(kind: Kind, angle: AngleSpec) -> AngleSpec:
    """Map a direction vector into the fundamental sector by a lattice symmetry."""
    for img in symmetry_images(kind, angle):
        if _in_sector(kind, img.a, img.b):
            return img
    # square diagonal is only reachable on the excluded boundary
    raise LatticeError(f"no symmetry image of {angle} in the fundamental sector")


def enumerate_lattice(kind: Kind, radius: float) -> list[LatticeVector]:
    """All lattice points with |gamma| <= radius, sorted by (|gamma|, n1, n2)."""
    _check_kind(kind)
    if radius <= 0:
        raise LatticeError("radius must be positive")
    r2 = radius * radius
    # |n_i| <= 2R/sqrt3 covers the hex lattice, R covers the square one
    m = int(math.floor(2.0 * radius / SQRT3)) + 1
    pts = []
    for n1 in range(-m, m + 1):
        for n2 in range(-m, m + 1):
            g = LatticeVector(n1, n2, kind)
            if g.norm_sq_int <= r2 + 1e-9:
                pts.append(g)
    pts.sort(key=lambda g: (g.norm_sq_int, g.n1, g.n2))
    return pts


@dataclass(frozen=True)
class StripInfo:
    transverse_offset: float
    axial_offset: float
    in_critical_strip: bool


def _transverse_sq_exact(g: LatticeVector, direction: Direction) -> Fraction:
    """(d_perp . gamma)^2 as an exact rational."""
    a, b = direction.angle.a, direction.angle.b
    if g.kind == "hex":
        # d_perp = (-b, sqrt3 a)/sqrt(N); gamma = (n1 - n2/2, sqrt3 n2/2)
        # d_perp.gamma = (-b n1 + b n2/2 + 3 a n2/2)/sqrt(N)
        num = Fraction(-2 * b * g.n1 + b * g.n2 + 3 * a * g.n2, 2)
        n = 3 * a * a + b * b
    else:
        num = Fraction(-b * g.n1 + a * g.n2)
        n = a * a + b * b
    return num * num / n


def strip_membership(g: LatticeVector, direction: Direction) -> StripInfo:
    if g.kind != direction.kind:
        raise LatticeError("lattice kind of vector and direction differ")
    t2 = _transverse_sq_exact(g, direction)
    return StripInfo(direction.transverse(g), direction.axial(g), t2 <= 1)


def transverse_class(g: LatticeVector, direction: Direction) -> int:
    """Sign of |d_perp.gamma|^2 - 1 computed exactly: -1 inside, 0 tangent, +1 outside."""
    t2 = _transverse_sq_exact(g, direction)
    return (t2 > 1) - (t2 < 1)


def hyperbolic_gap(direction: Direction, radius: float) -> float:
    """min(|d_perp.gamma| - 1) over lattice points with |d_perp.gamma| > 1."""
    best = math.inf
    for g in enumerate_lattice(direction.kind, radius):
        t2 = _transverse_sq_exact(g, direction)
        if t2 > 1:
            best = min(best, math.sqrt(float(t2)) - 1.0)
    return best


def lattice_csv(kind: Kind, radius: float, direction: Direction) -> str:
    lines = ["n1,n2,kx,ky,axial,transverse,in_strip"]
    for g in enumerate_lattice(kind, radius):
        s = strip_membership(g, direction)
        lines.append(
            f"{g.n1},{g.n2},{g.kx:.17g},{g.ky:.17g},{s.axial_offset:.17g},"
            f"{s.transverse_offset:.17g},{int(s.in_critical_strip)}"
        )
    return "\n".join(lines) + "\n"


def angle_for_delta(delta: float, max_den: int = 64) -> AngleSpec:
    """Hex direction near pi/6 with 4(d.k2)^2 close to delta.

    4(d.k2)^2 = 3(r-1)^2/(3r^2+1) with r = cot(theta)/sqrt(3); solved for r >= 1
    and rounded to a rational with bounded denominator.
    """
    if not 0.0 <= delta < 3.0:
        raise LatticeError("delta must lie in [0, 3)")
    # (3 - 3 delta) r^2 - 6 r + (3 - delta) = 0
    qa, qb, qc = 3.0 - 3.0 * delta, -6.0, 3.0 - delta
    if abs(qa) < 1e-15:
        r = -qc / qb
    else:
        disc = qb * qb - 4 * qa * qc
        r = (-qb + math.sqrt(disc)) / (2 * qa)
    frac = Fraction(r).limit_denominator(max_den)
    if frac < 1:
        frac = Fraction(1)
    return AngleSpec(frac.numerator, frac.denominator)
