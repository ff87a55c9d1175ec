"""High-SNR degrees of freedom of single- and multi-cell random beamforming.

DoF values are exact :class:`fractions.Fraction` objects so that branch
boundaries such as ``alpha == sum(M) - 1`` and hull vertices are decided
without rounding.  Floats passed in are converted through their shortest
decimal representation (``0.1`` becomes ``1/10``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "as_fraction",
    "dof_single",
    "dof_single_opt",
    "dof_multicell",
    "DofRegion",
    "dof_region",
    "dof_support",
    "dof_member",
    "dof_upper_region",
    "OptimalityCertificate",
    "rbf_is_dof_optimal",
    "RegionTooLargeError",
]

Number = Fraction | int | float | str


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    return Fraction(x)


def dof_single(alpha: Number, M: int) -> Fraction:
    """DoF of single-cell RBF with ``M`` beams and K ~ rho**alpha users.

    ``alpha M / (M - 1)`` while ``alpha <= M - 1``, else ``M``.  For ``M = 1``
    any ``alpha > 0`` gives 1 and ``alpha = 0`` gives 0.
    """
    return dof_multicell([alpha], [M])[0]


def dof_single_opt(alpha: Number, num_antennas: int) -> tuple[Fraction, int]:
    """Maximum single-cell DoF and the smallest beam count attaining it.

    Only ``floor(alpha) + 1`` and ``floor(alpha) + 2`` can be optimal below
    ``alpha = N_T - 1``; beyond it all ``N_T`` beams are used.
    """
    a = as_fraction(alpha)
    nt = int(num_antennas)
    if a < 0 or nt < 1:
        raise ValueError("need alpha >= 0 and N_T >= 1")
    if a == 0:
        # every M gives zero DoF with a fixed user count
        return Fraction(0), 1
    if a > nt - 1:
        return Fraction(nt), nt
    fl = a.numerator // a.denominator
    frac = a - fl
    lo = fl + 1
    hi = fl + 2
    if hi > nt:
        # only reachable at alpha == N_T - 1, where lo == N_T already
        return dof_single(a, lo), lo
    if frac * hi <= 1:
        return Fraction(lo), lo
    return a * hi / lo, hi


def dof_multicell(alpha: Sequence[Number], beams: Sequence[int]) -> tuple[Fraction, ...]:
    """Per-cell DoF for beam assignment ``beams``.

    With ``S = sum(beams)``, cell ``c`` gets ``alpha_c M_c / (S - 1)`` when
    ``alpha_c <= S - 1`` and ``M_c`` otherwise; inactive cells get 0.
    """
    if len(alpha) != len(beams):
        raise ValueError("alpha and beams must have the same length")
    al = [as_fraction(a) for a in alpha]
    if any(a < 0 for a in al):
        raise ValueError("alpha must be nonnegative")
    ms = [int(m) for m in beams]
    if any(m < 0 for m in ms):
        raise ValueError("beam counts must be nonnegative")
    S = sum(ms)
    out = []
    for a, m in zip(al, ms):
        if m == 0:
            out.append(Fraction(0))
        elif a > S - 1:
            out.append(Fraction(m))
        elif S == 1:
            out.append(Fraction(0))  # alpha == 0 with a single active beam
        else:
            out.append(a * m / (S - 1))
    return tuple(out)


class RegionTooLargeError(ValueError):
    """Beam-assignment enumeration exceeds the configured cap."""


@dataclass(frozen=True)
class DofRegion:
    """Downward-closed convex hull of achievable DoF points.

    ``vertices`` pairs each beam assignment with its DoF point, sorted
    lexicographically by assignment.  ``hull`` is the Pareto boundary
    polyline for two cells, from the ``d_2`` axis to the ``d_1`` axis.
    """

    alpha: tuple[Fraction, ...]
    num_antennas: int
    vertices: tuple[tuple[tuple[int, ...], tuple[Fraction, ...]], ...]
    hull: tuple[tuple[Fraction, Fraction], ...] | None = None
    kind: str = "rbf"

    @property
    def num_cells(self) -> int:
        return len(self.alpha)

    @property
    def points(self) -> list[tuple[Fraction, ...]]:
        return [d for _, d in self.vertices]

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "kind": self.kind,
            "alpha": [_num(a) for a in self.alpha],
            "nt": self.num_antennas,
            "vertices": [{"m": list(m), "d": [_num(x) for x in d]} for m, d in self.vertices],
        }
        if self.hull is not None:
            doc["hull"] = [[_num(x), _num(y)] for x, y in self.hull]
        return json.dumps(doc, indent=2)


def _num(x: Fraction) -> float | int:
    if x.denominator == 1:
        return int(x)
    return float(f"{float(x):.12g}")


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _pareto_polyline(points: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    """Upper-right boundary of the downward-closed hull of 2-D points."""
    pts = set()
    for x, y in points:
        pts.update({(x, y), (x, Fraction(0)), (Fraction(0), y)})
    pts.add((Fraction(0), Fraction(0)))
    ordered = sorted(pts)
    # upper hull by monotone chain, left to right
    upper: list[tuple[Fraction, Fraction]] = []
    for p in ordered:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) >= 0:
            upper.pop()
        upper.append(p)
    ymax = max(y for _, y in ordered)
    xmax = max(x for x, _ in ordered)
    chain = [(Fraction(0), ymax)]
    for p in upper:
        if p[0] > 0 and p != chain[-1]:
            chain.append(p)
    if chain[-1] != (xmax, Fraction(0)):
        chain.append((xmax, Fraction(0)))
    # drop collinear interior points
    out = [chain[0]]
    for i in range(1, len(chain) - 1):
        if _cross(out[-1], chain[i], chain[i + 1]) != 0:
            out.append(chain[i])
    if len(chain) > 1:
        out.append(chain[-1])
    return tuple(out)


def dof_region(alpha: Sequence[Number], num_antennas: int, max_cells: int = 6,
               max_antennas: int = 8) -> DofRegion:
    """Achievable DoF region: hull over all ``(N_T + 1)**C`` beam assignments."""
    al = tuple(as_fraction(a) for a in alpha)
    C = len(al)
    nt = int(num_antennas)
    if C < 1 or nt < 1:
        raise ValueError("need at least one cell and N_T >= 1")
    if C > max_cells or nt > max_antennas:
        raise RegionTooLargeError(
            f"(N_T+1)^C enumeration with C={C}, N_T={nt} exceeds cap C<={max_cells}, N_T<={max_antennas}"
        )
    verts = tuple(
        (m, dof_multicell(al, m)) for m in itertools.product(range(nt + 1), repeat=C)
    )
    hull = _pareto_polyline(d for _, d in verts) if C == 2 else None
    return DofRegion(al, nt, verts, hull)


def dof_support(region: DofRegion, weights: Sequence[Number]) -> Fraction:
    """``max <w, d>`` over the region, attained at a stored vertex."""
    w = [as_fraction(x) for x in weights]
    if len(w) != region.num_cells:
        raise ValueError("weight dimension mismatch")
    if any(x < 0 for x in w) or all(x == 0 for x in w):
        raise ValueError("weights must be nonnegative and not all zero")
    return max(sum(wi * di for wi, di in zip(w, d)) for d in region.points)


def _member_polyline(hull, d) -> bool:
    x, y = d
    if x > hull[-1][0] or y > hull[0][1]:
        return False
    for a, b in zip(hull[:-1], hull[1:]):
        if a[0] <= x <= b[0]:
            # inside iff on or below segment a->b (clockwise boundary)
            return _cross(a, b, (x, y)) <= 0
    return True


def _member_lp(points, d, tol: float) -> bool:
    V = np.array([[float(v) for v in p] for p in points])  # (n, C)
    dv = np.array([float(x) for x in d])
    n = V.shape[0]
    # find lambda >= 0, sum lambda = 1, V^T lambda >= d
    res = optimize.linprog(
        c=np.zeros(n),
        A_ub=-V.T,
        b_ub=-dv + tol,
        A_eq=np.ones((1, n)),
        b_eq=[1.0],
        bounds=[(0, None)] * n,
        method="highs",
    )
    return res.status == 0


def dof_member(region: DofRegion, point: Sequence[Number], tol: float = 1e-9) -> bool:
    """Whether ``point`` is dominated by a convex combination of vertices.

    Exact polygon test for two cells (and for the box regions); linear
    feasibility otherwise.
    """
    d = tuple(as_fraction(x) for x in point)
    if len(d) != region.num_cells:
        raise ValueError("point dimension mismatch")
    if any(x < 0 for x in d):
        raise ValueError("DoF points are nonnegative")
    if region.kind == "box":
        return all(x <= region.num_antennas for x in d)
    if region.num_cells == 1:
        return d[0] <= max(p[0] for p in region.points)
    if region.hull is not None:
        return _member_polyline(region.hull, d)
    return _member_lp(region.points, d, tol)


def dof_upper_region(num_cells: int, num_antennas: int) -> DofRegion:
    """Interference-free bound: the box ``0 <= d_c <= N_T``."""
    C = int(num_cells)
    nt = int(num_antennas)
    corners = tuple(
        (tuple(nt if bit else 0 for bit in bits), tuple(Fraction(nt if bit else 0) for bit in bits))
        for bits in itertools.product((0, 1), repeat=C)
    )
    hull = None
    if C == 2:
        hull = ((Fraction(0), Fraction(nt)), (Fraction(nt), Fraction(nt)), (Fraction(nt), Fraction(0)))
    return DofRegion((Fraction(0),) * C, nt, corners, hull, kind="box")


@dataclass(frozen=True)
class OptimalityCertificate:
    """Outcome of the sufficient DoF-optimality test.

    ``beams`` is the all-``N_T`` assignment reaching the box corner when the
    condition holds; ``gap[c]`` is how far ``alpha_c`` falls short otherwise.
    """

    sufficient_condition_met: bool
    threshold: Fraction
    beams: tuple[int, ...] | None = None
    gap: tuple[Fraction, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.sufficient_condition_met


def rbf_is_dof_optimal(alpha: Sequence[Number] | Number, num_cells: int,
                       num_antennas: int) -> OptimalityCertificate:
    """Check ``alpha_c >= C N_T - 1`` for every cell (``N_T - 1`` when C = 1).

    Meeting it proves RBF attains the full interference-free region; failing
    it proves nothing.  When the threshold is 0 (one cell, one antenna) a
    strictly positive ``alpha`` is still required, since a fixed user count
    yields zero DoF.
    """
    if not isinstance(alpha, (list, tuple)):
        alpha = [alpha] * int(num_cells)
    al = [as_fraction(a) for a in alpha]
    C = int(num_cells)
    if len(al) != C:
        raise ValueError("alpha dimension mismatch")
    nt = int(num_antennas)
    threshold = Fraction(C * nt - 1)
    gap = tuple(max(Fraction(0), threshold - a) for a in al)
    if all(g == 0 for g in gap) and all(a > 0 for a in al):
        return OptimalityCertificate(True, threshold, (nt,) * C, gap)
    return OptimalityCertificate(False, threshold, None, gap)
