"""Per-beam SINR law of a cell under inter-cell interference.

With ``G(s) = 1 - F(s)`` the tail of the SINR of one user on one beam,

    log G(s) = -s/eta_c - (M_c - 1) log(1 + s) - sum_l M_l log(1 + mu_{l,c} s / eta_c)

and the density is ``G(s) / g(s)`` with the growth function

    1/g(s) = 1/eta_c + (M_c - 1)/(s + 1) + sum_l M_l / (s + eta_c/mu_{l,c}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .model import SystemModel

__all__ = [
    "SinrDistribution",
    "EvtConstants",
    "sinr_pdf",
    "sinr_cdf",
    "sinr_tail",
    "growth_function",
    "evt_constants",
    "gumbel_cdf",
]


@dataclass(frozen=True)
class SinrDistribution:
    """SINR law of cell ``cell`` of ``system`` (0-based index)."""

    system: SystemModel
    cell: int

    def __post_init__(self) -> None:
        if not 0 <= self.cell < self.system.num_cells:
            raise IndexError(f"cell {self.cell} out of range")
        if self.system.beams[self.cell] < 1:
            raise ValueError(f"cell {self.cell} is switched off; its SINR is undefined")

    @property
    def eta(self) -> float:
        return self.system.snr_per_beam(self.cell)

    @property
    def beams(self) -> int:
        return self.system.beams[self.cell]

    @property
    def interference(self) -> list[tuple[int, float]]:
        """``(M_l, mu_{l,c})`` of every active interferer."""
        return [(m, mu) for _, m, mu in self.system.interferers(self.cell)]

    @property
    def total_beams(self) -> int:
        """Beams seen by a user: own cell plus active interferers."""
        return self.beams + sum(m for m, _ in self.interference)


def _check_s(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINR argument must be nonnegative")
    return s


def _log_tail(dist: SinrDistribution, s: np.ndarray) -> np.ndarray:
    eta = dist.eta
    out = -s / eta - (dist.beams - 1) * np.log1p(s)
    for m, mu in dist.interference:
        out = out - m * np.log1p(mu / eta * s)
    return out


def _inv_growth(dist: SinrDistribution, s: np.ndarray) -> np.ndarray:
    eta = dist.eta
    out = 1.0 / eta + (dist.beams - 1) / (s + 1.0)
    for m, mu in dist.interference:
        out = out + m / (s + eta / mu)
    return out


def _ret(x: np.ndarray):
    return x if x.ndim else float(x)


def sinr_tail(dist: SinrDistribution, s):
    """``1 - F(s)``, evaluated through its logarithm."""
    s = _check_s(s)
    return _ret(np.exp(_log_tail(dist, s)))


def sinr_cdf(dist: SinrDistribution, s):
    """CDF of the per-beam SINR; reduces to the single-cell law when C = 1."""
    s = _check_s(s)
    return _ret(-np.expm1(_log_tail(dist, s)))


def sinr_pdf(dist: SinrDistribution, s):
    """Density of the per-beam SINR."""
    s = _check_s(s)
    return _ret(np.exp(_log_tail(dist, s)) * _inv_growth(dist, s))


def growth_function(dist: SinrDistribution, s):
    """``g(s) = (1 - F(s)) / f(s)``; tends to ``eta_c`` as ``s`` grows."""
    s = _check_s(s)
    return _ret(1.0 / _inv_growth(dist, s))


@dataclass(frozen=True)
class EvtConstants:
    """Gumbel normalization: ``F(scale*x + location)**K -> exp(-exp(-x))``."""

    scale: float
    location: float
    users: int


def evt_constants(dist: SinrDistribution, users: int) -> EvtConstants:
    """Solve ``1 - F(b_K) = 1/K`` and set ``a_K = g(b_K)``.

    The root is bracketed on ``[0, eta (ln K + 10)]`` (the tail is 1 at 0 and
    continuous, strictly decreasing) and refined with Brent's method.
    """
    K = int(users)
    if K < 2:
        raise ValueError("evt_constants needs K >= 2")
    target = -math.log(K)
    eta = dist.eta

    def h(s: float) -> float:
        return float(_log_tail(dist, np.asarray(s))) - target

    hi = eta * (math.log(K) + 10.0)
    while h(hi) > 0:  # cannot happen with the stated bracket; kept as a guard
        hi *= 2.0
    b = optimize.brentq(h, 0.0, hi, xtol=1e-300, rtol=1e-12, maxiter=500)
    a = float(growth_function(dist, b))
    return EvtConstants(scale=a, location=b, users=K)


def gumbel_cdf(x):
    return np.exp(-np.exp(-np.asarray(x, dtype=float)))
