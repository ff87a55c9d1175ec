"""Average sum rates: closed forms, quadrature, scaling law and DPC bound.

The closed forms expand ``1 - F**K`` binomially, which produces an
alternating sum whose terms grow like ``binom(K, n)`` while the result stays
O(1).  They are evaluated in multiprecision at ``B`` and ``2B`` bits and
accepted only when both agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import mpmath
import numpy as np
from scipy import optimize

from .model import SystemModel
from .sinr import SinrDistribution, _log_tail, evt_constants
from .specfun import (
    PoleSet,
    adaptive_quadrature_with_error,
    exp_e1_scaled,
    normalized_upper_gamma,
    partial_fractions,
)

__all__ = [
    "RateResult",
    "PrecisionError",
    "precision_for",
    "sumrate_closed_single",
    "sumrate_closed_multicell",
    "sumrate_quadrature",
    "scaling_law",
    "dpc_upper_rate",
    "POLE_MERGE_RTOL",
]

Method = Literal["closed_form", "quadrature", "monte_carlo"]

POLE_MERGE_RTOL = 1e-9
ESCALATION_RTOL = 1e-9
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class RateResult:
    """A sum rate in bps/Hz and how it was obtained."""

    value: float
    method: Method
    error_estimate: float = 0.0
    precision_bits: int | None = None

    def __post_init__(self) -> None:
        if self.value < 0 and self.value > -1e-12:
            object.__setattr__(self, "value", 0.0)
        if not self.value >= 0:
            raise ValueError(f"rate must be nonnegative, got {self.value}")
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")

    def __float__(self) -> float:
        return self.value


class PrecisionError(ArithmeticError):
    """The closed form did not stabilize under precision doubling."""


def precision_for(terms: int) -> int:
    """Working bits ``64 + ceil(1.5 X log2(X + 1))`` for ``X`` binomial terms."""
    return 64 + math.ceil(1.5 * terms * math.log2(terms + 1))


def _escalate(evaluate, bits: int, max_doublings: int = 3) -> tuple[float, float, int]:
    lo = evaluate(bits)
    for _ in range(max_doublings):
        hi = evaluate(2 * bits)
        if abs(hi - lo) <= ESCALATION_RTOL * abs(hi):
            return float(hi), float(abs(hi - lo)), 2 * bits
        lo, bits = hi, 2 * bits
    raise PrecisionError(
        f"closed form unstable: {float(lo)} vs {float(hi)} at {bits} bits"
    )


def _bracket(a, r, ei_scaled, p: int):
    """``e^z (-a)^(p-1) Ei(-z) - sum_{m<p} (-a)^(m-1) r^(m-p) (p-1-m)!``.

    ``a = n/eta_c``, the pole sits at ``x = -r`` and ``z = a r`` (``z = a``
    for the own-cell pole); ``ei_scaled`` is ``e^z Ei(-z)``.
    """
    first = (-a) ** (p - 1) * ei_scaled
    if p == 1:
        return first
    inner = mpmath.mpf(0)
    neg_a_pow = mpmath.mpf(1)
    r_inv = 1 / r
    r_pow = r_inv ** (p - 1)  # r^(m-p) at m = 1
    for m in range(1, p):
        inner += neg_a_pow * r_pow * math.factorial(p - 1 - m)
        neg_a_pow *= -a
        r_pow *= r
    return first - inner


def _single_sum(K: int, M: int, eta: float, prec: int):
    with mpmath.workprec(prec):
        eta_m = mpmath.mpf(eta)
        total = mpmath.mpf(0)
        for n in range(1, K + 1):
            N = n * (M - 1)
            b = n / eta_m
            ei_scaled = -exp_e1_scaled(b, prec)
            fact_N = mpmath.factorial(N)
            first = (-b) ** N * ei_scaled / fact_N
            inner = mpmath.mpf(0)
            pw = mpmath.mpf(1)
            for m in range(1, N + 1):
                inner += pw * math.factorial(N - m)
                pw *= -b
            term = first - inner / fact_N
            total += (-1) ** n * math.comb(K, n) * term
        return M * total / mpmath.log(2)


def sumrate_closed_single(K: int, M: int, eta: float, precision: int | None = None) -> RateResult:
    """Exact single-cell RBF sum rate (exponential-integral closed form).

    Evaluated at ``precision_for(K)`` bits (or ``precision``) and twice that;
    raises :class:`PrecisionError` if the two never agree to 1e-9.
    """
    if K < 1 or M < 1 or not eta > 0:
        raise ValueError("need K >= 1, M >= 1, eta > 0")
    bits = precision or precision_for(K)
    val, err, bits = _escalate(lambda b: _single_sum(K, M, eta, b), bits)
    return RateResult(val, "closed_form", err, bits)


def _merge_poles(poles: list[tuple[float, int]], rtol: float) -> list[tuple[float, int]]:
    merged: list[list] = []
    for r, k in poles:
        for slot in merged:
            if abs(slot[0] - r) <= rtol * max(slot[0], r):
                slot[1] += k
                break
        else:
            merged.append([r, k])
    return [(r, k) for r, k in merged]


def _multicell_sum(K: int, Mc: int, eta: float, interf: list[tuple[int, float]], prec: int):
    with mpmath.workprec(prec):
        eta_m = mpmath.mpf(eta)
        ratios = [(m, eta_m / mpmath.mpf(mu)) for m, mu in interf]  # (M_l, eta_c/mu_{l,c})
        # merging is decided on double-precision locations so the pole layout
        # does not depend on the working precision
        layout = _merge_poles(
            [(1.0, 1)] + [(float(r), m) for m, r in ratios], POLE_MERGE_RTOL
        )
        loc_of = {}
        for idx, (m, r) in enumerate(ratios):
            for j, (loc, _) in enumerate(layout):
                if abs(loc - float(r)) <= POLE_MERGE_RTOL * max(loc, float(r)):
                    loc_of[idx] = j
                    break
        exact_loc = [mpmath.mpf(1) if j == 0 else None for j in range(len(layout))]
        for idx, j in loc_of.items():
            if exact_loc[j] is None:
                exact_loc[j] = ratios[idx][1]
        total = mpmath.mpf(0)
        for n in range(1, K + 1):
            a = n / eta_m
            mult = [0] * len(layout)
            mult[0] = n * (Mc - 1) + 1
            prefactor = mpmath.mpf(1)
            for idx, (m, r) in enumerate(ratios):
                mult[loc_of[idx]] += n * m
                prefactor *= r ** (n * m)
            pset = PoleSet(tuple((exact_loc[j], mult[j]) for j in range(len(layout))))
            pfd = partial_fractions(pset, prec)
            inner = mpmath.mpf(0)
            for (r, k), row in zip(pset.poles, pfd.coeffs):
                ei_scaled = -exp_e1_scaled(a * r, prec)
                for p, A in enumerate(row, start=1):
                    inner += A / math.factorial(p - 1) * _bracket(a, r, ei_scaled, p)
            total += (-1) ** n * math.comb(K, n) * prefactor * inner
        return Mc * total / mpmath.log(2)


def sumrate_closed_multicell(system: SystemModel, c: int, K: int,
                             precision: int | None = None) -> RateResult:
    """Exact sum rate of cell ``c`` under inter-cell interference.

    Partial fractions are taken over the poles ``x = -1`` and
    ``x = -eta_c/mu_{l,c}``; poles closer than ``POLE_MERGE_RTOL`` are merged
    into one of higher multiplicity.  A switched-off cell has rate 0.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    Mc = system.beams[c]
    if Mc == 0:
        return RateResult(0.0, "closed_form", 0.0, None)
    eta = system.snr_per_beam(c)
    interf = [(m, mu) for _, m, mu in system.interferers(c)]
    if not interf:
        return sumrate_closed_single(K, Mc, eta, precision)
    total_beams = Mc + sum(m for m, _ in interf)
    bits = precision or precision_for(K * total_beams)
    val, err, used = _escalate(lambda b: _multicell_sum(K, Mc, eta, interf, b), bits)
    return RateResult(val, "closed_form", err, used)


def _one_minus_cdf_pow(log_tail: np.ndarray, K: int) -> np.ndarray:
    # 1 - (1 - G)^K with G = exp(log_tail)
    G = np.exp(log_tail)
    with np.errstate(divide="ignore"):
        return -np.expm1(K * np.log1p(-G))


def sumrate_quadrature(system: SystemModel, c: int, K: int, rel_tol: float = QUAD_RTOL) -> RateResult:
    """Sum rate of cell ``c`` as ``M_c/ln2 * int_0^inf (1 - F(x)**K)/(1 + x) dx``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    Mc = system.beams[c]
    if Mc == 0:
        return RateResult(0.0, "quadrature", 0.0)
    dist = SinrDistribution(system, c)
    eta = dist.eta

    def integrand(x: float) -> float:
        lt = _log_tail(dist, np.asarray(x))
        return float(_one_minus_cdf_pow(lt, K)) / (1.0 + x)

    centre = evt_constants(dist, K).location if K >= 2 else eta
    points = [0.5 * centre, centre, centre + 10 * eta, centre + 60 * eta]
    val, err = adaptive_quadrature_with_error(integrand, 0.0, math.inf, rel_tol, points)
    scale = Mc / math.log(2)
    return RateResult(scale * val, "quadrature", scale * err)


def scaling_law(K: float, M: int, eta: float) -> float:
    """Asymptotic sum rate ``M log2(eta ln K)`` as ``K`` grows."""
    arg = eta * math.log(K) if K > 0 else -math.inf
    if not arg > 1:
        raise ValueError("scaling law needs eta * ln K > 1")
    return M * math.log2(arg)


def dpc_upper_rate(K: int, num_antennas: int, eta: float, rel_tol: float = QUAD_RTOL) -> RateResult:
    """Upper bound ``N_T E[log2(1 + eta max_k ||h_k||^2)]`` on the DPC sum rate.

    ``||h_k||^2`` is a sum of ``N_T`` unit-mean exponentials, so its CDF is
    the regularized lower incomplete gamma ``P(N_T, x)``.  Integrated by
    parts: ``N_T/ln2 * int eta (1 - P(x)^K) / (1 + eta x) dx``.
    """
    if K < 1 or num_antennas < 1 or not eta > 0:
        raise ValueError("need K >= 1, N_T >= 1, eta > 0")
    nt = int(num_antennas)

    def integrand(x: float) -> float:
        q = normalized_upper_gamma(nt, x)
        with np.errstate(divide="ignore"):
            one_minus = -math.expm1(K * math.log1p(-q)) if q < 1 else 1.0
        return eta * one_minus / (1.0 + eta * x)

    if K >= 2:
        centre = optimize.brentq(
            lambda x: math.log(max(normalized_upper_gamma(nt, x), 1e-300)) + math.log(K),
            0.0, 10.0 * (math.log(K) + nt) + 50.0, xtol=1e-12,
        )
    else:
        centre = float(nt)
    points = [min(1.0 / eta, 0.5 * centre), 0.5 * centre, centre, centre + 10.0, centre + 60.0]
    val, err = adaptive_quadrature_with_error(integrand, 0.0, math.inf, rel_tol, points)
    scale = nt / math.log(2)
    return RateResult(scale * val, "quadrature", scale * err)
