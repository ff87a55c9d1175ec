"""Special functions and rational-function machinery for the rate formulas.

The closed-form rates are alternating binomial sums that cancel
catastrophically, so the pieces here work on :class:`mpmath.mpf` values at a
caller-chosen binary precision.  Quadrature is double precision.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate

__all__ = [
    "exp_e1_scaled",
    "normalized_lower_gamma",
    "normalized_upper_gamma",
    "PoleSet",
    "PfdCoefficients",
    "PoleCollisionError",
    "partial_fractions",
    "QuadratureError",
    "adaptive_quadrature",
]

_GUARD_BITS = 16


def _e1_series_scaled(x: mpmath.mpf, eps: mpmath.mpf) -> mpmath.mpf:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = mpmath.mpf(0)
    term = mpmath.mpf(1)
    k = 0
    while True:
        k += 1
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= eps * (abs(total) + 1):
            break
    e1 = -mpmath.euler - mpmath.log(x) - total
    return mpmath.exp(x) * e1


def _e1_cf_scaled(x: mpmath.mpf, eps: mpmath.mpf) -> mpmath.mpf:
    # modified Lentz on e^x E1(x) = 1/(x+1 - 1/(x+3 - 4/(x+5 - ...)))
    tiny = mpmath.mpf(2) ** (-(mpmath.mp.prec * 2))
    b = x + 1
    c = 1 / tiny
    d = 1 / b
    h = d
    i = 0
    while True:
        i += 1
        an = -mpmath.mpf(i) * i
        b += 2
        d = an * d + b
        if d == 0:
            d = tiny
        c = b + an / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        h *= delta
        if abs(delta - 1) <= eps:
            return h


def exp_e1_scaled(x, precision: int = 53) -> mpmath.mpf:
    """Return ``e**x * E1(x)`` for ``x > 0`` as an mpf with ``precision`` bits.

    ``E1(x) = -Ei(-x)``, so ``e**(n/eta) * Ei(-n/eta)`` equals
    ``-exp_e1_scaled(n/eta)``.  A power series is used for ``x <= 1`` and a
    continued fraction above; the scaled form cannot overflow.  Above double
    precision the continued fraction converges in O(precision**2 / x) steps,
    so the series (with ``x log2 e`` extra bits against its cancellation) is
    kept up to ``x <= precision / 40``.
    """
    switch = 1.0 if precision <= 64 else precision / 40.0
    with mpmath.workprec(precision + _GUARD_BITS):
        xm = mpmath.mpf(x)
        if not xm > 0:
            raise ValueError(f"exp_e1_scaled needs x > 0, got {x}")
        eps = mpmath.mpf(2) ** (-(precision + _GUARD_BITS // 2))
        if xm <= switch:
            extra = int(math.ceil(float(xm) * 1.4427)) + 8
            with mpmath.workprec(precision + _GUARD_BITS + extra):
                val = _e1_series_scaled(mpmath.mpf(xm), eps)
        else:
            val = _e1_cf_scaled(xm, eps)
    with mpmath.workprec(precision):
        return +val


def normalized_upper_gamma(a: int, x):
    """``Gamma(a, x) / Gamma(a) = exp(-x) * sum_{j<a} x**j / j!`` for integer a."""
    if a < 1 or int(a) != a:
        raise ValueError("a must be a positive integer")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(1, int(a)):
        term = term * x / j
        total = total + term
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.exp(-x) * total
    out = np.where(np.isfinite(x), out, 0.0)
    return out if out.ndim else float(out)


def normalized_lower_gamma(a: int, x):
    """Regularized lower incomplete gamma ``P(a, x)`` for integer ``a >= 1``.

    Uses the finite Poisson sum ``1 - exp(-x) sum_{j<a} x**j/j!``; below
    ``x < a`` the complementary tail ``exp(-x) sum_{j>=a} x**j/j!`` is summed
    instead so small values keep full relative accuracy.
    """
    if a < 1 or int(a) != a:
        raise ValueError("a must be a positive integer")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("x must be nonnegative")
    out = 1.0 - np.asarray(normalized_upper_gamma(a, xa))
    small = xa < a
    if np.any(small):
        xs = xa[small] if xa.ndim else xa
        term = np.exp(-xs) * xs ** a / math.factorial(int(a))
        tail = term.copy()
        j = int(a)
        while np.any(term > 1e-17 * tail):
            j += 1
            term = term * xs / j
            tail = tail + term
        if xa.ndim:
            out = out.copy()
            out[small] = tail
        else:
            out = tail
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class PoleSet:
    """Denominator ``prod_i (x + r_i)**k_i`` with distinct ``r_i > 0``."""

    poles: tuple[tuple[object, int], ...]

    def __post_init__(self) -> None:
        poles = tuple((r, int(k)) for r, k in self.poles)
        if not poles:
            raise ValueError("PoleSet needs at least one pole")
        for r, k in poles:
            if not r > 0:
                raise ValueError(f"pole location {r} must be positive")
            if k < 1:
                raise ValueError(f"multiplicity {k} must be >= 1")
        object.__setattr__(self, "poles", poles)

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.poles)

    def evaluate(self, x, precision: int = 53):
        """Direct evaluation of ``1 / prod (x + r_i)**k_i``."""
        with mpmath.workprec(precision):
            den = mpmath.mpf(1)
            for r, k in self.poles:
                den *= (mpmath.mpf(x) + mpmath.mpf(r)) ** k
            return 1 / den


@dataclass(frozen=True)
class PfdCoefficients:
    """``coeffs[i][p-1]`` multiplies ``1 / (x + r_i)**p``."""

    poles: PoleSet
    coeffs: tuple[tuple[mpmath.mpf, ...], ...]
    precision: int

    def evaluate(self, x):
        """Recombine ``sum_i sum_p A_{i,p} / (x + r_i)**p``."""
        with mpmath.workprec(self.precision):
            xm = mpmath.mpf(x)
            total = mpmath.mpf(0)
            for (r, _), row in zip(self.poles.poles, self.coeffs):
                base = xm + mpmath.mpf(r)
                inv = 1 / base
                pw = inv
                for a in row:
                    total += a * pw
                    pw *= inv
            return total


class PoleCollisionError(ValueError):
    """Two pole locations are numerically indistinguishable."""


def partial_fractions(poles: PoleSet, precision: int = 128) -> PfdCoefficients:
    """Partial-fraction coefficients of ``1 / prod_i (x + r_i)**k_i``.

    Around each pole ``-r_i`` the cofactor ``prod_{j!=i} (x + r_j)**-k_j`` is
    expanded as a truncated power series in ``t = x + r_i`` (a product of
    binomial series); the coefficient of ``t**(k_i - p)`` is ``A_{i,p}``.

    Raises
    ------
    PoleCollisionError
        If two locations agree to within ``2**(-precision/2)`` relative.
    """
    plist = poles.poles
    with mpmath.workprec(precision + _GUARD_BITS):
        locs = [mpmath.mpf(r) for r, _ in plist]
        tol = mpmath.mpf(2) ** (-(precision / 2))
        for i in range(len(locs)):
            for j in range(i + 1, len(locs)):
                if abs(locs[i] - locs[j]) <= tol * max(abs(locs[i]), abs(locs[j])):
                    raise PoleCollisionError(
                        f"poles {plist[i][0]} and {plist[j][0]} coincide; merge multiplicities"
                    )
        rows = []
        for i, (ri, ki) in enumerate(plist):
            series = [mpmath.mpf(0)] * ki
            series[0] = mpmath.mpf(1)
            for j, (_, kj) in enumerate(plist):
                if j == i:
                    continue
                d = locs[j] - locs[i]
                # (t + d)^-k = d^-k * sum_s binom(k+s-1, s) (-t/d)^s
                factor = [mpmath.mpf(0)] * ki
                lead = d ** (-kj)
                ratio = -1 / d
                coef = lead
                for s in range(ki):
                    factor[s] = coef
                    coef = coef * ratio * (kj + s) / (s + 1)
                series = [
                    mpmath.fsum(series[u] * factor[s - u] for u in range(s + 1))
                    for s in range(ki)
                ]
            rows.append(tuple(series[ki - p] for p in range(1, ki + 1)))
    with mpmath.workprec(precision):
        rows = [tuple(+a for a in row) for row in rows]
    return PfdCoefficients(poles, tuple(rows), precision)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


def _quad_piece(f, a, b, rel_tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *_ = integrate.quad(
            # QUADPACK refuses epsrel below 50 ulp; the caller's check stays strict
            f, a, b, epsabs=0.0, epsrel=max(rel_tol, 50 * sys.float_info.epsilon),
            limit=limit, full_output=1,
        )
    return val, err


def adaptive_quadrature_with_error(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    points: Sequence[float] = (),
    limit: int = 1000,
) -> tuple[float, float]:
    """Like :func:`adaptive_quadrature` but also return the error estimate."""
    if b == math.inf:
        # x = a + t / (1 - t) maps [0, 1) onto [a, inf)
        def g(t: float) -> float:
            if t >= 1.0:
                return 0.0
            u = 1.0 - t
            return f(a + t / u) / (u * u)

        tpoints = sorted((p - a) / (1.0 + p - a) for p in points if p > a)
        edges = [0.0, *tpoints, 1.0]
        func, lo_hi = g, edges
    else:
        edges = [a, *sorted(p for p in points if a < p < b), b]
        func, lo_hi = f, edges
    total = 0.0
    err = 0.0
    for lo, hi in zip(lo_hi[:-1], lo_hi[1:]):
        v, e = _quad_piece(func, lo, hi, rel_tol, limit)
        total += v
        err += e
    if not math.isfinite(total) or err > max(rel_tol * abs(total), 1e-300):
        raise QuadratureError("quadrature did not converge", total, err)
    return total, err


def adaptive_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    points: Sequence[float] = (),
) -> float:
    """Integrate ``f`` over ``[a, b]`` where ``b`` may be ``math.inf``.

    Globally adaptive Gauss-Kronrod (QUADPACK) on each sub-interval between
    the optional ``points``.  Semi-infinite ranges are mapped to ``[0, 1)``
    by ``x = a + t/(1-t)``.

    Raises
    ------
    QuadratureError
        When the estimated error exceeds the tolerance; carries the best
        estimate.
    """
    return adaptive_quadrature_with_error(f, a, b, rel_tol, points)[0]
