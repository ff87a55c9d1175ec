"""Monte Carlo simulation of multi-cell random beamforming.

Each trial draws fresh Rayleigh channels for every user and fresh Haar beams
for every base station, computes the per-beam SINRs, and schedules the
strongest user on each beam.

Randomness is counter based: the stream for ``(trial, cell, role)`` is a
Philox generator keyed by ``(master_seed, trial)`` whose counter starts at
``(0, 0, cell, role)``.  A trial's outcome therefore depends only on the seed
and its own index, so results are bit-identical for any number of workers.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .model import SystemModel
from .rate import RateResult

__all__ = [
    "McConfig",
    "McTrace",
    "trial_stream",
    "complex_normal",
    "draw_beams",
    "simulate_trace",
    "simulate_sumrate",
    "simulate_sinr_samples",
    "simulate_max_sinr",
    "ks_statistic",
]

ROLE_BEAMS = 0
ROLE_CHANNELS = 1

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run description.

    ``users[c]`` is K_c.  ``workers`` only affects wall time, never results.
    """

    system: SystemModel
    users: tuple[int, ...]
    trials: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        users = tuple(int(k) for k in self.users)
        object.__setattr__(self, "users", users)
        if len(users) != self.system.num_cells:
            raise ValueError("users needs one entry per cell")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for c, (k, m) in enumerate(zip(users, self.system.beams)):
            if m >= 1 and k < 1:
                raise ValueError(f"cell {c} is active but has K={k}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def trial_stream(master_seed: int, trial: int, cell: int, role: int) -> np.random.Generator:
    key = np.array([master_seed & _MASK64, trial & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, cell, role], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples by Box-Muller (each real part has variance 1/2)."""
    u1 = 1.0 - rng.random(shape)  # (0, 1]
    u2 = rng.random(shape)
    radius = np.sqrt(-np.log(u1))  # |z|^2 ~ Exp(1)
    return radius * np.exp(2j * np.pi * u2)


def draw_beams(M: int, num_antennas: int, rng: np.random.Generator) -> np.ndarray:
    """``num_antennas x M`` matrix of Haar-distributed orthonormal beams.

    Orthonormal factor of a complex Gaussian matrix, with the columns rotated
    so that the triangular factor has a positive real diagonal.
    """
    if not 1 <= M <= num_antennas:
        raise ValueError(f"need 1 <= M <= N_T, got M={M}, N_T={num_antennas}")
    while True:
        z = complex_normal(rng, (num_antennas, M))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        mag = np.abs(d)
        if np.all(mag > 1e-12 * max(1.0, mag.max())):
            return q * (d / mag)


@dataclass
class McTrace:
    """Per-trial outcome of a run.

    ``rates[t, c]`` is cell ``c``'s scheduled sum rate in trial ``t``.
    ``samples`` maps ``(cell, beam)`` to a ``(trials, K_c)`` array of raw
    SINRs when sample capture was requested.
    """

    master_seed: int
    rates: np.ndarray
    samples: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return self.rates.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# mcrbf trace schema_version=1 master_seed={self.master_seed}\n")
        buf.write("trial,cell,rate\n")
        for t in range(self.rates.shape[0]):
            for c in range(self.rates.shape[1]):
                buf.write(f"{t},{c},{self.rates[t, c]:.12g}\n")
        return buf.getvalue()

    def samples_to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# mcrbf samples schema_version=1 master_seed={self.master_seed}\n")
        buf.write("trial,cell,beam,sinr\n")
        for (c, m), arr in sorted(self.samples.items()):
            for t in range(arr.shape[0]):
                for s in arr[t]:
                    buf.write(f"{t},{c},{m},{s:.12g}\n")
        return buf.getvalue()


def _cell_sinr(system: SystemModel, c: int, K: int, trial_seed: int, trial: int,
               beams: dict[int, np.ndarray]) -> np.ndarray:
    """``(K, M_c)`` SINR matrix of cell ``c`` in one trial."""
    nt = system.num_antennas
    eta = system.snr_per_beam(c)
    rng = trial_stream(trial_seed, trial, c, ROLE_CHANNELS)
    h_own = complex_normal(rng, (K, nt))
    g_own = np.abs(h_own @ beams[c]) ** 2
    interference = np.zeros(K)
    for l, _, mu in system.interferers(c):
        h = complex_normal(rng, (K, nt))
        interference += mu * (np.abs(h @ beams[l]) ** 2).sum(axis=1)
    intra = g_own.sum(axis=1, keepdims=True) - g_own
    return eta * g_own / (1.0 + eta * intra + interference[:, None])


def _trial_beams(system: SystemModel, seed: int, trial: int) -> dict[int, np.ndarray]:
    return {
        l: draw_beams(m, system.num_antennas, trial_stream(seed, trial, l, ROLE_BEAMS))
        for l, m in enumerate(system.beams)
        if m > 0
    }


def _run_trials(config: McConfig, work: Callable[[int], object]) -> list:
    """Evaluate ``work(t)`` for every trial, in trial order."""
    n = config.trials
    if config.workers == 1:
        return [work(t) for t in range(n)]
    bounds = np.linspace(0, n, config.workers + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        parts = list(pool.map(lambda rng_: [work(t) for t in rng_], chunks))
    return [item for part in parts for item in part]


def simulate_trace(config: McConfig, capture: Sequence[tuple[int, int]] = ()) -> McTrace:
    """Run all trials; optionally keep raw SINRs of the ``(cell, beam)`` pairs.

    Each beam goes to its strongest user (lowest index on ties); a user may
    win several beams.
    """
    system = config.system
    C = system.num_cells
    seed = config.master_seed
    capture = tuple(capture)

    def work(t: int):
        beams = _trial_beams(system, seed, t)
        rates = np.zeros(C)
        kept = {}
        for c in range(C):
            if system.beams[c] == 0:
                continue
            sinr = _cell_sinr(system, c, config.users[c], seed, t, beams)
            best = sinr[np.argmax(sinr, axis=0), np.arange(sinr.shape[1])]
            rates[c] = np.log2(1.0 + best).sum()
            for cc, m in capture:
                if cc == c:
                    kept[(c, m)] = sinr[:, m].copy()
        return rates, kept

    results = _run_trials(config, work)
    rates = np.array([r for r, _ in results])
    samples = {key: np.array([k[key] for _, k in results]) for key in capture}
    return McTrace(seed, rates, samples)


def _reduce(values: np.ndarray) -> tuple[float, float]:
    # numpy's pairwise summation over a trial-ordered buffer is order-fixed
    mean = float(np.sum(values) / values.size)
    if values.size < 2:
        return mean, 0.0
    std = float(np.sqrt(np.sum((values - mean) ** 2) / (values.size - 1)))
    return mean, std / math.sqrt(values.size)


def simulate_sumrate(config: McConfig, trace: McTrace | None = None) -> list[RateResult]:
    """Per-cell average scheduled sum rate with its standard error."""
    if trace is None:
        trace = simulate_trace(config)
    out = []
    for c in range(config.system.num_cells):
        mean, se = _reduce(trace.rates[:, c])
        out.append(RateResult(mean, "monte_carlo", se))
    return out


def simulate_sinr_samples(config: McConfig, cell: int, beam: int = 0) -> np.ndarray:
    """Raw SINRs of every user of ``cell`` on ``beam``, flattened over trials."""
    system = config.system
    if system.beams[cell] < 1:
        raise ValueError(f"cell {cell} is switched off")
    if not 0 <= beam < system.beams[cell]:
        raise ValueError(f"beam {beam} out of range")
    seed = config.master_seed

    def work(t: int) -> np.ndarray:
        beams = _trial_beams(system, seed, t)
        return _cell_sinr(system, cell, config.users[cell], seed, t, beams)[:, beam]

    return np.concatenate(_run_trials(config, work))


def simulate_max_sinr(config: McConfig, cell: int, users: int | None = None,
                      beam: int = 0) -> np.ndarray:
    """Per-trial maximum over users of the SINR on ``beam``."""
    system = config.system
    K = config.users[cell] if users is None else int(users)
    if system.beams[cell] < 1:
        raise ValueError(f"cell {cell} is switched off")
    seed = config.master_seed

    def work(t: int) -> float:
        beams = _trial_beams(system, seed, t)
        return float(_cell_sinr(system, cell, K, seed, t, beams)[:, beam].max())

    return np.array(_run_trials(config, work))


def ks_statistic(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and a continuous CDF."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)
