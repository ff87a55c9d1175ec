"""System configuration for a multi-cell random-beamforming downlink.

All quantities are stored in linear scale.  dB inputs are converted once,
when a configuration is ingested by :func:`build_system`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np


class ConfigError(ValueError):
    """Raised for an invalid or inconsistent system configuration."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemModel:
    """C-cell downlink with a common transmit power per base station.

    Parameters
    ----------
    num_antennas : int
        Transmit antennas N_T at every base station.
    beams : tuple of int
        Number of random beams M_c per cell, each in ``[0, num_antennas]``.
        ``M_c = 0`` switches the base station off.
    total_power : float
        Per-BS transmit power P_T (linear).
    noise_power : float
        Receiver noise variance (linear).
    cross_gain : ndarray, shape (C, C)
        ``cross_gain[l, c]`` is the power attenuation from BS ``l`` to users
        of cell ``c``.  Off-diagonal entries lie in ``[0, 1)``; the diagonal
        is 1.
    """

    num_antennas: int
    beams: tuple[int, ...]
    total_power: float
    noise_power: float = 1.0
    cross_gain: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        beams = tuple(int(m) for m in self.beams)
        object.__setattr__(self, "beams", beams)
        C = len(beams)
        if C < 1:
            raise ConfigError("at least one cell is required")
        if self.num_antennas < 1:
            raise ConfigError("num_antennas must be >= 1")
        for c, m in enumerate(beams):
            if not 0 <= m <= self.num_antennas:
                raise ConfigError(f"cell {c}: M={m} outside [0, {self.num_antennas}]")
        if not (self.total_power > 0 and self.noise_power > 0):
            raise ConfigError("total_power and noise_power must be positive")
        if self.cross_gain is None:
            gain = np.eye(C)
        else:
            gain = np.array(self.cross_gain, dtype=float)
        if gain.shape != (C, C):
            raise ConfigError(f"cross_gain must have shape ({C}, {C}), got {gain.shape}")
        off = ~np.eye(C, dtype=bool)
        if np.any(gain[off] < 0) or np.any(gain[off] >= 1):
            raise ConfigError("off-diagonal cross gains must lie in [0, 1)")
        np.fill_diagonal(gain, 1.0)
        gain.setflags(write=False)
        object.__setattr__(self, "cross_gain", gain)

    @property
    def num_cells(self) -> int:
        return len(self.beams)

    @property
    def snr_total(self) -> float:
        """rho = P_T / sigma^2."""
        return self.total_power / self.noise_power

    def snr_per_beam(self, c: int) -> float:
        """eta_c = P_T / (M_c sigma^2); NaN when cell ``c`` is off."""
        m = self.beams[c]
        return self.snr_total / m if m > 0 else math.nan

    def inr_per_beam(self, l: int, c: int) -> float:
        """mu_{l,c} = gamma_{l,c} P_T / (M_l sigma^2); 0 when BS ``l`` is off."""
        if l == c:
            raise ValueError("inr_per_beam needs l != c")
        m = self.beams[l]
        return float(self.cross_gain[l, c]) * self.snr_total / m if m > 0 else 0.0

    def interferers(self, c: int) -> list[tuple[int, int, float]]:
        """Active interfering cells of ``c`` as ``(l, M_l, mu_{l,c})``.

        Cells that are off or have zero cross gain contribute nothing and are
        skipped.
        """
        out = []
        for l in range(self.num_cells):
            if l == c or self.beams[l] == 0:
                continue
            mu = self.inr_per_beam(l, c)
            if mu > 0:
                out.append((l, self.beams[l], mu))
        return out

    def with_beams(self, beams: Sequence[int]) -> "SystemModel":
        return SystemModel(self.num_antennas, tuple(beams), self.total_power,
                           self.noise_power, np.array(self.cross_gain))

    def to_config(self) -> dict[str, Any]:
        """Serialize to the JSON config schema (linear powers, explicit gains)."""
        return {
            "nt": self.num_antennas,
            "pt": self.total_power,
            "noise": self.noise_power,
            "cells": [{"M": m} for m in self.beams],
            "gamma": self.cross_gain.tolist(),
        }


@dataclass(frozen=True)
class UserScaling:
    """Per-cell user population law K_c ~ a_c * rho**alpha_c.

    ``users`` pins K_c for cells where it is given (entries may be ``None``).
    """

    alpha: tuple[float, ...]
    prefactor: tuple[float, ...] | None = None
    users: tuple[int | None, ...] | None = None

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in self.alpha)
        if any(a < 0 for a in alpha):
            raise ConfigError("alpha must be nonnegative")
        object.__setattr__(self, "alpha", alpha)
        pref = self.prefactor if self.prefactor is not None else (1.0,) * len(alpha)
        pref = tuple(float(a) for a in pref)
        if len(pref) != len(alpha) or any(a <= 0 for a in pref):
            raise ConfigError("prefactor must be positive, one per cell")
        object.__setattr__(self, "prefactor", pref)
        if self.users is not None:
            if len(self.users) != len(alpha):
                raise ConfigError("users must have one entry per cell")
            for k in self.users:
                if k is not None and (int(k) != k or k < 1):
                    raise ConfigError(f"fixed user count {k} must be an integer >= 1")


def users_at_snr(scaling: UserScaling, rho: float) -> list[int]:
    """User counts ``K_c = max(1, floor(a_c * rho**alpha_c))``.

    Cells with a fixed user count keep it regardless of ``rho``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    fixed = scaling.users or (None,) * len(scaling.alpha)
    out = []
    for a, pref, k in zip(scaling.alpha, scaling.prefactor, fixed):
        if k is not None:
            out.append(int(k))
        else:
            # guard against 999.9999 from pow for exact integer targets
            val = pref * rho ** a
            out.append(max(1, math.floor(val * (1 + 1e-12))))
    return out


def _as_mapping(raw: str | bytes | Path | Mapping[str, Any]) -> Mapping[str, Any]:
    if isinstance(raw, Mapping):
        return raw
    if isinstance(raw, Path):
        raw = raw.read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    return data


def build_system(raw_config: str | bytes | Path | Mapping[str, Any]) -> SystemModel:
    """Validate a JSON configuration and return the :class:`SystemModel`.

    Power can be given either as ``pt`` (with optional ``noise``, default 1),
    or through per-beam SNRs ``cells[c].snr_db``; in the latter case every
    cell that states an SNR must imply the same total SNR ``eta_c * M_c``.
    Cross coupling is either ``gamma`` (linear) or ``inr_db`` where
    ``inr_db[l][c]`` is the per-beam INR mu_{l,c} in dB (``null`` on the
    diagonal or where absent).
    """
    cfg = _as_mapping(raw_config)
    cells = cfg.get("cells")
    if not isinstance(cells, list) or not cells:
        raise ConfigError("config needs a non-empty 'cells' list")
    try:
        beams = [int(cell["M"]) for cell in cells]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("every cell needs an integer 'M'") from exc
    C = len(beams)
    nt = int(cfg.get("nt", max(beams)))

    noise = float(cfg.get("noise", 1.0))
    if noise <= 0:
        raise ConfigError("noise must be positive")
    if "pt" in cfg:
        if any("snr_db" in cell for cell in cells):
            raise ConfigError("give either 'pt' or per-cell 'snr_db', not both")
        pt = float(cfg["pt"])
    else:
        rhos = []
        for c, cell in enumerate(cells):
            if "snr_db" in cell:
                if beams[c] == 0:
                    raise ConfigError(f"cell {c}: snr_db given for a switched-off cell")
                rhos.append(db_to_linear(float(cell["snr_db"])) * beams[c])
        if not rhos:
            raise ConfigError("config needs 'pt' or at least one cell 'snr_db'")
        rho = rhos[0]
        if any(abs(r - rho) > 1e-9 * rho for r in rhos):
            raise ConfigError("per-cell snr_db values imply different total SNRs")
        pt = rho * noise
    if pt <= 0:
        raise ConfigError("total power must be positive")
    rho = pt / noise

    if "gamma" in cfg and "inr_db" in cfg:
        raise ConfigError("give either 'gamma' or 'inr_db', not both")
    gain = np.eye(C)
    if "gamma" in cfg:
        gain = np.array(cfg["gamma"], dtype=float)
        if gain.shape != (C, C):
            raise ConfigError(f"gamma must be {C}x{C}")
    elif "inr_db" in cfg:
        inr = cfg["inr_db"]
        if len(inr) != C or any(len(row) != C for row in inr):
            raise ConfigError(f"inr_db must be {C}x{C}")
        for l in range(C):
            for c in range(C):
                if l == c or inr[l][c] is None:
                    continue
                if beams[l] == 0:
                    raise ConfigError(f"inr_db[{l}][{c}] given but cell {l} is off")
                gain[l, c] = db_to_linear(float(inr[l][c])) * beams[l] / rho
    return SystemModel(nt, tuple(beams), pt, noise, gain)


def build_scaling(raw_config: str | bytes | Path | Mapping[str, Any]) -> UserScaling:
    """User scaling from the ``alpha``/``K``/``a`` keys of each cell."""
    cfg = _as_mapping(raw_config)
    cells = cfg.get("cells") or []
    alpha = tuple(float(cell.get("alpha", 0.0)) for cell in cells)
    pref = tuple(float(cell.get("a", 1.0)) for cell in cells)
    users = tuple(cell.get("K") for cell in cells)
    return UserScaling(alpha, pref, users)
