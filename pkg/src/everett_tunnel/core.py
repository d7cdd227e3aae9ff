"""Shared domain types: units, spatial grid, wavefunction, barrier, particle.

Natural units (hbar = 1, mass of order 1) are the default for every
microscopic simulation; the SI system exists for the macroscopic timing
calculator, where hbar and the Boltzmann constant carry their laboratory
values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

HBAR_SI = 1.054571817e-34       # J s
K_BOLTZMANN_SI = 1.380649e-23   # J / K


class ZeroNormError(ValueError):
    """Wavefunction norm too small to rescale."""


class UnitMode(enum.Enum):
    NATURAL = "natural"
    SI = "si"


@dataclass(frozen=True)
class UnitSystem:
    """Constants, in either natural (hbar = 1) or SI units.

    ``k_boltzmann`` is only meaningful in SI mode; the natural system keeps
    a placeholder 1.0 that no microscopic computation reads.
    """

    mode: UnitMode
    hbar: float
    k_boltzmann: float

    def __post_init__(self) -> None:
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.mode is UnitMode.NATURAL and self.hbar != 1.0:
            raise ValueError("natural units require hbar == 1.0 exactly")

    @classmethod
    def natural(cls) -> "UnitSystem":
        return cls(UnitMode.NATURAL, 1.0, 1.0)

    @classmethod
    def si(cls) -> "UnitSystem":
        return cls(UnitMode.SI, HBAR_SI, K_BOLTZMANN_SI)


NATURAL_UNITS = UnitSystem.natural()


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D spatial grid with n_points nodes spanning [x_min, x_max]."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.n_points < 16:
            raise ValueError(f"need n_points >= 16, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True)
class RectBarrier:
    """Rectangular potential step of height v0 on [x_start, x_start + length].

    Both edges are inside the barrier (closed interval); v0 = 0 degenerates
    to free propagation.
    """

    v0: float
    length: float
    x_start: float = 0.0

    def __post_init__(self) -> None:
        if self.v0 < 0:
            raise ValueError(f"barrier height must be non-negative, got {self.v0}")
        if self.length <= 0:
            raise ValueError(f"barrier length must be positive, got {self.length}")

    @property
    def x_end(self) -> float:
        return self.x_start + self.length


@dataclass(frozen=True)
class Particle:
    mass: float
    energy: float

    def __post_init__(self) -> None:
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.energy < 0:
            raise ValueError(f"energy must be non-negative, got {self.energy}")


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes sampled on a grid; one value per grid node."""

    grid: Grid
    amp: np.ndarray

    def __post_init__(self) -> None:
        amp = np.array(self.amp, dtype=np.complex128, copy=True)
        if amp.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitude length {amp.shape} does not match grid "
                f"({self.grid.n_points} points)"
            )
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValueError("amplitudes must be finite")
        amp.flags.writeable = False
        object.__setattr__(self, "amp", amp)

    def norm(self) -> float:
        """sqrt(sum |amp|^2 dx)."""
        return math.sqrt(float(np.sum(np.abs(self.amp) ** 2)) * self.grid.dx)

    def probability_density(self) -> np.ndarray:
        return np.abs(self.amp) ** 2


def potential_at(barrier: RectBarrier, x: float) -> float:
    """Barrier potential at position x; total over all real x."""
    if barrier.x_start <= x <= barrier.x_end:
        return barrier.v0
    return 0.0


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale psi to unit norm.

    Raises ZeroNormError when the input norm is at or below 1e-300, where
    the rescale factor would overflow.
    """
    n = psi.norm()
    if n <= 1e-300:
        raise ZeroNormError(f"cannot normalize wavefunction with norm {n}")
    return WaveFunction(psi.grid, psi.amp / n)
