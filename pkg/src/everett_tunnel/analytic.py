"""Closed-form transmission through a rectangular barrier.

Two routes are kept deliberately separate: the evanescent-decay
approximation T ~ exp(-2 kappa L), and the exact transmission coefficient
of the piecewise-constant barrier, which serves as the oracle against
which both the approximation and the time-domain solver are checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Particle, RectBarrier, UnitSystem, NATURAL_UNITS


class NotTunnelingError(ValueError):
    """Particle energy at or above the barrier: no evanescent decay constant."""


class NonPositiveEnergyError(ValueError):
    """Exact transmission requires E > 0."""


class BadRangeError(ValueError):
    """Invalid energy range for a sweep."""


@dataclass(frozen=True)
class TransmissionPoint:
    """Transmission quantities at one energy.

    kappa and p_approx only exist below the barrier; above it they are None.
    """

    energy: float
    kappa: float | None
    p_approx: float | None
    p_exact: float


def decay_constant(
    particle: Particle, barrier: RectBarrier, units: UnitSystem = NATURAL_UNITS
) -> float:
    """Evanescent decay constant kappa = sqrt(2m(V0 - E)) / hbar.

    Only defined in the tunneling regime E < V0; raises NotTunnelingError
    for energies at or above the barrier top.
    """
    if particle.energy >= barrier.v0:
        raise NotTunnelingError(
            f"E = {particle.energy} >= V0 = {barrier.v0}: above-barrier motion"
        )
    return math.sqrt(2.0 * particle.mass * (barrier.v0 - particle.energy)) / units.hbar


def transmission_approx(kappa: float, barrier_length: float) -> float:
    """Evanescent-tail estimate exp(-2 kappa L)."""
    if kappa < 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    if barrier_length <= 0:
        raise ValueError(f"barrier length must be positive, got {barrier_length}")
    return math.exp(-2.0 * kappa * barrier_length)


def transmission_exact(
    particle: Particle, barrier: RectBarrier, units: UnitSystem = NATURAL_UNITS
) -> float:
    """Exact transmission coefficient of the rectangular barrier.

    Below the barrier:   1 / (1 + V0^2 sinh^2(kappa L) / (4 E (V0 - E)))
    Above the barrier:   1 / (1 + V0^2 sin^2(k' L) / (4 E (E - V0)))
    At E == V0 the removable singularity is filled with its limit
    1 / (1 + m L^2 V0 / (2 hbar^2)), keeping energy sweeps total.
    """
    e = particle.energy
    v0 = barrier.v0
    length = barrier.length
    if e <= 0:
        raise NonPositiveEnergyError(f"exact transmission needs E > 0, got {e}")
    if v0 == 0:
        return 1.0
    hbar = units.hbar
    m = particle.mass
    if e < v0:
        kappa = math.sqrt(2.0 * m * (v0 - e)) / hbar
        if kappa * length > 350.0:
            # sinh would overflow; opaque limit 16 E (V0-E) / V0^2 e^{-2 kL}
            return 16.0 * e * (v0 - e) / (v0 * v0) * math.exp(-2.0 * kappa * length)
        s = math.sinh(kappa * length)
        return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (v0 - e)))
    if e > v0:
        k_prime = math.sqrt(2.0 * m * (e - v0)) / hbar
        s = math.sin(k_prime * length)
        return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (e - v0)))
    return 1.0 / (1.0 + m * length * length * v0 / (2.0 * hbar * hbar))


def transmission_point(
    mass: float,
    barrier: RectBarrier,
    energy: float,
    units: UnitSystem = NATURAL_UNITS,
) -> TransmissionPoint:
    """Evaluate all transmission quantities at a single energy."""
    particle = Particle(mass=mass, energy=energy)
    p_exact = transmission_exact(particle, barrier, units)
    if energy < barrier.v0:
        kappa = decay_constant(particle, barrier, units)
        p_approx = transmission_approx(kappa, barrier.length)
    else:
        kappa = None
        p_approx = None
    return TransmissionPoint(energy=energy, kappa=kappa, p_approx=p_approx, p_exact=p_exact)


def transmission_sweep(
    particle_mass: float,
    barrier: RectBarrier,
    e_min: float,
    e_max: float,
    n_steps: int,
    units: UnitSystem = NATURAL_UNITS,
) -> list[TransmissionPoint]:
    """Tabulate transmission over n_steps energies linearly spaced on [e_min, e_max]."""
    if not (0 < e_min < e_max):
        raise BadRangeError(f"need 0 < e_min < e_max, got [{e_min}, {e_max}]")
    if n_steps < 2:
        raise BadRangeError(f"need n_steps >= 2, got {n_steps}")
    energies = np.linspace(e_min, e_max, n_steps)
    return [transmission_point(particle_mass, barrier, float(e), units) for e in energies]
