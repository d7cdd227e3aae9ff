"""Branching-time machinery: separation energies, branching duration,
tunneling time, and the macroscopic thermal model.

Two estimators of the separation energy are kept side by side and never
reconciled: separation_energy takes the measure-weighted energy gap
|E_R - E_T|, branching_energy_rate takes the logarithmic growth rate of the
tunneled amplitude, hbar * W'(t*)/W(t*) at the steepest-growth instant t*.
The branching duration is tau_b = hbar / delta_e in either case, and the
tunneling time is tau_t = n_b * tau_b with n_b >= 1 branching events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core import UnitSystem, NATURAL_UNITS

if TYPE_CHECKING:
    from .branch import BranchSet
    from .evolve import TimeSeries


class LengthMismatchError(ValueError):
    """branch_energies must have one entry per branch."""


class NoGrowthError(ValueError):
    """The tunneled amplitude never grows; no branching event to time."""


class ZeroSeparationError(ValueError):
    """delta_e <= 0 means tau_b diverges: nothing branches."""


class SubUnityEventsError(ValueError):
    """The system must branch at least once: n_b >= 1."""


@dataclass(frozen=True)
class EnergyDecomposition:
    """Measure-weighted energy split E_psi = E_R + E_T."""

    e_universal: float
    e_reflected_weighted: float
    e_transmitted_weighted: float

    def __post_init__(self) -> None:
        total = self.e_reflected_weighted + self.e_transmitted_weighted
        if abs(total - self.e_universal) > 1e-10 * max(1.0, abs(self.e_universal)):
            raise ValueError(
                f"e_universal = {self.e_universal} != E_R + E_T = {total}"
            )


@dataclass(frozen=True)
class TimingResult:
    delta_e_separation: float
    delta_e_rate: float
    tau_b: float
    n_b: float
    tau_t: float
    eval_time: float

    def __post_init__(self) -> None:
        if self.tau_b <= 0:
            raise ValueError(f"tau_b must be > 0, got {self.tau_b}")
        if self.n_b < 1:
            raise ValueError(f"n_b must be >= 1, got {self.n_b}")
        if abs(self.tau_t - self.n_b * self.tau_b) > 1e-12 * max(1.0, abs(self.tau_t)):
            raise ValueError("tau_t must equal n_b * tau_b")


@dataclass(frozen=True)
class MacroParams:
    """Thermal branching model: T_E the environment temperature, T_s the
    crossover temperature delta_e / k_B, alpha the scaling exponent, tau_b
    the intrinsic branching duration (1/f_p when derived from the plasma
    frequency). Temperatures in kelvin; tau_b in any one time unit, which
    the model only ever scales."""

    t_env: float
    t_crossover: float
    alpha: float
    tau_b: float

    def __post_init__(self) -> None:
        if self.t_env < 0:
            raise ValueError(f"t_env must be >= 0, got {self.t_env}")
        if self.t_crossover <= 0:
            raise ValueError(f"t_crossover must be > 0, got {self.t_crossover}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.tau_b <= 0:
            raise ValueError(f"tau_b must be > 0, got {self.tau_b}")


def energy_decomposition(
    branches: BranchSet, branch_energies: list[float] | tuple[float, ...]
) -> EnergyDecomposition:
    """E_R = Sum_{i<=k} c_i^2 E_i, E_T = Sum_{i>k} c_i^2 E_i, E_psi = E_R + E_T."""
    if len(branch_energies) != branches.d:
        raise LengthMismatchError(
            f"{len(branch_energies)} energies for {branches.d} branches"
        )
    k = branches.split_index
    e_r = sum(w * w * e for w, e in zip(branches.weights[:k], branch_energies[:k]))
    e_t = sum(w * w * e for w, e in zip(branches.weights[k:], branch_energies[k:]))
    return EnergyDecomposition(
        e_universal=e_r + e_t,
        e_reflected_weighted=e_r,
        e_transmitted_weighted=e_t,
    )


def separation_energy(decomp: EnergyDecomposition) -> float:
    """|E_R - E_T|."""
    return abs(decomp.e_reflected_weighted - decomp.e_transmitted_weighted)


def branching_energy_rate(
    series: TimeSeries, units: UnitSystem = NATURAL_UNITS
) -> tuple[float, float]:
    """delta_e = hbar * W'(t*) / W(t*) with W the tunneled amplitude and t*
    the instant of steepest growth (restricted to rows with W > 0, where the
    quotient exists). Returns (delta_e, t*)."""
    w = np.asarray(series.w_transmitted, dtype=float)
    t = np.asarray(series.times, dtype=float)
    if w.shape[0] < 3:
        raise ValueError(f"need at least 3 recorded rows, got {w.shape[0]}")
    if not np.any(w > 0):
        raise NoGrowthError("w_transmitted never positive")
    if not np.any(np.diff(w) > 0):
        # exact-difference guard: the one-sided edge stencils below can
        # turn a flat or decaying series into an O(ulp) positive slope
        raise NoGrowthError("tunneled amplitude never grows")
    dwdt = np.gradient(w, t, edge_order=2)
    rate = np.where(w > 0, dwdt, -np.inf)
    i_star = int(np.argmax(rate))
    if dwdt[i_star] <= 0:
        raise NoGrowthError("tunneled amplitude never grows")
    delta_e = units.hbar * float(dwdt[i_star]) / float(w[i_star])
    return delta_e, float(t[i_star])


def branching_duration(delta_e: float, units: UnitSystem = NATURAL_UNITS) -> float:
    """tau_b = hbar / delta_e."""
    if delta_e <= 0:
        raise ZeroSeparationError(
            f"delta_e must be > 0 (got {delta_e}): tau_b diverges, no branching"
        )
    return units.hbar / delta_e


def tunneling_time(n_b: float, tau_b: float) -> float:
    """tau_t = n_b * tau_b; the system must branch at least once."""
    if n_b < 1:
        raise SubUnityEventsError(f"n_b must be >= 1, got {n_b}")
    if tau_b <= 0:
        raise ValueError(f"tau_b must be > 0, got {tau_b}")
    return n_b * tau_b


def thermal_branching_events(params: MacroParams) -> float:
    """n_b(T) = 1 + (T_E / T_s)^alpha; exactly 1 at T_E = 0."""
    if params.t_env == 0.0:
        return 1.0
    return 1.0 + (params.t_env / params.t_crossover) ** params.alpha


def macroscopic_tunneling_time(params: MacroParams) -> float:
    """tau_t(T) = n_b(T) * tau_b."""
    return thermal_branching_events(params) * params.tau_b


def timing_from_series(
    series: TimeSeries, units: UnitSystem = NATURAL_UNITS, n_b: float = 1.0
) -> TimingResult:
    """Bundle both estimators for one run: rate-based tau_b plus the
    measure-weighted separation energy from the final recorded row."""
    from .branch import branch_set_from_run

    branches = branch_set_from_run(series)
    energies = [float(series.e_reflected[-1]), float(series.e_transmitted[-1])]
    decomp = energy_decomposition(branches, energies)
    delta_sep = separation_energy(decomp)
    delta_rate, t_star = branching_energy_rate(series, units)
    tau_b = branching_duration(delta_rate, units)
    return TimingResult(
        delta_e_separation=delta_sep,
        delta_e_rate=delta_rate,
        tau_b=tau_b,
        n_b=n_b,
        tau_t=tunneling_time(n_b, tau_b),
        eval_time=t_star,
    )
