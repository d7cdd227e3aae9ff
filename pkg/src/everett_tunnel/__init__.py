"""Rectangular-barrier tunneling with branch bookkeeping and branching times.

Submodules:
    core      grids, barrier, wavefunctions, unit systems
    analytic  closed-form transmission (exact and evanescent estimate)
    evolve    Crank-Nicolson wavepacket propagation and time series
    branch    branch weights, decoherence, density matrix, world counts
    timing    separation energies, branching duration, thermal model
    config    flat key = value run configuration files
    cli       everett-tunnel command-line frontend

Attributes re-export lazily so cheap paths (the mqt and worlds commands)
never pay for the solver stack.
"""

from __future__ import annotations

__version__ = "0.1.0"

_EXPORTS = {
    "core": (
        "Grid",
        "Particle",
        "RectBarrier",
        "UnitMode",
        "UnitSystem",
        "NATURAL_UNITS",
        "WaveFunction",
        "ZeroNormError",
        "normalize",
        "potential_at",
    ),
    "analytic": (
        "BadRangeError",
        "NonPositiveEnergyError",
        "NotTunnelingError",
        "TransmissionPoint",
        "decay_constant",
        "transmission_approx",
        "transmission_exact",
        "transmission_point",
        "transmission_sweep",
    ),
    "evolve": (
        "EvolveConfig",
        "GaussianPacket",
        "PacketOutOfDomainError",
        "SolverBreakdownError",
        "TimeSeries",
        "init_packet",
        "mean_energy",
        "run",
        "step_crank_nicolson",
    ),
    "branch": (
        "BranchSet",
        "DecoherenceModel",
        "DensityMatrix",
        "ScatteringIncompleteError",
        "branch_set_from_run",
        "build_density_matrix",
        "coherence_measure",
        "events_to_decohere",
        "reflection_probability",
        "tunneling_probability",
        "world_count_paper",
        "world_count_sequential",
    ),
    "timing": (
        "EnergyDecomposition",
        "LengthMismatchError",
        "MacroParams",
        "NoGrowthError",
        "SubUnityEventsError",
        "TimingResult",
        "ZeroSeparationError",
        "branching_duration",
        "branching_energy_rate",
        "energy_decomposition",
        "macroscopic_tunneling_time",
        "separation_energy",
        "thermal_branching_events",
        "timing_from_series",
        "tunneling_time",
    ),
    "config": (
        "ConfigError",
        "RunSettings",
        "load_config",
        "parse_config_text",
        "standard_scenario",
    ),
}

_ATTR_TO_MODULE = {
    name: module for module, names in _EXPORTS.items() for name in names
}

__all__ = sorted(_ATTR_TO_MODULE) + ["__version__"]


def __getattr__(name: str):
    module_name = _ATTR_TO_MODULE.get(name)
    if module_name is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    module = importlib.import_module(f".{module_name}", __name__)
    value = getattr(module, name)
    globals()[name] = value
    return value


def __dir__() -> list[str]:
    return __all__
