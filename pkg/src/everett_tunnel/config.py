"""Flat key = value run configuration files.

One scalar per line, `#` starts a comment, unknown keys are an error: a typo
must never silently fall back to a default and change the physics. All
lengths and energies are natural units unless `units = si` is present.
Omitted keys take the standard-scenario defaults, e.g.

    # taller barrier, everything else canonical
    v0 = 2.0
    n_steps = 4000
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import Grid, RectBarrier, UnitMode, UnitSystem, NATURAL_UNITS
from .evolve import EvolveConfig, GaussianPacket


class ConfigError(ValueError):
    """Malformed, unknown, or inconsistent configuration entry."""


@dataclass(frozen=True)
class RunSettings:
    """Everything a run needs: the evolve configuration, the unit system, and
    the decoherence parameters the branch bookkeeping consumes."""

    evolve: EvolveConfig
    units: UnitSystem
    lambda_per_event: float
    epsilon_coherence: float


_FLOAT_KEYS = {
    "x_min": -200.0,
    "x_max": 200.0,
    "v0": 1.0,
    "length": 1.0,
    "x_start": 0.0,
    "x0": -50.0,
    "sigma": 10.0,
    "k0": 1.0,
    "mass": 1.0,
    "dt": 0.05,
    "lambda": 1.0,
    "epsilon": 1e-3,
}

_INT_KEYS = {
    "n_points": 4096,
    "n_steps": 3000,
    "record_every": 10,
}

_STR_KEYS = {
    "units": "natural",
}

# physics scalars a sweep may vary (grid shape and counts stay fixed)
SWEEPABLE_KEYS = ("v0", "length", "x_start", "x0", "sigma", "k0", "mass", "dt")


def standard_scenario() -> RunSettings:
    """The canonical configuration every acceptance check references:
    E = 0.5 V0 packet against a unit barrier on [-200, 200] x 4096."""
    return build_settings({})


def parse_config_values(text: str, source: str = "<string>") -> dict[str, str]:
    """Raw key -> value strings from config text, fail-closed on unknown keys."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FLOAT_KEYS and key not in _INT_KEYS and key not in _STR_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        values[key] = value
    return values


def parse_config_text(text: str, source: str = "<string>") -> RunSettings:
    return build_settings(parse_config_values(text, source), source)


def load_config(path: str | Path) -> RunSettings:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def build_settings(values: dict[str, str], source: str = "<defaults>") -> RunSettings:
    floats = dict(_FLOAT_KEYS)
    ints = dict(_INT_KEYS)
    strs = dict(_STR_KEYS)
    for key, value in values.items():
        try:
            if key in ints:
                ints[key] = int(value)
            elif key in floats:
                floats[key] = float(value)
            else:
                strs[key] = value.lower()
        except ValueError as exc:
            raise ConfigError(f"{source}: bad value for {key!r}: {value!r}") from exc

    if strs["units"] == "natural":
        units = NATURAL_UNITS
    elif strs["units"] == "si":
        units = UnitSystem.si()
    else:
        raise ConfigError(f"{source}: units must be 'natural' or 'si', got {strs['units']!r}")

    try:
        grid = Grid(x_min=floats["x_min"], x_max=floats["x_max"], n_points=ints["n_points"])
        barrier = RectBarrier(v0=floats["v0"], length=floats["length"], x_start=floats["x_start"])
        packet = GaussianPacket(x0=floats["x0"], sigma=floats["sigma"], k0=floats["k0"])
        evolve = EvolveConfig(
            grid=grid,
            packet=packet,
            barrier=barrier,
            mass=floats["mass"],
            dt=floats["dt"],
            n_steps=ints["n_steps"],
            record_every=ints["record_every"],
        )
        if floats["lambda"] <= 0:
            raise ValueError(f"lambda must be > 0, got {floats['lambda']}")
        if not (0 < floats["epsilon"] < 1):
            raise ValueError(f"epsilon must lie in (0, 1), got {floats['epsilon']}")
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return RunSettings(
        evolve=evolve,
        units=units,
        lambda_per_event=floats["lambda"],
        epsilon_coherence=floats["epsilon"],
    )


def config_echo(settings: RunSettings) -> dict[str, object]:
    """Flat mapping of the effective configuration, for result files."""
    ev = settings.evolve
    return {
        "x_min": ev.grid.x_min,
        "x_max": ev.grid.x_max,
        "n_points": ev.grid.n_points,
        "v0": ev.barrier.v0,
        "length": ev.barrier.length,
        "x_start": ev.barrier.x_start,
        "x0": ev.packet.x0,
        "sigma": ev.packet.sigma,
        "k0": ev.packet.k0,
        "mass": ev.mass,
        "dt": ev.dt,
        "n_steps": ev.n_steps,
        "record_every": ev.record_every,
        "lambda": settings.lambda_per_event,
        "epsilon": settings.epsilon_coherence,
        "units": "si" if settings.units.mode is UnitMode.SI else "natural",
    }
