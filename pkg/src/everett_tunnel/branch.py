"""Branch weights, decoherence bookkeeping, and world counting.

A scattering run ends in a superposition of a reflected and a transmitted
component; BranchSet holds the real amplitudes c_i of such components with a
split index separating reflected worlds (1..k) from tunneled worlds (k+1..d).
The environment is modeled only through the overlap of its record states,
which decays as exp(-n*lambda) per interaction event; at n -> infinity the
density matrix becomes block-diagonal and the branches are genuine worlds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .evolve import TimeSeries


class ScatteringIncompleteError(ValueError):
    """Too much probability still inside the barrier to split off branches."""


@dataclass(frozen=True)
class BranchSet:
    """Real branch amplitudes with Sum c_i^2 = 1; branches above split_index
    are the tunneled worlds."""

    weights: tuple[float, ...]
    split_index: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if any(w < 0 for w in weights):
            raise ValueError(f"weights must be non-negative, got {weights}")
        total = sum(w * w for w in weights)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"sum of squared weights is {total}, expected 1")
        if not (0 <= self.split_index <= len(weights)):
            raise ValueError(
                f"split_index must lie in [0, {len(weights)}], got {self.split_index}"
            )
        if self.labels is not None and len(self.labels) != len(weights):
            raise ValueError("labels length must match weights")

    @property
    def d(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class DecoherenceModel:
    """Environment-overlap decay exp(-n*lambda) per event, with the coherence
    threshold epsilon below which branches count as fully decohered."""

    lambda_per_event: float
    epsilon_coherence: float

    def __post_init__(self) -> None:
        if self.lambda_per_event <= 0:
            raise ValueError(f"lambda_per_event must be > 0, got {self.lambda_per_event}")
        if not (0.0 < self.epsilon_coherence < 1.0):
            raise ValueError(
                f"epsilon_coherence must lie in (0, 1), got {self.epsilon_coherence}"
            )


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (self.dim, self.dim):
            raise ValueError(f"entries must be {self.dim}x{self.dim}, got {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=1e-12, rtol=0.0):
            raise ValueError("entries not Hermitian within 1e-12")
        if abs(float(np.real(np.trace(entries))) - 1.0) > 1e-10:
            raise ValueError("trace must be 1 within 1e-10")
        diag = np.diag(entries)
        if np.any(np.abs(np.imag(diag)) > 1e-12) or np.any(np.real(diag) < -1e-12):
            raise ValueError("diagonal entries must be real and non-negative")


def branch_set_from_run(series: TimeSeries) -> BranchSet:
    """Two branches (reflected, tunneled) from the final recorded row.

    The residual in-barrier probability is redistributed proportionally, so
    the pair renormalizes without biasing the split.
    """
    w_r = float(series.w_reflected[-1])
    w_t = float(series.w_transmitted[-1])
    p_in = float(series.p_inside[-1])
    if p_in >= 1e-3:
        raise ScatteringIncompleteError(
            f"p_inside = {p_in} at the final row; scattering not complete"
        )
    scale = math.sqrt(w_r * w_r + w_t * w_t)
    if scale <= 0.0:
        raise ValueError("final row carries no probability outside the barrier")
    return BranchSet(weights=(w_r / scale, w_t / scale), split_index=1)


def tunneling_probability(branches: BranchSet) -> float:
    """Born weight of the tunneled worlds: Sum_{i > split} c_i^2."""
    return sum(w * w for w in branches.weights[branches.split_index :])


def build_density_matrix(
    branches: BranchSet, model: DecoherenceModel, n_events: int
) -> DensityMatrix:
    """rho_ij = c_i c_j exp(-n*lambda) off the diagonal, c_i^2 on it.

    n_events = 0 is the pure state; n_events -> infinity is block-diagonal.
    """
    if n_events < 0:
        raise ValueError(f"n_events must be >= 0, got {n_events}")
    c = np.array(branches.weights, dtype=float)
    damp = math.exp(-n_events * model.lambda_per_event)
    entries = np.outer(c, c).astype(np.complex128) * damp
    np.fill_diagonal(entries, c * c)
    return DensityMatrix(dim=branches.d, entries=entries)


def coherence_measure(rho: DensityMatrix) -> float:
    """Sum of off-diagonal magnitudes; 0 iff block-diagonal."""
    off = np.abs(rho.entries).sum() - np.abs(np.diag(rho.entries)).sum()
    return float(off)


def events_to_decohere(branches: BranchSet, model: DecoherenceModel) -> int:
    """Smallest n with coherence_measure(build_density_matrix(.., n)) below
    epsilon; returns 0 when already decohered.

    The closed form ceil(ln(C0/eps)/lambda) lands within one of the answer;
    the loops nudge it onto the literal threshold so the result agrees with
    a brute-force scan even at floating-point boundaries.
    """

    def coherence(n: int) -> float:
        return coherence_measure(build_density_matrix(branches, model, n))

    c0 = coherence(0)
    eps = model.epsilon_coherence
    if c0 < eps:
        return 0
    n = max(0, math.ceil(math.log(c0 / eps) / model.lambda_per_event))
    while n > 0 and coherence(n - 1) < eps:
        n -= 1
    while coherence(n) >= eps:
        n += 1
    return n


def world_count_paper(n_events: int, d_outcomes: int) -> int:
    """N^d, exact (arbitrary-precision integer)."""
    _check_counts(n_events, d_outcomes)
    return n_events**d_outcomes


def world_count_sequential(n_events: int, d_outcomes: int) -> int:
    """d^N: each of N events splits every live world into d children."""
    _check_counts(n_events, d_outcomes)
    return d_outcomes**n_events


def _check_counts(n_events: int, d_outcomes: int) -> None:
    if n_events < 0:
        raise ValueError(f"n_events must be >= 0, got {n_events}")
    if d_outcomes < 1:
        raise ValueError(f"d_outcomes must be >= 1, got {d_outcomes}")


def reflection_probability(branches: BranchSet) -> float:
    """Born weight of the reflected worlds: Sum_{i <= split} c_i^2."""
    return sum(w * w for w in branches.weights[: branches.split_index])
