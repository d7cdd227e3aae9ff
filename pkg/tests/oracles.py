"""Independent oracles the tests compare the package against.

Everything here is implemented from first principles, separate from the
package code paths it checks: a re-derived closed-form transmission
coefficient, quadrature of that coefficient over a packet's momentum
density, explicit world-tree enumeration, and brute-force projector sums.
"""

from __future__ import annotations

import math

import numpy as np


def exact_transmission(energy: float, v0: float, length: float, mass: float) -> float:
    """Rectangular-barrier transmission coefficient, re-derived by hand."""
    if energy <= 0:
        raise ValueError("need energy > 0")
    if v0 == 0:
        return 1.0
    if energy < v0:
        kappa = math.sqrt(2.0 * mass * (v0 - energy))
        s = math.sinh(kappa * length)
        return 1.0 / (1.0 + (v0 * s) ** 2 / (4.0 * energy * (v0 - energy)))
    if energy > v0:
        k = math.sqrt(2.0 * mass * (energy - v0))
        s = math.sin(k * length)
        return 1.0 / (1.0 + (v0 * s) ** 2 / (4.0 * energy * (energy - v0)))
    return 1.0 / (1.0 + mass * length * length * v0 / 2.0)


def momentum_averaged_transmission(
    k0: float,
    sigma: float,
    v0: float,
    length: float,
    mass: float = 1.0,
    n_nodes: int = 4001,
) -> float:
    """Trapezoid quadrature of |phi(k)|^2 T(E_k) over the packet's momentum
    density: Gaussian with mean k0 and standard deviation 1/(2 sigma)."""
    std = 1.0 / (2.0 * sigma)
    ks = np.linspace(k0 - 10.0 * std, k0 + 10.0 * std, n_nodes)
    if ks[0] <= 0:
        raise ValueError("momentum window reaches k <= 0; oracle not applicable")
    density = np.exp(-((ks - k0) ** 2) / (2.0 * std * std)) / (
        std * math.sqrt(2.0 * math.pi)
    )
    t_vals = np.array(
        [exact_transmission(k * k / (2.0 * mass), v0, length, mass) for k in ks]
    )
    return float(np.trapezoid(density * t_vals, ks))


def enumerate_world_tree(n_events: int, d_outcomes: int) -> int:
    """Count leaves of the branching tree by building it: every event splits
    every live world into d children."""
    worlds = [()]
    for _ in range(n_events):
        worlds = [w + (o,) for w in worlds for o in range(d_outcomes)]
    return len(worlds)


def projector_tunneled_weight(weights: np.ndarray, split: int) -> float:
    """|P v|^2 with P the explicit projector onto the tunneled subspace."""
    d = len(weights)
    projector = np.zeros((d, d))
    for i in range(split, d):
        basis = np.zeros(d)
        basis[i] = 1.0
        projector += np.outer(basis, basis)
    projected = projector @ np.asarray(weights, dtype=float)
    return float(projected @ projected)


def scan_events_to_decohere(
    weights, lam: float, eps: float, n_max: int = 10**6
) -> int:
    """Literal linear scan: smallest n at which the summed off-diagonal
    coherence sum_{i != j} c_i c_j e^{-n lam} drops below eps."""
    d = len(weights)

    def coherence(n: int) -> float:
        damp = math.exp(-n * lam)
        return sum(
            weights[i] * weights[j] * damp
            for i in range(d)
            for j in range(d)
            if i != j
        )

    n = 0
    while coherence(n) >= eps:
        n += 1
        if n > n_max:
            raise RuntimeError("scan did not terminate")
    return n


def random_branch_weights(rng: np.random.Generator, d: int) -> np.ndarray:
    """Non-negative weights with sum of squares exactly renormalized to 1."""
    w = rng.random(d) + 1e-3
    return w / math.sqrt(float(np.sum(w * w)))
