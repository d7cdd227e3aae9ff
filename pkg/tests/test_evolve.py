import numpy as np
import pytest

from everett_tunnel.core import Grid, RectBarrier, WaveFunction
from everett_tunnel.evolve import (
    EvolveConfig,
    GaussianPacket,
    PacketOutOfDomainError,
    TimeSeries,
    _cn_sweep,
    init_packet,
    mean_energy,
    run,
    step_crank_nicolson,
)

import oracles
from conftest import make_series

GRID = Grid(-200.0, 200.0, 4096)
PACKET = GaussianPacket(x0=-50.0, sigma=10.0, k0=1.0)
BARRIER = RectBarrier(v0=1.0, length=1.0, x_start=0.0)
FREE = RectBarrier(v0=0.0, length=1.0, x_start=0.0)


def mean_position(psi: WaveFunction) -> float:
    x = psi.grid.points()
    return float(np.sum(x * psi.probability_density()) * psi.grid.dx)


def test_packet_validation():
    with pytest.raises(ValueError):
        GaussianPacket(x0=0.0, sigma=0.0, k0=1.0)


def test_init_packet_unit_norm_and_center():
    psi = init_packet(GRID, PACKET)
    assert abs(psi.norm() - 1.0) < 1e-12
    assert mean_position(psi) == pytest.approx(-50.0, abs=0.01)


def test_init_packet_free_energy():
    # <H> = hbar^2 k0^2 / 2m + hbar^2 / (8 m sigma^2) = 0.50125; the fine
    # grid keeps the O(dx^2) stencil bias well inside the 0.1% band
    grid = Grid(-200.0, 200.0, 8192)
    psi = init_packet(grid, PACKET)
    e = mean_energy(psi, FREE, 1.0)
    assert e == pytest.approx(0.50125, rel=1e-3)


def test_init_packet_out_of_domain():
    with pytest.raises(PacketOutOfDomainError):
        init_packet(GRID, GaussianPacket(x0=-199.0, sigma=10.0, k0=1.0))
    with pytest.raises(PacketOutOfDomainError):
        init_packet(GRID, GaussianPacket(x0=199.0, sigma=10.0, k0=1.0))


def test_config_validation():
    good = dict(grid=GRID, packet=PACKET, barrier=BARRIER, mass=1.0, dt=0.05,
                n_steps=100, record_every=10)
    EvolveConfig(**good)
    for bad in (
        dict(good, dt=0.0),
        dict(good, n_steps=0),
        dict(good, record_every=0),
        dict(good, record_every=101),
        dict(good, mass=0.0),
        dict(good, packet=GaussianPacket(x0=-49.0, sigma=10.0, k0=1.0)),
    ):
        with pytest.raises(ValueError):
            EvolveConfig(**bad)
    # canonical packet touches the 5-sigma mark exactly: allowed
    EvolveConfig(**dict(good, packet=GaussianPacket(x0=-50.0, sigma=10.0, k0=1.0)))


def test_step_free_drift():
    psi = init_packet(GRID, PACKET)
    dt = 0.05
    for _ in range(100):
        psi = step_crank_nicolson(psi, FREE, 1.0, dt)
    drift = mean_position(psi) - (-50.0)
    assert drift == pytest.approx(100 * dt * 1.0, rel=0.01)


def test_step_preserves_norm():
    psi = init_packet(GRID, PACKET)
    stepped = step_crank_nicolson(psi, BARRIER, 1.0, 0.05)
    assert abs(stepped.norm() - psi.norm()) <= 1e-12


def test_step_zero_stays_zero():
    psi = WaveFunction(GRID, np.zeros(4096, dtype=complex))
    stepped = step_crank_nicolson(psi, BARRIER, 1.0, 0.05)
    assert np.all(stepped.amp == 0)


def test_step_validation():
    psi = init_packet(GRID, PACKET)
    with pytest.raises(ValueError):
        step_crank_nicolson(psi, BARRIER, 1.0, 0.0)
    with pytest.raises(ValueError):
        step_crank_nicolson(psi, BARRIER, -1.0, 0.05)


def test_solver_breakdown_flag():
    # corrupt operator: zero pivots must be reported, not divided through
    n = 16
    amp = np.ones(n, dtype=np.complex128)
    zeros = np.zeros(n, dtype=np.complex128)
    cp = np.empty(n, dtype=np.complex128)
    dp = np.empty(n, dtype=np.complex128)
    status = _cn_sweep(amp, zeros, 0.0 + 0.0j, zeros + 1.0, 0.0 + 0.0j, 1, cp, dp)
    assert status == 1


def test_run_standard_scenario(standard_run):
    _, series = standard_run
    assert series.p_inside[-1] < 1e-4
    assert not series.edge_contamination
    assert np.max(np.abs(series.norm - 1.0)) <= 1e-8
    partition = series.w_reflected**2 + series.w_transmitted**2 + series.p_inside
    assert np.max(np.abs(partition - series.norm)) <= 1e-10


def test_run_standard_matches_momentum_oracle(standard_run):
    _, series = standard_run
    oracle = oracles.momentum_averaged_transmission(1.0, 10.0, 1.0, 1.0)
    p_t = series.w_transmitted[-1] ** 2
    assert p_t == pytest.approx(oracle, rel=0.10)


def test_run_monotone_late_weights(standard_run):
    _, series = standard_run
    above = np.flatnonzero(series.p_inside > 1e-4)
    assert above.size, "packet never met the barrier"
    after = np.flatnonzero(
        (series.p_inside < 1e-4) & (series.times > series.times[above[0]])
    )
    assert after.size, "scattering did not complete"
    tail = series.w_transmitted[after[0] :]
    assert np.max(tail) - np.min(tail) < 1e-3


def test_run_records_expected_rows(standard_run):
    _, series = standard_run
    # t = 0 plus one row every 10 steps of 3000
    assert series.n_rows == 301
    assert series.times[0] == 0.0
    assert series.times[-1] == pytest.approx(150.0, rel=1e-12)


def test_run_free_packet_crosses():
    cfg = EvolveConfig(grid=GRID, packet=PACKET, barrier=FREE, mass=1.0,
                       dt=0.05, n_steps=3000, record_every=100)
    _, series = run(cfg)
    assert series.w_transmitted[-1] ** 2 > 0.999


def test_run_opaque_barrier():
    cfg = EvolveConfig(grid=GRID, packet=PACKET,
                       barrier=RectBarrier(v0=500.0, length=1.0, x_start=0.0),
                       mass=1.0, dt=0.05, n_steps=3000, record_every=100)
    _, series = run(cfg)
    assert series.w_transmitted[-1] ** 2 < 1e-6


def test_run_final_row_at_unaligned_step():
    cfg = EvolveConfig(grid=Grid(-100.0, 100.0, 512), packet=GaussianPacket(-30.0, 5.0, 1.0),
                       barrier=BARRIER, mass=1.0, dt=0.05, n_steps=25, record_every=10)
    _, series = run(cfg)
    assert series.times[-1] == pytest.approx(25 * 0.05, rel=1e-12)
    assert series.n_rows == 4  # t = 0, 10, 20, 25 steps


def test_edge_contamination_flag():
    # packet sent at the wall of a short domain
    grid = Grid(-30.0, 30.0, 512)
    cfg = EvolveConfig(grid=grid, packet=GaussianPacket(x0=-12.0, sigma=2.0, k0=1.5),
                       barrier=RectBarrier(v0=0.1, length=1.0, x_start=0.0),
                       mass=1.0, dt=0.05, n_steps=1200, record_every=20)
    _, series = run(cfg)
    assert series.edge_contamination


def test_grid_refinement_consistency(standard_run):
    _, series = standard_run
    coarse = series.w_transmitted[-1] ** 2
    fine_cfg = EvolveConfig(grid=Grid(-200.0, 200.0, 8191), packet=PACKET,
                            barrier=BARRIER, mass=1.0, dt=0.025,
                            n_steps=6000, record_every=200)
    _, fine = run(fine_cfg)
    refined = fine.w_transmitted[-1] ** 2
    assert refined == pytest.approx(coarse, rel=0.01)


def test_timeseries_validation():
    with pytest.raises(ValueError):
        TimeSeries(
            times=np.array([0.0, 1.0]),
            w_reflected=np.array([0.0]),
            w_transmitted=np.array([0.0, 0.0]),
            p_inside=np.array([0.0, 0.0]),
            norm=np.array([0.0, 0.0]),
            e_reflected=np.array([0.0, 0.0]),
            e_transmitted=np.array([0.0, 0.0]),
        )
    with pytest.raises(ValueError):
        TimeSeries(
            times=np.array([0.0, 1.0]),
            w_reflected=np.array([0.5, 0.5]),
            w_transmitted=np.array([0.5, 0.5]),
            p_inside=np.array([0.0, 0.0]),
            norm=np.array([1.0, 1.0]),  # 0.25 + 0.25 != 1
            e_reflected=np.array([0.0, 0.0]),
            e_transmitted=np.array([0.0, 0.0]),
        )


def test_make_series_helper_valid():
    series = make_series([0.0, 1.0, 2.0], [0.1, 0.2, 0.3])
    assert series.n_rows == 3
