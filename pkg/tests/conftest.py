import numpy as np
import pytest

from everett_tunnel.config import standard_scenario
from everett_tunnel.evolve import TimeSeries, run


@pytest.fixture(scope="session")
def standard_settings():
    return standard_scenario()


@pytest.fixture(scope="session")
def standard_run(standard_settings):
    """One canonical-scenario run shared by the module tests."""
    final, series = run(standard_settings.evolve, standard_settings.units)
    return final, series


def make_series(times, w_transmitted, w_reflected=None, p_inside=None) -> TimeSeries:
    """Synthetic TimeSeries with the partition identity built to hold."""
    t = np.asarray(times, dtype=float)
    w_t = np.asarray(w_transmitted, dtype=float)
    w_r = np.zeros_like(w_t) if w_reflected is None else np.asarray(w_reflected, float)
    p_in = np.zeros_like(w_t) if p_inside is None else np.asarray(p_inside, float)
    norm = w_r**2 + w_t**2 + p_in
    zero = np.zeros_like(w_t)
    return TimeSeries(
        times=t,
        w_reflected=w_r,
        w_transmitted=w_t,
        p_inside=p_in,
        norm=norm,
        e_reflected=zero,
        e_transmitted=zero,
    )
