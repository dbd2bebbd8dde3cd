"""Shared helpers for the test suite."""

import numpy as np

from polypass import SpectralField
from polypass.grid import _eigenvalues


def random_field(grid, rng, amplitude=1.0, decay=1.0):
    """Band-limited field with smoothly decaying random coefficients."""
    lap = np.asarray(_eigenvalues(grid, 1))
    coeffs = rng.standard_normal(grid.mode_shape) / lap**decay
    u = SpectralField(grid, coeffs)
    return (amplitude / _norm_m(u, 1)) * u


def _norm_m(u, m):
    from polypass import norm_m
    return norm_m(u, m)


def full_catalog(N=5, m=1):
    """One representative spec per catalog kind."""
    from polypass import (composite, iterated_log, linear, linear_minus_power,
                          log_damped_critical, oscillating, power)
    return [
        power(3.0),
        linear(1.5),
        linear_minus_power(2.0, 0.75),
        iterated_log(1.0, nu=2, c=10.0),
        log_damped_critical(1.0, N, m),
        oscillating(2.0),
        composite(power(3.0), linear(0.5)),
    ]
