"""Independent shooting-method oracle for -u'' = u^3 on (0, pi).

The boundary-value problem is solved by integrating the initial-value
problem u(0) = 0, u'(0) = sigma with a high-order integrator and
bisecting sigma until the first zero of u lands at pi.  Solutions with k
interior zeros follow from the scaling v(x) = (k+1) w((k+1) x) applied to
the odd-periodic extension of the positive solution w, which solves the
same equation.
"""

import functools

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def _rhs(t, y):
    return [y[1], -y[0] ** 3]


def first_zero(sigma, t_max=50.0):
    event = lambda t, y: y[0]
    event.terminal = True
    event.direction = -1.0
    sol = solve_ivp(_rhs, [0.0, t_max], [0.0, sigma], events=event,
                    rtol=1e-12, atol=1e-14, method="DOP853")
    hits = sol.t_events[0]
    return hits[0] if len(hits) else np.inf


@functools.lru_cache(maxsize=1)
def _positive_solution():
    sigma = brentq(lambda s: first_zero(s) - np.pi, 0.2, 20.0, xtol=1e-13)
    sol = solve_ivp(_rhs, [0.0, np.pi], [0.0, sigma], dense_output=True,
                    rtol=1e-12, atol=1e-14, method="DOP853")
    return sol


def cubic_positive(x):
    """The positive solution of -u'' = u^3, u(0) = u(pi) = 0."""
    return _positive_solution().sol(np.asarray(x, dtype=float))[0]


def cubic_nodal(x, zeros):
    """The solution with the given number of interior zeros (u'(0) > 0)."""
    k = zeros + 1
    y = np.mod(k * np.asarray(x, dtype=float), 2.0 * np.pi)
    up = cubic_positive(np.clip(y, 0.0, np.pi))
    dn = -cubic_positive(np.clip(2.0 * np.pi - y, 0.0, np.pi))
    return k * np.where(y <= np.pi, up, dn)
