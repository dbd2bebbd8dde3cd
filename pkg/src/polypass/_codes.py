"""Integer codes and parameter layouts shared by the kernel backends.

Both ``_purepy`` (numpy) and ``_kernels`` (Cython) evaluate the same
elementwise catalog.  Parameters travel as a flat float64 array whose
layout depends on the kind code:

    POWER               [q]                 f(s) = |s|^(q-1) s
    LINEAR              [a]                 f(s) = a s
    LINEAR_MINUS_POWER  [a, alpha]          f(s) = a s - |s|^(alpha-1) s
    ITERATED_LOG        [alpha, nu, c, g]   f(s) = s * xi(|s|+c)^alpha, xi =
                                            nu-fold iterated log, zero below
                                            the guard g and C-infinity blended
                                            over [g, g+1]
    LOG_DAMPED          [beta, q]           f(s) = |s|^beta s / ln(|s|+2)^q
    OSCILLATING         [p, c]              f(s) = s^p (1 + sin(ln ln(s+c)))
                                            for s >= 0, zero for s < 0

The Cython translation unit keeps its own literal copies of these codes;
``tests/test_backends.py`` asserts they stay in sync.
"""

POWER = 0
LINEAR = 1
LINEAR_MINUS_POWER = 2
ITERATED_LOG = 3
LOG_DAMPED = 4
OSCILLATING = 5

ALL_KINDS = (POWER, LINEAR, LINEAR_MINUS_POWER, ITERATED_LOG, LOG_DAMPED,
             OSCILLATING)

# Kinds whose primitive F has a closed form the kernels can evaluate.
CLOSED_F = frozenset({POWER, LINEAR, LINEAR_MINUS_POWER})
