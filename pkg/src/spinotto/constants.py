"""Frozen physical constants (SI).

CODATA 2018 values, kept in one table so every module and every emitted
manifest agrees on them. Do not import constants from scipy here: the point
is a pinned, version-tagged set.
"""

import math

CONSTANTS_VERSION = "CODATA-2018"

# Planck constant [J s], exact by SI definition.
H_PLANCK = 6.62607015e-34

# Reduced Planck constant [J s].
HBAR = H_PLANCK / (2.0 * math.pi)

# Speed of light in vacuum [m/s], exact.
C_LIGHT = 299792458.0

# Vacuum permittivity [F/m].
EPS0 = 8.8541878128e-12

# Boltzmann constant [J/K], exact.
K_BOLTZMANN = 1.380649e-23

# Electron mass [kg].
M_ELECTRON = 9.1093837015e-31

# Elementary charge [C], exact.
Q_ELEMENTARY = 1.602176634e-19
