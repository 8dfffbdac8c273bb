"""CODATA 2018 values in SI units."""
import math

PLANCK = 6.62607015e-34            # J s (exact)
HBAR = PLANCK / (2.0 * math.pi)    # J s
SPEED_OF_LIGHT = 299792458.0       # m / s (exact)
BOLTZMANN = 1.380649e-23           # J / K (exact)
ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)

BOLTZMANN_EV = BOLTZMANN / ELEMENTARY_CHARGE    # eV / K
HC_EV_NM = PLANCK * SPEED_OF_LIGHT / ELEMENTARY_CHARGE * 1e9  # eV nm
