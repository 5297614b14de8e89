"""Unit conversions between CLI-facing units and the SI units used internally.

Internally everything is radians, meters and inverse meters.  The command
line accepts the units customary for tabletop interferometry (mrad, mm,
inverse micrometers, nm) and converts at the boundary.
"""

import math

# multiply a CLI-facing value by these to obtain SI
PER_UM_TO_PER_M = 1.0e6
MM_TO_M = 1.0e-3
MRAD_TO_RAD = 1.0e-3
NM_TO_M = 1.0e-9
UM_TO_M = 1.0e-6

# multiply an SI value by these to obtain the CLI-facing unit
PER_M_TO_PER_UM = 1.0 / PER_UM_TO_PER_M
M_TO_MM = 1.0 / MM_TO_M
RAD_TO_MRAD = 1.0 / MRAD_TO_RAD
RAD_TO_URAD = 1.0e6


def wavelength_nm_to_wavenumber(wavelength_nm):
    """Carrier wave number 2*pi/lambda in inverse meters."""
    if wavelength_nm <= 0:
        raise ValueError("wavelength must be positive")
    return 2.0 * math.pi / (wavelength_nm * NM_TO_M)
