"""Unit conventions and conversion constants.

Internally everything runs in Hartree atomic units (hbar = m_e = a_B = 1)
for wavefunction work, and in eV (with hbar = c = 1, so time in 1/eV) for
field/dynamics work.  Molecule inputs mix eV, Bohr radii and electron
masses, so conversions live here and nowhere else.
"""

import math

# CODATA 2018
HARTREE_EV = 27.211386245988
# Planck constant in eV*s (exact, SI 2019)
PLANCK_EV_S = 4.135667696e-15
HBAR_EV_S = PLANCK_EV_S / (2.0 * math.pi)


def thz_to_ev(f_thz, convention="h"):
    """Convert a frequency quoted in THz to an energy in eV.

    convention="h" treats the number as an ordinary frequency (E = h*f);
    convention="hbar" treats it as an angular frequency in rad/s
    (E = hbar * omega).  Spectral widths quoted in THz/GHz are ambiguous
    between the two; the default is the ordinary-frequency reading.
    """
    if f_thz < 0:
        raise ValueError(f"frequency must be non-negative, got {f_thz}")
    if convention == "h":
        return PLANCK_EV_S * 1e12 * f_thz
    if convention == "hbar":
        return HBAR_EV_S * 1e12 * f_thz
    raise ValueError(f"unknown frequency convention {convention!r}")


def ghz_to_ev(f_ghz, convention="h"):
    return thz_to_ev(f_ghz * 1e-3, convention)
