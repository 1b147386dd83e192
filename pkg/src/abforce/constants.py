"""Physical constants (CODATA 2018) and unit conversions.

Everything inside the package is SI. The conversion helpers below are the
only place where lab-facing units (keV, pm, nm, um, mm, G cm^2, multiples
of pi) enter or leave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    elementary_charge: float  # C
    electron_mass: float  # kg
    planck: float  # J s
    vacuum_permeability: float  # T m / A

    @property
    def planck_reduced(self) -> float:
        return self.planck / (2.0 * math.pi)


CODATA_2018 = PhysicalConstants(
    elementary_charge=1.602176634e-19,
    electron_mass=9.1093837015e-31,
    planck=6.62607015e-34,
    vacuum_permeability=1.25663706212e-6,
)

E_CHARGE = CODATA_2018.elementary_charge
M_E = CODATA_2018.electron_mass
H = CODATA_2018.planck
HBAR = CODATA_2018.planck_reduced
MU_0 = CODATA_2018.vacuum_permeability

# 1 G cm^2 = 1e-4 T * 1e-4 m^2
WB_PER_GCM2 = 1e-8


def kev_to_joule(energy_kev: float) -> float:
    return energy_kev * 1e3 * E_CHARGE


def joule_to_kev(energy_j: float) -> float:
    return energy_j / (1e3 * E_CHARGE)


def ev_to_joule(energy_ev: float) -> float:
    return energy_ev * E_CHARGE


def joule_to_ev(energy_j: float) -> float:
    return energy_j / E_CHARGE


def flux_from_gauss_cm2(flux_gcm2: float) -> float:
    """Convert a magnetic flux in G cm^2 to Wb."""
    return flux_gcm2 * WB_PER_GCM2


def flux_to_gauss_cm2(flux_wb: float) -> float:
    return flux_wb / WB_PER_GCM2


def pm_to_m(x: float) -> float:
    return x * 1e-12


def m_to_pm(x: float) -> float:
    return x / 1e-12


def nm_to_m(x: float) -> float:
    return x * 1e-9


def m_to_nm(x: float) -> float:
    return x / 1e-9


def um_to_m(x: float) -> float:
    return x * 1e-6


def m_to_um(x: float) -> float:
    return x / 1e-6


def mm_to_m(x: float) -> float:
    return x * 1e-3


def m_to_mm(x: float) -> float:
    return x / 1e-3


def rad_to_pi(phase_rad: float) -> float:
    return phase_rad / math.pi


def pi_to_rad(phase_pi: float) -> float:
    return phase_pi * math.pi
