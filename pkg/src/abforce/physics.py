"""The two physical objects every formula consumes: electron beam and solenoid.

Kinematics are nonrelativistic on purpose; the historical table values for the
de Broglie wavelength follow h / sqrt(2 m E) and not the relativistic form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from abforce.constants import E_CHARGE, H, HBAR, M_E, MU_0, kev_to_joule
from abforce.errors import DomainError


@dataclass(frozen=True)
class ElectronBeam:
    """Monoenergetic electron beam.

    ``kinetic_energy`` and ``energy_spread`` are in J. The speed ``v0`` (m/s),
    ``debroglie_wavelength`` (m) and ``wavevector`` (1/m) are derived on
    construction.
    """

    kinetic_energy: float
    energy_spread: float | None = None
    speed: float = field(init=False)
    debroglie_wavelength: float = field(init=False)
    wavevector: float = field(init=False)

    def __post_init__(self):
        if not (self.kinetic_energy > 0.0) or not math.isfinite(self.kinetic_energy):
            raise DomainError(f"kinetic energy must be positive, got {self.kinetic_energy!r} J")
        if self.energy_spread is not None and not (self.energy_spread > 0.0):
            raise DomainError(f"energy spread must be positive, got {self.energy_spread!r} J")
        v0 = math.sqrt(2.0 * self.kinetic_energy / M_E)
        p = M_E * v0
        object.__setattr__(self, "speed", v0)
        object.__setattr__(self, "debroglie_wavelength", H / p)
        object.__setattr__(self, "wavevector", p / HBAR)

    @property
    def v0(self) -> float:
        return self.speed

    @property
    def momentum(self) -> float:
        return M_E * self.speed


def beam_from_energy(energy: float, energy_spread: float | None = None) -> ElectronBeam:
    """Build a beam from its kinetic energy in J (and optional spread in J)."""
    return ElectronBeam(energy, energy_spread)


def beam_from_kev(energy_kev: float, energy_spread_ev: float | None = None) -> ElectronBeam:
    spread = None if energy_spread_ev is None else energy_spread_ev * E_CHARGE
    return ElectronBeam(kev_to_joule(energy_kev), spread)


def beam_from_speed(speed: float) -> ElectronBeam:
    if not (speed > 0.0):
        raise DomainError(f"speed must be positive, got {speed!r} m/s")
    return ElectronBeam(0.5 * M_E * speed * speed)


def beam_from_wavevector(k: float) -> ElectronBeam:
    if not (k > 0.0):
        raise DomainError(f"wavevector must be positive, got {k!r} 1/m")
    return beam_from_speed(HBAR * k / M_E)


@dataclass(frozen=True)
class Solenoid:
    """Long straight solenoid treated as a line flux.

    Attributes
    ----------
    radius:
        Winding radius [m].
    winding_density:
        Turns per unit length [1/m].
    current:
        Coil current [A].
    relative_permeability:
        Core enhancement; 1 for an air (or non-responding) core.
    """

    radius: float
    winding_density: float
    current: float
    relative_permeability: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise DomainError(f"solenoid radius must be positive, got {self.radius!r} m")
        if not (self.winding_density >= 0.0):
            raise DomainError(f"winding density must be >= 0, got {self.winding_density!r} 1/m")
        if not (self.current >= 0.0):
            raise DomainError(f"current must be >= 0, got {self.current!r} A")
        if not (self.relative_permeability >= 1.0):
            raise DomainError(
                f"relative permeability must be >= 1, got {self.relative_permeability!r}"
            )

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def field(self) -> float:
        return solenoid_field(self)

    @property
    def flux(self) -> float:
        return self.field * self.area


def solenoid_field(s: Solenoid) -> float:
    """Interior field B = mu_r * mu_0 * n * I in T."""
    return s.relative_permeability * (MU_0 * s.winding_density * s.current)
