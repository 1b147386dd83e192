"""Closed-form semi-classical kinematics of an electron passing a line flux.

The electron moves along x at fixed impact parameter ``y_e`` past a solenoid
whose axis is the z axis. The x-force below is the back-action force *on the
electron* (the force law is usually quoted as the force on the solenoid; it is
used here with the electron mass in Newton's second law, which is the picture
in which it produces a delay).

The charge enters as the magnitude ``e``. Displacements are signed: positive
means the electron runs ahead of a free electron. The upper side (``y_e > 0``)
is accelerated, the lower side decelerated.

Every expansion returns its orders separately together with the perturbation
strength ``epsilon = |flux| e / (2 pi m v0 |y_e|)``; the expansions assume
``epsilon << 1`` and attach a warning when ``epsilon >= 0.1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from abforce.constants import E_CHARGE, HBAR, M_E
from abforce.errors import SingularityError
from abforce.physics import ElectronBeam, Solenoid

EPSILON_WARN = 0.1


@dataclass(frozen=True)
class PassageGeometry:
    """Straight-line passage at signed impact parameter ``impact_parameter`` [m]."""

    impact_parameter: float

    def __post_init__(self):
        if self.impact_parameter == 0.0 or not math.isfinite(self.impact_parameter):
            raise SingularityError("impact parameter must be finite and nonzero")

    @property
    def side(self) -> str:
        return "upper" if self.impact_parameter > 0 else "lower"

    @property
    def sign(self) -> int:
        return 1 if self.impact_parameter > 0 else -1

    def check_outside(self, solenoid: Solenoid) -> tuple[str, ...]:
        """Warn (never fail) when the path cuts through the winding."""
        if abs(self.impact_parameter) <= solenoid.radius:
            return (
                f"|y_e| = {abs(self.impact_parameter):.3g} m does not clear the solenoid "
                f"radius {solenoid.radius:.3g} m; line-flux model used regardless",
            )
        return ()


@dataclass(frozen=True)
class Expansion:
    """First- and second-order terms of a perturbative displacement [m]."""

    first_order: float
    second_order: float
    epsilon: float
    warnings: tuple[str, ...] = ()

    @property
    def total(self) -> float:
        return self.first_order + self.second_order


@dataclass(frozen=True)
class PhaseDecomposition:
    """Semi-classical phase split into velocity-independent and dispersive parts [rad]."""

    dispersionless_term: float
    dispersive_term: float
    epsilon: float = 0.0
    warnings: tuple[str, ...] = ()

    @property
    def total(self) -> float:
        return self.dispersionless_term + self.dispersive_term


def _check_y(y_e: float) -> None:
    if y_e == 0.0:
        raise SingularityError("y_e = 0: the electron passes through the flux line")


def _validity(eps: float) -> tuple[str, ...]:
    if eps >= EPSILON_WARN:
        return (f"epsilon = {eps:.3g} >= {EPSILON_WARN}: perturbative expansion not reliable",)
    return ()


def perturbation_strength(flux: float, beam: ElectronBeam, y_e: float) -> float:
    _check_y(y_e)
    return abs(flux) * E_CHARGE / (2.0 * math.pi * M_E * beam.speed * abs(y_e))


def force_x(flux: float, v: float, x_e: float, y_e: float) -> float:
    """x-component of the back-action force [N] at speed ``v`` and position (x_e, y_e)."""
    r2 = x_e * x_e + y_e * y_e
    if r2 == 0.0:
        raise SingularityError("force law is singular at x_e = y_e = 0")
    return -(flux * E_CHARGE * v / (4.0 * math.pi)) * 4.0 * x_e * y_e / (r2 * r2)


def velocity_perturbation(flux: float, beam: ElectronBeam, x_e: float, y_e: float) -> float:
    """Signed speed change relative to v0 for an electron coming in from x = -inf."""
    _check_y(y_e)
    side = 1.0 if y_e > 0 else -1.0
    return side * flux * E_CHARGE / (2.0 * math.pi * M_E) * abs(y_e) / (x_e * x_e + y_e * y_e)


def velocity_profile(flux: float, beam: ElectronBeam, x_e: float, y_e: float) -> float:
    return beam.speed + velocity_perturbation(flux, beam, x_e, y_e)


def _half_shift(flux: float, beam: ElectronBeam) -> float:
    # flux e / (2 m v0): first-order one-sided displacement
    return flux * E_CHARGE / (2.0 * M_E * beam.speed)


def side_displacement(flux: float, beam: ElectronBeam, y_e: float) -> Expansion:
    """One-sided displacement to second order in the flux."""
    eps = perturbation_strength(flux, beam, y_e)
    side = 1.0 if y_e > 0 else -1.0
    a = _half_shift(flux, beam)
    first = side * a
    second = -side * a * a / (2.0 * math.pi * abs(y_e))
    return Expansion(first, second, eps, _validity(eps))


def relative_displacement(flux: float, beam: ElectronBeam, y_e: float) -> Expansion:
    """Displacement of the upper-side electron relative to the lower-side one."""
    eps = perturbation_strength(flux, beam, y_e)
    a = _half_shift(flux, beam)
    first = flux * E_CHARGE / (M_E * beam.speed)
    second = -a * a / (math.pi * abs(y_e))
    return Expansion(first, second, eps, _validity(eps))


def ab_phase(flux: float) -> float:
    return E_CHARGE * flux / HBAR


def semiclassical_phase(flux: float, beam: ElectronBeam, y_e: float) -> PhaseDecomposition:
    eps = perturbation_strength(flux, beam, y_e)
    q = 0.5 * flux * E_CHARGE
    dispersive = -(q * q) / (HBAR * math.pi * abs(y_e) * M_E * beam.speed)
    return PhaseDecomposition(ab_phase(flux), dispersive, eps, _validity(eps))


def envelope_shift(flux: float, beam: ElectronBeam, y_e: float) -> float:
    """Wave-packet envelope shift d(phase)/dk from the dispersive term [m]."""
    _check_y(y_e)
    q = 0.5 * flux * E_CHARGE
    hk = HBAR * beam.wavevector
    return q * q / (hk * hk * math.pi * abs(y_e))


def classical_delay(flux: float, beam: ElectronBeam) -> float:
    """Arrival-time difference implied by the first-order relative displacement [s]."""
    return flux * E_CHARGE / (M_E * beam.speed**2)


def semiclassical_delay(flux: float, beam: ElectronBeam, y_e: float) -> float:
    return envelope_shift(flux, beam, y_e) / beam.speed
