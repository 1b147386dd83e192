"""Numerical passage of an electron past a line flux.

The equation of motion dv/dt = F_x(v, x, y_e) / m is integrated with x as the
independent variable (the electron never turns around in the regime of
interest), using an explicit Dormand-Prince 5(4) pair with per-step error
control. The state is carried as deviations from free flight,

    tau(x) = t(x) - (x + W) / v0        u(x) = v(x) - v0,

so that displacements many orders of magnitude below the window half-width W
keep full relative precision. The displacement against free flight is
``-v0 * tau``; a positive value is an early arrival.

The line is truncated at x = +-W with W = window_factor * |y_e|. With tail
correction on, the run represents the full line: the electron enters with the
inbound asymptotic speed v0 (so v(-W) follows the closed-form velocity
profile), the closed-form contribution of both truncated tails is added to the
displacement, and the final speed is extrapolated to x = +inf. With it off,
v(-W) = v0 and nothing is added.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from abforce.constants import M_E
from abforce.errors import ConvergenceError, DomainError, SingularityError
from abforce.kinematics import (
    force_x,
    perturbation_strength,
    velocity_perturbation,
)
from abforce.physics import ElectronBeam

# Dormand & Prince (1980), 5th-order propagation with local extrapolation.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# 5th minus embedded 4th order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_R2_FLOOR_FRACTION = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    window_factor: float = 1e4
    relative_tolerance: float = 1e-10
    absolute_tolerance_position: float = 1e-21
    max_steps: int = 200_000
    tail_correction: bool = True

    def __post_init__(self):
        if not (self.window_factor >= 100):
            raise DomainError(f"window_factor must be >= 100, got {self.window_factor!r}")
        if not (self.relative_tolerance > 0 and self.absolute_tolerance_position > 0):
            raise DomainError("tolerances must be positive")
        if not (self.max_steps > 0):
            raise DomainError(f"max_steps must be positive, got {self.max_steps!r}")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class TrajectoryResult:
    """Outcome of one passage.

    ``samples`` holds ``(t, x, v)`` at every accepted step, in s, m, m/s.
    ``time_delay`` is ``-displacement_vs_free_flight / v0``: an electron that
    runs ahead arrives early and has a negative delay.
    """

    samples: tuple[tuple[float, float, float], ...]
    displacement_vs_free_flight: float
    time_delay: float
    final_speed: float
    tail_correction_applied: float
    local_error_estimate: float
    epsilon: float
    steps: int = 0
    rejected_steps: int = 0
    complete: bool = True
    warnings: tuple[str, ...] = field(default=())


def _tail_displacement(flux: float, beam: ElectronBeam, y_e: float, window: float) -> float:
    # integral over |x| > W of dv/(v0 + dv), dv the closed-form velocity profile
    y = abs(y_e)
    sigma = velocity_perturbation(flux, beam, 0.0, y_e) / beam.speed
    if sigma <= -1.0:
        raise ConvergenceError("closed-form tail undefined: electron would be reflected")
    b = y * math.sqrt(1.0 + sigma)
    return 2.0 * sigma * y * y / b * math.atan(b / window)


def integrate_passage(
    flux: float,
    beam: ElectronBeam,
    y_e: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    keep_samples: bool = True,
) -> TrajectoryResult:
    if y_e == 0.0:
        raise SingularityError("y_e = 0: the electron passes through the flux line")
    v0 = beam.speed
    y = float(y_e)
    ay = abs(y)
    window = cfg.window_factor * ay
    eps = perturbation_strength(flux, beam, y)
    r2_floor = _R2_FLOOR_FRACTION * ay * ay

    def rhs(x: float, u: float) -> tuple[float, float]:
        if x * x + y * y < r2_floor:
            raise SingularityError("trajectory approached the flux line")
        v = v0 + u
        return -u / (v0 * v), force_x(flux, v, x, y) / (M_E * v)

    rtol = cfg.relative_tolerance
    atol_pos = cfg.absolute_tolerance_position
    disp_scale = eps * ay
    atol_u = cfg.absolute_tolerance_position * v0 / ay

    x = -window
    tau = 0.0
    u = velocity_perturbation(flux, beam, x, y) if cfg.tail_correction else 0.0
    samples = [(0.0, x, v0 + u)] if keep_samples else []
    h = min(1e-2 * ay, 2.0 * window)
    steps = 0
    rejected = 0
    local_err = 0.0
    k1 = rhs(x, u)

    def partial(msg: str) -> ConvergenceError:
        res = TrajectoryResult(
            samples=tuple(samples),
            displacement_vs_free_flight=-v0 * tau,
            time_delay=tau,
            final_speed=v0 + u,
            tail_correction_applied=0.0,
            local_error_estimate=local_err,
            epsilon=eps,
            steps=steps,
            rejected_steps=rejected,
            complete=False,
        )
        return ConvergenceError(msg, partial=res)

    while x < window:
        if steps + rejected >= cfg.max_steps:
            raise partial(f"max_steps = {cfg.max_steps} exceeded at x = {x:.6g} m")
        last = x + h >= window
        if last:
            h = window - x
        if h <= 1e-15 * max(abs(x), ay):
            raise partial(f"step size underflow at x = {x:.6g} m")

        # the right-hand side does not depend on tau
        ks = [k1]
        for i in range(1, 6):
            du = sum(a * k[1] for a, k in zip(_A[i], ks))
            ks.append(rhs(x + _C[i] * h, u + h * du))
        tau_new = tau + h * sum(b * k[0] for b, k in zip(_B, ks))
        u_new = u + h * sum(b * k[1] for b, k in zip(_B, ks))
        ks.append(rhs(x + h, u_new))
        err_tau = h * sum(e * k[0] for e, k in zip(_E, ks))
        err_u = h * sum(e * k[1] for e, k in zip(_E, ks))
        # a speed error persists to the exit, so it is charged as the position
        # error it causes over the remaining path
        x_new = window if last else x + h
        pos_err = v0 * abs(err_tau) + abs(err_u) * (window - x_new) / v0
        sc_pos = atol_pos + rtol * max(v0 * abs(tau), v0 * abs(tau_new), disp_scale)
        sc_u = atol_u + rtol * max(abs(u), abs(u_new))
        err = max(pos_err / sc_pos, abs(err_u) / sc_u)

        if err <= 1.0:
            x = x_new
            tau, u = tau_new, u_new
            k1 = ks[6]
            steps += 1
            local_err += pos_err
            if keep_samples:
                samples.append(((x + window) / v0 + tau, x, v0 + u))
            if v0 + u < 0.5 * v0:
                raise partial(
                    f"speed fell below v0/2 at x = {x:.6g} m (epsilon = {eps:.3g}); "
                    "perturbative passage regime left"
                )
            factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err**-0.2)
        else:
            rejected += 1
            factor = max(_MIN_FACTOR, _SAFETY * err**-0.2)
        h *= factor

    displacement = -v0 * tau
    final_speed = v0 + u
    tail = 0.0
    if cfg.tail_correction:
        tail = _tail_displacement(flux, beam, y, window)
        displacement += tail
        final_speed -= velocity_perturbation(flux, beam, window, y)

    warnings = ()
    if eps >= 0.1:
        warnings = (f"epsilon = {eps:.3g}: far outside the perturbative regime",)
    return TrajectoryResult(
        samples=tuple(samples),
        displacement_vs_free_flight=displacement,
        time_delay=-displacement / v0,
        final_speed=final_speed,
        tail_correction_applied=tail,
        local_error_estimate=local_err,
        epsilon=eps,
        steps=steps,
        rejected_steps=rejected,
        warnings=warnings,
    )


def numeric_relative_displacement(
    flux: float, beam: ElectronBeam, y_e: float, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> float:
    """Upper-side minus lower-side displacement at impact parameter |y_e|."""
    ay = abs(y_e)
    up = integrate_passage(flux, beam, ay, cfg, keep_samples=False)
    lo = integrate_passage(flux, beam, -ay, cfg, keep_samples=False)
    return up.displacement_vs_free_flight - lo.displacement_vs_free_flight


def extract_second_order(
    flux: float, beam: ElectronBeam, y_e: float, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> float:
    """Quadratic-in-flux part of the one-sided displacement, evaluated at ``flux``.

    The even part E(f) = (D(f) + D(-f)) / 2 of the displacement D removes all
    odd orders; Richardson elimination between f and f/2 then removes the
    quartic term: f**2 * c2 = (16 E(f/2) - E(f)) / 3 + O(f**6).
    """
    if flux == 0.0:
        return 0.0

    def d(f: float) -> float:
        return integrate_passage(f, beam, y_e, cfg, keep_samples=False).displacement_vs_free_flight

    even_full = 0.5 * (d(flux) + d(-flux))
    even_half = 0.5 * (d(0.5 * flux) + d(-0.5 * flux))
    return (16.0 * even_half - even_full) / 3.0


@dataclass(frozen=True)
class ConvergenceRow:
    relative_tolerance: float
    window_factor: float
    displacement: float | None
    local_error_estimate: float | None
    steps: int | None
    error: str | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    tolerance_ladder: tuple[ConvergenceRow, ...]
    window_ladder: tuple[ConvergenceRow, ...]
    extrapolated: float | None
    uncertainty: float | None


def convergence_report(
    flux: float,
    beam: ElectronBeam,
    y_e: float,
    tolerances: tuple[float, ...] = (1e-8, 1e-9, 1e-10, 1e-11),
    window_factors: tuple[float, ...] = (2.5e3, 5e3, 1e4, 2e4),
    base: IntegratorConfig = DEFAULT_CONFIG,
) -> ConvergenceReport:
    """Displacement on a ladder of tolerances and windows.

    The extrapolated value is the run at the tightest tolerance and the
    default window; the uncertainty is the larger of the last change along
    either ladder and that run's accumulated local error estimate.
    """

    def run(cfg: IntegratorConfig) -> ConvergenceRow:
        try:
            r = integrate_passage(flux, beam, y_e, cfg, keep_samples=False)
        except ConvergenceError as exc:
            return ConvergenceRow(cfg.relative_tolerance, cfg.window_factor, None, None, None, str(exc))
        return ConvergenceRow(
            cfg.relative_tolerance,
            cfg.window_factor,
            r.displacement_vs_free_flight,
            r.local_error_estimate,
            r.steps,
        )

    tol_rows = tuple(run(replace(base, relative_tolerance=t)) for t in tolerances)
    win_rows = tuple(run(replace(base, window_factor=w)) for w in window_factors)

    ok_tol = [r for r in tol_rows if r.displacement is not None]
    ok_win = [r for r in win_rows if r.displacement is not None]
    if not ok_tol:
        return ConvergenceReport(tol_rows, win_rows, None, None)
    best = ok_tol[-1]
    spread = [best.local_error_estimate]
    if len(ok_tol) > 1:
        spread.append(abs(ok_tol[-1].displacement - ok_tol[-2].displacement))
    if len(ok_win) > 1:
        spread.append(abs(ok_win[-1].displacement - ok_win[-2].displacement))
    return ConvergenceReport(tol_rows, win_rows, best.displacement, max(spread))


def write_samples_csv(result: TrajectoryResult, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "x_m", "v_m_per_s"])
        for t, x, v in result.samples:
            w.writerow([repr(t), repr(x), repr(v)])
