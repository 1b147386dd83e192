"""Delay-versus-current sweeps (time-of-flight theory curves)."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from abforce.errors import ConvergenceError, DomainError
from abforce.kinematics import classical_delay, semiclassical_delay
from abforce.physics import ElectronBeam, Solenoid, beam_from_energy
from abforce.trajectory import DEFAULT_CONFIG, IntegratorConfig, numeric_relative_displacement

MODES = {"with_core": 150.0, "without_core": 1.0}
OUTPUTS = ("classical_delay", "semiclassical_delay", "numeric_delay")


@dataclass(frozen=True)
class SweepSpec:
    current_min: float  # A
    current_max: float  # A
    steps: int
    electron_energy: float  # J
    radius: float  # m
    winding_density: float  # 1/m
    impact_parameter: float  # m
    mu_r_modes: tuple[str, ...] = ("with_core", "without_core")
    outputs: tuple[str, ...] = OUTPUTS
    integrator: IntegratorConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self):
        if not (self.current_min >= 0):
            raise DomainError("current_min must be >= 0")
        if not (self.current_max > self.current_min):
            raise DomainError("current_max must exceed current_min")
        if self.steps < 2:
            raise DomainError("steps must be >= 2")
        if self.impact_parameter == 0:
            raise DomainError("impact parameter must be nonzero")
        for m in self.mu_r_modes:
            if m not in MODES:
                raise DomainError(f"unknown mode {m!r}; valid: {', '.join(MODES)}")
        for o in self.outputs:
            if o not in OUTPUTS:
                raise DomainError(f"unknown output {o!r}; valid: {', '.join(OUTPUTS)}")

    def currents(self) -> list[float]:
        n = self.steps - 1
        span = self.current_max - self.current_min
        return [self.current_min + span * i / n for i in range(self.steps)]

    def columns(self) -> list[str]:
        cols = ["current_A"]
        for m in self.mu_r_modes:
            cols += [f"{m}_B_T", f"{m}_flux_Wb"]
            if "classical_delay" in self.outputs:
                cols.append(f"{m}_dt_classical_s")
            if "semiclassical_delay" in self.outputs:
                cols.append(f"{m}_dt_semiclassical_s")
            if "numeric_delay" in self.outputs:
                cols.append(f"{m}_dt_numeric_s")
        return cols


def _row(spec: SweepSpec, current: float) -> tuple[list[float | None], list[str]]:
    beam: ElectronBeam = beam_from_energy(spec.electron_energy)
    row: list[float | None] = [current]
    warnings = []
    for mode in spec.mu_r_modes:
        sol = Solenoid(spec.radius, spec.winding_density, current, MODES[mode])
        flux = sol.flux
        row += [sol.field, flux]
        if "classical_delay" in spec.outputs:
            row.append(classical_delay(flux, beam))
        if "semiclassical_delay" in spec.outputs:
            row.append(semiclassical_delay(flux, beam, spec.impact_parameter))
        if "numeric_delay" in spec.outputs:
            try:
                dx = numeric_relative_displacement(flux, beam, spec.impact_parameter, spec.integrator)
                row.append(dx / beam.speed)
            except ConvergenceError as exc:
                row.append(None)
                warnings.append(f"I = {current!r} A, {mode}: numeric delay unavailable ({exc})")
    for i, val in enumerate(row):
        if val is not None and not math.isfinite(val):
            row[i] = None
            warnings.append(f"I = {current!r} A: non-finite value in column {i} dropped")
    return row, warnings


def _row_star(args):
    return _row(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> tuple[list[str], list[list[float | None]], list[str]]:
    """Evaluate every current; returns (columns, rows, warnings) in current order.

    ``dt_numeric`` is the numerically integrated relative (two-sided)
    displacement divided by v0, to be compared with dt_classical - dt_semiclassical.
    Rows whose integration fails carry ``None`` there and a warning.
    """
    tasks = [(spec, i) for i in spec.currents()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_row_star, tasks))
    else:
        results = [_row(*t) for t in tasks]
    rows = [r for r, _ in results]
    warnings = [w for _, ws in results for w in ws]
    return spec.columns(), rows, warnings
