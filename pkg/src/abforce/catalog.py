"""Historical and proposed AB interference experiments, plus feasibility logic.

Records keep the published table values verbatim, in the table's own units, so
that export/import through JSON is bit-exact; SI views are derived properties.
Recomputation from first principles lives in :func:`verify_record` and never
overwrites the stored values.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from abforce.constants import (
    H,
    flux_from_gauss_cm2,
    kev_to_joule,
    m_to_nm,
    m_to_pm,
    nm_to_m,
    pi_to_rad,
    pm_to_m,
    rad_to_pi,
    um_to_m,
)
from abforce.errors import DomainError
from abforce.kinematics import ab_phase, classical_delay, semiclassical_delay
from abforce.physics import ElectronBeam, beam_from_energy

# Columns recomputed by verify_record whose deviation must stay inside the
# table's own two-significant-figure rounding.
ROUNDING_BOUND = 0.05


@dataclass(frozen=True)
class ExperimentRecord:
    name: str
    energy_keV: float
    lambda_pm: float
    Lcoh_nm: float
    phase_pi: float
    shift_nm: float
    flux_Gcm2: float
    y_e_um: float | None = None
    provenance: str = "user"

    def __post_init__(self):
        for key in ("energy_keV", "lambda_pm", "Lcoh_nm"):
            val = getattr(self, key)
            if not (val > 0 and math.isfinite(val)):
                raise DomainError(f"{self.name}: {key} must be positive, got {val!r}")
        for key in ("phase_pi", "shift_nm", "flux_Gcm2"):
            val = getattr(self, key)
            if not (val >= 0 and math.isfinite(val)):
                raise DomainError(f"{self.name}: {key} must be >= 0, got {val!r}")
        if self.y_e_um is not None and not (self.y_e_um > 0):
            raise DomainError(f"{self.name}: y_e_um must be positive, got {self.y_e_um!r}")
        if self.provenance not in ("catalog", "user"):
            raise DomainError(f"unknown provenance {self.provenance!r}")

    @property
    def electron_energy(self) -> float:
        return kev_to_joule(self.energy_keV)

    @property
    def debroglie_wavelength(self) -> float:
        return pm_to_m(self.lambda_pm)

    @property
    def coherence_length(self) -> float:
        return nm_to_m(self.Lcoh_nm)

    @property
    def phase_shift(self) -> float:
        return pi_to_rad(self.phase_pi)

    @property
    def relative_shift(self) -> float:
        return nm_to_m(self.shift_nm)

    @property
    def magnetic_flux(self) -> float:
        return flux_from_gauss_cm2(self.flux_Gcm2)

    @property
    def impact_parameter(self) -> float | None:
        return None if self.y_e_um is None else um_to_m(self.y_e_um)

    def beam(self) -> ElectronBeam:
        return beam_from_energy(self.electron_energy)


_TABLE1 = (
    ExperimentRecord("Chambers", 20, 8.7, 1200, 800, 3.5, 1.7e-4, provenance="catalog"),
    ExperimentRecord("Mollenstedt", 40, 6.1, 1632, 2, 0.0061, 4.1e-7, provenance="catalog"),
    ExperimentRecord("Bayh", 40, 6.1, 1632, 2, 0.0061, 4.1e-7, provenance="catalog"),
    ExperimentRecord("Schaal", 50, 5.5, 1825, 40, 0.11, 4.1e-7, provenance="catalog"),
    ExperimentRecord("Tonomura", 150, 3.2, 3200, 5.5, 0.0088, 2.4e-6, provenance="catalog"),
    # 50 um: half of the 100 um arm separation around a centred solenoid
    ExperimentRecord("Proposed", 1, 39, 77, 48000, 940, 9.9e-3, 50.0, provenance="catalog"),
)


def builtin_table1() -> list[ExperimentRecord]:
    return list(_TABLE1)


def find_record(name: str) -> ExperimentRecord:
    for rec in _TABLE1:
        if rec.name.lower() == name.lower():
            return rec
    valid = ", ".join(r.name.lower() for r in _TABLE1)
    raise KeyError(f"unknown record {name!r}; valid names: {valid}")


def coherence_length(energy: float, energy_spread: float) -> float:
    """L_coh = (h / dE) sqrt(2 E / m) = h v0 / dE, energies in J."""
    if not (energy_spread > 0):
        raise DomainError(f"energy spread must be positive, got {energy_spread!r} J")
    return H * beam_from_energy(energy).speed / energy_spread


def derived_energy_spread(rec: ExperimentRecord) -> float:
    """Energy spread [J] that reproduces the record's coherence length."""
    return H * rec.beam().speed / rec.coherence_length


@dataclass(frozen=True)
class Discrepancy:
    column: str
    stored: float
    computed: float

    @property
    def relative_deviation(self) -> float:
        if self.stored == 0.0:
            return 0.0 if self.computed == 0.0 else math.inf
        return (self.computed - self.stored) / self.stored

    @property
    def consistent(self) -> bool:
        return abs(self.relative_deviation) < ROUNDING_BOUND


@dataclass(frozen=True)
class VerificationReport:
    name: str
    wavelength: Discrepancy
    phase: Discrepancy
    shift: Discrepancy

    @property
    def columns(self) -> tuple[Discrepancy, ...]:
        return (self.wavelength, self.phase, self.shift)

    @property
    def inconsistent_columns(self) -> tuple[str, ...]:
        return tuple(d.column for d in self.columns if not d.consistent)


def verify_record(rec: ExperimentRecord) -> VerificationReport:
    """Recompute wavelength, AB phase and first-order shift; compare to the stored columns.

    Values are compared in the table's units (pm, multiples of pi, nm).
    """
    beam = rec.beam()
    flux = rec.magnetic_flux
    lam = m_to_pm(beam.debroglie_wavelength)
    phase = rad_to_pi(ab_phase(flux))
    # first-order relative shift flux e / (m v0) equals v0 times the classical delay
    shift = m_to_nm(beam.speed * classical_delay(flux, beam))
    return VerificationReport(
        rec.name,
        Discrepancy("lambda_pm", rec.lambda_pm, lam),
        Discrepancy("phase_pi", rec.phase_pi, phase),
        Discrepancy("shift_nm", rec.shift_nm, shift),
    )


@dataclass(frozen=True)
class RegimeReport:
    """Feasibility of the dispersionless (fringe) test for one configuration.

    All lengths in m, phase in rad. The flags are derived from the stored
    lengths on every access.
    """

    name: str
    v_dt_classical: float
    v_dt_semiclassical: float | None
    coherence_length: float
    ab_phase: float
    debroglie_wavelength: float
    impact_parameter: float | None = None

    @property
    def fringe_threshold(self) -> float:
        return 2.0 * math.pi * self.coherence_length / self.debroglie_wavelength

    @property
    def fringe_test_feasible(self) -> bool:
        return self.ab_phase > self.fringe_threshold

    @property
    def classical_force_testable(self) -> bool:
        return self.v_dt_classical > self.coherence_length

    @property
    def dispersionless_force_testable(self) -> bool | None:
        if self.v_dt_semiclassical is None:
            return None
        return self.v_dt_semiclassical > self.coherence_length

    @property
    def semiclassical_available(self) -> bool:
        return self.v_dt_semiclassical is not None

    @property
    def outcome_note(self) -> str:
        notes = []
        if not self.fringe_test_feasible:
            notes.append(
                "fringe test not feasible: the AB phase does not exceed 2*pi*L_coh/lambda, "
                "so outcomes A and B cannot be told apart"
            )
        else:
            notes.append("fringe test feasible: fringes outside the coherence length separate A from B")
        if not self.classical_force_testable:
            notes.append("v*dt_clas < L_coh: classical forces not tested")
        dl = self.dispersionless_force_testable
        if dl is None:
            notes.append("semi-classical branch unavailable: no impact parameter given")
        elif self.classical_force_testable and not dl:
            notes.append(
                "outcome C regime: persisting fringes would exclude a classical force "
                "while a dispersionless semi-classical force stays possible"
            )
        elif self.classical_force_testable and dl:
            notes.append("v*dt_semi > L_coh: fringes would rule out classical and dispersionless forces")
        elif dl:
            notes.append("v*dt_semi > L_coh while v*dt_clas < L_coh")
        return "; ".join(notes)


def classify_regime(rec: ExperimentRecord, y_e: float | None = None) -> RegimeReport:
    """Compare classical and semi-classical delays (times v0) with the coherence length.

    ``y_e`` [m] defaults to the record's impact parameter; without one the
    semi-classical fields stay ``None``.
    """
    if y_e is None:
        y_e = rec.impact_parameter
    beam = rec.beam()
    flux = rec.magnetic_flux
    v = beam.speed
    semi = None if y_e is None else v * semiclassical_delay(flux, beam, y_e)
    return RegimeReport(
        name=rec.name,
        v_dt_classical=v * classical_delay(flux, beam),
        v_dt_semiclassical=semi,
        coherence_length=rec.coherence_length,
        ab_phase=ab_phase(flux),
        debroglie_wavelength=beam.debroglie_wavelength,
        impact_parameter=y_e,
    )


JSON_KEYS = ("name", "energy_keV", "lambda_pm", "Lcoh_nm", "phase_pi", "shift_nm", "flux_Gcm2")


def record_to_json(rec: ExperimentRecord) -> dict:
    d = asdict(rec)
    if d["y_e_um"] is None:
        del d["y_e_um"]
    return d


def record_from_json(d: dict) -> ExperimentRecord:
    missing = [k for k in JSON_KEYS if k not in d]
    if missing:
        raise DomainError(f"catalog entry missing keys: {', '.join(missing)}")
    return ExperimentRecord(
        name=d["name"],
        energy_keV=d["energy_keV"],
        lambda_pm=d["lambda_pm"],
        Lcoh_nm=d["Lcoh_nm"],
        phase_pi=d["phase_pi"],
        shift_nm=d["shift_nm"],
        flux_Gcm2=d["flux_Gcm2"],
        y_e_um=d.get("y_e_um"),
        provenance=d.get("provenance", "user"),
    )


def dumps_catalog(records: list[ExperimentRecord]) -> str:
    return json.dumps([record_to_json(r) for r in records], indent=2)


def loads_catalog(text: str) -> list[ExperimentRecord]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise DomainError("catalog JSON must be an array of records")
    return [record_from_json(d) for d in data]


def load_catalog(path: str | Path) -> list[ExperimentRecord]:
    return loads_catalog(Path(path).read_text())
