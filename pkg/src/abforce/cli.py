"""Command-line front end.

Commands: ``analytic``, ``trajectory``, ``table1``, ``regimes``, ``sweep``.
Every command also takes ``--out``, ``--format csv|json``, ``--no-timestamp``
and ``--config``. A config file is a JSON object with the same keys as the
``parameters.lab_units`` block of a report (a whole report is accepted as
well), so any run can be replayed exactly. Flags win over the config file,
which wins over built-in defaults.

Exit status: 0 success, 2 usage error, 3 domain error, 4 convergence error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from abforce import catalog as cat
from abforce import kinematics as kin
from abforce.constants import (
    E_CHARGE,
    flux_from_gauss_cm2,
    flux_to_gauss_cm2,
    kev_to_joule,
    m_to_nm,
    m_to_pm,
    mm_to_m,
    rad_to_pi,
    um_to_m,
)
from abforce.errors import ConvergenceError, DomainError
from abforce.physics import Solenoid, beam_from_energy
from abforce.report import envelope, to_csv, to_json
from abforce.sweep import MODES, OUTPUTS, SweepSpec, run_sweep
from abforce.trajectory import IntegratorConfig, integrate_passage

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

DEFAULTS = {
    "solenoid_r_mm": 1.25,
    "n_per_mm": 3.0,
    "mu_r_dimensionless": 1.0,
    "window_factor_dimensionless": 1e4,
    "rtol_dimensionless": 1e-10,
    "max_steps_count": 200_000,
    "tail_correction": True,
    "current_min_A": 0.0,
    "steps_count": 11,
    "modes": ",".join(MODES),
    "outputs": ",".join(OUTPUTS),
    "jobs_count": 1,
}

DEFAULT_FORMAT = {
    "analytic": "json",
    "regimes": "json",
    "table1": "csv",
    "sweep": "csv",
    "trajectory": "csv",
}

TABLE1_HEADER = [
    "name",
    "energy_keV",
    "lambda_pm",
    "Lcoh_nm",
    "phase_pi",
    "shift_nm",
    "flux_Gcm2",
    "y_e_um",
    "lambda_pm_computed",
    "phase_pi_computed",
    "shift_nm_computed",
    "lambda_rel_deviation",
    "phase_rel_deviation",
    "shift_rel_deviation",
    "energy_spread_eV_derived",
    "flagged_columns",
]


class UsageError(Exception):
    pass


# -- argument parsing ---------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--format", choices=("csv", "json"), default=None)
    g.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp")
    g.add_argument("--config", help="JSON config file (flags take precedence)")
    return p


def _flux_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("flux (give --flux-gcm2 or a solenoid current)")
    g.add_argument("--flux-gcm2", dest="flux_gcm2", type=float, help="enclosed flux [G cm^2]")
    g.add_argument("--current", dest="current_A", type=float, help="solenoid current [A]")
    g.add_argument("--solenoid-r-mm", dest="solenoid_r_mm", type=float, help="solenoid radius [mm] (1.25)")
    g.add_argument("--n-per-mm", dest="n_per_mm", type=float, help="winding density [1/mm] (3)")
    g.add_argument("--mu-r", dest="mu_r_dimensionless", type=float, help="relative permeability (1)")


def _beam_args(p: argparse.ArgumentParser, spread: bool = True) -> None:
    p.add_argument("--energy-kev", dest="energy_kev", type=float, help="electron energy [keV]")
    if spread:
        p.add_argument("--energy-spread-ev", dest="energy_spread_ev", type=float, help="energy spread [eV]")
    p.add_argument("--ye-um", dest="ye_um", type=float, help="impact parameter [um], signed")


def _integrator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-factor", dest="window_factor_dimensionless", type=float)
    p.add_argument("--rtol", dest="rtol_dimensionless", type=float)
    p.add_argument("--max-steps", dest="max_steps_count", type=int)
    p.add_argument(
        "--no-tail", dest="tail_correction", action="store_const", const=False, default=None,
        help="disable the analytic tail correction",
    )


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="abforce", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", parents=[common], help="evaluate every closed-form quantity")
    _flux_args(p)
    _beam_args(p)

    p = sub.add_parser("trajectory", parents=[common], help="integrate one passage, dump samples")
    _flux_args(p)
    _beam_args(p, spread=False)
    _integrator_args(p)

    p = sub.add_parser("table1", parents=[common], help="experiment catalog with recomputed columns")
    p.add_argument("--catalog", dest="catalog", help="import records from a catalog JSON file")

    p = sub.add_parser("regimes", parents=[common], help="fringe-test feasibility and outcome regime")
    p.add_argument("--record", dest="record", help="catalog record name, or 'all'")
    _flux_args(p)
    _beam_args(p)
    p.add_argument("--lcoh-nm", dest="lcoh_nm", type=float, help="coherence length [nm]")

    p = sub.add_parser("sweep", parents=[common], help="delay versus solenoid current")
    p.add_argument("--current-min", dest="current_min_A", type=float)
    p.add_argument("--current-max", dest="current_max_A", type=float)
    p.add_argument("--steps", dest="steps_count", type=int)
    p.add_argument("--energy-kev", dest="energy_kev", type=float)
    p.add_argument("--ye-um", dest="ye_um", type=float)
    p.add_argument("--solenoid-r-mm", dest="solenoid_r_mm", type=float)
    p.add_argument("--n-per-mm", dest="n_per_mm", type=float)
    p.add_argument("--modes", dest="modes", help=f"comma list from {','.join(MODES)}")
    p.add_argument("--outputs", dest="outputs", help=f"comma list from {','.join(OUTPUTS)}")
    p.add_argument("--jobs", dest="jobs_count", type=int, help="worker processes for the rows")
    _integrator_args(p)
    return ap


PARAM_KEYS = {
    "analytic": ("flux_gcm2", "current_A", "solenoid_r_mm", "n_per_mm", "mu_r_dimensionless",
                 "energy_kev", "energy_spread_ev", "ye_um"),
    "trajectory": ("flux_gcm2", "current_A", "solenoid_r_mm", "n_per_mm", "mu_r_dimensionless",
                   "energy_kev", "ye_um", "window_factor_dimensionless", "rtol_dimensionless",
                   "max_steps_count", "tail_correction"),
    "table1": ("catalog",),
    "regimes": ("record", "flux_gcm2", "current_A", "solenoid_r_mm", "n_per_mm",
                "mu_r_dimensionless", "energy_kev", "energy_spread_ev", "ye_um", "lcoh_nm"),
    "sweep": ("current_min_A", "current_max_A", "steps_count", "energy_kev", "ye_um",
              "solenoid_r_mm", "n_per_mm", "modes", "outputs", "jobs_count",
              "window_factor_dimensionless", "rtol_dimensionless", "max_steps_count",
              "tail_correction"),
}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if "parameters" in data:
        data = data["parameters"]
    if "lab_units" in data:
        data = data["lab_units"]
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults into one parameter dict."""
    cfg = _load_config(args.config)
    params = {}
    for key in PARAM_KEYS[args.command]:
        val = getattr(args, key, None)
        if val is None:
            val = cfg.get(key, DEFAULTS.get(key))
        if val is not None:
            params[key] = val
    if "flux_gcm2" in params and "current_A" not in params:
        for key in ("solenoid_r_mm", "n_per_mm", "mu_r_dimensionless"):
            params.pop(key, None)
    return params


def _require(params: dict, key: str, flag: str) -> float:
    if key not in params:
        raise UsageError(f"missing required parameter {key} ({flag})")
    return params[key]


# -- shared parameter handling ---------------------------------------------


def _flux(params: dict) -> tuple[float, Solenoid | None]:
    if "flux_gcm2" in params:
        return flux_from_gauss_cm2(params["flux_gcm2"]), None
    if "current_A" in params:
        sol = Solenoid(
            mm_to_m(params["solenoid_r_mm"]),
            params["n_per_mm"] * 1e3,
            params["current_A"],
            params["mu_r_dimensionless"],
        )
        return sol.flux, sol
    raise UsageError("missing required parameter flux_gcm2 (--flux-gcm2) or current_A (--current)")


def _si_echo(params: dict, flux: float | None = None, sol: Solenoid | None = None) -> dict:
    si = {}
    if flux is not None:
        si["flux_Wb"] = flux
    if sol is not None:
        si.update(radius_m=sol.radius, winding_density_per_m=sol.winding_density,
                  current_A=sol.current, field_T=sol.field)
    if "energy_kev" in params:
        si["energy_J"] = kev_to_joule(params["energy_kev"])
    if "energy_spread_ev" in params:
        si["energy_spread_J"] = params["energy_spread_ev"] * E_CHARGE
    if "ye_um" in params:
        si["y_e_m"] = um_to_m(params["ye_um"])
    if "lcoh_nm" in params:
        si["coherence_length_m"] = params["lcoh_nm"] * 1e-9
    return si


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _kv_csv(results: dict, stamp: bool, comments=()) -> str:
    rows = [[k, v] for k, v in results.items() if not isinstance(v, (dict, list))]
    return to_csv(["quantity", "value"], rows, list(comments), stamp)


# -- commands -----------------------------------------------------------------


def cmd_analytic(params: dict) -> tuple[dict, dict, list[str]]:
    energy_kev = _require(params, "energy_kev", "--energy-kev")
    flux, sol = _flux(params)
    spread = params.get("energy_spread_ev")
    beam = beam_from_energy(kev_to_joule(energy_kev), None if spread is None else spread * E_CHARGE)
    warnings: list[str] = []
    res = {
        "flux_Wb": flux,
        "flux_Gcm2": flux_to_gauss_cm2(flux),
    }
    if sol is not None:
        res["field_T"] = sol.field
    res.update(
        v0_m_per_s=beam.speed,
        debroglie_wavelength_m=beam.debroglie_wavelength,
        debroglie_wavelength_pm=m_to_pm(beam.debroglie_wavelength),
        wavevector_per_m=beam.wavevector,
        ab_phase_rad=kin.ab_phase(flux),
        ab_phase_pi=rad_to_pi(kin.ab_phase(flux)),
        dt_classical_s=kin.classical_delay(flux, beam),
    )
    if beam.energy_spread is not None:
        res["coherence_length_m"] = cat.coherence_length(beam.kinetic_energy, beam.energy_spread)
        res["coherence_length_nm"] = m_to_nm(res["coherence_length_m"])

    if "ye_um" not in params:
        lead = beam.speed * kin.classical_delay(flux, beam)
        res["relative_shift_first_order_m"] = lead
        res["relative_shift_first_order_nm"] = m_to_nm(lead)
        warnings.append("ye_um not given: impact-parameter dependent quantities omitted")
    else:
        y = um_to_m(params["ye_um"])
        geom = kin.PassageGeometry(y)
        if sol is not None:
            warnings.extend(geom.check_outside(sol))
        side = kin.side_displacement(flux, beam, y)
        rel = kin.relative_displacement(flux, beam, y)
        ph = kin.semiclassical_phase(flux, beam, y)
        env = kin.envelope_shift(flux, beam, y)
        res.update(
            side=geom.side,
            epsilon_dimensionless=rel.epsilon,
            side_shift_first_order_m=side.first_order,
            side_shift_second_order_m=side.second_order,
            side_shift_total_m=side.total,
            relative_shift_first_order_m=rel.first_order,
            relative_shift_first_order_nm=m_to_nm(rel.first_order),
            relative_shift_second_order_m=rel.second_order,
            relative_shift_total_m=rel.total,
            relative_shift_total_nm=m_to_nm(rel.total),
            phase_dispersionless_rad=ph.dispersionless_term,
            phase_dispersive_rad=ph.dispersive_term,
            phase_total_rad=ph.total,
            phase_total_pi=rad_to_pi(ph.total),
            envelope_shift_m=env,
            envelope_shift_nm=m_to_nm(env),
            dt_semiclassical_s=kin.semiclassical_delay(flux, beam, y),
            v_dt_classical_m=beam.speed * res["dt_classical_s"],
            v_dt_semiclassical_m=env,
        )
        warnings.extend(rel.warnings)
    parameters = {"lab_units": params, "si": _si_echo(params, flux, sol)}
    return parameters, res, warnings


def _verification_row(rec: cat.ExperimentRecord) -> list:
    v = cat.verify_record(rec)
    return [
        rec.name, rec.energy_keV, rec.lambda_pm, rec.Lcoh_nm, rec.phase_pi, rec.shift_nm,
        rec.flux_Gcm2, rec.y_e_um,
        v.wavelength.computed, v.phase.computed, v.shift.computed,
        v.wavelength.relative_deviation, v.phase.relative_deviation, v.shift.relative_deviation,
        cat.derived_energy_spread(rec) / E_CHARGE,
        ";".join(v.inconsistent_columns),
    ]


def _read_catalog(path: str) -> list[cat.ExperimentRecord]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read catalog {path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("results", data).get("records")
    if not isinstance(data, list):
        raise UsageError(f"{path}: expected an array of records")
    return [cat.record_from_json(d) for d in data]


def cmd_table1(params: dict) -> tuple[list[cat.ExperimentRecord], list[list]]:
    records = _read_catalog(params["catalog"]) if "catalog" in params else cat.builtin_table1()
    return records, [_verification_row(r) for r in records]


def _regime_results(rep: cat.RegimeReport) -> dict:
    return {
        "name": rep.name,
        "impact_parameter_m": rep.impact_parameter,
        "coherence_length_m": rep.coherence_length,
        "debroglie_wavelength_m": rep.debroglie_wavelength,
        "ab_phase_rad": rep.ab_phase,
        "ab_phase_pi": rad_to_pi(rep.ab_phase),
        "fringe_threshold_rad": rep.fringe_threshold,
        "v_dt_classical_m": rep.v_dt_classical,
        "v_dt_semiclassical_m": rep.v_dt_semiclassical,
        "fringe_test_feasible": rep.fringe_test_feasible,
        "classical_force_testable": rep.classical_force_testable,
        "dispersionless_force_testable": rep.dispersionless_force_testable,
        "semiclassical_available": rep.semiclassical_available,
        "outcome_note": rep.outcome_note,
    }


def _custom_record(params: dict) -> cat.ExperimentRecord:
    energy_kev = _require(params, "energy_kev", "--energy-kev")
    flux, _ = _flux(params)
    beam = beam_from_energy(kev_to_joule(energy_kev))
    if "lcoh_nm" in params:
        lcoh = params["lcoh_nm"]
    elif "energy_spread_ev" in params:
        lcoh = m_to_nm(cat.coherence_length(beam.kinetic_energy, params["energy_spread_ev"] * E_CHARGE))
    else:
        raise UsageError("missing required parameter lcoh_nm (--lcoh-nm) or energy_spread_ev (--energy-spread-ev)")
    return cat.ExperimentRecord(
        name="custom",
        energy_keV=energy_kev,
        lambda_pm=m_to_pm(beam.debroglie_wavelength),
        Lcoh_nm=lcoh,
        phase_pi=rad_to_pi(kin.ab_phase(flux)),
        shift_nm=m_to_nm(beam.speed * kin.classical_delay(flux, beam)),
        flux_Gcm2=flux_to_gauss_cm2(flux),
        y_e_um=None,
        provenance="user",
    )


def cmd_regimes(params: dict) -> tuple[dict, list[dict], list[str]]:
    y = um_to_m(params["ye_um"]) if "ye_um" in params else None
    name = params.get("record")
    if name is None:
        records = [_custom_record(params)]
    elif name.lower() == "all":
        records = cat.builtin_table1()
    else:
        try:
            records = [cat.find_record(name)]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from exc
    warnings = []
    out = []
    for rec in records:
        rep = cat.classify_regime(rec, y)
        if not rep.semiclassical_available:
            warnings.append(f"{rec.name}: no impact parameter; semi-classical fields unavailable")
        out.append(_regime_results(rep))
    return {"lab_units": params, "si": _si_echo(params)}, out, warnings


def _integrator_config(params: dict) -> IntegratorConfig:
    return IntegratorConfig(
        window_factor=params["window_factor_dimensionless"],
        relative_tolerance=params["rtol_dimensionless"],
        max_steps=params["max_steps_count"],
        tail_correction=params["tail_correction"],
    )


def cmd_trajectory(params: dict):
    energy_kev = _require(params, "energy_kev", "--energy-kev")
    ye_um = _require(params, "ye_um", "--ye-um")
    flux, sol = _flux(params)
    beam = beam_from_energy(kev_to_joule(energy_kev))
    y = um_to_m(ye_um)
    result = integrate_passage(flux, beam, y, _integrator_config(params))
    side = kin.side_displacement(flux, beam, y)
    rel = kin.relative_displacement(flux, beam, y)
    summary = {
        "displacement_vs_free_flight_m": result.displacement_vs_free_flight,
        "time_delay_s": result.time_delay,
        "final_speed_m_per_s": result.final_speed,
        "v0_m_per_s": beam.speed,
        "tail_correction_applied_m": result.tail_correction_applied,
        "local_error_estimate_m": result.local_error_estimate,
        "epsilon_dimensionless": result.epsilon,
        "steps_count": result.steps,
        "rejected_steps_count": result.rejected_steps,
        "analytic_side_displacement_m": side.total,
        "analytic_half_relative_displacement_m": 0.5 * rel.total * (1 if y > 0 else -1),
    }
    return {"lab_units": params, "si": _si_echo(params, flux, sol)}, result, summary


def _sweep_spec(params: dict) -> SweepSpec:
    return SweepSpec(
        current_min=params["current_min_A"],
        current_max=_require(params, "current_max_A", "--current-max"),
        steps=params["steps_count"],
        electron_energy=kev_to_joule(_require(params, "energy_kev", "--energy-kev")),
        radius=mm_to_m(params["solenoid_r_mm"]),
        winding_density=params["n_per_mm"] * 1e3,
        impact_parameter=um_to_m(_require(params, "ye_um", "--ye-um")),
        mu_r_modes=tuple(s.strip() for s in params["modes"].split(",") if s.strip()),
        outputs=tuple(s.strip() for s in params["outputs"].split(",") if s.strip()),
        integrator=_integrator_config(params),
    )


# -- entry point --------------------------------------------------------------


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    stamp = not args.no_timestamp
    fmt = args.format or DEFAULT_FORMAT[args.command]
    params = resolve(args)
    warnings: list[str] = []

    if args.command == "analytic":
        parameters, res, warnings = cmd_analytic(params)
        if fmt == "json":
            text = to_json(envelope("analytic", parameters, res, warnings, stamp))
        else:
            text = _kv_csv(res, stamp, [f"warning: {w}" for w in warnings])
        _emit(text, args.out)

    elif args.command == "table1":
        records, rows = cmd_table1(params)
        if fmt == "json":
            results = {
                "records": [cat.record_to_json(r) for r in records],
                "verification": [dict(zip(TABLE1_HEADER, row)) for row in rows],
            }
            text = to_json(envelope("table1", {"lab_units": params, "si": {}}, results, [], stamp))
        else:
            text = to_csv(TABLE1_HEADER, rows, ["experiment catalog with recomputed columns"], stamp)
        _emit(text, args.out)

    elif args.command == "regimes":
        parameters, out, warnings = cmd_regimes(params)
        if fmt == "json":
            text = to_json(envelope("regimes", parameters, out, warnings, stamp))
        else:
            header = list(out[0].keys())
            text = to_csv(header, [[r[k] for k in header] for r in out],
                          [f"warning: {w}" for w in warnings], stamp)
        _emit(text, args.out)

    elif args.command == "trajectory":
        if not args.out:
            raise UsageError("trajectory requires --out <path.csv> (a sidecar .json is written next to it)")
        parameters, result, summary = cmd_trajectory(params)
        warnings = list(result.warnings)
        rows = [list(s) for s in result.samples]
        Path(args.out).write_text(to_csv(["t_s", "x_m", "v_m_per_s"], rows, [], stamp))
        sidecar = Path(args.out).with_suffix(".json")
        sidecar.write_text(to_json(envelope("trajectory", parameters, summary, warnings, stamp)))

    elif args.command == "sweep":
        spec = _sweep_spec(params)
        columns, rows, warnings = run_sweep(spec, jobs=params["jobs_count"])
        if fmt == "json":
            results = {"columns": columns, "rows": rows}
            text = to_json(envelope("sweep", {"lab_units": params, "si": {}}, results, warnings, stamp))
        else:
            comments = [
                "dt_numeric_s is the integrated two-sided displacement / v0",
                *[f"warning: {w}" for w in warnings],
            ]
            text = to_csv(columns, rows, comments, stamp)
        _emit(text, args.out)

    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # argparse
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
