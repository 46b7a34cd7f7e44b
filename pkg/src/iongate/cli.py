"""Command-line scenario runner.

Usage::

    iongate <task> --scenario FILE --out DIR [--jobs N] [--figure 1..5]
    iongate compare --inputs A.csv B.csv --out DIR

Exit codes: 0 on success, 2 for invalid input, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import plotting
from .crystal import ConvergenceError, CrystalInstabilityError, normal_modes
from .errors import EmptyRangeError, carrier_error, evaluate_point, sweep_and_optimize
from .lightmatter import DriveConfig, RegimeViolation
from .magnus import InfeasibleError, ResonanceError, design_single_mode_gate, design_two_mode_gate
from .mathieu import MathieuDomainError
from .oracle import CutoffError, HilbertSpec, IntegrationError, TruncationError, evolve_gate
from .scenario import TASKS, ScenarioError, figure_scenario, load, with_task

__all__ = ["main", "run", "compare", "RESULT_COLUMNS", "OPTIMUM_COLUMNS"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

RESULT_COLUMNS = (
    "t_g_us",
    "eps_total",
    "eps_carr",
    "eps_mot",
    "eps_deph",
    "rabi_over_2pi_MHz",
    "detuning_over_2pi_kHz",
)
OPTIMUM_COLUMNS = (
    "t_g_us",
    "eps_total",
    "sweep_value",
    "rabi_over_2pi_MHz",
    "raw_rabi_over_2pi_MHz",
    "detuning_over_2pi_kHz",
    "axial_over_2pi_MHz",
    "rf_over_2pi_MHz",
)

NUMERICAL_ERRORS = (
    MathieuDomainError,
    CrystalInstabilityError,
    ConvergenceError,
    RegimeViolation,
    ResonanceError,
    InfeasibleError,
    EmptyRangeError,
    IntegrationError,
    CutoffError,
    TruncationError,
)

TWO_PI = 2.0 * np.pi


def _fmt(value):
    """Twelve significant digits; the fixed format keeps output byte-stable."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.12g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _result_row(p):
    b = p.budget
    return [
        b.gate_time * 1e6,
        b.eps_total,
        b.eps_carr,
        b.eps_mot,
        b.eps_deph,
        p.raw_rabi / TWO_PI / 1e6,
        p.bus_detuning / TWO_PI / 1e3,
    ]


def _optimum_row(p, multi_pulse):
    sweep_value = p.x if multi_pulse else p.x / TWO_PI
    rf = p.rf_freq / TWO_PI / 1e6 if np.isfinite(p.rf_freq) else float("inf")
    return [
        p.gate_time * 1e6,
        p.budget.eps_total,
        sweep_value,
        p.rabi / TWO_PI / 1e6,
        p.raw_rabi / TWO_PI / 1e6,
        p.bus_detuning / TWO_PI / 1e3,
        p.axial_freq / TWO_PI / 1e6,
        rf,
    ]


def _task_modes(s, out, jobs):
    rows = []
    for axis, label in (("z", "axial"), ("x", "transverse")):
        modes = normal_modes(s.species_obj, s.axial_freq, s.radial_freq, axis, s.n_ions)
        for m in range(modes.n_modes):
            rows.append([label, m, modes.mode_freqs[m] / TWO_PI / 1e6, *modes.mode_matrix[:, m]])
    header = ["axis", "mode", "freq_over_2pi_MHz"] + [f"participation_{i}" for i in range(s.n_ions)]
    _write_csv(out / "modes.csv", header, rows)


def _sweep_value(s):
    if s.mode_scheme == "transverse_two_mode":
        return s.axial_freq
    return TWO_PI * s.rabi_hz


def _task_design(s, out, jobs):
    x = _sweep_value(s)
    # A one-point recipe: the sweep bounds collapse onto the design value.
    s = replace(s, sweep_min_hz=x / TWO_PI, sweep_max_hz=x / TWO_PI, pulse_scheme="single_pulse")
    point = evaluate_point(s.recipe(), x)
    _write_csv(out / "result.csv", RESULT_COLUMNS, [_result_row(point)])


def _task_sweep(s, out, jobs):
    result = sweep_and_optimize(s.recipe(), jobs)
    multi = s.pulse_scheme == "multi_pulse"
    _write_csv(out / "result.csv", RESULT_COLUMNS, [_result_row(p) for p in result.points])
    _write_csv(out / "optimum.csv", OPTIMUM_COLUMNS, [_optimum_row(result.optimum, multi)])
    return result


def _task_pulse_train(s, out, jobs):
    recipe = replace(s.recipe(), pulse_scheme="multi_pulse")
    reference = sweep_and_optimize(replace(recipe.single_pulse(), force_scheme="secular"), jobs).optimum
    point = evaluate_point(recipe, s.gate_time_fraction, reference)
    _write_csv(out / "result.csv", RESULT_COLUMNS, [_result_row(point)])
    width = point.gate_time / len(point.amplitudes)
    rows = [[k, k * width * 1e6, width * 1e6, a / TWO_PI / 1e3] for k, a in enumerate(point.amplitudes)]
    _write_csv(out / "pulses.csv", ["pulse", "t_start_us", "width_us", "rabi_over_2pi_kHz"], rows)


def _task_oracle(s, out, jobs):
    axis = s.axis
    modes = normal_modes(s.species_obj, s.axial_freq, s.radial_freq, axis, s.n_ions, s.wavevector)
    if s.mode_scheme == "transverse_two_mode":
        gate = design_two_mode_gate(modes, DriveConfig(axis, np.ones(2), 0.0), s.r1, s.r2)
    else:
        drive = DriveConfig(axis, np.full(2, TWO_PI * s.rabi_hz), 0.0)
        gate = design_single_mode_gate(modes, drive, s.r1, phase_modes=s.phase_modes)
    spec = HilbertSpec(s.oracle_modes, s.fock_cutoff)
    full = evolve_gate(spec, gate, modes, include_carrier=s.include_carrier)
    force_only = evolve_gate(spec, gate, modes, include_carrier=False)
    estimate = carrier_error(2, float(np.mean(gate.rabi**2)), gate.detuning)
    header = ["t_g_us", "bell_infidelity", "force_only_infidelity", "eps_carr_estimate", "norm_drift", "leakage"]
    header += [f"abs_gamma_mode_{m}" for m in range(spec.n_modes)]
    row = [
        gate.gate_time * 1e6,
        1.0 - full.bell_fidelity,
        1.0 - force_only.bell_fidelity,
        estimate,
        full.norm_drift,
        full.leakage,
        *np.max(np.abs(full.gamma_measured), axis=0),
    ]
    _write_csv(out / "oracle.csv", header, [row])


def _task_figure(s, out, jobs):
    multi = s.pulse_scheme == "multi_pulse"
    results = [(t2, sweep_and_optimize(s.recipe(t2), jobs)) for t2 in s.t2_values]
    rows, optima = [], []
    for t2, result in results:
        rows += [_result_row(p) + [t2] for p in result.points]
        optima.append(_optimum_row(result.optimum, multi) + [t2])
    _write_csv(out / "result.csv", RESULT_COLUMNS + ("t2_s",), rows)
    _write_csv(out / "optimum.csv", OPTIMUM_COLUMNS + ("t2_s",), optima)
    name = f"figure {s.figure_id}" if s.figure_id else "figure"
    if multi:
        for k, (t2, result) in enumerate(results, start=1):
            plotting.pulse_train_panel(out / f"panel_{k}.svg", result, f"{name}, T2 = {t2:g} s")
    else:
        curves = [(f"T2 = {t2:g} s", result) for t2, result in results]
        plotting.budget_panel(out / "panel_1.svg", curves, name)


_TASKS = {
    "modes": _task_modes,
    "design": _task_design,
    "sweep": _task_sweep,
    "pulse-train": _task_pulse_train,
    "oracle": _task_oracle,
    "figure": _task_figure,
}


def run(task, scenario_path=None, out_dir=".", jobs=1, figure=None):
    """Run ``task`` and write its outputs to ``out_dir``.  Returns an exit code."""
    try:
        if scenario_path is None:
            if task != "figure" or figure is None:
                raise ScenarioError("--scenario is required unless running a built-in figure")
            s = figure_scenario(figure)
        else:
            s = with_task(load(scenario_path), task)
            if figure is not None:
                s = replace(s, figure_id=figure)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _TASKS[task](s, out, jobs)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


class SchemaError(ValueError):
    """Two result tables do not share columns and rows."""


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    if tuple(header[: len(RESULT_COLUMNS)]) != RESULT_COLUMNS:
        raise SchemaError(f"{path} is not a result table")
    return header, np.array(body, dtype=float).reshape(len(body), len(header))


def compare(path_a, path_b, out_path):
    """Per-row and optimum-to-optimum ratios (b over a) of two result tables.

    Raises
    ------
    SchemaError
        If the tables have different columns or row counts.
    """
    header_a, a = _read_table(path_a)
    header_b, b = _read_table(path_b)
    if header_a != header_b or a.shape != b.shape:
        raise SchemaError("result tables differ in columns or rows")
    t_col, e_col = RESULT_COLUMNS.index("t_g_us"), RESULT_COLUMNS.index("eps_total")
    rows = [[str(k), b[k, e_col] / a[k, e_col], b[k, t_col] / a[k, t_col]] for k in range(a.shape[0])]
    best_a, best_b = a[np.argmin(a[:, e_col])], b[np.argmin(b[:, e_col])]
    rows.append(["optimum", best_b[e_col] / best_a[e_col], best_b[t_col] / best_a[t_col]])
    _write_csv(out_path, ["row", "eps_total_ratio", "t_g_ratio"], rows)
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(prog="iongate", description="Trapped-ion entangling-gate toolkit")
    parser.add_argument("task", choices=TASKS + ("compare",))
    parser.add_argument("--scenario", help="scenario INI file (frequencies in Hz)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel sweep workers")
    parser.add_argument("--figure", type=int, choices=range(1, 6), help="built-in figure recipe")
    parser.add_argument("--inputs", nargs=2, metavar="CSV", help="two result tables for compare")
    args = parser.parse_args(argv)
    if args.task == "compare":
        if not args.inputs:
            print("invalid input: compare needs --inputs A.csv B.csv", file=sys.stderr)
            return EXIT_INVALID
        try:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            compare(args.inputs[0], args.inputs[1], out / "comparison.csv")
        except (SchemaError, ValueError, OSError) as exc:
            print(f"invalid input: {exc}", file=sys.stderr)
            return EXIT_INVALID
        return EXIT_OK
    return run(args.task, args.scenario, args.out, max(1, args.jobs), args.figure)


if __name__ == "__main__":
    sys.exit(main())
