"""Execute scenarios and compare solver routes."""
from __future__ import annotations

import csv
import io
import itertools
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..cavity_analytic import CavityParams, cavity_model, edge_weight, fock_solution
from ..config import DEFAULT_TOLERANCES
from ..effective_propagation import apply_propagator, build_effective_hamiltonian
from ..errors import ContractViolation, NumericalRangeError, TruncationWarning
from ..lindblad_model import MasterEquation, generator_norm_bound, rk4_evolve, MAX_RK4_STEP_NORM
from ..qubit_analytic import QubitParams, evolve_qubit, qubit_model
from .scenario import GenericModel, Scenario, check_method

__all__ = ["RunReport", "build_model", "run", "compare", "format_csv", "DEFAULT_RK4_STEPS"]

DEFAULT_RK4_STEPS = 4000
TRACE_TOL = 1e-10


@dataclass
class RunReport:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)
    flagged_rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows])


def build_model(scenario: Scenario) -> MasterEquation:
    model = scenario.model
    if isinstance(model, GenericModel):
        return MasterEquation.lindblad(model.hamiltonian, model.channels)
    if isinstance(model, QubitParams):
        return qubit_model(model)
    if isinstance(model, CavityParams):
        return cavity_model(model)
    raise ContractViolation(f"unsupported model {model!r}")


def _rk4_states(model, rho0, times, total_steps):
    """Sequential RK4 from t=0 through the grid; step budget shared by interval length."""
    span = float(times[-1])
    states = []
    rho, t_prev = rho0, 0.0
    for t in times:
        dt = float(t) - t_prev
        if dt > 0:
            steps = max(1, math.ceil(total_steps * dt / span - 1e-9))
            rho = rk4_evolve(model, rho, dt, steps)
        states.append(rho)
        t_prev = float(t)
    return states


def _default_rk4_steps(model, stop):
    # keep step * norm <= 0.01, well inside the integrator's guard
    return max(DEFAULT_RK4_STEPS, math.ceil(stop * generator_norm_bound(model) / (MAX_RK4_STEP_NORM / 10)))


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _states(scenario: Scenario, model: MasterEquation, times: np.ndarray, workers: int, meta: dict):
    rho0 = scenario.initial_state
    if scenario.method == "expm":
        h_eff = build_effective_hamiltonian(model)
        return _map(lambda t: apply_propagator(h_eff.propagator(t), rho0), times, workers)
    if scenario.method == "analytic":
        if scenario.kind == "qubit":
            return _map(lambda t: evolve_qubit(rho0, scenario.model, t), times, workers)
        return _map(lambda t: fock_solution(rho0, scenario.model, t), times, workers)
    steps = scenario.rk4_steps or _default_rk4_steps(model, float(times[-1]))
    meta["rk4_steps"] = steps
    return _rk4_states(model, rho0, times, steps)


def run(scenario: Scenario, workers: int = 1, trace_tol: float = TRACE_TOL) -> RunReport:
    """Evaluate every requested observable on the time grid."""
    check_method(scenario.method, scenario.kind, scenario.dim, "method")
    model = build_model(scenario)
    times = scenario.times.values()
    meta = {"method": scenario.method, "model": scenario.kind, "points": int(times.size)}
    started = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        states = _states(scenario, model, times, workers, meta)
    meta["wall_time_s"] = time.perf_counter() - started

    rows = []
    for t, rho in zip(times, states):
        row = [float(t)]
        for obs in scenario.observables:
            row.extend(obs.evaluate(rho))
        if not all(math.isfinite(v) for v in row):
            raise NumericalRangeError(f"non-finite observable at t={t} with method {scenario.method}")
        rows.append(row)

    traces = np.array([np.trace(rho).real for rho in states])
    drift = float(np.max(np.abs(traces - 1.0)))
    meta["trace_preserving"] = model.trace_preserving_by_construction
    meta["max_trace_deviation"] = drift
    meta["trace_flag"] = bool(model.trace_preserving_by_construction and drift > trace_tol)

    flagged = []
    if scenario.kind == "cavity":
        limit = DEFAULT_TOLERANCES.truncation_weight
        flagged = [i for i, rho in enumerate(states) if edge_weight(rho) > limit]
        meta["truncation_warning"] = bool(flagged)
        meta["truncated_rows"] = flagged
    return RunReport(scenario.columns, rows, meta, flagged)


def format_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([f"{v:.14e}" for v in row])
    return buf.getvalue()


def compare(scenario: Scenario, methods, tol: float = 1e-8, workers: int = 1) -> dict:
    """Max-absolute deviation per observable column across every pair of methods.

    Rows flagged for truncation by any method are excluded from the verdict.
    """
    methods = list(dict.fromkeys(methods))
    if len(methods) < 2:
        raise ContractViolation("compare needs at least two distinct methods")
    reports = {m: run(scenario.with_method(m), workers=workers) for m in methods}
    flagged = sorted(set().union(*(r.flagged_rows for r in reports.values())))
    keep = [i for i in range(scenario.times.points) if i not in flagged]

    observables = {}
    passed = True
    for col in scenario.columns[1:]:
        pairs = {}
        for a, b in itertools.combinations(methods, 2):
            da = reports[a].column(col)[keep]
            db = reports[b].column(col)[keep]
            pairs[f"{a}-{b}"] = float(np.max(np.abs(da - db))) if keep else None
        values = [v for v in pairs.values() if v is not None]
        worst = max(values) if values else None
        if worst is not None and worst > tol:
            passed = False
        observables[col] = {"max_abs_deviation": worst, "pairs": pairs}

    return {
        "scenario": scenario.name,
        "model": scenario.kind,
        "methods": methods,
        "tolerance": tol,
        "observables": observables,
        "excluded_rows": flagged,
        "truncation_warning": bool(flagged),
        "trace_flags": {m: r.metadata["trace_flag"] for m, r in reports.items()},
        "passed": passed,
    }
