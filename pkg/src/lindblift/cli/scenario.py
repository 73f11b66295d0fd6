"""Scenario files: JSON description of a single simulation run.

Matrix literals are row-major nested arrays of ``[re, im]`` pairs.  With the
qubit basis order ``(|e>, |g>)`` the lowering operator ``|g><e|`` is
``[[[0,0],[0,0]],[[1,0],[0,0]]]``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from ..cavity_analytic import CavityParams
from ..errors import ContractViolation, LindbliftError
from ..effective_propagation import MAX_SYSTEM_DIM
from ..operators import EXCITED, GROUND, coherent_dm, fock_dm, thermal_dm
from ..qubit_analytic import QubitParams

__all__ = [
    "METHODS",
    "ScenarioError",
    "GenericModel",
    "Observable",
    "TimeGrid",
    "Scenario",
    "parse_matrix_literal",
    "parse_scenario",
    "parse_observable",
]

METHODS = ("expm", "rk4", "analytic")
ANALYTIC_KINDS = ("qubit", "cavity")
_TOP_KEYS = {"model", "initial_state", "times", "method", "observables", "rk4_steps", "name", "description"}


class ScenarioError(LindbliftError, ValueError):
    """Invalid scenario; ``kind`` is one of ``malformed-json``, ``schema``,
    ``dimension``, ``unknown-method``, ``unknown-observable``."""

    def __init__(self, kind: str, path: str, message: str):
        self.kind = kind
        self.path = path
        super().__init__(f"[{kind}] {path}: {message}" if path else f"[{kind}] {message}")


def _schema(path, msg):
    return ScenarioError("schema", path, msg)


def parse_matrix_literal(value, path: str = "matrix") -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise _schema(path, "matrix literal must be a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise _schema(f"{path}[{i}]", "row must be a non-empty list of [re, im] pairs")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ScenarioError("dimension", f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        entries = []
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
                or not all(math.isfinite(x) for x in pair)
            ):
                raise _schema(f"{path}[{i}][{j}]", "entry must be a [re, im] pair of finite numbers")
            entries.append(complex(pair[0], pair[1]))
        rows.append(entries)
    return np.array(rows, dtype=np.complex128)


def _join(path, key):
    return f"{path}.{key}" if path else key


def _number(obj, key, path, *, minimum=None, strict=False, required=True, default=None):
    if key not in obj:
        if required:
            raise _schema(_join(path, key), "missing required field")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise _schema(_join(path, key), f"expected a finite number, got {val!r}")
    if minimum is not None and (val <= minimum if strict else val < minimum):
        op = ">" if strict else ">="
        raise _schema(_join(path, key), f"must be {op} {minimum}, got {val}")
    return float(val)


def _integer(obj, key, path, *, minimum, required=True, default=None):
    if key not in obj:
        if required:
            raise _schema(_join(path, key), "missing required field")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int) or val < minimum:
        raise _schema(_join(path, key), f"expected an integer >= {minimum}, got {val!r}")
    return val


def _square(m: np.ndarray, dim: int, path: str) -> np.ndarray:
    if m.shape != (dim, dim):
        raise ScenarioError("dimension", path, f"expected a {dim}x{dim} matrix, got {m.shape[0]}x{m.shape[1]}")
    return m


@dataclass(frozen=True, eq=False)
class GenericModel:
    hamiltonian: np.ndarray
    channels: tuple  # of (operator, rate)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class Observable:
    kind: str
    indices: tuple = ()

    @property
    def label(self) -> str:
        if self.indices:
            return f"{self.kind}:{','.join(map(str, self.indices))}"
        return self.kind

    @property
    def columns(self) -> list[str]:
        if self.kind == "coherence":
            return [f"{self.label}:re", f"{self.label}:im"]
        return [self.label]

    def evaluate(self, rho: np.ndarray) -> list[float]:
        if self.kind == "population":
            n = self.indices[0]
            return [float(rho[n, n].real)]
        if self.kind == "coherence":
            z = rho[self.indices]
            return [float(z.real), float(z.imag)]
        if self.kind == "trace":
            return [float(np.trace(rho).real)]
        if self.kind == "purity":
            return [float(np.vdot(rho.conj().T, rho).real)]
        if self.kind == "min_eigenvalue":
            herm = 0.5 * (rho + rho.conj().T)
            return [float(np.linalg.eigvalsh(herm)[0])]
        raise AssertionError(self.kind)


_OBS_RE = re.compile(r"^(population):(\d+)$|^(coherence):(\d+),(\d+)$|^(trace|purity|min_eigenvalue)$")


def parse_observable(spec, dim: int, path: str) -> Observable:
    if isinstance(spec, dict):
        if "kind" not in spec:
            raise _schema(path, "observable object needs a 'kind' field")
        spec = spec["kind"]
        path = f"{path}.kind"
    if not isinstance(spec, str):
        raise _schema(path, f"observable must be a string, got {spec!r}")
    m = _OBS_RE.match(spec.strip())
    if not m:
        raise ScenarioError("unknown-observable", path, f"unknown observable {spec!r}")
    if m.group(1):
        obs = Observable("population", (int(m.group(2)),))
    elif m.group(3):
        obs = Observable("coherence", (int(m.group(4)), int(m.group(5))))
    else:
        obs = Observable(m.group(6))
    if any(i >= dim for i in obs.indices):
        raise ScenarioError("dimension", path, f"index out of range for dimension {dim}")
    return obs


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True, eq=False)
class Scenario:
    kind: str
    model: object  # GenericModel | QubitParams | CavityParams
    initial_state: np.ndarray
    initial_label: str
    times: TimeGrid
    method: str
    observables: tuple
    rk4_steps: int | None = None
    name: str = ""

    @property
    def dim(self) -> int:
        return self.initial_state.shape[0]

    @property
    def columns(self) -> list[str]:
        cols = ["t"]
        for obs in self.observables:
            cols.extend(obs.columns)
        return cols

    def with_method(self, method: str) -> "Scenario":
        check_method(method, self.kind, self.dim, "method")
        return Scenario(self.kind, self.model, self.initial_state, self.initial_label, self.times,
                        method, self.observables, self.rk4_steps, self.name)


def check_method(method, kind: str, dim: int, path: str) -> str:
    if not isinstance(method, str) or method not in METHODS:
        raise ScenarioError("unknown-method", path, f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "analytic" and kind not in ANALYTIC_KINDS:
        raise _schema(path, f"method 'analytic' is not available for model kind {kind!r}")
    if method == "expm" and dim > MAX_SYSTEM_DIM:
        raise ScenarioError(
            "dimension", path, f"method 'expm' supports dimension <= {MAX_SYSTEM_DIM}, model has {dim}"
        )
    return method


def _parse_model(obj):
    path = "model"
    if not isinstance(obj, dict):
        raise _schema(path, "expected an object")
    kind = obj.get("kind")
    if kind == "generic":
        dim = _integer(obj, "dim", path, minimum=1)
        if "hamiltonian" not in obj:
            raise _schema(f"{path}.hamiltonian", "missing required field")
        h = _square(parse_matrix_literal(obj["hamiltonian"], f"{path}.hamiltonian"), dim, f"{path}.hamiltonian")
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise _schema(f"{path}.hamiltonian", "Hamiltonian must be Hermitian")
        raw = obj.get("channels", [])
        if not isinstance(raw, list):
            raise _schema(f"{path}.channels", "expected a list")
        channels = []
        for k, ch in enumerate(raw):
            cpath = f"{path}.channels[{k}]"
            if not isinstance(ch, dict) or "operator" not in ch:
                raise _schema(cpath, "channel must be an object with 'operator' and 'rate'")
            op = _square(parse_matrix_literal(ch["operator"], f"{cpath}.operator"), dim, f"{cpath}.operator")
            rate = _number(ch, "rate", cpath, minimum=0.0)
            channels.append((op, rate))
        return kind, GenericModel(h, tuple(channels)), dim
    if kind == "qubit":
        rabi = _number(obj, "rabi", path)
        gamma = _number(obj, "gamma", path, minimum=0.0)
        if "nbar" in obj and "temperature" in obj:
            raise _schema(path, "give either 'nbar' or 'temperature', not both")
        if "temperature" in obj:
            temperature = _number(obj, "temperature", path, minimum=0.0, strict=True)
            omega = _number(obj, "omega", path, minimum=0.0, strict=True, required=False, default=rabi)
            if not omega > 0:
                raise _schema(f"{path}.omega", "transition frequency must be positive for a thermal occupation")
            params = QubitParams.at_temperature(rabi, gamma, temperature, omega)
        else:
            params = QubitParams(rabi, gamma, _number(obj, "nbar", path, minimum=0.0, required=False, default=0.0))
        return kind, params, 2
    if kind == "cavity":
        params = CavityParams(
            _number(obj, "omega_f", path),
            _number(obj, "kappa", path, minimum=0.0),
            _integer(obj, "n_max", path, minimum=1),
        )
        return kind, params, params.levels
    raise _schema(f"{path}.kind", f"unknown model kind {kind!r}; choose generic, qubit or cavity")


def _parse_initial_state(value, kind: str, dim: int):
    path = "initial_state"
    if isinstance(value, list):
        return _square(parse_matrix_literal(value, path), dim, path), "matrix"
    if not isinstance(value, str):
        raise _schema(path, "expected a matrix literal or a named state")
    name = value.strip()
    try:
        if kind == "qubit":
            if name == "excited":
                return EXCITED.copy(), name
            if name == "ground":
                return GROUND.copy(), name
        elif kind == "cavity":
            n_max = dim - 1
            if name in ("ground", "vacuum"):
                return fock_dm(0, n_max), name
            if name.startswith("fock:"):
                return fock_dm(int(name[5:]), n_max), name
            if name.startswith("coherent:"):
                re_part, im_part = (float(x) for x in name[9:].split(","))
                return coherent_dm(complex(re_part, im_part), n_max), name
            if name.startswith("thermal:"):
                return thermal_dm(float(name[8:]), n_max), name
    except (ValueError, ContractViolation) as exc:
        raise _schema(path, f"bad named state {name!r}: {exc}") from None
    raise _schema(path, f"named state {name!r} is not valid for model kind {kind!r}")


def _parse_times(obj):
    path = "times"
    if not isinstance(obj, dict):
        raise _schema(path, "expected an object")
    start = _number(obj, "start", path, minimum=0.0)
    stop = _number(obj, "stop", path)
    if not stop > start:
        raise _schema(f"{path}.stop", f"stop ({stop}) must exceed start ({start})")
    points = _integer(obj, "points", path, minimum=2)
    spacing = obj.get("spacing", "linear")
    if spacing != "linear":
        raise _schema(f"{path}.spacing", f"only 'linear' spacing is supported, got {spacing!r}")
    extra = set(obj) - {"start", "stop", "points", "spacing"}
    if extra:
        raise _schema(path, f"unknown field(s): {', '.join(sorted(extra))}")
    return TimeGrid(start, stop, points)


def parse_scenario(text) -> Scenario:
    """Parse and validate a scenario document (str, bytes or already-decoded dict)."""
    if isinstance(text, dict):
        doc = text
    else:
        if isinstance(text, bytes):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ScenarioError("malformed-json", "", f"not UTF-8: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError("malformed-json", "", str(exc)) from None
    if not isinstance(doc, dict):
        raise _schema("", "top level must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise _schema("", f"unknown field(s): {', '.join(sorted(extra))}")
    for key in ("model", "initial_state", "times", "method", "observables"):
        if key not in doc:
            raise _schema(key, "missing required field")

    try:
        kind, model, dim = _parse_model(doc["model"])
    except ContractViolation as exc:
        raise _schema("model", str(exc)) from None
    rho0, label = _parse_initial_state(doc["initial_state"], kind, dim)
    times = _parse_times(doc["times"])
    method = check_method(doc["method"], kind, dim, "method")

    raw_obs = doc["observables"]
    if not isinstance(raw_obs, list) or not raw_obs:
        raise _schema("observables", "expected a non-empty list")
    observables = tuple(parse_observable(o, dim, f"observables[{i}]") for i, o in enumerate(raw_obs))
    rk4_steps = _integer(doc, "rk4_steps", "", minimum=1, required=False)
    name = doc.get("name", "")
    return Scenario(kind, model, rho0, label, times, method, observables, rk4_steps, str(name))
