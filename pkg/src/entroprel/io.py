"""Scenario documents and result serialisation.

Scenario files are JSON (``schema_version`` 1)::

    {
      "schema_version": 1,
      "components": [{"name": "DSO", "unit_loss": 18}, ...],
      "stress_matrix": [[p_00, ..., p_0(m-1)], ...],   # one row per component
      "pf_target": 0.45,
      "loss_target": 6,
      "charging": {...},     # optional, see CHARGING_FIELDS
      "optimizer": {...}     # optional, see OPTIMIZER_FIELDS
    }

Tabular outputs are CSV with six decimals; JSON outputs keep full
precision. Key order and number formatting are fixed so that identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .charging import DEFAULT_GRANULARITY_H, ChargingSession
from .exceptions import EntroprelError, ParseError
from .model import FailureMatrix, MultiplierPair, Scenario, validate_scenario
from .optimizer import OptimizerOptions

SCHEMA_VERSION = 1

CHARGING_FIELDS = (
    "battery_capacity_kwh",
    "initial_soc_pct",
    "desired_soc_pct",
    "charging_power_kw",
    "charging_efficiency",
    "actual_duration_h",
)
OPTIMIZER_FIELDS = (
    "lambda1_bounds",
    "lambda2_bounds",
    "constraint_penalty",
    "bound_penalty",
    "constraint_margin",
    "pf_floor",
    "pf_ceiling",
    "fd_epsilon",
    "function_tolerance",
    "gradient_tolerance",
    "max_iterations",
    "initial_guess",
)
TOP_LEVEL_FIELDS = (
    "schema_version",
    "components",
    "stress_matrix",
    "pf_target",
    "loss_target",
    "charging",
    "optimizer",
)


@dataclass(frozen=True)
class ScenarioDocument:
    scenario: Scenario
    charging: ChargingSession | None = None
    granularity_h: float = DEFAULT_GRANULARITY_H
    options: OptimizerOptions = field(default_factory=OptimizerOptions)


def _prefixed(err: EntroprelError, prefix: str) -> EntroprelError:
    path = f"{prefix}.{err.field}" if err.field else prefix
    message = str(err)
    if err.field and message.startswith(f"{err.field}: "):
        message = message[len(err.field) + 2:]
    return type(err)(message, field=path)


def _parse_bounds(value, name):
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError("expected [low, high] (null for unbounded)", field=f"optimizer.{name}")
    lo = -math.inf if value[0] is None else value[0]
    hi = math.inf if value[1] is None else value[1]
    return (lo, hi)


def _parse_optimizer(block) -> OptimizerOptions:
    if not isinstance(block, dict):
        raise ParseError("must be an object", field="optimizer")
    unknown = sorted(set(block) - set(OPTIMIZER_FIELDS))
    if unknown:
        raise ParseError(f"unknown keys {unknown}", field="optimizer")
    kwargs = dict(block)
    for name in ("lambda1_bounds", "lambda2_bounds"):
        if name in kwargs:
            kwargs[name] = _parse_bounds(kwargs[name], name)
    if kwargs.get("initial_guess") is not None:
        guess = kwargs["initial_guess"]
        try:
            kwargs["initial_guess"] = MultiplierPair(float(guess["lambda1"]), float(guess["lambda2"]))
        except (TypeError, KeyError, ValueError):
            raise ParseError("expected {\"lambda1\": x, \"lambda2\": y}", field="optimizer.initial_guess") from None
    try:
        return OptimizerOptions(**kwargs)
    except EntroprelError as err:
        raise _prefixed(err, "optimizer") from None
    except TypeError as err:
        raise ParseError(str(err), field="optimizer") from None


def _parse_charging(block):
    if not isinstance(block, dict):
        raise ParseError("must be an object", field="charging")
    allowed = set(CHARGING_FIELDS) | {"granularity_h"}
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ParseError(f"unknown keys {unknown}", field="charging")
    kwargs = {k: block[k] for k in CHARGING_FIELDS if k in block}
    missing = [k for k in CHARGING_FIELDS[:4] if k not in kwargs]
    if missing:
        raise ParseError(f"missing keys {missing}", field="charging")
    try:
        session = ChargingSession(**{k: float(v) for k, v in kwargs.items()})
    except EntroprelError as err:
        raise _prefixed(err, "charging") from None
    except (TypeError, ValueError) as err:
        raise ParseError(str(err), field="charging") from None
    granularity = float(block.get("granularity_h", DEFAULT_GRANULARITY_H))
    if not granularity > 0:
        raise ParseError("must be positive", field="charging.granularity_h")
    return session, granularity


def parse_scenario(text: str) -> ScenarioDocument:
    """Parse and validate a scenario document from a JSON string."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be a JSON object")

    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r}", field="schema_version")
    unknown = sorted(set(raw) - set(TOP_LEVEL_FIELDS))
    if unknown:
        raise ParseError(f"unknown keys {unknown}")

    scenario = validate_scenario(raw)
    charging, granularity = None, DEFAULT_GRANULARITY_H
    if raw.get("charging") is not None:
        charging, granularity = _parse_charging(raw["charging"])
    options = OptimizerOptions()
    if raw.get("optimizer") is not None:
        options = _parse_optimizer(raw["optimizer"])
    return ScenarioDocument(scenario, charging, granularity, options)


def load_scenario(path) -> ScenarioDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err.strerror}") from None
    return parse_scenario(text)


def _bound_to_json(value):
    return None if math.isinf(value) else value


def scenario_to_dict(scenario: Scenario, charging: ChargingSession | None = None,
                     granularity_h: float = DEFAULT_GRANULARITY_H,
                     options: OptimizerOptions | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "components": [{"name": c.name, "unit_loss": c.unit_loss} for c in scenario.components],
        "stress_matrix": [list(row) for row in scenario.stress.rows],
        "pf_target": scenario.network_failure_probability,
        "loss_target": scenario.expected_loss,
    }
    if charging is not None:
        doc["charging"] = {k: getattr(charging, k) for k in CHARGING_FIELDS}
        doc["charging"]["granularity_h"] = granularity_h
    if options is not None:
        block = {}
        for name in OPTIMIZER_FIELDS:
            value = getattr(options, name)
            if name.endswith("_bounds"):
                value = [_bound_to_json(value[0]), _bound_to_json(value[1])]
            elif name == "initial_guess" and value is not None:
                value = {"lambda1": value.lambda1, "lambda2": value.lambda2}
            block[name] = value
        doc["optimizer"] = block
    return doc


def dump_scenario(scenario: Scenario, **extra) -> str:
    return json.dumps(scenario_to_dict(scenario, **extra), indent=2) + "\n"


def _entries(matrix) -> np.ndarray:
    return matrix.entries if isinstance(matrix, FailureMatrix) else np.asarray(matrix, dtype=float)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def emit_failure_table(matrix, component_names, fmt: str = "csv") -> str:
    """Render a failure matrix with one row per stress level.

    CSV columns are ``stress_level`` then one per component, six decimals.
    JSON keeps full precision and component-major ``entries``.
    """
    q = _entries(matrix)
    names = list(component_names)
    if len(names) != q.shape[0]:
        raise ValueError(f"{len(names)} names for {q.shape[0]} components")
    if fmt == "csv":
        rows = [[j, *(_fmt(v) for v in q[:, j])] for j in range(q.shape[1])]
        return _csv_text(["stress_level", *names], rows)
    if fmt == "json":
        doc = {
            "components": names,
            "stress_levels": list(range(q.shape[1])),
            "entries": q.tolist(),
        }
        if isinstance(matrix, FailureMatrix) and matrix.multipliers is not None:
            doc["multipliers"] = {"lambda1": matrix.multipliers.lambda1, "lambda2": matrix.multipliers.lambda2}
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_failure_table_json(text: str) -> tuple[list[str], FailureMatrix]:
    doc = json.loads(text)
    mult = doc.get("multipliers")
    pair = MultiplierPair(mult["lambda1"], mult["lambda2"]) if mult else None
    return list(doc["components"]), FailureMatrix(np.array(doc["entries"], dtype=float), pair)


def emit_stress_table(scenario: Scenario) -> str:
    p = scenario.p
    rows = [[j, *(_fmt(v) for v in p[:, j])] for j in range(p.shape[1])]
    return _csv_text(["stress_level", *scenario.names], rows)


def emit_reliability_curve(per_level) -> str:
    return _csv_text(["stress_level", "R_j"], [[j, _fmt(r)] for j, r in enumerate(per_level)])


def emit_component_failure(scenario: Scenario, per_component, row_sums, weakest: int) -> str:
    rows = [
        [c.name, _fmt(f), _fmt(s), "true" if i == weakest else "false"]
        for i, (c, f, s) in enumerate(zip(scenario.components, per_component, row_sums))
    ]
    return _csv_text(["component", "failure_probability", "sum_pF", "is_weakest"], rows)


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="")
