"""Manager configuration documents.

A JSON object with these keys (all optional)::

    {
      "policies": [{"name": "dvfs", "type": "simple_dvfs", "period_ms": 50, "params": {}}],
      "models": [{"type": "ondemand", "period_ms": 50}],
      "scenarios": [{"name": "plugged", "policies": ["dvfs"],
                     "trigger": {"metric": "PowerWatts", "resource": "system",
                                 "op": ">", "threshold": 3.0, "period_ms": 100}}],
      "initial_scenario": "plugged",
      "events": [{"time_ms": 500, "event": "battery"}],
      "events_file": "events.csv",
      "event_map": {"unplug": "battery"},
      "migration_penalty_ms": 0,
      "report_ms": 10
    }

``events_file`` is a ``time_ms,event_name`` CSV resolved relative to the
configuration file.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError
from .manager import PolicyManager, Scenario, Trigger
from .platform import ResourceId, ResourceKind, SensorKind
from .policies import POLICY_TYPES, create_policy


@dataclass
class RunOptions:
    migration_penalty: float = 0.0
    report_period: float | None = None


_RID = re.compile(r"^(core|domain|task)(\d+)$")


def parse_resource(text: str) -> ResourceId:
    if text == "system":
        return ResourceId(ResourceKind.SYSTEM, 0)
    m = _RID.match(text)
    if not m:
        raise ValidationError(f"bad resource name {text!r}", field="resource")
    return ResourceId(ResourceKind(m.group(1)), int(m.group(2)))


def _ms(obj: dict, key: str, where: str, default=None) -> float | None:
    value = obj.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: {key} must be a number", field=key)
    return value / 1000


def _policy(spec: dict, where: str):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValidationError(f"{where}: needs a 'type'", field="type")
    if spec["type"] not in POLICY_TYPES:
        raise ValidationError(f"{where}: unknown policy type {spec['type']!r}", field="type")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError(f"{where}: params must be an object", field="params")
    try:
        return create_policy(spec["type"], spec.get("name"), _ms(spec, "period_ms", where), **params)
    except TypeError as exc:
        raise ValidationError(f"{where}: {exc}", field="params") from None


def parse_events_csv(text: str) -> list[tuple[float, str]]:
    out = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or row[0].strip().startswith("#"):
            continue
        if line_no == 1 and row[0].strip() == "time_ms":
            continue
        if len(row) != 2:
            raise ParseError(f"events line {line_no}: expected time_ms,event_name")
        try:
            t = float(row[0]) / 1000
        except ValueError:
            raise ParseError(f"events line {line_no}: bad time {row[0]!r}") from None
        out.append((t, row[1].strip()))
    return out


def manager_from_dict(doc: dict, base_dir: Path | None = None) -> tuple[PolicyManager, RunOptions]:
    if not isinstance(doc, dict):
        raise ParseError("manager config must be a JSON object")
    mgr = PolicyManager()
    for i, spec in enumerate(doc.get("policies", [])):
        mgr.register_policy(_policy(spec, f"policies[{i}]"))
    for i, spec in enumerate(doc.get("models", [])):
        where = f"models[{i}]"
        mgr.register_model(_policy(spec, where), _ms(spec, "period_ms", where))

    for i, spec in enumerate(doc.get("scenarios", [])):
        where = f"scenarios[{i}]"
        if not isinstance(spec, dict) or "name" not in spec:
            raise ValidationError(f"{where}: needs a 'name'", field="name")
        trig = None
        if spec.get("trigger") is not None:
            t = spec["trigger"]
            try:
                trig = Trigger(SensorKind(t["metric"]), parse_resource(t.get("resource", "system")),
                               t["op"], float(t["threshold"]), _ms(t, "period_ms", where))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValidationError(f"{where}.trigger: {exc}", field="trigger") from None
        mgr.add_scenario(Scenario(spec["name"], list(spec.get("policies", [])), trig))
    mgr.initial_scenario = doc.get("initial_scenario")
    mgr.event_map = dict(doc.get("event_map", {}))

    for i, ev in enumerate(doc.get("events", [])):
        mgr.schedule_event(_ms(ev, "time_ms", f"events[{i}]"), ev["event"])
    if doc.get("events_file"):
        path = Path(doc["events_file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read events file {path}: {exc.strerror}") from None
        for t, name in parse_events_csv(text):
            mgr.schedule_event(t, name)

    opts = RunOptions(migration_penalty=_ms(doc, "migration_penalty_ms", "config", 0.0),
                      report_period=_ms(doc, "report_ms", "config"))
    return mgr, opts


def load_manager(text: str, base_dir: Path | None = None) -> tuple[PolicyManager, RunOptions]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manager config is not valid JSON: {exc}") from None
    return manager_from_dict(doc, base_dir)
