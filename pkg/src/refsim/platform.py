"""Static architecture model of the simulated heterogeneous platform.

A platform is described by a JSON document::

    {
      "core_types": [
        {"name": "little", "cpi_scale": 1.0, "dyn_coeff_w_per_ghz3": 0.5,
         "static_active_w": 0.2, "idle_w": 0.05, "reference": true},
        {"name": "big", "cpi_scale": 0.5, ...}
      ],
      "domains": [
        {"core_type": "little", "core_count": 4, "freqs_ghz": [0.5, 1.0, 2.0]},
        {"core_type": "big", "core_count": 4, "freqs_ghz": [0.5, 1.0, 2.0]}
      ],
      "mem_latency_ns": 100
    }

Core ids are assigned in domain declaration order.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any

from .errors import ParseError, UnknownResource, ValidationError


class ResourceKind(enum.Enum):
    CORE = "core"
    FREQ_DOMAIN = "domain"
    TASK = "task"
    SYSTEM = "system"


@dataclass(frozen=True, order=True)
class ResourceId:
    kind: ResourceKind
    index: int = 0

    def __str__(self) -> str:
        if self.kind is ResourceKind.SYSTEM:
            return "system"
        return f"{self.kind.value}{self.index}"


def core(i: int) -> ResourceId:
    return ResourceId(ResourceKind.CORE, i)


def domain(i: int) -> ResourceId:
    return ResourceId(ResourceKind.FREQ_DOMAIN, i)


def task(i: int) -> ResourceId:
    return ResourceId(ResourceKind.TASK, i)


SYSTEM = ResourceId(ResourceKind.SYSTEM, 0)


class SensorKind(enum.Enum):
    INSTRUCTIONS_RETIRED = "InstructionsRetired"
    BUSY_TIME_SEC = "BusyTimeSec"
    POWER_WATTS = "PowerWatts"
    IPS = "IPS"
    ENERGY_JOULES = "EnergyJoules"
    NUM_TASKS = "NumTasks"


class ActuatorKind(enum.Enum):
    FREQUENCY = "Frequency"
    TASK_CORE_MAP = "TaskCoreMap"


@dataclass(frozen=True)
class CoreType:
    name: str
    cpi_scale: float
    dyn_coeff: float  # W / GHz^3
    static_active: float  # W
    idle_power: float  # W
    reference: bool = False


@dataclass(frozen=True)
class Core:
    id: int
    core_type: int
    domain: int


@dataclass(frozen=True)
class FrequencyDomain:
    id: int
    core_type: int
    core_ids: tuple[int, ...]
    available_freqs: tuple[float, ...]  # GHz, strictly ascending


@dataclass(frozen=True)
class SysInfo:
    """Immutable topology and coefficient tables for one platform."""

    core_types: tuple[CoreType, ...]
    cores: tuple[Core, ...]
    freq_domains: tuple[FrequencyDomain, ...]
    mem_latency_ns: float

    @property
    def mem_latency(self) -> float:
        """Uniform memory access latency in seconds."""
        return self.mem_latency_ns * 1e-9

    @property
    def num_cores(self) -> int:
        return len(self.cores)

    @property
    def reference_type(self) -> int:
        for i, ct in enumerate(self.core_types):
            if ct.reference:
                return i
        raise AssertionError("validated SysInfo always has a reference type")

    def _core(self, core_id: int) -> Core:
        if not isinstance(core_id, int) or not 0 <= core_id < len(self.cores):
            raise UnknownResource(f"core {core_id} does not exist")
        return self.cores[core_id]

    def _domain(self, domain_id: int) -> FrequencyDomain:
        if not isinstance(domain_id, int) or not 0 <= domain_id < len(self.freq_domains):
            raise UnknownResource(f"frequency domain {domain_id} does not exist")
        return self.freq_domains[domain_id]

    def cores_in_domain(self, domain_id: int) -> tuple[int, ...]:
        return self._domain(domain_id).core_ids

    def domain_of_core(self, core_id: int) -> int:
        return self._core(core_id).domain

    def type_of_core(self, core_id: int) -> CoreType:
        return self.core_types[self._core(core_id).core_type]

    def type_index_of_core(self, core_id: int) -> int:
        return self._core(core_id).core_type

    def freq_range_of_domain(self, domain_id: int) -> tuple[float, ...]:
        return self._domain(domain_id).available_freqs

    def cores_of_type(self, type_index: int) -> tuple[int, ...]:
        return tuple(c.id for c in self.cores if c.core_type == type_index)

    def type_index(self, name: str) -> int:
        for i, ct in enumerate(self.core_types):
            if ct.name == name:
                return i
        raise UnknownResource(f"core type {name!r} does not exist")

    def check(self, rid: ResourceId) -> None:
        """Raise UnknownResource unless ``rid`` addresses a platform resource.

        Tasks are not part of the platform and are checked elsewhere.
        """
        if rid.kind is ResourceKind.CORE:
            self._core(rid.index)
        elif rid.kind is ResourceKind.FREQ_DOMAIN:
            self._domain(rid.index)


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{where}: missing field {key!r}", field=key)
    return obj[key]


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{field} must be a number, got {value!r}", field=field)
    return float(value)


def platform_from_dict(doc: dict) -> SysInfo:
    if not isinstance(doc, dict):
        raise ParseError("platform document must be a JSON object")

    raw_types = _require(doc, "core_types", "platform")
    if not isinstance(raw_types, list) or not raw_types:
        raise ValidationError("core_types must be a non-empty array", field="core_types")
    core_types = []
    names = set()
    for i, rt in enumerate(raw_types):
        where = f"core_types[{i}]"
        name = _require(rt, "name", where)
        if not isinstance(name, str) or not name:
            raise ValidationError(f"{where}.name must be a non-empty string", field="name")
        if name in names:
            raise ValidationError(f"duplicate core type {name!r}", field="name")
        names.add(name)
        ct = CoreType(
            name=name,
            cpi_scale=_number(_require(rt, "cpi_scale", where), "cpi_scale"),
            dyn_coeff=_number(_require(rt, "dyn_coeff_w_per_ghz3", where), "dyn_coeff_w_per_ghz3"),
            static_active=_number(_require(rt, "static_active_w", where), "static_active_w"),
            idle_power=_number(_require(rt, "idle_w", where), "idle_w"),
            reference=bool(rt.get("reference", False)),
        )
        if ct.cpi_scale <= 0:
            raise ValidationError(f"{where}.cpi_scale must be > 0", field="cpi_scale")
        for value, field in ((ct.dyn_coeff, "dyn_coeff_w_per_ghz3"),
                             (ct.static_active, "static_active_w"),
                             (ct.idle_power, "idle_w")):
            if value < 0:
                raise ValidationError(f"{where}.{field} must be >= 0", field=field)
        core_types.append(ct)

    refs = [ct for ct in core_types if ct.reference]
    if not refs:
        raise ValidationError("no reference core type", field="reference")
    if len(refs) > 1:
        raise ValidationError("more than one reference core type", field="reference")
    if refs[0].cpi_scale != 1.0:
        raise ValidationError("reference core type must have cpi_scale == 1", field="cpi_scale")

    raw_domains = _require(doc, "domains", "platform")
    if not isinstance(raw_domains, list) or not raw_domains:
        raise ValidationError("domains must be a non-empty array", field="domains")
    cores: list[Core] = []
    domains: list[FrequencyDomain] = []
    for d, rd in enumerate(raw_domains):
        where = f"domains[{d}]"
        tname = _require(rd, "core_type", where)
        if tname not in names:
            raise ValidationError(f"{where}: unknown core type {tname!r}", field="core_type")
        tidx = [ct.name for ct in core_types].index(tname)
        count = _require(rd, "core_count", where)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ValidationError(f"{where}.core_count must be a positive integer", field="core_count")
        freqs = _require(rd, "freqs_ghz", where)
        if not isinstance(freqs, list) or not freqs:
            raise ValidationError(f"{where}.available_freqs must be non-empty", field="available_freqs")
        freqs = tuple(_number(f, "available_freqs") for f in freqs)
        if any(f <= 0 for f in freqs):
            raise ValidationError(f"{where}: available_freqs must be > 0", field="available_freqs")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValidationError(f"{where}: available_freqs must be strictly ascending",
                                  field="available_freqs")
        ids = tuple(range(len(cores), len(cores) + count))
        cores.extend(Core(id=i, core_type=tidx, domain=d) for i in ids)
        domains.append(FrequencyDomain(id=d, core_type=tidx, core_ids=ids, available_freqs=freqs))

    lat = _number(_require(doc, "mem_latency_ns", "platform"), "mem_latency_ns")
    if lat <= 0:
        raise ValidationError("mem_latency_ns must be > 0", field="mem_latency_ns")

    return SysInfo(core_types=tuple(core_types), cores=tuple(cores),
                   freq_domains=tuple(domains), mem_latency_ns=lat)


def load_platform(text: str) -> SysInfo:
    """Parse and validate a platform description document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"platform document is not valid JSON: {exc}") from exc
    return platform_from_dict(doc)


def platform_to_dict(info: SysInfo) -> dict:
    return {
        "core_types": [
            {
                "name": ct.name,
                "cpi_scale": ct.cpi_scale,
                "dyn_coeff_w_per_ghz3": ct.dyn_coeff,
                "static_active_w": ct.static_active,
                "idle_w": ct.idle_power,
                "reference": ct.reference,
            }
            for ct in info.core_types
        ],
        "domains": [
            {
                "core_type": info.core_types[d.core_type].name,
                "core_count": len(d.core_ids),
                "freqs_ghz": list(d.available_freqs),
            }
            for d in info.freq_domains
        ],
        "mem_latency_ns": info.mem_latency_ns,
    }


def dump_platform(info: SysInfo) -> str:
    return json.dumps(platform_to_dict(info), indent=2)
