"""Per-window metrics report emitted by a simulation run.

One record per reporting window for every core, every frequency domain and
the whole system. Floats are written with ``repr`` so reruns on identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import InvalidPeriod
from .platform import SysInfo
from .sensing import SenseData, SenseSample

FIELDS = ("time", "resource", "frequency", "ips", "power_w", "energy_j", "utilization",
          "migrations")


@dataclass
class ReportRecord:
    time: float
    resource: str
    frequency: float | None
    ips: float
    power_w: float
    energy_j: float
    utilization: float
    migrations: int


@dataclass
class MetricsReport:
    records: list[ReportRecord]
    duration: float
    total_energy_j: float
    total_instructions: int
    migrations: int
    invocations: list[tuple[float, str]] = field(default_factory=list)
    actuations: list = field(default_factory=list)

    @property
    def mean_ips(self) -> float:
        return self.total_instructions / self.duration if self.duration else 0.0

    def summary(self) -> str:
        return (f"total energy: {self.total_energy_j:.6f} J\n"
                f"mean IPS: {self.mean_ips:.6e}\n"
                f"migrations: {self.migrations}")

    def for_resource(self, name: str) -> list[ReportRecord]:
        return [r for r in self.records if r.resource == name]

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(FIELDS)
        for r in self.records:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                        for v in (getattr(r, f) for f in FIELDS)])
        return out.getvalue()

    def to_jsonl(self) -> str:
        # json writes floats with repr, so the text is deterministic
        return "".join(json.dumps(asdict(r)) + "\n" for r in self.records)

    def write(self, path: str | Path, fmt: str = "csv") -> None:
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown report format {fmt!r}")
        text = self.to_csv() if fmt == "csv" else self.to_jsonl()
        Path(path).write_text(text)


class ReportBuilder:
    """Accumulates simulator samples into reporting windows."""

    def __init__(self, info: SysInfo, tick: float, period: float):
        ratio = period / tick
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidPeriod(f"report period {period} s is not a positive multiple of the tick")
        self.info = info
        self.tick = tick
        self.period_ticks = n
        self.records: list[ReportRecord] = []
        self.tick_energy: list[float] = []
        self._migr: dict[int, dict[int, int]] = {}  # window index -> core -> count
        self._data: SenseData | None = None
        self._freq_time: dict[int, float] = {}
        self._start = 0.0
        self._ticks = 0
        self._instructions = 0

    def migration(self, tick_index: int, dst_core: int) -> None:
        bucket = self._migr.setdefault(tick_index // self.period_ticks, {})
        bucket[dst_core] = bucket.get(dst_core, 0) + 1

    def add(self, sample: SenseSample, freqs: dict[int, float]) -> None:
        if self._data is None:
            self._data = SenseData(self.info.num_cores)
            self._freq_time = {d: 0.0 for d in freqs}
            self._start = sample.t_start
        self._data.add(sample)
        for d, f in freqs.items():
            self._freq_time[d] += f * sample.length
        self.tick_energy.append(math.fsum(c.power_avg * sample.length for c in sample.cores))
        self._instructions += sum(c.instructions for c in sample.cores)
        self._ticks += 1
        if self._ticks % self.period_ticks == 0:
            self._flush()

    def _flush(self) -> None:
        data, info = self._data, self.info
        if data is None:
            return
        window = (self._ticks - 1) // self.period_ticks
        migr = self._migr.get(window, {})
        length = data.length
        freq = {d: ft / length for d, ft in self._freq_time.items()}
        t = self._start

        def rec(name, f, cores):
            energy = math.fsum(data.core_energy[c] for c in cores)
            return ReportRecord(
                time=t, resource=name, frequency=f,
                ips=sum(data.core_instr[c] for c in cores) / length,
                power_w=energy / length, energy_j=energy,
                utilization=math.fsum(data.core_busy[c] for c in cores) / (length * len(cores)),
                migrations=sum(migr.get(c, 0) for c in cores))

        for c in info.cores:
            self.records.append(rec(f"core{c.id}", freq[c.domain], (c.id,)))
        for d in info.freq_domains:
            self.records.append(rec(f"domain{d.id}", freq[d.id], d.core_ids))
        self.records.append(rec("system", None, range(info.num_cores)))
        self._data = None

    def build(self, sim) -> MetricsReport:
        self._flush()  # trailing partial window, if any
        return MetricsReport(
            records=list(self.records), duration=self._ticks * self.tick,
            total_energy_j=math.fsum(self.tick_energy), total_instructions=self._instructions,
            migrations=sim.actuator.migrations, invocations=list(sim.invocation_log),
            actuations=list(sim.actuation_log))
