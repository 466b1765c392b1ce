from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from ..kernels import result_to_json

STALL_CLASSES = ("busy", "comp", "data", "sync", "idle")
COUNTERS = (
    "l1_hits", "l1_misses", "l2_hits", "l2_misses", "atomics_at_l1", "atomics_at_l2",
    "lines_self_invalidated", "dirty_flushes", "ownership_registrations", "remote_l1_transfers",
    "stale_reads",
)
BREAKDOWN_HEADER = ("config", "total_cycles") + STALL_CLASSES


@dataclass
class SimReport:
    config: str
    algorithm: str
    total_cycles: int
    per_sm: np.ndarray  # shape (num_sms, 5): busy, comp, data, sync, idle
    counters: dict
    kernel_launches: int
    iterations: int
    functional_result: np.ndarray
    launch_cycles: list = field(default_factory=list)

    @property
    def breakdown(self) -> dict:
        sums = self.per_sm.sum(axis=0)
        return {name: int(x) for name, x in zip(STALL_CLASSES, sums)}

    def __getattr__(self, name):
        # expose counters and stall sums as attributes (report.l1_hits, report.sync, ...)
        if name in COUNTERS:
            return self.counters[name]
        if name in STALL_CLASSES:
            return self.breakdown[name]
        raise AttributeError(name)

    def conserved(self) -> bool:
        return bool(np.all(self.per_sm.sum(axis=1) == self.total_cycles))

    def to_dict(self) -> dict:
        d = {"config": self.config, "algorithm": self.algorithm, "total_cycles": int(self.total_cycles)}
        d.update(self.breakdown)
        d.update({k: int(self.counters[k]) for k in COUNTERS})
        d["kernel_launches"] = int(self.kernel_launches)
        d["iterations"] = int(self.iterations)
        d["per_sm"] = [dict(zip(STALL_CLASSES, map(int, row))) for row in self.per_sm]
        d["functional_result"] = result_to_json(self.functional_result)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def breakdown_row(self) -> dict:
        return {"config": self.config, "total_cycles": int(self.total_cycles), **self.breakdown}

    def identical(self, other: "SimReport") -> bool:
        """Bit-level equality, including the functional result."""
        return (
            self.to_dict() == other.to_dict()
            and self.functional_result.tobytes() == other.functional_result.tobytes()
        )


def breakdown_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BREAKDOWN_HEADER, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.breakdown_row())
    return buf.getvalue()
