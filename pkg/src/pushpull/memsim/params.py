from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from ..metrics import HardwareConfig


class SimConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimParams(HardwareConfig):
    """Hardware model for the timing simulator.

    Latencies are single midpoints of the reference system's NUCA ranges
    (L2 29-61, remote L1 35-83, memory 197-261 cycles); override them to
    explore the range.
    """

    cache_line_bytes: int = 64
    l1_ways: int = 8
    l1_mshrs: int = 128
    store_buffer_entries: int = 128
    max_resident_blocks_per_sm: int = 8
    latency_l1_hit: int = 1
    latency_l2_hit: int = 45
    latency_remote_l1: int = 59
    latency_memory: int = 229
    compute_cycles_per_abstract_op: int = 1
    l1_banks: int = 8
    l2_ways: int = 16
    l2_banks: int = 16
    # cycles an L2 bank's atomic unit is held per lane operation (read + write of the data array)
    l2_atomic_cycles: int = 2
    # fault injection for coherence litmus tests; never disable for real runs
    acquire_invalidate: bool = True

    def __post_init__(self):
        try:
            super().__post_init__()
        except ValueError as exc:
            raise SimConfigError(str(exc)) from None
        for f in fields(SimParams):
            if f.name == "acquire_invalidate":
                continue
            if getattr(self, f.name) <= 0:
                raise SimConfigError(f"{f.name} must be positive, got {getattr(self, f.name)}")
        if not self.latency_l1_hit < self.latency_l2_hit < self.latency_memory:
            raise SimConfigError("latencies must satisfy l1_hit < l2_hit < memory")
        if self.cache_line_bytes % self.element_bytes:
            raise SimConfigError("cache_line_bytes must be a multiple of element_bytes")
        if self.l1_bytes % (self.cache_line_bytes * self.l1_ways):
            raise SimConfigError("l1_bytes must divide into l1_ways-way sets of cache lines")
        if self.l2_bytes % (self.cache_line_bytes * self.l2_ways):
            raise SimConfigError("l2_bytes must divide into l2_ways-way sets of cache lines")

    @property
    def l1_sets(self) -> int:
        return self.l1_bytes // (self.cache_line_bytes * self.l1_ways)

    @property
    def l2_sets(self) -> int:
        return self.l2_bytes // (self.cache_line_bytes * self.l2_ways)

    def hardware(self) -> HardwareConfig:
        return HardwareConfig(**{f.name: getattr(self, f.name) for f in fields(HardwareConfig)})

    def to_dict(self) -> dict:
        return asdict(self)
