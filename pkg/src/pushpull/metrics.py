"""Static graph-structure metrics: volume, reuse and imbalance.

Vertices map 1:1 onto GPU threads in id order, so "thread block" below means
a run of ``tb_size`` consecutive vertex ids and "warp" a run of ``warp_size``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, fields

import numpy as np

from . import _metric_kernels as _k
from .graph import CsrGraph, DegreeStats, degree_stats


class Level(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return ("Low", "Medium", "High")[self]

    @property
    def short(self) -> str:
        return "LMH"[self]

    @classmethod
    def parse(cls, text: str) -> "Level":
        t = text.strip().lower()
        for lvl in cls:
            if t in (lvl.label.lower(), lvl.short.lower(), lvl.name.lower()):
                return lvl
        raise ValueError(f"unknown level {text!r}")


@dataclass(frozen=True)
class HardwareConfig:
    num_sms: int = 15
    warp_size: int = 32
    tb_size: int = 256
    l1_bytes: int = 32 * 1024
    l2_bytes: int = 4 * 1024 * 1024
    element_bytes: int = 4

    def __post_init__(self):
        for f in fields(HardwareConfig):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")
        if self.tb_size % self.warp_size:
            raise ValueError("tb_size must be a multiple of warp_size")


@dataclass(frozen=True)
class Thresholds:
    vol_low_l1_factor: float = 1.5
    reuse_low: float = 0.15
    reuse_high: float = 0.40
    imb_low: float = 0.05
    imb_high: float = 0.25
    kmeans_delta: float = 10.0
    kmeans_max_iters: int = 100

    def __post_init__(self):
        for f in fields(Thresholds):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")
        if not self.reuse_low < self.reuse_high:
            raise ValueError("reuse_low must be below reuse_high")
        if not self.imb_low < self.imb_high:
            raise ValueError("imb_low must be below imb_high")


PROFILE_FIELDS = (
    "volume_kb", "volume_class", "an_l", "an_r", "reuse", "reuse_class",
    "imbalance", "imbalance_class", "max_degree", "avg_degree", "stddev_degree",
)


@dataclass(frozen=True)
class GraphProfile:
    volume_kb: float
    volume_class: Level
    an_l: float
    an_r: float
    reuse: float
    reuse_class: Level
    imbalance: float
    imbalance_class: Level
    degrees: DegreeStats

    @classmethod
    def from_values(cls, volume_kb, an_l, an_r, imbalance, degrees: DegreeStats,
                    hw: HardwareConfig | None = None, t: Thresholds | None = None) -> "GraphProfile":
        """Classify already-measured raw metrics (reuse is derived from the neighbor counts)."""
        hw = hw or HardwareConfig()
        t = t or Thresholds()
        r = reuse(an_l, an_r, degrees.avg_degree)
        return cls(
            volume_kb, classify_volume(volume_kb, hw, t), an_l, an_r, r, classify_reuse(r, t),
            imbalance, classify_imbalance(imbalance, t), degrees,
        )

    @property
    def classes(self) -> tuple[Level, Level, Level]:
        return self.volume_class, self.reuse_class, self.imbalance_class

    def to_dict(self) -> dict:
        return {
            "volume_kb": self.volume_kb,
            "volume_class": self.volume_class.label,
            "an_l": self.an_l,
            "an_r": self.an_r,
            "reuse": self.reuse,
            "reuse_class": self.reuse_class.label,
            "imbalance": self.imbalance,
            "imbalance_class": self.imbalance_class.label,
            "max_degree": self.degrees.max_degree,
            "avg_degree": self.degrees.avg_degree,
            "stddev_degree": self.degrees.stddev_degree,
        }

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=PROFILE_FIELDS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(self.to_dict())
        return buf.getvalue()


def volume_kb(g: CsrGraph, hw: HardwareConfig = HardwareConfig()) -> float:
    """Per-SM share of the graph's elements, in kilobytes."""
    return (g.num_vertices + g.num_edges) / hw.num_sms * hw.element_bytes / 1024


def classify_volume(v: float, hw: HardwareConfig = HardwareConfig(), t: Thresholds = Thresholds()) -> Level:
    if v < t.vol_low_l1_factor * hw.l1_bytes / 1024:
        return Level.LOW
    if v > (hw.l2_bytes / 1024) / hw.num_sms:
        return Level.HIGH
    return Level.MEDIUM


def neighbor_locality(g: CsrGraph, hw: HardwareConfig = HardwareConfig()) -> tuple[float, float]:
    """Average number of same-block (local) and cross-block (remote) neighbors."""
    if g.num_vertices == 0:
        raise ValueError("neighbor locality is undefined for an empty graph")
    local, remote = _k.locality_counts(g.out_offsets, g.out_targets, hw.tb_size)
    return local / g.num_vertices, remote / g.num_vertices


def reuse(an_l: float, an_r: float, avg_degree: float) -> float:
    if avg_degree <= 0:
        return 0.0
    r = 0.5 * (1.0 + (an_l - an_r) / avg_degree)
    return min(1.0, max(0.0, r))


def classify_reuse(r: float, t: Thresholds = Thresholds()) -> Level:
    if r < t.reuse_low:
        return Level.LOW
    if r > t.reuse_high:
        return Level.HIGH
    return Level.MEDIUM


def warp_max_degrees(g: CsrGraph, hw: HardwareConfig = HardwareConfig()) -> list[list[int]]:
    """Per thread block, the max out-degree handled by each of its warps."""
    wmax = _k.warp_maxima(g.out_degrees(), hw.warp_size)
    wpb = hw.tb_size // hw.warp_size
    return [wmax[i:i + wpb].tolist() for i in range(0, len(wmax), wpb)]


def kmeans2(values, max_iters: int = 100) -> tuple[float, float]:
    """1-D Lloyd's k-means with two clusters seeded at (min, max); ties go low."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("kmeans2 needs at least one value")
    return _k.kmeans2_loop(x, max_iters) if _k.USE_NUMBA else _k.kmeans2_numpy(x, max_iters)


def imbalance(g: CsrGraph, hw: HardwareConfig = HardwareConfig(), t: Thresholds = Thresholds()) -> float:
    """Fraction of thread blocks whose warp max-degree clusters sit more than ``kmeans_delta`` apart."""
    if g.num_vertices == 0:
        raise ValueError("imbalance is undefined for an empty graph")
    marked, nblocks = _k.imbalance_marks(
        g.out_degrees(), hw.warp_size, hw.tb_size, float(t.kmeans_delta), int(t.kmeans_max_iters)
    )
    assert nblocks == math.ceil(g.num_vertices / hw.tb_size)
    return marked / nblocks


def classify_imbalance(i: float, t: Thresholds = Thresholds()) -> Level:
    if i < t.imb_low:
        return Level.LOW
    if i > t.imb_high:
        return Level.HIGH
    return Level.MEDIUM


def profile(g: CsrGraph, hw: HardwareConfig = HardwareConfig(), t: Thresholds = Thresholds()) -> GraphProfile:
    deg = degree_stats(g)
    an_l, an_r = neighbor_locality(g, hw)
    return GraphProfile.from_values(volume_kb(g, hw), an_l, an_r, imbalance(g, hw, t), deg, hw, t)
