"""Algorithm property registry and the specialization decision trees.

Both trees look only at the Low/Medium/High classes of a profile, never at
raw metric values.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources
from os import PathLike

from .metrics import GraphProfile, Level


class Traversal(enum.Enum):
    STATIC = "Static"
    DYNAMIC = "Dynamic"


class Side(enum.Enum):
    SOURCE = "Source"
    TARGET = "Target"
    SYMMETRIC = "Symmetric"
    NOT_APPLICABLE = "NotApplicable"


class Direction(enum.Enum):
    PULL = "Pull"
    PUSH = "Push"
    DYNAMIC = "Dynamic"


class Coherence(enum.Enum):
    GPU = "Gpu"
    DENOVO = "DeNovo"


class Consistency(enum.Enum):
    DRF0 = "Drf0"
    DRF1 = "Drf1"
    DRFRLX = "Drfrlx"


_DIR_CHAR = {Direction.PULL: "T", Direction.PUSH: "S", Direction.DYNAMIC: "D"}
_COH_CHAR = {Coherence.GPU: "G", Coherence.DENOVO: "D"}
_CON_CHAR = {Consistency.DRF0: "0", Consistency.DRF1: "1", Consistency.DRFRLX: "R"}


class InvalidPropsError(ValueError):
    pass


class ConfigCodeError(ValueError):
    pass


@dataclass(frozen=True)
class AlgoProps:
    traversal: Traversal
    control: Side
    information: Side

    def __post_init__(self):
        if self.traversal is Traversal.DYNAMIC and (
            self.control is not Side.NOT_APPLICABLE or self.information is not Side.NOT_APPLICABLE
        ):
            raise InvalidPropsError("dynamic traversal leaves control and information not applicable")


@dataclass(frozen=True)
class SystemConfig:
    direction: Direction
    coherence: Coherence
    consistency: Consistency

    def code(self) -> str:
        return _DIR_CHAR[self.direction] + _COH_CHAR[self.coherence] + _CON_CHAR[self.consistency]

    def __str__(self):
        return self.code()

    def to_dict(self) -> dict:
        return {
            "code": self.code(),
            "direction": self.direction.value,
            "coherence": self.coherence.value,
            "consistency": self.consistency.value,
        }


@dataclass(frozen=True)
class DesignSpace:
    allow_drfrlx: bool = True


def config_code(c: SystemConfig) -> str:
    return c.code()


def parse_config(code: str) -> SystemConfig:
    code = code.strip().upper()
    if len(code) != 3:
        raise ConfigCodeError(f"configuration code must have 3 characters, got {code!r}")
    try:
        d = next(k for k, v in _DIR_CHAR.items() if v == code[0])
        c = next(k for k, v in _COH_CHAR.items() if v == code[1])
        m = next(k for k, v in _CON_CHAR.items() if v == code[2])
    except StopIteration:
        raise ConfigCodeError(
            f"bad configuration code {code!r}: expected [TSD][GD][01R]"
        ) from None
    return SystemConfig(d, c, m)


ALL_CONFIGS = tuple(
    SystemConfig(d, c, m) for d in Direction for c in Coherence for m in Consistency
)


# -- registry -----------------------------------------------------------------

def load_registry(path: str | PathLike | None = None) -> dict[str, AlgoProps]:
    """Read algorithm records (id, traversal, control, information) from JSON."""
    if path is None:
        text = resources.files("pushpull").joinpath("data/algorithms.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    reg = {}
    for rec in json.loads(text):
        reg[rec["id"].upper()] = AlgoProps(
            Traversal(rec["traversal"]), Side(rec["control"]), Side(rec["information"])
        )
    return reg


_DEFAULT_REGISTRY: dict[str, AlgoProps] | None = None


def default_registry() -> dict[str, AlgoProps]:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = load_registry()
    return _DEFAULT_REGISTRY


def algo_properties(algo: str, registry: dict[str, AlgoProps] | None = None) -> AlgoProps:
    reg = registry if registry is not None else default_registry()
    try:
        return reg[algo.upper()]
    except KeyError:
        raise KeyError(f"unknown algorithm {algo!r}; valid ids: {','.join(reg)}") from None


# -- decision trees -------------------------------------------------------------

_DYNAMIC_CFG = SystemConfig(Direction.DYNAMIC, Coherence.DENOVO, Consistency.DRF1)
_PULL_CFG = SystemConfig(Direction.PULL, Coherence.GPU, Consistency.DRF0)


def _check_static(p: AlgoProps):
    if Side.NOT_APPLICABLE in (p.control, p.information):
        raise InvalidPropsError("static traversal needs applicable control and information properties")


def _push_coherence(prof: GraphProfile, why: list[str]) -> Coherence:
    if prof.reuse_class <= Level.MEDIUM:
        why.append(f"coherence GPU: {prof.reuse_class.label.lower()} reuse")
        return Coherence.GPU
    if prof.volume_class is Level.HIGH:
        why.append("coherence GPU: high volume")
        return Coherence.GPU
    why.append("coherence DeNovo: high reuse without high volume")
    return Coherence.DENOVO


def explain_full(p: AlgoProps, prof: GraphProfile) -> tuple[SystemConfig, list[str]]:
    """Full design space prediction plus the ordered list of rules that fired."""
    why: list[str] = []
    if p.traversal is Traversal.DYNAMIC:
        why.append("dynamic traversal: push+pull with DeNovo and DRF1")
        return _DYNAMIC_CFG, why
    _check_static(p)

    if p.control is Side.SOURCE:
        why.append("push: control elides work at source")
    elif p.information is Side.SOURCE:
        why.append("push: information hoisted at source")
    elif prof.reuse_class <= Level.MEDIUM:
        why.append(f"push: {prof.reuse_class.label.lower()} reuse")
    elif prof.imbalance_class >= Level.MEDIUM:
        why.append(f"push: {prof.imbalance_class.label.lower()} imbalance")
    elif prof.volume_class is Level.HIGH:
        why.append("push: high volume")
    else:
        why.append("pull: high reuse, low imbalance, volume below high")
        return _PULL_CFG, why

    coherence = _push_coherence(prof, why)
    if prof.imbalance_class is Level.HIGH:
        why.append("consistency DRFrlx: high imbalance")
        consistency = Consistency.DRFRLX
    elif prof.volume_class >= Level.MEDIUM:
        why.append(f"consistency DRFrlx: {prof.volume_class.label.lower()} volume")
        consistency = Consistency.DRFRLX
    else:
        why.append("consistency DRF1: no imbalance or volume pressure")
        consistency = Consistency.DRF1
    return SystemConfig(Direction.PUSH, coherence, consistency), why


def explain_partial(p: AlgoProps, prof: GraphProfile, space: DesignSpace = DesignSpace()) -> tuple[SystemConfig, list[str]]:
    """Prediction for a design space that may lack DRFrlx."""
    if space.allow_drfrlx:
        return explain_full(p, prof)
    why: list[str] = []
    if p.traversal is Traversal.DYNAMIC:
        why.append("dynamic traversal: push+pull with DeNovo and DRF1")
        return _DYNAMIC_CFG, why
    _check_static(p)

    if p.control is Side.SOURCE:
        why.append("push: control elides work at source")
        push = True
    elif p.information is Side.SOURCE:
        if prof.reuse_class <= Level.MEDIUM:
            why.append(f"push: information at source with {prof.reuse_class.label.lower()} reuse")
            push = True
        elif prof.imbalance_class >= Level.MEDIUM:
            why.append(f"push: information at source with {prof.imbalance_class.label.lower()} imbalance")
            push = True
        elif prof.volume_class >= Level.MEDIUM:
            why.append(f"push: information at source with {prof.volume_class.label.lower()} volume")
            push = True
        else:
            push = False
    elif prof.reuse_class <= Level.MEDIUM:
        why.append(f"push: {prof.reuse_class.label.lower()} reuse")
        push = True
    elif prof.volume_class is Level.HIGH:
        why.append("push: high volume")
        push = True
    else:
        push = False

    if not push:
        why.append("pull: push criteria unmet without relaxed atomics")
        return _PULL_CFG, why
    coherence = _push_coherence(prof, why)
    why.append("consistency DRF1: DRFrlx unavailable")
    return SystemConfig(Direction.PUSH, coherence, Consistency.DRF1), why


def predict_full(p: AlgoProps, prof: GraphProfile) -> SystemConfig:
    return explain_full(p, prof)[0]


def predict_partial(p: AlgoProps, prof: GraphProfile, space: DesignSpace = DesignSpace()) -> SystemConfig:
    return explain_partial(p, prof, space)[0]


def predict(algo: str, prof: GraphProfile, allow_drfrlx: bool = True,
            registry: dict[str, AlgoProps] | None = None, graph: str = "") -> dict:
    """JSON-ready prediction record for one (graph, algorithm) workload."""
    props = algo_properties(algo, registry)
    cfg, why = explain_partial(props, prof, DesignSpace(allow_drfrlx))
    return {"graph": graph, "algorithm": algo.upper(), **cfg.to_dict(), "rationale": why}


def predict_table(profiles: dict[str, GraphProfile], algos,
                  registry: dict[str, AlgoProps] | None = None) -> dict[str, dict[str, str]]:
    """Codes indexed ``[graph][algo]`` using the full design space."""
    algos = list(algos)
    return {
        name: {a: predict_full(algo_properties(a, registry), prof).code() for a in algos}
        for name, prof in profiles.items()
    }
