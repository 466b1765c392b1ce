"""Plain-text ``key = value`` configuration files.

One file may hold hardware, threshold and simulator keys together; each
loader picks the keys it knows and rejects anything unknown to it and to the
other loaders, so typos fail loudly. ``#`` and ``;`` start comments.
"""

from __future__ import annotations

import configparser
from dataclasses import fields
from os import PathLike

from .memsim.params import SimParams
from .metrics import HardwareConfig, Thresholds


class ConfigFileError(ValueError):
    pass


_KNOWN = {f.name for cls in (HardwareConfig, Thresholds, SimParams) for f in fields(cls)}


def read_pairs(path: str | PathLike) -> dict[str, str]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigFileError(f"cannot open {path}: {exc.strerror}") from None
    try:
        parser.read_string("[top]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigFileError(f"{path}: {exc}") from None
    pairs = dict(parser["top"])
    unknown = sorted(set(pairs) - _KNOWN)
    if unknown:
        raise ConfigFileError(f"{path}: unknown keys: {', '.join(unknown)}")
    return pairs


def _convert(cls, pairs: dict[str, str], path) -> dict:
    out = {}
    for f in fields(cls):
        if f.name not in pairs:
            continue
        raw = pairs[f.name]
        try:
            if f.type in ("bool", bool):
                low = raw.strip().lower()
                if low not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(raw)
                out[f.name] = low in ("true", "1", "yes")
            elif f.type in ("int", int):
                out[f.name] = int(raw)
            else:
                out[f.name] = float(raw)
        except ValueError:
            raise ConfigFileError(f"{path}: {f.name} has invalid value {raw!r}") from None
    return out


def _build(cls, path):
    if path is None:
        return cls()
    kw = _convert(cls, read_pairs(path), path)
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigFileError(f"{path}: {exc}") from None


def load_hardware(path: str | PathLike | None = None) -> HardwareConfig:
    return _build(HardwareConfig, path)


def load_thresholds(path: str | PathLike | None = None) -> Thresholds:
    return _build(Thresholds, path)


def load_sim_params(path: str | PathLike | None = None, hw_path: str | PathLike | None = None) -> SimParams:
    """Simulator parameters; hardware keys from ``hw_path`` apply first, ``path`` overrides."""
    kw = {}
    for p in (hw_path, path):
        if p is not None:
            kw.update(_convert(SimParams, read_pairs(p), p))
    try:
        return SimParams(**kw)
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from None
