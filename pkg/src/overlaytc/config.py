"""Experiment configuration: a flat ``dotted.key = value`` text format.

Example::

    # Rayleigh baseline, single-channel ad hoc network
    params.lambda_a = 4.68e-5
    params.num_subchannels = 1
    receiver.kind = ad_hoc
    trials = 200000
    master_seed = 7
    sweep.variable = lambda_a
    sweep.values = 1e-5, 2e-5, 4e-5
    output.format = csv

``sweep.values`` also accepts an inclusive integer range ``1..16``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import InvalidParameterError
from .scenario import Overlay, Receiver, ReceiverKind, SystemParams

__all__ = ["ExperimentConfig", "parse_config_text", "read_config_file", "build_config"]

PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SystemParams)}
_INT_PARAMS = {"num_subchannels", "num_cellular_subchannels", "diversity_adhoc", "diversity_cellular"}
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams = field(default_factory=SystemParams)
    receiver: ReceiverKind = field(default_factory=lambda: ReceiverKind(Receiver.AD_HOC))
    trials: int = 200_000
    master_seed: int = 0
    sweep_variable: str | None = None
    sweep_values: tuple = ()
    output_path: str | None = None
    output_format: str = "csv"
    tolerance: float = 0.10
    diversity_offset: int = 2
    threads: int | None = None

    def __post_init__(self):
        if self.sweep_variable is not None and self.sweep_variable not in PARAM_FIELDS:
            raise InvalidParameterError(
                f"sweep.variable must name a system parameter, got {self.sweep_variable!r}"
            )
        if self.output_format not in FORMATS:
            raise InvalidParameterError(f"output.format must be one of {FORMATS}")
        if self.trials < 1:
            raise InvalidParameterError("trials must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameterError("master_seed must be an unsigned 64-bit integer")
        if self.tolerance <= 0:
            raise InvalidParameterError("tolerance must be positive")

    def sweep_points(self, default_variable: str | None = None, default_values: Iterable = ()):
        """Yield ``(value, params)`` per sweep point, or one point without a sweep."""
        var = self.sweep_variable or default_variable
        values = self.sweep_values if self.sweep_variable else tuple(default_values)
        if var is None or not values:
            yield None, self.params
            return
        for v in values:
            yield v, self.params.replace(**{var: v})

    def resolved(self) -> dict[str, Any]:
        """Every setting as ``dotted key -> value``, for output headers."""
        out: dict[str, Any] = {}
        for name in PARAM_FIELDS:
            v = getattr(self.params, name)
            out[f"params.{name}"] = v.value if isinstance(v, Overlay) else v
        out["receiver.kind"] = self.receiver.kind.value
        out["receiver.in_cellular_set"] = (
            "auto" if self.receiver.in_cellular_set is None else self.receiver.in_cellular_set
        )
        out["trials"] = self.trials
        out["master_seed"] = self.master_seed
        out["sweep.variable"] = self.sweep_variable or ""
        out["sweep.values"] = ", ".join(_fmt(v) for v in self.sweep_values)
        out["output.format"] = self.output_format
        out["tolerance"] = self.tolerance
        out["diversity.offset"] = self.diversity_offset
        return out


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def parse_config_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidParameterError(f"config line {lineno}: empty key")
        raw[key] = value
    return raw


def read_config_file(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def _bool(text: str) -> bool | None:
    t = text.strip().lower()
    if t in {"true", "yes", "1"}:
        return True
    if t in {"false", "no", "0"}:
        return False
    if t in {"auto", "none", ""}:
        return None
    raise InvalidParameterError(f"not a boolean: {text!r}")


def _param_value(name: str, text: str):
    if name == "overlay":
        try:
            return Overlay(text.strip().lower())
        except ValueError as exc:
            raise InvalidParameterError(f"overlay must be 'blind' or 'exclusion', got {text!r}") from exc
    try:
        if name in _INT_PARAMS:
            return int(text)
        return float(text)
    except ValueError as exc:
        raise InvalidParameterError(f"params.{name}: cannot parse {text!r}") from exc


def _sweep_values(variable: str, text: str) -> tuple:
    text = text.strip()
    if ".." in text and "," not in text:
        lo, hi = (int(s) for s in text.split(".."))
        return tuple(range(lo, hi + 1))
    return tuple(_param_value(variable, s) for s in text.split(",") if s.strip())


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise InvalidParameterError(f"{key}: expected an integer, got {text!r}") from exc


def _float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidParameterError(f"{key}: expected a number, got {text!r}") from exc


def build_config(raw: Mapping[str, str]) -> ExperimentConfig:
    """Turn parsed ``key -> text`` pairs into a validated :class:`ExperimentConfig`."""
    params_kw: dict[str, Any] = {}
    kw: dict[str, Any] = {}
    kind = Receiver.AD_HOC
    in_set: bool | None = None
    sweep_var = raw.get("sweep.variable", "").strip() or None
    for key, text in raw.items():
        if key.startswith("params."):
            name = key[len("params."):]
            if name not in PARAM_FIELDS:
                raise InvalidParameterError(f"unknown parameter {key!r}")
            params_kw[name] = _param_value(name, text)
        elif key == "receiver.kind":
            try:
                kind = Receiver(text.strip().lower())
            except ValueError as exc:
                raise InvalidParameterError(
                    f"receiver.kind must be 'base_station' or 'ad_hoc', got {text!r}"
                ) from exc
        elif key == "receiver.in_cellular_set":
            in_set = _bool(text)
        elif key == "trials":
            kw["trials"] = _int(key, text)
        elif key in ("master_seed", "seed"):
            kw["master_seed"] = _int(key, text)
        elif key == "threads":
            kw["threads"] = _int(key, text)
        elif key == "sweep.variable":
            kw["sweep_variable"] = sweep_var
        elif key == "sweep.values":
            if sweep_var is None:
                raise InvalidParameterError("sweep.values given without sweep.variable")
            if sweep_var not in PARAM_FIELDS:
                raise InvalidParameterError(f"sweep.variable must name a system parameter, got {sweep_var!r}")
            kw["sweep_values"] = _sweep_values(sweep_var, text)
        elif key == "output.path":
            kw["output_path"] = text or None
        elif key == "output.format":
            kw["output_format"] = text.strip().lower()
        elif key == "tolerance":
            kw["tolerance"] = _float(key, text)
        elif key == "diversity.offset":
            kw["diversity_offset"] = _int(key, text)
        else:
            raise InvalidParameterError(f"unknown config key {key!r}")
    return ExperimentConfig(
        params=SystemParams(**params_kw),
        receiver=ReceiverKind(kind, in_set),
        **kw,
    )
