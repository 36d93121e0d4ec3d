"""Report records emitted by the command-line tool.

Every report renders as ``key: value`` text or as JSON. Floats are written
with 17 significant digits (text) or Python's shortest round-trip repr
(JSON), so ``parse(render(report)) == report`` holds exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .gnd import GndParams
from .loss import LossParams
from .optimizer import Correction


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


class _Report:
    """Mixin: text/JSON rendering and parsing for flat dataclasses."""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, (list, tuple)):
                lines.extend(f"{f.name}: {item}" for item in value)
            else:
                lines.append(f"{f.name}: {_fmt(value)}")
        return "\n".join(lines) + "\n"

    def render(self, as_json: bool) -> str:
        return self.to_json() if as_json else self.to_text()

    @classmethod
    def from_dict(cls, data: dict):
        kwargs = {}
        for f in fields(cls):
            value = data[f.name]
            kwargs[f.name] = list(value) if f.type in ("list[str]", list) else value
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_text(cls, text: str):
        types = {f.name: f.type for f in fields(cls)}
        data = {name: [] for name, t in types.items() if t == "list[str]"}
        for line in text.splitlines():
            if not line:
                continue
            key, _, raw = line.partition(": ")
            if key not in types:
                raise ValueError(f"unknown report field {key!r}")
            t = types[key]
            if t == "list[str]":
                data[key].append(raw)
            elif t == "int":
                data[key] = int(raw)
            elif t == "bool":
                data[key] = raw == "True"
            elif t == "str":
                data[key] = raw
            else:
                data[key] = float(raw)
        return cls(**data)


@dataclass(frozen=True)
class CorrectionReport(_Report):
    a: float
    b: float
    k1: float
    k2: float
    C: float
    x_star: float
    expected_loss_at_0: float
    expected_loss_at_C: float
    variance_at_0: float
    variance_at_C: float
    reduction_ratio: float
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def build(cls, p: GndParams, k: LossParams, corr: Correction, extra_warnings=()) -> CorrectionReport:
        return cls(
            a=p.a,
            b=p.b,
            k1=k.k1,
            k2=k.k2,
            C=corr.C,
            x_star=corr.x_star,
            expected_loss_at_0=corr.expected_loss_at_0,
            expected_loss_at_C=corr.expected_loss_at_C,
            variance_at_0=corr.variance_at_0,
            variance_at_C=corr.variance_at_C,
            reduction_ratio=corr.reduction_ratio,
            warnings=list(extra_warnings) + list(corr.warnings),
        )


@dataclass(frozen=True)
class FitReport(_Report):
    a: float
    b: float
    n: int
    mean: float
    mean_abs: float
    second_moment: float
    moment_ratio: float
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SimulationReport(_Report):
    a: float
    b: float
    k1: float
    k2: float
    c: float
    n: int
    seed: int
    closed_form_mean: float
    closed_form_variance: float
    mc_mean: float
    mc_variance: float
    mean_stderr: float
    variance_stderr: float
    mean_z: float
    variance_z: float
    flags: list[str] = field(default_factory=list)
