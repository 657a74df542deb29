"""Verification reports and their JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

SCHEMA_VERSION = 1


class IoError(OSError):
    """A report could not be written."""


@dataclass
class IdentityRecord:
    identity: str
    chart: str
    samples: int
    max_abs_error: float
    max_error: float
    tolerance: float
    tolerance_kind: str  # "absolute" or "scaled"
    passed: bool
    note: str = ""


@dataclass
class VerificationReport:
    suite: str
    charts: list[str]
    corpus_seed: Optional[int]
    derivative_mode: str
    fd_step: Optional[float] = None
    fd_scheme: Optional[str] = None
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    records: list[IdentityRecord] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[IdentityRecord]:
        return [r for r in self.records if not r.passed]

    def record(self, identity: str, chart: str) -> IdentityRecord:
        for r in self.records:
            if r.identity == identity and r.chart == chart:
                return r
        raise KeyError((identity, chart))

    def merge(self, other: "VerificationReport", suite: Optional[str] = None) -> "VerificationReport":
        charts = list(dict.fromkeys(self.charts + other.charts))
        diagnostics = dict(self.diagnostics)
        for key, value in other.diagnostics.items():
            if key in diagnostics and isinstance(diagnostics[key], dict) and isinstance(value, dict):
                diagnostics[key] = {**diagnostics[key], **value}
            else:
                diagnostics[key] = value
        return VerificationReport(
            suite=suite or self.suite,
            charts=charts,
            corpus_seed=self.corpus_seed,
            derivative_mode=self.derivative_mode,
            fd_step=self.fd_step,
            fd_scheme=self.fd_scheme,
            timestamp=self.timestamp,
            records=self.records + other.records,
            diagnostics=diagnostics,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        d.pop("pass", None)
        d["records"] = [IdentityRecord(**_restore(r)) for r in d.get("records", [])]
        return cls(**d)

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))


def _restore(r: dict) -> dict:
    r = dict(r)
    for key in ("max_abs_error", "max_error"):
        value = r.get(key)
        r[key] = math.nan if value is None else float(value)
    return r


def _number(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)) and not isinstance(obj, float):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(report: VerificationReport, path: Union[str, Path]) -> None:
    """Write ``report`` as JSON to ``path``."""
    try:
        Path(path).write_text(report.to_json(), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def load_report(path: Union[str, Path]) -> VerificationReport:
    return VerificationReport.from_json(Path(path).read_text(encoding="utf-8"))


def report_schema() -> dict:
    return json.loads(resources.files("quatcurv.schemas").joinpath("report.schema.json").read_text("utf-8"))
