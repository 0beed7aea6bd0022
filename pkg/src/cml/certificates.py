"""JSON-serialisable certificates recording a construction run and its checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from . import __version__
from .poly_core import DEFAULT_TOL, TolerancePolicy


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    measured: Optional[float] = None

    def to_json(self) -> dict:
        m = self.measured
        if m is not None:
            m = float(m)
            if not math.isfinite(m):
                # JSON has no inf/nan; keep the information in the detail string
                self.detail = f"{self.detail} (measured={m})".strip()
                m = None
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail, "measured": m}

    @classmethod
    def from_json(cls, d: dict) -> "Check":
        return cls(d["name"], bool(d["passed"]), d.get("detail", ""), d.get("measured"))


@dataclass
class Certificate:
    construction: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    tolerances: TolerancePolicy = DEFAULT_TOL
    seed: Optional[int] = None
    version: str = __version__
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str = "", measured: Optional[float] = None) -> bool:
        self.checks.append(Check(name, bool(passed), detail, measured))
        return bool(passed)

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self, include_timing: bool = True) -> dict:
        d: dict[str, Any] = {
            "construction": self.construction,
            "passed": self.passed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": [c.to_json() for c in self.checks],
            "tolerances": self.tolerances.to_json(),
            "seed": self.seed,
            "version": self.version,
        }
        if include_timing:
            d["timing"] = self.timing
        return d

    def dumps(self, include_timing: bool = True, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_json(include_timing), indent=indent, sort_keys=True, allow_nan=False)

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        cert = cls(
            construction=d["construction"],
            inputs=d.get("inputs", {}),
            outputs=d.get("outputs", {}),
            checks=[Check.from_json(c) for c in d.get("checks", [])],
            tolerances=TolerancePolicy.from_json(d["tolerances"]) if "tolerances" in d else DEFAULT_TOL,
            seed=d.get("seed"),
            version=d.get("version", __version__),
            timing=d.get("timing", {}),
        )
        if "passed" in d and bool(d["passed"]) != cert.passed:
            raise ValueError("certificate 'passed' flag disagrees with its checks")
        return cert

    @classmethod
    def loads(cls, s: str) -> "Certificate":
        return cls.from_json(json.loads(s))


def strip_timing(payload: str) -> str:
    """Drop every "timing" entry from a certificate JSON document (for determinism checks)."""

    def scrub(obj):
        if isinstance(obj, dict):
            return {k: scrub(v) for k, v in obj.items() if k != "timing"}
        if isinstance(obj, list):
            return [scrub(v) for v in obj]
        return obj

    return json.dumps(scrub(json.loads(payload)), indent=2, sort_keys=True)
