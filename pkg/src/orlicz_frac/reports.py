"""Structured pass/fail records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def _plain(value):
    # numpy scalars and tuples -> JSON-native values
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one sampled inequality or property check.

    ``achieved_constant`` is the smallest constant that makes the sampled
    inequality hold; ``bound`` is the constant the check was asserted with.
    ``worst_sample`` is the input at which the two are closest (or most
    violated).
    """

    name: str
    passed: bool
    worst_sample: tuple = ()
    achieved_constant: float = float("nan")
    notes: str = ""
    bound: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "worst_sample": _plain(tuple(self.worst_sample)),
            "achieved_constant": _plain(float(self.achieved_constant)),
            "bound": None if self.bound is None else _plain(float(self.bound)),
            "notes": self.notes,
            "extra": {k: _plain(v) for k, v in sorted(self.extra.items())},
        }
