"""Residual reports shared by every checking routine."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


@dataclass
class ResidualReport:
    """Named residual norms for one equation system.

    ``residuals`` maps an equation label (``"dp1"``, ``"M2-3"``, ...) to a
    non-negative norm.  ``info`` carries auxiliary counts or flags that are
    not residuals (sample counts, resampling tallies, ranks).
    """

    system: str
    residuals: dict[str, float] = field(default_factory=dict)
    info: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.residuals.items():
            value = float(value)
            if not value >= 0.0:
                raise ValueError(f"residual {key!r} must be a non-negative number, got {value}")
            self.residuals[key] = value

    @property
    def max(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def __getitem__(self, label: str) -> float:
        return self.residuals[label]

    def __contains__(self, label: str) -> bool:
        return label in self.residuals

    def passed(self, tol: float) -> bool:
        return self.max < tol

    def merge(self, other: "ResidualReport", how: str = "max") -> "ResidualReport":
        """Combine two reports entry by entry (``max`` or ``sum``)."""
        out = dict(self.residuals)
        for key, value in other.residuals.items():
            if key in out:
                out[key] = max(out[key], value) if how == "max" else out[key] + value
            else:
                out[key] = value
        return ResidualReport(self.system, out, {**self.info, **other.info})

    @classmethod
    def reduce(cls, system: str, reports: Iterable["ResidualReport"]) -> "ResidualReport":
        """Entry-wise maximum over many reports; order independent."""
        out: dict[str, float] = {}
        count = 0
        for rep in reports:
            count += 1
            for key, value in rep.residuals.items():
                out[key] = max(out.get(key, 0.0), value)
        return cls(system, out, {"count": count})

    def records(self) -> list[tuple[str, float]]:
        return [(key, self.residuals[key]) for key in self.residuals]

    def to_text(self) -> str:
        """CSV-style rendering: a header row then one ``label,value`` row each."""
        lines = [f"# system,{self.system}"]
        for key, value in sorted(self.info.items()):
            lines.append(f"# {key},{value}")
        lines.append("label,residual")
        for key, value in self.records():
            lines.append(f"{key},{value:.6e}")
        lines.append(f"max,{self.max:.6e}")
        return "\n".join(lines) + "\n"


def norm(values) -> float:
    """Euclidean norm over every component of an array-like residual."""
    return float(np.linalg.norm(np.ravel(np.asarray(values, dtype=float))))


def from_components(system: str, components: Mapping[str, object], **info) -> ResidualReport:
    return ResidualReport(system, {k: norm(v) for k, v in components.items()}, dict(info))
