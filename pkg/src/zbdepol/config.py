"""Run configuration documents and the built-in figure presets."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np


@dataclass
class RunConfig:
    model: dict = field(default_factory=lambda: {"kind": "gaussian", "d": [1.0, 1.0, 1.0]})
    t_min: float = 0.0
    t_max: float = 5.0
    points: int = 51
    # one of {"bloch": [ax, ay, az]}, {"amps": [a, b, c, d]}, {"m": [m1, m2, ...]}
    state: dict = field(default_factory=lambda: {"bloch": [0.0, 0.0, 1.0]})
    samples: int = 100_000
    seed: int = 1
    quad_tol: float = 1e-8
    fidelity_tol: float = 1e-8
    mc_floor: float = 1e-6
    step: float = 1e-3
    kappa: float | None = None
    divisibility_tol: float = 1e-10

    def __post_init__(self):
        if self.t_min < 0:
            raise ValueError("t_min must be >= 0")
        if self.t_max < self.t_min:
            raise ValueError("t_max must be >= t_min")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        for name in ("quad_tol", "fidelity_tol", "mc_floor", "step", "divisibility_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.kappa is not None and not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if len(self.state) != 1 or next(iter(self.state)) not in ("bloch", "amps", "m"):
            raise ValueError(f"state must have exactly one of bloch/amps/m, got {self.state}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.points)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**copy.deepcopy(doc))


PRESETS: dict[str, dict] = {
    "telegraph": {
        "model": {"kind": "telegraph", "axis": "x", "amplitude": 1.0},
        "t_min": 0.0, "t_max": 2 * math.pi, "points": 65,
        "state": {"bloch": [0.0, 0.0, 1.0]},
    },
    "lorentzian": {
        "model": {"kind": "lorentzian", "gamma": 1.0},
        "t_min": 0.0, "t_max": 5.0, "points": 51,
        "state": {"bloch": [0.0, 0.0, 1.0]},
    },
    "exponential": {
        "model": {"kind": "exponential", "rate": 1.0},
        "t_min": 0.0, "t_max": 5.0, "points": 51,
        "state": {"bloch": [0.0, 0.0, 1.0]},
    },
    "fig1-upper": {
        "model": {"kind": "gaussian", "d": [1.0, 1.0, 1.0]},
        "t_min": 0.0, "t_max": 10.0, "points": 101,
        "state": {"bloch": [0.0, 0.0, 1.0]},
    },
    "fig1-lower": {
        "model": {"kind": "gaussian", "d": [1.0, 2.0, 3.0]},
        "t_min": 0.0, "t_max": 10.0, "points": 101,
        "state": {"bloch": [0.0, 0.0, 1.0]},
    },
    "fig2": {
        "model": {"kind": "gaussian", "d": [1.0, 1.0, 1.0]},
        "t_min": 0.0, "t_max": 5.0, "points": 101,
        "state": {"m": [1.0, 0.9, 0.7, 0.4, 0.0]},
    },
}


def load_config(path: str | Path | None = None, preset: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Preset, then config document, then explicit overrides, each layer replacing keys."""
    doc: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        doc.update(copy.deepcopy(PRESETS[preset]))
    if path is not None:
        doc.update(json.loads(Path(path).read_text()))
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig.from_dict(doc)
