"""Numerical tolerances shared by every module.

All routines accept an optional ``cfg``; when omitted the module-level
:data:`DEFAULT` is used.  Values are immutable, so a config can be shared
freely between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Config:
    # quadrature / roots
    quad_abs: float = 1e-12
    root_tol: float = 1e-10
    clearance_rel: float = 1e-6
    # trajectory tracing
    capture_rel: float = 1e-3
    capture_tol: float = 1e-4
    launch_rel: float = 1e-7
    escape_mult: float = 10.0
    lock_angle: float = math.pi / 36
    lock_steps: int = 3
    budget_mult: float = 100.0
    trace_rtol: float = 1e-6
    max_steps: int = 200_000
    # gamma curve
    on_curve: float = 1e-6
    gamma_radius: float = 50.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v <= 0:
                raise ValueError(f"config field {f.name!r} must be positive, got {v!r}")

    def updated(self, **kw) -> "Config":
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT = Config()


def resolve(cfg: Config | None) -> Config:
    return DEFAULT if cfg is None else cfg
