"""Experiment configuration: flat ``key = value`` text with command-line overrides.

Every key defaults to the reference system, so an empty config reproduces it.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields

from .dp import ConfigError, SolverConfig
from .model import DemandFunction, Degenerate, PricingProblem, ShiftedBeta
from .policies import OLFCConfig


@dataclass(frozen=True)
class ExperimentConfig:
    # problem
    T: int = 3
    C: float = 1.0
    gamma: float = 0.05
    q1: float = math.exp(2.0) / 3.0
    q2: float = 3.0
    a_min: float = 0.0
    a_max: float = 1.0
    disturbance: str = "beta"
    w: float = 1.0
    # solver
    K: int = 201
    M: int = 201
    n_exp: int = 1000
    refine_iters: int = 20
    # simulation
    n_sim: int = 10000
    # OLFC
    n_saa: int = 1000
    multistart: int = 1
    tol: float = 1e-4
    max_iters: int = 100
    seed: int = 0
    out: str = ""

    def __post_init__(self):
        if self.disturbance not in ("beta", "degenerate"):
            raise ConfigError(f"disturbance must be 'beta' or 'degenerate', got {self.disturbance!r}")
        # surface component invariants eagerly
        self.problem()
        self.solver_config()
        self.olfc_config()
        if self.n_sim < 1:
            raise ConfigError(f"n_sim must be >= 1, got {self.n_sim}")

    def problem(self) -> PricingProblem:
        dist = ShiftedBeta(self.gamma) if self.disturbance == "beta" else Degenerate(self.w)
        return PricingProblem(T=self.T, C=self.C, demand=DemandFunction(self.q1, self.q2),
                              disturbance=dist, a_min=self.a_min, a_max=self.a_max)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(K=self.K, M=self.M, n_exp=self.n_exp,
                            refine_iters=self.refine_iters, seed=self.seed)

    def olfc_config(self) -> OLFCConfig:
        return OLFCConfig(n_saa=self.n_saa, tol=self.tol, max_iters=self.max_iters,
                          multistart=self.multistart, seed=self.seed)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _cast(key: str, raw: str):
    kind = _TYPES[key]
    try:
        if kind == "int":
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        return _CASTS[kind](raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _cast(key, raw)
    return dataclasses.replace(base or ExperimentConfig(), **values)


def emit(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def load(path: str, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        cfg = parse(fh.read())
    return cfg.replace(**overrides) if overrides else cfg
