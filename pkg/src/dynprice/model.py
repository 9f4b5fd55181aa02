"""Dimensionless single-product pricing problem.

Stock is measured in units of the initial stock and money in units of the
price cap, so the process starts at ``s = 1`` and prices live in ``[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

UNIMODAL_VARIANCE_BOUND = 1.0 / 12.0


class ModelError(ValueError):
    """Raised when problem parameters violate their invariants."""


@dataclass(frozen=True)
class DemandFunction:
    """Exponential demand ``q(a) = q1 * exp(-q2 * a)``."""

    q1: float
    q2: float

    def __post_init__(self):
        if not (self.q1 > 0 and self.q2 > 0):
            raise ModelError(f"demand parameters must be positive, got q1={self.q1}, q2={self.q2}")

    def __call__(self, a):
        return self.q1 * np.exp(-self.q2 * a)


def beta_shape_params(gamma: float) -> tuple[float, float]:
    """Shape parameters of the symmetric Beta giving ``0.5 + X`` variance ``gamma**2``."""
    if not gamma > 0:
        raise ModelError(f"gamma must be positive, got {gamma}")
    if not gamma * gamma < UNIMODAL_VARIANCE_BOUND:
        raise ModelError(
            f"gamma**2 = {gamma * gamma:.6g} must be below 1/12 for a unimodal disturbance"
        )
    mu = 1.0 / (8.0 * gamma * gamma) - 0.5
    return mu, mu


@dataclass(frozen=True)
class ShiftedBeta:
    """``W = 0.5 + X`` with ``X ~ Beta(mu, mu)``: mean 1, variance gamma**2, support [0.5, 1.5]."""

    gamma: float

    def __post_init__(self):
        beta_shape_params(self.gamma)

    @property
    def shape(self) -> tuple[float, float]:
        return beta_shape_params(self.gamma)

    @property
    def is_deterministic(self) -> bool:
        return False

    def sample(self, gen: np.random.Generator, size=None):
        mu, nu = self.shape
        return 0.5 + gen.beta(mu, nu, size)

    def quadrature(self, gen: np.random.Generator, n: int):
        """Monte Carlo nodes with equal weights."""
        w = self.sample(gen, n)
        return w, np.full(n, 1.0 / n)


@dataclass(frozen=True)
class Degenerate:
    """Point mass ``W = w``; ``w = 1`` collapses the problem to its certainty equivalent."""

    w: float = 1.0

    def __post_init__(self):
        if not self.w >= 0:
            raise ModelError(f"degenerate disturbance must be non-negative, got {self.w}")

    @property
    def is_deterministic(self) -> bool:
        return True

    def sample(self, gen: np.random.Generator, size=None):
        if size is None:
            return float(self.w)
        return np.full(size, float(self.w))

    def quadrature(self, gen: np.random.Generator, n: int):
        return np.array([float(self.w)]), np.array([1.0])


@dataclass(frozen=True)
class Discrete:
    """Finitely supported disturbance; expectations over it are exact."""

    atoms: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if atoms.shape != probs.shape or atoms.size == 0:
            raise ModelError("atoms and probs must be non-empty and of equal length")
        if np.any(atoms < 0) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ModelError("atoms must be non-negative and probs a probability vector")
        object.__setattr__(self, "atoms", tuple(float(x) for x in atoms))
        object.__setattr__(self, "probs", tuple(float(x) for x in probs))

    @property
    def is_deterministic(self) -> bool:
        return len(self.atoms) == 1

    def sample(self, gen: np.random.Generator, size=None):
        return gen.choice(np.asarray(self.atoms), size=size, p=np.asarray(self.probs))

    def quadrature(self, gen: np.random.Generator, n: int):
        return np.asarray(self.atoms), np.asarray(self.probs)


DisturbanceModel = Union[ShiftedBeta, Degenerate, Discrete]


@dataclass(frozen=True)
class PricingProblem:
    T: int
    C: float
    demand: DemandFunction
    disturbance: DisturbanceModel = field(default_factory=lambda: ShiftedBeta(0.05))
    a_min: float = 0.0
    a_max: float = 1.0

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ModelError(f"horizon T must be an integer >= 1, got {self.T}")
        if not self.C >= 0:
            raise ModelError(f"unsold-stock cost C must be >= 0, got {self.C}")
        if not (0.0 <= self.a_min < self.a_max <= 1.0):
            raise ModelError(
                f"price interval [{self.a_min}, {self.a_max}] must satisfy 0 <= a_min < a_max <= 1"
            )

    @property
    def s0(self) -> float:
        return 1.0

    def clip_price(self, a):
        return np.clip(a, self.a_min, self.a_max)


def example_problem(**overrides) -> PricingProblem:
    """The reference system: T=3, C=1, gamma=0.05, q(a) = exp(2 - 3a) / 3."""
    params = dict(T=3, C=1.0, demand=DemandFunction(math.exp(2.0) / 3.0, 3.0),
                  disturbance=ShiftedBeta(0.05))
    params.update(overrides)
    return PricingProblem(**params)


def demand(d: DemandFunction, a):
    return d(a)


def sales(s, a, w, d: DemandFunction):
    """Units sold over one period: demand capped by the available stock."""
    return np.minimum(s, d(a) * w)


def step(s, a, w, d: DemandFunction):
    """One period of the stock dynamics; returns ``(next_stock, revenue)``."""
    q = sales(s, a, w, d)
    return s - q, a * q


def terminal_value(p: PricingProblem, s):
    return -p.C * s


@dataclass(frozen=True)
class DimensionalScaling:
    s0_hat: float
    a_max_hat: float
    c_hat: float

    def __post_init__(self):
        if not (self.s0_hat > 0 and self.a_max_hat > 0 and self.c_hat >= 0):
            raise ModelError("scaling requires s0_hat > 0, a_max_hat > 0 and c_hat >= 0")


@dataclass(frozen=True)
class DimensionlessInputs:
    C: float
    demand: Callable
    s0: float = 1.0


def nondimensionalise(scaling: DimensionalScaling, q_hat: Callable) -> DimensionlessInputs:
    """Rescale a dimensional demand curve and unsold cost.

    Stock is scaled by the initial stock and money by the price cap.
    """
    s0_hat, a_max_hat = scaling.s0_hat, scaling.a_max_hat

    def q(a):
        return q_hat(np.asarray(a) * a_max_hat) / s0_hat

    return DimensionlessInputs(C=scaling.c_hat / a_max_hat, demand=q)


def scale_exponential(scaling: DimensionalScaling, q1_hat: float, q2_hat: float) -> DemandFunction:
    """Dimensionless form of ``q_hat(a_hat) = q1_hat * exp(-q2_hat * a_hat)``."""
    return DemandFunction(q1_hat / scaling.s0_hat, q2_hat * scaling.a_max_hat)
