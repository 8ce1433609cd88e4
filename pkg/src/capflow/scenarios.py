"""Initial profiles that meet both slabs orthogonally."""
from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .geometry import Grid, Profile, area, mean_curvature
from .monitors import theorem_bounds

__all__ = ["Family", "ScenarioSpec", "InvalidScenarioError", "ValidationReport", "build", "validate"]


class Family(str, Enum):
    CYLINDER = "Cylinder"
    COSINE = "Cosine"
    BUMP = "Bump"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown scenario family {value!r}; expected one of {names}") from None


class InvalidScenarioError(ValueError):
    pass


# family -> (required parameters, optional parameters)
FAMILY_PARAMETERS = {
    Family.CYLINDER: (("r0",), ()),
    Family.COSINE: (("r0", "epsilon"), ("k",)),
    Family.BUMP: (("r0", "amplitude", "width"), ("center",)),
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Initial profile family and its parameters.

    Cylinder uses ``r0``; Cosine ``r0 + epsilon * cos(k pi z / d)``; Bump
    ``r0 + amplitude * exp(-((z - center) / width)^2)`` blended to ``r0``
    near both slabs. ``center`` defaults to ``d / 2``.
    """

    family: Family = Family.COSINE
    r0: float = 3.0
    epsilon: float = 0.0
    k: int = 1
    amplitude: float = 0.0
    center: float | None = None
    width: float = 0.1
    n: int = 2
    d: float = 1.0
    m: int = 201

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if not self.r0 > 0:
            raise InvalidScenarioError(f"r0 must be positive, got {self.r0}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidScenarioError(f"k must be an integer >= 1, got {self.k}")
        if not self.width > 0:
            raise InvalidScenarioError(f"width must be positive, got {self.width}")
        if self.center is not None and not 0 < self.center < self.d:
            raise InvalidScenarioError(f"center must lie in (0, d), got {self.center}")

    def as_dict(self) -> dict:
        req, opt = FAMILY_PARAMETERS[self.family]
        out = {"family": self.family.value}
        for name in req + opt:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        out.update(n=self.n, d=self.d, m=self.m)
        return out


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def _cutoff(z: np.ndarray, d: float, frac: float = 0.1) -> np.ndarray:
    # zero value and zero slope at both ends, 1 on the middle 80%
    edge = frac * d
    return _smoothstep(z / edge) * _smoothstep((d - z) / edge)


def build(spec: ScenarioSpec) -> Profile:
    grid = Grid(spec.d, spec.m)
    z = grid.z
    fam = spec.family
    if fam is Family.CYLINDER:
        rho = np.full(grid.m, float(spec.r0))
    elif fam is Family.COSINE:
        rho = spec.r0 + spec.epsilon * np.cos(spec.k * np.pi * z / spec.d)
    else:
        c = 0.5 * spec.d if spec.center is None else spec.center
        rho = spec.r0 + spec.amplitude * np.exp(-(((z - c) / spec.width) ** 2)) * _cutoff(z, spec.d)
    if np.min(rho) <= 0:
        raise InvalidScenarioError(
            f"{fam.value} scenario gives non-positive radius (min {np.min(rho):.6g})"
        )
    return Profile(grid, spec.n, rho)


@dataclass(frozen=True)
class ValidationReport:
    mean_convex: bool
    H_min: float
    hypothesis_holds: bool
    area: float
    V_over_d: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def validate(p: Profile) -> ValidationReport:
    """Check mean convexity and the area-versus-volume hypothesis of the initial surface."""
    H = mean_curvature(p)
    b = theorem_bounds(p)
    return ValidationReport(
        mean_convex=bool(np.min(H) > 0),
        H_min=float(np.min(H)),
        hypothesis_holds=b.hypothesis_holds,
        area=area(p),
        V_over_d=b.V_over_d,
    )
