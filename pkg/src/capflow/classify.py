"""Convergence detection and identification of the limit shape."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import GeometrySample, Profile, enclosed_volume, unit_ball_volume

__all__ = [
    "Verdict",
    "ClassificationResult",
    "predicted_cylinder_radius",
    "volume_matched_radius",
    "H_spread",
    "convergence_test",
    "classify_limit",
    "not_converged",
]


class Verdict(str, Enum):
    CYLINDER = "Cylinder"
    NON_CYLINDER_CMC = "NonCylinderCMC"
    NOT_CONVERGED = "NotConverged"


@dataclass(frozen=True)
class ClassificationResult:
    verdict: Verdict
    limit_radius: float
    predicted_radius: float
    H_spread: float
    profile_residual: float
    volume_gain: float

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["verdict"] = self.verdict.value
        return out


def predicted_cylinder_radius(area: float, n: int, d: float) -> float:
    """Radius of the cylinder of height ``d`` whose lateral area is ``area``."""
    if not (area > 0 and d > 0) or n < 2:
        raise ValueError("need area > 0, d > 0 and n >= 2")
    return (area / (n * unit_ball_volume(n) * d)) ** (1.0 / (n - 1))


def volume_matched_radius(volume: float, n: int, d: float) -> float:
    return (volume / (unit_ball_volume(n) * d)) ** (1.0 / n)


def H_spread(g: GeometrySample) -> float:
    mean = float(np.mean(g.H))
    return float((np.max(g.H) - np.min(g.H)) / mean)


def convergence_test(g: GeometrySample, tol: float) -> bool:
    # constant H makes every law stationary, cylinder or not
    return bool(H_spread(g) <= tol)


def _residual(p: Profile) -> float:
    mean = float(np.mean(p.rho))
    return float(np.max(np.abs(p.rho - mean)) / mean)


def classify_limit(
    p: Profile,
    g: GeometrySample,
    tol: float = 1e-5,
    *,
    convergence_tol: float = 1e-6,
    initial_area: float | None = None,
    initial_volume: float | None = None,
) -> ClassificationResult:
    """Classify a final state as a cylinder, another constant-H surface, or unsettled.

    ``initial_area`` fixes the area-matched radius reported alongside the
    verdict (defaults to the current area); ``initial_volume`` is used for
    ``volume_gain``.
    """
    a0 = g.area if initial_area is None else initial_area
    v0 = g.volume if initial_volume is None else initial_volume
    residual = _residual(p)
    if not convergence_test(g, convergence_tol):
        verdict = Verdict.NOT_CONVERGED
    elif residual <= tol:
        verdict = Verdict.CYLINDER
    else:
        verdict = Verdict.NON_CYLINDER_CMC
    return ClassificationResult(
        verdict=verdict,
        limit_radius=float(np.mean(p.rho)) if verdict is Verdict.CYLINDER else float("nan"),
        predicted_radius=predicted_cylinder_radius(a0, p.n, p.grid.d),
        H_spread=H_spread(g),
        profile_residual=residual,
        volume_gain=g.volume - v0,
    )


def not_converged(p: Profile, bounds) -> ClassificationResult:
    """Result for runs stopped by a guard, where the final geometry may be unusable."""
    with np.errstate(all="ignore"):
        return ClassificationResult(
            verdict=Verdict.NOT_CONVERGED,
            limit_radius=float("nan"),
            predicted_radius=predicted_cylinder_radius(bounds.area, p.n, p.grid.d),
            H_spread=float("nan"),
            profile_residual=_residual(p),
            volume_gain=enclosed_volume(p) - bounds.volume,
        )
