"""Flow laws, the nonlocal rate ``h(t)`` and the radial velocity of the profile.

Every law moves the surface along its outer normal with a speed of the form
``a - c * H``:

=================  ================  ====  ====
law                h                 a     c
=================  ================  ====  ====
AreaPreserving     intH / intH2      1     h
VolumePreserving   intH / area       h     1
PlainMCF           0                 0     1
=================  ================  ====  ====

In the radius chart this becomes ``rho_t = (a - c H) * sqrt(1 + rho_z^2)``.
"""
from __future__ import annotations

import dataclasses
from enum import Enum

import numpy as np

from .geometry import GeometrySample, Profile, sample, tilt

__all__ = [
    "FlowLaw",
    "DegenerateGeometryError",
    "nonlocal_rate",
    "speed_coefficients",
    "normal_speed",
    "graph_velocity",
    "with_rate",
]


class FlowLaw(str, Enum):
    AREA_PRESERVING = "AreaPreserving"
    VOLUME_PRESERVING = "VolumePreserving"
    PLAIN_MCF = "PlainMCF"

    @classmethod
    def parse(cls, value) -> "FlowLaw":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown flow law {value!r}; expected one of {names}") from None


class DegenerateGeometryError(ArithmeticError):
    """The nonlocal rate is undefined (mean convexity is lost entirely)."""


def nonlocal_rate(law: FlowLaw, g: GeometrySample) -> float:
    law = FlowLaw.parse(law)
    if law is FlowLaw.AREA_PRESERVING:
        if not g.intH2 > 0:
            raise DegenerateGeometryError(f"integral of H^2 is {g.intH2!r}, rate undefined")
        return g.intH / g.intH2
    if law is FlowLaw.VOLUME_PRESERVING:
        return g.intH / g.area
    return 0.0


def speed_coefficients(law: FlowLaw, h: float) -> tuple[float, float]:
    """Return ``(a, c)`` such that the normal speed is ``a - c * H``."""
    law = FlowLaw.parse(law)
    if law is FlowLaw.AREA_PRESERVING:
        return 1.0, h
    if law is FlowLaw.VOLUME_PRESERVING:
        return h, 1.0
    return 0.0, 1.0


def with_rate(law: FlowLaw, g_or_profile) -> GeometrySample:
    """Geometry sample with ``h`` filled for ``law``. Accepts a sample or a profile."""
    g = sample(g_or_profile) if isinstance(g_or_profile, Profile) else g_or_profile
    return dataclasses.replace(g, h=nonlocal_rate(law, g))


def normal_speed(law: FlowLaw, g: GeometrySample) -> np.ndarray:
    """Signed speed along the outer normal; positive values expand the surface."""
    if np.isnan(g.h):
        raise ValueError("geometry sample has no nonlocal rate; call with_rate first")
    a, c = speed_coefficients(law, g.h)
    return a - c * g.H


def graph_velocity(p: Profile, speed) -> np.ndarray:
    speed = np.asarray(speed, dtype=float)
    if speed.shape != p.rho.shape:
        raise ValueError(f"speed has shape {speed.shape}, expected {p.rho.shape}")
    return speed * tilt(p)
