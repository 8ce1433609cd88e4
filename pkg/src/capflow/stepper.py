"""Time integration of the profile equation.

Available schemes: explicit Euler, explicit midpoint (RK2), the linearly
implicit IMEX Euler step, and its Richardson extrapolation ``IMEX`` (two half
steps against one full step), which is second order and the default. The
IMEX step splits

    rho_t = c * rho_zz / (1 + rho_z^2) + [a * v - c * (n - 1) / rho]

and treats the diffusive first term implicitly with coefficients frozen at the
start of the step; ``(a, c)`` come from :func:`capflow.flow.speed_coefficients`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import classify, monitors
from .flow import (
    DegenerateGeometryError,
    FlowLaw,
    graph_velocity,
    normal_speed,
    speed_coefficients,
    with_rate,
)
from .geometry import GeometrySample, Profile, derivative_first, derivative_second
from .tridiagonal import is_strictly_diagonally_dominant, solve_tridiagonal

__all__ = [
    "Scheme",
    "Status",
    "StepperConfig",
    "Tolerances",
    "RunResult",
    "BlowUpError",
    "H_FLOOR",
    "DT_MAX",
    "stable_dt",
    "step_explicit",
    "step_imex",
    "step_imex_extrapolated",
    "integrate_explicit",
    "step",
    "evolve",
    "run",
]

logger = logging.getLogger(__name__)

H_FLOOR = 1e-12
DT_MAX = 1e-2


class Scheme(str, Enum):
    EXPLICIT_EULER = "ExplicitEuler"
    EXPLICIT_RK2 = "ExplicitRK2"
    IMEX = "IMEX"
    IMEX_EULER = "IMEXEuler"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown scheme {value!r}; expected one of {names}") from None


class Status(str, Enum):
    OK = "Ok"
    CONVERGED = "Converged"
    PINCH_OFF = "PinchOff"
    MEAN_CONVEXITY_LOST = "MeanConvexityLost"
    BLOW_UP = "BlowUp"
    MAX_STEPS = "MaxSteps"


class BlowUpError(FloatingPointError):
    """A step produced non-finite radii."""


@dataclass(frozen=True)
class StepperConfig:
    scheme: Scheme = Scheme.IMEX
    dt: float | str = "auto"
    cfl_safety: float = 0.8
    t_end: float = 10.0
    max_steps: int = 200_000
    pinch_floor: float = 1e-3
    record_every: int = 10

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ValueError(f"dt must be positive or 'auto', got {self.dt!r}")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps}")
        if not 0 < self.pinch_floor < 1:
            raise ValueError(f"pinch_floor must lie in (0, 1), got {self.pinch_floor}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every must be an integer >= 1, got {self.record_every}")


@dataclass(frozen=True)
class Tolerances:
    area_rel: float = 1e-4
    volume_rel: float = 1e-8
    convergence: float = 1e-6
    cylinder: float = 1e-5

    def __post_init__(self):
        for name in ("area_rel", "volume_rel", "convergence", "cylinder"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive, got {value}")


@dataclass
class RunResult:
    profile: Profile
    t: float
    status: Status
    ledger: monitors.Ledger
    classification: classify.ClassificationResult
    steps: int
    bounds: monitors.TheoremBounds
    snapshots: list = field(default_factory=list)

    def __iter__(self):
        # unpacks as (profile, ledger, classification)
        return iter((self.profile, self.ledger, self.classification))


def _diffusion_scale(law: FlowLaw, h: float) -> float:
    return speed_coefficients(law, h)[1]


def stable_dt(p: Profile, h: float, sigma: float = 0.8, dt_max: float = DT_MAX) -> float:
    """Largest explicit step for diffusion coefficient ``h``, capped at ``dt_max``.

    ``h`` is the factor in front of ``rho_zz``: the nonlocal rate for the
    area-preserving law, 1 for the other two.
    """
    if h < 0:
        raise ValueError(f"diffusion coefficient must be >= 0, got {h}")
    return min(sigma * p.grid.dz**2 / (2.0 * max(h, H_FLOOR)), dt_max)


def _check_finite(rho: np.ndarray) -> None:
    if not np.all(np.isfinite(rho)):
        raise BlowUpError("non-finite radius after step")


def _velocity(p: Profile, law: FlowLaw) -> np.ndarray:
    g = with_rate(law, p)
    return graph_velocity(p, normal_speed(law, g))


def _fast_velocity(rho: np.ndarray, dz: float, n: int, law: FlowLaw, wtrap: np.ndarray) -> np.ndarray:
    # same as _velocity without building a GeometrySample; wtrap carries the
    # trapezoid weights (the constant factor n * omega_n cancels in h)
    r = np.pad(rho, 1, mode="reflect")
    rz = (r[2:] - r[:-2]) / (2.0 * dz)
    rz[0] = rz[-1] = 0.0
    rzz = (r[2:] - 2.0 * rho + r[:-2]) / (dz * dz)
    q = 1.0 + rz * rz
    v = np.sqrt(q)
    H = -rzz / (q * v) + (n - 1) / (rho * v)
    if law is FlowLaw.PLAIN_MCF:
        return -H * v
    w = wtrap * rho ** (n - 1) * v
    intH = np.dot(w, H)
    if law is FlowLaw.AREA_PRESERVING:
        intH2 = np.dot(w, H * H)
        if not intH2 > 0:
            raise DegenerateGeometryError(f"integral of H^2 is {intH2!r}, rate undefined")
        return (1.0 - (intH / intH2) * H) * v
    return (intH / np.sum(w) - H) * v


def step_explicit(p: Profile, law: FlowLaw, dt: float, scheme=Scheme.EXPLICIT_EULER) -> Profile:
    return p.with_rho(_explicit_rho(p, FlowLaw.parse(law), dt, Scheme.parse(scheme)))


def _trap(p: Profile) -> np.ndarray:
    w = np.ones(p.grid.m)
    w[0] = w[-1] = 0.5
    return w


def _explicit_rho(p: Profile, law: FlowLaw, dt: float, scheme: Scheme, steps: int = 1) -> np.ndarray:
    dz, n, wtrap = p.grid.dz, p.n, _trap(p)
    rho = p.rho
    for _ in range(steps):
        k1 = _fast_velocity(rho, dz, n, law, wtrap)
        if scheme is Scheme.EXPLICIT_EULER:
            rho = rho + dt * k1
        elif scheme is Scheme.EXPLICIT_RK2:
            half = rho + 0.5 * dt * k1
            _check_finite(half)
            rho = rho + dt * _fast_velocity(half, dz, n, law, wtrap)
        else:
            raise ValueError(f"{scheme.value} is not an explicit scheme")
        _check_finite(rho)
    return rho


def integrate_explicit(p: Profile, law: FlowLaw, dt: float, steps: int, scheme=Scheme.EXPLICIT_RK2) -> Profile:
    """Take ``steps`` fixed explicit steps of size ``dt`` without any monitoring."""
    return p.with_rho(_explicit_rho(p, FlowLaw.parse(law), dt, Scheme.parse(scheme), steps))


def imex_system(p: Profile, law: FlowLaw, dt: float, g: GeometrySample | None = None):
    """Bands and right-hand side of the linear IMEX system for one step.

    The unknown is the increment ``rho_new - rho``: its right-hand side
    vanishes on a steady state, so rounding scales with the update instead of
    with the radius.
    """
    g = with_rate(law, p) if g is None else g
    a, c = speed_coefficients(law, g.h)
    rz = derivative_first(p)
    coef = c / (1.0 + rz * rz)
    s = dt * coef / p.grid.dz**2
    diag = 1.0 + 2.0 * s
    lower = -s[1:].copy()
    upper = -s[:-1].copy()
    # folded ghosts: rho[-1] = rho[1], rho[m] = rho[m-2]
    upper[0] *= 2.0
    lower[-1] *= 2.0
    explicit = a * g.v - c * (p.n - 1) / p.rho
    rhs = dt * (coef * derivative_second(p) + explicit)
    return lower, diag, upper, rhs


def step_imex(p: Profile, law: FlowLaw, dt: float, g: GeometrySample | None = None) -> Profile:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    lower, diag, upper, rhs = imex_system(p, law, dt, g)
    if not is_strictly_diagonally_dominant(lower, diag, upper):
        raise AssertionError("IMEX matrix lost strict diagonal dominance")
    _check_finite(rhs)
    rho = p.rho + solve_tridiagonal(lower, diag, upper, rhs)
    _check_finite(rho)
    return p.with_rho(rho)


def step_imex_extrapolated(p: Profile, law: FlowLaw, dt: float, g: GeometrySample | None = None) -> Profile:
    """``2 * S(dt/2)^2 - S(dt)`` for the IMEX Euler step ``S``: second order in ``dt``."""
    full = step_imex(p, law, dt, g)
    half = step_imex(p, law, 0.5 * dt, g)
    half = step_imex(half, law, 0.5 * dt)
    return p.with_rho(2.0 * half.rho - full.rho)


def step(p: Profile, law: FlowLaw, dt: float, scheme=Scheme.IMEX, g: GeometrySample | None = None) -> Profile:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.IMEX:
        return step_imex_extrapolated(p, law, dt, g)
    if scheme is Scheme.IMEX_EULER:
        return step_imex(p, law, dt, g)
    return step_explicit(p, law, dt, scheme)


def _choose_dt(cfg: StepperConfig, p: Profile, law: FlowLaw, g: GeometrySample) -> float:
    if cfg.dt != "auto":
        return float(cfg.dt)
    if cfg.scheme in (Scheme.IMEX, Scheme.IMEX_EULER):
        return p.grid.dz
    return stable_dt(p, _diffusion_scale(law, g.h), cfg.cfl_safety)


def evolve(
    p0: Profile,
    law=FlowLaw.AREA_PRESERVING,
    stepper: StepperConfig | None = None,
    tolerances: Tolerances | None = None,
    *,
    snapshots_every: int = 0,
) -> RunResult:
    """Integrate the flow from ``p0`` until convergence, a guard, ``t_end`` or ``max_steps``.

    Guard outcomes are reported through :attr:`RunResult.status`; nothing is
    raised for a misbehaving surface.
    """
    law = FlowLaw.parse(law)
    cfg = stepper or StepperConfig()
    tol = tolerances or Tolerances()

    bounds = monitors.theorem_bounds(p0)
    ledger = monitors.Ledger(law=law)
    floor = cfg.pinch_floor * float(np.min(p0.rho))
    snapshots = [(0, 0.0, p0)] if snapshots_every else []

    p, t, steps = p0, 0.0, 0
    status = Status.OK
    g = None
    convexity_flagged = False
    while True:
        try:
            g = with_rate(law, p)
        except DegenerateGeometryError:
            ledger.add_violation(t, "degenerate_rate", float("nan"), 0.0)
            status = Status.MEAN_CONVEXITY_LOST
            break
        if not all(math.isfinite(x) for x in (g.h, g.intH, g.intH2, g.area)):
            ledger.add_violation(t, "non_finite", float("nan"), 0.0)
            status = Status.BLOW_UP
            break

        forced = False
        if law is FlowLaw.AREA_PRESERVING and float(np.min(g.H)) <= 0:
            forced = not convexity_flagged
            convexity_flagged = True
            if g.h <= 0:
                # negative rate reverses the diffusion: the law is no longer parabolic
                ledger.append(t, p, g)
                ledger.add_violation(t, "degenerate_rate", g.h, 0.0)
                status = Status.MEAN_CONVEXITY_LOST
                break

        if steps % cfg.record_every == 0 or forced:
            ledger.append(t, p, g)

        # a constant-H surface is an equilibrium only for the constrained laws
        if law is not FlowLaw.PLAIN_MCF and classify.convergence_test(g, tol.convergence):
            status = Status.CONVERGED
            break
        if t >= cfg.t_end:
            break
        if steps >= cfg.max_steps:
            status = Status.MAX_STEPS
            break

        dt = min(_choose_dt(cfg, p, law, g), cfg.t_end - t)
        try:
            p_next = step(p, law, dt, cfg.scheme, g)
        except BlowUpError:
            ledger.add_violation(t + dt, "non_finite", float("nan"), 0.0)
            status = Status.BLOW_UP
            break
        steps += 1
        t = cfg.t_end if t + dt >= cfg.t_end else t + dt
        p = p_next

        if float(np.min(p.rho)) < floor:
            ledger.add_violation(t, "pinch_off", float(np.min(p.rho)), floor)
            status = Status.PINCH_OFF
            if float(np.min(p.rho)) > 0:
                try:
                    ledger.append(t, p, with_rate(law, p))
                except DegenerateGeometryError:
                    pass
            break
        if snapshots_every and steps % snapshots_every == 0:
            snapshots.append((steps, t, p))

    if g is not None and status not in (Status.PINCH_OFF, Status.BLOW_UP):
        if not ledger.rows or ledger.rows[-1].t < t:
            ledger.append(t, p, g)
    if snapshots_every and snapshots[-1][0] != steps:
        snapshots.append((steps, t, p))

    monitors.audit(ledger, bounds, tol)
    if g is not None and status not in (Status.PINCH_OFF, Status.BLOW_UP):
        result = classify.classify_limit(
            p,
            g,
            tol.cylinder,
            convergence_tol=tol.convergence,
            initial_area=bounds.area,
            initial_volume=bounds.volume,
        )
    else:
        result = classify.not_converged(p, bounds)
    logger.info("run finished: status=%s t=%.6g steps=%d", status.value, t, steps)
    return RunResult(p, t, status, ledger, result, steps, bounds, snapshots)


def run(cfg) -> RunResult:
    """Build the initial profile of a :class:`capflow.config.SimConfig` and evolve it."""
    from .scenarios import build

    p0 = build(cfg.scenario)
    return evolve(
        p0,
        cfg.law,
        cfg.stepper,
        cfg.tolerances,
        snapshots_every=cfg.output.snapshots_every,
    )
