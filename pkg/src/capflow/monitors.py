"""Run ledger and the checks for conserved, monotone and bounded quantities.

Violations are data: each checker returns a list of :class:`Violation`
records and never raises on a misbehaving run.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .flow import FlowLaw, normal_speed, speed_coefficients, with_rate
from .geometry import (
    GeometrySample,
    Profile,
    area,
    derivative_first,
    enclosed_volume,
    laplace_beltrami,
    unit_ball_volume,
)

__all__ = [
    "LEDGER_COLUMNS",
    "LedgerRow",
    "Violation",
    "Ledger",
    "TheoremBounds",
    "theorem_bounds",
    "check_area_conservation",
    "check_volume_monotone",
    "check_volume_conservation",
    "check_mean_convexity",
    "check_bounds",
    "check_H_evolution",
    "audit",
]

CAUCHY_SCHWARZ_SLACK = 1e-12
TREND_FACTOR = 10.0


class LedgerRow(NamedTuple):
    t: float
    area: float
    volume: float
    h: float
    H_min: float
    H_max: float
    v_max: float
    A2_max: float
    rho_min: float
    rho_max: float
    intH: float
    intH2: float
    speed_max: float
    # int H <X, nu> - n * area; logged only, its sign is not a checked property
    minkowski_gap: float = float("nan")


LEDGER_COLUMNS = LedgerRow._fields


class Violation(NamedTuple):
    t: float
    check: str
    value: float
    threshold: float


@dataclass
class Ledger:
    """Append-only time series of monitored quantities for one run."""

    law: FlowLaw = FlowLaw.AREA_PRESERVING
    rows: list[LedgerRow] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    def __post_init__(self):
        self.law = FlowLaw.parse(self.law)

    def append_row(self, row: LedgerRow) -> None:
        if self.rows and not row.t > self.rows[-1].t:
            raise ValueError(f"ledger time must increase strictly: {row.t} after {self.rows[-1].t}")
        self.rows.append(LedgerRow(*(float(x) for x in row)))

    def append(self, t: float, p: Profile, g: GeometrySample) -> None:
        """Record the state ``(p, g)`` at time ``t``; ``g.h`` must be filled."""
        speed = normal_speed(self.law, g)
        with np.errstate(all="ignore"):
            self.append_row(
                LedgerRow(
                    t=t,
                    area=g.area,
                    volume=g.volume,
                    h=g.h,
                    H_min=np.min(g.H),
                    H_max=np.max(g.H),
                    v_max=np.max(g.v),
                    A2_max=np.max(g.A2),
                    rho_min=np.min(p.rho),
                    rho_max=np.max(p.rho),
                    intH=g.intH,
                    intH2=g.intH2,
                    speed_max=np.max(np.abs(speed)),
                    minkowski_gap=g.intHX - p.n * g.area,
                )
            )

    def add_violation(self, t: float, check: str, value: float, threshold: float) -> None:
        self.violations.append(Violation(float(t), check, float(value), float(threshold)))

    def column(self, name: str) -> np.ndarray:
        idx = LEDGER_COLUMNS.index(name)
        return np.array([row[idx] for row in self.rows])

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class TheoremBounds:
    """Radius bounds implied by the initial data.

    ``rho_C`` is the radius of the cylinder enclosing the same volume;
    ``R_bound`` caps the radius for all times. ``hypothesis_holds`` records
    whether ``area <= volume / d``, the condition that rules out pinch-off
    and unduloid limits.
    """

    rho_C: float
    R_bound: float
    hypothesis_holds: bool
    area: float
    volume: float
    V_over_d: float


def theorem_bounds(p0: Profile) -> TheoremBounds:
    n, d = p0.n, p0.grid.d
    omega = unit_ball_volume(n)
    V = enclosed_volume(p0)
    A = area(p0)
    rho_C = (V / (omega * d)) ** (1.0 / n)
    return TheoremBounds(
        rho_C=rho_C,
        R_bound=rho_C + (A / omega) ** (1.0 / n),
        hypothesis_holds=bool(A <= V / d),
        area=A,
        volume=V,
        V_over_d=V / d,
    )


def check_area_conservation(L: Ledger, tol_rel: float) -> list[Violation]:
    if L.law is not FlowLaw.AREA_PRESERVING or not L.rows:
        return []
    a0 = L.rows[0].area
    return [
        Violation(r.t, "area_conservation", abs(r.area - a0) / a0, tol_rel)
        for r in L.rows
        if abs(r.area - a0) / a0 > tol_rel
    ]


def check_volume_conservation(L: Ledger, tol_rel: float) -> list[Violation]:
    """Volume-preserving counterpart of :func:`check_area_conservation`."""
    if L.law is not FlowLaw.VOLUME_PRESERVING or not L.rows:
        return []
    v0 = L.rows[0].volume
    return [
        Violation(r.t, "volume_conservation", abs(r.volume - v0) / v0, tol_rel)
        for r in L.rows
        if abs(r.volume - v0) / v0 > tol_rel
    ]


def check_volume_monotone(L: Ledger, tol_rel: float) -> list[Violation]:
    if L.law is not FlowLaw.AREA_PRESERVING or len(L.rows) < 2:
        return []
    slack = tol_rel * L.rows[0].volume
    out = []
    for prev, cur in zip(L.rows, L.rows[1:]):
        if cur.volume < prev.volume - slack:
            out.append(Violation(cur.t, "volume_monotone", cur.volume - prev.volume, -slack))
    return out


def check_mean_convexity(L: Ledger) -> list[Violation]:
    return [Violation(r.t, "mean_convexity", r.H_min, 0.0) for r in L.rows if r.H_min <= 0]


def check_bounds(L: Ledger, B: TheoremBounds) -> list[Violation]:
    """Radius bounds, positivity of the rate, the exact rate bound and blow-up trends."""
    out = []
    ap = L.law is FlowLaw.AREA_PRESERVING
    for r in L.rows:
        if r.rho_max >= B.R_bound:
            out.append(Violation(r.t, "radius_upper", r.rho_max, B.R_bound))
        if r.rho_min <= 0:
            out.append(Violation(r.t, "radius_lower", r.rho_min, 0.0))
        if ap and r.h <= 0:
            out.append(Violation(r.t, "rate_positive", r.h, 0.0))
        if ap and r.h * r.intH > r.area * (1 + CAUCHY_SCHWARZ_SLACK):
            out.append(Violation(r.t, "cauchy_schwarz", r.h * r.intH, r.area))
    if L.rows:
        last = L.rows[-1]
        for name in ("v_max", "A2_max"):
            med = float(np.median(L.column(name)))
            value = getattr(last, name)
            if value > TREND_FACTOR * med:
                out.append(Violation(last.t, f"{name}_trend", value, TREND_FACTOR * med))
    return out


def check_H_evolution(
    prev: Profile, nxt: Profile, dt: float, law=FlowLaw.AREA_PRESERVING
) -> float:
    """Max interior residual of the evolution equation for the mean curvature.

    For a normal speed ``F = a - c H`` the mean curvature along normal
    trajectories obeys ``H_t = c * Lap(H) - F * |A|^2``. Grid nodes keep their
    axial position instead, which adds the transport term
    ``F * rho_z * H_z / v``. Both sides are compared at the midpoint profile
    ``(prev + next) / 2``.
    """
    law = FlowLaw.parse(law)
    g_prev = with_rate(law, prev)
    g_next = with_rate(law, nxt)
    mid = prev.with_rho(0.5 * (prev.rho + nxt.rho))
    g_mid = with_rate(law, mid)
    a, c = speed_coefficients(law, g_mid.h)
    speed = a - c * g_mid.H
    H_z = derivative_first(mid.with_rho(g_mid.H))
    rhs = (
        c * laplace_beltrami(mid, g_mid.H)
        - speed * g_mid.A2
        + speed * g_mid.rho_z * H_z / g_mid.v
    )
    lhs = (g_next.H - g_prev.H) / dt
    return float(np.max(np.abs(lhs - rhs)[1:-1]))


def audit(L: Ledger, B: TheoremBounds, tol) -> list[Violation]:
    """Run every checker on a finished ledger and append what they report.

    ``tol`` needs ``area_rel`` and ``volume_rel`` attributes. Returns the new
    violations.
    """
    found = (
        check_area_conservation(L, tol.area_rel)
        + check_volume_monotone(L, tol.volume_rel)
        + check_volume_conservation(L, tol.area_rel)
        + check_mean_convexity(L)
        + check_bounds(L, B)
    )
    L.violations.extend(found)
    return found
