import math

import numpy as np
import pytest

from capflow.flow import FlowLaw, with_rate
from capflow.monitors import (
    LEDGER_COLUMNS,
    Ledger,
    LedgerRow,
    audit,
    check_area_conservation,
    check_bounds,
    check_H_evolution,
    check_mean_convexity,
    check_volume_conservation,
    check_volume_monotone,
    theorem_bounds,
)
from capflow.stepper import Tolerances, step

from _helpers import cosine, cylinder


def _row(t, **kw):
    base = dict(
        t=t, area=6 * np.pi, volume=9 * np.pi, h=3.0, H_min=1 / 3, H_max=1 / 3,
        v_max=1.0, A2_max=1 / 9, rho_min=3.0, rho_max=3.0,
        intH=2 * np.pi, intH2=2 * np.pi / 3, speed_max=0.0,
    )
    base.update(kw)
    return LedgerRow(**base)


def _ledger(rows, law="AreaPreserving"):
    L = Ledger(law)
    for r in rows:
        L.append_row(r)
    return L


class TestTheoremBounds:
    def test_cylinder(self):
        b = theorem_bounds(cylinder(3.0))
        assert b.rho_C == pytest.approx(3.0, rel=1e-14)
        assert b.R_bound == pytest.approx(3.0 + math.sqrt(6.0), rel=1e-14)
        assert b.hypothesis_holds
        assert b.V_over_d == pytest.approx(9 * np.pi)

    def test_thin_cylinder_fails_hypothesis(self):
        # area 2 pi r vs volume pi r^2: holds iff r >= 2
        assert not theorem_bounds(cylinder(1.0)).hypothesis_holds
        assert theorem_bounds(cylinder(2.0)).hypothesis_holds

    def test_cosine_volume_radius(self):
        b = theorem_bounds(cosine(eps=0.1))
        # sqrt(9.005), closed form of the trapezoid-exact volume
        assert b.rho_C == pytest.approx(3.00083321762473, rel=1e-13)


class TestLedger:
    def test_columns(self):
        assert LEDGER_COLUMNS[0] == "t" and "speed_max" in LEDGER_COLUMNS

    def test_strictly_increasing_time(self):
        L = _ledger([_row(0.0)])
        with pytest.raises(ValueError):
            L.append_row(_row(0.0))

    def test_append_from_profile(self):
        p = cylinder(3.0)
        L = Ledger()
        L.append(0.0, p, with_rate("AreaPreserving", p))
        r = L.rows[0]
        assert r.h == pytest.approx(3.0) and r.speed_max == pytest.approx(0.0, abs=1e-14)
        assert len(L) == 1 and L.column("rho_min")[0] == 3.0
        assert r.minkowski_gap == pytest.approx(-6 * np.pi, rel=1e-14)


class TestCheckers:
    def test_clean_ledger(self):
        L = _ledger([_row(0.0), _row(0.1)])
        assert audit(L, theorem_bounds(cylinder(3.0)), Tolerances()) == []

    def test_area_drift_flagged_at_tight_tolerance(self):
        L = _ledger([_row(0.0), _row(0.1, area=6 * np.pi * (1 + 1e-12))])
        assert check_area_conservation(L, 1e-4) == []
        (v,) = check_area_conservation(L, 1e-16)
        assert v.check == "area_conservation" and v.t == 0.1

    def test_volume_decrease(self):
        L = _ledger([_row(0.0, volume=10.0), _row(0.1, volume=9.0), _row(0.2, volume=9.5)])
        (v,) = check_volume_monotone(L, 1e-8)
        assert v.t == 0.1 and v.value == pytest.approx(-1.0)

    def test_volume_checks_depend_on_law(self):
        rows = [_row(0.0, volume=10.0), _row(0.1, volume=9.0)]
        assert check_volume_monotone(_ledger(rows, "VolumePreserving"), 1e-8) == []
        assert len(check_volume_conservation(_ledger(rows, "VolumePreserving"), 1e-4)) == 1
        assert check_volume_conservation(_ledger(rows), 1e-4) == []

    def test_negative_curvature(self):
        L = _ledger([_row(0.0, H_min=-0.1)])
        (v,) = check_mean_convexity(L)
        assert v.value == -0.1

    def test_rate_bound(self):
        area = 6 * np.pi
        L = _ledger([_row(0.0, h=1.0, intH=1.1 * area)])
        names = {v.check for v in check_bounds(L, theorem_bounds(cylinder(3.0)))}
        assert names == {"cauchy_schwarz"}

    def test_radius_and_trend(self):
        rows = [_row(0.1 * i) for i in range(5)] + [_row(0.5, rho_max=10.0, v_max=50.0)]
        names = {v.check for v in check_bounds(_ledger(rows), theorem_bounds(cylinder(3.0)))}
        assert names == {"radius_upper", "v_max_trend"}


class TestHEvolution:
    def test_stationary_cylinder(self):
        p = cylinder(3.0)
        assert check_H_evolution(p, p, 1e-3) <= 1e-10

    # the residual is a fourth difference of rho, so its rounding floor grows
    # like m^4; a coarse grid keeps it below the asserted level
    def test_cylinder_step(self):
        p = cylinder(3.0, m=21)
        q = step(p, "AreaPreserving", 1e-3)
        assert check_H_evolution(p, q, 1e-3) <= 1e-7

    def test_mcf_cylinder(self):
        # dH/dt = H^3 for a shrinking cylinder
        p = cylinder(3.0, m=21)
        q = step(p, "PlainMCF", 1e-3)
        assert check_H_evolution(p, q, 1e-3, "PlainMCF") <= 1e-7

    @pytest.mark.parametrize("law", list(FlowLaw))
    def test_residual_small_on_smooth_flow(self, law):
        p = cosine(eps=0.02, m=101)
        q = step(p, law, 1e-4)
        assert check_H_evolution(p, q, 1e-4, law) <= 5e-3
