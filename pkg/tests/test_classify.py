import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from capflow.classify import (
    Verdict,
    classify_limit,
    convergence_test,
    not_converged,
    predicted_cylinder_radius,
    volume_matched_radius,
)
from capflow.geometry import Grid, Profile, sample
from capflow.monitors import theorem_bounds

from _helpers import cosine, cylinder


def unduloid(a=0.8, b=1.2, m=801):
    """Half period of the Delaunay unduloid with neck ``a`` and bulge ``b`` (n = 2).

    Shooting from the neck with H = 2 / (a + b) until the slope vanishes again.
    """
    H = 2.0 / (a + b)

    def rhs(_, y):
        r, s = y
        q = 1.0 + s * s
        return [s, q / r - H * q**1.5]

    def turn(_, y):
        return y[1]

    turn.terminal, turn.direction = True, -1
    sol = solve_ivp(rhs, (0.0, 10.0), [a, 0.0], events=turn, dense_output=True, rtol=1e-12, atol=1e-13,
                    first_step=1e-6)
    d = float(sol.t_events[0][0])
    z = np.linspace(0.0, d, m)
    return Profile(Grid(d, m), 2, sol.sol(z)[0]), H


@pytest.mark.parametrize(
    "area,n,d,expected",
    [
        (6 * math.pi, 2, 1.0, 3.0),
        (16 * math.pi, 3, 1.0, 2.0),
        (4 * math.pi, 2, 2.0, 1.0),
    ],
)
def test_predicted_radius(area, n, d, expected):
    assert predicted_cylinder_radius(area, n, d) == pytest.approx(expected, rel=1e-14)


def test_predicted_radius_rejects():
    with pytest.raises(ValueError):
        predicted_cylinder_radius(-1.0, 2, 1.0)


def test_volume_matched_radius():
    assert volume_matched_radius(9.005 * math.pi, 2, 1.0) == pytest.approx(3.00083321762473, rel=1e-14)


def test_scaling_invariance():
    lam = 2.5
    base = predicted_cylinder_radius(7.0, 3, 1.3)
    assert predicted_cylinder_radius(7.0 * lam**3, 3, 1.3 * lam) == pytest.approx(lam * base, rel=1e-14)


class TestConvergence:
    def test_cylinder_passes(self):
        assert convergence_test(sample(cylinder()), 1e-12)

    def test_fresh_cosine_fails(self):
        assert not convergence_test(sample(cosine(eps=0.1)), 1e-6)


class TestClassify:
    def test_cylinder(self):
        p = cylinder(2.5)
        r = classify_limit(p, sample(p))
        assert r.verdict is Verdict.CYLINDER
        assert r.limit_radius == 2.5 and r.predicted_radius == pytest.approx(2.5, rel=1e-14)
        assert r.volume_gain == 0.0

    def test_unsettled(self):
        p = cosine(eps=0.1)
        r = classify_limit(p, sample(p))
        assert r.verdict is Verdict.NOT_CONVERGED and math.isnan(r.limit_radius)

    def test_unduloid_is_constant_H_but_not_a_cylinder(self):
        p, H = unduloid()
        g = sample(p)
        assert np.max(np.abs(g.H - H)) < 1e-4
        r = classify_limit(p, g, convergence_tol=1e-3)
        assert r.verdict is Verdict.NON_CYLINDER_CMC
        assert r.profile_residual > 0.1

    def test_initial_area_drives_prediction(self):
        p = cylinder(3.0)
        r = classify_limit(p, sample(p), initial_area=12 * math.pi, initial_volume=8 * math.pi)
        assert r.predicted_radius == pytest.approx(6.0)
        assert r.volume_gain == pytest.approx(math.pi)

    def test_as_dict(self):
        p = cylinder(3.0)
        d = classify_limit(p, sample(p)).as_dict()
        assert d["verdict"] == "Cylinder" and set(d) >= {"limit_radius", "predicted_radius", "H_spread"}

    def test_not_converged_result(self):
        p0 = cosine(eps=0.1)
        r = not_converged(p0, theorem_bounds(p0))
        assert r.verdict is Verdict.NOT_CONVERGED
        assert r.volume_gain == 0.0 and math.isnan(r.H_spread)
