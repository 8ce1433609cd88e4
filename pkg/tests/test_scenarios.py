import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capflow.geometry import tilt
from capflow.scenarios import Family, InvalidScenarioError, ScenarioSpec, build, validate


def closed_form_H(r0, eps, k, d, z):
    w = k * math.pi / d
    r, r1, r2 = r0 + eps * np.cos(w * z), -eps * w * np.sin(w * z), -eps * w * w * np.cos(w * z)
    q = 1 + r1 * r1
    return -r2 / q**1.5 + 1 / (r * np.sqrt(q))


class TestBuild:
    def test_cylinder(self):
        p = build(ScenarioSpec("Cylinder", r0=3.0))
        assert np.all(p.rho == 3.0)

    def test_cosine_endpoints(self):
        p = build(ScenarioSpec("Cosine", r0=3.0, epsilon=0.1, k=1))
        assert p.rho[0] == pytest.approx(3.1, rel=1e-15) and p.rho[-1] == pytest.approx(2.9, rel=1e-15)

    def test_nonpositive_radius(self):
        with pytest.raises(InvalidScenarioError, match="non-positive"):
            build(ScenarioSpec("Cosine", r0=1.0, epsilon=1.5))

    @pytest.mark.parametrize(
        "kw",
        [dict(r0=0.0), dict(k=0), dict(k=1.5), dict(width=0.0), dict(center=1.0), dict(family="Sphere")],
    )
    def test_invalid_specs(self, kw):
        with pytest.raises(ValueError):
            ScenarioSpec(**kw)

    def test_bump_is_flat_near_slabs(self):
        p = build(ScenarioSpec("Bump", r0=2.0, amplitude=0.3, width=0.4, m=101))
        assert p.rho[0] == 2.0 and p.rho[-1] == 2.0
        assert np.all(np.diff(p.rho[:3]) > 0) and abs(p.rho[1] - 2.0) < 1e-3
        assert p.rho[50] == pytest.approx(2.3)

    def test_bump_off_center(self):
        p = build(ScenarioSpec("Bump", r0=2.0, amplitude=0.3, width=0.1, center=0.3, m=101))
        assert int(np.argmax(p.rho)) == 30

    def test_as_dict_lists_family_parameters(self):
        d = ScenarioSpec("Cylinder", r0=2.0).as_dict()
        assert d == {"family": "Cylinder", "r0": 2.0, "n": 2, "d": 1.0, "m": 201}
        assert Family.parse("Bump") is Family.BUMP


@pytest.mark.parametrize(
    "spec",
    [
        ScenarioSpec("Cylinder", r0=1.5),
        ScenarioSpec("Cosine", r0=3.0, epsilon=0.2, k=3, d=2.0),
        ScenarioSpec("Bump", r0=2.0, amplitude=-0.4, width=0.2, center=0.4),
    ],
)
def test_tilt_is_one_at_slabs(spec):
    v = tilt(build(spec))
    assert v[0] == 1.0 and v[-1] == 1.0


class TestValidate:
    def test_cylinder(self):
        r = validate(build(ScenarioSpec("Cylinder", r0=3.0)))
        assert r.mean_convex and r.hypothesis_holds
        assert r.H_min == pytest.approx(1 / 3) and r.area == pytest.approx(6 * math.pi)
        assert r.V_over_d == pytest.approx(9 * math.pi)

    def test_thin_cylinder(self):
        assert not validate(build(ScenarioSpec("Cylinder", r0=1.0))).hypothesis_holds

    def test_headline_is_mean_convex(self):
        r = validate(build(ScenarioSpec("Cosine", r0=3.0, epsilon=0.02)))
        assert r.mean_convex and r.hypothesis_holds
        # closed-form H(d) = -0.02 pi^2 + 1/2.98
        assert r.H_min == pytest.approx(0.1381783817768705, abs=5e-5)

    def test_large_amplitude_not_mean_convex(self):
        r = validate(build(ScenarioSpec("Cosine", r0=3.0, epsilon=0.1)))
        assert not r.mean_convex
        assert r.H_min == pytest.approx(-0.1 * math.pi**2 + 1 / 2.9, abs=1e-4)

    def test_as_dict(self):
        d = validate(build(ScenarioSpec("Cylinder", r0=3.0))).as_dict()
        assert set(d) == {"mean_convex", "H_min", "hypothesis_holds", "area", "V_over_d"}


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.05, 50.0), n=st.integers(2, 5))
def test_cylinders_are_mean_convex(r, n):
    assert validate(build(ScenarioSpec("Cylinder", r0=r, n=n, m=21))).mean_convex


@settings(max_examples=50, deadline=None)
@given(eps=st.floats(0.0, 0.3), k=st.integers(1, 4))
def test_cosine_mean_convexity_matches_closed_form(eps, k):
    p = build(ScenarioSpec("Cosine", r0=3.0, epsilon=eps, k=k, m=401))
    H = closed_form_H(3.0, eps, k, 1.0, p.z)
    r = validate(p)
    # leading truncation error of the centred second difference plus its rounding
    tol = 1.5 * eps * (k * math.pi) ** 4 * p.grid.dz**2 / 12 + 8 * np.spacing(3.3) / p.grid.dz**2
    assert abs(r.H_min - H.min()) <= tol
    if abs(H.min()) > tol:
        assert r.mean_convex == (H.min() > 0)
