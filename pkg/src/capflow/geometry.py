"""Discrete surfaces of revolution and their curvature/integral quantities.

The hypersurface is stored through its radius function sampled on a uniform
grid of the axis interval ``[0, d]``. Derivatives use second-order central
differences with even-reflection ghost nodes, so the free Neumann condition
(zero slope at both slabs) holds exactly at the boundary nodes.

Scalar fields are plain :class:`numpy.ndarray` objects of length ``m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

__all__ = [
    "Grid",
    "Profile",
    "GeometrySample",
    "unit_ball_volume",
    "derivative_first",
    "derivative_second",
    "mean_curvature",
    "principal_curvatures",
    "second_fundamental_norm",
    "tilt",
    "support_function",
    "quadrature_weights",
    "integrate_over_surface",
    "area",
    "enclosed_volume",
    "laplace_beltrami",
    "sample",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``z_i = i * dz`` on ``[0, d]`` with ``m`` nodes."""

    d: float
    m: int

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"slab width d must be positive, got {self.d}")
        if int(self.m) != self.m or self.m < 5:
            raise ValueError(f"node count m must be an integer >= 5, got {self.m}")
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "m", int(self.m))

    @property
    def dz(self) -> float:
        return self.d / (self.m - 1)

    @property
    def z(self) -> np.ndarray:
        z = np.arange(self.m) * self.dz
        z[-1] = self.d
        return z


@dataclass(frozen=True, eq=False)
class Profile:
    """Radius samples ``rho`` of an ``n``-dimensional surface of revolution.

    The radius doubles as the height function ``u = <X, omega>``.
    """

    grid: Grid
    n: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 1 or rho.shape[0] != self.grid.m:
            raise ValueError(
                f"rho must be a 1-d array of length {self.grid.m}, got shape {rho.shape}"
            )
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "n", int(self.n))

    @property
    def z(self) -> np.ndarray:
        return self.grid.z

    def with_rho(self, rho) -> "Profile":
        return Profile(self.grid, self.n, rho)

    @classmethod
    def from_function(cls, func, *, d: float = 1.0, m: int = 201, n: int = 2) -> "Profile":
        grid = Grid(d, m)
        return cls(grid, n, func(grid.z))


@dataclass(frozen=True)
class GeometrySample:
    """Pointwise fields and global integrals of a profile at one instant.

    ``intHX`` integrates ``H`` times the support function. ``h`` is the
    nonlocal rate of the flow law; it stays ``nan`` until
    :func:`capflow.flow.with_rate` fills it.
    """

    H: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    A2: np.ndarray
    v: np.ndarray
    rho_z: np.ndarray
    area: float
    volume: float
    intH: float
    intH2: float
    intHX: float
    h: float = field(default=float("nan"))


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in ``R^n``, ``pi^(n/2) / Gamma(n/2 + 1)``."""
    if n < 1:
        raise ValueError(f"unit ball volume needs n >= 1, got {n}")
    return pi ** (n / 2) / gamma(n / 2 + 1)


def _padded(values: np.ndarray) -> np.ndarray:
    # ghosts f[-1] = f[1], f[m] = f[m-2]
    return np.pad(values, 1, mode="reflect")


def derivative_first(p: Profile) -> np.ndarray:
    r = _padded(p.rho)
    out = (r[2:] - r[:-2]) / (2.0 * p.grid.dz)
    out[0] = 0.0
    out[-1] = 0.0
    return out


def derivative_second(p: Profile) -> np.ndarray:
    r = _padded(p.rho)
    return (r[2:] - 2.0 * r[1:-1] + r[:-2]) / p.grid.dz**2


def _parts(p: Profile):
    rz = derivative_first(p)
    rzz = derivative_second(p)
    q = 1.0 + rz * rz
    return rz, rzz, q


def principal_curvatures(p: Profile) -> tuple[np.ndarray, np.ndarray]:
    """Meridian curvature ``kappa1`` and the rotational curvature ``kappa2``."""
    _, rzz, q = _parts(p)
    kappa1 = -rzz / q**1.5
    kappa2 = 1.0 / (p.rho * np.sqrt(q))
    return kappa1, kappa2


def mean_curvature(p: Profile) -> np.ndarray:
    _, rzz, q = _parts(p)
    return -rzz / q**1.5 + (p.n - 1) / (p.rho * np.sqrt(q))


def second_fundamental_norm(p: Profile) -> np.ndarray:
    _, rzz, q = _parts(p)
    return rzz**2 / q**3 + (p.n - 1) / (p.rho**2 * q)


def tilt(p: Profile) -> np.ndarray:
    """Gradient quantity ``v = sqrt(1 + rho_z^2)``; exactly 1 on the slabs."""
    rz = derivative_first(p)
    return np.sqrt(1.0 + rz * rz)


def support_function(p: Profile) -> np.ndarray:
    """``<X, nu>`` with the origin on the first slab: ``(rho - z * rho_z) / v``."""
    rz = derivative_first(p)
    return (p.rho - p.z * rz) / np.sqrt(1.0 + rz * rz)


def quadrature_weights(p: Profile) -> np.ndarray:
    """Nonnegative weights ``W`` with ``sum(W * f)`` approximating the surface integral of ``f``."""
    trap = np.full(p.grid.m, p.grid.dz)
    trap[0] = trap[-1] = 0.5 * p.grid.dz
    return p.n * unit_ball_volume(p.n) * trap * p.rho ** (p.n - 1) * tilt(p)


def integrate_over_surface(p: Profile, f) -> float:
    f = np.asarray(f, dtype=float)
    if f.shape != p.rho.shape:
        raise ValueError(f"field has shape {f.shape}, expected {p.rho.shape}")
    return float(np.dot(quadrature_weights(p), f))


def area(p: Profile) -> float:
    return float(np.sum(quadrature_weights(p)))


def enclosed_volume(p: Profile) -> float:
    """Trapezoid rule for ``omega_n * int_0^d rho^n dz``."""
    g = unit_ball_volume(p.n) * p.rho**p.n
    dz = p.grid.dz
    return float(dz * (np.sum(g) - 0.5 * (g[0] + g[-1])))


def laplace_beltrami(p: Profile, f) -> np.ndarray:
    """Surface Laplacian of an axially symmetric field, in flux form.

    Fluxes through the slabs vanish by the even reflection, so the
    trapezoid integral of the result over the surface is zero up to rounding.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != p.rho.shape:
        raise ValueError(f"field has shape {f.shape}, expected {p.rho.shape}")
    dz = p.grid.dz
    v = tilt(p)
    jac = p.rho ** (p.n - 1)
    w = jac / v
    w_half = 0.5 * (w[1:] + w[:-1])
    flux = w_half * np.diff(f) / dz
    # F_{-1/2} = -F_{1/2}, F_{m-1/2} = -F_{m-3/2}
    flux = np.concatenate(([-flux[0]], flux, [-flux[-1]]))
    return np.diff(flux) / (dz * jac * v)


def sample(p: Profile) -> GeometrySample:
    """Evaluate every geometric field and integral of ``p`` in one pass."""
    rz, rzz, q = _parts(p)
    sq = np.sqrt(q)
    kappa1 = -rzz / (q * sq)
    kappa2 = 1.0 / (p.rho * sq)
    H = kappa1 + (p.n - 1) * kappa2
    A2 = kappa1**2 + (p.n - 1) * kappa2**2
    W = quadrature_weights(p)
    return GeometrySample(
        H=H,
        kappa1=kappa1,
        kappa2=kappa2,
        A2=A2,
        v=sq,
        rho_z=rz,
        area=float(np.sum(W)),
        volume=enclosed_volume(p),
        intH=float(np.dot(W, H)),
        intH2=float(np.dot(W, H * H)),
        intHX=float(np.dot(W, H * (p.rho - p.z * rz) / sq)),
    )
