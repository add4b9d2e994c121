"""Coordinate charts on the flat plane with their frame data.

Five charts are supported: cartesian, polar (r, phi), parabolic (xi1, xi2),
and the two-focus elliptic system in its algebraic form (u, v) and its
trigonometric form (xi, eta). The elliptic coordinates are tied to foci at
(+d, 0) and (-d, 0): u is the half-sum and v the half-difference of the
distances to the foci, so u > d, |v| < d, and the algebraic chart covers the
closed upper half-plane. The trigonometric form substitutes

    u = d cosh(xi - beta),  v = d cos(eta),

which covers the whole plane minus the focal segment once, with eta periodic.

All metrics here are diagonal. The natural zweibein is e1 = sqrt(g^11),
e2 = sqrt(g^22), and the two spin-connection scalars that enter the
first-order supercharge operators are built from the Christoffel symbols as

    omega1 = (g11 G^1_22 - g22 G^2_12) g^22 e1 / 2
    omega2 = (g11 G^1_21 - g22 G^2_11) g^11 e2 / 2

which for a diagonal metric reduce to the closed forms
omega1 = -(d1 g22 / 2 g22) e1 and omega2 = +(d2 g11 / 2 g11) e2.

Every function accepts scalars or numpy arrays (broadcast) for the
coordinates. Metric components, Christoffels and curvature come from
hand-coded closed-form derivatives, never finite differences: the spin
connection is cancellation-sensitive near the degenerate loci (u = d,
v = +-d, r = 0, xi2 = 0), where grids and quadratures get close.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

Scalar = Union[float, np.ndarray]

CARTESIAN = "cartesian"
POLAR = "polar"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"
ELLIPTIC_TRIG = "elliptic-trig"

_KINDS = (CARTESIAN, POLAR, PARABOLIC, ELLIPTIC, ELLIPTIC_TRIG)
_ELLIPTIC_KINDS = (ELLIPTIC, ELLIPTIC_TRIG)

TWO_PI = 2.0 * np.pi


class DomainError(ValueError):
    """Coordinates lie outside the open domain of the chart."""


class DegeneratePointError(DomainError):
    """Point sits on a branch cut or a degenerate locus of the chart."""


@dataclass(frozen=True)
class Chart:
    """Descriptor of a coordinate system.

    kind is one of the module constants; d is the focal half-distance
    (elliptic kinds only) and beta the offset in u = d cosh(xi - beta)
    (trigonometric kind only).
    """

    kind: str
    d: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown chart kind {self.kind!r}")
        if self.kind in _ELLIPTIC_KINDS:
            if not self.d > 0:
                raise ValueError("elliptic charts need focal half-distance d > 0")
        if self.kind != ELLIPTIC_TRIG and self.beta != 0.0:
            raise ValueError("beta is only meaningful for the elliptic-trig chart")

    @property
    def is_elliptic(self) -> bool:
        return self.kind in _ELLIPTIC_KINDS

    @property
    def angle2(self) -> bool:
        """True when the second coordinate is an angle on [0, 2*pi)."""
        return self.kind in (POLAR, ELLIPTIC_TRIG)


def cartesian() -> Chart:
    return Chart(CARTESIAN)


def polar() -> Chart:
    return Chart(POLAR)


def parabolic() -> Chart:
    return Chart(PARABOLIC)


def elliptic_algebraic(d: float) -> Chart:
    return Chart(ELLIPTIC, d=float(d))


def elliptic_trig(d: float, beta: float = 0.0) -> Chart:
    return Chart(ELLIPTIC_TRIG, d=float(d), beta=float(beta))


@dataclass(frozen=True)
class MetricData:
    g11: Scalar
    g22: Scalar
    ginv11: Scalar
    ginv22: Scalar
    sqrtg: Scalar
    e11: Scalar
    e22: Scalar


@dataclass(frozen=True)
class ConnectionData:
    """Christoffel symbols gamma[mu, nu, rho] = G^mu_{nu rho} and the spin
    connection scalars. gamma has shape (2, 2, 2) plus whatever the
    coordinate arrays broadcast to."""

    gamma: np.ndarray
    omega1: Scalar
    omega2: Scalar


def _check_domain(chart: Chart, q1: Scalar, q2: Scalar, strict: bool = True) -> None:
    """Raise DomainError unless (q1, q2) lies in the chart domain.

    strict=True demands the open interior; strict=False admits the closed
    boundary (used by to_cartesian).
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    if not (np.all(np.isfinite(q1)) and np.all(np.isfinite(q2))):
        raise DomainError(f"{chart.kind}: non-finite coordinates")

    def fail(msg: str) -> None:
        raise DomainError(f"{chart.kind}: {msg}")

    if chart.kind == CARTESIAN:
        return
    if chart.kind == POLAR:
        ok1 = np.all(q1 > 0) if strict else np.all(q1 >= 0)
        if not ok1:
            fail("requires r > 0")
        if not (np.all(q2 >= 0) and np.all(q2 < TWO_PI)):
            fail("requires phi in [0, 2*pi)")
        return
    if chart.kind == PARABOLIC:
        ok2 = np.all(q2 > 0) if strict else np.all(q2 >= 0)
        if not ok2:
            fail("requires xi2 > 0 (the xi2 = 0 ray is degenerate)")
        return
    if chart.kind == ELLIPTIC:
        d = chart.d
        ok = (np.all(q1 > d) and np.all(np.abs(q2) < d)) if strict else (
            np.all(q1 >= d) and np.all(np.abs(q2) <= d))
        if not ok:
            fail(f"requires u > d = {d} and |v| < d")
        return
    # elliptic-trig
    ok1 = np.all(q1 > chart.beta) if strict else np.all(q1 >= chart.beta)
    if not ok1:
        fail(f"requires xi > beta = {chart.beta}")
    if not (np.all(q2 >= 0) and np.all(q2 < TWO_PI)):
        fail("requires eta in [0, 2*pi)")


def _metric_parts(chart: Chart, q1: Scalar, q2: Scalar) -> dict:
    """Closed-form diagonal metric components and the partial derivatives
    needed by the connection, curvature and Laplacian coefficients:
    g11, g22, d1g11, d2g11, d1g22, d2g22, d11g22, d22g11."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    one = np.ones(np.broadcast(q1, q2).shape)
    zero = np.zeros_like(one)

    if chart.kind == CARTESIAN:
        return dict(g11=one, g22=one, d1g11=zero, d2g11=zero, d1g22=zero,
                    d2g22=zero, d11g22=zero, d22g11=zero)
    if chart.kind == POLAR:
        r = q1 * one
        return dict(g11=one, g22=r**2, d1g11=zero, d2g11=zero, d1g22=2*r,
                    d2g22=zero, d11g22=2*one, d22g11=zero)
    if chart.kind == PARABOLIC:
        x1, x2 = q1 * one, q2 * one
        rho2 = x1**2 + x2**2
        return dict(g11=rho2, g22=rho2, d1g11=2*x1, d2g11=2*x2, d1g22=2*x1,
                    d2g22=2*x2, d11g22=2*one, d22g11=2*one)
    if chart.kind == ELLIPTIC:
        d = chart.d
        u, v = q1 * one, q2 * one
        uu, vv = u**2 - d**2, d**2 - v**2
        w2 = u**2 - v**2
        return dict(
            g11=w2 / uu,
            g22=w2 / vv,
            d1g11=-2*u*vv/uu**2,
            d2g11=-2*v/uu,
            d1g22=2*u/vv,
            d2g22=2*v*uu/vv**2,
            d11g22=2*one/vv,
            d22g11=-2*one/uu,
        )
    # elliptic-trig: conformal, g11 = g22 = (d^2/2)(cosh 2w - cos 2 eta)
    d = chart.d
    w = (q1 - chart.beta) * one
    eta = q2 * one
    G = 0.5 * d**2 * (np.cosh(2*w) - np.cos(2*eta))
    dG1 = d**2 * np.sinh(2*w)
    dG2 = d**2 * np.sin(2*eta)
    return dict(g11=G, g22=G, d1g11=dG1, d2g11=dG2, d1g22=dG1, d2g22=dG2,
                d11g22=2*d**2*np.cosh(2*w), d22g11=2*d**2*np.cos(2*eta))


def metric(chart: Chart, q1: Scalar, q2: Scalar) -> MetricData:
    """Diagonal metric, inverse, volume weight sqrt(g) and zweibein at (q1, q2)."""
    _check_domain(chart, q1, q2)
    p = _metric_parts(chart, q1, q2)
    g11, g22 = p["g11"], p["g22"]
    ginv11, ginv22 = 1.0 / g11, 1.0 / g22
    return MetricData(g11=g11, g22=g22, ginv11=ginv11, ginv22=ginv22,
                      sqrtg=np.sqrt(g11 * g22),
                      e11=np.sqrt(ginv11), e22=np.sqrt(ginv22))


def connection(chart: Chart, q1: Scalar, q2: Scalar) -> ConnectionData:
    """Christoffel symbols and spin connection from closed-form metric derivatives."""
    _check_domain(chart, q1, q2)
    p = _metric_parts(chart, q1, q2)
    g11, g22 = p["g11"], p["g22"]

    G111 = p["d1g11"] / (2*g11)
    G112 = p["d2g11"] / (2*g11)          # = G^1_{12} = G^1_{21}
    G122 = -p["d1g22"] / (2*g11)
    G222 = p["d2g22"] / (2*g22)
    G212 = p["d1g22"] / (2*g22)          # = G^2_{12} = G^2_{21}
    G211 = -p["d2g11"] / (2*g22)

    shape = np.broadcast(np.asarray(q1, float), np.asarray(q2, float)).shape
    gamma = np.zeros((2, 2, 2) + shape)
    gamma[0, 0, 0] = G111
    gamma[0, 0, 1] = gamma[0, 1, 0] = G112
    gamma[0, 1, 1] = G122
    gamma[1, 1, 1] = G222
    gamma[1, 0, 1] = gamma[1, 1, 0] = G212
    gamma[1, 0, 0] = G211

    e11 = 1.0 / np.sqrt(g11)
    e22 = 1.0 / np.sqrt(g22)
    omega1 = 0.5 * (g11 * G122 - g22 * G212) / g22 * e11
    omega2 = 0.5 * (g11 * G112 - g22 * G211) / g11 * e22
    return ConnectionData(gamma=gamma, omega1=omega1, omega2=omega2)


def curvature_scalar(chart: Chart, q1: Scalar, q2: Scalar) -> Scalar:
    """Ricci scalar of the chart metric. Zero for every chart here; kept as a
    live consistency check of the closed-form metric derivatives."""
    _check_domain(chart, q1, q2)
    p = _metric_parts(chart, q1, q2)
    g11, g22 = p["g11"], p["g22"]

    G111 = p["d1g11"] / (2*g11)
    G112 = p["d2g11"] / (2*g11)
    G122 = -p["d1g22"] / (2*g11)
    G222 = p["d2g22"] / (2*g22)
    G212 = p["d1g22"] / (2*g22)

    # d1 G^1_22 and d2 G^1_12 from second metric partials
    d1G122 = -p["d11g22"] / (2*g11) + p["d1g22"] * p["d1g11"] / (2*g11**2)
    d2G112 = p["d22g11"] / (2*g11) - p["d2g11"]**2 / (2*g11**2)

    R1_212 = d1G122 - d2G112 + G111*G122 + G112*G222 - G112*G112 - G122*G212
    return 2.0 * R1_212 / g22


def laplacian_coefficients(chart: Chart, q1: Scalar, q2: Scalar):
    """Coefficients of the chart Laplace-Beltrami operator in expanded form,

        lap f = g^11 d11 f + g^22 d22 f + c1 d1 f + c2 d2 f,

    with c_mu = (1/sqrt g) d_mu (sqrt g g^{mu mu}), evaluated from the
    closed-form metric partials. Returns (ginv11, ginv22, c1, c2).
    """
    _check_domain(chart, q1, q2)
    p = _metric_parts(chart, q1, q2)
    g11, g22 = p["g11"], p["g22"]
    c1 = 0.5 * (p["d1g22"] / g22 - p["d1g11"] / g11) / g11
    c2 = 0.5 * (p["d2g11"] / g11 - p["d2g22"] / g22) / g22
    return 1.0 / g11, 1.0 / g22, c1, c2


def to_cartesian(chart: Chart, q1: Scalar, q2: Scalar) -> Tuple[Scalar, Scalar]:
    """Map chart coordinates to a cartesian point. Closed chart domain allowed."""
    _check_domain(chart, q1, q2, strict=False)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    if chart.kind == CARTESIAN:
        return q1 + 0.0, q2 + 0.0
    if chart.kind == POLAR:
        return q1 * np.cos(q2), q1 * np.sin(q2)
    if chart.kind == PARABOLIC:
        return 0.5 * (q1**2 - q2**2), q1 * q2
    if chart.kind == ELLIPTIC:
        d = chart.d
        # + branch of x2: the chart covers the upper half-plane
        x2 = np.sqrt(np.maximum(q1**2 - d**2, 0.0)) * np.sqrt(np.maximum(d**2 - q2**2, 0.0)) / d
        return q1 * q2 / d, x2
    d = chart.d
    w = q1 - chart.beta
    return d * np.cosh(w) * np.cos(q2), d * np.sinh(w) * np.sin(q2)


def from_cartesian(chart: Chart, x1: Scalar, x2: Scalar) -> Tuple[Scalar, Scalar]:
    """Invert to_cartesian. Raises DegeneratePointError on branch cuts."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if chart.kind == CARTESIAN:
        return x1 + 0.0, x2 + 0.0
    if chart.kind == POLAR:
        r = np.hypot(x1, x2)
        if np.any(r == 0):
            raise DegeneratePointError("polar: the origin has no angle")
        return r, np.mod(np.arctan2(x2, x1), TWO_PI)
    if chart.kind == PARABOLIC:
        r = np.hypot(x1, x2)
        if np.any((x2 == 0) & (x1 >= 0)):
            raise DegeneratePointError(
                "parabolic: the ray x2 = 0, x1 >= 0 is the xi2 = 0 cut")
        xi2 = np.sqrt(r - x1)
        xi1 = np.sign(x2) * np.sqrt(r + x1)
        return xi1, xi2

    d = chart.d
    r1 = np.hypot(x1 - d, x2)
    r2 = np.hypot(x1 + d, x2)
    u = 0.5 * (r1 + r2)
    v = 0.5 * (r2 - r1)
    if chart.kind == ELLIPTIC:
        if np.any(x2 < 0):
            raise DomainError("elliptic: algebraic chart covers x2 >= 0 only")
        if np.any(u <= d):
            raise DegeneratePointError("elliptic: point on the focal segment (u = d)")
        if np.any(np.abs(v) >= d):
            raise DegeneratePointError(
                "elliptic: point on the focal axis beyond a focus (v = +-d)")
        return u, v
    # elliptic-trig
    if np.any(u <= d):
        raise DegeneratePointError("elliptic-trig: point on the focal segment")
    w = np.arccosh(u / d)
    sin_eta = x2 / (d * np.sinh(w))
    eta = np.mod(np.arctan2(sin_eta, v / d), TWO_PI)
    return chart.beta + w, eta


def elliptic_uv(chart: Chart, q1: Scalar, q2: Scalar) -> Tuple[Scalar, Scalar]:
    """(u, v) of the algebraic elliptic system for a point on either elliptic
    chart. Identity on the algebraic chart; the trigonometric chart pulls back
    through u = d cosh(xi - beta), v = d cos(eta)."""
    if chart.kind == ELLIPTIC:
        return np.asarray(q1, float) + 0.0, np.asarray(q2, float) + 0.0
    if chart.kind == ELLIPTIC_TRIG:
        w = np.asarray(q1, float) - chart.beta
        return chart.d * np.cosh(w), chart.d * np.cos(np.asarray(q2, float))
    raise ValueError(f"not an elliptic chart: {chart.kind}")


def focal_radii(chart: Chart, q1: Scalar, q2: Scalar) -> Tuple[Scalar, Scalar]:
    """Distances (r1, r2) to the foci (+d, 0) and (-d, 0): r1 = u - v, r2 = u + v."""
    u, v = elliptic_uv(chart, q1, q2)
    return u - v, u + v


def spinor_change(chart: Chart, q1: Scalar, q2: Scalar) -> np.ndarray:
    """Change of basis from chart-frame to cartesian-frame spinor components.

    Built from the zweibein-normalized Jacobian O of to_cartesian: the scalar
    sectors pick up 1 and det O, the middle two components rotate (or reflect,
    for the algebraic elliptic chart, where det O = -1) with O itself. Returns
    shape (4, 4) plus the broadcast shape of the inputs. S is orthogonal.
    """
    _check_domain(chart, q1, q2)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    shape = np.broadcast(q1, q2).shape
    one = np.ones(shape)

    if chart.kind == CARTESIAN:
        O00, O01, O10, O11 = one, 0*one, 0*one, one
    elif chart.kind == POLAR:
        c, s = np.cos(q2) * one, np.sin(q2) * one
        O00, O01, O10, O11 = c, -s, s, c
    elif chart.kind == PARABOLIC:
        rho = np.sqrt(q1**2 + q2**2)
        O00, O01 = q1/rho, -q2/rho
        O10, O11 = q2/rho, q1/rho
    elif chart.kind == ELLIPTIC:
        d = chart.d
        u, v = q1 * one, q2 * one
        w2 = u**2 - v**2
        e1 = np.sqrt((u**2 - d**2) / w2)
        e2 = np.sqrt((d**2 - v**2) / w2)
        O00, O01 = (v/d)*e1, (u/d)*e2
        O10, O11 = (u/d)*e2, -(v/d)*e1
    else:
        w = (q1 - chart.beta) * one
        eta = q2 * one
        sh, ch = np.sinh(w), np.cosh(w)
        se, ce = np.sin(eta), np.cos(eta)
        rho = np.sqrt(sh**2 + se**2)
        O00, O01 = sh*ce/rho, -ch*se/rho
        O10, O11 = ch*se/rho, sh*ce/rho

    det = O00*O11 - O01*O10
    S = np.zeros((4, 4) + shape)
    S[0, 0] = one
    S[1, 1], S[1, 2] = O00, O01
    S[2, 1], S[2, 2] = O10, O11
    S[3, 3] = det
    return S
