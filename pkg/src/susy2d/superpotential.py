"""Superpotentials for the planar supersymmetric Coulomb problems.

The two-center family solves the Poisson equation (hbar/2m) lap W = V with
V = -alpha1/r1 - alpha2/r2, charges alpha1 = alpha >= alpha2 = delta*alpha
sitting at (+d, 0) and (-d, 0). In elliptic coordinates the equation
separates, W(u, v) = F(u) + G(v), with

    F(u) = -(2 m alpha (1+delta)/hbar) u + (kappa/2) L(u)^2 + c1 L(u) + c3
    G(v) = +(2 m alpha (1-delta)/hbar) v - (kappa/2) A(v)^2 + c2 A(v) + c4

where L = arccosh(u/d), A = arcsin(v/d), kappa is the separation constant
and c1..c4 integrate the homogeneous parts (all harmonic, so every member
of the family sources the same V). kappa = c_i = 0 is the simple form used
everywhere downstream; the constants exist for Poisson-identity tests.

Single-center superpotentials: W = -(2 m at/hbar) r in polar coordinates
with the summed charge at = alpha (1+delta), and W = -(m alpha/hbar)
(xi1^2 + xi2^2) in parabolic coordinates for the center at the focus. The
literature's scaled displays correspond to m = charge = 1 here; constants
stay explicit so the collapse and escape sweeps can drive them.

A quadratic cartesian superpotential (isotropic oscillator) is included as
a spectral benchmark: its sector spectra are known in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from . import geometry as geo
from .geometry import Chart, Scalar


@dataclass(frozen=True)
class PhysicalParams:
    """Masses and charges of the two-center problem.

    alpha is the stronger charge, delta in (0, 1] the ratio of the weaker
    to the stronger one, d the focal half-distance.
    """

    m: float = 1.0
    hbar: float = 1.0
    alpha: float = 1.0
    delta: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.hbar > 0 and self.alpha > 0):
            raise ValueError("m, hbar, alpha must be positive")
        if not (0 < self.delta <= 1):
            raise ValueError("delta must lie in (0, 1]")
        if not self.d > 0:
            raise ValueError("d must be positive")


@dataclass(frozen=True)
class TwoCenterConstants:
    """Separation constant and integration constants of the general family."""

    kappa: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0


Evaluator = Callable[[Scalar, Scalar], Scalar]
GradEvaluator = Callable[[Scalar, Scalar], Tuple[Scalar, Scalar]]
HessEvaluator = Callable[[Scalar, Scalar], Tuple[Scalar, Scalar, Scalar]]


@dataclass(frozen=True)
class Superpotential:
    """W on a chart with exact first and second partial derivatives.

    w maps (q1, q2) to W; grad returns (d1 W, d2 W); hess returns
    (d11 W, d12 W, d22 W). Evaluators are pure and vectorized; they do not
    re-check chart domains, that is the caller's job.
    """

    chart: Chart
    params: PhysicalParams
    w: Evaluator
    grad: GradEvaluator
    hess: HessEvaluator
    family: str
    consts: Optional[TwoCenterConstants] = None


def _require_elliptic(chart: Chart, params: PhysicalParams) -> None:
    if not chart.is_elliptic:
        raise ValueError(
            f"two-center superpotential needs an elliptic chart, got {chart.kind}")
    if chart.d != params.d:
        raise ValueError(
            f"chart focal distance {chart.d} differs from params.d {params.d}")


def two_center_general(chart: Chart, params: PhysicalParams,
                       consts: TwoCenterConstants = TwoCenterConstants(),
                       ) -> Superpotential:
    """Separable two-center family W = F(u) + G(v); see the module docstring.

    On the trigonometric chart the same F + G is pulled back through
    u = d cosh(xi - beta), v = d cos(eta), with the chain rule applied
    exactly (the mixed second partial stays zero).
    """
    _require_elliptic(chart, params)
    d = params.d
    ka = consts.kappa
    slopeF = -2.0 * params.m * params.alpha * (1 + params.delta) / params.hbar
    slopeG = +2.0 * params.m * params.alpha * (1 - params.delta) / params.hbar

    def F(u):
        L = np.arccosh(u / d)
        return slopeF * u + 0.5 * ka * L**2 + consts.c1 * L + consts.c3

    def dF(u):
        L = np.arccosh(u / d)
        return slopeF + (ka * L + consts.c1) / np.sqrt(u**2 - d**2)

    def d2F(u):
        L = np.arccosh(u / d)
        uu = u**2 - d**2
        return ka / uu - (ka * L + consts.c1) * u / uu**1.5

    def G(v):
        A = np.arcsin(v / d)
        return slopeG * v - 0.5 * ka * A**2 + consts.c2 * A + consts.c4

    def dG(v):
        A = np.arcsin(v / d)
        return slopeG + (-ka * A + consts.c2) / np.sqrt(d**2 - v**2)

    def d2G(v):
        A = np.arcsin(v / d)
        vv = d**2 - v**2
        return -ka / vv + (-ka * A + consts.c2) * v / vv**1.5

    if chart.kind == geo.ELLIPTIC:
        def w(q1, q2):
            return F(np.asarray(q1, float)) + G(np.asarray(q2, float))

        def grad(q1, q2):
            q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
            b = np.broadcast(q1, q2)
            return dF(q1) * np.ones(b.shape), dG(q2) * np.ones(b.shape)

        def hess(q1, q2):
            q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
            b = np.broadcast(q1, q2)
            one = np.ones(b.shape)
            return d2F(q1) * one, np.zeros(b.shape), d2G(q2) * one
    else:
        beta = chart.beta

        def w(q1, q2):
            wq = np.asarray(q1, float) - beta
            return F(d * np.cosh(wq)) + G(d * np.cos(np.asarray(q2, float)))

        def grad(q1, q2):
            wq = np.asarray(q1, float) - beta
            eta = np.asarray(q2, float)
            b = np.broadcast(wq, eta)
            one = np.ones(b.shape)
            g1 = dF(d * np.cosh(wq)) * d * np.sinh(wq)
            g2 = -dG(d * np.cos(eta)) * d * np.sin(eta)
            return g1 * one, g2 * one

        def hess(q1, q2):
            wq = np.asarray(q1, float) - beta
            eta = np.asarray(q2, float)
            b = np.broadcast(wq, eta)
            one = np.ones(b.shape)
            u = d * np.cosh(wq)
            v = d * np.cos(eta)
            h11 = d2F(u) * (d * np.sinh(wq))**2 + dF(u) * d * np.cosh(wq)
            h22 = d2G(v) * (d * np.sin(eta))**2 - dG(v) * d * np.cos(eta)
            return h11 * one, np.zeros(b.shape), h22 * one

    return Superpotential(chart=chart, params=params, w=w, grad=grad,
                          hess=hess, family="two-center-general", consts=consts)


def two_center_simple(chart: Chart, params: PhysicalParams) -> Superpotential:
    """The kappa = c_i = 0 member: W = -(2 m alpha/hbar)((1+delta) u - (1-delta) v).

    Linear in (u, v), so the supercharges it generates have Coulomb-free
    diagonal blocks plus the two-center potential. Equal to
    -(2 m alpha/hbar)(r1 + delta r2) in terms of the focal distances.
    """
    sp = two_center_general(chart, params)
    return Superpotential(chart=sp.chart, params=sp.params, w=sp.w,
                          grad=sp.grad, hess=sp.hess,
                          family="two-center-simple",
                          consts=TwoCenterConstants())


def kepler_polar(params: PhysicalParams) -> Superpotential:
    """Single-center Coulomb superpotential W = -(2 m at/hbar) r on the polar
    chart, with the summed charge at = alpha (1 + delta)."""
    at = params.alpha * (1 + params.delta)
    slope = -2.0 * params.m * at / params.hbar

    def w(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        return slope * q1 * np.ones(np.broadcast(q1, q2).shape)

    def grad(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        return slope * np.ones(shape), np.zeros(shape)

    def hess(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        z = np.zeros(shape)
        return z, z.copy(), z.copy()

    return Superpotential(chart=geo.polar(), params=params, w=w, grad=grad,
                          hess=hess, family="kepler-polar")


def kepler_parabolic(params: PhysicalParams) -> Superpotential:
    """Single center of strength alpha at the origin of the parabolic chart:
    W = -(m alpha/hbar)(xi1^2 + xi2^2)."""
    c = -params.m * params.alpha / params.hbar

    def w(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        return c * (q1**2 + q2**2)

    def grad(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        one = np.ones(shape)
        return 2 * c * q1 * one, 2 * c * q2 * one

    def hess(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        one = np.ones(shape)
        return 2 * c * one, np.zeros(shape), 2 * c * one

    return Superpotential(chart=geo.parabolic(), params=params, w=w,
                          grad=grad, hess=hess, family="kepler-parabolic")


def oscillator(params: PhysicalParams, omega: float = 1.0) -> Superpotential:
    """Isotropic oscillator W = -(m omega/2)(x^2 + y^2) on the cartesian chart.

    Not a Coulomb member; kept as a spectral benchmark with closed-form
    sector spectra (scalar sectors are shifted 2d oscillators).
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    c = -0.5 * params.m * omega

    def w(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        return c * (q1**2 + q2**2)

    def grad(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        one = np.ones(shape)
        return 2 * c * q1 * one, 2 * c * q2 * one

    def hess(q1, q2):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        shape = np.broadcast(q1, q2).shape
        one = np.ones(shape)
        return 2 * c * one, np.zeros(shape), 2 * c * one

    return Superpotential(chart=geo.cartesian(), params=params, w=w,
                          grad=grad, hess=hess, family="oscillator")


def two_center_potential(params: PhysicalParams, u: Scalar, v: Scalar) -> Scalar:
    """V(u, v) = -alpha (1+delta) u / (u^2 - v^2) - alpha (1-delta) v / (u^2 - v^2),
    the two-center Coulomb potential -alpha1/r1 - alpha2/r2 in elliptic form."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    a = params.alpha
    de = params.delta
    return -(a * (1 + de) * u + a * (1 - de) * v) / (u**2 - v**2)


def poisson_residual(sp: Superpotential, q1: Scalar, q2: Scalar) -> Scalar:
    """(hbar/2m) lap W - V at an interior point of an elliptic chart.

    Vanishes identically on the whole two-center family; a zero or wrong W
    leaves the potential mismatch behind.
    """
    chart = sp.chart
    if not chart.is_elliptic:
        raise ValueError("poisson_residual needs a two-center elliptic chart")
    ginv11, ginv22, c1, c2 = geo.laplacian_coefficients(chart, q1, q2)
    w1, w2 = sp.grad(q1, q2)
    w11, _, w22 = sp.hess(q1, q2)
    lap = ginv11 * w11 + ginv22 * w22 + c1 * w1 + c2 * w2
    u, v = geo.elliptic_uv(chart, q1, q2)
    V = two_center_potential(sp.params, u, v)
    return (sp.params.hbar / (2.0 * sp.params.m)) * lap - V
