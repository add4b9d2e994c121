"""Chart geometry: frozen metric values, flatness, round trips, frames."""
import numpy as np
import pytest

from susy2d import geometry as geo


def sample_points(chart, n, rng):
    """Random interior points, kept a little away from degenerate loci."""
    if chart.kind == geo.CARTESIAN:
        return rng.uniform(-5, 5, n), rng.uniform(-5, 5, n)
    if chart.kind == geo.POLAR:
        return rng.uniform(0.05, 6, n), rng.uniform(0, 2 * np.pi, n)
    if chart.kind == geo.PARABOLIC:
        return rng.uniform(-3, 3, n), rng.uniform(0.05, 3, n)
    if chart.kind == geo.ELLIPTIC:
        d = chart.d
        return d * (1 + rng.uniform(0.03, 3, n)), d * rng.uniform(-0.97, 0.97, n)
    return chart.beta + rng.uniform(0.03, 3, n), rng.uniform(0, 2 * np.pi, n)


ALL_CHARTS = [
    geo.cartesian(),
    geo.polar(),
    geo.parabolic(),
    geo.elliptic_algebraic(1.0),
    geo.elliptic_algebraic(2.5),
    geo.elliptic_trig(1.0),
    geo.elliptic_trig(0.7, beta=0.4),
]

CURVED_IDS = [f"{c.kind}-d{c.d}-b{c.beta}" for c in ALL_CHARTS]


# ---------------------------------------------------------------- frozen values

def test_elliptic_metric_frozen_point():
    ch = geo.elliptic_algebraic(1.0)
    m = geo.metric(ch, 2.0, 0.0)
    assert m.g11 == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert m.g22 == pytest.approx(4.0, rel=1e-14)
    assert m.sqrtg == pytest.approx(4.0 / np.sqrt(3.0), rel=1e-14)
    assert m.e11 == pytest.approx(np.sqrt(3.0) / 2.0, rel=1e-14)
    assert m.e22 == pytest.approx(0.5, rel=1e-14)


def test_polar_metric_frozen_point():
    m = geo.metric(geo.polar(), 3.0, 1.0)
    assert m.g11 == 1.0
    assert m.g22 == pytest.approx(9.0, rel=1e-14)
    assert m.e22 == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert m.sqrtg == pytest.approx(3.0, rel=1e-14)


def test_parabolic_metric_frozen_point():
    m = geo.metric(geo.parabolic(), 1.0, 2.0)
    assert m.g11 == pytest.approx(5.0, rel=1e-14)
    assert m.g22 == pytest.approx(5.0, rel=1e-14)
    assert m.sqrtg == pytest.approx(5.0, rel=1e-14)


def test_trig_metric_matches_algebraic_pullback():
    ch = geo.elliptic_trig(1.3, beta=0.2)
    xi, eta = 1.1, 0.8
    m = geo.metric(ch, xi, eta)
    w = xi - ch.beta
    expect = ch.d**2 * (np.cosh(w) ** 2 - np.cos(eta) ** 2)
    assert m.g11 == pytest.approx(expect, rel=1e-14)
    assert m.g22 == pytest.approx(expect, rel=1e-14)


def test_spin_connection_frozen_values():
    c = geo.connection(geo.polar(), 2.0, 0.3)
    assert c.omega1 == pytest.approx(-0.5, rel=1e-14)
    assert c.omega2 == 0.0

    c = geo.connection(geo.elliptic_algebraic(1.0), 2.0, 0.0)
    assert c.omega1 == pytest.approx(-np.sqrt(3.0) / 4.0, rel=1e-13)
    assert c.omega2 == pytest.approx(0.0, abs=1e-15)

    # parabolic: omega1 = -xi1 / rho^3, omega2 = +xi2 / rho^3
    c = geo.connection(geo.parabolic(), 1.0, 2.0)
    assert c.omega1 == pytest.approx(-1.0 / 5.0**1.5, rel=1e-13)
    assert c.omega2 == pytest.approx(2.0 / 5.0**1.5, rel=1e-13)


def test_christoffel_polar_frozen():
    c = geo.connection(geo.polar(), 2.0, 1.0)
    g = c.gamma
    assert g[0, 1, 1] == pytest.approx(-2.0)      # G^r_{phi phi} = -r
    assert g[1, 0, 1] == pytest.approx(0.5)       # G^phi_{r phi} = 1/r
    assert g[1, 1, 0] == pytest.approx(0.5)
    assert np.count_nonzero(g) == 3


def test_spinor_change_frozen_matrices():
    S = geo.spinor_change(geo.cartesian(), 0.3, -0.2)
    np.testing.assert_allclose(S, np.eye(4), atol=1e-15)

    # algebraic elliptic frame reflects: det O = -1
    S = geo.spinor_change(geo.elliptic_algebraic(1.0), 2.0, 0.0)
    expect = np.zeros((4, 4))
    expect[0, 0] = 1.0
    expect[1, 2] = expect[2, 1] = 1.0
    expect[3, 3] = -1.0
    np.testing.assert_allclose(S, expect, atol=1e-14)

    S = geo.spinor_change(geo.polar(), 1.7, np.pi / 2)
    expect = np.eye(4)
    expect[1:3, 1:3] = [[0.0, -1.0], [1.0, 0.0]]
    np.testing.assert_allclose(S, expect, atol=1e-14)


# ------------------------------------------------------------------ properties

@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_flatness(chart):
    rng = np.random.default_rng(11)
    q1, q2 = sample_points(chart, 1000, rng)
    R = geo.curvature_scalar(chart, q1, q2)
    assert np.max(np.abs(R)) <= 1e-8


@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_round_trip(chart):
    rng = np.random.default_rng(12)
    q1, q2 = sample_points(chart, 1000, rng)
    x1, x2 = geo.to_cartesian(chart, q1, q2)
    p1, p2 = geo.from_cartesian(chart, x1, x2)
    assert np.max(np.abs(p1 - q1)) <= 1e-12 * max(1.0, np.max(np.abs(q1)))
    assert np.max(np.abs(p2 - q2)) <= 1e-12 * max(1.0, np.max(np.abs(q2)))


@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_spinor_change_orthogonal(chart):
    rng = np.random.default_rng(13)
    q1, q2 = sample_points(chart, 500, rng)
    S = geo.spinor_change(chart, q1, q2)
    StS = np.einsum("ji...,jk...->ik...", S, S)
    assert np.max(np.abs(StS - np.eye(4)[:, :, None])) <= 1e-12


@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_christoffel_symmetric_lower_indices(chart):
    rng = np.random.default_rng(14)
    q1, q2 = sample_points(chart, 200, rng)
    g = geo.connection(chart, q1, q2).gamma
    np.testing.assert_allclose(g[:, 0, 1], g[:, 1, 0], atol=1e-14)


@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_spin_connection_against_finite_differences(chart):
    """Independent cross-check of the closed-form metric derivatives:
    omega1 = -e1 d1(g22)/(2 g22), omega2 = +e2 d2(g11)/(2 g11) with the
    partials taken by central differences of metric()."""
    rng = np.random.default_rng(15)
    q1, q2 = sample_points(chart, 200, rng)
    h = 1e-5
    m = geo.metric(chart, q1, q2)
    c = geo.connection(chart, q1, q2)

    d1g22 = (geo.metric(chart, q1 + h, q2).g22
             - geo.metric(chart, q1 - h, q2).g22) / (2 * h)
    d2g11 = (geo.metric(chart, q1, q2 + h).g11
             - geo.metric(chart, q1, q2 - h).g11) / (2 * h)
    om1 = -m.e11 * d1g22 / (2 * m.g22)
    om2 = m.e22 * d2g11 / (2 * m.g11)

    scale = 1.0 + np.max(np.abs(om1)) + np.max(np.abs(om2))
    assert np.max(np.abs(c.omega1 - om1)) <= 1e-6 * scale
    assert np.max(np.abs(c.omega2 - om2)) <= 1e-6 * scale


@pytest.mark.parametrize("chart", ALL_CHARTS, ids=CURVED_IDS)
def test_divergence_identities(chart):
    """(1/sqrt g) d1(e1 sqrt g) = -omega1 and (1/sqrt g) d2(e2 sqrt g) = +omega2,
    the combinations through which the spin connection enters the operators."""
    rng = np.random.default_rng(16)
    q1, q2 = sample_points(chart, 200, rng)
    h = 1e-5

    def f1(a, b):
        m = geo.metric(chart, a, b)
        return m.e11 * m.sqrtg

    def f2(a, b):
        m = geo.metric(chart, a, b)
        return m.e22 * m.sqrtg

    m = geo.metric(chart, q1, q2)
    c = geo.connection(chart, q1, q2)
    lhs1 = (f1(q1 + h, q2) - f1(q1 - h, q2)) / (2 * h) / m.sqrtg
    lhs2 = (f2(q1, q2 + h) - f2(q1, q2 - h)) / (2 * h) / m.sqrtg
    scale = 1.0 + np.max(np.abs(c.omega1)) + np.max(np.abs(c.omega2))
    assert np.max(np.abs(lhs1 + c.omega1)) <= 1e-6 * scale
    assert np.max(np.abs(lhs2 - c.omega2)) <= 1e-6 * scale


def test_foci_recovery():
    rng = np.random.default_rng(17)
    for chart in (geo.elliptic_algebraic(1.5), geo.elliptic_trig(1.5, beta=0.3)):
        q1, q2 = sample_points(chart, 400, rng)
        r1, r2 = geo.focal_radii(chart, q1, q2)
        x1, x2 = geo.to_cartesian(chart, q1, q2)
        np.testing.assert_allclose(r1, np.hypot(x1 - 1.5, x2), rtol=0, atol=1e-11)
        np.testing.assert_allclose(r2, np.hypot(x1 + 1.5, x2), rtol=0, atol=1e-11)
        u, v = geo.elliptic_uv(chart, q1, q2)
        np.testing.assert_allclose(u, (r1 + r2) / 2, atol=1e-12)
        np.testing.assert_allclose(v, (r2 - r1) / 2, atol=1e-12)


def test_trig_and_algebraic_charts_agree():
    """Same physical point, same (u, v), same metric volume element."""
    rng = np.random.default_rng(18)
    tr = geo.elliptic_trig(1.2, beta=0.5)
    al = geo.elliptic_algebraic(1.2)
    xi = tr.beta + rng.uniform(0.1, 2.5, 300)
    eta = rng.uniform(0.05, np.pi - 0.05, 300)     # keep to the upper half-plane
    x1, x2 = geo.to_cartesian(tr, xi, eta)
    u, v = geo.from_cartesian(al, x1, x2)
    uu, vv = geo.elliptic_uv(tr, xi, eta)
    np.testing.assert_allclose(u, uu, rtol=1e-10)
    np.testing.assert_allclose(v, vv, rtol=0, atol=1e-10)


# --------------------------------------------------------------- domain errors

def test_domain_errors():
    with pytest.raises(geo.DomainError):
        geo.metric(geo.polar(), 0.0, 1.0)
    with pytest.raises(geo.DomainError):
        geo.metric(geo.polar(), 1.0, 2 * np.pi)
    with pytest.raises(geo.DomainError):
        geo.metric(geo.elliptic_algebraic(1.0), 1.0, 0.0)       # u = d
    with pytest.raises(geo.DomainError):
        geo.metric(geo.elliptic_algebraic(1.0), 2.0, 1.0)       # v = d
    with pytest.raises(geo.DomainError):
        geo.metric(geo.parabolic(), 1.0, 0.0)
    with pytest.raises(geo.DomainError):
        geo.metric(geo.elliptic_trig(1.0, beta=0.2), 0.1, 1.0)  # xi < beta

    # closed boundary is fine for the forward map
    x1, x2 = geo.to_cartesian(geo.elliptic_algebraic(1.0), 1.0, 0.5)
    assert x2 == pytest.approx(0.0, abs=1e-15)

    with pytest.raises(geo.DegeneratePointError):
        geo.from_cartesian(geo.polar(), 0.0, 0.0)
    with pytest.raises(geo.DegeneratePointError):
        geo.from_cartesian(geo.parabolic(), 1.0, 0.0)
    with pytest.raises(geo.DegeneratePointError):
        geo.from_cartesian(geo.elliptic_algebraic(1.0), 0.3, 0.0)   # focal segment
    with pytest.raises(geo.DegeneratePointError):
        geo.from_cartesian(geo.elliptic_algebraic(1.0), 2.0, 0.0)   # beyond focus
    with pytest.raises(geo.DomainError):
        geo.from_cartesian(geo.elliptic_algebraic(1.0), 0.3, -1.0)  # lower half
    with pytest.raises(geo.DegeneratePointError):
        geo.from_cartesian(geo.elliptic_trig(1.0), 0.3, 0.0)

    with pytest.raises(ValueError):
        geo.Chart("spherical")
    with pytest.raises(ValueError):
        geo.elliptic_algebraic(-1.0)
