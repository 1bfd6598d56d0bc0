import numpy as np
import pytest

from slitprop._timepath import pair_time_integral
from slitprop.errors import DomainError
from slitprop.dit1d import (
    ShutterProblem1D,
    k0_absorbing_closed,
    k0_absorbing_integral,
    k_general_bc,
    psi_gaussian_1d,
)
from slitprop.point_source import _neville
from slitprop.propagators import BoundaryCondition, Particle, g0_free_1d


def _random_problems(rng, n):
    for _ in range(n):
        x0, x = -rng.uniform(0.2, 2.5), rng.uniform(0.2, 2.5)
        t = rng.uniform(0.4, 2.0)
        yield ShutterProblem1D(x0, x, t, rng.uniform(0.1, 0.9) * t)


def _half_line_oracle(p: ShutterProblem1D):
    """Free flight to t1, cut at x < 0, free flight to t; Gaussian damping removed by extrapolation."""
    epss = [2e-2, 1e-2, 5e-3, 2.5e-3]
    u, w = np.polynomial.legendre.leggauss(20)
    vals = []
    for e in epss:
        R = np.sqrt(45.0 / e)
        edges = np.linspace(-R, 0.0, 6001)
        h = edges[1] - edges[0]
        X = (edges[:-1, None] + 0.5 * h * (u + 1)).ravel()
        W = np.tile(0.5 * h * w, edges.size - 1)
        f = g0_free_1d(p.x - X, p.t - p.t1) * g0_free_1d(X - p.x0, p.t1) * np.exp(-e * X ** 2)
        vals.append(np.sum(W * f))
    return _neville(epss, vals)[0]


def test_problem_validation():
    with pytest.raises(DomainError):
        ShutterProblem1D(0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        ShutterProblem1D(-1.0, 1.0, 1.0, t1=1.0)
    with pytest.raises(DomainError):
        ShutterProblem1D(-1.0, np.inf, 1.0)


def test_closed_form_reference_point():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.3)
    ref = k0_absorbing_integral(p)
    assert abs(k0_absorbing_closed(p) - ref.value) < 1e-6 * abs(ref.value)
    assert ref.error < 1e-8


def test_closed_form_matches_time_integral_on_random_problems(rng):
    worst = 0.0
    for p in _random_problems(rng, 50):
        a, b = k0_absorbing_closed(p), k0_absorbing_integral(p).value
        worst = max(worst, abs(a - b) / abs(a))
    assert worst < 1e-6


@pytest.mark.parametrize("x0,x,t,t1", [(-1, 1, 1, 0.5), (-0.6, 1.4, 1.3, 0.2), (-2.0, 0.3, 0.8, 0.6)])
def test_closed_form_matches_half_line_propagation(x0, x, t, t1):
    p = ShutterProblem1D(x0, x, t, t1)
    oracle = _half_line_oracle(p)
    assert abs(k0_absorbing_closed(p) - oracle) < 1e-6 * abs(oracle)


def test_late_opening_blocks_everything():
    # the leak behind a late shutter falls off like sqrt(t - t1)
    leak = [abs(k0_absorbing_closed(ShutterProblem1D(-1.0, 1.0, 1.0, 1.0 - d))) for d in (1e-8, 1e-10)]
    assert leak[0] < 1e-4 * abs(g0_free_1d(2.0, 1.0))
    assert leak[0] / leak[1] == pytest.approx(10.0, rel=1e-3)


def test_open_shutter_is_free_flight():
    for x0, x in [(-1.0, 1.0), (-0.3, 2.0)]:
        p = ShutterProblem1D(x0, x, 1.2, 0.0)
        assert k0_absorbing_closed(p) == pytest.approx(g0_free_1d(x - x0, 1.2), rel=1e-15)
        near = ShutterProblem1D(x0, x, 1.2, 1e-10)
        assert k0_absorbing_closed(near) == pytest.approx(g0_free_1d(x - x0, 1.2), rel=1e-4)


def test_open_shutter_time_integral_is_free_flight():
    p = ShutterProblem1D(-0.8, 1.1, 1.0, 0.0)
    res = k0_absorbing_integral(p)
    assert abs(res.value - g0_free_1d(1.9, 1.0)) < 1e-8 * abs(res.value)


@pytest.mark.parametrize("eta", [0.0, 0.2, 0.25, 0.5, 0.75, 0.9, 1.0])
def test_surface_weight_sweep_recovers_free_flight(eta):
    # any split eta1 = 1 - eta, eta2 = eta of the two surface terms gives the free kernel
    X, x, t = -0.7, 1.3, 1.1

    def weight(tau):
        return (1 - eta) * (-X / tau) + eta * x / (t - tau)

    res = pair_time_integral(weight, abs(X), x, t, 1)
    ref = g0_free_1d(x - X, t)
    assert abs(res.value - ref) < 1e-8 * abs(ref)


def test_free_bc_at_zero_opening_time():
    p = ShutterProblem1D(-1.0, 0.5, 0.7, 0.0, BoundaryCondition.free())
    assert k_general_bc(p) == pytest.approx(g0_free_1d(1.5, 0.7), rel=1e-8)


def test_image_combinations(rng):
    for p in _random_problems(rng, 10):
        mk = lambda bc: ShutterProblem1D(p.x0, p.x, p.t, p.t1, bc)
        d = k_general_bc(mk(BoundaryCondition.dirichlet()))
        n = k_general_bc(mk(BoundaryCondition.neumann()))
        direct = k0_absorbing_closed(p)
        assert (d + n) / 2 == pytest.approx(direct, rel=1e-14)
        image = (d - n) / 2
        mirrored = k0_absorbing_integral(p, source=-p.x0).value
        assert abs(image - mirrored) < 1e-6 * max(abs(image), abs(direct))


def test_general_bc_is_linear_in_weights():
    p = ShutterProblem1D(-0.9, 0.8, 1.0, 0.4)
    l1, l2 = 0.3 - 0.2j, 1.7 + 0.5j
    got = k_general_bc(ShutterProblem1D(p.x0, p.x, p.t, p.t1, BoundaryCondition(l1, l2)))
    d = k_general_bc(ShutterProblem1D(p.x0, p.x, p.t, p.t1, BoundaryCondition.dirichlet()))
    n = k_general_bc(ShutterProblem1D(p.x0, p.x, p.t, p.t1, BoundaryCondition.neumann()))
    # lambda1 K0(X) - lambda2 K0(-X) with K0(X) = (d+n)/2 and K0(-X) = (d-n)/2
    assert got == pytest.approx(l1 * (d + n) / 2 - l2 * (d - n) / 2, rel=1e-14)


def test_units_enter_through_mass_over_hbar():
    a = k0_absorbing_closed(ShutterProblem1D(-1.0, 1.0, 2.0, 0.6, particle=Particle(4.0, 2.0)))
    b = k0_absorbing_closed(ShutterProblem1D(-1.0, 1.0, 1.0, 0.3))
    # m/hbar = 2 with all times doubled is the natural-unit problem
    assert a == pytest.approx(b, rel=1e-13)


# ------------------------------------------------------------ Gaussian packet


def test_narrow_packet_limit():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.3)
    sigma = 1e-3
    psi = psi_gaussian_1d(p, sigma).value
    k = k0_absorbing_closed(p)
    assert abs(psi / (8 * np.pi * sigma ** 2) ** 0.25 - k) < 1e-3 * abs(k)


def test_narrow_packet_error_is_second_order():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.3)
    k = k0_absorbing_closed(p)
    errs = [abs(psi_gaussian_1d(p, s).value / (8 * np.pi * s * s) ** 0.25 - k) for s in (0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def _spread_then_cut(p: ShutterProblem1D, sigma):
    """Analytic free spreading of the packet up to t1, then a composite Gauss rule over X < 0."""
    x0, x, t, t1 = p.x0, p.x, p.t, p.t1
    a = 1 + 1j * t1 / (2 * sigma ** 2)
    norm = (2 * np.pi * sigma ** 2) ** -0.25 * a ** -0.5
    width = sigma * abs(a)
    u, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(x0 - 12 * width, 0.0, 40001)
    h = edges[1] - edges[0]
    X = (edges[:-1, None] + 0.5 * h * (u + 1)).ravel()
    W = np.tile(0.5 * h * w, edges.size - 1)
    f = g0_free_1d(x - X, t - t1) * norm * np.exp(-(X - x0) ** 2 / (4 * sigma ** 2 * a))
    return np.sum(W * f)


def test_packet_matches_spread_then_cut_oracle():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.2)
    got = psi_gaussian_1d(p, 0.01)
    oracle = _spread_then_cut(p, 0.01)
    assert abs(got.value - oracle) < 1e-6 * abs(oracle)


def test_packet_rejects_bad_width():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.2)
    for s in (0.0, -1.0, np.nan):
        with pytest.raises(DomainError):
            psi_gaussian_1d(p, s)


def test_packet_intensity_ignores_global_phase():
    p = ShutterProblem1D(-1.0, 1.0, 1.0, 0.2)
    psi = psi_gaussian_1d(p, 0.05).value
    for phase in (0.3, 2.0, -1.1):
        assert abs(np.exp(1j * phase) * psi) ** 2 == pytest.approx(abs(psi) ** 2, rel=1e-14)


# ------------------------------------------------------------ diffraction in time


def test_early_opening_approaches_free_flight_monotonically():
    xs = np.linspace(0.1, 1.0, 46)
    devs = []
    for t1 in (0.05, 0.02, 0.01, 0.005, 0.002):
        ratio = [abs(k0_absorbing_closed(ShutterProblem1D(-1.0, x, 1.0, t1))) / abs(g0_free_1d(x + 1, 1.0))
                 for x in xs]
        devs.append(np.max(np.abs(np.array(ratio) - 1)))
    assert all(a > b for a, b in zip(devs, devs[1:]))


def test_transient_overshoots_on_lit_side_of_edge():
    # the classical edge sits where x t1/t + x0 (t - t1)/t = 0
    t1 = 0.1
    edge = (1 - t1) / t1
    xs = np.linspace(0.05, 2 * edge, 401)
    ratio = np.array([abs(k0_absorbing_closed(ShutterProblem1D(-1.0, x, 1.0, t1))) / abs(g0_free_1d(x + 1, 1.0))
                      for x in xs])
    lit, dark = xs < edge, xs > edge
    assert ratio[lit].max() > 1.15
    assert ratio[dark].max() < 0.5
    at_edge = abs(k0_absorbing_closed(ShutterProblem1D(-1.0, edge, 1.0, t1))) / abs(g0_free_1d(edge + 1, 1.0))
    assert at_edge == pytest.approx(0.5, rel=1e-12)
