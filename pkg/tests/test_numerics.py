import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from slitprop.errors import ConvergenceError, DomainError
from slitprop.numerics import (
    DEFAULT_SPEC,
    QuadratureSpec,
    erfc_complex,
    fresnel_c,
    fresnel_s,
    integrate_1d,
    integrate_2d,
    real_roots_in_interval,
)


def quad_complex(f, a, b):
    """mpmath quadrature of a complex integrand, split into unit-length pieces."""
    pts = np.linspace(a, b, int(np.ceil(b - a)) * 8 + 1)
    return complex(mpmath.quad(lambda w: f(w), [mpmath.mpf(float(p)) for p in pts]))


# ---------------------------------------------------------------- specs

def test_spec_defaults_and_replace():
    s = DEFAULT_SPEC.replace(relative_tolerance=1e-6)
    assert s.relative_tolerance == 1e-6
    assert s.max_subdivisions == DEFAULT_SPEC.max_subdivisions


@pytest.mark.parametrize("kw", [
    {"relative_tolerance": 0.0},
    {"absolute_tolerance": -1.0},
    {"max_subdivisions": 0},
    {"panel_oscillation_budget": 0.0},
])
def test_spec_rejects_invalid(kw):
    with pytest.raises(DomainError):
        QuadratureSpec(**kw)


# ---------------------------------------------------------------- Fresnel

def test_fresnel_zero():
    assert fresnel_c(0.0) == 0.0
    assert fresnel_s(0.0) == 0.0


def test_fresnel_odd():
    assert fresnel_c(-1.3) == pytest.approx(-fresnel_c(1.3), abs=1e-15)
    assert fresnel_s(-0.7) == pytest.approx(-fresnel_s(0.7), abs=1e-15)


def test_fresnel_at_one_matches_quadrature():
    c = float(mpmath.quad(lambda w: mpmath.cos(mpmath.pi * w * w / 2), [0, 1]))
    s = float(mpmath.quad(lambda w: mpmath.sin(mpmath.pi * w * w / 2), [0, 1]))
    assert abs(fresnel_c(1.0) - c) < 1e-12
    assert abs(fresnel_s(1.0) - s) < 1e-12


def test_fresnel_matches_mpmath_on_random_points(rng):
    u = rng.uniform(-10, 10, 1000)
    c = np.array([float(mpmath.fresnelc(v)) for v in u])
    s = np.array([float(mpmath.fresnels(v)) for v in u])
    assert np.max(np.abs(fresnel_c(u) - c)) < 1e-10
    assert np.max(np.abs(fresnel_s(u) - s)) < 1e-10


def test_fresnel_limits():
    assert fresnel_c(1e6) == pytest.approx(0.5, abs=1e-6)
    assert fresnel_s(1e6) == pytest.approx(0.5, abs=1e-6)


def test_fresnel_rejects_nan():
    with pytest.raises(DomainError):
        fresnel_c(np.nan)
    with pytest.raises(DomainError):
        fresnel_s(np.inf)


# ---------------------------------------------------------------- erfc

def test_erfc_zero():
    assert erfc_complex(0j) == 1 + 0j


def test_erfc_reflection():
    z = 0.5 + 0.5j
    assert abs(erfc_complex(z) + erfc_complex(-z) - 2) < 1e-15


def test_erfc_matches_mpmath_at_one_plus_i():
    ref = complex(mpmath.erfc(mpmath.mpc(1, 1)))
    assert abs(erfc_complex(1 + 1j) - ref) < 1e-12 * abs(ref)


def test_erfc_on_shutter_diagonals(rng):
    # the shutter closed form evaluates erfc on the lines arg z = +-pi/4 (+ pi)
    r = rng.uniform(-30, 30, 200)
    for ang in (np.pi / 4, -np.pi / 4):
        z = r * np.exp(1j * ang)
        got = erfc_complex(z)
        ref = np.array([complex(mpmath.erfc(mpmath.mpc(v.real, v.imag))) for v in z])
        err = np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)
        assert np.max(err) < 1e-10


@given(st.floats(-8, 8), st.floats(-8, 8))
def test_erfc_conjugation(x, y):
    z = complex(x, y)
    assert erfc_complex(z.conjugate()) == pytest.approx(erfc_complex(z).conjugate(), rel=1e-13, abs=1e-300)


def test_erfc_large_argument_no_overflow():
    v = erfc_complex(30 + 0j)
    assert np.isfinite(v) and abs(v) < 1e-300
    assert erfc_complex(-30 + 0j) == pytest.approx(2.0)


def test_erfc_rejects_nan():
    with pytest.raises(DomainError):
        erfc_complex(complex(np.nan, 0))


# ---------------------------------------------------------------- integrate_1d

def test_integrate_constant():
    res = integrate_1d(lambda x: np.ones_like(x), 0.0, 1.0)
    assert res.value == pytest.approx(1.0, abs=1e-14)


def test_integrate_full_periods_vanish():
    res = integrate_1d(lambda w: np.exp(50j * w), 0.0, 2 * np.pi, phase_rate=50.0)
    assert abs(res.value) < 1e-10


def test_integrate_matches_fresnel():
    res = integrate_1d(lambda w: np.cos(np.pi * w * w / 2), 0.0, 1.0)
    assert abs(res.value - fresnel_c(1.0)) < 1e-12


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=11), st.floats(-2, 0), st.floats(0.1, 2))
def test_integrate_polynomials_exactly(coeffs, a, width):
    b = a + width
    c = np.array(coeffs)
    anti = np.polyint(c)
    exact = np.polyval(anti, b) - np.polyval(anti, a)
    res = integrate_1d(lambda x: np.polyval(c, x), a, b)
    scale = max(abs(exact), integrate.quad(lambda x: abs(np.polyval(c, x)), a, b)[0], 1e-300)
    assert abs(res.value - exact) <= 1e-12 * scale


def test_integrate_batched_values():
    k = np.array([1.0, 2.0, 3.0])
    res = integrate_1d(lambda x: np.exp(1j * x[:, None] * k[None, :]), 0.0, 1.0)
    exact = (np.exp(1j * k) - 1) / (1j * k)
    assert np.max(np.abs(res.value - exact)) < 1e-12


def test_integrate_endpoint_singularity():
    res = integrate_1d(lambda x: 1 / np.sqrt(x), 0.0, 1.0)
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_integrate_breakpoints_for_kink():
    res = integrate_1d(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3])
    assert res.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-13)


def test_integrate_error_estimate_is_honest():
    res = integrate_1d(lambda w: np.exp(1j * 40 * w * w), 0.0, 3.0,
                       phase_rate=lambda w: 80 * np.abs(w))
    ref = quad_complex(lambda w: mpmath.expj(40 * w * w), 0.0, 3.0)
    assert abs(res.value - ref) < max(1e-10 * abs(ref), 10 * res.error + 1e-13)


def test_integrate_convergence_error_carries_estimate():
    spec = QuadratureSpec(relative_tolerance=1e-14, max_subdivisions=2)
    with pytest.raises(ConvergenceError) as exc:
        integrate_1d(lambda w: np.exp(1j * 400 * w * w), 0.0, 3.0, spec)
    assert exc.value.estimate is not None
    assert exc.value.error is not None


def test_integrate_rejects_bad_limits():
    with pytest.raises(DomainError):
        integrate_1d(np.ones_like, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_1d(np.ones_like, 0.0, np.inf)


def test_phase_rate_hint_matches_plain_result():
    f = lambda w: np.exp(1j * 30 * w)
    plain = integrate_1d(f, 0.0, 5.0)
    hinted = integrate_1d(f, 0.0, 5.0, phase_rate=30.0)
    assert abs(plain.value - hinted.value) < 1e-11


def test_phase_scale_relaxes_floor_only():
    f = lambda w: np.exp(1j * w)
    a = integrate_1d(f, 0.0, 1.0)
    b = integrate_1d(f, 0.0, 1.0, phase_scale=1e6)
    exact = (np.exp(1j) - 1) / 1j
    assert abs(a.value - exact) < 1e-13
    assert abs(b.value - exact) < 1e-8


# ---------------------------------------------------------------- integrate_2d

def test_integrate_2d_constant():
    res = integrate_2d(lambda u, v: np.ones_like(u), ((0, 1), (0, 1)))
    assert res.value == pytest.approx(1.0, abs=1e-14)


def test_integrate_2d_separable():
    g = lambda w: np.exp(3j * w)
    res = integrate_2d(lambda u, v: g(u) * g(v), ((0, 1), (0, 1)))
    one = integrate_1d(g, 0, 1).value
    assert abs(res.value - one * one) < 1e-9


def test_integrate_2d_gaussian_phase_against_fresnel():
    # int int exp(i pi (u^2 + v^2) / 2) over [0, 1.7] x [-0.4, 0.9]
    def closed(lo, hi):
        return (fresnel_c(hi) - fresnel_c(lo)) + 1j * (fresnel_s(hi) - fresnel_s(lo))

    res = integrate_2d(lambda u, v: np.exp(0.5j * np.pi * (u * u + v * v)), ((0, 1.7), (-0.4, 0.9)))
    assert abs(res.value - closed(0, 1.7) * closed(-0.4, 0.9)) < 1e-12


def test_integrate_2d_batched():
    k = np.array([0.5, 5.0])
    res = integrate_2d(lambda u, v: np.exp(1j * (u + v))[:, None] ** k[None, :],
                       ((0, 1), (0, 1)), phase_rate=(5.0, 5.0))
    exact = ((np.exp(1j * k) - 1) / (1j * k)) ** 2
    assert np.max(np.abs(res.value - exact)) < 1e-11


def test_integrate_2d_rejects_degenerate_rect():
    with pytest.raises(DomainError):
        integrate_2d(lambda u, v: u, ((0, 0), (0, 1)))


def test_integrate_2d_convergence_error():
    spec = QuadratureSpec(relative_tolerance=1e-14, max_subdivisions=1)
    with pytest.raises(ConvergenceError):
        integrate_2d(lambda u, v: np.exp(1j * 300 * (u * u + v * v)), ((0, 2), (0, 2)), spec)


# ---------------------------------------------------------------- roots

def test_roots_linear():
    assert real_roots_in_interval([1.0, -0.5], 0, 1) == pytest.approx([0.5])


def test_roots_quadratic():
    c = np.polymul([1, -0.25], [1, -0.75])
    assert real_roots_in_interval(c, 0, 1) == pytest.approx([0.25, 0.75], abs=1e-14)


def test_roots_double_root_collapsed():
    c = np.polymul([1, -0.4], [1, -0.4])
    r = real_roots_in_interval(c, 0, 1)
    assert r.size == 1 and r[0] == pytest.approx(0.4, abs=1e-7)


def test_roots_open_interval_excludes_endpoints():
    assert real_roots_in_interval([1.0, -1.0], 0, 1).size == 0


def test_roots_rejects_zero_and_high_degree():
    with pytest.raises(DomainError):
        real_roots_in_interval([0, 0, 0], 0, 1)
    with pytest.raises(DomainError):
        real_roots_in_interval(np.ones(8), 0, 1)
    with pytest.raises(DomainError):
        real_roots_in_interval([1, 0], 1, 0)


def _scan_sign_changes(c, lo, hi, n=10 ** 6):
    x = np.linspace(lo, hi, n + 1)[1:-1]
    v = np.polyval(c, x)
    idx = np.nonzero(np.sign(v[1:]) * np.sign(v[:-1]) < 0)[0]
    return 0.5 * (x[idx] + x[idx + 1])


def test_roots_find_every_scan_sign_change(rng):
    for _ in range(40):
        c = rng.normal(size=6)
        found = real_roots_in_interval(c, -2.0, 2.0)
        scan = _scan_sign_changes(c, -2.0, 2.0)
        for s in scan:
            assert np.min(np.abs(found - s)) < 1e-5
        for r in found:
            scale = np.max(np.abs(c)) * np.sum(np.abs(r) ** np.arange(6))
            assert abs(np.polyval(c, r)) <= 1e-12 * scale


def test_roots_of_gravity_quintic_match_scan():
    from slitprop.gravity import tcg_polynomial

    r, r1, t, g = np.array([0.3, -0.2, 2.0]), np.array([0.1, 0.05, 1.0]), 1.5, 3.0
    c = tcg_polynomial(r, r1, t, g)
    found = real_roots_in_interval(c, 0.0, t)
    scan = _scan_sign_changes(c, 0.0, t)
    assert found.size == scan.size
    assert np.max(np.abs(found - scan)) < 1e-6
