import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graftlab import (
    ConformalFamily,
    FourierSolution,
    GlobalField,
    GraftedCollar,
    QuadDiffModes,
    SolvabilityError,
    TraceModes,
    extended_hyperbolic_neumann,
    geodesic_oracle,
    hyperbolic_neumann,
    matched_global_field,
    pinned_means,
    solve_amended_variation,
    solve_flat_variation,
)
from graftlab import hypersolve
from graftlab.variation import collocation_variation_modes

ELL, S = 2 * np.pi, 2.0


def _sol(**kw):
    return FourierSolution(ell=ELL, s=S, **kw)


def test_rejects_linear_coefficient():
    trace = _sol(c0=0.1).neumann_trace_flat("left")
    with pytest.raises(SolvabilityError):
        solve_flat_variation(trace, 0.0)


@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_solvability_boundary_property(c0):
    trace = TraceModes(side="left", kind="neumann_flat", ell=ELL, mean=c0)
    if abs(c0) > 1e-12:
        with pytest.raises(SolvabilityError):
            solve_flat_variation(trace, 0.0)
    else:
        assert solve_flat_variation(trace, 0.3).mean == 0.3


def test_single_mode_coefficient():
    v = solve_flat_variation(_sol(modes={1: (1.0, 0.0)}).neumann_trace_flat("left"), 0.0)
    assert v.modes[1] == pytest.approx(-np.sinh(1.0) / 2)


def test_constant_field_when_no_modes():
    v = solve_flat_variation(_sol().neumann_trace_flat("right"), 0.7)
    y = np.linspace(0, ELL, 11)
    assert np.allclose(v.reconstruct(y), 0.7)


def test_hyperbolic_neumann_values():
    sol = _sol(modes={1: (1.0, 0.0)})
    v = solve_flat_variation(sol.neumann_trace_flat("left"), 0.0)
    trace = hyperbolic_neumann(v)
    assert trace.modes[1] == pytest.approx(-2 * np.sinh(1.0))
    assert hyperbolic_neumann(
        solve_flat_variation(_sol().neumann_trace_flat("left"), 0.5)
    ).mean == pytest.approx(1.0)


def test_hyperbolic_neumann_is_spectral_second_order_form():
    # trace equals -2 (V_yy - V), checked with trigonometric differentiation
    rng = np.random.default_rng(0)
    sol = _sol(
        d0=0.2,
        modes={n: (rng.standard_normal() + 1j * rng.standard_normal(),
                   rng.standard_normal() + 1j * rng.standard_normal()) for n in (1, 2, 3)},
    )
    v = solve_flat_variation(sol.neumann_trace_flat("left"), 0.4)
    m = 64
    y = np.arange(m) * (ELL / m)
    vals = v.reconstruct(y)
    coefs = np.fft.fft(vals) / m
    k = 2 * np.pi / ELL
    vyy = np.real(np.fft.ifft(coefs * (1j * k * np.fft.fftfreq(m, 1 / m)) ** 2) * m)
    expected = -2 * (vyy - vals)
    assert np.max(np.abs(hyperbolic_neumann(v).reconstruct(y) - expected)) < 1e-9


def test_amended_reduces_at_zero_quad():
    sol = _sol(modes={1: (0.3 + 1j, -0.2j), 2: (0.1, 0.4)})
    q0 = QuadDiffModes(ell=ELL, s=S)
    trace = sol.neumann_trace_flat("left")
    v = solve_flat_variation(trace, 0.9)
    w = solve_amended_variation(trace, q0, 0.9)
    assert w.amended and not v.amended
    assert w.mean == v.mean and w.modes == v.modes


def test_amended_shift_examples():
    zero = _sol()
    q = QuadDiffModes(ell=ELL, s=S, modes={1: (1.0, 0.0)})
    w = solve_amended_variation(zero.neumann_trace_flat("left"), q, 0.0)
    assert w.modes[1] == pytest.approx(-1j * np.cosh(1.0))

    q = QuadDiffModes(ell=ELL, s=S, modes={1: (0.0, 1.0)})
    wl = solve_amended_variation(zero.neumann_trace_flat("left"), q, 0.0)
    wr = solve_amended_variation(zero.neumann_trace_flat("right"), q, 0.0)
    assert wl.modes[1] == pytest.approx(1j * np.sinh(1.0))
    assert wr.modes[1] == pytest.approx(-1j * np.sinh(1.0))


def test_extended_neumann_example_and_reality():
    zero = _sol()
    q = QuadDiffModes(ell=ELL, s=S, modes={1: (1.0, 0.0)})
    w = solve_amended_variation(zero.neumann_trace_flat("left"), q, 0.0)
    trace = extended_hyperbolic_neumann(w)
    assert trace.modes[1] == pytest.approx(-4j * np.cosh(1.0))
    y = np.linspace(0, ELL, 33)
    vals = trace.reconstruct(y)
    assert np.all(np.isreal(vals))

    q0 = QuadDiffModes(ell=ELL, s=S)
    sol = _sol(modes={2: (1.0, 0.5j)})
    v = solve_flat_variation(sol.neumann_trace_flat("right"), 0.1)
    w0 = solve_amended_variation(sol.neumann_trace_flat("right"), q0, 0.1)
    assert extended_hyperbolic_neumann(w0).modes == hyperbolic_neumann(v).modes


def test_defining_ode_residual_per_mode():
    rng = np.random.default_rng(1)
    sol = _sol(modes={n: (rng.standard_normal() + 1j * rng.standard_normal(),) * 2 for n in (1, 4)})
    N = sol.neumann_trace_flat("left")
    v = solve_flat_variation(N, 0.0)
    hy = hyperbolic_neumann(v)
    for n in v.modes:
        k = 2 * np.pi * n / ELL
        # flat regime: V_yy = -1/2 (d/dx H)_0
        assert abs(-(k**2) * v.modes[n] + 0.5 * N.modes[n]) < 1e-10
        # hyperbolic regime: -2 (V_yy - V) reproduces the Neumann trace
        assert abs(-2 * (-(k**2) - 1) * v.modes[n] - hy.modes[n]) < 1e-10


def test_rotation_equivariance():
    sol = _sol(modes={1: (0.4 + 0.1j, -0.3j), 3: (0.2, 0.1 + 0.7j)})
    y0 = 1.234
    k = 2 * np.pi / ELL
    shifted = FourierSolution(
        ell=ELL,
        s=S,
        modes={n: (c * np.exp(-1j * k * n * y0), d * np.exp(-1j * k * n * y0))
               for n, (c, d) in sol.modes.items()},
    )
    v = solve_flat_variation(sol.neumann_trace_flat("left"), 0.2)
    vs = solve_flat_variation(shifted.neumann_trace_flat("left"), 0.2)
    y = np.linspace(0, ELL, 13)
    assert np.allclose(vs.reconstruct(y), v.reconstruct(y - y0), atol=1e-12)
    assert np.allclose(vs.reconstruct(y), v.rotated(y0).reconstruct(y), atol=1e-12)


def test_closed_form_vs_collocation_small():
    rng = np.random.default_rng(2)
    sol = _sol(modes={n: (rng.standard_normal() + 1j * rng.standard_normal(),
                          rng.standard_normal() + 1j * rng.standard_normal()) for n in range(1, 6)})
    N = sol.neumann_trace_flat("right")
    v = solve_flat_variation(N, 0.05)
    m = 64
    y = np.arange(m) * (ELL / m)
    coll = collocation_variation_modes(-0.5 * N.reconstruct(y), ELL, 0.05)
    for n in v.modes:
        assert abs(coll[n] - v.modes[n]) < 1e-8


def test_vanishing_mechanism_for_pure_means():
    # with no oscillating modes the mean-mode seam balance pins both free
    # constants to dtn-proportional values; the slice condition then kills d0
    dtn0 = hypersolve.dtn(0, ELL, 1.0)
    lam0, rho0 = pinned_means(dtn0, 0.0, 0.0)
    assert lam0 == rho0 == 0.0
    d0 = 0.37
    lam0, rho0 = pinned_means(dtn0, d0, d0)
    # slice condition lam0 - rho0 = -s d0 / 2 forces (2 dtn0 - s) d0 = 0
    coeff = 2 * dtn0 - S
    assert coeff < 0
    assert lam0 - rho0 == pytest.approx(-dtn0 * d0)


def test_matched_field_continuity():
    rng = np.random.default_rng(3)
    chart = GraftedCollar(ell=ELL, s=S, a=1.0)
    sol = _sol(d0=0.3, modes={1: (0.2 + 0.1j, -0.05j), 2: (0.1, 0.07)})
    vl = solve_flat_variation(sol.neumann_trace_flat("left"), 0.21)
    vr = solve_flat_variation(sol.neumann_trace_flat("right"), -0.13)
    fld = matched_global_field(chart, sol, vl, vr)
    y = rng.uniform(0, ELL, 16)
    for x0, sgn in ((-S / 2, -1.0), (S / 2, 1.0)):
        inner = fld.value(np.full(16, x0), y)
        outer = fld.value(np.full(16, x0 + sgn * 1e-9), y)
        assert np.max(np.abs(inner - outer)) < 1e-7
    # strip-side slope carries the variation-mediated Neumann data
    h = 1e-6
    nl = hyperbolic_neumann(vl)
    fd = (fld.value(-S / 2 - 0.0, y) - fld.value(-S / 2 - h, y)) / h
    assert np.max(np.abs(fd - nl.reconstruct(y))) < 1e-4


def test_geodesic_zero_parameter_and_conformal_scaling():
    chart = GraftedCollar(ell=ELL, s=S, a=1.0)
    fam = ConformalFamily(base=chart, hdot=GlobalField.constant(1.0))
    y, rate = geodesic_oracle(fam, "left", 0.0, m=64)
    assert np.all(rate == 0.0)
    # constant conformal scaling moves no geodesic
    y, rate = geodesic_oracle(fam, "left", 1e-3, m=64, scheme="forward")
    assert np.max(np.abs(rate)) < 1e-6
