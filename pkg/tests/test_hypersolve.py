import numpy as np
import pytest
from scipy.integrate import simpson

from graftlab import hypersolve

ELL = 2 * np.pi


def test_zero_seam_data_gives_zero_solution():
    sol = hypersolve.mode_solve(1, ELL, 1.0, seam_dirichlet=0.0)
    xi = np.linspace(0, 1.0, 50)
    assert np.max(np.abs(sol.b_fn(xi))) < 1e-12


def test_mean_mode_profile_decreasing():
    sol = hypersolve.mode_solve(0, ELL, 1.0, seam_dirichlet=1.0)
    xi = np.linspace(0, 1.0, 200)
    b = np.real(sol.b_fn(xi))
    assert b[0] == pytest.approx(1.0)
    assert abs(b[-1]) < 1e-10
    assert np.all(np.diff(b) < 0)
    assert sol.dtn < 0


def test_linearity_in_seam_value():
    a = hypersolve.mode_solve(2, ELL, 1.0, seam_dirichlet=0.7)
    b = hypersolve.mode_solve(2, ELL, 1.0, seam_dirichlet=1.4)
    xi = np.linspace(0, 1.0, 30)
    assert np.allclose(2.0 * a.b_fn(xi), b.b_fn(xi), atol=1e-12)


def test_ode_residual_of_solution():
    sol = hypersolve.mode_solve(3, ELL, 1.0)
    h = 1e-4
    xi = np.linspace(0.1, 0.9, 40)
    bpp = (sol.b_fn(xi + h) - 2 * sol.b_fn(xi) + sol.b_fn(xi - h)) / h**2
    musq = (2 * np.pi * 3 / ELL) ** 2
    resid = bpp + np.tanh(xi) * sol.bp_fn(xi) - (musq / np.cosh(xi) ** 2 + 2) * sol.b_fn(xi)
    assert np.max(np.abs(resid)) < 1e-5


def test_dtn_monotone_in_mode():
    d0 = hypersolve.dtn(0, ELL, 1.0)
    d5 = hypersolve.dtn(5, ELL, 1.0)
    assert d5 < d0 < 0


def test_dtn_wide_strip_limit():
    assert abs(hypersolve.dtn(1, ELL, 5.0) - hypersolve.dtn(1, ELL, 10.0)) < 1e-6


def test_dtn_neumann_outer_still_negative():
    assert hypersolve.dtn(0, ELL, 1.0, outer_bc="neumann") < 0


def test_coercivity_over_sample_grid():
    for outer in ("dirichlet", "neumann"):
        for n in (0, 1, 4, 16):
            for ell in (1.0, 2 * np.pi):
                for a in (0.3, 1.0, 2.5):
                    assert hypersolve.dtn(n, ell, a, outer, method="collocation") <= 0


def test_cross_method_agreement():
    for n in (0, 1, 8):
        sol = hypersolve.mode_solve(n, ELL, 1.5)
        assert sol.cross_discrepancy < 1e-8
        gap = abs(sol.dtn - hypersolve.dtn(n, ELL, 1.5, method="collocation"))
        assert gap < 1e-8


def test_interior_integral_orthogonality():
    mean = hypersolve.mode_solve(0, ELL, 1.0, seam_dirichlet=0.5)
    osc = hypersolve.mode_solve(1, ELL, 1.0, seam_dirichlet=1.0 + 1j)
    int_h, energy = hypersolve.interior_integral([mean, osc])
    # only the n = 0 mode contributes to the plain integral
    int_mean_only, _ = hypersolve.interior_integral([mean])
    assert int_h == pytest.approx(int_mean_only)
    assert energy > 0
    # direct quadrature of the mean profile, one strip
    xi = np.linspace(0, 1.0, 4001)
    direct = simpson(np.real(mean.b_fn(xi)) * np.cosh(xi), x=xi) * ELL
    assert int_mean_only == pytest.approx(direct, rel=1e-8)


def test_greens_identity_on_solved_modes():
    sols = [hypersolve.mode_solve(n, ELL, 1.0, seam_dirichlet=v) for n, v in ((0, 0.8), (2, 1.0 - 0.5j))]
    assert hypersolve.greens_residual(sols) < 1e-8


def test_outer_boundary_form_vanishes_for_homogeneous_conditions():
    for outer in ("dirichlet", "neumann"):
        sols = [hypersolve.mode_solve(1, ELL, 1.0, outer_bc=outer)]
        assert abs(hypersolve.outer_boundary_form(sols)) < 1e-12


def test_greens_identity_manufactured_solution():
    sympy = pytest.importorskip("sympy")
    xi = sympy.symbols("xi", real=True)
    a = 1.3
    n = 2
    expr = sympy.cos(2 * xi) + xi**3 / 10 - sympy.Rational(1, 2)
    b = sympy.lambdify(xi, expr)
    bp = sympy.lambdify(xi, sympy.diff(expr, xi))
    bpp = sympy.lambdify(xi, sympy.diff(expr, xi, 2))
    sol, forcing = hypersolve.manufactured_mode(n, ELL, a, b, bp, bpp)
    assert hypersolve.greens_residual([sol], forcings=[forcing]) < 1e-8


def test_mode_extend_matches_bvp_solution():
    # extending with the BVP's own Cauchy data reproduces the BVP solution
    sol = hypersolve.mode_solve(1, ELL, 1.0, seam_dirichlet=0.9)
    ext = hypersolve.mode_extend(1, ELL, 1.0, 0.9, sol.bp_fn(0.0))
    xi = np.linspace(0, 1.0, 60)
    assert np.allclose(ext.b_fn(xi), sol.b_fn(xi), atol=1e-9)
