"""Per-mode boundary-value solver on the hyperbolic strips.

Each strip carries the metric d(xi)^2 + cosh(xi)^2 dy^2 with xi in [0, a]
measured from the seam.  Separating (Laplace-Beltrami - 2) u = 0 with
u = b(xi) exp(2 pi i n y / ell) gives the mode ODE

    b'' + tanh(xi) b' - ((2 pi n / ell)^2 / cosh(xi)^2 + 2) b = 0.

Every mode is solved twice (adaptive shooting and Chebyshev collocation) and
the two answers are cross-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError

#: number of Chebyshev collocation nodes
_NCHEB = 80
#: default number of graded sample nodes
_NSAMPLES = 512


def _mu_sq(n: int, ell: float) -> float:
    return (2.0 * np.pi * n / ell) ** 2


def _rhs(n: int, ell: float):
    musq = _mu_sq(n, ell)

    def rhs(xi, state):
        b, bp = state
        ch = np.cosh(xi)
        return [bp, (musq / ch**2 + 2.0) * b - np.tanh(xi) * bp]

    return rhs


def _shoot_basis(n: int, ell: float, a: float):
    """Fundamental solutions with Cauchy data (1,0) and (0,1) at the seam."""
    rhs = _rhs(n, ell)
    sols = []
    for y0 in ([1.0, 0.0], [0.0, 1.0]):
        sol = solve_ivp(
            rhs,
            (0.0, a),
            y0,
            method="DOP853",
            rtol=1e-12,
            atol=1e-14,
            dense_output=True,
        )
        if not sol.success:
            raise ConvergenceError(f"shooting failed for mode n={n}: {sol.message}")
        sols.append(sol)
    return sols


def _cheb_nodes_and_D(ncheb: int):
    """Chebyshev points on [-1, 1] and the differentiation matrix."""
    k = np.arange(ncheb + 1)
    xnodes = np.cos(np.pi * k / ncheb)
    c = np.ones(ncheb + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** k
    X = np.tile(xnodes, (ncheb + 1, 1)).T
    dX = X - X.T + np.eye(ncheb + 1)
    D = np.outer(c, 1.0 / c) / dX
    D -= np.diag(D.sum(axis=1))
    return xnodes, D


@lru_cache(maxsize=32)
def _cheb_operator(a: float, ncheb: int = _NCHEB):
    """Nodes xi (ascending from 0 to a) plus first/second derivative matrices."""
    t, D = _cheb_nodes_and_D(ncheb)
    # map [-1, 1] -> [a, 0] reversed so index 0 is the seam
    xi = a * (1.0 - t) / 2.0
    scale = -2.0 / a
    D1 = scale * D
    D2 = D1 @ D1
    return xi, D1, D2


def _collocation_solve(
    n: int, ell: float, a: float, outer_bc: str, seam_dirichlet: complex
):
    """Dense spectral collocation solve; returns (xi, b, bp) at Chebyshev nodes."""
    xi, D1, D2 = _cheb_operator(a)
    musq = _mu_sq(n, ell)
    L = D2 + np.diag(np.tanh(xi)) @ D1 - np.diag(musq / np.cosh(xi) ** 2 + 2.0)
    A = L.copy()
    rhs = np.zeros(len(xi), dtype=complex)
    A[0, :] = 0.0
    A[0, 0] = 1.0
    rhs[0] = seam_dirichlet
    if outer_bc == "dirichlet":
        A[-1, :] = 0.0
        A[-1, -1] = 1.0
    elif outer_bc == "neumann":
        A[-1, :] = D1[-1, :]
    else:
        raise ValueError(f"unknown outer boundary condition {outer_bc!r}")
    rhs[-1] = 0.0
    b = np.linalg.solve(A, rhs)
    return xi, b, D1 @ b


@dataclass
class HyperbolicModeSolution:
    """One solved strip mode with sampled profile and seam DtN ratio."""

    n: int
    ell: float
    a: float
    outer_bc: str
    seam_dirichlet: complex
    dtn: float
    samples: np.ndarray  # columns (xi, b, b')
    cross_discrepancy: float
    b_fn: Callable = field(repr=False)
    bp_fn: Callable = field(repr=False)
    forcing_fn: Callable | None = field(default=None, repr=False)

    def interior_quadrature(self, npts: int = 2001):
        """(integral of b cosh, energy integrand integral) on this strip.

        Energy integrand: (|b'|^2 + (mu^2/cosh^2 + 2)|b|^2) cosh(xi).
        """
        xi = np.linspace(0.0, self.a, npts)
        b = self.b_fn(xi)
        bp = self.bp_fn(xi)
        ch = np.cosh(xi)
        musq = _mu_sq(self.n, self.ell)
        from scipy.integrate import simpson

        ib = simpson(np.real(b) * ch, x=xi) + 1j * simpson(np.imag(b) * ch, x=xi)
        energy = simpson(
            (np.abs(bp) ** 2 + (musq / ch**2 + 2.0) * np.abs(b) ** 2) * ch, x=xi
        )
        return ib, float(energy)


def _graded_grid(a: float, m: int) -> np.ndarray:
    """m nodes on [0, a] clustered at the seam xi = 0."""
    u = np.linspace(0.0, 1.0, m)
    return a * (1.0 - np.cos(np.pi * u / 2.0))


def mode_solve(
    n: int,
    ell: float,
    a: float,
    outer_bc: str = "dirichlet",
    seam_dirichlet: complex = 1.0,
    n_samples: int = _NSAMPLES,
    cross_tol: float = 1e-8,
    method: str = "auto",
) -> HyperbolicModeSolution:
    """Solve the strip mode BVP with the given seam Dirichlet value.

    method "auto" runs both shooting and collocation and cross-checks them;
    "collocation" skips the shooting solve (used in large parameter scans,
    the cross-check being sampled elsewhere).
    """
    if a <= 0:
        raise ValueError("strip half-width a must be positive")

    xi_c, b_c, bp_c = _collocation_solve(n, ell, a, outer_bc, 1.0)
    if abs(b_c[0]) < 1e-14:
        raise ConvergenceError("degenerate seam value b(0) = 0")
    dtn_c = float(np.real(bp_c[0] / b_c[0]))

    if method == "collocation":
        order = np.argsort(xi_c)
        from scipy.interpolate import CubicSpline

        spl = CubicSpline(xi_c[order], np.real(b_c[order]))
        spl_p = spl.derivative()
        sd = seam_dirichlet

        def b_fn(xi, spl=spl, sd=sd):
            return sd * spl(xi)

        def bp_fn(xi, spl_p=spl_p, sd=sd):
            return sd * spl_p(xi)

        grid = _graded_grid(a, n_samples)
        samples = np.column_stack([grid, b_fn(grid), bp_fn(grid)])
        return HyperbolicModeSolution(
            n=n,
            ell=ell,
            a=a,
            outer_bc=outer_bc,
            seam_dirichlet=seam_dirichlet,
            dtn=dtn_c,
            samples=samples,
            cross_discrepancy=float("nan"),
            b_fn=b_fn,
            bp_fn=bp_fn,
        )

    phi1, phi2 = _shoot_basis(n, ell, a)
    if outer_bc == "dirichlet":
        denom = phi2.sol(a)[0]
        kappa = -phi1.sol(a)[0] / denom
    elif outer_bc == "neumann":
        denom = phi2.sol(a)[1]
        kappa = -phi1.sol(a)[1] / denom
    else:
        raise ValueError(f"unknown outer boundary condition {outer_bc!r}")
    dtn = float(kappa)  # b(0) = 1, b'(0) = kappa for the unit solve

    def b_fn(xi, sd=seam_dirichlet, k=kappa):
        vals = phi1.sol(np.atleast_1d(xi))
        vals2 = phi2.sol(np.atleast_1d(xi))
        out = sd * (vals[0] + k * vals2[0])
        return out if np.ndim(xi) else out[0]

    def bp_fn(xi, sd=seam_dirichlet, k=kappa):
        vals = phi1.sol(np.atleast_1d(xi))
        vals2 = phi2.sol(np.atleast_1d(xi))
        out = sd * (vals[1] + k * vals2[1])
        return out if np.ndim(xi) else out[0]

    # cross-check the two methods on the unit solve
    unit = phi1.sol(xi_c)[0] + kappa * phi2.sol(xi_c)[0]
    disc = float(np.max(np.abs(unit - np.real(b_c))))
    if disc > cross_tol:
        raise ConvergenceError(
            f"shooting/collocation disagree by {disc:.2e} for mode n={n}"
        )

    grid = _graded_grid(a, n_samples)
    samples = np.column_stack([grid, b_fn(grid), bp_fn(grid)])
    return HyperbolicModeSolution(
        n=n,
        ell=ell,
        a=a,
        outer_bc=outer_bc,
        seam_dirichlet=seam_dirichlet,
        dtn=dtn,
        samples=samples,
        cross_discrepancy=disc,
        b_fn=b_fn,
        bp_fn=bp_fn,
    )


def dtn(n: int, ell: float, a: float, outer_bc: str = "dirichlet", method: str = "auto") -> float:
    """Seam Neumann value per unit seam Dirichlet value, b'(0)/b(0)."""
    return mode_solve(n, ell, a, outer_bc, 1.0, n_samples=2, method=method).dtn


@dataclass
class StripModeExtension:
    """Cauchy extension of one mode into a strip from seam data (value, slope)."""

    n: int
    ell: float
    a: float
    seam_value: complex
    seam_slope: complex
    b_fn: Callable = field(repr=False)
    bp_fn: Callable = field(repr=False)


def mode_extend(
    n: int, ell: float, a: float, seam_value: complex, seam_slope: complex
) -> StripModeExtension:
    """Integrate the mode ODE from the seam with prescribed Cauchy data.

    Used to build globally matched fields: the strip-side profile that is
    continuous with the cylinder trace and carries a prescribed strip-side
    normal derivative.
    """
    phi1, phi2 = _shoot_basis(n, ell, a)

    def b_fn(xi, v=seam_value, p=seam_slope):
        out = v * phi1.sol(np.atleast_1d(xi))[0] + p * phi2.sol(np.atleast_1d(xi))[0]
        return out if np.ndim(xi) else out[0]

    def bp_fn(xi, v=seam_value, p=seam_slope):
        out = v * phi1.sol(np.atleast_1d(xi))[1] + p * phi2.sol(np.atleast_1d(xi))[1]
        return out if np.ndim(xi) else out[0]

    return StripModeExtension(
        n=n, ell=ell, a=a, seam_value=seam_value, seam_slope=seam_slope, b_fn=b_fn, bp_fn=bp_fn
    )


def interior_integral(
    solutions: Iterable[HyperbolicModeSolution],
) -> tuple[float, float]:
    """(integral of H over the strips, integral of |grad H|^2 + 2 H^2).

    Area element is cosh(xi) dxi dy.  Only n = 0 modes contribute to the
    first integral; every mode contributes 2*ell times its energy integrand
    (the conjugate-pair doubling), n = 0 contributing ell times.
    """
    int_h = 0.0
    energy = 0.0
    for sol in solutions:
        ib, en = sol.interior_quadrature()
        if sol.n == 0:
            int_h += sol.ell * float(np.real(ib))
            energy += sol.ell * en
        else:
            energy += 2.0 * sol.ell * en
    return int_h, energy


def seam_boundary_form(solutions: Iterable[HyperbolicModeSolution]) -> float:
    """Sum over modes of the seam Green's boundary term of H d_n H.

    The outward normal of the strip at the seam is -d/dxi, so each n = 0
    mode contributes -ell * b(0) b'(0) and each n >= 1 mode contributes
    -2 ell Re(b(0) conj(b'(0))).
    """
    total = 0.0
    for sol in solutions:
        bb = np.real(sol.b_fn(0.0) * np.conj(sol.bp_fn(0.0)))
        total -= (1.0 if sol.n == 0 else 2.0) * sol.ell * float(bb)
    return total


def outer_boundary_form(solutions: Iterable[HyperbolicModeSolution]) -> float:
    """Green's boundary term at xi = a (outward normal +d/dxi, line element
    cosh(a) dy).

    Identically zero for either homogeneous outer condition; computed anyway
    so the model's gap from a closed surface stays visible.
    """
    total = 0.0
    for sol in solutions:
        bb = np.real(sol.b_fn(sol.a) * np.conj(sol.bp_fn(sol.a))) * np.cosh(sol.a)
        total += (1.0 if sol.n == 0 else 2.0) * sol.ell * float(bb)
    return total


def greens_residual(
    solutions: Sequence[HyperbolicModeSolution],
    forcings: Sequence[Callable] | None = None,
) -> float:
    """Residual of the Green identity on the strips.

    integral(H * (Lap_h - 2) H) = -energy + seam + outer boundary terms.
    The left side vanishes for exact homogeneous mode solutions; a list of
    per-mode forcing callables f(xi) (the value of the operator applied to
    the manufactured profile) may be supplied for non-solutions.
    """
    from scipy.integrate import simpson

    lhs = 0.0
    if forcings is not None:
        for sol, f in zip(solutions, forcings):
            if f is None:
                continue
            xi = np.linspace(0.0, sol.a, 2001)
            integrand = np.real(sol.b_fn(xi) * np.conj(f(xi))) * np.cosh(xi)
            factor = 1.0 if sol.n == 0 else 2.0
            lhs += factor * sol.ell * simpson(integrand, x=xi)

    _, energy = interior_integral(solutions)
    rhs = -energy + seam_boundary_form(solutions) + outer_boundary_form(solutions)
    return float(abs(lhs - rhs))


def manufactured_mode(
    n: int,
    ell: float,
    a: float,
    b_fn: Callable,
    bp_fn: Callable,
    bpp_fn: Callable,
) -> tuple[HyperbolicModeSolution, Callable]:
    """Package an arbitrary smooth profile as a mode plus its forcing.

    Returns the pseudo-solution and f(xi) = b'' + tanh b' - (mu^2/cosh^2+2) b,
    for method-of-manufactured-solutions checks of the Green identity.
    """
    musq = _mu_sq(n, ell)

    def forcing(xi):
        return (
            bpp_fn(xi)
            + np.tanh(xi) * bp_fn(xi)
            - (musq / np.cosh(xi) ** 2 + 2.0) * b_fn(xi)
        )

    grid = _graded_grid(a, 64)
    samples = np.column_stack([grid, b_fn(grid), bp_fn(grid)])
    sol = HyperbolicModeSolution(
        n=n,
        ell=ell,
        a=a,
        outer_bc="manufactured",
        seam_dirichlet=complex(b_fn(0.0)),
        dtn=float(np.real(bp_fn(0.0) / b_fn(0.0))) if abs(b_fn(0.0)) > 0 else 0.0,
        samples=samples,
        cross_discrepancy=0.0,
        b_fn=b_fn,
        bp_fn=bp_fn,
        forcing_fn=forcing,
    )
    return sol, forcing
