"""Normal variation of the seam geodesics and its amended version.

The normal displacement V of the seam circles solves, in the circumferential
coordinate,

    V_yy           = -1/2 (dH/dx from the flat side)        (flat regime)
    V_yy - V       = -1/2 (dH/dx from the hyperbolic side)  (hyperbolic regime)

V is measured positively in the +x direction on both seams.  The amended
field W picks up an extra forcing +d/dy Im(phi) from the off-conformal
tensor; the sign is relative to (x, y) coordinates, in which the
along-normal conformal frame carrying phi is negatively oriented.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hypersolve
from .errors import SolvabilityError
from .geometry import GlobalField, GraftedCollar
from .spectral import FourierSolution, QuadDiffModes, TraceModes, _mode_sum

#: traces with |mean| above this are rejected as unsolvable (the periodic
#: solvability constraint forcing the linear-in-x coefficient to vanish)
SOLVABILITY_TOL = 1e-12


@dataclass(frozen=True)
class VariationField:
    """Fourier data of one seam's normal variation (lambda_n or rho_n)."""

    side: str
    ell: float
    mean: float
    modes: dict[int, complex] = field(default_factory=dict)
    amended: bool = False

    def reconstruct(self, y) -> np.ndarray:
        return self.mean + _mode_sum(0.0, y, self.ell, self.modes)

    def rotated(self, y0: float) -> "VariationField":
        k = 2.0 * np.pi / self.ell
        return VariationField(
            side=self.side,
            ell=self.ell,
            mean=self.mean,
            modes={n: c * np.exp(-1j * k * n * y0) for n, c in self.modes.items()},
            amended=self.amended,
        )


def solve_flat_variation(flat_neumann: TraceModes, mean_value: float) -> VariationField:
    """Solve V_yy = -1/2 * (flat Neumann data) on the periodic seam circle.

    Per mode: lambda_n = (ell^2 / (8 pi^2 n^2)) N_n.  The mean of V is a free
    constant supplied by the caller; a nonzero mean of the forcing (i.e. a
    nonzero linear-in-x coefficient) admits no periodic solution.
    """
    if flat_neumann.kind != "neumann_flat":
        raise ValueError("expected a flat-side Neumann trace")
    if abs(flat_neumann.mean) > SOLVABILITY_TOL:
        raise SolvabilityError(
            f"no periodic solution: mean forcing c0 = {flat_neumann.mean} != 0"
        )
    ell = flat_neumann.ell
    modes = {
        n: (ell**2 / (8.0 * np.pi**2 * n**2)) * coef
        for n, coef in flat_neumann.modes.items()
    }
    return VariationField(side=flat_neumann.side, ell=ell, mean=mean_value, modes=modes)


def hyperbolic_neumann(v: VariationField) -> TraceModes:
    """Hyperbolic-side d/dx data implied by V: -2 (V_yy - V), spectrally.

    Mode n maps to 2 (4 pi^2 n^2 + ell^2) / ell^2 times lambda_n; the mean
    maps to twice the free constant.
    """
    if v.amended:
        raise ValueError("expected an unamended variation field")
    ell = v.ell
    coeffs = {
        n: 2.0 * (4.0 * np.pi**2 * n**2 + ell**2) / ell**2 * lam
        for n, lam in v.modes.items()
    }
    return TraceModes(
        side=v.side, kind="neumann_hyperbolic", ell=ell, mean=2.0 * v.mean, modes=coeffs
    )


def solve_amended_variation(
    flat_neumann: TraceModes, q: QuadDiffModes, mean_value: float
) -> VariationField:
    """Solve W_yy = -1/2 * (flat Neumann data) + d/dy Im(phi) on the seam.

    Reduces to solve_flat_variation at q = 0.  Per mode the extra forcing
    shifts lambda_n by (ell / (2 pi i n)) (u_n cosh -/+ v_n sinh).
    """
    base = solve_flat_variation(flat_neumann, mean_value)
    ell = flat_neumann.ell
    shifts = {}
    for n in q.modes:
        seam = q.seam_value(flat_neumann.side, n)
        shifts[n] = ell / (2.0 * np.pi * 1j * n) * seam
    modes = dict(base.modes)
    for n, sh in shifts.items():
        modes[n] = modes.get(n, 0.0) + sh
    return VariationField(
        side=flat_neumann.side, ell=ell, mean=mean_value, modes=modes, amended=True
    )


def extended_hyperbolic_neumann(
    w: VariationField, q: QuadDiffModes | None = None
) -> TraceModes:
    """Hyperbolic-side d/dx data implied by the amended field: -2 (W_yy - W).

    Computed spectrally from the starred coefficients, which is identical to
    the explicit cosh/sinh expansion in the (c, d, u, v) data (checked in
    the test suite).  q is accepted for interface symmetry only.
    """
    if not w.amended:
        raise ValueError("expected an amended variation field")
    ell = w.ell
    coeffs = {
        n: 2.0 * (4.0 * np.pi**2 * n**2 + ell**2) / ell**2 * lam
        for n, lam in w.modes.items()
    }
    return TraceModes(
        side=w.side, kind="neumann_hyperbolic", ell=ell, mean=2.0 * w.mean, modes=coeffs
    )


def pinned_means(dtn0: float, left_mean: float, right_mean: float) -> tuple[float, float]:
    """Free constants pinned by the hyperbolic mean-mode balance.

    Matching the mean of -2(V_yy - V) with the strip Dirichlet-to-Neumann
    data gives lambda_0 = -dtn0 * (left seam mean) / 2 and
    rho_0 = +dtn0 * (right seam mean) / 2.
    """
    return -dtn0 * left_mean / 2.0, dtn0 * right_mean / 2.0


# --- independent periodic-collocation oracle --------------------------------

def periodic_diff_matrices(m: int, ell: float) -> tuple[np.ndarray, np.ndarray]:
    """Dense trigonometric differentiation matrices on m periodic nodes.

    Physical-space Toeplitz construction (no FFT), exact for trigonometric
    polynomials below the Nyquist mode.  m must be even.
    """
    if m % 2:
        raise ValueError("m must be even")
    h = 2.0 * np.pi / m
    j = np.arange(1, m)
    col1 = 0.5 * (-1.0) ** j / np.tan(j * h / 2.0)
    D1 = np.zeros((m, m))
    col2 = -((-1.0) ** j) / (2.0 * np.sin(j * h / 2.0) ** 2)
    D2 = np.full((m, m), 0.0)
    np.fill_diagonal(D2, -np.pi**2 / (3 * h**2) - 1.0 / 6.0)
    for k in range(1, m):
        idx = (np.arange(m - k), np.arange(k, m))
        D1[idx[1], idx[0]] = col1[k - 1]
        D1[idx[0], idx[1]] = -col1[k - 1]
        D2[idx[1], idx[0]] = col2[k - 1]
        D2[idx[0], idx[1]] = col2[k - 1]
    scale = 2.0 * np.pi / ell
    return D1 * scale, D2 * scale**2


def collocation_variation_modes(
    forcing: np.ndarray, ell: float, mean_value: float
) -> dict[int, complex]:
    """Solve V_yy = forcing on a uniform periodic grid and read off modes.

    Least-squares solve of the stacked system (differentiation matrix; mean
    row); returns mode coefficients up to index m // 4.
    """
    m = len(forcing)
    _, D2 = periodic_diff_matrices(m, ell)
    A = np.vstack([D2, np.full((1, m), 1.0 / m)])
    rhs = np.concatenate([forcing, [mean_value]])
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    coefs = np.fft.fft(sol) / m
    return {n: complex(coefs[n]) for n in range(1, m // 4 + 1)}


# --- globally matched fields and the geodesic oracle ------------------------

def matched_global_field(
    chart: GraftedCollar,
    sol: FourierSolution,
    v_left: VariationField,
    v_right: VariationField,
) -> GlobalField:
    """Field on the whole collar: the cylinder series extended into both
    strips by Cauchy integration of the mode ODE.

    The strip extensions are continuous with the cylinder traces and carry
    the hyperbolic-side normal derivative implied by the variation fields,
    so the geodesic variation of the (1 + t * field)-conformal family solves
    both regimes of the variation equation simultaneously.
    """
    if abs(sol.c0) > SOLVABILITY_TOL:
        raise SolvabilityError("matched fields require a vanishing linear coefficient")
    ell, s, a = chart.ell, chart.s, chart.a
    dl = sol.dirichlet_trace("left")
    dr = sol.dirichlet_trace("right")
    nl = hyperbolic_neumann(v_left)
    nr = hyperbolic_neumann(v_right)

    # strip-side slope d/dxi: left strip has xi = -x - s/2 so slope = -d/dx
    ext_left = {0: hypersolve.mode_extend(0, ell, a, dl.mean, -nl.mean)}
    ext_right = {0: hypersolve.mode_extend(0, ell, a, dr.mean, nr.mean)}
    for n in sol.modes:
        ext_left[n] = hypersolve.mode_extend(n, ell, a, dl.modes[n], -nl.modes.get(n, 0.0))
        ext_right[n] = hypersolve.mode_extend(n, ell, a, dr.modes[n], nr.modes.get(n, 0.0))

    k = 2.0 * np.pi / ell

    def _strip_sum(ext, xi, y, deriv: bool) -> np.ndarray:
        fns = {n: (e.bp_fn if deriv else e.b_fn) for n, e in ext.items()}
        out = np.real(fns[0](xi)) + np.zeros(np.broadcast(xi, y).shape)
        for n, fn in fns.items():
            if n == 0:
                continue
            out = out + 2.0 * np.real(fn(xi) * np.exp(1j * k * n * y))
        return out

    def _eval(x, y, deriv: bool) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        out = np.empty(x.shape)
        flat = np.abs(x) <= s / 2
        left = x < -s / 2
        right = x > s / 2
        if np.any(flat):
            fn = sol.evaluate_dx if deriv else sol.evaluate
            out[flat] = fn(x[flat], y[flat])
        if np.any(left):
            vals = _strip_sum(ext_left, -x[left] - s / 2, y[left], deriv)
            out[left] = -vals if deriv else vals
        if np.any(right):
            out[right] = _strip_sum(ext_right, x[right] - s / 2, y[right], deriv)
        return out

    return GlobalField(lambda x, y: _eval(x, y, False), lambda x, y: _eval(x, y, True))


def _solve_perturbed_geodesic(
    chart: GraftedCollar,
    hfield: GlobalField,
    t: float,
    side: str,
    m: int,
    x_init: np.ndarray | None = None,
    tol: float = 1e-12,
):
    """Closed curve x = X(y) solving the geodesic equation of the metric
    (dx^2 + G^2 dy^2) / (1 + t * hfield), by Newton (Powell hybrid) on the
    collocated Euler-Lagrange equations."""
    from scipy.optimize import root

    ell, s = chart.ell, chart.s
    base = -s / 2 if side == "left" else s / 2
    h = ell / m
    y = np.arange(m) * h
    ymid = y + h / 2

    def sqrtH(x, yy):
        return np.sqrt(1.0 + t * hfield.value(x, yy))

    def residual(X):
        Xr = np.roll(X, -1)
        xm = 0.5 * (X + Xr)
        xp = (Xr - X) / h
        speed_m = np.sqrt(xp**2 + chart.G(xm) ** 2)
        P = xp / (speed_m * sqrtH(xm, ymid))
        dP = (P - np.roll(P, 1)) / h
        xc = (Xr - np.roll(X, 1)) / (2 * h)
        G = chart.G(X)
        speed = np.sqrt(xc**2 + G**2)
        H = 1.0 + t * hfield.value(X, y)
        Hx = t * hfield.dx(X, y)
        Q = G * chart.Gp(X) / (speed * np.sqrt(H)) - 0.5 * speed * Hx * H ** (-1.5)
        return dP - Q

    x0 = np.full(m, base) if x_init is None else np.asarray(x_init, float)
    result = root(residual, x0, method="hybr", tol=tol)
    # hybr can report "not making good progress" after full convergence when
    # the flat-region directions are nearly degenerate; judge by the residual
    res_norm = float(np.max(np.abs(residual(result.x))))
    if res_norm > 1e-9:
        raise hypersolve.ConvergenceError(
            f"geodesic Newton failed (residual {res_norm:.2e}): {result.message}"
        )
    return y, result.x


def geodesic_oracle(
    fam,
    side: str,
    t: float,
    fd_step: float | None = None,
    m: int = 256,
    scheme: str = "richardson",
    initial_rate: np.ndarray | None = None,
):
    """Normal displacement rate of the perturbed closed seam geodesic.

    Solves the discretized periodic geodesic equation for the family metric
    at parameters +/- tau and differences in t.  Schemes: "forward"
    (first order, two solves), "centered", or "richardson" (centered at tau
    and tau/2).  Returns (y grid, displacement / t samples).

    Pass initial_rate (samples of the anticipated normal variation on the
    uniform y grid) to select the perturbed geodesic continuously connected
    to the seam circle; from a cold start the solver can land on a distant
    geodesic of the same metric.  The Euler-Lagrange residual is checked at
    the solution either way.
    """
    chart = fam.base
    tau = t if fd_step is None else fd_step
    base = -chart.s / 2 if side == "left" else chart.s / 2

    def solve(tt):
        guess = None
        if initial_rate is not None:
            guess = base + tt * np.asarray(initial_rate, float)
        return _solve_perturbed_geodesic(chart, fam.hdot, tt, side, m, x_init=guess)[1]

    y = np.arange(m) * (chart.ell / m)
    if t == 0:
        return y, np.zeros(m)
    if scheme == "forward":
        rate = (solve(tau) - base) / tau
    elif scheme == "centered":
        rate = (solve(tau) - solve(-tau)) / (2 * tau)
    elif scheme == "richardson":
        d1 = (solve(tau) - solve(-tau)) / (2 * tau)
        d2 = (solve(tau / 2) - solve(-tau / 2)) / tau
        rate = (4.0 * d2 - d1) / 3.0
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return y, rate
