"""Seeded random inputs for the verification suites.

Everything is driven by numpy Generators so a single seed fixes a whole
run.  Mode amplitudes decay exponentially so truncated series stay well
inside quadrature resolution.
"""
from __future__ import annotations

import numpy as np

from .spectral import FourierSolution, QuadDiffModes


def _complex_modes(rng: np.random.Generator, nmax: int, decay: float) -> dict:
    out = {}
    for n in range(1, nmax + 1):
        scale = np.exp(-decay * n)
        c = scale * (rng.standard_normal() + 1j * rng.standard_normal())
        d = scale * (rng.standard_normal() + 1j * rng.standard_normal())
        out[n] = (c, d)
    return out


def random_solution(
    rng: np.random.Generator,
    ell: float,
    s: float,
    nmax: int = 8,
    decay: float = 0.7,
    with_c0: bool = False,
    amplitude: float = 1.0,
) -> FourierSolution:
    """Random interior field with decaying mode amplitudes.

    c0 defaults to 0 so the periodic variation problem is solvable.
    Amplitudes are additionally damped by cosh(pi n s / ell) so seam traces
    stay O(amplitude) regardless of the aspect ratio.
    """
    modes = {}
    for n, (c, d) in _complex_modes(rng, nmax, decay).items():
        damp = amplitude / np.cosh(np.pi * n * s / ell)
        modes[n] = (damp * c, damp * d)
    return FourierSolution(
        ell=ell,
        s=s,
        c0=float(rng.standard_normal()) if with_c0 else 0.0,
        d0=amplitude * float(rng.standard_normal()),
        modes=modes,
    )


def random_quad(
    rng: np.random.Generator,
    ell: float,
    s: float,
    nmax: int = 8,
    decay: float = 0.7,
    amplitude: float = 1.0,
) -> QuadDiffModes:
    """Random quadratic-differential mode data (u0 = 0 keeps the conjugate
    single-valued)."""
    modes = {}
    for n, (u, v) in _complex_modes(rng, nmax, decay).items():
        damp = amplitude / np.cosh(np.pi * n * s / ell)
        modes[n] = (damp * u, damp * v)
    return QuadDiffModes(
        ell=ell, s=s, u0=0.0, v0=amplitude * float(rng.standard_normal()), modes=modes
    )


def slice_compatible_means(
    rng: np.random.Generator, s: float, d0: float, s_rate: float = 0.0
) -> tuple[float, float]:
    """Random (lam0, rho0) satisfying lam0 - rho0 = -s d0/2 - ds/dt exactly."""
    rho0 = float(rng.standard_normal())
    return rho0 - s * d0 / 2.0 - s_rate, rho0
