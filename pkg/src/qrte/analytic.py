"""Steady-state solution of the two-direction transport problem with one source slab.

On each source-free region the intensities are

    I+(x) = C+ exp(w x) + C- exp(-w x)
    I-(x) = g+ C+ exp(w x) + g- C- exp(-w x)

with ``w = sqrt(kappa (kappa - sigma)) / mu`` and
``g+- = (2 / sigma)(kappa +- mu w) - 1``. Inside the slab the constant
``S0 / (2 (kappa - sigma))`` is added to both. The six constants follow from
continuity at both slab edges and periodicity across the domain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .field import SourceSpec

RESIDUAL_TOL = 1e-10

_LEFT, _CENTER, _RIGHT = 0, 1, 2


@dataclass(frozen=True)
class AnalyticSolution:
    kappa: float
    sigma: float
    mu: float
    s0: float
    x_lo: float
    x_hi: float
    omega: float
    g_plus: float
    g_minus: float
    particular: float
    constants: tuple[float, ...]  # (C+L, C-L, C1, C2, C+R, C-R)

    def __call__(self, x):
        return evaluate(self, x)


def _rows(sol_omega, g_plus, g_minus, x, region):
    # coefficient rows of I+ and I- at x for the given region's two constants
    ep, em = np.exp(sol_omega * x), np.exp(-sol_omega * x)
    r_plus, r_minus = np.zeros(6), np.zeros(6)
    j = 2 * region
    r_plus[j], r_plus[j + 1] = ep, em
    r_minus[j], r_minus[j + 1] = g_plus * ep, g_minus * em
    return r_plus, r_minus


def solve_steady(kappa: float, sigma: float, mu: float, source: SourceSpec) -> AnalyticSolution:
    """Solve for the six integration constants.

    ``source`` must hold a single segment strictly inside ``(0, 1)``, or none
    (zero solution).

    Raises
    ------
    DomainError
        If not ``kappa > sigma > 0`` or ``mu <= 0``, or the source has the wrong shape.
    NumericError
        If the 6x6 system is singular or its residual exceeds ``RESIDUAL_TOL``.
    """
    if not (kappa > sigma > 0):
        raise DomainError(f"analytic solution needs kappa > sigma > 0, got kappa={kappa}, sigma={sigma}")
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if len(source.segments) > 1:
        raise DomainError("analytic solution supports a single source segment")
    x_lo, x_hi, s0 = source.segments[0] if source.segments else (0.25, 0.75, 0.0)
    if not (0.0 < x_lo < x_hi < 1.0):
        raise DomainError(f"source segment ({x_lo}, {x_hi}) must lie strictly inside (0, 1)")

    omega = float(np.sqrt(kappa * (kappa - sigma)) / mu)
    g_plus = 2.0 / sigma * (kappa + mu * omega) - 1.0
    g_minus = 2.0 / sigma * (kappa - mu * omega) - 1.0
    particular = s0 / (2.0 * (kappa - sigma))

    rows, rhs = [], []
    # continuity: left == centre + P at x_lo; centre + P == right at x_hi
    for x, (ra, rb), shift in ((x_lo, (_LEFT, _CENTER), particular), (x_hi, (_CENTER, _RIGHT), -particular)):
        pa, ma = _rows(omega, g_plus, g_minus, x, ra)
        pb, mb = _rows(omega, g_plus, g_minus, x, rb)
        rows += [pa - pb, ma - mb]
        rhs += [shift, shift]
    # periodicity: left(0) == right(1)
    p0, m0 = _rows(omega, g_plus, g_minus, 0.0, _LEFT)
    p1, m1 = _rows(omega, g_plus, g_minus, 1.0, _RIGHT)
    rows += [p0 - p1, m0 - m1]
    rhs += [0.0, 0.0]

    system, rhs = np.array(rows), np.array(rhs)
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericError(f"steady-state system is singular (condition number {cond:.3e})")
    constants = np.linalg.solve(system, rhs)
    residual = np.max(np.abs(system @ constants - rhs))
    if residual > RESIDUAL_TOL:
        raise NumericError(f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return AnalyticSolution(
        kappa, sigma, mu, s0, x_lo, x_hi, omega, g_plus, g_minus, particular,
        tuple(float(c) for c in constants),
    )


def _region_of(sol: AnalyticSolution, x: np.ndarray) -> np.ndarray:
    return np.where(x <= sol.x_lo, _LEFT, np.where(x < sol.x_hi, _CENTER, _RIGHT))


def evaluate_region(sol: AnalyticSolution, x, region: int):
    """Evaluate one region's closed form at ``x`` regardless of where ``x`` lies."""
    x = np.asarray(x, dtype=float)
    c = sol.constants
    ep, em = np.exp(sol.omega * x), np.exp(-sol.omega * x)
    cp, cm = c[2 * region], c[2 * region + 1]
    p = sol.particular if region == _CENTER else 0.0
    return cp * ep + cm * em + p, sol.g_plus * cp * ep + sol.g_minus * cm * em + p


def evaluate(sol: AnalyticSolution, x):
    """``(I_plus, I_minus)`` at ``x``; scalars in, floats out, arrays in, arrays out."""
    xa = np.asarray(x, dtype=float)
    region = _region_of(sol, xa)
    ip = np.zeros_like(xa)
    im = np.zeros_like(xa)
    for r in (_LEFT, _CENTER, _RIGHT):
        mask = region == r
        if np.any(mask):
            p, m = evaluate_region(sol, xa[mask] if xa.ndim else xa, r)
            if xa.ndim:
                ip[mask], im[mask] = p, m
            else:
                ip, im = p, m
    if xa.ndim == 0:
        return float(ip), float(im)
    return ip, im
