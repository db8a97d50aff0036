"""Direct classical iteration of the two-direction lattice-Boltzmann update.

The step is split the same way as the circuit: absorption-and-scattering,
then adding half a time step of source, then periodic streaming.
"""
from __future__ import annotations

import numpy as np

from .field import LatticeField, RteConfig


def classical_step(field: LatticeField, kappa: float, sigma: float, dt: float) -> LatticeField:
    """Advance ``field`` by one time step; sources are passed through unchanged."""
    keep = 1.0 - kappa * dt + 0.5 * sigma * dt
    gain = 0.5 * sigma * dt
    as_plus = keep * field.I_plus + gain * field.I_minus
    as_minus = gain * field.I_plus + keep * field.I_minus
    ase_plus = as_plus + 0.5 * dt * field.S_plus
    ase_minus = as_minus + 0.5 * dt * field.S_minus
    return LatticeField(
        np.roll(ase_plus, 1),
        np.roll(ase_minus, -1),
        field.S_plus.copy(),
        field.S_minus.copy(),
    )


def run_to_time(config: RteConfig, initial: LatticeField | None = None) -> list[LatticeField]:
    """Fields after ``0, 1, ..., config.steps`` steps (the first is ``initial``).

    ``initial`` defaults to zero intensity with the config's discretised source.
    """
    field = LatticeField.initial(config) if initial is None else initial.copy()
    history = [field]
    for _ in range(config.steps):
        field = classical_step(field, config.kappa, config.sigma, config.dt)
        history.append(field)
    return history
