"""Gate lists for one lattice-Boltzmann time step over the ``n + 5`` qubit register.

Register layout (qubit index, low to high): lattice bits ``l_0 .. l_{n-1}``,
direction ``d``, switch ``s``, ancillas ``a_0, a_1, a_2``. With ``M = 2**n``,
the ``a = 000`` block is ordered ``(s, d, i)`` which is exactly the classical
vector ``(I+, I-, dt*S+/2, dt*S-/2)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .qsim import H_MATRIX, X_MATRIX, Z_MATRIX, GateOp, mcx, phase, rx, single_qubit

# slack for eigenvalues that leave [-1, 1] by rounding only
_GATE_SLACK = 1e-12


@dataclass(frozen=True)
class QubitLayout:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"need at least one lattice qubit, got n={self.n}")

    @property
    def M(self) -> int:
        return 2**self.n

    @property
    def num_qubits(self) -> int:
        return self.n + 5

    @property
    def lattice(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def d(self) -> int:
        return self.n

    @property
    def s(self) -> int:
        return self.n + 1

    @property
    def a0(self) -> int:
        return self.n + 2

    @property
    def a1(self) -> int:
        return self.n + 3

    @property
    def a2(self) -> int:
        return self.n + 4

    @property
    def block_size(self) -> int:
        """Length of the ``a = 000`` sector, ``4M``."""
        return 4 * self.M

    def index(self, i: int, d: int = 0, s: int = 0, a: int = 0) -> int:
        """Global basis index; ``a`` packs the ancillas as ``a0 + 2*a1 + 4*a2``."""
        return (((a * 2 + s) * 2 + d) << self.n) + i

    def unpack(self, index: int) -> tuple[int, int, int, int]:
        """Inverse of :meth:`index`: ``(i, d, s, a)``."""
        i = index & (self.M - 1)
        rest = index >> self.n
        return i, rest & 1, (rest >> 1) & 1, rest >> 2

    def ancilla_zero(self, index: int) -> bool:
        return index < self.block_size


@dataclass(frozen=True)
class LcuParams:
    """Constants splitting the absorption-and-scattering matrix into two unitaries.

    ``C1 = exp(i*alpha1) Rx(beta1)`` has entries ``a0 + i*b0/2`` (diagonal)
    and ``a1 + i*b1/2`` (off-diagonal); ``C2`` is its complex conjugate and
    ``(C1 + C2) / 2`` is the 2x2 kernel of the absorption-and-scattering step.
    """

    a0: float
    a1: float
    b0: float
    b1: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def a_matrix(self) -> np.ndarray:
        return np.array([[self.a0, self.a1], [self.a1, self.a0]], dtype=float)

    def c1(self) -> np.ndarray:
        diag, off = self.a0 + 0.5j * self.b0, self.a1 + 0.5j * self.b1
        return np.array([[diag, off], [off, diag]])

    def c2(self) -> np.ndarray:
        diag, off = self.a0 - 0.5j * self.b0, self.a1 - 0.5j * self.b1
        return np.array([[diag, off], [off, diag]])


def lcu_unitary(alpha: float, beta: float) -> np.ndarray:
    """``exp(i*alpha) Rx(beta)``, the 2x2 matrix realised by the five-gate block."""
    return np.exp(1j * alpha) * rx(beta)


def compute_lcu_params(kappa: float, sigma: float, dt: float) -> LcuParams:
    """Closed-form LCU constants and rotation angles.

    The 2x2 kernel has eigenvalues ``lam_p = 1 - kappa*dt + sigma*dt`` (on
    ``|+>``) and ``lam_m = 1 - kappa*dt`` (on ``|->``). Writing each as
    ``cos(theta)`` makes ``C1 = A + i sqrt(I - A^2)`` diagonal with phases
    ``exp(i*theta)``, which fixes ``alpha1`` and ``beta1`` directly.

    Raises
    ------
    ConfigError
        If either eigenvalue lies outside ``[-1, 1]``; then ``b0, b1`` would be
        complex and ``C1, C2`` would not be unitary.
    """
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    lam_p = 1.0 - kappa * dt + sigma * dt
    lam_m = 1.0 - kappa * dt
    for name, lam in (("1 - kappa*dt + sigma*dt", lam_p), ("1 - kappa*dt", lam_m)):
        if not np.isfinite(lam) or abs(lam) > 1.0 + _GATE_SLACK:
            raise ConfigError(
                f"{name} = {lam!r} is outside [-1, 1]: the LCU decomposition "
                "requires real b0, b1 (unitary C1, C2)"
            )
    lam_p = float(np.clip(lam_p, -1.0, 1.0))
    lam_m = float(np.clip(lam_m, -1.0, 1.0))
    s_p = np.sqrt(max(0.0, 1.0 - lam_p * lam_p))
    s_m = np.sqrt(max(0.0, 1.0 - lam_m * lam_m))
    theta_p = np.arctan2(s_p, lam_p)
    theta_m = np.arctan2(s_m, lam_m)
    alpha1 = 0.5 * (theta_p + theta_m)
    beta1 = theta_m - theta_p
    return LcuParams(
        a0=1.0 - kappa * dt + 0.5 * sigma * dt,
        a1=0.5 * sigma * dt,
        b0=float(s_p + s_m),
        b1=float(s_p - s_m),
        alpha1=float(alpha1),
        alpha2=float(-alpha1),
        beta1=float(beta1),
        beta2=float(-beta1),
    )


def _lcu_block(layout: QubitLayout, alpha: float, beta: float, a0_pol: int) -> list[GateOp]:
    ctrl = ((layout.s, 0), (layout.a0, a0_pol))
    d = layout.d
    return [
        single_qubit(X_MATRIX, d, ctrl, "X"),
        single_qubit(phase(alpha), d, ctrl, "P"),
        single_qubit(X_MATRIX, d, ctrl, "X"),
        single_qubit(phase(alpha), d, ctrl, "P"),
        single_qubit(rx(beta), d, ctrl, "RX"),
    ]


def build_absorption_scattering(layout: QubitLayout, params: LcuParams) -> list[GateOp]:
    """H on a0, C1 on d (s=0, a0=0), C2 on d (s=0, a0=1), H on a0."""
    return (
        [single_qubit(H_MATRIX, layout.a0, (), "H")]
        + _lcu_block(layout, params.alpha1, params.beta1, 0)
        + _lcu_block(layout, params.alpha2, params.beta2, 1)
        + [single_qubit(H_MATRIX, layout.a0, (), "H")]
    )


def build_absorption_emission(layout: QubitLayout) -> list[GateOp]:
    """Adds the source sector onto the intensity sector; a=000 block is ``B/2``."""
    a1, a2, s = layout.a1, layout.a2, layout.s
    return [
        single_qubit(H_MATRIX, a1, (), "H"),
        single_qubit(H_MATRIX, a2, (), "H"),
        single_qubit(X_MATRIX, s, ((a1, 1), (a2, 0)), "X"),
        single_qubit(X_MATRIX, s, ((a1, 1), (a2, 1)), "X"),
        single_qubit(Z_MATRIX, s, ((a1, 1), (a2, 1)), "Z"),
        single_qubit(H_MATRIX, a1, (), "H"),
        single_qubit(H_MATRIX, a2, (), "H"),
    ]


def _cyclic_shift(layout: QubitLayout, carry: int, extra) -> list[GateOp]:
    # carry=1: increment (bit k flips when all lower bits are 1);
    # carry=0: decrement (bit k flips when all lower bits are 0).
    # Most significant bit first so the lower bits are still unmodified.
    gates = []
    for k in reversed(range(layout.n)):
        controls = tuple((j, carry) for j in range(k)) + tuple(extra)
        gates.append(mcx(k, controls))
    return gates


def build_propagation(layout: QubitLayout) -> list[GateOp]:
    """Periodic streaming: ``i -> i+1`` on (s=0, d=0), ``i -> i-1`` on (s=0, d=1)."""
    right = _cyclic_shift(layout, 1, ((layout.d, 0), (layout.s, 0)))
    left = _cyclic_shift(layout, 0, ((layout.d, 1), (layout.s, 0)))
    return right + left


def build_step(layout: QubitLayout, params: LcuParams) -> dict[str, list[GateOp]]:
    """The three stages of one time step, in application order."""
    return {
        "absorption_scattering": build_absorption_scattering(layout, params),
        "absorption_emission": build_absorption_emission(layout),
        "propagation": build_propagation(layout),
    }


def flatten(stages: Mapping[str, Sequence[GateOp]]) -> list[GateOp]:
    return [g for gates in stages.values() for g in gates]


def gate_count(steps: Sequence[GateOp] | Mapping[str, Sequence[GateOp]]) -> dict:
    """Count gates as emitted, without decomposing multi-controlled gates.

    ``steps`` is a flat gate list or a mapping of stage name to gate list.
    ``multi_controlled`` counts gates with two or more controls.
    """
    stages = dict(steps) if isinstance(steps, Mapping) else {"all": list(steps)}
    gates = flatten(stages)
    by_controls = Counter(len(g.controls) for g in gates)
    return {
        "total": len(gates),
        "by_stage": {name: len(g) for name, g in stages.items()},
        "by_label": dict(sorted(Counter(g.label for g in gates).items())),
        "controlled": sum(v for k, v in by_controls.items() if k >= 1),
        "multi_controlled": sum(v for k, v in by_controls.items() if k >= 2),
        "max_controls": max(by_controls, default=0),
    }
