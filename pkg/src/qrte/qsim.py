"""Minimal dense statevector simulator.

Qubit ``k`` contributes bit ``k`` (value ``2**k``) of a basis index. Gates are
2x2 matrices with any number of controls, each control either firing on 1 or
on 0 (an anti-control), plus a native multi-controlled X.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigError, NumericError

UNITARY_TOL = 1e-12
NORM_TOL = 1e-6
MAX_BLOCK_QUBITS = 12

SINGLE = "single"
MCX = "mcx"


@dataclass
class StateVector:
    """Complex amplitudes over ``num_qubits`` qubits."""

    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ConfigError(f"num_qubits must be >= 1, got {self.num_qubits}")
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (2**self.num_qubits,):
            raise ConfigError(
                f"expected {2**self.num_qubits} amplitudes, got shape {self.amps.shape}"
            )

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> "StateVector":
        amps = np.zeros(2**num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    @property
    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``matrix`` is stored as a nested tuple so that gate lists compare by value.
    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 1 fires on ``|1>``,
    polarity 0 on ``|0>``. ``verified`` records whether unitarity was checked.
    """

    kind: str
    target: int
    controls: tuple[tuple[int, int], ...] = ()
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]] | None = None
    label: str = ""
    verified: bool = False

    def __post_init__(self):
        if self.kind not in (SINGLE, MCX):
            raise ConfigError(f"unknown gate kind {self.kind!r}")
        if self.kind == SINGLE and self.matrix is None:
            raise ConfigError("single-qubit gate needs a matrix")
        qubits = [q for q, _ in self.controls]
        if self.target in qubits:
            raise ConfigError(f"target {self.target} is also a control")
        if len(set(qubits)) != len(qubits):
            raise ConfigError(f"duplicate control qubits in {self.controls}")
        for q, pol in self.controls:
            if pol not in (0, 1):
                raise ConfigError(f"control polarity must be 0 or 1, got {pol!r}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def as_array(self) -> np.ndarray:
        if self.kind == MCX:
            return X_MATRIX.copy()
        return np.array(self.matrix, dtype=np.complex128)


def _controls(controls) -> tuple[tuple[int, int], ...]:
    return tuple((int(q), int(p)) for q, p in controls)


def single_qubit(matrix, target: int, controls=(), label: str = "", check: bool = True) -> GateOp:
    """Build a (possibly controlled) single-qubit gate.

    With ``check=True`` the matrix must be unitary within ``UNITARY_TOL``.
    """
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ConfigError(f"gate matrix must be 2x2, got {m.shape}")
    if check and not is_unitary(m):
        raise ConfigError(f"gate {label or '?'} is not unitary")
    frozen = tuple(tuple(complex(v) for v in row) for row in m)
    return GateOp(SINGLE, int(target), _controls(controls), frozen, label, verified=check)


def mcx(target: int, controls=()) -> GateOp:
    """Multi-controlled X; swaps the target pair when every control matches."""
    return GateOp(MCX, int(target), _controls(controls), None, "MCX", verified=True)


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0.0, atol=tol))


# Gate matrices -------------------------------------------------------------

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def phase(alpha: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * alpha)]], dtype=np.complex128)


def rx(beta: float) -> np.ndarray:
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


# Kernel --------------------------------------------------------------------

def _check_indices(gate: GateOp, num_qubits: int) -> None:
    for q in gate.qubits:
        if not 0 <= q < num_qubits:
            raise ConfigError(
                f"{gate.label or gate.kind} touches qubit {q}, state has {num_qubits}"
            )


def _apply_inplace(tensor: np.ndarray, gate: GateOp, num_qubits: int) -> None:
    # tensor has shape (2,)*num_qubits + batch; axis num_qubits-1-k is qubit k
    idx0: list = [slice(None)] * num_qubits
    for q, pol in gate.controls:
        idx0[num_qubits - 1 - q] = pol
    idx1 = list(idx0)
    axis = num_qubits - 1 - gate.target
    idx0[axis] = 0
    idx1[axis] = 1
    idx0, idx1 = tuple(idx0), tuple(idx1)
    lo = tensor[idx0].copy()
    hi = tensor[idx1]
    if gate.kind == MCX:
        tensor[idx0] = hi
        tensor[idx1] = lo
        return
    (m00, m01), (m10, m11) = gate.matrix
    hi = hi.copy()
    tensor[idx0] = m00 * lo + m01 * hi
    tensor[idx1] = m10 * lo + m11 * hi


def _run(amps: np.ndarray, gates: Iterable[GateOp], num_qubits: int) -> np.ndarray:
    # amps: (2**n,) or (2**n, k); evolved in place and returned
    batch = amps.shape[1:]
    tensor = amps.reshape((2,) * num_qubits + batch)
    for gate in gates:
        _check_indices(gate, num_qubits)
        _apply_inplace(tensor, gate, num_qubits)
    return tensor.reshape(amps.shape)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return a new state with ``gate`` applied; the input is left untouched."""
    out = state.copy()
    out.amps = _run(out.amps, (gate,), out.num_qubits)
    return out


def apply_circuit(state: StateVector, steps: Sequence[GateOp]) -> StateVector:
    """Apply ``steps`` in list order to a copy of ``state``."""
    out = state.copy()
    out.amps = _run(out.amps, steps, out.num_qubits)
    return out


# Measurement ---------------------------------------------------------------

@dataclass
class MeasurementHistogram:
    shots: int
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.shots <= 0:
            raise ConfigError(f"shots must be positive, got {self.shots}")
        total = sum(self.counts.values())
        if total != self.shots:
            raise ConfigError(f"counts sum to {total}, expected {self.shots}")

    def frequency(self, index: int) -> float:
        return self.counts.get(index, 0) / self.shots


def sample(state: StateVector, shots: int, seed) -> MeasurementHistogram:
    """Measure every qubit ``shots`` times.

    One multinomial draw over ``|amp|**2``; ``seed`` is anything
    :func:`numpy.random.default_rng` accepts, so equal seeds give equal counts.
    """
    if shots <= 0:
        raise ConfigError(f"shots must be positive, got {shots}")
    p = state.probabilities
    total = p.sum()
    if not np.isfinite(total) or abs(total - 1.0) > NORM_TOL:
        raise NumericError(f"state is not normalized (norm^2 = {total!r})")
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(int(shots), p / total)
    nz = np.flatnonzero(draws)
    return MeasurementHistogram(int(shots), {int(i): int(draws[i]) for i in nz})


# Test oracle ---------------------------------------------------------------

def extract_block(
    circuit: Sequence[GateOp],
    num_qubits: int,
    row_filter: Callable[[int], bool] | None = None,
    col_filter: Callable[[int], bool] | None = None,
) -> np.ndarray:
    """Dense sub-block of the circuit's matrix.

    Column ``j`` is the circuit applied to the ``j``-th basis state accepted by
    ``col_filter``; rows are the basis indices accepted by ``row_filter``, in
    increasing order. ``None`` accepts everything.
    """
    if num_qubits > MAX_BLOCK_QUBITS:
        raise ConfigError(
            f"extract_block refuses {num_qubits} qubits (limit {MAX_BLOCK_QUBITS})"
        )
    dim = 2**num_qubits
    rows = [i for i in range(dim) if row_filter is None or row_filter(i)]
    cols = [j for j in range(dim) if col_filter is None or col_filter(j)]
    amps = np.zeros((dim, len(cols)), dtype=np.complex128)
    amps[cols, np.arange(len(cols))] = 1.0
    out = _run(amps, circuit, num_qubits)
    return out[rows, :]
