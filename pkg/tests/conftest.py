import numpy as np
import pytest

from qrte import RteConfig
from qrte.field import reference_source
from qrte.qsim import MCX

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ref_config():
    """kappa=2.5, sigma=0.5, five lattice qubits, dt=1/32, 64 steps."""
    return RteConfig(kappa=2.5, sigma=0.5, mu=1.0, c=1.0, n=5, source=reference_source(), steps=64)


def dense_gate(gate, num_qubits):
    """Brute-force full matrix of one gate, column by column over basis states."""
    dim = 2**num_qubits
    m = np.array([[0, 1], [1, 0]]) if gate.kind == MCX else np.array(gate.matrix)
    out = np.zeros((dim, dim), dtype=complex)
    t = gate.target
    for j in range(dim):
        if all(((j >> q) & 1) == pol for q, pol in gate.controls):
            b = (j >> t) & 1
            j0, j1 = j & ~(1 << t), j | (1 << t)
            out[j0, j] += m[0, b]
            out[j1, j] += m[1, b]
        else:
            out[j, j] = 1.0
    return out


def dense_circuit(gates, num_qubits):
    u = np.eye(2**num_qubits, dtype=complex)
    for g in gates:
        u = dense_gate(g, num_qubits) @ u
    return u


def a_kernel(kappa, sigma, dt):
    keep = 1 - kappa * dt + sigma * dt / 2
    gain = sigma * dt / 2
    return np.array([[keep, gain], [gain, keep]])


def shift_matrix(M):
    """Block permutation on (s, d, i): i+1 on (0,0), i-1 on (0,1), identity on s=1."""
    n4 = 4 * M
    p = np.zeros((n4, n4))
    for i in range(M):
        p[(i + 1) % M, i] = 1
        p[M + (i - 1) % M, M + i] = 1
        p[2 * M + i, 2 * M + i] = 1
        p[3 * M + i, 3 * M + i] = 1
    return p


def b_half(M):
    return np.kron(np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2 * M)) / 2


def a_plus_identity(kappa, sigma, dt, M):
    out = np.eye(4 * M)
    out[: 2 * M, : 2 * M] = np.kron(a_kernel(kappa, sigma, dt), np.eye(M))
    return out
