import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrte.circuits import (
    QubitLayout,
    build_absorption_emission,
    build_absorption_scattering,
    build_propagation,
    build_step,
    compute_lcu_params,
    flatten,
    gate_count,
    lcu_unitary,
)
from qrte.errors import ConfigError
from qrte.qsim import StateVector, apply_circuit, extract_block, is_unitary

from conftest import a_kernel, a_plus_identity, b_half, dense_circuit, shift_matrix

REF = dict(kappa=2.5, sigma=0.5, dt=1 / 32)


def sqrt_complement(a):
    """sqrt(I - A^2) through the symmetric eigendecomposition (independent of the angle solve)."""
    w, v = np.linalg.eigh(a)
    return v @ np.diag(np.sqrt(1 - w**2)) @ v.T


def a_block(layout):
    return lambda i: layout.ancilla_zero(i)


# Layout ----------------------------------------------------------------------

def test_layout_index_formula():
    lay = QubitLayout(3)
    for a2 in (0, 1):
        for a1 in (0, 1):
            for a0 in (0, 1):
                for s in (0, 1):
                    for d in (0, 1):
                        for i in range(8):
                            expected = ((((a2 * 2 + a1) * 2 + a0) * 2 + s) * 2 + d) * 8 + i
                            a = a0 + 2 * a1 + 4 * a2
                            assert lay.index(i, d, s, a) == expected
                            assert lay.unpack(expected) == (i, d, s, a)
    assert lay.num_qubits == 8
    assert (lay.d, lay.s, lay.a0, lay.a1, lay.a2) == (3, 4, 5, 6, 7)


# LCU parameters ------------------------------------------------------------------

def test_reference_lcu_constants():
    p = compute_lcu_params(**REF)
    assert p.a0 == 0.9296875
    assert p.a1 == 0.0078125
    assert p.b0 == pytest.approx(0.735473, abs=1e-6)
    assert p.b1 == pytest.approx(-0.039502, abs=1e-6)
    # C1 = A + i sqrt(I - A^2) entries must be a0 + i b0/2 and a1 + i b1/2
    c1 = a_kernel(**REF) + 1j * sqrt_complement(a_kernel(**REF))
    np.testing.assert_allclose(c1, p.c1(), atol=1e-12)


def test_reference_angles_reconstruct_c1_and_c2():
    p = compute_lcu_params(**REF)
    np.testing.assert_allclose(lcu_unitary(p.alpha1, p.beta1), p.c1(), atol=1e-12)
    np.testing.assert_allclose(lcu_unitary(p.alpha2, p.beta2), p.c2(), atol=1e-12)
    assert p.alpha2 == -p.alpha1 and p.beta2 == -p.beta1


def test_identity_kernel():
    p = compute_lcu_params(0.0, 0.0, 0.3)
    assert (p.a0, p.a1, p.b0, p.b1, p.alpha1, p.beta1) == (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(p.c1(), np.eye(2))


@pytest.mark.parametrize(
    "kappa, sigma, dt",
    [(2.5, 0.5, 1.0), (0.0, 1.0, 0.5), (-1.0, 0.0, 0.1)],
)
def test_validity_gate_rejects(kappa, sigma, dt):
    with pytest.raises(ConfigError, match="real b0, b1"):
        compute_lcu_params(kappa, sigma, dt)


@st.composite
def valid_params(draw):
    dt = draw(st.floats(1e-4, 1.0))
    kappa_dt = draw(st.floats(0.0, 2.0))
    # 1 - kappa*dt + sigma*dt in [-1, 1]  <=>  sigma*dt in [kappa_dt - 2, kappa_dt]
    sigma_dt = draw(st.floats(0.0, kappa_dt))
    return kappa_dt / dt, sigma_dt / dt, dt


@settings(max_examples=300, deadline=None)
@given(valid_params())
def test_lcu_properties(args):
    kappa, sigma, dt = args
    p = compute_lcu_params(kappa, sigma, dt)
    c1, c2 = p.c1(), p.c2()
    assert is_unitary(c1) and is_unitary(c2)
    np.testing.assert_allclose((c1 + c2) / 2, a_kernel(kappa, sigma, dt), atol=1e-12)
    np.testing.assert_allclose(c2, c1.conj(), atol=0)
    np.testing.assert_allclose(lcu_unitary(p.alpha1, p.beta1), c1, atol=1e-12)
    np.testing.assert_allclose(lcu_unitary(p.alpha2, p.beta2), c2, atol=1e-12)
    assert -np.pi <= p.beta1 <= np.pi


# Absorption and scattering -------------------------------------------------------

def test_absorption_scattering_gate_sequence():
    lay = QubitLayout(2)
    gates = build_absorption_scattering(lay, compute_lcu_params(**REF))
    assert [g.label for g in gates] == ["H"] + ["X", "P", "X", "P", "RX"] * 2 + ["H"]
    assert gates[0].target == gates[-1].target == lay.a0
    for g in gates[1:6]:
        assert g.target == lay.d and g.controls == ((lay.s, 0), (lay.a0, 0))
    for g in gates[6:11]:
        assert g.target == lay.d and g.controls == ((lay.s, 0), (lay.a0, 1))


@pytest.mark.parametrize("n", [1, 2])
def test_absorption_scattering_block(n):
    lay = QubitLayout(n)
    gates = build_absorption_scattering(lay, compute_lcu_params(**REF))
    block = extract_block(gates, lay.num_qubits, a_block(lay), a_block(lay))
    np.testing.assert_allclose(block, a_plus_identity(**REF, M=lay.M), atol=1e-12)


def test_absorption_scattering_identity_when_lossless():
    lay = QubitLayout(1)
    gates = build_absorption_scattering(lay, compute_lcu_params(0.0, 0.0, 1 / 32))
    block = extract_block(gates, lay.num_qubits, a_block(lay), a_block(lay))
    np.testing.assert_allclose(block, np.eye(8), atol=1e-15)


def test_absorption_scattering_keeps_source_basis_state():
    lay = QubitLayout(1)
    gates = build_absorption_scattering(lay, compute_lcu_params(**REF))
    for d in (0, 1):
        for i in (0, 1):
            idx = lay.index(i, d, s=1, a=0)
            out = apply_circuit(StateVector.basis(lay.num_qubits, idx), gates)
            np.testing.assert_allclose(out.amps, StateVector.basis(lay.num_qubits, idx).amps, atol=1e-15)


# Absorption and emission ---------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_absorption_emission_block(n):
    lay = QubitLayout(n)
    gates = build_absorption_emission(lay)
    block = extract_block(gates, lay.num_qubits, a_block(lay), a_block(lay))
    np.testing.assert_allclose(block, b_half(lay.M), atol=1e-12)


def test_absorption_emission_on_vector():
    lay = QubitLayout(2)
    rng = np.random.default_rng(0)
    i_as, s_half = rng.random(2 * lay.M), rng.random(2 * lay.M)
    v = np.zeros(2**lay.num_qubits, dtype=complex)
    v[: 4 * lay.M] = np.concatenate([i_as, s_half])
    out = apply_circuit(StateVector(lay.num_qubits, v / np.linalg.norm(v)), build_absorption_emission(lay))
    got = out.amps[: 4 * lay.M] * np.linalg.norm(v)
    np.testing.assert_allclose(got, 0.5 * np.concatenate([i_as + s_half, s_half]), atol=1e-12)

    v[2 * lay.M : 4 * lay.M] = 0
    out = apply_circuit(StateVector(lay.num_qubits, v / np.linalg.norm(v)), build_absorption_emission(lay))
    got = out.amps[: 4 * lay.M] * np.linalg.norm(v)
    np.testing.assert_allclose(got, 0.5 * np.concatenate([i_as, np.zeros(2 * lay.M)]), atol=1e-12)


# Propagation ------------------------------------------------------------------

def _basis_image(gates, lay, idx):
    out = apply_circuit(StateVector.basis(lay.num_qubits, idx), gates)
    (hit,) = np.flatnonzero(np.abs(out.amps) > 0.5)
    return hit


def test_increment_wraps():
    lay = QubitLayout(2)
    assert _basis_image(build_propagation(lay), lay, lay.index(3, 0, 0)) == lay.index(0, 0, 0)


def test_decrement_wraps():
    lay = QubitLayout(2)
    assert _basis_image(build_propagation(lay), lay, lay.index(0, 1, 0)) == lay.index(3, 1, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_propagation_permutation(n):
    lay = QubitLayout(n)
    u = dense_circuit(build_propagation(lay), lay.num_qubits)
    assert np.all((u == 0) | (u == 1))
    assert np.all(u.sum(axis=0) == 1) and np.all(u.sum(axis=1) == 1)
    for idx in range(2**lay.num_qubits):
        i, d, s, a = lay.unpack(idx)
        if s == 0:
            i = (i + 1) % lay.M if d == 0 else (i - 1) % lay.M
        assert u[lay.index(i, d, s, a), idx] == 1


def test_right_then_left_is_identity():
    lay = QubitLayout(3)
    gates = build_propagation(lay)
    right, left = gates[: lay.n], gates[lay.n :]
    # drop the direction control so both cascades act on the same sector
    strip = lambda gs: [type(g)(g.kind, g.target, tuple(c for c in g.controls if c[0] != lay.d)) for g in gs]
    u = dense_circuit(strip(right) + strip(left), lay.num_qubits)
    np.testing.assert_array_equal(u, np.eye(2**lay.num_qubits))


@pytest.mark.parametrize("n", [1, 2])
def test_propagation_block(n):
    lay = QubitLayout(n)
    block = extract_block(build_propagation(lay), lay.num_qubits, a_block(lay), a_block(lay))
    np.testing.assert_array_equal(block, shift_matrix(lay.M))


# Composition ------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("kappa, sigma, dt", [(2.5, 0.5, 1 / 32), (3.0, 2.9, 0.4), (0.0, 0.0, 0.1)])
def test_full_step_block(n, kappa, sigma, dt):
    lay = QubitLayout(n)
    gates = flatten(build_step(lay, compute_lcu_params(kappa, sigma, dt)))
    block = extract_block(gates, lay.num_qubits, a_block(lay), a_block(lay))
    expected = shift_matrix(lay.M) @ b_half(lay.M) @ a_plus_identity(kappa, sigma, dt, lay.M)
    np.testing.assert_allclose(block, expected, atol=1e-12)


def test_builders_are_pure():
    lay = QubitLayout(3)
    p = compute_lcu_params(**REF)
    assert build_step(lay, p) == build_step(lay, compute_lcu_params(**REF))


# Gate counts ------------------------------------------------------------------

def test_gate_counts():
    lay = QubitLayout(5)
    assert gate_count([])["total"] == 0
    ae = gate_count(build_absorption_emission(lay))
    assert ae["total"] == 7
    assert ae["by_label"] == {"H": 4, "X": 2, "Z": 1}
    assert ae["controlled"] == 3
    assert gate_count(build_absorption_scattering(lay, compute_lcu_params(**REF)))["total"] == 12
    step = gate_count(build_step(lay, compute_lcu_params(**REF)))
    assert step["by_stage"] == {"absorption_scattering": 12, "absorption_emission": 7, "propagation": 10}
    assert step["total"] == 29
    assert step["max_controls"] == 6
