"""Quantum time stepping: encode, run the three circuit stages, decode.

Each step loads the stacked vector ``phi = (I+, I-, dt*S+/2, dt*S-/2)`` into
the ``a = 000`` sector of an ``n + 5`` qubit register, applies the
absorption-and-scattering, absorption-and-emission and propagation circuits,
and reads the intensities back from the post-selected sector scaled by
``2 * ||phi||``. ``exact`` mode reads amplitudes directly; ``sampled`` mode
estimates them from a seeded shot histogram.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import classical
from .circuits import QubitLayout, build_step, compute_lcu_params, flatten
from .errors import ConfigError, NumericError
from .field import EXACT, SAMPLED, LatticeField, RteConfig, discretize_source, field_rms
from .qsim import GateOp, MeasurementHistogram, StateVector, apply_circuit, sample

__all__ = [
    "EncodedState",
    "StepDiagnostics",
    "QuantumRun",
    "discretize_source",
    "encode",
    "decode_exact",
    "decode_sampled",
    "step_circuit",
    "run_quantum",
    "run_classical",
    "shots_study",
    "loglog_slope",
]

log = logging.getLogger(__name__)

IMAG_TOL = 1e-6
SOURCE_DRIFT_TOL = 1e-6


@dataclass
class EncodedState:
    """A register holding ``phi / ||phi||`` in its ``a = 000`` sector.

    ``dt`` and the original sources are kept so the decoder can check that the
    source sector came through the step untouched.
    """

    state: StateVector
    norm_phi: float
    dt: float
    S_plus: np.ndarray
    S_minus: np.ndarray

    @property
    def layout(self) -> QubitLayout:
        return QubitLayout(self.state.num_qubits - 5)


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    success_probability: float
    norm_phi: float


@dataclass
class QuantumRun:
    fields: list[LatticeField]
    diagnostics: list[StepDiagnostics] = field(default_factory=list)

    @property
    def final(self) -> LatticeField:
        return self.fields[-1]


def encode(field: LatticeField, dt: float) -> EncodedState:
    """Amplitude-inject ``phi / ||phi||`` (no state-preparation circuit)."""
    phi = field.phi(dt)
    if not np.all(np.isfinite(phi)):
        raise NumericError("field contains non-finite entries")
    if np.any(phi < 0):
        log.warning("encoding a field with negative entries; sampled decoding assumes non-negative amplitudes")
    norm_phi = float(np.linalg.norm(phi))
    if norm_phi == 0.0:
        raise NumericError("cannot encode an all-zero field")
    layout = QubitLayout(field.M.bit_length() - 1)
    amps = np.zeros(2**layout.num_qubits, dtype=np.complex128)
    amps[: layout.block_size] = phi / norm_phi
    return EncodedState(
        StateVector(layout.num_qubits, amps), norm_phi, dt, field.S_plus.copy(), field.S_minus.copy()
    )


def decode_exact(es: EncodedState, scale: float = 2.0) -> LatticeField:
    """Read intensities from the ``a = 000`` amplitudes times ``scale * ||phi||``.

    ``scale=2`` undoes the factor 1/2 of the absorption-and-emission block; use
    ``scale=1`` on a freshly encoded state. Sources are checked against the
    encoded ones and then carried forward unchanged.
    """
    M = es.layout.M
    block = es.state.amps[: 4 * M] * (scale * es.norm_phi)
    imag = float(np.max(np.abs(block.imag)))
    if imag >= IMAG_TOL:
        raise NumericError(f"post-selected amplitudes have imaginary part {imag:.3e}")
    vals = block.real
    half_dt = 0.5 * es.dt
    drift = max(
        float(np.max(np.abs(vals[2 * M : 3 * M] - half_dt * es.S_plus))),
        float(np.max(np.abs(vals[3 * M :] - half_dt * es.S_minus))),
    )
    if drift >= SOURCE_DRIFT_TOL:
        raise NumericError(f"source sector drifted by {drift:.3e} during the step")
    return LatticeField(vals[:M].copy(), vals[M : 2 * M].copy(), es.S_plus.copy(), es.S_minus.copy())


def decode_sampled(
    hist: MeasurementHistogram,
    norm_phi: float,
    dt: float,
    prior_sources: Sequence[np.ndarray],
) -> LatticeField:
    """Estimate intensities as ``2 ||phi|| sqrt(count / shots)``.

    Amplitudes are taken non-negative. Sources are not re-estimated from the
    counts; ``prior_sources = (S_plus, S_minus)`` is carried forward.

    Raises
    ------
    NumericError
        If no shot landed in the ``a = 000`` sector.
    """
    S_plus, S_minus = (np.asarray(s, dtype=float) for s in prior_sources)
    M = S_plus.shape[0]
    counts = np.zeros(4 * M)
    for idx, c in hist.counts.items():
        if idx < 4 * M:
            counts[idx] = c
    if counts.sum() == 0:
        raise NumericError(
            f"no shots in the post-selected sector out of {hist.shots}; "
            "success probability too low for the shot budget"
        )
    est = 2.0 * norm_phi * np.sqrt(counts[: 2 * M] / hist.shots)
    return LatticeField(est[:M], est[M:], S_plus.copy(), S_minus.copy())


def step_circuit(config: RteConfig) -> list[GateOp]:
    """Gate list for one full time step of ``config``."""
    params = compute_lcu_params(config.kappa, config.sigma, config.dt)
    return flatten(build_step(QubitLayout(config.n), params))


def _evolve(es: EncodedState, circuit: Sequence[GateOp]) -> EncodedState:
    return EncodedState(apply_circuit(es.state, circuit), es.norm_phi, es.dt, es.S_plus, es.S_minus)


def run_quantum(
    config: RteConfig,
    initial: LatticeField | None = None,
    mode: str | None = None,
    shots: int | None = None,
    seed: int | None = None,
) -> QuantumRun:
    """Run ``config.steps`` encode / circuit / decode cycles.

    ``mode``, ``shots`` and ``seed`` override the config values. In sampled
    mode every step draws from its own child of ``SeedSequence(seed)``.

    Raises
    ------
    NumericError
        When a step cannot be encoded or decoded (e.g. no post-selected
        shots in sampled mode); the message carries the step index.
    """
    mode = config.mode if mode is None else mode
    shots = config.shots if shots is None else shots
    seed = config.seed if seed is None else seed
    if mode not in (EXACT, SAMPLED):
        raise ConfigError(f"unknown mode {mode!r}")
    if shots <= 0:
        raise ConfigError(f"shots must be positive, got {shots}")
    circuit = step_circuit(config)
    M = config.M
    current = LatticeField.initial(config) if initial is None else initial.copy()
    if current.M != M:
        raise ConfigError(f"initial field has {current.M} sites, config expects {M}")
    step_seeds = np.random.SeedSequence(seed).spawn(config.steps) if mode == SAMPLED else None
    run = QuantumRun([current])
    for k in range(config.steps):
        try:
            es = _evolve(encode(current, config.dt), circuit)
            p_success = float(np.sum(es.state.probabilities[: 4 * M]))
            run.diagnostics.append(StepDiagnostics(k + 1, p_success, es.norm_phi))
            if mode == EXACT:
                current = decode_exact(es)
            else:
                hist = sample(es.state, shots, step_seeds[k])
                current = decode_sampled(hist, es.norm_phi, config.dt, (current.S_plus, current.S_minus))
        except NumericError as exc:
            raise NumericError(f"step {k + 1}: {exc}") from exc
        run.fields.append(current)
    return run


def run_classical(config: RteConfig, initial: LatticeField | None = None) -> list[LatticeField]:
    """Classical reference; fields after ``0..config.steps`` steps."""
    return classical.run_to_time(config, initial)


def shots_study(
    config: RteConfig,
    shot_list: Sequence[int],
    replicas: int = 5,
    seed: int = 0,
    initial: LatticeField | None = None,
) -> list[dict]:
    """Mean final-step RMS error of sampled mode against exact mode, per shot count.

    Replica ``r`` of shot count ``j`` uses child ``j * replicas + r`` of
    ``SeedSequence(seed)``, so results do not depend on execution order.
    """
    if not shot_list:
        raise ConfigError("shot list is empty")
    if replicas < 1:
        raise ConfigError(f"replicas must be >= 1, got {replicas}")
    exact = run_quantum(config, initial, mode=EXACT).final
    children = np.random.SeedSequence(seed).spawn(len(shot_list) * replicas)
    rows = []
    for j, shots in enumerate(shot_list):
        errors = []
        for r in range(replicas):
            child = children[j * replicas + r]
            child_seed = int(child.generate_state(1, np.uint64)[0])
            sampled = run_quantum(config, initial, mode=SAMPLED, shots=int(shots), seed=child_seed).final
            errors.append(field_rms(sampled, exact))
        rows.append(
            {
                "shots": int(shots),
                "rms_error": float(np.mean(errors)),
                "rms_std": float(np.std(errors)),
                "replicas": replicas,
            }
        )
    return rows


def loglog_slope(rows: Sequence[dict]) -> float:
    """Least-squares slope of ``log(rms_error)`` against ``log(shots)``."""
    x = np.log([r["shots"] for r in rows])
    y = np.log([r["rms_error"] for r in rows])
    return float(np.polyfit(x, y, 1)[0])
