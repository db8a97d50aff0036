"""Lattice-Boltzmann radiative transfer on a statevector simulator, with classical and analytic references."""

from .analytic import AnalyticSolution, evaluate, solve_steady
from .circuits import (
    LcuParams,
    QubitLayout,
    build_absorption_emission,
    build_absorption_scattering,
    build_propagation,
    build_step,
    compute_lcu_params,
    gate_count,
)
from .classical import classical_step, run_to_time
from .errors import ConfigError, DomainError, NumericError, QrteError
from .field import LatticeField, RteConfig, SourceSpec, discretize_source
from .qsim import GateOp, MeasurementHistogram, StateVector, apply_circuit, apply_gate, extract_block, sample
from .rte import (
    EncodedState,
    decode_exact,
    decode_sampled,
    encode,
    run_classical,
    run_quantum,
    shots_study,
)

__version__ = "0.1.0"
