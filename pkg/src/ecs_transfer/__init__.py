"""Entanglement transfer between driven atomic qubits and two-mode entangled coherent states."""

from .analytic import (
    Branch,
    EcsState,
    ProjectionKind,
    QubitPairState,
    bare_amplitudes,
    deposit_state_analytic,
    norm_constant,
    p_coeffs,
    retrieval_probability,
    retrieval_state_analytic,
)
from .entanglement import (
    ConcurrenceValue,
    ecs_concurrence,
    pure2q_concurrence,
    schmidt_oracle,
    wootters_concurrence,
)
from .errors import *  # noqa: F401,F403
from .hilbert import CompositeState, FockCutoff, Operator, coherent_state, evolve, fidelity, overlap_analytic, tensor
from .model import (
    SystemParams,
    bare_from_dressed,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    build_h0,
    build_hi,
    dressed_from_bare,
    interaction_frame_rotation,
)
from .protocol import Engine, rwa_validation, run_deposit, run_retrieval

__version__ = "0.1.0"
