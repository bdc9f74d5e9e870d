"""Statevector simulation engine and circuit representation."""

from .circuit import (
    CNOT,
    H,
    QFT,
    Block,
    Circuit,
    Controlled,
    Diagonal,
    Gate,
    GlobalPhase,
    InverseQFT,
    PhaseShift,
    Rx,
    Ry,
    Rz,
    Unitary1Q,
    UnitaryMatrix,
    X,
    controlled_on_state,
)
from .statevector import (
    ShotResult,
    Statevector,
    apply,
    apply_qft,
    inner_product,
    outcome_probability,
    project,
    reduced_system,
    run,
    sample,
    unitary_of,
    zero_state,
)

__all__ = [
    "Block", "CNOT", "Circuit", "Controlled", "Diagonal", "Gate", "GlobalPhase", "H",
    "InverseQFT", "PhaseShift", "QFT", "Rx", "Ry", "Rz", "ShotResult", "Statevector",
    "Unitary1Q", "UnitaryMatrix", "X", "apply", "apply_qft", "controlled_on_state",
    "inner_product", "outcome_probability", "project", "reduced_system", "run", "sample",
    "unitary_of", "zero_state",
]
