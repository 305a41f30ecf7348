"""Two-stage controlled-phase gate on two cat-state qubits coupled through a transmon qutrit."""

from __future__ import annotations

from .catstates import PAPER_STATES, CatEncoding, InitialStateSpec
from .errors import CatGateError
from .experiment import ModelTier, fidelity, run_gate, sweep_kappa, truth_table
from .hilbert import SpaceDescriptor
from .model import NoiseParams, SystemParams, derive, paper_defaults, validate_regime
from .propagate import IntegratorConfig

__version__ = "0.1.0"

__all__ = [
    "PAPER_STATES",
    "CatEncoding",
    "CatGateError",
    "InitialStateSpec",
    "IntegratorConfig",
    "ModelTier",
    "NoiseParams",
    "SpaceDescriptor",
    "SystemParams",
    "derive",
    "fidelity",
    "paper_defaults",
    "run_gate",
    "sweep_kappa",
    "truth_table",
    "validate_regime",
]
