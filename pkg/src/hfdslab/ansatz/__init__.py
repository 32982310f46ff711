"""Trial wavefunctions: hidden-fermion determinant states and baselines."""

from .checkpoint import load_state, save_state
from .hfds import HfdsState, slater
from .mlp import ComplexMlp, RealMlp, selu, selu_complex, selu_prime
from .probes import AmplitudeProbeState, GutzwillerState, PhaseProbeState
from .state import ConditioningError, TrialState

__all__ = [
    "AmplitudeProbeState", "ComplexMlp", "ConditioningError", "GutzwillerState",
    "HfdsState", "PhaseProbeState", "RealMlp", "TrialState", "load_state",
    "save_state", "selu", "selu_complex", "selu_prime", "slater",
]
