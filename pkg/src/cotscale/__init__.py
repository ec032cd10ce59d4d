"""Error bounds, synthetic tasks, and desk-scale experiments for
chain-of-thought task decomposition."""

from . import intrinsic_dim, learner, taskgen, theory, trie
from .rng import derive_seed, stream
from .theory import DegreeProfile, ErrorModelParams, GainGrid

__version__ = "0.1.0"

__all__ = [
    "DegreeProfile",
    "ErrorModelParams",
    "GainGrid",
    "derive_seed",
    "intrinsic_dim",
    "learner",
    "stream",
    "taskgen",
    "theory",
    "trie",
    "__version__",
]
