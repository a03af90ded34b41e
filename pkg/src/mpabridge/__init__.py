"""Matrix product ansatz measures and their Markov-bridge mixture form."""

from . import _backend
from .bridge import BridgeSpec, backward_table, endpoint_law, path_probability, pinned, sample_paths
from .errors import MpaBridgeError
from .mixture import MarginalKernel, MixtureSpec, decompose, mixture_probability, sample_configurations
from .mpa import MpaSpec, from_mixture, partition_function, probability
from .oracle import ExactDistribution, enumerate_measure, enumerate_mixture
from .spectral import PerronPair, doob_transform, is_irreducible, perron

__version__ = "0.1.0"
backend = _backend.name

__all__ = [
    "BridgeSpec", "ExactDistribution", "MarginalKernel", "MixtureSpec", "MpaBridgeError", "MpaSpec",
    "PerronPair", "backend", "backward_table", "decompose", "doob_transform", "endpoint_law",
    "enumerate_measure", "enumerate_mixture", "from_mixture", "is_irreducible", "mixture_probability",
    "partition_function", "path_probability", "perron", "pinned", "probability", "sample_configurations",
    "sample_paths",
]
