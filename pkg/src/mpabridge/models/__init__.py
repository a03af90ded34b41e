"""Concrete models: open and ring TASEP, two-lines and queue representations, harmonic model."""

from .exploration import exploration_walk
from .harmonic import HarmonicParams, harmonic_bridge_sample, harmonic_exact_small, harmonic_sample
from .queue import QueueInstance, queue_enumerate, queue_sample, queue_word
from .ring import (RingParams, ring_canonical, ring_generator, ring_grand, ring_mpa_constrained,
                   ring_sample, ring_sample_grand, ring_trace_canonical)
from .tasep import (TasepParams, tasep_case1_decompose, tasep_case1_mixture, tasep_case1_mpa,
                    tasep_general_decompose, tasep_general_mixture, tasep_general_mpa, tasep_generator)
from .two_lines import two_lines_enumerate, two_lines_weight

__all__ = [
    "HarmonicParams", "QueueInstance", "RingParams", "TasepParams",
    "exploration_walk", "harmonic_bridge_sample", "harmonic_exact_small", "harmonic_sample",
    "queue_enumerate", "queue_sample", "queue_word",
    "ring_canonical", "ring_generator", "ring_grand", "ring_mpa_constrained", "ring_sample",
    "ring_sample_grand", "ring_trace_canonical",
    "tasep_case1_decompose", "tasep_case1_mixture", "tasep_case1_mpa", "tasep_general_decompose",
    "tasep_general_mixture", "tasep_general_mpa", "tasep_generator",
    "two_lines_enumerate", "two_lines_weight",
]
