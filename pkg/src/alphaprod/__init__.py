"""Permutation products over A_t: cycle rewriting, 1-local maps, reductions and leakage experiments."""

__version__ = "0.1.0"

from .perm import (  # noqa: F401
    Parity,
    Permutation,
    commutator,
    compose,
    conjugate,
    conjugator_in_A,
    conjugator_in_S,
    decompose,
    inverse,
    parity,
    parse,
)
from .transform import TransformScript, TransformStep, apply_script, convert  # noqa: F401
from .vectors import ProductVector, VectorMap, apply_vector_map, build_alpha_to_beta  # noqa: F401
