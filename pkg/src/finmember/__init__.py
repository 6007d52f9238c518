"""Membership problems for permutation groups: subgroups, rational and context-free
subsets, knapsack variants, and the reductions between them."""

__version__ = "0.1.0"

from .perm import Permutation, compose, inverse, order, parse_perm, power  # noqa: E402
from .bsgs import Bsgs, factor_as_slp, reduce_generators, schreier_sims  # noqa: E402
from .errors import CapExceeded, InputError, InvariantBreach  # noqa: E402

__all__ = [
    "Permutation", "compose", "inverse", "order", "parse_perm", "power",
    "Bsgs", "factor_as_slp", "reduce_generators", "schreier_sims",
    "CapExceeded", "InputError", "InvariantBreach", "__version__",
]
