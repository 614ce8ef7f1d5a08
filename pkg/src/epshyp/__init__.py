"""Block-weighted backward shifts on direct sums of sequence spaces that are
ε-hypercyclic without being hypercyclic, with a constructive criterion engine
and property suites for every quantitative bound."""

from .construction import SearchConfig, assemble_families, gen_dense_family
from .criterion import build_product_vector, build_vector, make_rolewicz, block_shift_instance, refine_schedule
from .shift import Lifted, ShiftOperator
from .space import SUP, InnerVec, OuterVec, outer_norm
from .weights import BlockWeights, Params, build_schedule, m_bound

__version__ = "0.1.0"

__all__ = [
    "SUP",
    "InnerVec",
    "OuterVec",
    "outer_norm",
    "Params",
    "BlockWeights",
    "build_schedule",
    "m_bound",
    "ShiftOperator",
    "Lifted",
    "SearchConfig",
    "gen_dense_family",
    "assemble_families",
    "build_vector",
    "refine_schedule",
    "make_rolewicz",
    "block_shift_instance",
    "build_product_vector",
]
