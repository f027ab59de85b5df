"""Property-testing lab for bounded-degree digraphs: hard instances, the
sequence-to-graph reduction, and reference testers in both query models."""

__version__ = "0.1.0"

from .digraph import BoundedDigraph, build_digraph
from .embed import count_subgraph_copies, disjoint_copy_lower_bound
from .occurrence import (
    FrequencyDistribution,
    IntSequence,
    frequency_distribution,
    histogram,
    make_p,
    make_q,
)
from .oracle import OracleSession, QueryModel
from .patterns import PatternDecomposition, decompose_pattern, pad_and_index, prepare_pattern
from .reduction import ReductionOracle, SequenceAccess, build_offline

__all__ = [
    "BoundedDigraph",
    "build_digraph",
    "count_subgraph_copies",
    "disjoint_copy_lower_bound",
    "FrequencyDistribution",
    "IntSequence",
    "frequency_distribution",
    "histogram",
    "make_p",
    "make_q",
    "OracleSession",
    "QueryModel",
    "PatternDecomposition",
    "decompose_pattern",
    "pad_and_index",
    "prepare_pattern",
    "ReductionOracle",
    "SequenceAccess",
    "build_offline",
]
