"""Simulator and exact toolkit for the semi-random uniform hypergraph process."""
from .hypergraph import MultiHypergraph, ParameterError, TargetSpec, build_target, contains_copy, delta_d

__all__ = ["MultiHypergraph", "ParameterError", "TargetSpec", "build_target", "contains_copy", "delta_d"]
__version__ = "0.1.0"
