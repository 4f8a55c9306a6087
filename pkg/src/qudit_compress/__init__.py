"""Compile qubit circuits onto qudit registers by graph partitioning and gate merging."""

from .circuit import Circuit, Gate, WireSpec, circuit_stats, parse_circuit, serialize_circuit
from .compressor import (
    Encoding,
    PipelineOptions,
    compress,
    compression_bounds,
    embed_two_qubit_gate,
    full_pipeline,
    make_encoding,
    merge_pass,
)
from .graph import WeightedGraph, build_interaction_graph, contract_graph
from .partition import Partition, enumerate_balanced_partitions, min_cut_exact, min_cut_heuristic

__all__ = [
    "Circuit", "Gate", "WireSpec", "circuit_stats", "parse_circuit", "serialize_circuit",
    "Encoding", "PipelineOptions", "compress", "compression_bounds", "embed_two_qubit_gate",
    "full_pipeline", "make_encoding", "merge_pass",
    "WeightedGraph", "build_interaction_graph", "contract_graph",
    "Partition", "enumerate_balanced_partitions", "min_cut_exact", "min_cut_heuristic",
]
