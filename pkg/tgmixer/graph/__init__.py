"""Temporal event store: ingestion, splits, indexing and neighbor queries."""

from .events import EventLog, EventRecord, load_events, write_events_csv
from .features import NodeFeatureMode, NodeFeatures, load_node_features
from .index import Neighbor, NeighborList, TemporalGraph, build_index
from .splits import SplitBoundaries, chronological_split, compute_default_window
from .stats import DatasetStats, dataset_statistics
from .synthetic import generate_periodic_dataset

__all__ = [
    "DatasetStats",
    "EventLog",
    "EventRecord",
    "Neighbor",
    "NeighborList",
    "NodeFeatureMode",
    "NodeFeatures",
    "SplitBoundaries",
    "TemporalGraph",
    "build_index",
    "chronological_split",
    "compute_default_window",
    "dataset_statistics",
    "generate_periodic_dataset",
    "load_events",
    "load_node_features",
    "write_events_csv",
]
