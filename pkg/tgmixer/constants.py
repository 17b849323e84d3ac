"""Shared constants for tgmixer."""

import os

__all__ = [
    "CONFIG_FILE",
    "DEFAULT_ALPHA",
    "DEFAULT_BATCH_SIZE",
    "DEFAULT_D_HIDDEN",
    "DEFAULT_D_TIME",
    "DEFAULT_K",
    "DEFAULT_LR",
    "DEFAULT_WEIGHT_DECAY",
    "DEFAULT_WINDOW_EVENTS",
    "LAYER_NORM_EPS",
    "ADAM_EPS",
    "MAX_NEGATIVE_RETRIES",
    "MIN_SPLIT_EVENTS",
    "MICRO_BATCH",
    "RANK_NEGATIVES",
    "RECALL_K",
    "SLOW_TESTS",
    "THREADS",
]

CONFIG_FILE = "tgmixer.conf"

# Time encoding: d=100, alpha = beta = sqrt(d)
DEFAULT_D_TIME = 100
DEFAULT_ALPHA = 10.0

DEFAULT_D_HIDDEN = 100
DEFAULT_K = 20

# Optimization
DEFAULT_LR = 1e-4
DEFAULT_WEIGHT_DECAY = 1e-6
DEFAULT_BATCH_SIZE = 600
LAYER_NORM_EPS = 1e-5
ADAM_EPS = 1e-8

# Node-encoder window = time gap covered by the last N training events
DEFAULT_WINDOW_EVENTS = 2000

# Splits
MIN_SPLIT_EVENTS = 10

# Sampling
MAX_NEGATIVE_RETRIES = 100
RANK_NEGATIVES = 100
RECALL_K = 5

# Pairs per forward/backward chunk; bounds activation memory, not the optimizer batch
MICRO_BATCH = 100

THREADS = int(os.environ.get("TGMIXER_THREADS") or os.cpu_count() or 1)

SLOW_TESTS = bool(os.environ.get("TGMIXER_SLOW"))
