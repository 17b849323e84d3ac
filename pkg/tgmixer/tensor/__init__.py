"""Dense numerical kernels, parameters, Adam and gradient checking."""

from .adam import Adam, AdamState
from .checkpoint import checkpoint_paths, load_checkpoint, load_into, save_checkpoint
from .gradcheck import GradCheckReport, finite_difference_check
from .layers import LayerNorm, Linear
from .params import ParamGroup, ParamTensor, assign_flat, flatten_params

__all__ = [
    "Adam",
    "AdamState",
    "GradCheckReport",
    "LayerNorm",
    "Linear",
    "ParamGroup",
    "ParamTensor",
    "assign_flat",
    "checkpoint_paths",
    "finite_difference_check",
    "flatten_params",
    "load_checkpoint",
    "load_into",
    "save_checkpoint",
]
