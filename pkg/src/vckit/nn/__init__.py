"""Hand-rolled differentiable building blocks on numpy."""

from .functional import (
    IN_EPS,
    adain,
    adain_backward,
    gelu,
    gelu_backward,
    instance_norm,
    instance_norm_backward,
    softmax,
    softmax_backward,
)
from .gradcheck import grad_check
from .layers import (
    Conv1d,
    ConvertorBlock,
    InstanceNorm,
    Linear,
    MultiHeadSelfAttention,
    ResBlock,
)
from .param import Module, Param

__all__ = [
    "IN_EPS",
    "adain",
    "adain_backward",
    "gelu",
    "gelu_backward",
    "instance_norm",
    "instance_norm_backward",
    "softmax",
    "softmax_backward",
    "grad_check",
    "Conv1d",
    "ConvertorBlock",
    "InstanceNorm",
    "Linear",
    "MultiHeadSelfAttention",
    "ResBlock",
    "Module",
    "Param",
]
