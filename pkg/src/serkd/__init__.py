"""Relational knowledge distillation on superpixel tokens."""

from .tensor import Tensor, backward, detach, no_grad

__version__ = "0.1.0"

__all__ = ["Tensor", "backward", "detach", "no_grad", "__version__"]
