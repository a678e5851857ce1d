"""Decoherence functionals and collapse-model sampling on a periodic 1+1 null lattice."""
from .kernel import BACKEND
from .model import Model, build_model

__version__ = "0.1.0"
__all__ = ["BACKEND", "Model", "build_model"]
