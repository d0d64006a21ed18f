"""The two trainable models: dropout CNN classifier and dense VAE."""

from .classifier import DropoutCnnClassifier
from .vae import DenseVae

__all__ = ["DropoutCnnClassifier", "DenseVae"]
