"""Input validation helpers used across estimators and operations."""

import numpy as np

from .errors import ShapeError

IMAGE_SIDE = 28
N_CLASSES = 10


def check_image_batch(X, name: str = "X") -> np.ndarray:
    """Coerce to a float (N, 28, 28) batch; a single (28, 28) image is lifted."""
    X = np.asarray(X)
    if X.ndim == 2:
        X = X[None, :, :]
    if X.ndim != 3 or X.shape[1:] != (IMAGE_SIDE, IMAGE_SIDE):
        raise ShapeError(
            f"{name} must be (N, {IMAGE_SIDE}, {IMAGE_SIDE}), got {X.shape}"
        )
    return np.ascontiguousarray(X, dtype=np.float64 if X.dtype == np.float64 else np.float32)


def check_labels(y, n: int | None = None, n_classes: int = N_CLASSES) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeError(f"labels must be 1-D, got shape {y.shape}")
    if n is not None and len(y) != n:
        raise ShapeError(f"got {len(y)} labels for {n} samples")
    y = y.astype(np.int64)
    if len(y) and (y.min() < 0 or y.max() >= n_classes):
        raise ShapeError(f"labels must lie in [0, {n_classes})")
    return y


def check_latent_batch(Z, latent_dim: int, name: str = "Z") -> np.ndarray:
    """Coerce to a float (N, d) batch; a single d-vector is lifted."""
    Z = np.asarray(Z)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.ndim != 2 or Z.shape[1] != latent_dim:
        raise ShapeError(f"{name} must be (N, {latent_dim}), got {Z.shape}")
    return np.ascontiguousarray(Z, dtype=np.float64 if Z.dtype == np.float64 else np.float32)


def check_row_stochastic(P, name: str = "probs", tol: float = 1e-6) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix, got shape {P.shape}")
    if P.shape[0] < 1:
        raise ShapeError(f"{name} needs at least one row")
    if np.any(P < -tol):
        raise ShapeError(f"{name} has negative entries")
    sums = P.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise ShapeError(f"{name} rows must sum to 1 within {tol}")
    return P
