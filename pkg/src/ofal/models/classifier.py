"""Dropout-equipped CNN classifier with deterministic and stochastic modes.

Architecture: conv3x3 -> conv3x3 -> maxpool2 -> dropout -> flatten ->
dense -> dropout -> dense(softmax), ReLU elsewhere. The two dropout sites
are driven by explicit masks so a stochastic forward pass is a pure
function of (parameters, batch, mask_seed): one mask set per seed, shared
across the batch, i.e. each seed realizes one network.
"""

import math

import numpy as np
import torch
import torch.nn.functional as F
from sklearn.base import BaseEstimator, ClassifierMixin
from torch import nn

from ..errors import EmptyTestSet, EmptyTrainingSet, InvalidDropoutRate, ShapeError
from ..seeding import derive_seed
from ..validation import check_image_batch, check_labels
from ._torch import (
    draw_masks,
    generator_for,
    load_state_from_arrays,
    seeded_init_,
    state_to_arrays,
    to_tensor,
    torch_dtype,
)

_POOLED_SIDE = 12  # 28 -> conv3 -> 26 -> conv3 -> 24 -> maxpool2 -> 12


class _CnnNet(nn.Module):
    def __init__(self, conv_channels, dense_width, n_classes):
        super().__init__()
        c1, c2 = conv_channels
        self.conv1 = nn.Conv2d(1, c1, 3)
        self.conv2 = nn.Conv2d(c1, c2, 3)
        self.fc1 = nn.Linear(c2 * _POOLED_SIDE * _POOLED_SIDE, dense_width)
        self.fc2 = nn.Linear(dense_width, n_classes)

    def forward(self, x, masks=None):
        h = F.relu(self.conv1(x))
        h = F.relu(self.conv2(h))
        h = F.max_pool2d(h, 2)
        if masks is not None:
            h = h * masks[0]
        h = torch.flatten(h, 1)
        h = F.relu(self.fc1(h))
        if masks is not None:
            h = h * masks[1]
        return self.fc2(h)


class DropoutCnnClassifier(BaseEstimator, ClassifierMixin):
    """Small CNN for 28x28 grayscale images with MC-dropout support.

    Parameters mirror the training setup: `epochs`/`batch_size`/
    `learning_rate` drive `fit`, `warm_start=True` continues from the
    current weights, and `seed` pins initialization, batch order, and
    training-time dropout. `optimizer` is "adam" or "sgd".
    """

    def __init__(
        self,
        conv_channels=(32, 64),
        dense_width=128,
        dropout_rates=(0.25, 0.5),
        n_classes=10,
        epochs=300,
        batch_size=64,
        learning_rate=1e-3,
        optimizer="adam",
        warm_start=False,
        seed=0,
        dtype="float32",
    ):
        self.conv_channels = conv_channels
        self.dense_width = dense_width
        self.dropout_rates = dropout_rates
        self.n_classes = n_classes
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.warm_start = warm_start
        self.seed = seed
        self.dtype = dtype

    # -- construction ------------------------------------------------------

    def initialize(self) -> "DropoutCnnClassifier":
        """Build (or rebuild) the network with seeded initial weights."""
        net = _CnnNet(tuple(self.conv_channels), self.dense_width, self.n_classes)
        net = net.to(torch_dtype(self.dtype))
        seeded_init_(net, generator_for(derive_seed(self.seed, "clf-init")))
        net.eval()
        self.net_ = net
        self.classes_ = np.arange(self.n_classes)
        self.loss_history_ = []
        return self

    def _ensure_net(self):
        if not hasattr(self, "net_"):
            raise RuntimeError("classifier is not fitted; call fit() or initialize()")
        return self.net_

    @property
    def _torch_dtype(self):
        return torch_dtype(self.dtype)

    def _mask_shapes(self, batch: int):
        c2 = self.conv_channels[1]
        return [
            (batch, c2, _POOLED_SIDE, _POOLED_SIDE),
            (batch, self.dense_width),
        ]

    def draw_mask_set(self, mask_seed: int, batch: int = 1):
        """One dropout realization (inverted-dropout scaled), seeded."""
        for p in self.dropout_rates:
            if not 0.0 < p < 1.0:
                raise InvalidDropoutRate(f"dropout rate {p} outside (0, 1)")
        return draw_masks(
            self._mask_shapes(batch),
            self.dropout_rates,
            generator_for(mask_seed),
            self._torch_dtype,
        )

    # -- training ----------------------------------------------------------

    def fit(self, X, y):
        X = check_image_batch(X)
        y = check_labels(y, len(X), self.n_classes)
        if len(X) == 0:
            raise EmptyTrainingSet("cannot fit on an empty labeled set")
        if not (self.warm_start and hasattr(self, "net_")):
            self.initialize()
        net = self.net_
        self.loss_history_ = []
        if self.epochs == 0:
            return self

        gen = generator_for(derive_seed(self.seed, "clf-fit"))
        xt = to_tensor(X, self._torch_dtype).unsqueeze(1)
        yt = torch.as_tensor(y)
        if self.optimizer == "adam":
            opt = torch.optim.Adam(net.parameters(), lr=self.learning_rate)
        elif self.optimizer == "sgd":
            opt = torch.optim.SGD(net.parameters(), lr=self.learning_rate)
        else:
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")

        n = len(X)
        net.train()
        for _ in range(self.epochs):
            perm = torch.randperm(n, generator=gen)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = perm[start : start + self.batch_size]
                xb, yb = xt[idx], yt[idx]
                masks = draw_masks(
                    self._mask_shapes(len(idx)),
                    self.dropout_rates,
                    gen,
                    self._torch_dtype,
                )
                opt.zero_grad()
                loss = F.cross_entropy(net(xb, masks), yb)
                loss.backward()
                opt.step()
                total += loss.item() * len(idx)
            self.loss_history_.append(total / n)
        net.eval()
        return self

    # -- inference ---------------------------------------------------------

    def _batched_probs(self, X, masks=None, batch: int = 512) -> np.ndarray:
        net = self._ensure_net()
        xt = to_tensor(X, self._torch_dtype).unsqueeze(1)
        out = []
        with torch.no_grad():
            for start in range(0, len(xt), batch):
                logits = net(xt[start : start + batch], masks)
                out.append(F.softmax(logits, dim=1).cpu().numpy())
        return np.concatenate(out) if out else np.zeros((0, self.n_classes))

    def predict_proba(self, X) -> np.ndarray:
        """Deterministic class probabilities (dropout off)."""
        X = check_image_batch(X)
        if len(X) == 0:
            raise ShapeError("predict_proba needs a non-empty batch")
        return self._batched_probs(X, masks=None)

    def predict_proba_stochastic(self, X, mask_seed: int) -> np.ndarray:
        """One MC-dropout realization: masks drawn solely from mask_seed."""
        X = check_image_batch(X)
        if len(X) == 0:
            raise ShapeError("predict_proba_stochastic needs a non-empty batch")
        masks = self.draw_mask_set(mask_seed, batch=1)
        return self._batched_probs(X, masks=masks)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def score(self, X, y) -> float:
        """Accuracy of the deterministic prediction."""
        X = check_image_batch(X)
        y = check_labels(y, len(X), self.n_classes)
        if len(X) == 0:
            raise EmptyTestSet("cannot evaluate on an empty test set")
        return float(np.mean(self.predict(X) == y))

    # -- differentiable access for the ascent step --------------------------

    def probs_tensor(self, x: torch.Tensor, masks=None) -> torch.Tensor:
        """Softmax probabilities with gradient flow to ``x``.

        ``x`` is (B, 28, 28) or (B, 1, 28, 28); masks as from
        ``draw_mask_set`` (batch dim 1 broadcasts).
        """
        net = self._ensure_net()
        if x.dim() == 3:
            x = x.unsqueeze(1)
        return F.softmax(net(x, masks), dim=1)

    # -- persistence ---------------------------------------------------------

    def state_arrays(self, prefix: str = "clf/") -> dict:
        return state_to_arrays(self._ensure_net(), prefix)

    def load_state_arrays(self, arrays: dict, prefix: str = "clf/") -> None:
        if not hasattr(self, "net_"):
            self.initialize()
        load_state_from_arrays(self.net_, arrays, prefix)

    def parameter_vector(self) -> np.ndarray:
        """Flat copy of all parameters (for identity checks)."""
        net = self._ensure_net()
        return np.concatenate(
            [p.detach().cpu().numpy().ravel() for p in net.parameters()]
        )
