"""Dense variational autoencoder over 28x28 images.

Encoder: flatten -> dense -> dense(2d) producing (mu, log sigma^2).
Decoder: three dense layers ending in a sigmoid reconstruction, so decoded
pixels always land in [0, 1] and gradients flow from pixels back to the
latent point.

`transform` returns the posterior mean (no sampling), which keeps encoding
deterministic; the reparameterized draw is used only inside `fit`.
"""

import numpy as np
import torch
import torch.nn.functional as F
from sklearn.base import BaseEstimator, TransformerMixin
from torch import nn

from ..errors import EmptyTrainingSet, ShapeError
from ..seeding import derive_seed
from ..validation import check_image_batch, check_latent_batch
from ._torch import (
    generator_for,
    load_state_from_arrays,
    seeded_init_,
    state_to_arrays,
    to_tensor,
    torch_dtype,
)

_PIXELS = 28 * 28


class _VaeNet(nn.Module):
    def __init__(self, latent_dim, encoder_width, decoder_widths):
        super().__init__()
        w1, w2 = decoder_widths
        self.enc1 = nn.Linear(_PIXELS, encoder_width)
        self.enc2 = nn.Linear(encoder_width, 2 * latent_dim)
        self.dec1 = nn.Linear(latent_dim, w1)
        self.dec2 = nn.Linear(w1, w2)
        self.dec3 = nn.Linear(w2, _PIXELS)
        self.latent_dim = latent_dim

    def encode(self, x_flat):
        h = F.relu(self.enc1(x_flat))
        out = self.enc2(h)
        return out[:, : self.latent_dim], out[:, self.latent_dim :]

    def decode(self, z):
        h = F.relu(self.dec1(z))
        h = F.relu(self.dec2(h))
        return torch.sigmoid(self.dec3(h))


class DenseVae(BaseEstimator, TransformerMixin):
    """VAE with `transform` = posterior mean and `inverse_transform` = decode."""

    def __init__(
        self,
        latent_dim=10,
        encoder_width=512,
        decoder_widths=(256, 512),
        epochs=30,
        batch_size=256,
        learning_rate=1e-3,
        seed=0,
        dtype="float32",
    ):
        self.latent_dim = latent_dim
        self.encoder_width = encoder_width
        self.decoder_widths = decoder_widths
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.dtype = dtype

    def initialize(self) -> "DenseVae":
        net = _VaeNet(self.latent_dim, self.encoder_width, tuple(self.decoder_widths))
        net = net.to(torch_dtype(self.dtype))
        seeded_init_(net, generator_for(derive_seed(self.seed, "vae-init")))
        net.eval()
        self.net_ = net
        self.loss_history_ = []
        return self

    def _ensure_net(self):
        if not hasattr(self, "net_"):
            raise RuntimeError("VAE is not fitted; call fit() or initialize()")
        return self.net_

    @property
    def _torch_dtype(self):
        return torch_dtype(self.dtype)

    def fit(self, X, y=None):
        """Minimize reconstruction BCE + KL(q(z|x) || N(0, I))."""
        X = check_image_batch(X)
        if len(X) == 0:
            raise EmptyTrainingSet("cannot fit VAE on an empty set")
        if not hasattr(self, "net_"):
            self.initialize()
        net = self.net_
        self.loss_history_ = []
        if self.epochs == 0:
            return self

        gen = generator_for(derive_seed(self.seed, "vae-fit"))
        xt = to_tensor(X, self._torch_dtype).reshape(len(X), _PIXELS)
        opt = torch.optim.Adam(net.parameters(), lr=self.learning_rate)
        n = len(X)
        net.train()
        for _ in range(self.epochs):
            perm = torch.randperm(n, generator=gen)
            total = 0.0
            for start in range(0, n, self.batch_size):
                xb = xt[perm[start : start + self.batch_size]]
                mu, logvar = net.encode(xb)
                eps = torch.randn(mu.shape, generator=gen, dtype=mu.dtype)
                z = mu + torch.exp(0.5 * logvar) * eps
                recon = net.decode(z)
                bce = F.binary_cross_entropy(recon, xb, reduction="none").sum(dim=1)
                kl = 0.5 * (mu.pow(2) + logvar.exp() - 1.0 - logvar).sum(dim=1)
                loss = (bce + kl).mean()
                opt.zero_grad()
                loss.backward()
                opt.step()
                total += loss.item() * len(xb)
            self.loss_history_.append(total / n)
        net.eval()
        return self

    def transform(self, X) -> np.ndarray:
        """Posterior means mu(x), shape (N, latent_dim)."""
        X = check_image_batch(X)
        net = self._ensure_net()
        xt = to_tensor(X, self._torch_dtype).reshape(len(X), _PIXELS)
        with torch.no_grad():
            mu, _ = net.encode(xt)
        return mu.cpu().numpy()

    def encode_full(self, X) -> tuple[np.ndarray, np.ndarray]:
        """(mu, logvar) pairs; encoder output dimension is 2 * latent_dim."""
        X = check_image_batch(X)
        net = self._ensure_net()
        xt = to_tensor(X, self._torch_dtype).reshape(len(X), _PIXELS)
        with torch.no_grad():
            mu, logvar = net.encode(xt)
        return mu.cpu().numpy(), logvar.cpu().numpy()

    def inverse_transform(self, Z) -> np.ndarray:
        """Decode latent points to (N, 28, 28) images in [0, 1]."""
        Z = check_latent_batch(Z, self.latent_dim)
        net = self._ensure_net()
        zt = to_tensor(Z, self._torch_dtype)
        with torch.no_grad():
            out = net.decode(zt)
        return out.reshape(len(Z), 28, 28).cpu().numpy()

    def decode_tensor(self, z: torch.Tensor) -> torch.Tensor:
        """Differentiable decode; z is (B, d) or (d,), returns (B, 28, 28)."""
        net = self._ensure_net()
        if z.dim() == 1:
            z = z.unsqueeze(0)
        if z.shape[-1] != self.latent_dim:
            raise ShapeError(
                f"latent point has dimension {z.shape[-1]}, expected {self.latent_dim}"
            )
        return net.decode(z).reshape(-1, 28, 28)

    def reconstruction_error(self, X) -> float:
        """Mean absolute per-pixel error of decode(transform(X))."""
        X = check_image_batch(X)
        recon = self.inverse_transform(self.transform(X))
        return float(np.mean(np.abs(recon - X)))

    def state_arrays(self, prefix: str = "vae/") -> dict:
        return state_to_arrays(self._ensure_net(), prefix)

    def load_state_arrays(self, arrays: dict, prefix: str = "vae/") -> None:
        if not hasattr(self, "net_"):
            self.initialize()
        load_state_from_arrays(self.net_, arrays, prefix)

    def parameter_vector(self) -> np.ndarray:
        net = self._ensure_net()
        return np.concatenate(
            [p.detach().cpu().numpy().ravel() for p in net.parameters()]
        )
