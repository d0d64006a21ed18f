"""Shared torch helpers: explicit-generator init and dropout masks.

All randomness flows through ``torch.Generator`` objects seeded by the
caller, so nothing in the models depends on torch's global RNG state.
"""

import numpy as np
import torch
from torch import nn

_DTYPES = {"float32": torch.float32, "float64": torch.float64}


def torch_dtype(name: str) -> torch.dtype:
    try:
        return _DTYPES[name]
    except KeyError:
        raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {name!r}") from None


def generator_for(seed: int) -> torch.Generator:
    g = torch.Generator()
    g.manual_seed(int(seed))
    return g


def seeded_init_(module: nn.Module, generator: torch.Generator) -> None:
    """Re-initialize conv/linear weights like torch's default, but seeded.

    Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    """
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.Linear)):
            fan_in = m.weight.shape[1:].numel() if m.weight.dim() > 1 else 1
            bound = 1.0 / float(np.sqrt(fan_in))
            with torch.no_grad():
                m.weight.uniform_(-bound, bound, generator=generator)
                if m.bias is not None:
                    m.bias.uniform_(-bound, bound, generator=generator)


def draw_masks(shapes, rates, generator, dtype) -> list[torch.Tensor]:
    """Inverted-dropout masks: Bernoulli(keep)/keep per element."""
    masks = []
    for shape, p in zip(shapes, rates):
        keep = 1.0 - float(p)
        m = (torch.rand(shape, generator=generator) < keep).to(dtype) / keep
        masks.append(m)
    return masks


def to_tensor(arr, dtype) -> torch.Tensor:
    return torch.as_tensor(np.ascontiguousarray(arr)).to(dtype)


def state_to_arrays(module: nn.Module, prefix: str = "") -> dict:
    return {
        prefix + k: v.detach().cpu().numpy().copy()
        for k, v in module.state_dict().items()
    }


def load_state_from_arrays(module: nn.Module, arrays: dict, prefix: str = "") -> None:
    state = {
        k[len(prefix):]: torch.from_numpy(np.ascontiguousarray(v))
        for k, v in arrays.items()
        if k.startswith(prefix)
    }
    target_dtype = next(module.parameters()).dtype
    state = {k: v.to(target_dtype) for k, v in state.items()}
    module.load_state_dict(state)
