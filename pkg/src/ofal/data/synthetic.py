"""Procedurally rendered 28x28 digit corpus.

Renders digits with the TTF fonts bundled with matplotlib (DejaVu, STIX,
Computer Modern families), then applies random affine distortions, stroke
intensity changes, blur, and pixel noise. The result is a self-contained
MNIST-shaped dataset for desk-scale runs and tests in environments where
the real files are not available. Written/read through the same IDX codec
as the real data.
"""

import functools
import os
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont
from scipy.ndimage import gaussian_filter, map_coordinates

from .idx import write_idx

_CANVAS = 84
_SIDE = 28

# Families with distinct digit shapes; symbol-only fonts are excluded.
_FONT_NAMES = (
    "DejaVuSans.ttf",
    "DejaVuSans-Bold.ttf",
    "DejaVuSans-Oblique.ttf",
    "DejaVuSans-BoldOblique.ttf",
    "DejaVuSansMono.ttf",
    "DejaVuSansMono-Bold.ttf",
    "DejaVuSansMono-Oblique.ttf",
    "DejaVuSerif.ttf",
    "DejaVuSerif-Bold.ttf",
    "DejaVuSerif-Italic.ttf",
    "STIXGeneral.ttf",
    "STIXGeneralBol.ttf",
    "STIXGeneralItalic.ttf",
    "cmr10.ttf",
    "cmb10.ttf",
    "cmss10.ttf",
    "cmtt10.ttf",
)


@functools.lru_cache(maxsize=1)
def _font_paths() -> tuple[str, ...]:
    import matplotlib

    ttf_dir = Path(matplotlib.get_data_path()) / "fonts" / "ttf"
    paths = [str(ttf_dir / name) for name in _FONT_NAMES if (ttf_dir / name).exists()]
    if not paths:
        raise RuntimeError(f"no usable fonts under {ttf_dir}")
    return tuple(paths)


@functools.lru_cache(maxsize=256)
def _font(path: str, size: int) -> ImageFont.FreeTypeFont:
    return ImageFont.truetype(path, size)


def _elastic(small: np.ndarray, rng: np.random.Generator, alpha: float, sigma: float) -> np.ndarray:
    """Classic elastic deformation: smoothed random displacement field."""
    dx = gaussian_filter(rng.uniform(-1, 1, small.shape), sigma) * alpha
    dy = gaussian_filter(rng.uniform(-1, 1, small.shape), sigma) * alpha
    yy, xx = np.meshgrid(np.arange(_SIDE), np.arange(_SIDE), indexing="ij")
    coords = np.stack([yy + dy, xx + dx])
    return map_coordinates(small, coords, order=1, mode="constant", cval=0.0)


def render_digit(label: int, rng: np.random.Generator, distortion: float = 1.0) -> np.ndarray:
    """Render one digit as a u8 (28, 28) image, white on black."""
    fonts = _font_paths()
    font = _font(fonts[rng.integers(len(fonts))], int(rng.integers(64, 90)))

    img = Image.new("L", (_CANVAS, _CANVAS), 0)
    draw = ImageDraw.Draw(img)
    # Center the glyph via its bounding box, then jitter.
    bbox = draw.textbbox((0, 0), str(label), font=font)
    w, h = bbox[2] - bbox[0], bbox[3] - bbox[1]
    jx, jy = rng.uniform(-4, 4, size=2) * distortion
    draw.text(
        ((_CANVAS - w) / 2 - bbox[0] + jx, (_CANVAS - h) / 2 - bbox[1] + jy),
        str(label),
        fill=255,
        font=font,
    )

    # Stroke-thickness variety before any geometry.
    r = rng.uniform()
    if r < 0.30 * distortion:
        img = img.filter(ImageFilter.MaxFilter(3))
    elif r < 0.55 * distortion:
        img = img.filter(ImageFilter.MinFilter(3))

    # Affine distortion about the canvas center: rotation, shear, scale.
    theta = np.deg2rad(rng.uniform(-22, 22) * distortion)
    shear = rng.uniform(-0.30, 0.30) * distortion
    sx = 1.0 / (1.0 + rng.uniform(-0.22, 0.18) * distortion)
    sy = 1.0 / (1.0 + rng.uniform(-0.22, 0.18) * distortion)
    c, s = np.cos(theta), np.sin(theta)
    # PIL wants the inverse map output->input; compose rot/shear/scale inverses.
    m = np.array([[c * sx, (s + shear * c) * sx], [-s * sy, (c - shear * s) * sy]])
    half = _CANVAS / 2
    offs = -m @ [half, half] + half
    img = img.transform(
        (_CANVAS, _CANVAS),
        Image.AFFINE,
        (m[0, 0], m[0, 1], offs[0], m[1, 0], m[1, 1], offs[1]),
        resample=Image.BILINEAR,
    )

    if rng.uniform() < 0.45 * distortion:
        img = img.filter(ImageFilter.GaussianBlur(radius=rng.uniform(0.4, 1.3)))

    small = np.asarray(img.resize((_SIDE, _SIDE), Image.BILINEAR), dtype=np.float32) / 255.0
    if rng.uniform() < 0.9 * distortion:
        small = _elastic(small, rng, alpha=rng.uniform(1.0, 4.5) * distortion, sigma=rng.uniform(2.5, 4.0))

    peak = small.max()
    if peak > 0:
        small *= rng.uniform(0.75, 1.0) / peak  # normalize stroke peak, then vary

    noise_sigma = rng.uniform(0.02, 0.14) * distortion
    small += rng.normal(0.0, noise_sigma, small.shape).astype(np.float32)
    return (np.clip(small, 0.0, 1.0) * 255).round().astype(np.uint8)


def make_corpus(n_train: int, n_test: int, seed: int, distortion: float = 1.0):
    """Balanced (train, test) corpus of rendered digits as u8 arrays."""
    rng = np.random.default_rng(seed)
    out = []
    for n in (n_train, n_test):
        if n % 10:
            raise ValueError("corpus sizes must be multiples of 10 for balance")
        labels = rng.permutation(np.repeat(np.arange(10), n // 10)).astype(np.uint8)
        images = np.stack([render_digit(int(y), rng, distortion) for y in labels])
        out.append((images, labels))
    return out[0], out[1]


def ensure_corpus_dir(
    data_dir, n_train: int = 12000, n_test: int = 2000, seed: int = 1234,
    distortion: float = 1.0,
) -> Path:
    """Write the corpus into ``data_dir`` as standard IDX files if absent."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    names = (
        "train-images-idx3-ubyte",
        "train-labels-idx1-ubyte",
        "t10k-images-idx3-ubyte",
        "t10k-labels-idx1-ubyte",
    )
    if all((data_dir / n).exists() for n in names):
        return data_dir
    (train_x, train_y), (test_x, test_y) = make_corpus(n_train, n_test, seed, distortion)
    for name, arr in zip(names, (train_x, train_y, test_x, test_y)):
        tmp = data_dir / (name + ".tmp")
        write_idx(tmp, arr)
        os.replace(tmp, data_dir / name)
    return data_dir
