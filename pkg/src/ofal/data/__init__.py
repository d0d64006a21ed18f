"""Dataset ingestion, splits, pool bookkeeping, and state persistence."""

import gzip
import shutil
import tempfile
from pathlib import Path

from .checkpoint import CHECKPOINT_VERSION, load_container, save_container
from .idx import IMAGE_MAGIC, LABEL_MAGIC, load_idx, read_idx_raw, write_idx
from .pools import (
    GENERATED_ID_BASE,
    LabeledSet,
    SimulatedOracle,
    SplitSpec,
    UnlabeledPool,
    make_split,
)
from .synthetic import ensure_corpus_dir, make_corpus, render_digit

_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


def _resolve(data_dir: Path, name: str) -> Path:
    plain = data_dir / name
    if plain.exists():
        return plain
    gz = data_dir / (name + ".gz")
    if gz.exists():
        # Decompress once next to the archive so repeat loads are cheap.
        with gzip.open(gz, "rb") as src, tempfile.NamedTemporaryFile(
            dir=data_dir, delete=False
        ) as dst:
            shutil.copyfileobj(src, dst)
        Path(dst.name).replace(plain)
        return plain
    raise FileNotFoundError(f"{plain} (or .gz) not found")


def load_dataset_dir(data_dir):
    """Load the four standard IDX files from a directory.

    Returns (train_images, train_labels, test_images, test_labels) with
    images as float32 in [0, 1]. Gzipped files are accepted.
    """
    data_dir = Path(data_dir)
    out = {k: load_idx(_resolve(data_dir, v)) for k, v in _FILES.items()}
    return (
        out["train_images"],
        out["train_labels"],
        out["test_images"],
        out["test_labels"],
    )


__all__ = [
    "CHECKPOINT_VERSION",
    "GENERATED_ID_BASE",
    "IMAGE_MAGIC",
    "LABEL_MAGIC",
    "LabeledSet",
    "SimulatedOracle",
    "SplitSpec",
    "UnlabeledPool",
    "ensure_corpus_dir",
    "load_container",
    "load_dataset_dir",
    "load_idx",
    "make_corpus",
    "make_split",
    "read_idx_raw",
    "render_digit",
    "save_container",
    "write_idx",
]
