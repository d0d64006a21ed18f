"""IDX file reading and writing.

Layout (all sizes big-endian):

    u32 magic      0x00000803 for u8 images with dims [N, 28, 28]
                   0x00000801 for u8 labels with dims [N]
    u32 * ndim     dimension sizes
    u8  * prod     payload, row-major

``load_idx`` is the public entry point: images come back as float32 in
[0, 1] (divided by 255), labels as int64. The raw u8 readers/writers are
used by fixtures and the synthetic-corpus cache.
"""

import struct

import numpy as np

from ..errors import CorruptFile, UnsupportedFormat

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def read_idx_raw(path) -> np.ndarray:
    """Read an IDX file into a u8 array ((N, H, W) images or (N,) labels)."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 4:
        raise UnsupportedFormat(f"{path}: too short to hold an IDX magic")
    (magic,) = struct.unpack(">I", data[:4])
    if magic == IMAGE_MAGIC:
        ndim = 3
    elif magic == LABEL_MAGIC:
        ndim = 1
    else:
        raise UnsupportedFormat(f"{path}: unknown IDX magic 0x{magic:08x}")
    header_end = 4 + 4 * ndim
    if len(data) < header_end:
        raise CorruptFile(f"{path}: truncated IDX header")
    dims = struct.unpack(f">{ndim}I", data[4:header_end])
    expected = int(np.prod(dims))
    payload = data[header_end:]
    if len(payload) < expected:
        raise CorruptFile(
            f"{path}: payload holds {len(payload)} bytes, dims {dims} need {expected}"
        )
    arr = np.frombuffer(payload[:expected], dtype=np.uint8).reshape(dims)
    return arr.copy()


def load_idx(path) -> np.ndarray:
    """Load an IDX file: images as float32 in [0, 1], labels as int64.

    Raises UnsupportedFormat for unknown magics and CorruptFile when the
    payload is shorter than the declared dimensions.
    """
    arr = read_idx_raw(path)
    if arr.ndim == 3:
        return arr.astype(np.float32) / 255.0
    labels = arr.astype(np.int64)
    if len(labels) and labels.max() >= 10:
        raise CorruptFile(f"{path}: label values exceed 9")
    return labels


def write_idx(path, arr: np.ndarray) -> None:
    """Write a u8 array as an IDX file ((N, H, W) -> images, (N,) -> labels)."""
    arr = np.asarray(arr)
    if arr.dtype != np.uint8:
        raise ValueError("IDX writer takes uint8 arrays")
    if arr.ndim == 3:
        magic = IMAGE_MAGIC
    elif arr.ndim == 1:
        magic = LABEL_MAGIC
    else:
        raise ValueError(f"cannot encode a {arr.ndim}-D array as IDX")
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        f.write(struct.pack(f">{arr.ndim}I", *arr.shape))
        f.write(np.ascontiguousarray(arr).tobytes())
