"""Deterministic seed derivation.

Every random stream in the package is seeded through ``derive_seed``, so a
single master seed plus a purpose tag (and optional indices) pins down the
whole experiment. The derivation hashes the tag tuple with SHA-256, which is
stable across runs, platforms, and Python versions (unlike ``hash()``).
"""

import hashlib

_SEED_MASK = (1 << 63) - 1


def derive_seed(master_seed: int, *tags) -> int:
    """Derive a 63-bit child seed from a master seed and a tag tuple.

    Tags may be ints or strings; they are encoded unambiguously so that
    ("a", 1) and ("a1",) cannot collide.
    """
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for tag in tags:
        h.update(b"\x1f")
        h.update(f"{type(tag).__name__}:{tag}".encode())
    return int.from_bytes(h.digest()[:8], "big") & _SEED_MASK
