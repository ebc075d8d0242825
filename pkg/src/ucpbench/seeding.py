"""Deterministic sub-seed derivation.

Every random stream in the package is keyed by ``(seed, tag, index)`` and
hashed with SHA-256, so results never depend on call order.
"""
import hashlib

import numpy as np


def derive_seed(seed: int, tag: str = "", index: int = 0) -> int:
    digest = hashlib.sha256(f"{int(seed)}|{tag}|{int(index)}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(seed: int, tag: str = "", index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, tag, index))
