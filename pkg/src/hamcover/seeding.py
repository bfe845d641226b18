"""Deterministic derivation of child seeds from a master seed and labels."""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *labels: object) -> int:
    text = ":".join([str(int(master))] + [str(x) for x in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little") >> 1
