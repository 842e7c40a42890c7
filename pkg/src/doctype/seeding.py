"""Deterministic derivation of per-stage sub-seeds from one global seed."""

from __future__ import annotations

import hashlib


def derive_seed(base: int, label: str) -> int:
    """Map (base seed, stage label) to a stable 63-bit sub-seed."""
    digest = hashlib.sha256(f"{base}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
