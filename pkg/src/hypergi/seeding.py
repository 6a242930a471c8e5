import hashlib


def derive_seed(master: int, label: str) -> int:
    """Independent 64-bit stream seed for a named stage of a run seeded with ``master``."""
    digest = hashlib.sha256(f"{master}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
