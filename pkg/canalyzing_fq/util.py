import typing as T


__all__ = ["chunk_ranges", "hash64", "seeded_codes"]


_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def hash64(seed: int, index: int) -> int:
    """SplitMix64 output for draw `index` of the stream started at `seed`.

    The state after `index + 1` increments of the golden gamma is passed through
    the SplitMix64 finalizer, so any draw can be computed without the ones before.

    """
    z = (seed + (index + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def seeded_codes(seed: int, count: int, q: int, offset: int = 0) -> T.List[int]:
    """Return `count` element codes drawn as hash64(seed, t) mod q."""
    return [hash64(seed, offset + t) % q for t in range(count)]


def chunk_ranges(total: int, chunk_size: int) -> T.Iterator[T.Tuple[int, int]]:
    """Yield contiguous half-open (start, stop) ranges covering range(total)."""
    if chunk_size < 1:
        raise ValueError(f"Chunk size must be positive, not {chunk_size}.")
    for start in range(0, total, chunk_size):
        yield start, min(start + chunk_size, total)
