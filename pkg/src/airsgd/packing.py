"""Packing of real gradient vectors into complex symbol blocks.

A length-d real vector is zero-padded to length 2*s*N, with N = ceil(d / 2s),
and folded into N complex blocks of dimension s. Within each consecutive
2s-chunk, the first s entries become the real parts and the second s entries
the imaginary parts of one block:

    block[n][i] = g[2*n*s + i] + 1j * g[(2*n + 1)*s + i]   (0-indexed)

The map is linear and energy preserving: the summed squared magnitudes of the
blocks equal the squared Euclidean norm of the padded vector.
"""

import numpy as np

__all__ = ["block_count", "pack", "unpack"]


def block_count(d: int, s: int) -> int:
    """Number of complex symbols needed to carry a length-d real vector."""
    if s < 1:
        raise ValueError(f"subchannel count s must be >= 1, got {s}")
    if d < 1:
        raise ValueError(f"vector length d must be >= 1, got {d}")
    return -(-d // (2 * s))


def pack(gradient, s: int) -> np.ndarray:
    """Fold a real vector into an (N, s) complex128 array of symbol blocks.

    Entries beyond the vector length read as zero padding. Rejects
    non-finite input since those values would silently corrupt every
    downstream channel statistic.
    """
    g = np.asarray(gradient, dtype=np.float64)
    if g.ndim != 1:
        raise ValueError(f"gradient must be 1-d, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("gradient contains non-finite entries")
    n_blocks = block_count(g.shape[0], s)
    padded = np.zeros(2 * s * n_blocks, dtype=np.float64)
    padded[: g.shape[0]] = g
    folded = padded.reshape(n_blocks, 2, s)
    return folded[:, 0, :] + 1j * folded[:, 1, :]


def unpack(blocks, d: int) -> np.ndarray:
    """Invert :func:`pack`, recovering the first d real entries.

    ``blocks`` is an (N, s) complex array (or an equal-length sequence of
     1-d complex vectors) with N = ceil(d / 2s); padding positions beyond d
    are discarded. Exact inverse: no arithmetic is performed on the values.
    """
    try:
        b = np.asarray(blocks, dtype=np.complex128)
    except ValueError as exc:
        raise ValueError(f"blocks must form a rectangular array: {exc}") from None
    if b.ndim != 2 or b.shape[0] == 0 or b.shape[1] == 0:
        raise ValueError(f"blocks must be a nonempty (N, s) array, got shape {b.shape}")
    if d < 1:
        raise ValueError(f"vector length d must be >= 1, got {d}")
    n_blocks, s = b.shape
    if n_blocks != block_count(d, s):
        raise ValueError(
            f"expected {block_count(d, s)} blocks of length {s} for d={d}, got {n_blocks}"
        )
    flat = np.empty((n_blocks, 2, s), dtype=np.float64)
    flat[:, 0, :] = b.real
    flat[:, 1, :] = b.imag
    return flat.reshape(-1)[:d].copy()
