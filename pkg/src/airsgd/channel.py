"""Rayleigh fading multiple-access channel with additive receiver noise.

Channel gains and noise are i.i.d. circularly symmetric complex Gaussians:
a scalar with total variance v has real and imaginary parts each N(0, v/2).
Gains are independent across symbols, devices, antennas, and subchannels
(the only correlation model supported); noise likewise across symbols,
antennas, and subchannels.

Array conventions used throughout the package:

    channel gains h : (N, M, K, s) complex128   symbol, device, antenna, subchannel
    noise z         : (N, K, s)    complex128
    transmitted x   : (M, N, s)    complex128   one block row per symbol
    received y      : (N, K, s)    complex128
"""

import numpy as np

from . import rng

__all__ = ["sample_channel", "sample_noise", "propagate"]


def _complex_normal(gen: np.random.Generator, shape, variance: float) -> np.ndarray:
    parts = gen.standard_normal(shape + (2,))
    scale = np.sqrt(variance / 2.0)
    return scale * (parts[..., 0] + 1j * parts[..., 1])


def _check_dims(**dims):
    for name, value in dims.items():
        if value < 1:
            raise ValueError(f"dimension {name} must be >= 1, got {value}")


def sample_channel(rng_seed, N: int, M: int, K: int, s: int, sigma_h_sq: float) -> np.ndarray:
    """Draw an (N, M, K, s) tensor of fading gains, each CN(0, sigma_h_sq).

    Deterministic given the seed: the tensor is drawn in a single call with
    fixed axis order, so the value at every (n, m, k, i) is pinned.
    """
    _check_dims(N=N, M=M, K=K, s=s)
    if sigma_h_sq <= 0:
        raise ValueError(f"sigma_h_sq must be positive, got {sigma_h_sq}")
    gen = rng.generator(rng_seed)
    return _complex_normal(gen, (N, M, K, s), sigma_h_sq)


def sample_noise(rng_seed, N: int, K: int, s: int, sigma_z_sq: float) -> np.ndarray:
    """Draw an (N, K, s) tensor of receiver noise, each CN(0, sigma_z_sq).

    sigma_z_sq = 0 yields an exactly zero tensor (noiseless channel).
    """
    _check_dims(N=N, K=K, s=s)
    if sigma_z_sq < 0:
        raise ValueError(f"sigma_z_sq must be nonnegative, got {sigma_z_sq}")
    if sigma_z_sq == 0:
        return np.zeros((N, K, s), dtype=np.complex128)
    gen = rng.generator(rng_seed)
    return _complex_normal(gen, (N, K, s), sigma_z_sq)


def propagate(tx: np.ndarray, h: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Superpose the scaled device symbols through the fading MAC.

    y[n, k, i] = sum_m h[n, m, k, i] * tx[m, n, i] + z[n, k, i]

    ``tx`` holds the already power-scaled symbol blocks of every device.
    The channel acts entrywise per subchannel.
    """
    tx = np.asarray(tx, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if tx.ndim != 3 or h.ndim != 4 or z.ndim != 3:
        raise ValueError(
            f"expected tx (M,N,s), h (N,M,K,s), z (N,K,s); got {tx.shape}, {h.shape}, {z.shape}"
        )
    M, N, s = tx.shape
    if h.shape[0] != N or h.shape[1] != M or h.shape[3] != s:
        raise ValueError(f"channel shape {h.shape} inconsistent with tx shape {tx.shape}")
    if z.shape != (N, h.shape[2], s):
        raise ValueError(f"noise shape {z.shape} inconsistent with channel shape {h.shape}")
    return np.einsum("nmki,mni->nki", h, tx) + z
