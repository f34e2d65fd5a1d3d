"""Over-the-air aggregation: transmit scaling, matched-sum combining,
gradient-average estimation, and diagnostics.

Devices send x^n_m = alpha_t * g^n_m uncoded. The receiver, knowing all
gains, combines its K antennas per symbol n and subchannel i as

    y^n_i = (1/K) sum_k ( sum_m h^n_{m,k,i} )^* y^n_{k,i}

which splits algebraically into a signal part weighted by the per-device
effective gains (1/K) sum_k |h|^2, a zero-mean cross-device interference
part with variance M(M-1) sigma_h^4 / K per coefficient, and a combined
noise part. As K grows the effective gains concentrate at sigma_h^2
(channel hardening), so dividing the combined observation by
alpha_t * M * sigma_h^2 recovers the gradient average.
"""

from dataclasses import dataclass

import numpy as np

from .packing import block_count, pack, unpack

__all__ = [
    "PowerSchedule",
    "transmit",
    "transmit_energy",
    "combine",
    "estimate_average_gradient",
    "effective_signal_gains",
    "interference_statistic",
    "Decomposition",
    "decompose",
]


@dataclass(frozen=True)
class PowerSchedule:
    """Per-iteration amplitude scaling alpha_t of the transmitted gradients.

    kind "constant" keeps alpha_t = alpha0; "linear_ramp" grows it as
    alpha0 + slope * t, useful because gradient magnitudes shrink over
    training while the noise floor does not.
    """

    kind: str
    alpha0: float
    slope: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear_ramp"):
            raise ValueError(f"unknown power schedule kind {self.kind!r}")
        if self.alpha0 <= 0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")

    def alpha_at(self, t: int) -> float:
        """Scaling factor at iteration t (1-based)."""
        if self.kind == "constant":
            return self.alpha0
        return self.alpha0 + self.slope * t

    def validate_horizon(self, T: int) -> None:
        """Check alpha_t > 0 for every t in [1, T]."""
        worst = min(self.alpha_at(1), self.alpha_at(T))
        if worst <= 0:
            raise ValueError(f"power schedule is nonpositive within horizon T={T}")


def transmit(gradient, alpha_t: float, s: int) -> np.ndarray:
    """Scale and pack a gradient into its (N, s) transmit blocks."""
    if alpha_t <= 0:
        raise ValueError(f"alpha_t must be positive, got {alpha_t}")
    return alpha_t * pack(gradient, s)


def transmit_energy(blocks: np.ndarray) -> float:
    """Total symbol energy sum_n ||x^n||^2 of a block array."""
    b = np.asarray(blocks)
    return float(np.sum(b.real**2 + b.imag**2))


def combine(rx: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Matched-sum combining of the per-antenna received symbols.

    Weights each antenna by the conjugated sum of its device gains and
    averages over the K antennas, per symbol and subchannel.
    """
    rx = np.asarray(rx, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 4 or rx.ndim != 3:
        raise ValueError(f"expected rx (N,K,s) and h (N,M,K,s); got {rx.shape}, {h.shape}")
    N, M, K, s = h.shape
    if rx.shape != (N, K, s):
        raise ValueError(f"received shape {rx.shape} inconsistent with channel shape {h.shape}")
    weights = h.sum(axis=1).conj()
    return (weights * rx).sum(axis=1) / K


def estimate_average_gradient(
    obs: np.ndarray, alpha_t: float, M: int, sigma_h_sq: float, d: int
) -> np.ndarray:
    """Recover the length-d gradient-average estimate from combiner output.

    Divides by alpha_t * M * sigma_h_sq and reads real parts back into the
    leading half of each 2s-chunk and imaginary parts into the trailing
    half, dropping padding beyond d. sigma_h_sq is the configured gain
    variance, not an empirical estimate: the receiver knows the channel
    statistics.
    """
    if alpha_t <= 0 or sigma_h_sq <= 0:
        raise ValueError("alpha_t and sigma_h_sq must be positive")
    if M < 1:
        raise ValueError(f"device count M must be >= 1, got {M}")
    obs = np.asarray(obs, dtype=np.complex128)
    return unpack(obs / (alpha_t * M * sigma_h_sq), d)


def effective_signal_gains(h: np.ndarray) -> np.ndarray:
    """Per-device signal weights (1/K) sum_k |h|^2, shape (N, M, s).

    These multiply each device's own symbols in the combiner output and
    concentrate at sigma_h_sq as K grows.
    """
    h = np.asarray(h)
    if h.ndim != 4:
        raise ValueError(f"expected h (N,M,K,s), got shape {h.shape}")
    return (h.real**2 + h.imag**2).mean(axis=2)


def interference_statistic(h: np.ndarray) -> np.ndarray:
    """Cross-device gain statistic per (symbol, subchannel), shape (N, s).

    (1/K) sum_k sum_m sum_{m' != m} conj(h[m]) h[m'], computed as the
    squared magnitude of the device-summed gain minus the per-device
    magnitudes. Zero mean; second moment M(M-1) sigma_h^4 / K. Identically
    zero for M = 1.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 4:
        raise ValueError(f"expected h (N,M,K,s), got shape {h.shape}")
    K = h.shape[2]
    total = h.sum(axis=1)
    pair_sum = total.conj() * total - (h.conj() * h).sum(axis=1)
    return pair_sum.sum(axis=1) / K


@dataclass
class Decomposition:
    """Signal / interference / noise split of the combiner output."""

    signal: np.ndarray
    interference: np.ndarray
    noise_out: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.signal + self.interference + self.noise_out


def decompose(
    gradient_blocks: np.ndarray,
    h: np.ndarray,
    z: np.ndarray,
    alpha_t: float,
    noise_term: str = "consistent",
) -> Decomposition:
    """Split the combiner output into signal, interference, and noise parts.

    ``gradient_blocks`` holds the unscaled packed gradients, shape (M, N, s);
    the alpha_t scaling is applied here. This is a diagnostics path: it needs
    per-device gradients the receiver never observes separately.

    noise_term selects the accumulation order of the noise part:
    "consistent" contracts antenna-first, (1/K) sum_k (sum_m h)^* z_k, as
    produced by applying the combiner to the received signal; "as_printed"
    accumulates device-first, sum_m (1/K) sum_k conj(h_m) z_k. The two are
    the same double sum and differ only in floating-point ordering; both
    satisfy signal + interference + noise_out == combine(propagate(...)).
    """
    if noise_term not in ("consistent", "as_printed"):
        raise ValueError(f"unknown noise_term {noise_term!r}")
    g = np.asarray(gradient_blocks, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if g.ndim != 3 or h.ndim != 4:
        raise ValueError(f"expected gradient_blocks (M,N,s) and h (N,M,K,s); got {g.shape}, {h.shape}")
    N, M, K, s = h.shape
    if g.shape != (M, N, s):
        raise ValueError(f"gradient blocks shape {g.shape} inconsistent with channel shape {h.shape}")
    if z.shape != (N, K, s):
        raise ValueError(f"noise shape {z.shape} inconsistent with channel shape {h.shape}")

    gains = effective_signal_gains(h)
    signal = alpha_t * np.einsum("nmi,mni->ni", gains, g)

    summed = h.sum(axis=1)
    if M == 1:
        # The m' != m sum is empty; keep it exactly zero instead of leaving
        # cancellation residue from computing the same product two ways.
        interference = np.zeros_like(signal)
    else:
        weighted = np.einsum("nmki,mni->nki", h, g)
        own = np.einsum("nmki,mni->nki", (h.real**2 + h.imag**2).astype(np.complex128), g)
        interference = alpha_t * (summed.conj() * weighted - own).sum(axis=1) / K

    if noise_term == "consistent":
        noise_out = (summed.conj() * z).sum(axis=1) / K
    else:
        noise_out = np.einsum("nmki,nki->ni", h.conj(), z) / K

    return Decomposition(signal=signal, interference=interference, noise_out=noise_out)
