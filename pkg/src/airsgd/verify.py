"""Monte Carlo verification of the aggregation statistics.

Two suites, both built on fresh channel draws:

* interference: the cross-device term of the combiner output has zero mean
  and variance M(M-1) sigma_h^4 / K per complex coefficient;
* hardening: the per-device effective gain (1/K) sum_k |h|^2 concentrates
  at sigma_h^2, its relative RMS deviation shrinking like 1/sqrt(K), so
  quadrupling K should roughly halve it.

These back the `verify-stats` CLI verb and the statistical acceptance
tests. Draws are chunked along the block axis so trial counts in the 1e5
range stay inside a laptop's memory.
"""

import numpy as np

from . import channel, ota, rng, statcheck

__all__ = [
    "interference_samples",
    "interference_checks",
    "hardening_rms_deviation",
    "hardening_checks",
    "stat_suite",
    "format_report",
]

_CHUNK = 4096

# (M, K, sigma_h_sq) triples exercised by the default interference suite.
INTERFERENCE_CASES = ((2, 4, 1.0), (4, 8, 1.0), (8, 16, 2.0))

HARDENING_K = (4, 16, 64, 256)


def interference_variance(M: int, K: int, sigma_h_sq: float) -> float:
    """Predicted per-coefficient variance of the cross-device term."""
    return M * (M - 1) * sigma_h_sq**2 / K


def interference_samples(M, K, sigma_h_sq, trials, seed, case_index=0) -> np.ndarray:
    """Draw `trials` independent realizations of the interference statistic.

    Each draw uses an independent channel matrix with a single subchannel;
    the statistic is scale-free in the gradients so no signal is needed.
    """
    out = np.empty(trials, dtype=np.complex128)
    filled = 0
    chunk_index = 0
    while filled < trials:
        n = min(_CHUNK, trials - filled)
        seed_seq = rng.substream(seed, rng.CHANNEL, case_index, chunk_index)
        h = channel.sample_channel(seed_seq, n, M, K, 1, sigma_h_sq)
        out[filled : filled + n] = ota.interference_statistic(h)[:, 0]
        filled += n
        chunk_index += 1
    return out


def interference_checks(trials: int, seed: int, cases=INTERFERENCE_CASES) -> list:
    """Mean and variance checks of the interference statistic per case."""
    results = []
    for index, (M, K, sigma_h_sq) in enumerate(cases):
        samples = interference_samples(M, K, sigma_h_sq, trials, seed, case_index=index)
        label = f"interference(M={M},K={K},sig_h2={sigma_h_sq:g})"
        results.extend(statcheck.check_mean_zero(f"{label}.mean", samples, 4.0))
        expected = interference_variance(M, K, sigma_h_sq)
        results.append(statcheck.check_variance(f"{label}.var", samples, expected, 0.05))
    return results


def hardening_rms_deviation(M, K, sigma_h_sq, trials, seed, k_index=0) -> float:
    """Relative RMS deviation of the effective per-coefficient gain from sigma_h^2."""
    total = 0.0
    count = 0
    filled = 0
    chunk_index = 0
    while filled < trials:
        n = min(_CHUNK, trials - filled)
        seed_seq = rng.substream(seed, rng.CHANNEL, k_index, chunk_index)
        h = channel.sample_channel(seed_seq, n, M, K, 1, sigma_h_sq)
        gains = ota.effective_signal_gains(h)  # (n, M, 1)
        total += float(((gains - sigma_h_sq) ** 2).sum())
        count += gains.size
        filled += n
        chunk_index += 1
    return float(np.sqrt(total / count) / sigma_h_sq)


def hardening_checks(trials: int, seed: int, M: int = 2, sigma_h_sq: float = 1.0,
                     antennas=HARDENING_K) -> list:
    """Check the RMS deviation roughly halves each time K quadruples."""
    # Offset the stream index so these draws never coincide with an
    # interference case of the same shape and seed.
    deviations = [
        hardening_rms_deviation(M, K, sigma_h_sq, trials, seed, k_index=100 + i)
        for i, K in enumerate(antennas)
    ]
    results = []
    for (k_lo, dev_lo), (k_hi, dev_hi) in zip(
        zip(antennas, deviations), zip(antennas[1:], deviations[1:])
    ):
        ratio = dev_hi / dev_lo
        results.append(
            statcheck.CheckResult(
                name=f"hardening.ratio(K={k_lo}->{k_hi})",
                observed=ratio,
                expected=0.5,
                kind="range",
                tolerance=0.1,
                trials=trials,
                passed=bool(0.4 <= ratio <= 0.6),
            )
        )
    return results


def stat_suite(trials: int, seed: int) -> list:
    """All statistical checks, as run by the verify-stats command."""
    if trials < 1000:
        raise ValueError(f"need at least 1000 trials for stable checks, got {trials}")
    results = interference_checks(trials, seed)
    # Hardening ratios stabilize well below 1e5 draws; cap to keep runtime flat.
    results.extend(hardening_checks(min(trials, 10_000), seed))
    return results


def format_report(results) -> str:
    lines = [r.describe() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
