"""Statistical pass/fail checks for Monte Carlo experiments.

Not a hypothesis-testing library; just the three checks the verification
suite needs, each returning an auditable record of what was compared.
Thresholds are sized so that failures indicate bugs rather than unlucky
draws: 4 standard errors for means (false alarm ~1e-4 per check) and a 5%
variance window at 1e5 trials (a ~10 sigma margin under chi-square
concentration).
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["CheckResult", "check_mean_zero", "check_variance", "check_monotone"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    observed: float
    expected: float
    kind: str  # "standard_errors" | "relative" | "margin" | "range"
    tolerance: float
    trials: int
    passed: bool

    def describe(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"[{verdict}] {self.name}: observed={self.observed:.6g} "
            f"expected={self.expected:.6g} ({self.kind} tol {self.tolerance:g}, "
            f"n={self.trials})"
        )


def _mean_component(name: str, values: np.ndarray, max_se: float) -> CheckResult:
    n = values.size
    mean = float(values.mean())
    sem = float(values.std(ddof=1)) / np.sqrt(n)
    if sem == 0.0:
        passed = mean == 0.0  # constant samples: only an exactly-zero mean passes
    else:
        passed = abs(mean) <= max_se * sem
    return CheckResult(
        name=name, observed=mean, expected=0.0,
        kind="standard_errors", tolerance=max_se, trials=n, passed=passed,
    )


def check_mean_zero(name: str, samples, max_standard_errors: float = 4.0) -> list:
    """Is the sample mean within max_standard_errors of zero?

    Complex samples are checked on real and imaginary parts separately;
    returns one CheckResult per component.
    """
    values = np.asarray(samples).ravel()
    if values.size < 2:
        raise ValueError("need at least 2 samples")
    if max_standard_errors <= 0:
        raise ValueError("max_standard_errors must be positive")
    if np.iscomplexobj(values):
        return [
            _mean_component(f"{name}.re", values.real, max_standard_errors),
            _mean_component(f"{name}.im", values.imag, max_standard_errors),
        ]
    return [_mean_component(name, values.astype(np.float64), max_standard_errors)]


def check_variance(name: str, samples, expected: float, rel_tol: float = 0.05) -> CheckResult:
    """Is the sample variance within rel_tol (relative) of the expectation?

    Complex samples use the complex variance E[|x - mean|^2]. Sample
    variance uses the n-1 normalization.
    """
    values = np.asarray(samples).ravel()
    if values.size < 100:
        raise ValueError("need at least 100 samples for a variance check")
    if expected <= 0:
        raise ValueError("expected variance must be positive")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    centered = values - values.mean()
    var = float((centered.real**2 + centered.imag**2).sum() / (values.size - 1))
    passed = abs(var - expected) <= rel_tol * expected
    return CheckResult(
        name=name, observed=var, expected=expected,
        kind="relative", tolerance=rel_tol, trials=values.size, passed=passed,
    )


def check_monotone(name: str, series, direction: str, noise_margin: float = 0.0) -> CheckResult:
    """Does the metric move in the stated direction along the parameter axis?

    ``series`` is a list of (parameter, metric) pairs; parameters must be
    strictly increasing (a shuffled series would make the comparison
    meaningless). Each successive step may violate the direction by at most
    noise_margin. ``observed`` reports the worst adverse step.
    """
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    if noise_margin < 0:
        raise ValueError("noise_margin must be nonnegative")
    points = list(series)
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    params = [p for p, _ in points]
    if any(b <= a for a, b in zip(params, params[1:])):
        raise ValueError(f"parameter values must be strictly increasing, got {params}")
    metrics = np.asarray([m for _, m in points], dtype=np.float64)
    steps = np.diff(metrics)
    if direction == "decreasing":
        steps = -steps
    worst = float(steps.min())  # most adverse step; negative means a violation
    passed = bool(worst >= -noise_margin)
    return CheckResult(
        name=name, observed=worst, expected=0.0,
        kind="margin", tolerance=noise_margin, trials=len(points), passed=passed,
    )
