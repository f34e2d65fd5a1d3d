"""Single-layer softmax classifier with SGD and ADAM updates.

The parameter vector flattens the (classes, features) weight matrix
class-major with each class's bias appended last:

    theta.reshape(C, F + 1)[c] == [w_c1, ..., w_cF, b_c]

so a model with F features and C classes has d = (F + 1) * C parameters.
Gradients are averages of the cross-entropy gradient over a batch; the
aggregated (or channel-estimated) average gradient drives the optimizer,
whose state lives at the parameter server only.
"""

from dataclasses import dataclass, replace

import numpy as np

from .data import LocalDataset

__all__ = [
    "param_count",
    "init_params",
    "local_gradient",
    "local_loss",
    "evaluate_accuracy",
    "OptimizerSpec",
    "OptimizerState",
    "init_optimizer_state",
    "apply_update",
]


def param_count(num_features: int, num_classes: int) -> int:
    return (num_features + 1) * num_classes


def init_params(num_features: int, num_classes: int) -> np.ndarray:
    """Zero initialization; softmax regression is convex, no symmetry to break."""
    return np.zeros(param_count(num_features, num_classes))


def _split_theta(theta: np.ndarray, num_features: int):
    if theta.size % (num_features + 1) != 0:
        raise ValueError(
            f"parameter length {theta.size} not divisible by features+1={num_features + 1}"
        )
    table = theta.reshape(-1, num_features + 1)
    return table[:, :num_features], table[:, num_features]


def _logits(theta: np.ndarray, X: np.ndarray) -> np.ndarray:
    W, b = _split_theta(theta, X.shape[1])
    return X @ W.T + b


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _select_batch(dataset: LocalDataset, batch):
    if batch is None:
        return dataset.features, dataset.labels
    idx = np.asarray(batch, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("batch selector is empty")
    return dataset.features[idx], dataset.labels[idx]


def local_gradient(theta: np.ndarray, dataset: LocalDataset, batch=None) -> np.ndarray:
    """Average cross-entropy gradient of the softmax model over a batch.

    ``batch`` is an index array into the dataset; None means the full local
    set. Deterministic given (theta, batch).
    """
    X, y = _select_batch(dataset, batch)
    n, F = X.shape
    C = theta.size // (F + 1)
    if np.any(y < 0) or np.any(y >= C):
        raise ValueError(f"labels outside [0, {C})")
    probs = np.exp(_log_softmax(_logits(theta, X)))
    probs[np.arange(n), y] -= 1.0
    probs /= n
    grad = np.empty((C, F + 1))
    grad[:, :F] = probs.T @ X
    grad[:, F] = probs.sum(axis=0)
    return grad.reshape(-1)


def local_loss(theta: np.ndarray, dataset: LocalDataset, batch=None) -> float:
    """Mean cross-entropy of the softmax model over a batch."""
    X, y = _select_batch(dataset, batch)
    log_probs = _log_softmax(_logits(theta, X))
    return float(-log_probs[np.arange(X.shape[0]), y].mean())


def evaluate_accuracy(theta: np.ndarray, test_set: LocalDataset) -> float:
    """Fraction of argmax-correct predictions; ties go to the lowest class."""
    logits = _logits(theta, test_set.features)
    C = logits.shape[1]
    if np.any(test_set.labels < 0) or np.any(test_set.labels >= C):
        raise ValueError(f"test labels outside [0, {C})")
    return float((logits.argmax(axis=1) == test_set.labels).mean())


@dataclass(frozen=True)
class OptimizerSpec:
    kind: str = "sgd"  # "sgd" | "adam"
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")


@dataclass
class OptimizerState:
    step: int
    m: np.ndarray  # first-moment accumulator (adam)
    v: np.ndarray  # second-moment accumulator (adam)


def init_optimizer_state(d: int) -> OptimizerState:
    return OptimizerState(step=0, m=np.zeros(d), v=np.zeros(d))


def apply_update(
    theta: np.ndarray, grad: np.ndarray, spec: OptimizerSpec, state: OptimizerState
):
    """One optimizer step on the aggregated gradient; returns (theta, state).

    SGD: theta - lr * grad. ADAM: standard bias-corrected moment update.
    Rejects non-finite gradients so a corrupted aggregation round fails
    loudly instead of poisoning the moments.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != theta.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match parameters {theta.shape}")
    if not np.all(np.isfinite(grad)):
        raise ValueError("non-finite gradient")
    step = state.step + 1
    if spec.kind == "sgd":
        return theta - spec.learning_rate * grad, replace(state, step=step)
    m = spec.beta1 * state.m + (1 - spec.beta1) * grad
    v = spec.beta2 * state.v + (1 - spec.beta2) * grad**2
    m_hat = m / (1 - spec.beta1**step)
    v_hat = v / (1 - spec.beta2**step)
    theta_new = theta - spec.learning_rate * m_hat / (np.sqrt(v_hat) + spec.eps)
    return theta_new, OptimizerState(step=step, m=m, v=v)
