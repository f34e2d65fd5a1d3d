"""Full training runs: local gradients, analog aggregation, metrics files.

One iteration in ota mode is the pipeline
local_gradient x M -> transmit x M -> channel + noise -> combine ->
estimate_average_gradient -> optimizer update. The error_free mode skips the
channel and hands the optimizer the exact device-average gradient, giving the
idealized baseline the noisy runs are compared against.

Metrics land in a CSV whose header comments carry the fully resolved config,
so every data file is reproducible on its own.
"""

import itertools
import json
import os
from dataclasses import dataclass

import numpy as np

from . import channel, data, learner, ota, rng
from .config import ConfigError, RunConfig, apply_overrides, parse_config, resolved_json

__all__ = [
    "MetricsRecord",
    "NumericAbort",
    "build_dataset",
    "run",
    "power_report",
    "write_metrics",
    "run_matrix",
]

CSV_HEADER = "iter,accuracy,loss,inst_power,avg_power,est_mse"


@dataclass
class MetricsRecord:
    """Per-iteration measurements; accuracy/loss filled on evaluation rows only."""

    iteration: int
    accuracy: float  # None between evaluations
    loss: float  # None between evaluations
    inst_power: float  # realized per-device transmit power this iteration
    avg_power: float  # running mean of inst_power up to this iteration
    est_mse: float  # per-coordinate MSE of the estimate vs the true average; None in error_free


class NumericAbort(Exception):
    """A run produced non-finite numbers; carries where it happened."""

    def __init__(self, iteration: int, stage: str):
        self.iteration = iteration
        self.stage = stage
        super().__init__(f"non-finite values at iteration {iteration} in stage {stage!r}")


def build_dataset(config: RunConfig):
    """Materialize (train, test) datasets described by the config.

    IDX pixel features are rescaled to [0, 1]; synthetic features are used
    as generated. In both cases the flattened model dimension is checked
    against the configured d before any training starts.
    """
    if config.dataset.kind == "synthetic":
        train, test = data.make_synthetic(config.dataset.synthetic)
        classes = config.dataset.synthetic.classes
    else:
        paths = config.dataset.idx
        train = data.scale_to_unit(data.load_idx(paths.train_images, paths.train_labels))
        test = data.scale_to_unit(data.load_idx(paths.test_images, paths.test_labels))
        classes = 10
    n_features = train.features.shape[1]
    expected = learner.param_count(n_features, classes)
    if expected != config.d:
        raise ConfigError(
            f"model dimension mismatch: config d={config.d}, "
            f"dataset implies (features+1)*classes={expected}"
        )
    if config.partition.per_device > train.features.shape[0]:
        raise ConfigError(
            f"per_device={config.partition.per_device} exceeds "
            f"{train.features.shape[0]} training samples"
        )
    return train, test, classes


def _device_batches(config: RunConfig, devices, t: int):
    if config.batch_size is None:
        return [None] * config.M
    batches = []
    for dev in devices:
        gen = rng.generator(rng.substream(config.master_seed, rng.BATCH, t, dev.device_id))
        batches.append(gen.choice(len(dev.labels), size=config.batch_size, replace=False))
    return batches


def run(config: RunConfig, gradient_fn=None, capture=None) -> list:
    """Execute a full training run; returns one MetricsRecord per iteration.

    ``gradient_fn(theta, device, t, batch) -> (d,) array`` replaces the local
    softmax gradient when supplied, which is the hook for studying the
    aggregation path under alternative local objectives (gradient clipping,
    synthetic gradient streams, and so on). Passing a dict as ``capture``
    stores the final parameter vector under "theta" for trajectory-level
    analysis the records do not carry.

    Accuracy and training loss are computed every ``eval_every`` iterations
    and always at t = T; power is tracked every iteration. Raises
    NumericAbort rather than continuing with non-finite numbers.
    """
    train, test, classes = build_dataset(config)
    devices = data.partition(train, config.M, config.partition.per_device, config.master_seed)
    n_features = train.features.shape[1]
    if gradient_fn is None:
        gradient_fn = lambda theta, dev, t, batch: learner.local_gradient(theta, dev, batch)

    theta = learner.init_params(n_features, classes)
    state = learner.init_optimizer_state(config.d)
    N = config.n_blocks
    records = []
    power_sum = 0.0

    for t in range(1, config.T + 1):
        alpha = config.power.alpha_at(t)
        batches = _device_batches(config, devices, t)
        grads = np.stack(
            [gradient_fn(theta, dev, t, batch) for dev, batch in zip(devices, batches)]
        )
        if not np.all(np.isfinite(grads)):
            raise NumericAbort(t, "local_gradient")
        true_avg = grads.mean(axis=0)

        if config.mode == "ota":
            tx = np.stack([ota.transmit(g, alpha, config.s) for g in grads])
            h = channel.sample_channel(
                rng.substream(config.master_seed, rng.CHANNEL, t),
                N, config.M, config.K, config.s, config.sigma_h_sq,
            )
            z = channel.sample_noise(
                rng.substream(config.master_seed, rng.NOISE, t),
                N, config.K, config.s, config.sigma_z_sq,
            )
            y = channel.propagate(tx, h, z)
            obs = ota.combine(y, h)
            estimate = ota.estimate_average_gradient(
                obs, alpha, config.M, config.sigma_h_sq, config.d
            )
            if not np.all(np.isfinite(estimate)):
                raise NumericAbort(t, "estimate")
            est_mse = float(np.mean((estimate - true_avg) ** 2))
            inst_power = float(
                np.mean([ota.transmit_energy(tx[m]) for m in range(config.M)]) / N
            )
            update_grad = estimate
        else:
            est_mse = None
            inst_power = 0.0
            update_grad = true_avg

        theta, state = learner.apply_update(theta, update_grad, config.optimizer, state)
        if not np.all(np.isfinite(theta)):
            raise NumericAbort(t, "update")

        power_sum += inst_power
        avg_power = power_sum / t
        evaluate = (t % config.eval_every == 0) or (t == config.T)
        accuracy = loss = None
        if evaluate:
            accuracy = learner.evaluate_accuracy(theta, test)
            loss = float(np.mean([learner.local_loss(theta, dev) for dev in devices]))
        records.append(MetricsRecord(t, accuracy, loss, inst_power, avg_power, est_mse))
    if capture is not None:
        capture["theta"] = theta
    return records


def power_report(records) -> float:
    """Realized average per-device transmit power over the whole run."""
    if not records:
        raise ValueError("no records")
    return records[-1].avg_power


def _format_cell(value) -> str:
    return "" if value is None else repr(float(value))


def write_metrics(records, config: RunConfig, path) -> None:
    """Write evaluation rows as CSV with the resolved config in '#' comments."""
    lines = [
        f"# config: {resolved_json(config)}",
        f"# master_seed: {config.master_seed}",
        CSV_HEADER,
    ]
    for rec in records:
        if rec.accuracy is None:
            continue
        lines.append(
            f"{rec.iteration},{_format_cell(rec.accuracy)},{_format_cell(rec.loss)},"
            f"{_format_cell(rec.inst_power)},{_format_cell(rec.avg_power)},"
            f"{_format_cell(rec.est_mse)}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _cell_filename(assignments) -> str:
    if not assignments:
        return "metrics.csv"
    parts = [f"{field.replace('.', '-')}={value}" for field, value in assignments]
    return "metrics_" + "_".join(parts) + ".csv"


def run_matrix(base_doc: dict, sweep, out_dir) -> list:
    """Run the cartesian product of parameter sweeps over a base config dict.

    ``sweep`` is a list of (field, values) pairs where field is a config key
    in override syntax (dots for nesting). Returns the metrics paths written,
    one per cell, filenames encoding the cell's assignments.
    """
    os.makedirs(out_dir, exist_ok=True)
    fields = [field for field, _ in sweep]
    value_lists = [values for _, values in sweep]
    paths = []
    for combo in itertools.product(*value_lists):
        assignments = list(zip(fields, combo))
        overrides = [f"{field}={json.dumps(value)}" for field, value in assignments]
        doc = apply_overrides(base_doc, overrides)
        filename = _cell_filename(assignments)
        doc["metrics_path"] = os.path.join(out_dir, filename)
        config = parse_config(doc)
        records = run(config)
        write_metrics(records, config, config.metrics_path)
        paths.append(config.metrics_path)
    return paths
