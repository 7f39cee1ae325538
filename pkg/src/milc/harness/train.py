"""Training and evaluation loop, metric history and run persistence."""

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import distributions as dist
from .. import losses, nn
from ..errors import NumericError
from ..gauss import sample
from . import data as data_mod

log = logging.getLogger(__name__)

METRIC_COLUMNS = ("epoch", "split", "error_rate", "loss_total", "loss_cond", "loss_entropy_term", "mi_learned")


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    split: str
    error_rate: float
    loss_total: float
    loss_cond: float
    loss_entropy_term: float
    mi_learned: float


@dataclass
class TrainResult:
    history: list
    params: nn.ModelParams
    manifest: dict
    output_dir: Path = None

    def final(self, split="test"):
        return [m for m in self.history if m.split == split][-1]


def evaluate(params, batch):
    """Error rate of arg-max predictions and the learned MI breakdown over the whole split."""
    preds = nn.forward(params, batch)
    error_rate = float(np.mean(nn.predict_labels(preds) != batch.labels))
    c = params.num_classes
    breakdown = dist.mi_estimate(dist.one_hot(batch.labels, c), preds, dist.empirical_label_dist(batch.labels, c))
    return error_rate, breakdown


def epoch_metrics(params, batch, train_config, epoch, split):
    preds = nn.forward(params, batch)
    error_rate = float(np.mean(nn.predict_labels(preds) != batch.labels))
    m, _ = losses.objective(
        train_config.loss_kind,
        batch.labels,
        preds,
        lambda_ent=train_config.lambda_ent,
        smoothing_eps=train_config.smoothing_eps,
        lsr_mode=train_config.lsr_mode,
    )
    return EpochMetrics(epoch, split, error_rate, m.total, m.cond_term, m.entropy_term, m.mi)


def load_data(config):
    """``(train, test, provenance)`` for an experiment config."""
    if config.dataset == "mnist":
        root = Path(config.data_dir) if config.data_dir else data_mod.default_mnist_dir()
        train, test = data_mod.load_mnist(root)
        hashes = {p.name: data_mod.git_blob_hash(p) for p in data_mod.mnist_paths(root).values()}
        return train, test, {"dataset": "mnist", "data_dir": str(root), "files": hashes}
    model = config.gaussian_model()
    seed = config.train.seed
    train = sample(model, config.gauss_train, [seed, 1])
    test = sample(model, config.gauss_test, [seed, 2])
    return train, test, {"dataset": "gaussian", "model": model.to_dict(), "sample_seeds": [[seed, 1], [seed, 2]]}


def train_classifier(config, data=None):
    """Train one MLP per ``config`` (a single trial) and return its history and parameters.

    ``data`` may supply a preloaded ``(train, test, provenance)`` triple.
    """
    tc = config.train
    train, test, provenance = data if data is not None else load_data(config)
    if train.inputs.shape[1] != config.widths[0]:
        raise ValueError(f"data has {train.inputs.shape[1]} features but widths start at {config.widths[0]}")
    params = nn.init_params(config.widths, tc.seed)
    history = []

    def record(epoch):
        for split, batch in (("train", train), ("test", test)):
            try:
                history.append(epoch_metrics(params, batch, tc, epoch, split))
            except NumericError as exc:
                raise NumericError(f"epoch {epoch}, {split} evaluation: {exc}", term=exc.term) from exc

    record(0)
    n = len(train)
    for epoch in range(1, tc.epochs + 1):
        order = np.random.default_rng([tc.seed, 3, epoch]).permutation(n)
        for j, start in enumerate(range(0, n, tc.batch_size)):
            batch = train.subset(order[start : start + tc.batch_size])
            try:
                _, grads, _ = nn.loss_and_grad(params, batch, tc)
            except NumericError as exc:
                raise NumericError(f"epoch {epoch}, batch {j}: {exc}", term=exc.term) from exc
            nn.sgd_step(params, grads, tc)
        if epoch % config.eval_every == 0 or epoch == tc.epochs:
            record(epoch)
            last = history[-1]
            log.info("epoch %d test error %.4f mi %.4f", epoch, last.error_rate, last.mi_learned)

    manifest = {
        "config": config.to_flat(),
        "seed": tc.seed,
        "data": provenance,
        "test_label_entropy": dist.entropy(dist.empirical_label_dist(test.labels, params.num_classes)),
        "final_test_accuracy": 1.0 - history[-1].error_rate,
    }
    return TrainResult(history, params, manifest)


def metrics_csv(history):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRIC_COLUMNS)
    for m in history:
        writer.writerow([m.epoch, m.split] + [repr(float(getattr(m, c))) for c in METRIC_COLUMNS[2:]])
    return buf.getvalue()


def read_metrics_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        EpochMetrics(int(r["epoch"]), r["split"], *(float(r[c]) for c in METRIC_COLUMNS[2:]))
        for r in rows
    ]


def save_result(result, out_dir, plots=True):
    from .audit import write_bound_audit

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.csv").write_text(metrics_csv(result.history))
    (out_dir / "manifest.json").write_text(json.dumps(result.manifest, indent=2, sort_keys=True) + "\n")
    arrays = {f"layer{k}_{name}": a for k, l in enumerate(result.params.layers) for name, a in (("weight", l.weight), ("bias", l.bias))}
    np.savez(out_dir / "params.npz", **arrays)
    write_bound_audit(result, out_dir)
    if plots:
        from .plotting import plot_learning_curves

        plot_learning_curves(result.history, out_dir / "learning_curves.png")
    result.output_dir = out_dir
    return result


def _run_trial(args):
    config, trial, plots = args
    cfg = config.with_trial(trial)
    result = train_classifier(cfg)
    return save_result(result, Path(config.output_dir) / f"trial_{trial}", plots=plots)


def summarize(results):
    acc = np.array([1.0 - r.final().error_rate for r in results])
    return {
        "trials": len(results),
        "seeds": [r.manifest["seed"] for r in results],
        "final_test_accuracy": acc.tolist(),
        "mean": float(acc.mean()),
        "std": float(acc.std(ddof=1)) if acc.size > 1 else 0.0,
        "range": float(acc.max() - acc.min()),
    }


def run_experiment(config, jobs=1, plots=True):
    """Run every trial of ``config``; trials in parallel processes when ``jobs > 1``."""
    tasks = [(config, t, plots) for t in range(config.trials)]
    if jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, tasks))
    else:
        results = [_run_trial(t) for t in tasks]
    summary = summarize(results)
    out = Path(config.output_dir)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return results, summary
