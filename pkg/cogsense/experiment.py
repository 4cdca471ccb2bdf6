"""
Monte Carlo orchestration: simulates sensing windows, trains the adaptive
fusers on the leading share of trials, scores every configured fuser on the
rest and writes the result files.
"""
import csv
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import Dict, List, Optional

import numpy as np

from cogsense import constants
from cogsense.detector import decide, energy, threshold_for_pfa
from cogsense.exceptions import CogsenseError, EmissionError, InputError, TrialError
from cogsense.fusion import FusionInput, build_fuser
from cogsense.metrics import (
    auc,
    confusion,
    error_histogram,
    roc_from_scores,
    summarize_training,
    validate_curve,
    validate_rate,
)
from cogsense.reporting import (
    ReportingChannel,
    fusion_features,
    local_bit_threshold,
    transmit_report,
)
from cogsense.signal import (
    block_fading_gains,
    channel_for_snr,
    generate_primary,
    received_samples,
)
from cogsense.utils import format_float, round_float, streams
from cogsense.utils.log import getLogger

log = getLogger("cogsense.experiment")

CHUNKS_PER_THREAD = 4


@dataclass
class SplitResult:
    """How a trained fuser does on one named part of the trials."""

    name: str
    trials: int
    mse: float
    percent_error: float
    curve: Optional[object] = None
    area: Optional[float] = None

    def to_dict(self):
        return {
            "name": self.name,
            "trials": self.trials,
            "mse": self.mse,
            "percent_error": self.percent_error,
            "auc": self.area,
        }


@dataclass
class FuserSummary:
    name: str
    evaluated: int
    threshold: float
    curve: Optional[object]
    area: Optional[float]
    confusion: object
    detection_rate: float
    false_alarm_rate: float
    training_record: Optional[object] = None
    fuser: Optional[object] = field(default=None, repr=False, compare=False)
    errors: Optional[object] = field(default=None, compare=False)
    splits: Optional[List[SplitResult]] = field(default=None, compare=False)

    @property
    def slug(self):
        return self.name.replace(constants.ALIAS_SEPARATOR, "_")


@dataclass
class RunSummary:
    config: object
    seed: int
    local_threshold: float
    train_trials: int
    evaluation_trials: int
    fusers: Dict[str, FuserSummary]
    wall_clock_seconds: float = field(default=0.0, compare=False)

    def to_dict(self):
        """The JSON form of the summary; wall-clock time is left out."""
        fusers = {}
        for name, item in self.fusers.items():
            matrix = item.confusion
            fusers[name] = {
                "auc": item.area,
                "evaluated": item.evaluated,
                "threshold": item.threshold,
                "detection_rate": item.detection_rate,
                "false_alarm_rate": item.false_alarm_rate,
                "accuracy": matrix.accuracy,
                "confusion": {
                    "counts": matrix.counts,
                    "percentages": matrix.percentages,
                },
                "files": _file_names(item),
                "errors": (
                    None
                    if item.errors is None
                    else {
                        "bin_edges": item.errors.bin_edges.tolist(),
                        "counts": item.errors.counts.tolist(),
                    }
                ),
                "splits": (
                    None
                    if item.splits is None
                    else [split.to_dict() for split in item.splits]
                ),
                "training": (
                    None
                    if item.training_record is None
                    else dict(
                        summarize_training(item.training_record),
                        record=item.training_record.to_dict(),
                    )
                ),
            }
        return _clean(
            {
                "schema": constants.SUMMARY_SCHEMA,
                "seed": self.seed,
                "config": self.config.to_dict(),
                "local_threshold": self.local_threshold,
                "train_trials": self.train_trials,
                "evaluation_trials": self.evaluation_trials,
                "fusers": fusers,
            }
        )


def _clean(value):
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round_float(value)
    return value


def simulate_trial(config, trial, energy_threshold):
    """
    Runs one sensing window end to end and returns the fusion center's view.

    Every draw comes from streams keyed by ``(seed, trial)``, so the window is
    the same whichever worker runs it.
    """
    seed = config.seed
    hypothesis = int(streams.stream(seed, trial, "hypothesis").integers(0, 2))
    fading_rng = streams.stream(seed, trial, "fading")
    signal_rng = streams.stream(seed, trial, "signal")
    noise_rng = streams.stream(seed, trial, "noise")
    report_rng = streams.stream(seed, trial, "reporting")

    if config.sensing_fading:
        gains = block_fading_gains(
            config.m_users, config.max_doppler_hz, config.sample_interval_s, fading_rng
        )
    else:
        gains = np.ones(config.m_users)

    report_channel = ReportingChannel(
        fading_variance=config.fading_variance,
        noise_variance=config.report_noise_variance,
        csi_known=config.csi_known,
    )

    reports = []
    for user in range(config.m_users):
        channel = channel_for_snr(
            config.snr_db[user],
            noise_variance=config.noise_variance,
            fading_gain=gains[user],
        )
        primary = generate_primary(config.signal, config.n_samples, signal_rng)
        samples = received_samples(hypothesis, primary, channel, noise_rng)
        statistic = energy(samples, user_index=user)
        if config.report_mode == constants.HARD:
            payload = decide(statistic, energy_threshold)
        else:
            payload = statistic.value
        reports.append(
            transmit_report(
                payload, report_channel, report_rng, mode=config.report_mode, user_index=user
            )
        )

    values = fusion_features(
        reports,
        n_samples=config.n_samples,
        noise_variance=config.noise_variance,
        fading_variance=config.fading_variance,
    )
    return FusionInput.create(values, hypothesis, trial)


def _simulate_chunk(args):
    config, start, end, energy_threshold = args
    windows = []
    for trial in range(start, end):
        try:
            windows.append(simulate_trial(config, trial, energy_threshold))
        except CogsenseError as exc:
            raise TrialError(trial, exc)
    log.bind(seed=config.seed).debug(
        "Simulated trials %d - %d of %d.", start + 1, end, config.trials
    )
    return windows


def simulate_trials(config, energy_threshold, threads=1, stop=None):
    """Simulates trials ``0 .. stop - 1`` (all of them by default) in trial order."""
    if threads < 1:
        raise InputError("threads must be >= 1, got %r." % (threads,))
    stop = config.trials if stop is None else min(stop, config.trials)

    chunk = max(1, int(math.ceil(stop / float(threads * CHUNKS_PER_THREAD))))
    queue = [
        (config, start, min(start + chunk, stop), energy_threshold)
        for start in range(0, stop, chunk)
    ]

    if threads == 1:
        chunks = [_simulate_chunk(args) for args in queue]
    else:
        pool = ThreadPool(threads)
        try:
            chunks = pool.map(_simulate_chunk, queue)
        finally:
            pool.close()
            pool.join()

    windows = [window for windows in chunks for window in windows]
    windows.sort(key=lambda window: window.time_index)
    return windows


def fuser_options(config, bit_threshold):
    """Scenario settings handed to every fuser engine as options."""
    return {
        "BIT_THRESHOLD": bit_threshold,
        "STEP_SIZE": config.nlms_step_size,
        "EPOCHS": config.nlms_epochs,
        "HIDDEN_UNITS": config.mlp_hidden,
        "MAX_EPOCHS": config.mlp_max_epochs,
        "LEARNING_RATE": config.mlp_learning_rate,
        "PATIENCE": config.mlp_patience,
        "SPLIT": config.mlp_split,
        "SEED": config.seed,
    }


def prepare_fuser(config, name, training, bit_threshold):
    """Builds the fuser ``name`` and trains it when it is adaptive."""
    fuser = build_fuser(name, **fuser_options(config, bit_threshold))
    if fuser.adaptive:
        log.bind(seed=config.seed).info(
            "Training fuser '%s' on %d trials.", name, len(training)
        )
        fuser.fit(training)
    return fuser


def split_result(name, fuser, windows):
    """Scores ``windows`` with a trained fuser and summarizes the fit."""
    if not windows:
        return SplitResult(name=name, trials=0, mse=math.nan, percent_error=math.nan)
    scores = np.asarray(fuser.scores(windows), dtype=float)
    labels = np.array([window.label for window in windows], dtype=int)
    predictions = (scores > fuser.threshold).astype(int)

    curve = area = None
    if labels.min() != labels.max():
        curve = roc_from_scores(scores, labels)
        area = auc(curve)
    return SplitResult(
        name=name,
        trials=len(labels),
        mse=float(np.mean((labels - scores) ** 2)),
        percent_error=100.0 * float(np.mean(predictions != labels)),
        curve=curve,
        area=area,
    )


def fuser_splits(fuser, training, evaluation):
    """
    Results on each part ``fit`` made of the training trials, then on the
    evaluation trials and on all trials together.
    """
    parts = list(fuser.training_splits(training).items())
    parts.append(("evaluation", list(evaluation)))
    parts.append(("all", list(training) + list(evaluation)))
    return [split_result(name, fuser, windows) for name, windows in parts]


def evaluate_fuser(name, fuser, evaluation, training=None, seed=None):
    """
    Scores ``fuser`` on the evaluation trials.

    Adaptive fusers are also summarized per split when ``training`` is given.
    """
    bound = log.bind(seed=seed) if seed is not None else log
    scores = np.asarray(fuser.scores(evaluation), dtype=float)
    labels = np.array([window.label for window in evaluation], dtype=int)
    predictions = (scores > fuser.threshold).astype(int)
    matrix = confusion(predictions, labels)

    curve = area = None
    if labels.min() != labels.max():
        curve = roc_from_scores(scores, labels)
        area = auc(curve)
        bound.info("Fuser '%s': AUC %.4f over %d trials.", name, area, len(labels))
    else:
        bound.warning(
            "Fuser '%s': evaluation trials hold one hypothesis only; no ROC curve.",
            name,
        )

    splits = None
    if fuser.adaptive and training is not None:
        splits = fuser_splits(fuser, training, evaluation)

    return FuserSummary(
        name=name,
        evaluated=len(labels),
        threshold=fuser.threshold,
        curve=curve,
        area=area,
        confusion=matrix,
        detection_rate=matrix.detection_rate,
        false_alarm_rate=matrix.false_alarm_rate,
        training_record=fuser.training_record,
        fuser=fuser,
        errors=error_histogram(labels - scores, constants.ERROR_BINS),
        splits=splits,
    )


def decision_thresholds(config):
    """
    Returns the local energy threshold and the feature value above which the
    hard rules count a report as a one.
    """
    energy_threshold = threshold_for_pfa(
        config.target_pfa,
        config.noise_variance,
        config.n_samples,
        convention=constants.COMPLEX,
    )
    bit_threshold = local_bit_threshold(
        config.report_mode,
        energy_threshold=energy_threshold,
        n_samples=config.n_samples,
        noise_variance=config.noise_variance,
    )
    return energy_threshold, bit_threshold


def train_fuser(config, name, threads=1):
    """Trains the fuser ``name`` on the training trials of ``config`` only."""
    energy_threshold, bit_threshold = decision_thresholds(config)
    training = simulate_trials(
        config, energy_threshold, threads=threads, stop=config.train_trials
    )
    return prepare_fuser(config, name, training, bit_threshold)


def run_experiment(config, threads=1, fusers=None, loaded=None):
    """
    Runs the scenario ``config`` and returns a ``RunSummary``.

    ``fusers`` replaces the configured fuser names. ``loaded`` maps names to
    already trained fusers, which are evaluated as they are.
    """
    started = time.perf_counter()
    names = tuple(fusers) if fusers else tuple(config.fuser)
    loaded = loaded or {}
    energy_threshold, bit_threshold = decision_thresholds(config)
    run_log = log.bind(seed=config.seed)

    run_log.info(
        "Running %d trials for %d users with %d thread(s).",
        config.trials,
        config.m_users,
        threads,
    )
    windows = simulate_trials(config, energy_threshold, threads=threads)
    training = windows[: config.train_trials]
    evaluation = windows[config.train_trials :]

    results = {}
    for name in names:
        if name in loaded:
            fuser = loaded[name]
        else:
            fuser = prepare_fuser(config, name, training, bit_threshold)
        results[name] = evaluate_fuser(
            name, fuser, evaluation, training=training, seed=config.seed
        )

    elapsed = time.perf_counter() - started
    run_log.info("Finished %d trials in %.2f s.", config.trials, elapsed)
    return RunSummary(
        config=config,
        seed=config.seed,
        local_threshold=energy_threshold,
        train_trials=len(training),
        evaluation_trials=len(evaluation),
        fusers=results,
        wall_clock_seconds=elapsed,
    )


def _file_names(item):
    names = {
        "confusion": "confusion_%s.csv" % item.slug,
        "training": "training_%s.csv" % item.slug,
    }
    if item.curve is not None:
        names["roc"] = "roc_%s.csv" % item.slug
    if item.errors is not None:
        names["errors"] = "errors_%s.csv" % item.slug
    if item.splits is not None:
        names["splits"] = "splits_%s.csv" % item.slug
        if any(split.curve is not None for split in item.splits):
            names["roc_splits"] = "roc_splits_%s.csv" % item.slug
    return names


def _csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def roc_csv(curve):
    return _csv(
        ("threshold", "p_fa", "p_d"),
        (
            (format_float(threshold), format_float(p_fa), format_float(p_d))
            for threshold, (p_fa, p_d) in zip(curve.thresholds, curve.points)
        ),
    )


def confusion_csv(matrix):
    rows = []
    for predicted, count_row, percent_row in zip(
        (constants.H1, constants.H0), matrix.counts, matrix.percentages
    ):
        for actual, count, percent in zip(
            (constants.H1, constants.H0), count_row, percent_row
        ):
            rows.append((predicted, actual, count, format_float(percent)))
    return _csv(("predicted", "actual", "count", "percent"), rows)


def training_csv(record):
    epochs = [] if record is None else record.epochs
    return _csv(
        ("epoch", "train_mse", "val_mse", "test_mse", "grad_norm"),
        (
            (
                item.epoch,
                format_float(item.train_mse),
                format_float(item.val_mse),
                format_float(item.test_mse),
                format_float(item.grad_norm),
            )
            for item in epochs
        ),
    )


def errors_csv(histogram):
    edges = histogram.bin_edges
    return _csv(
        ("bin_low", "bin_high", "count"),
        (
            (format_float(low), format_float(high), int(count))
            for low, high, count in zip(edges[:-1], edges[1:], histogram.counts)
        ),
    )


def splits_csv(splits):
    return _csv(
        ("split", "trials", "mse", "percent_error", "auc"),
        (
            (
                split.name,
                split.trials,
                format_float(split.mse),
                format_float(split.percent_error),
                format_float(math.nan if split.area is None else split.area),
            )
            for split in splits
        ),
    )


def roc_splits_csv(splits):
    rows = []
    for split in splits:
        if split.curve is None:
            continue
        for threshold, (p_fa, p_d) in zip(split.curve.thresholds, split.curve.points):
            rows.append(
                (split.name, format_float(threshold), format_float(p_fa), format_float(p_d))
            )
    return _csv(("split", "threshold", "p_fa", "p_d"), rows)


def check_summary(summary):
    """Raises ``EmissionError`` unless every fuser result is fit to write."""
    if not summary.fusers:
        raise EmissionError("The summary holds no fuser results.")
    for name, item in summary.fusers.items():
        if item.evaluated < 1:
            raise EmissionError("Fuser '%s' has no evaluation trials." % name)
        try:
            if item.curve is not None:
                validate_curve(item.curve)
            validate_rate(item.detection_rate, "detection_rate")
            validate_rate(item.false_alarm_rate, "false_alarm_rate")
            validate_rate(item.area, "auc")
            for split in item.splits or ():
                if split.curve is not None:
                    validate_curve(split.curve)
                validate_rate(split.area, "auc")
        except InputError as exc:
            raise EmissionError("Fuser '%s': %s" % (name, exc))


def render_outputs(summary):
    """Returns ``{file name: text}`` for every output file."""
    check_summary(summary)
    files = {}
    for item in summary.fusers.values():
        names = _file_names(item)
        if item.curve is not None:
            files[names["roc"]] = roc_csv(item.curve)
        files[names["confusion"]] = confusion_csv(item.confusion)
        files[names["training"]] = training_csv(item.training_record)
        if "errors" in names:
            files[names["errors"]] = errors_csv(item.errors)
        if "splits" in names:
            files[names["splits"]] = splits_csv(item.splits)
        if "roc_splits" in names:
            files[names["roc_splits"]] = roc_splits_csv(item.splits)
    files["summary.json"] = (
        json.dumps(summary.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"
    )
    return files


def emit_outputs(summary, out_dir):
    """
    Writes the result files of ``summary`` into ``out_dir``.

    Everything is rendered and validated first. Each file is then written to
    a temporary file beside its target, and the targets are only replaced
    once every write has succeeded, so a failed emission leaves files from an
    earlier run untouched.
    """
    files = render_outputs(summary)
    staged = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        for name in sorted(files):
            descriptor, temporary = tempfile.mkstemp(
                prefix=".%s." % name, suffix=".tmp", dir=out_dir
            )
            os.close(descriptor)
            staged.append((temporary, os.path.join(out_dir, name)))
            with open(temporary, "w", newline="") as handle:
                handle.write(files[name])
    except OSError as exc:
        for temporary, _ in staged:
            try:
                os.remove(temporary)
            except OSError:
                pass
        raise EmissionError("Can not write results to '%s': %s" % (out_dir, exc))

    written = []
    for temporary, path in staged:
        os.replace(temporary, path)
        written.append(path)

    log.info("Wrote %d files to '%s'.", len(written), out_dir)
    return written


__all__ = [
    "FuserSummary",
    "RunSummary",
    "SplitResult",
    "emit_outputs",
    "render_outputs",
    "run_experiment",
    "simulate_trial",
    "simulate_trials",
    "train_fuser",
]
