"""Leave-one-out cross-validation of the three classification methods."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from . import dtw, hmm
from .clean import CleanVariant, track_targets
from .core import Dataset, StateLabel, ValidationError
from .features import DECIMATION, ENVELOPE_WINDOW, extract_feature
from .synth import PulseTemplate, default_template


class Method(enum.Enum):
    CleanConventionalDtw = "clean-conv"
    CleanShortTemplateDtw = "clean-short"
    ProposedGmmHmm = "proposed"

    @property
    def title(self):
        return METHOD_TITLES[self]

    @classmethod
    def from_cli(cls, name):
        for m in cls:
            if m.value == name or m.name == name:
                return m
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(m.value for m in cls)}")


METHOD_TITLES = {
    Method.CleanConventionalDtw: "Conventional CLEAN + MD-DTW",
    Method.CleanShortTemplateDtw: "Short-template CLEAN + MD-DTW",
    Method.ProposedGmmHmm: "RMS envelope + GMM-HMM",
}


@dataclass
class Fold:
    id: str
    true: StateLabel
    pred: StateLabel


@dataclass
class MethodResult:
    method: Method
    folds: list = field(default_factory=list)

    @property
    def correct(self):
        return sum(f.true == f.pred for f in self.folds)

    @property
    def accuracy_percent(self):
        return 100.0 * self.correct / len(self.folds)

    def to_dict(self):
        return {
            "name": self.method.name,
            "folds": [{"id": f.id, "true": f.true.value, "pred": f.pred.value} for f in self.folds],
            "accuracy_percent": self.accuracy_percent,
        }


@dataclass
class EvalReport:
    methods: list = field(default_factory=list)
    participant: str = ""

    def to_dict(self):
        return {"participant": self.participant, "methods": [m.to_dict() for m in self.methods]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def accuracies(self):
        return {m.method: m.accuracy_percent for m in self.methods}

    def render(self):
        return render_table({self.participant or "P": self.accuracies()})


@dataclass(frozen=True)
class EvalOptions:
    template: PulseTemplate = field(default_factory=default_template)
    short_fraction: float = 0.25
    train: hmm.TrainConfig = field(default_factory=hmm.TrainConfig)
    n_states: int = 5
    window: int = ENVELOPE_WINDOW
    decimation: int = DECIMATION

    def variant(self, method):
        return CleanVariant(1.0 if method is Method.CleanConventionalDtw else self.short_fraction)


def features_for(dataset: Dataset, method: Method, opts: EvalOptions = EvalOptions()):
    """Per-frame-set features for ``method``, in dataset order."""
    if method is Method.ProposedGmmHmm:
        return [extract_feature(fs, opts.window, opts.decimation) for fs in dataset]
    return [track_targets(fs, opts.template, opts.variant(method)) for fs in dataset]


def hmm_fold(train_seqs, train_labels, test_seq, opts):
    rest = [s for s, y in zip(train_seqs, train_labels) if y is StateLabel.REST]
    move = [s for s, y in zip(train_seqs, train_labels) if y is StateLabel.MOVE]
    models = hmm.train_models(rest, move, opts.train, opts.n_states)
    return hmm.classify(models, test_seq)


def dtw_fold(train_seqs, train_labels, test_seq, opts):
    mean, std = dtw.fit_zscore(train_seqs)
    train = [(dtw.apply_zscore(s, mean, std), y) for s, y in zip(train_seqs, train_labels)]
    return dtw.nn_classify(dtw.apply_zscore(test_seq, mean, std), train)


def run_folds(ids, seqs, labels, predict, opts=None):
    """Hold out each item in turn and predict it with ``predict(train_seqs, train_labels, test_seq, opts)``."""
    if len(seqs) < 2:
        raise ValidationError("leave-one-out needs at least 2 frame sets")
    folds = []
    for k, (fid, seq, label) in enumerate(zip(ids, seqs, labels)):
        train_seqs = seqs[:k] + seqs[k + 1:]
        train_labels = labels[:k] + labels[k + 1:]
        missing = set(StateLabel) - set(train_labels)
        if missing:
            names = ", ".join(sorted(m.value for m in missing))
            raise ValidationError(f"fold holding out {fid!r} has no training sets labeled {names}")
        folds.append(Fold(fid, label, predict(train_seqs, train_labels, seq, opts)))
    return folds


def loocv(dataset: Dataset, method: Method, opts: EvalOptions = EvalOptions()) -> MethodResult:
    seqs = features_for(dataset, method, opts)
    predict = hmm_fold if method is Method.ProposedGmmHmm else dtw_fold
    return MethodResult(method, run_folds(dataset.ids, seqs, dataset.labels, predict, opts))


def benchmark(dataset: Dataset, methods=None, opts: EvalOptions = EvalOptions()) -> EvalReport:
    """LOOCV for each requested method, in table order (baselines first)."""
    wanted = set(Method if methods is None else methods)
    report = EvalReport(participant=dataset.participant)
    for method in Method:
        if method in wanted:
            report.methods.append(loocv(dataset, method, opts))
    return report


def format_accuracy(value):
    return f"{value:.1f}"


def render_table(columns):
    """Aligned text table: one row per method, one column per participant.

    ``columns`` maps participant id to ``{Method: accuracy_percent}``.
    """
    names = list(columns)
    methods = [m for m in Method if any(m in col for col in columns.values())]
    label_w = max([len("Method")] + [len(m.title) for m in methods])
    widths = [max(len(n), 5) for n in names]
    lines = ["  ".join(["Method".ljust(label_w)] + [n.rjust(w) for n, w in zip(names, widths)])]
    lines.append("-" * len(lines[0]))
    for m in methods:
        cells = [
            (format_accuracy(columns[n][m]) if m in columns[n] else "-").rjust(w)
            for n, w in zip(names, widths)
        ]
        lines.append("  ".join([m.title.ljust(label_w)] + cells))
    return "\n".join(lines)
