"""
Joint training of a band selector and the downstream classifier.

A run is strictly sequential and fully determined by the configuration seed:
every random draw comes from a named substream of one root ``Rng``.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..core.base_classes import BaseComponent, BaseSelector
from ..core.exceptions import DatasetError, TrainingError
from ..core.numerics import clamp01
from ..core.rng import Rng
from ..data.dataset import Dataset, Standardizer, variance_rank
from ..evaluation.metrics import ConfusionMatrix, metric_table, overall_accuracy
from ..network.classifier import Classifier
from ..network.loss import LossSpec, batch_weighted_cross_entropy
from ..network.optimizers import build_optimizer
from ..selection.band_selection import BandSelection
from ..selection.baselines import FixedSelector, all_bands, random_k, variance_k
from ..selection.concrete import ConcreteLayer
from ..selection.gates import GateLayer, lambda_for_k
from .config import TrainConfig

# substream ids under the run root
STREAM_SPLIT = 0
STREAM_SELECTOR_INIT = 1
STREAM_CLASSIFIER_INIT = 2
STREAM_SHUFFLE = 3
STREAM_NOISE = 4
STREAM_BASELINE = 5


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    val_oa: float
    selection: BandSelection
    phase: int = 1


@dataclass(frozen=True)
class CollapseEvent:
    """Selector rows agreeing on a band, leaving fewer than k distinct bands."""

    epoch: int
    distinct: int
    picks: Tuple[int, ...]


@dataclass
class TrainReport:
    epochs: List[EpochRecord] = field(default_factory=list)
    selection: Optional[BandSelection] = None
    collapse_events: List[CollapseEvent] = field(default_factory=list)
    loss_increase_epochs: List[int] = field(default_factory=list)
    final_tau: Optional[float] = None
    batches_per_epoch: int = 0
    selector_parameters: int = 0
    classifier_parameters: int = 0

    @property
    def trajectory(self) -> List[BandSelection]:
        return [record.selection for record in self.epochs]

    @property
    def losses(self) -> List[float]:
        return [record.loss for record in self.epochs]

    @property
    def collapsed(self) -> bool:
        return bool(self.collapse_events)


@dataclass
class Pipeline:
    """Inference path: optional standardization, selector, classifier."""

    selector: BaseSelector
    classifier: Classifier
    standardizer: Optional[Standardizer] = None

    def prepare(self, spectra: np.ndarray) -> np.ndarray:
        spectra = np.asarray(spectra, dtype=np.float64)
        return self.standardizer.transform(spectra) if self.standardizer else spectra

    def predict(self, spectra: np.ndarray) -> np.ndarray:
        return self.classifier.predict(self.selector.forward_infer(self.prepare(spectra)))

    def confusion(self, data: Dataset) -> ConfusionMatrix:
        return ConfusionMatrix.from_predictions(data.labels, self.predict(data.spectra), data.n_classes)

    def evaluate(self, data: Dataset) -> Dict[str, float]:
        return metric_table(self.confusion(data))


@dataclass
class TrainResult:
    classifier: Classifier
    selection: BandSelection
    report: TrainReport
    pipeline: Pipeline

    def __iter__(self) -> Iterator:
        return iter((self.classifier, self.selection, self.report))


class Trainer(BaseComponent):
    """Runs one configured training job on a dataset."""

    def __init__(self, config: TrainConfig, rng: Optional[Rng] = None):
        super().__init__("Trainer")
        self.train_config = config
        self.rng = rng or Rng(config.seed)

    def _split(self, data: Dataset) -> Tuple[Dataset, Dataset]:
        fraction = self.train_config.validation_fraction
        if fraction == 0.0 or data.n_samples < 2:
            return data, data
        n_val = min(data.n_samples - 1, max(1, int(round(fraction * data.n_samples))))
        order = self.rng.substream(STREAM_SPLIT).permutation(data.n_samples)
        return data.subset(order[n_val:]), data.subset(order[:n_val])

    def _build_selector(self, train: Dataset) -> BaseSelector:
        cfg = self.train_config
        n = train.n_bands
        if cfg.method == 'chbs':
            return ConcreteLayer(
                n, cfg.k, tau0=cfg.tau0, alpha=cfg.alpha, beta=cfg.beta, init=cfg.init,
                rng=self.rng.substream(STREAM_SELECTOR_INIT), prior_bands=cfg.prior_bands,
            )
        if cfg.method == 'ehbs':
            return GateLayer(n, sigma=cfg.sigma, reg_lambda=lambda_for_k(cfg.lambda0, n, cfg.k), mu0=cfg.mu0, k=cfg.k)
        if cfg.method == 'all-bands':
            return FixedSelector(n, all_bands(n))
        if cfg.method == 'random-k':
            return FixedSelector(n, random_k(n, cfg.k, self.rng.substream(STREAM_BASELINE)))
        # variance-k ranks raw training spectra
        if train.n_samples < 2:
            raise DatasetError("variance-k needs at least 2 training samples")
        return FixedSelector(n, variance_k(variance_rank(train), cfg.k))

    def _run_epoch(
        self,
        epoch: int,
        selector: BaseSelector,
        classifier: Classifier,
        optimizer,
        spectra: np.ndarray,
        labels: np.ndarray,
        loss_spec: LossSpec,
    ) -> float:
        """One pass over the shuffled training set; returns the sample-mean batch loss."""
        batch_size = self.train_config.batch_size
        order = self.rng.substream(STREAM_SHUFFLE, epoch).permutation(spectra.shape[0])
        noise = self.rng.substream(STREAM_NOISE, epoch)
        total = 0.0
        for start in range(0, order.size, batch_size):
            idx = order[start:start + batch_size]
            x, y = spectra[idx], labels[idx]

            selected, record = selector.forward_train(x, noise)
            logits, cache = classifier.forward(selected)
            loss, grad_logits = batch_weighted_cross_entropy(logits, y, loss_spec)
            loss += selector.regularizer()
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch starting at {start}")

            net_grads, grad_selected = classifier.backward(cache, grad_logits)
            selector_grads = selector.backward(record, x, grad_selected)

            params = classifier.parameters()
            grads = dict(net_grads)
            for name, value in selector.parameters().items():
                params[f'selector.{name}'] = value
                grads[f'selector.{name}'] = selector_grads[name]
            optimizer.step(params, grads)
            selector.on_batch_end()
            total += loss * idx.size
        return total / order.size

    def _finalize_gates(self, gates: GateLayer, classifier: Classifier) -> Tuple[FixedSelector, Classifier]:
        """Freeze the top-k gates and carry the first layer over, scaled by the clamped gate means."""
        selection = gates.select_top_k(self.train_config.k)
        idx = np.asarray(selection.indices)
        first = classifier.weights[0][:, idx] * clamp01(gates.mu[idx])
        rebuilt = Classifier.from_arrays([first, *classifier.weights[1:]], classifier.biases)
        return FixedSelector(gates.n_bands, selection), rebuilt

    def fit(self, data: Dataset) -> TrainResult:
        cfg = self.train_config.validate(data.n_bands, data.n_classes)
        train, val = self._split(data)

        standardizer = Standardizer().fit(train.spectra) if cfg.standardize else None
        spectra = standardizer.transform(train.spectra) if standardizer else train.spectra
        labels = train.labels
        loss_spec = (LossSpec.inverse_frequency(labels, data.n_classes) if cfg.weighted_loss
                     else LossSpec.uniform(data.n_classes))

        selector = self._build_selector(train)
        classifier = Classifier(selector.output_width, data.n_classes, cfg.hidden,
                                rng=self.rng.substream(STREAM_CLASSIFIER_INIT))
        optimizer = build_optimizer(cfg.optimizer, cfg.learning_rate)
        report = TrainReport(
            batches_per_epoch=-(-train.n_samples // cfg.batch_size),
            selector_parameters=selector.parameter_count,
            classifier_parameters=classifier.parameter_count,
        )
        self.logger.info(
            "training_start",
            method=cfg.method,
            k=cfg.k,
            epochs=cfg.epochs,
            train_samples=train.n_samples,
            selector_parameters=report.selector_parameters,
            classifier_parameters=report.classifier_parameters,
            seed=cfg.seed,
        )

        two_phase = cfg.method == 'ehbs'
        phase1_epochs, _ = cfg.phase_split()
        phase = 1
        for epoch in range(cfg.epochs):
            if two_phase and phase == 1 and epoch == phase1_epochs:
                selector, classifier = self._finalize_gates(selector, classifier)
                optimizer.reset()
                phase = 2
                self.logger.info("phase_boundary", epoch=epoch, selection=selector.selection.as_list())

            loss = self._run_epoch(epoch, selector, classifier, optimizer, spectra, labels, loss_spec)
            pipeline = Pipeline(selector, classifier, standardizer)
            val_oa = overall_accuracy(pipeline.confusion(val))
            selection = selector.current_selection()

            if report.epochs and report.epochs[-1].phase == phase and loss > report.epochs[-1].loss:
                report.loss_increase_epochs.append(epoch)
                self.logger.info("loss_increase_flagged", epoch=epoch, loss=loss,
                                 previous=report.epochs[-1].loss)
            if isinstance(selector, ConcreteLayer):
                picks = selector.selected_bands()
                if picks.has_duplicates:
                    report.collapse_events.append(
                        CollapseEvent(epoch, picks.distinct_count, tuple(int(p) for p in picks.picks))
                    )
                    self.logger.warning("collapse_detected", epoch=epoch, distinct=picks.distinct_count, k=cfg.k)

            report.epochs.append(EpochRecord(epoch, float(loss), val_oa, selection, phase))
            self.logger.info("epoch_complete", epoch=epoch, loss=loss, val_oa=val_oa,
                              selection=selection.as_list())

        if two_phase and phase == 1:
            selector, classifier = self._finalize_gates(selector, classifier)
            self.logger.info("phase_boundary", epoch=cfg.epochs, selection=selector.selection.as_list())

        if isinstance(selector, ConcreteLayer):
            report.final_tau = selector.tau
        report.selection = selector.current_selection()
        self.logger.info("training_complete", method=cfg.method, selection=report.selection.as_list())
        return TrainResult(classifier, report.selection, report, Pipeline(selector, classifier, standardizer))


def train(config: TrainConfig, data: Dataset, rng: Optional[Rng] = None) -> TrainResult:
    """Train ``config`` on ``data``; the result unpacks as (classifier, selection, report)."""
    return Trainer(config, rng).fit(data)
