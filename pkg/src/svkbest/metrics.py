"""Per-model evaluation: hinge loss, misclassification, demographic parity.

Hinge loss is evaluated on the pre-sign decision value; demographic parity
uses empirical positive-prediction rates over the two sensitive groups of
the test set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, sensitive_values
from .enumeration import EnumeratedModel
from .errors import MetricError
from .solver import DualSolution, decision_values, predict_many


@dataclass(frozen=True)
class ModelMetrics:
    train_objective: float
    objective_ratio: float
    test_hinge_mean: float | None = None
    misclassification_ratio: float | None = None
    demographic_parity: float | None = None
    test_loss_ratio: float | None = None  # None when the rank-1 loss is 0

    def to_json_dict(self) -> dict:
        return {
            "objective_ratio": self.objective_ratio,
            "test_hinge": self.test_hinge_mean,
            "misclass": self.misclassification_ratio,
            "dp": self.demographic_parity,
            "test_loss_ratio": self.test_loss_ratio,
        }


def hinge_loss(y: int, yhat: float) -> float:
    """max(0, 1 - y * yhat) for a single prediction."""
    if y not in (-1, 1):
        raise MetricError(f"label must be -1 or +1, got {y}")
    return max(0.0, 1.0 - y * yhat)


def mean_hinge(sol: DualSolution, ds_train: Dataset, ds_test: Dataset) -> float:
    if ds_test.n == 0:
        raise MetricError("empty test set")
    dv = decision_values(sol, ds_train, ds_test.X)
    return float(np.mean(np.maximum(0.0, 1.0 - ds_test.y * dv)))


def misclassification(sol: DualSolution, ds_train: Dataset, ds_test: Dataset) -> float:
    """Fraction of test rows whose predicted label differs from the truth."""
    if ds_test.n == 0:
        raise MetricError("empty test set")
    preds = predict_many(sol, ds_train, ds_test.X)
    return float(np.mean(preds != ds_test.y))


def demographic_parity_of_predictions(preds: np.ndarray, z: np.ndarray) -> float:
    """|P(pred=+1 | z=+1) - P(pred=+1 | z=-1)| from explicit arrays."""
    z = np.asarray(z)
    pos_group = z == 1
    neg_group = z == -1
    if not pos_group.any() or not neg_group.any():
        raise MetricError("a sensitive group is empty on the test set")
    rate_pos = float(np.mean(preds[pos_group] == 1))
    rate_neg = float(np.mean(preds[neg_group] == 1))
    return abs(rate_pos - rate_neg)


def demographic_parity(sol: DualSolution, ds_train: Dataset, ds_test: Dataset,
                       z_column: str) -> float:
    preds = predict_many(sol, ds_train, ds_test.X)
    return demographic_parity_of_predictions(preds, sensitive_values(ds_test, z_column))


def evaluate_one(ds_train: Dataset, sol: DualSolution, f1: float,
                 ds_test: Dataset | None = None,
                 z_values: np.ndarray | None = None,
                 h1: float | None = None) -> ModelMetrics:
    """Metrics of one model against the rank-1 baselines f1 and h1."""
    ratio = 1.0 if f1 == 0.0 else sol.objective / f1
    if ds_test is None:
        return ModelMetrics(train_objective=sol.objective, objective_ratio=ratio)
    hinge = mean_hinge(sol, ds_train, ds_test)
    miss = misclassification(sol, ds_train, ds_test)
    dp = None
    if z_values is not None:
        preds = predict_many(sol, ds_train, ds_test.X)
        dp = demographic_parity_of_predictions(preds, z_values)
    base = hinge if h1 is None else h1
    loss_ratio = None if base == 0.0 else hinge / base
    return ModelMetrics(
        train_objective=sol.objective,
        objective_ratio=ratio,
        test_hinge_mean=hinge,
        misclassification_ratio=miss,
        demographic_parity=dp,
        test_loss_ratio=loss_ratio,
    )


def series(ds_train: Dataset, models: list[EnumeratedModel],
           ds_test: Dataset | None = None, z_column: str | None = None,
           z_values: np.ndarray | None = None) -> list[ModelMetrics]:
    """Metrics for a rank-ordered model list, ratios taken against rank 1."""
    if not models:
        raise MetricError("empty model list")
    if models[0].rank != 1:
        raise MetricError("model list must start at rank 1")
    if z_values is None and z_column is not None:
        if ds_test is None:
            raise MetricError("z_column given without a test set")
        z_values = sensitive_values(ds_test, z_column)
    f1 = models[0].solution.objective
    h1 = None
    if ds_test is not None:
        h1 = mean_hinge(models[0].solution, ds_train, ds_test)
    return [
        evaluate_one(ds_train, m.solution, f1, ds_test, z_values, h1)
        for m in models
    ]
