"""scikit-learn style wrapper around the identification pipeline.

``X`` is a sequence of :class:`~xfcm.scenarios.Scenario`; ``y`` is the
(n_scenarios, 3) array of reported belief/goal/emotion realisations.  The
estimator clones cleanly (all constructor arguments are stored verbatim),
so it composes with model-selection utilities that rely on ``get_params``.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ValidationError
from .identification import (
    GridSpec,
    ModelPredictor,
    SurveyRecord,
    identify,
)
from .scenarios import DEFAULT_WEIGHTS, Scenario, get_variant


class CognitiveMapEstimator(BaseEstimator):
    """Fits one person's identified weights by deterministic grid search."""

    def __init__(
        self,
        variant: str = "M1",
        grid: Optional[GridSpec] = None,
        mode: str = "cyclic",
        levels: int = 9,
        max_sweeps: int = 3,
        horizon: int = 30,
        defaults=None,
    ):
        self.variant = variant
        self.grid = grid
        self.mode = mode
        self.levels = levels
        self.max_sweeps = max_sweeps
        self.horizon = horizon
        self.defaults = defaults

    # -- internals -----------------------------------------------------------

    def _resolved(self):
        variant = get_variant(self.variant)
        defaults = self.defaults if self.defaults is not None else DEFAULT_WEIGHTS
        grid = self.grid or GridSpec.default(
            variant, levels=self.levels, mode=self.mode, max_sweeps=self.max_sweeps
        )
        return variant, defaults, grid

    @staticmethod
    def _check_X_y(X: Sequence[Scenario], y) -> tuple[list[Scenario], np.ndarray]:
        scenarios = list(X)
        if not all(isinstance(sc, Scenario) for sc in scenarios):
            raise ValidationError("X must be a sequence of Scenario objects")
        y = np.asarray(y, dtype=float)
        if y.shape != (len(scenarios), 3):
            raise ValidationError(
                f"y must have shape ({len(scenarios)}, 3) for "
                f"(belief, goal, emotion), got {y.shape}"
            )
        if y.size and (np.abs(y) > 1.0).any():
            raise ValidationError("responses must lie in [-1, 1]")
        return scenarios, y

    # -- estimator API ---------------------------------------------------------

    def fit(self, X: Sequence[Scenario], y) -> "CognitiveMapEstimator":
        variant, defaults, grid = self._resolved()
        scenarios, y = self._check_X_y(X, y)
        records = [
            SurveyRecord("_fit", sc.scenario_id, *row)
            for sc, row in zip(scenarios, y)
        ]
        predictor = ModelPredictor(variant, scenarios, defaults, self.horizon)
        self.weights_ = identify(
            variant, records, scenarios, grid, defaults, self.horizon, predictor
        )
        self.loss_ = float(
            ((predictor.outputs(self.weights_) - y) ** 2).sum()
        )
        return self

    def predict(self, X: Sequence[Scenario]) -> np.ndarray:
        if not hasattr(self, "weights_"):
            raise ValidationError("estimator is not fitted; call fit first")
        variant, defaults, _ = self._resolved()
        scenarios, _ = self._check_X_y(X, np.zeros((len(list(X)), 3)))
        return ModelPredictor(variant, scenarios, defaults, self.horizon).outputs(
            self.weights_
        ).copy()

    def score(self, X: Sequence[Scenario], y) -> float:
        """Negative mean squared error (higher is better)."""
        scenarios, y = self._check_X_y(X, y)
        pred = self.predict(scenarios)
        return float(-np.mean((pred - y) ** 2))
