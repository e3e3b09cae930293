"""scikit-learn style estimator wrapping the multiplier fit.

Rows of ``X`` are components (the "samples"), columns are stress levels.
``fit`` estimates the two multipliers for the configured targets;
``transform`` maps stress profiles to failure profiles with the fitted
multipliers; ``predict`` gives each component's stress-weighted failure
probability.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .checks import check_stress_matrix, check_unit_losses
from .maxent import check_validity, failure_matrix
from .model import MultiplierPair, validate_scenario
from .optimizer import OptimizerOptions, estimate_multipliers, objective_terms_batch


class MaxEntFailureEstimator(TransformerMixin, BaseEstimator):
    """Maximum-entropy failure probabilities for a series network.

    Parameters
    ----------
    unit_losses : array-like of shape (n_components,)
        Per-failure loss of each component, each >= 1.
    pf_target : float
        Target network failure probability, in (0, 1).
    expected_loss : float
        Target total expected loss, > 0.
    component_names : list of str, optional
        Defaults to ``component_0``, ``component_1``, ...
    constraint_penalty, bound_penalty, constraint_margin, function_tolerance,
    max_iterations, lambda1_bounds, lambda2_bounds, initial_guess
        Passed through to :class:`~entroprel.optimizer.OptimizerOptions`.
        ``initial_guess`` is a ``(lambda1, lambda2)`` pair or None.

    Attributes
    ----------
    multipliers_ : MultiplierPair
    lambda1_, lambda2_ : float
    failure_matrix_ : ndarray of shape (n_components, n_levels)
    validity_ : ValidityReport
    run_ : OptimizerRun
    scenario_ : Scenario
    n_features_in_ : int
        Number of stress levels seen in ``fit``.
    """

    def __init__(self, unit_losses=None, pf_target=None, expected_loss=None, component_names=None,
                 constraint_penalty=1e6, bound_penalty=1e4, constraint_margin=1e-3,
                 function_tolerance=1e-3, max_iterations=100,
                 lambda1_bounds=(-math.inf, -0.5), lambda2_bounds=(0.1, math.inf), initial_guess=None):
        self.unit_losses = unit_losses
        self.pf_target = pf_target
        self.expected_loss = expected_loss
        self.component_names = component_names
        self.constraint_penalty = constraint_penalty
        self.bound_penalty = bound_penalty
        self.constraint_margin = constraint_margin
        self.function_tolerance = function_tolerance
        self.max_iterations = max_iterations
        self.lambda1_bounds = lambda1_bounds
        self.lambda2_bounds = lambda2_bounds
        self.initial_guess = initial_guess

    def _options(self):
        guess = None if self.initial_guess is None else MultiplierPair(*map(float, self.initial_guess))
        return OptimizerOptions(
            lambda1_bounds=tuple(self.lambda1_bounds),
            lambda2_bounds=tuple(self.lambda2_bounds),
            constraint_penalty=self.constraint_penalty,
            bound_penalty=self.bound_penalty,
            constraint_margin=self.constraint_margin,
            function_tolerance=self.function_tolerance,
            max_iterations=self.max_iterations,
            initial_guess=guess,
        )

    def _scenario(self, X):
        if self.unit_losses is None or self.pf_target is None or self.expected_loss is None:
            raise ValueError("unit_losses, pf_target and expected_loss must all be set")
        X = check_stress_matrix(X)
        ul = check_unit_losses(self.unit_losses, X.shape[0])
        names = self.component_names or [f"component_{i}" for i in range(X.shape[0])]
        return validate_scenario({
            "components": [{"name": n, "unit_loss": u} for n, u in zip(names, ul)],
            "stress_matrix": X,
            "pf_target": self.pf_target,
            "loss_target": self.expected_loss,
        })

    def fit(self, X, y=None):
        scenario = self._scenario(X)
        run = estimate_multipliers(scenario, self._options())
        self.scenario_ = scenario
        self.run_ = run
        self.multipliers_ = run.final_multipliers
        self.lambda1_ = run.final_multipliers.lambda1
        self.lambda2_ = run.final_multipliers.lambda2
        self.failure_matrix_ = np.array(failure_matrix(scenario, run.final_multipliers).entries)
        self.validity_ = check_validity(scenario, run.final_multipliers)
        self.n_features_in_ = scenario.n_levels
        return self

    def transform(self, X):
        """Failure probabilities for each row of ``X`` under the fitted multipliers."""
        check_is_fitted(self, "multipliers_")
        X = check_stress_matrix(X, n_components=self.scenario_.n_components)
        slope = self.lambda1_ + self.lambda2_ * self.scenario_.unit_losses
        return np.exp(-1.0 - X * slope[:, None])

    def predict(self, X):
        """Stress-weighted failure probability ``sum_j p_ij pF_ij`` per component."""
        check_is_fitted(self, "multipliers_")
        X = check_stress_matrix(X, n_components=self.scenario_.n_components)
        return np.sum(X * self.transform(X), axis=1)

    def score(self, X, y=None):
        """Negative objective of the fitted multipliers on ``X`` (higher is better)."""
        check_is_fitted(self, "multipliers_")
        scenario = self._scenario(X)
        value = objective_terms_batch(self.lambda1_, self.lambda2_, scenario, self._options())[0]
        return -float(value)
