"""Coefficient-of-variation screen as a scikit-learn transformer."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, validate_data


class CVScreen(SelectorMixin, TransformerMixin, BaseEstimator):
    """Drop near-constant columns: keep those with ``|100 * sd / mean| >= threshold``.

    Parameters
    ----------
    threshold : float, default=10.0
        Minimum coefficient of variation, in percent. ``0`` keeps every
        column with a non-zero mean.

    Attributes
    ----------
    cv_ : ndarray of shape (n_features,)
        Coefficient of variation of each column (sample standard deviation).
    """

    def __init__(self, threshold=10.0):
        self.threshold = threshold

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        mean = X.mean(axis=0)
        if np.any(mean == 0):
            bad = np.flatnonzero(mean == 0)
            names = getattr(self, "feature_names_in_", None)
            label = ", ".join(str(names[j]) if names is not None else f"column {j}" for j in bad)
            raise ValueError(f"coefficient of variation undefined (zero mean): {label}")
        sd = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
        self.cv_ = 100.0 * sd / mean
        return self

    def _get_support_mask(self):
        check_is_fitted(self)
        return ~(np.abs(self.cv_) < self.threshold)
