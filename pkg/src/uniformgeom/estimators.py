"""scikit-learn style wrappers around the chain machinery.

All estimators accept either a precomputed distance matrix
(``metric="precomputed"``, the default) or a point array with
``metric`` in ``{"euclidean", "l1", "linf"}``, or a ready
:class:`~uniformgeom.metric_core.FiniteMetricSpace`.

The transformers describe the fitted carrier itself, so ``transform`` only
accepts the data passed to ``fit``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bornology import scale_profile
from .chain_graph import INF, build_chain_graph
from .exceptions import DomainError, StructuralInputError
from .metric_builders import adversarial_labeling, build_labeling, build_rho
from .metric_core import FiniteMetricSpace, TOL

METRICS = ("precomputed", "euclidean", "l1", "linf")


def check_space(X, metric: str = "precomputed") -> FiniteMetricSpace:
    """Turn estimator input into a validated :class:`FiniteMetricSpace`."""
    if isinstance(X, FiniteMetricSpace):
        return X
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    arr = check_array(X, dtype=float, ensure_2d=True)
    if metric == "precomputed":
        if arr.shape[0] != arr.shape[1]:
            raise StructuralInputError(f"precomputed distances must be square, got {arr.shape}")
        return FiniteMetricSpace.from_matrix(arr)
    return FiniteMetricSpace.from_points(arr, metric=metric)


def check_eps(eps) -> float:
    if isinstance(eps, bool) or not isinstance(eps, (int, float, np.integer, np.floating)):
        raise DomainError(f"eps must be a real number, got {eps!r}")
    if not np.isfinite(eps) or eps <= 0:
        raise DomainError(f"eps must be positive and finite, got {eps}")
    return float(eps)


class _FittedCarrier:
    def _check_same_data(self, X):
        check_is_fitted(self, "space_")
        if X is None or X is self.space_:
            return
        n = X.n if isinstance(X, FiniteMetricSpace) else check_array(X, dtype=float).shape[0]
        if n != self.space_.n:
            raise StructuralInputError(
                f"{type(self).__name__} describes the fitted carrier of {self.space_.n} points; got {n}"
            )


class EpsilonChainComponents(ClusterMixin, BaseEstimator):
    """Cluster points into eps-chainable components (single linkage cut below eps).

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Component index of each point; components are numbered by their
        smallest member.
    representatives_ : ndarray of shape (n_components_,)
        Smallest point index in each component.
    n_components_ : int
    graph_ : ChainGraph
    """

    def __init__(self, eps=0.5, metric="precomputed"):
        self.eps = eps
        self.metric = metric

    def fit(self, X, y=None):
        space = check_space(X, self.metric)
        self.graph_ = build_chain_graph(space, check_eps(self.eps))
        self.space_ = space
        self.labels_ = np.array(self.graph_.component_id)
        self.representatives_ = np.asarray(self.graph_.representatives)
        self.n_components_ = self.graph_.component_count
        return self


class ChainDistance(_FittedCarrier, TransformerMixin, BaseEstimator):
    """All-pairs eps-chain distances; ``inf`` between different components."""

    def __init__(self, eps=0.5, metric="precomputed"):
        self.eps = eps
        self.metric = metric

    def fit(self, X, y=None):
        self.space_ = check_space(X, self.metric)
        self.graph_ = build_chain_graph(self.space_, check_eps(self.eps))
        return self

    def transform(self, X=None):
        self._check_same_data(X)
        return np.array(self.graph_.chain_distance_matrix)

    def hop_counts(self):
        check_is_fitted(self, "graph_")
        return np.array(self.graph_.hop_matrix)


class RhoMetricTransformer(_FittedCarrier, TransformerMixin, BaseEstimator):
    """Distance matrix of the label-padded chain metric at scale ``eps``.

    Parameters
    ----------
    eps : float
    labels : None, "adversarial", or sequence of positive ints
        One label per component. ``None`` labels every component 1;
        ``"adversarial"`` numbers components 1, 2, ... in index order.
    representatives : None or sequence of int
        One point per component; defaults to each component's smallest index.
    metric : str
    """

    def __init__(self, eps=0.5, labels=None, representatives=None, metric="precomputed"):
        self.eps = eps
        self.labels = labels
        self.representatives = representatives
        self.metric = metric

    def fit(self, X, y=None):
        space = check_space(X, self.metric)
        graph = build_chain_graph(space, check_eps(self.eps))
        if self.labels is None:
            labeling = build_labeling(graph, [1] * graph.component_count)
        elif isinstance(self.labels, str) and self.labels == "adversarial":
            labeling = adversarial_labeling(graph, range(space.n))
        else:
            labeling = build_labeling(graph, list(self.labels))
        self.space_ = space
        self.graph_ = graph
        self.rho_ = build_rho(space, graph, labeling, self.representatives)
        self.n_components_ = graph.component_count
        return self

    def transform(self, X=None):
        self._check_same_data(X)
        return self.rho_.matrix()

    def locally_identical(self, tol=TOL):
        """True when the padded metric agrees with ``d`` on every pair below scale."""
        from .metric_builders import check_locally_identical

        check_is_fitted(self, "rho_")
        return not check_locally_identical(self.space_, self.rho_, self.rho_.eps, tol)


class CoverProfiler(BaseEstimator):
    """Greedy (or exact) cover sizes over an ``(eps, m)`` grid for one subset."""

    def __init__(self, eps_grid=(0.5,), m_grid=(1, 2, INF), method="greedy", metric="precomputed"):
        self.eps_grid = eps_grid
        self.m_grid = m_grid
        self.method = method
        self.metric = metric

    def fit(self, X, y=None, subset=None):
        space = check_space(X, self.metric)
        B = range(space.n) if subset is None else subset
        self.space_ = space
        self.profile_ = scale_profile(space, B, list(self.eps_grid), list(self.m_grid), method=self.method)
        return self

    def sizes(self):
        """Array of shape (len(eps_grid), len(m values)) with the cover sizes."""
        check_is_fitted(self, "profile_")
        return np.array([[e.size for e in row.entries] for row in self.profile_.grid])
