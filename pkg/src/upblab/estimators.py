"""scikit-learn style wrappers.

These let the seesaw, the UPB witness and the partial transpose sit in
pipelines and parameter searches: hyperparameters go in ``__init__``,
learned quantities end in an underscore, ``get_params``/``set_params`` come
from :class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bestate import witness_gamma
from .linalg import partial_transpose, resolve_tol
from .seesaw import max_product_overlap
from .states import ProductBasisSet
from .validation import check_density_batch, check_dims, check_operator


class ProductOverlapSeesaw(BaseEstimator):
    """Maximize a Hermitian operator's expectation over product states.

    ``fit(P, dims)`` stores ``max_overlap_`` (a lower bound on the true
    maximum) and the maximizing local vectors in ``argmax_``.
    """

    def __init__(self, restarts=64, seed=1, max_sweeps=500, conv_tol=1e-12, real=False):
        self.restarts = restarts
        self.seed = seed
        self.max_sweeps = max_sweeps
        self.conv_tol = conv_tol
        self.real = real

    def fit(self, P, dims):
        dims = check_dims(dims)
        P = check_operator(P, dims, hermitian=True, tol=1e-10)
        res = max_product_overlap(P, dims, self.restarts, self.seed, self.max_sweeps, self.conv_tol, self.real)
        self.dims_ = dims
        self.max_overlap_ = res.value
        self.argmax_ = res.locals
        self.restart_values_ = np.array(res.restart_values)
        return self

    def score(self, P, dims=None):
        check_is_fitted(self, "argmax_")
        v = np.array([1.0 + 0j])
        for a in self.argmax_:
            v = np.kron(v, a)
        P = check_operator(P, self.dims_)
        return float(np.real(v.conj() @ P @ v))


class UPBWitness(BaseEstimator):
    """Entanglement witness Pi - gamma * I built from a UPB.

    ``fit`` takes the product set, ``decision_function`` returns
    Tr[W rho] per input state and ``predict`` flags the detected ones.
    """

    def __init__(self, restarts=64, seed=1, tol=None):
        self.restarts = restarts
        self.seed = seed
        self.tol = tol

    def fit(self, upb: ProductBasisSet, y=None):
        if not isinstance(upb, ProductBasisSet):
            raise TypeError("UPBWitness.fit expects a ProductBasisSet")
        self.dims_ = upb.dims
        self.projector_ = upb.projector()
        self.gamma_ = witness_gamma(upb, self.restarts, self.seed)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "gamma_")
        batch = check_density_batch(X, self.dims_)
        return np.real(np.einsum("ij,nji->n", self.projector_, batch)) - self.gamma_

    def predict(self, X):
        return self.decision_function(X) < -resolve_tol(self.tol)


class PartialTranspose(TransformerMixin, BaseEstimator):
    """Stateless transformer: partial transpose of each matrix in a batch."""

    def __init__(self, dims=(2, 2), parties=(1,)):
        self.dims = dims
        self.parties = parties

    def fit(self, X=None, y=None):
        self.dims_ = check_dims(self.dims)
        return self

    def transform(self, X):
        check_is_fitted(self, "dims_")
        batch = check_density_batch(X, self.dims_)
        return np.stack([partial_transpose(M, self.dims_, self.parties) for M in batch])
