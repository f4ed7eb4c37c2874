"""scikit-learn style facade around the construction and the Newton loop.

There is no data to learn from; ``fit`` takes no samples and solves for the
surface determined by the hyperparameters.  The facade exists so the solver
plugs into tooling that expects ``get_params``/``set_params`` and fitted
attributes with a trailing underscore.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .driver import Tolerances, embeddedness_check, run_newton
from .initsurf import derive_params


class CliffordDoubling(BaseEstimator):
    """Solve for a doubled Clifford torus with m^2 bridges.

    Fitted attributes: ``params_``, ``state_`` (the final SolveState),
    ``surface_`` (the perturbed mesh) and ``embeddedness_``.
    """

    def __init__(self, m: int = 6, zeta: float = 0.0, gamma: float = 0.5, n_theta: int = 64,
                 b: float | None = None, c_bar: float = 10.0, tol_H: float = 1e-8,
                 tol_F: float = 1e-12, max_iter: int = 10, inner_steps: int = 3):
        self.m = m
        self.zeta = zeta
        self.gamma = gamma
        self.n_theta = n_theta
        self.b = b
        self.c_bar = c_bar
        self.tol_H = tol_H
        self.tol_F = tol_F
        self.max_iter = max_iter
        self.inner_steps = inner_steps

    def fit(self, X=None, y=None):
        self.params_ = derive_params(self.m, self.zeta, self.b, self.gamma, self.n_theta,
                                     c_bar=self.c_bar)
        tol = Tolerances(tol_H=self.tol_H, tol_F=self.tol_F, max_iter=self.max_iter,
                         inner_steps=self.inner_steps)
        self.state_ = run_newton(self.params_, tol)
        self.surface_ = self.state_.perturbed if self.state_.perturbed is not None else self.state_.mesh
        self.embeddedness_ = embeddedness_check(self.surface_)
        return self

    def score(self, X=None, y=None) -> float:
        """Base-10 log of the residual reduction achieved by the fit."""
        import math

        check_is_fitted(self, "state_")
        return math.log10(self.state_.reduction)

    def report(self) -> dict:
        check_is_fitted(self, "state_")
        return {"params": self.params_.to_dict(), "state": self.state_.to_dict(),
                "embeddedness": self.embeddedness_.to_dict()}


__all__ = ["CliffordDoubling"]
