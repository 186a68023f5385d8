"""Regularized data-misfit functional and its gradient."""

from __future__ import annotations

import numpy as np

from .forward import SparseOperator
from .geometry import Grid3
from .phantom import Field
from .tv import _check_beta, tv_value_and_gradient

PENALTIES = ("tv", "quadratic")


class Objective:
    """F(phi) = 0.5*||T phi - data||^2 + alpha * penalty(phi).

    penalty 'tv' is the smoothed total variation with parameter beta;
    'quadratic' is 0.5*||phi - anchor||^2 (anchor defaults to zero).
    Every eval() increments the evaluation counter.
    """

    def __init__(
        self,
        operator: SparseOperator,
        data: np.ndarray,
        alpha: float,
        grid: Grid3,
        penalty: str = "tv",
        beta: float = 1e-2,
        anchor: np.ndarray | None = None,
    ):
        data = np.asarray(data, dtype=float)
        if data.shape != (operator.n_rows,):
            raise ValueError(
                f"data length {data.shape} does not match operator rows {operator.n_rows}"
            )
        if grid.n_nodes != operator.n_cols:
            raise ValueError(
                f"grid has {grid.n_nodes} nodes but operator has {operator.n_cols} columns"
            )
        if not alpha > 0.0:
            raise ValueError(f"regularization weight must be positive, got {alpha}")
        if penalty not in PENALTIES:
            raise ValueError(f"unknown penalty {penalty!r}, expected one of {PENALTIES}")
        if penalty == "tv":
            beta = _check_beta(beta)
        if anchor is None:
            anchor = np.zeros(operator.n_cols)
        else:
            anchor = np.asarray(anchor, dtype=float)
            if anchor.shape != (operator.n_cols,):
                raise ValueError("anchor length does not match operator columns")
        self.operator = operator
        self.data = data
        self.alpha = float(alpha)
        self.grid = grid
        self.penalty = penalty
        self.beta = beta
        self.anchor = anchor
        self.evaluations = 0

    def eval(self, phi: np.ndarray):
        """Return (value, gradient) at phi; value and gradient share one pass."""
        phi = np.asarray(phi, dtype=float)
        residual = self.operator.apply(phi) - self.data
        if self.penalty == "tv":
            pen_value, pen_grad = tv_value_and_gradient(
                Field(grid=self.grid, values=phi), self.beta
            )
        else:
            diff = phi - self.anchor
            pen_value = 0.5 * float(diff @ diff)
            pen_grad = diff
        value = 0.5 * float(residual @ residual) + self.alpha * pen_value
        gradient = self.operator.apply_adjoint(residual) + self.alpha * pen_grad
        self.evaluations += 1
        return value, gradient

    def discrepancy(self, phi: np.ndarray) -> float:
        """||T phi - data||, monitored but never used as a stopping rule here."""
        phi = np.asarray(phi, dtype=float)
        return float(np.linalg.norm(self.operator.apply(phi) - self.data))
