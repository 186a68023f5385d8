"""Smoothed total variation: value, gradient, and the lagged diffusion operator."""

from __future__ import annotations

import numpy as np

from .geometry import Grid3
from .phantom import Field

# numpy axis for each spatial axis in the (z, y, x) view
_AXIS = {"x": 2, "y": 1, "z": 0}


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"smoothing parameter must lie in (0, 1), got {beta}")
    return beta


def _spacing(grid: Grid3, axis: str) -> float:
    return {"x": grid.dx, "y": grid.dy, "z": grid.dz}[axis]


def _diff(arr: np.ndarray, spacing: float, np_axis: int) -> np.ndarray:
    """Central difference with replicate padding along one numpy axis."""
    a = np.moveaxis(arr, np_axis, 0)
    out = np.empty_like(a)
    # replicate padding: the ghost value equals the boundary value, so the
    # one-sided stencils keep the 1/(2*spacing) scale
    out[0] = (a[1] - a[0]) / (2.0 * spacing)
    out[-1] = (a[-1] - a[-2]) / (2.0 * spacing)
    if a.shape[0] > 2:
        out[1:-1] = (a[2:] - a[:-2]) / (2.0 * spacing)
    return np.moveaxis(out, 0, np_axis)


def _diff_adjoint(arr: np.ndarray, spacing: float, np_axis: int) -> np.ndarray:
    """Exact transpose of _diff on flat vectors."""
    v = np.moveaxis(arr, np_axis, 0)
    out = np.empty_like(v)
    out[0] = -(v[0] + v[1]) / (2.0 * spacing)
    out[-1] = (v[-2] + v[-1]) / (2.0 * spacing)
    if v.shape[0] > 2:
        out[1:-1] = (v[:-2] - v[2:]) / (2.0 * spacing)
    return np.moveaxis(out, 0, np_axis)


def diff_axis(field: Field, axis: str) -> Field:
    """Nodal derivative of the field along 'x', 'y' or 'z'."""
    if axis not in _AXIS:
        raise ValueError(f"unknown axis {axis!r}")
    arr = field.as_3d()
    out = _diff(arr, _spacing(field.grid, axis), _AXIS[axis])
    return Field(grid=field.grid, values=out.ravel())


def _grad_squared(arr: np.ndarray, grid: Grid3) -> np.ndarray:
    g2 = np.zeros_like(arr)
    for axis in ("x", "y", "z"):
        d = _diff(arr, _spacing(grid, axis), _AXIS[axis])
        g2 += d * d
    return g2


def smoothing_weights(field: Field, beta: float = 1e-2) -> np.ndarray:
    """Diffusion weights 1/sqrt(|grad|^2 + beta) evaluated at the field, (z,y,x)."""
    beta = _check_beta(beta)
    g2 = _grad_squared(field.as_3d(), field.grid)
    return 1.0 / np.sqrt(g2 + beta)


def tv_value(field: Field, beta: float = 1e-2) -> float:
    """Cell-volume weighted sum of sqrt(|grad|^2 + beta) over all nodes."""
    beta = _check_beta(beta)
    g2 = _grad_squared(field.as_3d(), field.grid)
    return float(np.sqrt(g2 + beta).sum() * field.grid.cell_volume)


def tv_value_and_gradient(field: Field, beta: float = 1e-2):
    """Value and gradient in one stencil pass; the gradient is L(field) @ field."""
    beta = _check_beta(beta)
    grid = field.grid
    arr = field.as_3d()
    g2 = _grad_squared(arr, grid)
    root = np.sqrt(g2 + beta)
    value = float(root.sum() * grid.cell_volume)
    gamma = 1.0 / root
    grad = _apply_weighted_diffusion(gamma, grid, arr)
    return value, grad.ravel()


def tv_gradient(field: Field, beta: float = 1e-2) -> np.ndarray:
    return tv_value_and_gradient(field, beta)[1]


def _apply_weighted_diffusion(gamma: np.ndarray, grid: Grid3, arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    for axis in ("x", "y", "z"):
        h = _spacing(grid, axis)
        a = _AXIS[axis]
        out += _diff_adjoint(gamma * _diff(arr, h, a), h, a)
    return out * grid.cell_volume


def apply_L(field_at: Field, vector: np.ndarray, beta: float = 1e-2) -> np.ndarray:
    """Apply the diffusion operator frozen at field_at to a flat vector.

    L = cell_volume * sum_a D_a^T diag(1/sqrt(|grad field_at|^2 + beta)) D_a,
    symmetric positive semidefinite; tv_gradient(f) == apply_L(f, f.values).
    """
    gamma = smoothing_weights(field_at, beta)
    return apply_weights(gamma, field_at.grid, vector)


def apply_weights(gamma: np.ndarray, grid: Grid3, vector: np.ndarray) -> np.ndarray:
    """Same as apply_L but with precomputed weights (one freeze, many applies)."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (grid.n_nodes,):
        raise ValueError(
            f"vector length {vector.shape} does not match grid nodes {grid.n_nodes}"
        )
    arr = vector.reshape(grid.nz, grid.ny, grid.nx)
    return _apply_weighted_diffusion(gamma, grid, arr).ravel()
