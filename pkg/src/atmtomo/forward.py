"""Discrete ray transform: nearest-node attribution of per-sample arc lengths."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .geometry import Grid3, Network, sample_ray

# Marker returned by nearest_node for points outside the inflated domain.
OUTSIDE = -1


def nearest_node(point, grid: Grid3) -> int:
    """Linear index of the grid node closest to the point, or OUTSIDE.

    Per axis the nearest index is ceil(t - 0.5) with t the fractional node
    coordinate, so exact midpoints round toward the lower index.  Points
    farther than half a spacing beyond the boundary nodes get OUTSIDE.
    """
    p = np.asarray(point, dtype=float)
    idx = np.empty(3, dtype=np.int64)
    for a, (lo, d, n) in enumerate(
        (
            (grid.x_min, grid.dx, grid.nx),
            (grid.y_min, grid.dy, grid.ny),
            (grid.z_min, grid.dz, grid.nz),
        )
    ):
        i = int(np.ceil((p[a] - lo) / d - 0.5))
        if i < 0 or i > n - 1:
            return OUTSIDE
        idx[a] = i
    return grid.linear_index(int(idx[0]), int(idx[1]), int(idx[2]))


def _nearest_nodes(points: np.ndarray, grid: Grid3):
    """Vectorized nearest_node: (linear indices, inside mask)."""
    ix = np.ceil((points[:, 0] - grid.x_min) / grid.dx - 0.5).astype(np.int64)
    iy = np.ceil((points[:, 1] - grid.y_min) / grid.dy - 0.5).astype(np.int64)
    iz = np.ceil((points[:, 2] - grid.z_min) / grid.dz - 0.5).astype(np.int64)
    inside = (
        (ix >= 0) & (ix < grid.nx)
        & (iy >= 0) & (iy < grid.ny)
        & (iz >= 0) & (iz < grid.nz)
    )
    linear = ix + grid.nx * (iy + grid.ny * iz)
    return linear, inside


class SparseOperator:
    """Row-compressed ray transform.  Rows are rays, columns are grid nodes."""

    def __init__(self, matrix: sp.csr_matrix):
        matrix = sp.csr_matrix(matrix)
        matrix.sum_duplicates()
        matrix.sort_indices()
        self.matrix = matrix
        self._adjoint = matrix.T.tocsr()

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Forward map: per-ray weighted sums of nodal values."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_cols,):
            raise ValueError(
                f"field length {values.shape} does not match operator columns {self.n_cols}"
            )
        return self.matrix @ values

    def apply_adjoint(self, residual: np.ndarray) -> np.ndarray:
        """Adjoint map: spread per-ray values back onto their nodes."""
        residual = np.asarray(residual, dtype=float)
        if residual.shape != (self.n_rows,):
            raise ValueError(
                f"residual length {residual.shape} does not match operator rows {self.n_rows}"
            )
        return self._adjoint @ residual

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()


def assemble_operator(network: Network, n_samples: int | None = None) -> SparseOperator:
    """Assemble the ray transform for every ray in the network.

    Each ray is sampled equispaced in altitude; every sample contributes its
    arc-length increment to the nearest node, with the two end samples
    carrying half an increment each (a sample owns the stretch of ray closer
    to it than to its neighbors, and the ends own half a cell).  Sample
    points outside the grid contribute nothing.
    """
    grid = network.grid
    if n_samples is None:
        n_samples = 2 * grid.nz
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples per ray, got {n_samples}")
    rows, cols, weights = [], [], []
    for j, ray in enumerate(network.rays):
        points, increment = sample_ray(ray, grid, n_samples)
        w = np.full(n_samples, increment)
        w[0] = 0.5 * increment
        w[-1] = 0.5 * increment
        linear, inside = _nearest_nodes(points, grid)
        if not inside.any():
            raise ValueError(f"ray {j} has no sample points inside the domain")
        rows.append(np.full(int(inside.sum()), j, dtype=np.int64))
        cols.append(linear[inside])
        weights.append(w[inside])
    matrix = sp.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(network.rays), grid.n_nodes),
    )
    return SparseOperator(matrix)


def operator_listing(op: SparseOperator) -> str:
    """Text dump, one entry per line: row, column, weight."""
    coo = op.matrix.tocoo()
    lines = [f"{r} {c} {float(w)!r}" for r, c, w in zip(coo.row, coo.col, coo.data)]
    return "\n".join(lines) + ("\n" if lines else "")


def dump_operator(op: SparseOperator, path) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(operator_listing(op))
    except OSError as exc:
        raise OSError(f"failed to write operator dump {path}: {exc}") from exc
