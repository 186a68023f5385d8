"""Brute-force reference implementations and adapters used by the tests.

Everything here is written with scalar loops and dense matrices on purpose:
slow, obvious code that the fast vectorized library is checked against.
"""

import math

import numpy as np

from atmtomo import Emitter, Station, build_network, make_grid, take_rays

_criteria_lines = []


def record_criterion(number, label, ok, detail):
    """Append one pass/fail line for the terminal summary; returns the line."""
    line = f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    _criteria_lines.append(line)
    print(line)
    return line


class FnObjective:
    """Give a plain function the (value, gradient) eval interface solvers expect."""

    def __init__(self, fn):
        self.fn = fn
        self.evaluations = 0

    def eval(self, x):
        self.evaluations += 1
        value, grad = self.fn(np.asarray(x, dtype=float))
        return float(value), np.asarray(grad, dtype=float)


def desk_grid():
    return make_grid(4, 4, 4, (0.0, 1.0, 0.0, 1.0, 0.0, 15.0))


def desk_network(grid=None):
    """A 200-ray network whose operator has full column rank on the 4x4x4 grid.

    Stations are jittered around the ground lattice so every ground node is
    probed; emitters mix an interior 3x3 lattice with four on a radius-1.1
    ring.  The ring rays leave the box sideways, which breaks the otherwise
    identical per-layer sample pattern that all fully interior rays share
    (the altitude ladder is the same for every ray, so without clipping the
    deposited weight per layer is proportional across rays and per-layer
    constant fields become invisible).
    """
    if grid is None:
        grid = desk_grid()
    rng = np.random.default_rng(0)
    xs = grid.axis_nodes("x")
    ys = grid.axis_nodes("y")
    stations = [
        Station(
            (
                float(np.clip(x + rng.uniform(-0.1, 0.1), grid.x_min, grid.x_max)),
                float(np.clip(y + rng.uniform(-0.1, 0.1), grid.y_min, grid.y_max)),
                0.0,
            )
        )
        for y in ys
        for x in xs
    ]
    emitters = [
        Emitter((float(u), float(v), grid.z_max))
        for v in np.linspace(0.1, 0.9, 3)
        for u in np.linspace(0.1, 0.9, 3)
    ]
    angles = np.linspace(0.0, 2.0 * np.pi, 4, endpoint=False) + 0.3
    emitters += [
        Emitter((float(0.5 + 1.1 * np.cos(a)), float(0.5 + 1.1 * np.sin(a)), grid.z_max))
        for a in angles
    ]
    return take_rays(build_network(grid, stations, emitters, seed=0), 200)


def walk_ray_matrix(network, n_samples):
    """Dense ray-transform matrix assembled by a scalar reference walker."""
    grid = network.grid
    dense = np.zeros((len(network.rays), grid.n_nodes))
    for r, ray in enumerate(network.rays):
        z0 = ray.origin[2]
        sin_e = math.sin(ray.elevation)
        ladder = np.linspace(z0, grid.z_max, n_samples)
        inc = (grid.z_max - z0) / (n_samples - 1) / sin_e
        for m in range(n_samples):
            t = (ladder[m] - z0) / sin_e
            px = ray.origin[0] + t * ray.direction[0]
            py = ray.origin[1] + t * ray.direction[1]
            pz = ray.origin[2] + t * ray.direction[2]
            i = math.ceil((px - grid.x_min) / grid.dx - 0.5)
            j = math.ceil((py - grid.y_min) / grid.dy - 0.5)
            k = math.ceil((pz - grid.z_min) / grid.dz - 0.5)
            if not (0 <= i < grid.nx and 0 <= j < grid.ny and 0 <= k < grid.nz):
                continue
            w = inc if 0 < m < n_samples - 1 else 0.5 * inc
            dense[r, i + grid.nx * (j + grid.ny * k)] += w
    return dense


def stencil_1d(line, idx, spacing):
    """Central difference with replicate padding on one extracted grid line."""
    lo = max(idx - 1, 0)
    hi = min(idx + 1, len(line) - 1)
    return (line[hi] - line[lo]) / (2.0 * spacing)


def tv_value_loops(field, beta):
    """Smoothed TV value by explicit triple loops over all nodes."""
    grid = field.grid
    arr = field.as_3d()
    total = 0.0
    for k in range(grid.nz):
        for j in range(grid.ny):
            for i in range(grid.nx):
                gx = stencil_1d(arr[k, j, :], i, grid.dx)
                gy = stencil_1d(arr[k, :, i], j, grid.dy)
                gz = stencil_1d(arr[:, j, i], k, grid.dz)
                total += math.sqrt(gx * gx + gy * gy + gz * gz + beta)
    return total * grid.cell_volume


def dense_diff_1d(n, spacing):
    """Dense matrix of the padded central difference on an n-point line."""
    out = np.zeros((n, n))
    for r in range(n):
        lo = max(r - 1, 0)
        hi = min(r + 1, n - 1)
        out[r, hi] += 1.0 / (2.0 * spacing)
        out[r, lo] -= 1.0 / (2.0 * spacing)
    return out


def dense_diff_matrices(grid):
    """The three flat-vector difference matrices for x-fastest ordering."""
    dx = dense_diff_1d(grid.nx, grid.dx)
    dy = dense_diff_1d(grid.ny, grid.dy)
    dz = dense_diff_1d(grid.nz, grid.dz)
    ex = np.eye(grid.nx)
    ey = np.eye(grid.ny)
    ez = np.eye(grid.nz)
    big_x = np.kron(ez, np.kron(ey, dx))
    big_y = np.kron(ez, np.kron(dy, ex))
    big_z = np.kron(dz, np.kron(ey, ex))
    return big_x, big_y, big_z


def dense_tv_gradient(field, beta):
    """TV gradient through an explicitly assembled dense diffusion matrix."""
    return dense_diffusion_matrix(field, beta) @ field.values


def dense_diffusion_matrix(field, beta):
    """Dense  V * sum_a Da^T diag(1/sqrt(|grad|^2 + beta)) Da  at the field."""
    grid = field.grid
    mats = dense_diff_matrices(grid)
    flat = field.values
    g2 = np.zeros(grid.n_nodes)
    for mat in mats:
        d = mat @ flat
        g2 += d * d
    gamma = 1.0 / np.sqrt(g2 + beta)
    out = np.zeros((grid.n_nodes, grid.n_nodes))
    for mat in mats:
        out += mat.T @ (gamma[:, None] * mat)
    return out * grid.cell_volume


def dense_bfgs_inverse(pairs):
    """Inverse-Hessian matrix from scaled identity plus chronological updates."""
    s_last, y_last, _ = pairs[-1]
    n = s_last.size
    gamma = float(s_last @ y_last) / float(y_last @ y_last)
    h = gamma * np.eye(n)
    eye = np.eye(n)
    for s, y, rho in pairs:
        v = eye - rho * np.outer(s, y)
        h = v @ h @ v.T + rho * np.outer(s, s)
    return h


def rosenbrock(x):
    a, b = x
    value = (1.0 - a) ** 2 + 100.0 * (b - a * a) ** 2
    grad = np.array(
        [
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ]
    )
    return value, grad
