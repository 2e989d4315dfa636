"""Uniform spatial grids and complex wavefunctions sampled on them."""

import csv

import numpy as np


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


class SpatialGrid:
    """Uniform 1D grid on [x_min, x_max) with a power-of-two point count.

    The endpoint is excluded so the grid is periodic-transform friendly;
    spacing is dx = (x_max - x_min) / n_points.
    """

    def __init__(self, x_min, x_max, n_points):
        if x_max <= x_min:
            raise ValueError("x_max must exceed x_min")
        if not _is_power_of_two(int(n_points)):
            raise ValueError("n_points must be a power of two, got %r" % (n_points,))
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.n_points = int(n_points)
        self.dx = (self.x_max - self.x_min) / self.n_points
        self.x = self.x_min + self.dx * np.arange(self.n_points)

    def __eq__(self, other):
        return (
            isinstance(other, SpatialGrid)
            and self.x_min == other.x_min
            and self.x_max == other.x_max
            and self.n_points == other.n_points
        )

    def __repr__(self):
        return "SpatialGrid(%g, %g, %d)" % (self.x_min, self.x_max, self.n_points)


class GridWavefunction:
    """Complex values on a SpatialGrid plus bookkeeping metadata."""

    def __init__(self, grid, values, meta=None):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (grid.n_points,):
            raise ValueError("values shape %s does not match grid with %d points"
                             % (values.shape, grid.n_points))
        self.grid = grid
        self.values = values
        self.meta = dict(meta) if meta else {}

    def norm(self):
        """Discrete L2 norm, sqrt(sum |psi|^2 dx)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))

    def density(self):
        """Position probability density |psi(x)|^2."""
        return np.abs(self.values) ** 2

    def inner(self, other):
        """Discrete <self|other> = sum conj(self) * other * dx."""
        if self.grid != other.grid:
            raise ValueError("wavefunctions live on different grids")
        return complex(np.sum(np.conj(self.values) * other.values) * self.grid.dx)

    def write_csv(self, path):
        """Serialize as CSV with columns x, re_psi, im_psi."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "re_psi", "im_psi"])
            for x, v in zip(self.grid.x, self.values):
                writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["x", "re_psi", "im_psi"]:
                raise ValueError("unexpected wavefunction CSV header: %r" % (header,))
            rows = [(float(a), float(b), float(c)) for a, b, c in reader]
        x = np.array([r[0] for r in rows])
        n = len(x)
        grid = SpatialGrid(x[0], x[0] + n * (x[1] - x[0]), n)
        values = np.array([r[1] + 1j * r[2] for r in rows])
        return cls(grid, values)
