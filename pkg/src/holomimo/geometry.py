"""Planar arrays, wavenumber-domain lattices, and Fourier synthesis bases.

A z-oriented planar array of aperture ``len_x`` x ``len_y`` (in carrier
wavelengths) supports propagating plane waves whose transverse wavenumber
lies in the unit disk k_x^2 + k_y^2 <= 1 (normalized by 2*pi/lambda).
The disk is partitioned into rectangular cells of side 1/len_x x 1/len_y;
the lattice enumerates every cell that overlaps the disk with positive
area, and the Fourier basis holds one unit-norm steering-like column per
cell, evaluated at the element positions.

All geometry here is expressed in wavelengths; metre-valued quantities
appear only at I/O boundaries (``FourierBasis.element_positions``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class PlanarArrayConfig:
    """Geometry of one z-oriented rectangular planar array.

    Parameters
    ----------
    len_x, len_y : float
        Aperture along x and y in wavelengths (L/lambda).
    spacing : float
        Element spacing in wavelengths, uniform in x and y.
    element_area : float
        Physical area of one element in lambda^2 units.
    aperture_efficiency : float
        Dimensionless efficiency in (0, 1).
    wavelength : float
        Carrier wavelength in metres (only used when exporting positions).
    """

    len_x: float
    len_y: float
    spacing: float
    element_area: float = (1.0 / 8.0) ** 2
    aperture_efficiency: float = 0.6
    wavelength: float = 0.05

    def __post_init__(self):
        if not (self.len_x > 0 and self.len_y > 0):
            raise ConfigurationError(
                f"aperture must be positive, got {self.len_x} x {self.len_y}")
        if not self.spacing > 0:
            raise ConfigurationError(f"spacing must be positive, got {self.spacing}")
        if not 0 < self.aperture_efficiency < 1:
            raise ConfigurationError(
                f"aperture_efficiency must lie in (0, 1), got {self.aperture_efficiency}")
        if not self.element_area > 0:
            raise ConfigurationError(
                f"element_area must be positive, got {self.element_area}")
        # elements may not overlap
        if self.element_area > self.spacing ** 2 * (1 + 1e-12):
            raise ConfigurationError(
                f"element_area {self.element_area} exceeds spacing^2 "
                f"{self.spacing ** 2}")
        if not self.wavelength > 0:
            raise ConfigurationError(f"wavelength must be positive, got {self.wavelength}")
        if self.n_elements < 1:
            raise ConfigurationError(
                f"array holds no elements: {self.len_x}/{self.spacing} per axis")

    @property
    def n_x(self) -> int:
        return int(math.floor(self.len_x / self.spacing + 1e-9))

    @property
    def n_y(self) -> int:
        return int(math.floor(self.len_y / self.spacing + 1e-9))

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_y

    def element_positions_wavelengths(self) -> np.ndarray:
        """(N, 3) element coordinates in wavelengths, grid centred on the origin.

        Order is row-major by (y, x) ascending, matching the lattice cell order
        convention. z is identically 0 for a planar array.
        """
        xs = self.spacing * (np.arange(self.n_x) - (self.n_x - 1) / 2.0)
        ys = self.spacing * (np.arange(self.n_y) - (self.n_y - 1) / 2.0)
        X, Y = np.meshgrid(xs, ys)  # rows = y, cols = x
        pos = np.column_stack([X.ravel(), Y.ravel(), np.zeros(self.n_elements)])
        return pos

    @property
    def key(self) -> str:
        return (f"array[{self.len_x}x{self.len_y},d={self.spacing},"
                f"S={self.element_area},eta={self.aperture_efficiency}]")


@dataclass(frozen=True)
class WavenumberCell:
    """One rectangular cell of the wavenumber lattice.

    ``bounds`` is ((kx_lo, kx_hi), (ky_lo, ky_hi)) in units of 2*pi/lambda,
    i.e. the propagating region is the closed unit disk.
    """

    idx_x: int
    idx_y: int
    bounds: tuple[tuple[float, float], tuple[float, float]]

    def min_distance_to_origin(self) -> float:
        (x0, x1), (y0, y1) = self.bounds
        dx = max(x0, 0.0, -x1)
        dy = max(y0, 0.0, -y1)
        return math.hypot(dx, dy)


@dataclass(frozen=True, eq=False)
class WavenumberLattice:
    """Ordered set of wavenumber cells supporting propagating waves.

    Cell order is deterministic: row-major by (idx_y, idx_x) ascending.
    Every consumer of a lattice (spectra, channel matrices, Fourier bases)
    indexes cells in this order.
    """

    cells: tuple[WavenumberCell, ...]
    array: PlanarArrayConfig
    _index_arrays: tuple = field(default=None, repr=False, compare=False)

    @property
    def cardinality(self) -> int:
        return len(self.cells)

    @property
    def key(self) -> str:
        return f"lattice[n={self.cardinality},{self.array.key}]"

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(idx_x, idx_y) integer vectors in cell order."""
        ix = np.array([c.idx_x for c in self.cells], dtype=np.int64)
        iy = np.array([c.idx_y for c in self.cells], dtype=np.int64)
        return ix, iy


@dataclass(frozen=True, eq=False)
class FourierBasis:
    """Unit-norm Fourier synthesis matrix for one array/lattice pair.

    ``matrix`` is N x n complex; column j is the steering-like vector of
    lattice cell j evaluated at the N element positions.
    ``element_positions`` is the N x 3 position array in metres.
    """

    matrix: np.ndarray
    element_positions: np.ndarray
    lattice_key: str


def _cell_included(idx_x: int, idx_y: int, len_x: float, len_y: float) -> bool:
    # positive-area overlap with the unit disk, tested on the cell corner
    # nearest the origin. Cross-multiplied form keeps the comparison exact
    # for integer and dyadic apertures (no 1/len rounding).
    dx = max(idx_x, 0, -(idx_x + 1))
    dy = max(idx_y, 0, -(idx_y + 1))
    return (dx * len_y) ** 2 + (dy * len_x) ** 2 < (len_x * len_y) ** 2


def enumerate_lattice(array: PlanarArrayConfig) -> WavenumberLattice:
    """Enumerate all wavenumber cells overlapping the propagating disk.

    A cell with indices (ix, iy) spans [ix/len_x, (ix+1)/len_x] x
    [iy/len_y, (iy+1)/len_y] in normalized wavenumber units and belongs to
    the lattice iff it overlaps the unit disk with positive area. Cells
    that only touch the disk at a point or an edge carry exactly zero
    propagating energy and are excluded; this keeps the lattice free of
    duplicate Fourier columns at half-wavelength spacing while covering
    the disk completely (up to measure zero).

    The inclusion test is symmetric under (ix, iy) -> (-ix-1, -iy-1), so
    the lattice is closed under point reflection about the origin.
    """

    len_x, len_y = array.len_x, array.len_y
    ix_max = int(math.ceil(len_x)) + 1
    iy_max = int(math.ceil(len_y)) + 1
    cells = []
    for iy in range(-iy_max, iy_max + 1):
        for ix in range(-ix_max, ix_max + 1):
            if _cell_included(ix, iy, len_x, len_y):
                bounds = ((ix / len_x, (ix + 1) / len_x),
                          (iy / len_y, (iy + 1) / len_y))
                cells.append(WavenumberCell(ix, iy, bounds))
    return WavenumberLattice(cells=tuple(cells), array=array)


def axial_wavenumber(cell: WavenumberCell) -> float:
    """z-directed wavenumber (rad per wavelength) at the cell's lower-left corner.

    Clamped to 0 outside the unit disk. Only enters element phases through
    r_z, which is 0 for the planar arrays modelled here; kept for API
    completeness so tilted-element experiments can reuse the basis builder.
    """
    kx = cell.bounds[0][0]
    ky = cell.bounds[1][0]
    arg = 1.0 - kx * kx - ky * ky
    if arg <= 0.0:
        return 0.0
    return 2.0 * math.pi * math.sqrt(arg)


def build_fourier_basis(array: PlanarArrayConfig,
                        lattice: WavenumberLattice) -> FourierBasis:
    """Build the N x n Fourier basis matrix for ``lattice``.

    Element i of the column for cell (ix, iy) is
    exp(-j*(2*pi*ix*r_x/L_x + 2*pi*iy*r_y/L_y + gamma*r_z)) / sqrt(N)
    with positions r in wavelengths. Columns are unit norm by construction.
    """
    if lattice.array != array:
        raise ConfigurationError(
            "lattice was derived from a different array configuration")
    pos = array.element_positions_wavelengths()
    n = array.n_elements
    ix, iy = lattice.index_arrays()
    gam = np.array([axial_wavenumber(c) for c in lattice.cells])
    phase = (2.0 * np.pi / array.len_x) * np.outer(pos[:, 0], ix)
    phase += (2.0 * np.pi / array.len_y) * np.outer(pos[:, 1], iy)
    phase += np.outer(pos[:, 2], gam)
    matrix = np.exp(-1j * phase) / math.sqrt(n)
    return FourierBasis(matrix=matrix,
                        element_positions=pos * array.wavelength,
                        lattice_key=lattice.key)
