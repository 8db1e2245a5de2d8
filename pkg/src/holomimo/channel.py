"""Sampling of the wavenumber-domain channel and spatial synthesis.

The angular channel matrix is diag(sigma_rx) * W * diag(sigma_tx) with W
i.i.d. circularly-symmetric complex Gaussian of unit variance, so entry
(i, j) has variance sigma_rx^2(i) * sigma_tx^2(j) and the expected total
power equals 1 for normalized spectra. Seeding is splittable: every Monte
Carlo trial derives its own independent stream from (master_seed, index),
so trials can run in any order or in parallel and still reproduce
bit-identically.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import FourierBasis
from .spectrum import AngularSpectrum


@dataclass(frozen=True, eq=False)
class AngularChannel:
    """One realization of the wavenumber-domain channel matrix."""

    matrix: np.ndarray
    rx_spectrum_ref: str
    tx_spectrum_ref: str
    seed: int


@dataclass(frozen=True, eq=False)
class SpatialChannel:
    """Spatial-domain channel synthesized from an angular realization."""

    matrix: np.ndarray
    source: tuple[str, str, str]  # (angular seed repr, rx basis key, tx basis key)


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Deterministic, collision-resistant per-trial seed.

    Mixes (master_seed, trial_index) through numpy's SeedSequence entropy
    hash and returns the resulting 128-bit integer. Distinct indices give
    statistically independent Generator streams.
    """
    ss = np.random.SeedSequence(entropy=[int(master_seed) & ((1 << 64) - 1),
                                         int(trial_index) & ((1 << 64) - 1)])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return (int(a) << 64) | int(b)


def sample_angular_channel(rx: AngularSpectrum, tx: AngularSpectrum,
                           seed: int) -> AngularChannel:
    """Draw one angular channel realization.

    W entries are CN(0, 1): independent real/imaginary parts of variance
    1/2 each. Identical seeds give bit-identical matrices.
    """
    if not (rx.normalized and tx.normalized):
        raise ConfigurationError("spectra must be normalized before sampling")
    n_r, n_s = rx.n_cells, tx.n_cells
    if n_r < 1 or n_s < 1:
        raise ConfigurationError("spectra must hold at least one cell")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((2, n_r, n_s))
    w = np.sqrt(0.5) * (z[0] + 1j * z[1])
    sig_r = np.sqrt(rx.variances)
    sig_s = np.sqrt(tx.variances)
    matrix = sig_r[:, None] * w * sig_s[None, :]
    return AngularChannel(matrix=matrix, rx_spectrum_ref=rx.checksum,
                          tx_spectrum_ref=tx.checksum, seed=seed)


def synthesize_spatial(angular: AngularChannel, rx_basis: FourierBasis,
                       tx_basis: FourierBasis) -> SpatialChannel:
    """Spatial channel H = sqrt(N_rx * N_tx) * Phi_rx * H_a * Phi_tx^H."""
    n_r, n_s = angular.matrix.shape
    if rx_basis.matrix.shape[1] != n_r:
        raise ConfigurationError(
            f"rx basis has {rx_basis.matrix.shape[1]} columns, channel needs {n_r}")
    if tx_basis.matrix.shape[1] != n_s:
        raise ConfigurationError(
            f"tx basis has {tx_basis.matrix.shape[1]} columns, channel needs {n_s}")
    n_rx = rx_basis.matrix.shape[0]
    n_tx = tx_basis.matrix.shape[0]
    scale = np.sqrt(n_rx * n_tx)
    matrix = scale * (rx_basis.matrix @ angular.matrix @ tx_basis.matrix.conj().T)
    return SpatialChannel(matrix=matrix,
                          source=(f"seed={angular.seed}", rx_basis.lattice_key,
                                  tx_basis.lattice_key))


# -- binary export container --------------------------------------------------

_MAGIC = b"HMIO"
_VERSION = 1


def save_channel(path, matrix: np.ndarray, sidecar: dict | None = None) -> None:
    """Write a channel matrix as magic/version/dims + row-major LE f64 pairs.

    A JSON sidecar (same path + ".json") records whatever metadata the
    caller supplies (config, seed, spectra checksums).
    """
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<H", _VERSION))
        fh.write(struct.pack("<II", m.shape[0], m.shape[1]))
        inter = np.empty((m.shape[0], m.shape[1], 2), dtype="<f8")
        inter[..., 0] = m.real
        inter[..., 1] = m.imag
        fh.write(inter.tobytes())
    if sidecar is not None:
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_channel(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ConfigurationError(f"bad magic {magic!r} in {path}")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != _VERSION:
            raise ConfigurationError(f"unsupported container version {version}")
        rows, cols = struct.unpack("<II", fh.read(8))
        raw = np.frombuffer(fh.read(rows * cols * 16), dtype="<f8")
    raw = raw.reshape(rows, cols, 2)
    return (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex128)
