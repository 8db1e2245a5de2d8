"""Ergodic capacity estimation and closed-form reference capacities.

Capacity is estimated by Monte Carlo over realizations of the angular
channel: per trial, sum log2(1 + prefactor * eig_i) over the eigenvalues
of the channel Gram matrix, where the SNR prefactor is
rho * G_tx * G_rx * N_tx * N_rx / n_tx_modes. Closed forms cover the
isotropic upper bound, the low-SNR limit, and the patch-antenna gain;
the discrete and continuous aperture schemes are thin wrappers that
derive the gains from geometry.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericError
from .geometry import PlanarArrayConfig
from .spectrum import AngularSpectrum
from .channel import derive_trial_seed, sample_angular_channel

_LN2 = math.log(2.0)

# relative variance floor below which lattice cells are dropped from the
# eigensolve; the discarded tail perturbs capacity by < 1e-15 bit/s/Hz
_DEFLATION_RTOL = 1e-24


@dataclass(frozen=True)
class LinkBudget:
    """SNR and gain bookkeeping for the capacity prefactor."""

    snr: float
    gain_tx: float
    gain_rx: float
    n_tx_elements: int
    n_rx_elements: int
    n_tx_modes: int

    def __post_init__(self):
        if self.snr < 0:
            raise ConfigurationError(f"snr must be >= 0, got {self.snr}")
        for name in ("gain_tx", "gain_rx"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("n_tx_elements", "n_rx_elements", "n_tx_modes"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")

    @property
    def prefactor(self) -> float:
        """rho * G_tx * G_rx * N_tx * N_rx / n_tx_modes."""
        return (self.snr * self.gain_tx * self.gain_rx
                * self.n_tx_elements * self.n_rx_elements / self.n_tx_modes)


@dataclass(frozen=True, eq=False)
class CapacityEstimate:
    """Monte Carlo ergodic capacity with standard error and eigen summary."""

    mean_bits: float
    std_error: float
    trials: int
    eigen_summary: np.ndarray
    budget: LinkBudget


def hermitian_eigenvalues(gram: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian PSD matrix, sorted descending.

    Rejects inputs whose asymmetry exceeds 1e-10 (relative to the matrix
    scale) and eigenvalues below -1e-10 * ||gram||; tiny negatives from
    roundoff are clamped to 0.
    """
    gram = np.asarray(gram)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ConfigurationError(f"gram must be square, got shape {gram.shape}")
    scale = max(1.0, float(np.abs(gram).max()) if gram.size else 0.0)
    asym = float(np.abs(gram - gram.conj().T).max()) if gram.size else 0.0
    if asym > 1e-10 * scale:
        raise ConfigurationError(f"matrix is not Hermitian (asymmetry {asym:.2e})")
    try:
        vals = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    if vals.size:
        norm = max(abs(float(vals[0])), abs(float(vals[-1])))
        if float(vals[0]) < -1e-10 * norm:
            raise NumericError(
                f"eigenvalue {vals[0]:.3e} below PSD tolerance {-1e-10 * norm:.3e}")
    return np.clip(vals[::-1], 0.0, None)


def eigenvalue_trials(rx: AngularSpectrum, tx: AngularSpectrum,
                      trials: int, master_seed: int,
                      threads: int | None = None) -> np.ndarray:
    """Per-trial descending eigenvalues of the channel Gram matrix.

    Returns a (trials, n_modes) array, n_modes = min(n_rx, n_tx). The trial
    at row t is seeded with derive_trial_seed(master_seed, t), so the
    ensemble is deterministic for any thread count. The Gram matrix is
    formed on the smaller side, after dropping cells whose variance is
    below 1e-24 of the spectrum maximum (their contribution is beneath
    double-precision resolution of the result).
    """
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    if not (rx.normalized and tx.normalized):
        raise ConfigurationError("spectra must be normalized")
    n_modes = min(rx.n_cells, tx.n_cells)
    keep_r = rx.variances > rx.variances.max() * _DEFLATION_RTOL
    keep_s = tx.variances > tx.variances.max() * _DEFLATION_RTOL
    out = np.zeros((trials, n_modes))

    def run_trial(t: int) -> None:
        seed = derive_trial_seed(master_seed, t)
        h = sample_angular_channel(rx, tx, seed).matrix
        h = h[np.ix_(keep_r, keep_s)]
        if h.shape[1] <= h.shape[0]:
            gram = h.conj().T @ h
        else:
            gram = h @ h.conj().T
        vals = hermitian_eigenvalues(gram)
        k = min(vals.size, n_modes)
        out[t, :k] = vals[:k]

    n_workers = threads if threads is not None else _default_threads()
    if n_workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run_trial, range(trials)))
    else:
        for t in range(trials):
            run_trial(t)
    return out


def capacity_from_eigenvalues(eigs: np.ndarray, budget: LinkBudget) -> CapacityEstimate:
    """Capacity estimate from a precomputed eigenvalue ensemble."""
    trials = eigs.shape[0]
    per_trial = np.log2(1.0 + budget.prefactor * eigs).sum(axis=1)
    mean = float(np.mean(per_trial))
    if trials >= 2:
        std_error = float(np.std(per_trial, ddof=1) / math.sqrt(trials))
    else:
        std_error = 0.0
    return CapacityEstimate(mean_bits=mean, std_error=std_error, trials=trials,
                            eigen_summary=eigs.mean(axis=0), budget=budget)


def ergodic_capacity(rx: AngularSpectrum, tx: AngularSpectrum,
                     budget: LinkBudget, trials: int, master_seed: int,
                     threads: int | None = None) -> CapacityEstimate:
    """Monte Carlo ergodic capacity over seeded channel realizations."""
    if trials < 2:
        raise ConfigurationError(f"trials must be >= 2, got {trials}")
    eigs = eigenvalue_trials(rx, tx, trials, master_seed, threads=threads)
    return capacity_from_eigenvalues(eigs, budget)


def capacity_upper_bound(budget: LinkBudget, n_rx_modes: int) -> float:
    """Capacity with uniformly distributed eigenvalues (isotropic limit)."""
    n_m = min(budget.n_tx_modes, n_rx_modes)
    return n_m * math.log2(1.0 + budget.prefactor / n_m)


def capacity_low_snr(budget: LinkBudget) -> float:
    """Low-SNR limit: prefactor / ln 2, independent of the angle spectra."""
    return budget.prefactor / _LN2


def antenna_gain(element_area: float, efficiency: float) -> float:
    """Patch antenna gain 4*pi*eta*S with S in lambda^2 units."""
    if element_area <= 0:
        raise ConfigurationError(f"element_area must be positive, got {element_area}")
    if not 0 < efficiency < 1:
        raise ConfigurationError(f"efficiency must lie in (0, 1), got {efficiency}")
    return 4.0 * math.pi * efficiency * element_area


def discrete_aperture_budget(tx_array: PlanarArrayConfig,
                             rx_array: PlanarArrayConfig,
                             snr: float, n_tx_modes: int) -> LinkBudget:
    """Budget with per-element gains fixed by the configured element areas."""
    return LinkBudget(
        snr=snr,
        gain_tx=antenna_gain(tx_array.element_area, tx_array.aperture_efficiency),
        gain_rx=antenna_gain(rx_array.element_area, rx_array.aperture_efficiency),
        n_tx_elements=tx_array.n_elements,
        n_rx_elements=rx_array.n_elements,
        n_tx_modes=n_tx_modes)


def continuous_aperture_budget(tx_array: PlanarArrayConfig,
                               rx_array: PlanarArrayConfig,
                               snr: float, n_tx_modes: int) -> LinkBudget:
    """Budget with element areas derived as aperture_area / N per side.

    The resulting prefactor depends on the apertures only, so adding
    elements within a fixed aperture leaves capacity unchanged.
    """
    area_tx = tx_array.len_x * tx_array.len_y / tx_array.n_elements
    area_rx = rx_array.len_x * rx_array.len_y / rx_array.n_elements
    return LinkBudget(
        snr=snr,
        gain_tx=antenna_gain(area_tx, tx_array.aperture_efficiency),
        gain_rx=antenna_gain(area_rx, rx_array.aperture_efficiency),
        n_tx_elements=tx_array.n_elements,
        n_rx_elements=rx_array.n_elements,
        n_tx_modes=n_tx_modes)


def capacity_discrete_aperture(rx: AngularSpectrum, tx: AngularSpectrum,
                               arrays: tuple[PlanarArrayConfig, PlanarArrayConfig],
                               snr: float, trials: int, master_seed: int,
                               threads: int | None = None) -> CapacityEstimate:
    """Ergodic capacity in the discrete aperture scheme (fixed element area)."""
    tx_array, rx_array = arrays
    budget = discrete_aperture_budget(tx_array, rx_array, snr, tx.n_cells)
    return ergodic_capacity(rx, tx, budget, trials, master_seed, threads=threads)


def capacity_continuous_aperture(rx: AngularSpectrum, tx: AngularSpectrum,
                                 arrays: tuple[PlanarArrayConfig, PlanarArrayConfig],
                                 snr: float, trials: int, master_seed: int,
                                 threads: int | None = None) -> CapacityEstimate:
    """Ergodic capacity in the continuous aperture scheme (area = L_x*L_y/N)."""
    tx_array, rx_array = arrays
    budget = continuous_aperture_budget(tx_array, rx_array, snr, tx.n_cells)
    return ergodic_capacity(rx, tx, budget, trials, master_seed, threads=threads)


def cardinality_estimate(len_x: float, len_y: float) -> float:
    """pi * L_x * L_y / lambda^2 mode-count approximation (reporting only).

    The exact lattice cardinality is used everywhere in the capacity math;
    this helper exists so reports can show the asymptotic approximation
    next to it.
    """
    return math.pi * len_x * len_y


def _default_threads() -> int:
    raw = os.environ.get("HOLOMIMO_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
