"""Shared fixtures: lattices, spectra, and Monte Carlo ensembles are expensive
at desk scale, so they are computed once per session and reused across tests."""

import time

import pytest

from holomimo import (PlanarArrayConfig, builtin_preset, compute_spectrum,
                      eigenvalue_trials, enumerate_lattice)

SCENARIOS = ("UMa", "UMi", "RMa")
MASTER_SEED = 20240601


@pytest.fixture(scope="session")
def array15():
    return PlanarArrayConfig(len_x=15.0, len_y=15.0, spacing=0.25)


@pytest.fixture(scope="session")
def lattice15(array15):
    return enumerate_lattice(array15)


@pytest.fixture(scope="session")
def array4():
    return PlanarArrayConfig(len_x=4.0, len_y=4.0, spacing=0.25)


@pytest.fixture(scope="session")
def lattice4(array4):
    return enumerate_lattice(array4)


@pytest.fixture(scope="session")
def presets():
    return {name: builtin_preset(name) for name in SCENARIOS}


@pytest.fixture(scope="session")
def spectra15(presets, lattice15):
    """{(scenario, side): AngularSpectrum} on the 15-wavelength lattice,
    plus per-spectrum wall times for the runtime criterion."""
    out = {}
    times = {}
    for name, preset in presets.items():
        for side, dist in (("tx", preset.tx_distribution()),
                           ("rx", preset.rx_distribution())):
            t0 = time.perf_counter()
            out[(name, side)] = compute_spectrum(dist, lattice15)
            times[(name, side)] = time.perf_counter() - t0
    out["times"] = times
    return out


@pytest.fixture(scope="session")
def spectra4(presets, lattice4):
    out = {}
    for name, preset in presets.items():
        out[(name, "tx")] = compute_spectrum(preset.tx_distribution(), lattice4)
        out[(name, "rx")] = compute_spectrum(preset.rx_distribution(), lattice4)
    return out


@pytest.fixture(scope="session")
def ensembles15(spectra15):
    """200-trial eigenvalue ensembles per scenario on the 15-wavelength lattice."""
    out = {}
    for name in SCENARIOS:
        out[name] = eigenvalue_trials(spectra15[(name, "rx")],
                                      spectra15[(name, "tx")],
                                      trials=200, master_seed=MASTER_SEED)
    return out
