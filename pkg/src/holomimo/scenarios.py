"""Built-in 3GPP LOS scenario presets and JSON scenario parsing.

Angles are degrees at the file boundary and radians inside the math;
presets keep the authored degree values so printing them back is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .errors import ConfigurationError
from .geometry import PlanarArrayConfig
from .spectrum import AngleDistribution

SPEED_OF_LIGHT = 299_792_458.0

# common Table-style defaults shared by all presets
_COMMON = {
    "frequency_ghz": 6.0,
    "azimuth_mean_deg": 90.0,
    "elevation_mean_deg": 45.0,
    "element_area_wavelengths_sq": (1.0 / 8.0) ** 2,
    "aperture_efficiency": 0.6,
}

# (tx az spread, tx el spread, rx az spread, rx el spread) in degrees
_PRESET_SPREADS_DEG = {
    "UMa": (14.0, 0.3, 65.0, 8.9),
    "UMi": (14.7, 0.6, 46.0, 4.4),
    "RMa": (7.9, 0.1, 33.0, 3.0),
}


@dataclass(frozen=True)
class ScenarioPreset:
    """Angle statistics and antenna parameters of one propagation scenario.

    Radian fields drive the math; ``*_deg`` fields carry the boundary
    (as-authored) degree values for exact round-trips.
    """

    name: str
    frequency_hz: float
    azimuth_mean: float
    elevation_mean: float
    tx_azimuth_spread: float
    tx_elevation_spread: float
    rx_azimuth_spread: float
    rx_elevation_spread: float
    element_area: float
    aperture_efficiency: float
    azimuth_mean_deg: float
    elevation_mean_deg: float
    tx_azimuth_spread_deg: float
    tx_elevation_spread_deg: float
    rx_azimuth_spread_deg: float
    rx_elevation_spread_deg: float

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise ConfigurationError(f"frequency must be positive, got {self.frequency_hz}")
        for name in ("tx_azimuth_spread", "tx_elevation_spread",
                     "rx_azimuth_spread", "rx_elevation_spread"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if not 0 < self.aperture_efficiency < 1:
            raise ConfigurationError(
                f"aperture_efficiency must lie in (0, 1), got {self.aperture_efficiency}")
        if self.element_area <= 0:
            raise ConfigurationError("element_area must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    def tx_distribution(self) -> AngleDistribution:
        return AngleDistribution(azimuth_mean=self.azimuth_mean,
                                 azimuth_spread=self.tx_azimuth_spread,
                                 elevation_mean=self.elevation_mean,
                                 elevation_spread=self.tx_elevation_spread)

    def rx_distribution(self) -> AngleDistribution:
        return AngleDistribution(azimuth_mean=self.azimuth_mean,
                                 azimuth_spread=self.rx_azimuth_spread,
                                 elevation_mean=self.elevation_mean,
                                 elevation_spread=self.rx_elevation_spread)


def _preset_from_degrees(name, frequency_ghz, azimuth_mean_deg, elevation_mean_deg,
                         tx_az_deg, tx_el_deg, rx_az_deg, rx_el_deg,
                         element_area, aperture_efficiency) -> ScenarioPreset:
    return ScenarioPreset(
        name=name,
        frequency_hz=frequency_ghz * 1e9,
        azimuth_mean=math.radians(azimuth_mean_deg),
        elevation_mean=math.radians(elevation_mean_deg),
        tx_azimuth_spread=math.radians(tx_az_deg),
        tx_elevation_spread=math.radians(tx_el_deg),
        rx_azimuth_spread=math.radians(rx_az_deg),
        rx_elevation_spread=math.radians(rx_el_deg),
        element_area=element_area,
        aperture_efficiency=aperture_efficiency,
        azimuth_mean_deg=azimuth_mean_deg,
        elevation_mean_deg=elevation_mean_deg,
        tx_azimuth_spread_deg=tx_az_deg,
        tx_elevation_spread_deg=tx_el_deg,
        rx_azimuth_spread_deg=rx_az_deg,
        rx_elevation_spread_deg=rx_el_deg,
    )


def builtin_preset(name: str) -> ScenarioPreset:
    """Return the built-in preset (UMa, UMi, or RMa)."""
    if name not in _PRESET_SPREADS_DEG:
        raise ConfigurationError(
            f"unknown preset {name!r}; valid names: {sorted(_PRESET_SPREADS_DEG)}")
    tx_az, tx_el, rx_az, rx_el = _PRESET_SPREADS_DEG[name]
    return _preset_from_degrees(
        name, _COMMON["frequency_ghz"], _COMMON["azimuth_mean_deg"],
        _COMMON["elevation_mean_deg"], tx_az, tx_el, rx_az, rx_el,
        _COMMON["element_area_wavelengths_sq"], _COMMON["aperture_efficiency"])


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario: angle statistics plus both array geometries."""

    preset: ScenarioPreset
    tx_array: PlanarArrayConfig
    rx_array: PlanarArrayConfig
    scheme: str = "discrete"
    source_document: dict | None = None

    def serialize(self) -> str:
        doc = dict(self.source_document or {})
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


_SCALAR_KEYS = {
    "preset": str,
    "frequency_ghz": float,
    "azimuth_mean_deg": float,
    "elevation_mean_deg": float,
    "tx_spread_az_deg": float,
    "tx_spread_el_deg": float,
    "rx_spread_az_deg": float,
    "rx_spread_el_deg": float,
    "aperture_wavelengths": float,
    "aperture_x_wavelengths": float,
    "aperture_y_wavelengths": float,
    "tx_aperture_x_wavelengths": float,
    "tx_aperture_y_wavelengths": float,
    "rx_aperture_x_wavelengths": float,
    "rx_aperture_y_wavelengths": float,
    "spacing_wavelengths": float,
    "element_area_wavelengths_sq": float,
    "aperture_efficiency": float,
    "scheme": str,
}

_ANGLE_KEYS = ("azimuth_mean_deg", "elevation_mean_deg", "tx_spread_az_deg",
               "tx_spread_el_deg", "rx_spread_az_deg", "rx_spread_el_deg")

DEFAULT_APERTURE_WAVELENGTHS = 15.0
DEFAULT_SPACING_WAVELENGTHS = 0.25


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a UTF-8 JSON scenario document.

    Unspecified fields fall back to the named preset; without a preset the
    full angle/antenna parameter set is required. Errors carry the failing
    key and reason.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("scenario document must be a JSON object")

    for key, value in doc.items():
        if key not in _SCALAR_KEYS:
            raise ConfigurationError(f"unknown key {key!r} in scenario document")
        want = _SCALAR_KEYS[key]
        if want is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigurationError(f"{key}: expected a number, got {value!r}")
        elif not isinstance(value, str):
            raise ConfigurationError(f"{key}: expected a string, got {value!r}")

    values = dict(_COMMON)
    if "preset" in doc:
        base = builtin_preset(doc["preset"])
        values.update({
            "tx_spread_az_deg": base.tx_azimuth_spread_deg,
            "tx_spread_el_deg": base.tx_elevation_spread_deg,
            "rx_spread_az_deg": base.rx_azimuth_spread_deg,
            "rx_spread_el_deg": base.rx_elevation_spread_deg,
        })
        name = base.name
    else:
        required = {"tx_spread_az_deg", "tx_spread_el_deg",
                    "rx_spread_az_deg", "rx_spread_el_deg"}
        missing = required - doc.keys()
        if missing:
            raise ConfigurationError(
                "preset or full parameter set required; missing "
                + ", ".join(sorted(missing)))
        name = "custom"
    for key in _SCALAR_KEYS:
        if key in doc and key not in ("preset", "scheme") \
                and not key.endswith("wavelengths") and key != "spacing_wavelengths":
            values[key] = float(doc[key])

    # range checks with key context
    if values["frequency_ghz"] <= 0:
        raise ConfigurationError("frequency_ghz: must be positive")
    if not 0 < values["aperture_efficiency"] < 1:
        raise ConfigurationError(
            f"aperture_efficiency: must lie in (0, 1), got {values['aperture_efficiency']}")
    if values["element_area_wavelengths_sq"] <= 0:
        raise ConfigurationError("element_area_wavelengths_sq: must be positive")
    for key in _ANGLE_KEYS:
        if key.endswith("spread_el_deg") or key.endswith("spread_az_deg"):
            if key in values and values[key] <= 0:
                raise ConfigurationError(f"{key}: must be positive")
    if not 0 <= values["elevation_mean_deg"] <= 90:
        raise ConfigurationError(
            f"elevation_mean_deg: must lie in [0, 90], got {values['elevation_mean_deg']}")

    preset = _preset_from_degrees(
        name, values["frequency_ghz"], values["azimuth_mean_deg"],
        values["elevation_mean_deg"], values["tx_spread_az_deg"],
        values["tx_spread_el_deg"], values["rx_spread_az_deg"],
        values["rx_spread_el_deg"], values["element_area_wavelengths_sq"],
        values["aperture_efficiency"])

    spacing = float(doc.get("spacing_wavelengths", DEFAULT_SPACING_WAVELENGTHS))
    if spacing <= 0:
        raise ConfigurationError(f"spacing_wavelengths: must be positive, got {spacing}")

    def side_aperture(side: str, axis: str) -> float:
        for key in (f"{side}_aperture_{axis}_wavelengths",
                    f"aperture_{axis}_wavelengths",
                    "aperture_wavelengths"):
            if key in doc:
                val = float(doc[key])
                if val <= 0:
                    raise ConfigurationError(f"{key}: must be positive, got {val}")
                return val
        return DEFAULT_APERTURE_WAVELENGTHS

    def build_array(side: str) -> PlanarArrayConfig:
        return PlanarArrayConfig(
            len_x=side_aperture(side, "x"),
            len_y=side_aperture(side, "y"),
            spacing=spacing,
            element_area=values["element_area_wavelengths_sq"],
            aperture_efficiency=values["aperture_efficiency"],
            wavelength=preset.wavelength_m)

    scheme = doc.get("scheme", "discrete")
    if scheme not in ("discrete", "continuous"):
        raise ConfigurationError(
            f"scheme: must be 'discrete' or 'continuous', got {scheme!r}")

    return ScenarioConfig(preset=preset, tx_array=build_array("tx"),
                          rx_array=build_array("rx"), scheme=scheme,
                          source_document=doc)


def with_aperture_scale(config: ScenarioConfig, scale: float) -> ScenarioConfig:
    """Copy of ``config`` with both apertures scaled by ``scale``."""
    if scale <= 0:
        raise ConfigurationError(f"scale must be positive, got {scale}")
    if scale == 1.0:
        return config
    tx = replace(config.tx_array, len_x=config.tx_array.len_x * scale,
                 len_y=config.tx_array.len_y * scale)
    rx = replace(config.rx_array, len_x=config.rx_array.len_x * scale,
                 len_y=config.rx_array.len_y * scale)
    return replace(config, tx_array=tx, rx_array=rx)
