"""Single-point evaluation, parameter sweeps, and CSV/SVG emission.

A sweep evaluates a grid of (series, axis value) points through the full
pipeline (lattice -> spectra -> Monte Carlo capacity). Every point gets
its own seed derived from (master_seed, series index, value index), so
permuting the evaluation order cannot change any individual result.
Output files are deterministic byte-for-byte for a fixed spec and seed;
wall-clock timings therefore go to stderr only and the wall_time_s CSV
column is a reserved 0.0 placeholder.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .geometry import enumerate_lattice
from .spectrum import AngleDistribution, compute_spectrum
from .capacity import (capacity_from_eigenvalues, capacity_low_snr,
                       capacity_upper_bound, cardinality_estimate,
                       continuous_aperture_budget, discrete_aperture_budget,
                       eigenvalue_trials)
from .scenarios import ScenarioConfig, builtin_preset, parse_scenario

SWEEP_AXES = ("azimuth_spread", "elevation_spread", "snr_db", "spacing", "aperture")

CSV_HEADER = ("series", "axis", "axis_value", "capacity_bits", "std_error",
              "n_r", "n_s", "wall_time_s")


@dataclass(frozen=True)
class SweepSeries:
    """One curve of a sweep: a label, a base scenario, and its base SNR."""

    label: str
    config: ScenarioConfig
    snr_db: float = 30.0

    def __post_init__(self):
        if "," in self.label or "\n" in self.label:
            raise ConfigurationError(f"series label may not contain ',': {self.label!r}")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    series: tuple[SweepSeries, ...]
    trials: int = 200
    master_seed: int = 0

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigurationError(
                f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ConfigurationError("values must be non-empty")
        diffs = np.diff(vals)
        if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ConfigurationError("values must be strictly monotone")
        if self.trials < 2:
            raise ConfigurationError(f"trials must be >= 2, got {self.trials}")
        if not self.series:
            raise ConfigurationError("at least one series is required")


@dataclass(frozen=True)
class SweepRow:
    series: str
    axis: str
    axis_value: float
    capacity_bits: float
    std_error: float
    n_r: int
    n_s: int
    wall_time_s: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def __post_init__(self):
        for row in self.rows:
            if math.isnan(row.capacity_bits) or math.isnan(row.std_error):
                raise ConfigurationError(f"NaN in sweep row {row}")


def derive_point_seed(master_seed: int, series_index: int, value_index: int) -> int:
    """Independent seed for one sweep point."""
    ss = np.random.SeedSequence(entropy=[int(master_seed) & ((1 << 64) - 1),
                                         series_index, value_index])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return (int(a) << 64) | int(b)


# -- point evaluation ---------------------------------------------------------

class PipelineCache:
    """Memoizes lattices and spectra across sweep points (pure recomputation)."""

    def __init__(self):
        self._lattices = {}
        self._spectra = {}

    def lattice(self, array):
        key = array.key
        if key not in self._lattices:
            self._lattices[key] = enumerate_lattice(array)
        return self._lattices[key]

    def spectrum(self, dist, lattice):
        key = (dist.key, lattice.key)
        if key not in self._spectra:
            self._spectra[key] = compute_spectrum(dist, lattice)
        return self._spectra[key]


def evaluate_point(config: ScenarioConfig, snr_db: float, trials: int,
                   master_seed: int, threads: int | None = None,
                   cache: PipelineCache | None = None) -> dict:
    """Full pipeline for one configuration at one SNR.

    Returns a dict with the capacity estimate, mode counts, the isotropic
    upper bound, and the low-SNR closed form for the same budget.
    """
    cache = cache or PipelineCache()
    snr = 10.0 ** (snr_db / 10.0)
    tx_lat = cache.lattice(config.tx_array)
    rx_lat = cache.lattice(config.rx_array)
    tx_spec = cache.spectrum(config.preset.tx_distribution(), tx_lat)
    rx_spec = cache.spectrum(config.preset.rx_distribution(), rx_lat)
    if config.scheme == "continuous":
        budget = continuous_aperture_budget(config.tx_array, config.rx_array,
                                            snr, tx_spec.n_cells)
    else:
        budget = discrete_aperture_budget(config.tx_array, config.rx_array,
                                          snr, tx_spec.n_cells)
    eigs = eigenvalue_trials(rx_spec, tx_spec, trials, master_seed, threads=threads)
    estimate = capacity_from_eigenvalues(eigs, budget)
    return {
        "estimate": estimate,
        "n_r": rx_spec.n_cells,
        "n_s": tx_spec.n_cells,
        "n_s_approx": cardinality_estimate(config.tx_array.len_x,
                                           config.tx_array.len_y),
        "upper_bound_bits": capacity_upper_bound(budget, rx_spec.n_cells),
        "low_snr_bits": capacity_low_snr(budget),
    }


def run_point(config: ScenarioConfig, snr_db: float = 30.0, trials: int = 200,
              master_seed: int = 0, threads: int | None = None) -> dict:
    """Evaluate one point and return printable key/value results."""
    res = evaluate_point(config, snr_db, trials, master_seed, threads=threads)
    est = res["estimate"]
    return {
        "capacity_bits": est.mean_bits,
        "std_error": est.std_error,
        "trials": est.trials,
        "n_r": res["n_r"],
        "n_s": res["n_s"],
        "upper_bound_bits": res["upper_bound_bits"],
        "low_snr_bits": res["low_snr_bits"],
    }


def _apply_axis(series: SweepSeries, axis: str, value: float):
    """Resolve one sweep point into (ScenarioConfig, snr_db)."""
    cfg, snr_db = series.config, series.snr_db
    if axis == "snr_db":
        return cfg, value
    if axis == "spacing":
        # entering the continuous regime: element area cannot exceed spacing^2
        area = min(cfg.tx_array.element_area, value * value)
        tx = replace(cfg.tx_array, spacing=value, element_area=area)
        rx = replace(cfg.rx_array, spacing=value,
                     element_area=min(cfg.rx_array.element_area, value * value))
        return replace(cfg, tx_array=tx, rx_array=rx), snr_db
    if axis == "aperture":
        tx = replace(cfg.tx_array, len_x=value, len_y=value)
        rx = replace(cfg.rx_array, len_x=value, len_y=value)
        return replace(cfg, tx_array=tx, rx_array=rx), snr_db
    if axis == "azimuth_spread":
        rad = math.radians(value)
        preset = replace(cfg.preset, tx_azimuth_spread=rad, rx_azimuth_spread=rad,
                         tx_azimuth_spread_deg=value, rx_azimuth_spread_deg=value)
        return replace(cfg, preset=preset), snr_db
    if axis == "elevation_spread":
        rad = math.radians(value)
        preset = replace(cfg.preset, tx_elevation_spread=rad, rx_elevation_spread=rad,
                         tx_elevation_spread_deg=value, rx_elevation_spread_deg=value)
        return replace(cfg, preset=preset), snr_db
    raise ConfigurationError(f"unsupported axis {axis!r}")


def run_sweep(spec: SweepSpec, threads: int | None = None,
              progress=None) -> SweepResult:
    """Evaluate every (series, value) point of ``spec``.

    Point seeds derive from (master_seed, series index, value index), so
    results are independent of evaluation order.
    """
    progress = progress if progress is not None else sys.stderr
    cache = PipelineCache()
    rows = []
    for si, series in enumerate(spec.series):
        for vi, value in enumerate(spec.values):
            cfg, snr_db = _apply_axis(series, spec.axis, value)
            seed = derive_point_seed(spec.master_seed, si, vi)
            t0 = time.perf_counter()
            res = evaluate_point(cfg, snr_db, spec.trials, seed,
                                 threads=threads, cache=cache)
            dt = time.perf_counter() - t0
            est = res["estimate"]
            if progress:
                print(f"[sweep] {series.label} {spec.axis}={value:g}: "
                      f"{est.mean_bits:.4f} +- {est.std_error:.4f} bit/s/Hz "
                      f"({dt:.1f}s)", file=progress)
            rows.append(SweepRow(series=series.label, axis=spec.axis,
                                 axis_value=value,
                                 capacity_bits=est.mean_bits,
                                 std_error=est.std_error,
                                 n_r=res["n_r"], n_s=res["n_s"],
                                 wall_time_s=0.0))
    return SweepResult(rows=tuple(rows))


# -- CSV ----------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in result.rows:
        writer.writerow([r.series, r.axis, _fmt_float(r.axis_value),
                         _fmt_float(r.capacity_bits), _fmt_float(r.std_error),
                         r.n_r, r.n_s, _fmt_float(r.wall_time_s)])
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(result))


def parse_csv(path) -> SweepResult:
    """Inverse of :func:`emit_csv`; exact float round-trip."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ConfigurationError(f"unexpected CSV header {header}")
        rows = []
        for rec in reader:
            rows.append(SweepRow(series=rec[0], axis=rec[1],
                                 axis_value=float(rec[2]),
                                 capacity_bits=float(rec[3]),
                                 std_error=float(rec[4]),
                                 n_r=int(rec[5]), n_s=int(rec[6]),
                                 wall_time_s=float(rec[7])))
    return SweepResult(rows=tuple(rows))


# -- SVG ----------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#e377c2", "#7f7f7f", "#bcbd22")

_AXIS_LABELS = {
    "azimuth_spread": "azimuth angle spread (deg)",
    "elevation_spread": "elevation angle spread (deg)",
    "snr_db": "SNR (dB)",
    "spacing": "antenna spacing (wavelengths)",
    "aperture": "aperture side (wavelengths)",
}


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-9 * step:
        out.append(round(t, 12))
        t += step
    return out or [lo]


def format_svg(result: SweepResult, title: str = "") -> str:
    """Standalone SVG line chart: one polyline per multi-point series,
    markers for all points, error bars from std_error."""
    if not result.rows:
        raise ConfigurationError("SVG needs at least one row")
    width, height = 800, 520
    ml, mr, mt, mb = 70, 170, 40, 55
    pw, ph = width - ml - mr, height - mt - mb

    series = []
    for r in result.rows:
        if r.series not in series:
            series.append(r.series)
    xs = [r.axis_value for r in result.rows]
    ylo_vals = [r.capacity_bits - r.std_error for r in result.rows]
    yhi_vals = [r.capacity_bits + r.std_error for r in result.rows]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ylo_vals + [0.0]), max(yhi_vals)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y1 = y0 + 1.0
    y1 += 0.05 * (y1 - y0)

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    axis_label = _AXIS_LABELS.get(result.rows[0].axis, result.rows[0].axis)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{ml + pw / 2:.1f}" y="24" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="15">{_esc(title)}</text>')
    # axes and ticks
    parts.append(f'<g stroke="black" fill="none">'
                 f'<path d="M {ml} {mt} V {mt + ph} H {ml + pw}"/></g>')
    for t in _ticks(x0, x1):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + ph:.1f}" x2="{x:.1f}" '
                     f'y2="{mt + ph + 5:.1f}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{mt + ph + 20:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{t:g}</text>')
    for t in _ticks(y0, y1):
        y = py(t)
        parts.append(f'<line x1="{ml - 5:.1f}" y1="{y:.1f}" x2="{ml:.1f}" '
                     f'y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 9:.1f}" y="{y + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="12">{t:g}</text>')
        parts.append(f'<line x1="{ml:.1f}" y1="{y:.1f}" x2="{ml + pw:.1f}" '
                     f'y2="{y:.1f}" stroke="#dddddd"/>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{_esc(axis_label)}</text>')
    parts.append(f'<text x="18" y="{mt + ph / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 18 {mt + ph / 2:.1f})">capacity (bit/s/Hz)</text>')

    for i, name in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        rows = [r for r in result.rows if r.series == name]
        rows.sort(key=lambda r: r.axis_value)
        pts = [(px(r.axis_value), py(r.capacity_bits)) for r in rows]
        for r, (x, y) in zip(rows, pts):
            if r.std_error > 0:
                parts.append(f'<line x1="{x:.1f}" y1="{py(r.capacity_bits - r.std_error):.1f}" '
                             f'x2="{x:.1f}" y2="{py(r.capacity_bits + r.std_error):.1f}" '
                             f'stroke="{color}"/>')
        if len(pts) >= 2:
            coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
                         f'points="{coords}"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="{color}"/>')
        ly = mt + 16 + 18 * i
        parts.append(f'<line x1="{ml + pw + 12}" y1="{ly - 4}" x2="{ml + pw + 36}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.8"/>')
        parts.append(f'<text x="{ml + pw + 42}" y="{ly}" font-family="sans-serif" '
                     f'font-size="12">{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(result: SweepResult, path, title: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_svg(result, title=title))


# -- figure presets -----------------------------------------------------------

def _base_config(preset_name: str, aperture: float, spacing: float,
                 scheme: str = "discrete") -> ScenarioConfig:
    doc = {"preset": preset_name, "aperture_wavelengths": aperture,
           "spacing_wavelengths": spacing, "scheme": scheme}
    return parse_scenario(json.dumps(doc))


def fig4_spec(trials: int = 200, master_seed: int = 0,
              scale: float = 1.0) -> SweepSpec:
    """Capacity vs azimuth spread for several elevation spreads.

    Swept spreads are applied to both link ends; the series are elevation
    spreads {2, 5, 10, 20} deg (documented defaults). 30 dB, 15*scale
    wavelength square apertures, quarter-wavelength spacing.
    """
    series = []
    for el in (2.0, 5.0, 10.0, 20.0):
        cfg = _base_config("UMa", 15.0 * scale, 0.25)
        rad = math.radians(el)
        preset = replace(cfg.preset, name=f"el{el:g}",
                         tx_elevation_spread=rad, rx_elevation_spread=rad,
                         tx_elevation_spread_deg=el, rx_elevation_spread_deg=el)
        series.append(SweepSeries(label=f"elev {el:g} deg",
                                  config=replace(cfg, preset=preset),
                                  snr_db=30.0))
    values = tuple(float(v) for v in range(10, 101, 10))
    return SweepSpec(axis="azimuth_spread", values=values,
                     series=tuple(series), trials=trials, master_seed=master_seed)


def fig5_spec(trials: int = 200, master_seed: int = 0,
              scale: float = 1.0) -> SweepSpec:
    """Capacity vs SNR for {UMa, UMi, RMa} x {15, 30} wavelength apertures."""
    series = []
    for name in ("UMa", "UMi", "RMa"):
        for aperture in (15.0, 30.0):
            cfg = _base_config(name, aperture * scale, 0.25)
            series.append(SweepSeries(
                label=f"{name} {aperture * scale:g}w", config=cfg))
    values = tuple(float(v) for v in range(-10, 41, 5))
    return SweepSpec(axis="snr_db", values=values, series=tuple(series),
                     trials=trials, master_seed=master_seed)


def fig6_spec(trials: int = 200, master_seed: int = 0,
              scale: float = 1.0) -> SweepSpec:
    """Capacity vs antenna spacing, discrete scheme, element area capped at
    spacing^2 once spacing drops below an eighth wavelength."""
    series = []
    for name in ("UMa", "UMi", "RMa"):
        cfg = _base_config(name, 15.0 * scale, 0.5)
        series.append(SweepSeries(label=name, config=cfg, snr_db=30.0))
    values = (0.5, 0.25, 0.125, 0.0625)
    return SweepSpec(axis="spacing", values=values, series=tuple(series),
                     trials=trials, master_seed=master_seed)


def parse_sweep_spec(text: str) -> SweepSpec:
    """Sweep spec from its JSON document form."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid sweep spec JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("sweep spec must be a JSON object")
    known = {"axis", "values", "series", "trials", "seed"}
    unknown = doc.keys() - known
    if unknown:
        raise ConfigurationError(f"unknown sweep spec keys: {sorted(unknown)}")
    for key in ("axis", "values", "series"):
        if key not in doc:
            raise ConfigurationError(f"sweep spec missing {key!r}")
    series = []
    for i, item in enumerate(doc["series"]):
        if not isinstance(item, dict) or "scenario" not in item:
            raise ConfigurationError(f"series[{i}] must be an object with 'scenario'")
        cfg = parse_scenario(json.dumps(item["scenario"]))
        series.append(SweepSeries(label=str(item.get("label", f"series{i}")),
                                  config=cfg,
                                  snr_db=float(item.get("snr_db", 30.0))))
    return SweepSpec(axis=str(doc["axis"]),
                     values=tuple(float(v) for v in doc["values"]),
                     series=tuple(series),
                     trials=int(doc.get("trials", 200)),
                     master_seed=int(doc.get("seed", 0)))
