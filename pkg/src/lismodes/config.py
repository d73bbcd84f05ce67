"""JSON experiment configuration (schema version 1).

Example::

    {
      "schema_version": 1,
      "frequency_hz": 28e9,
      "tx": {"len_u": 0.05, "len_v": 0.05, "center": [0, 0, 0], "angles_deg": [0, 0]},
      "rx": {"area_m2": [0.0025], "aspect": 1.0, "orientation": "parallel"},
      "distance": {"d2_over_ar": {"start": 0.01, "stop": 100, "num": 9, "spacing": "log"}},
      "counting": {"rule": "knee"},
      "svd": {"method": "exact", "seed": 0, "k_max": 64}
    }

``rx`` may instead hold an explicit surface (``len_u``, ``len_v``,
``center``, ``angles_deg``) for a single ``link`` run, in which case
``distance`` is omitted. Surface angles are rotations about the fixed x
axis and then the fixed y axis, in degrees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from lismodes.emkernel import DEFAULT_MEMORY_CAP
from lismodes.errors import InvalidArgument
from lismodes.modes import CountingRule, Knee, Relative

SCHEMA_VERSION = 1
ORIENTATIONS = ("parallel", "perpendicular")
ANALYSES = ("full", "gain")


class ConfigError(InvalidArgument):
    pass


@dataclass(frozen=True)
class SurfaceSpec:
    len_u: float
    len_v: float
    center: tuple = (0.0, 0.0, 0.0)
    angles_deg: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class RxSpec:
    areas: tuple = ()
    aspect: float = 1.0
    orientation: str = "parallel"
    surface: Optional[SurfaceSpec] = None


@dataclass(frozen=True)
class DistanceSpec:
    kind: str  # "d" or "d2_over_ar"
    values: tuple


@dataclass(frozen=True)
class SVDSpec:
    method: str = "exact"
    seed: int = 0
    k_max: int = 64


@dataclass(frozen=True)
class ExperimentConfig:
    frequency_hz: float
    tx: SurfaceSpec
    rx: RxSpec
    distance: Optional[DistanceSpec] = None
    analysis: str = "full"
    mesh_lambda_frac: Optional[float] = None
    counting: CountingRule = field(default_factory=Knee)
    svd: SVDSpec = field(default_factory=SVDSpec)
    top_k: int = 5
    quad_tol: float = 1e-8
    noise: float = 1.0
    total_power: float = 100.0
    polarization: str = "u"
    workers: int = 1
    memory_cap: int = DEFAULT_MEMORY_CAP
    output: Optional[str] = None

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        seed = kw.pop("seed", None)
        cfg = replace(self, **kw)
        if seed is not None:
            cfg = replace(cfg, svd=replace(cfg.svd, seed=int(seed)))
        return cfg

    def sweep_points(self) -> list:
        """Sorted (A_R, d) pairs."""
        if self.rx.surface is not None:
            return [(self.rx.surface.len_u * self.rx.surface.len_v, None)]
        pts = set()
        for a in self.rx.areas:
            for x in self.distance.values:
                d = x if self.distance.kind == "d" else math.sqrt(x * a)
                pts.add((float(a), float(d)))
        return sorted(pts)


def expand_range(spec: Any, where: str) -> tuple:
    """A number, a list of numbers, or {start, stop, num, spacing}."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        vals = [float(spec)]
    elif isinstance(spec, list):
        vals = [_number(v, f"{where}[{i}]") for i, v in enumerate(spec)]
    elif isinstance(spec, dict):
        _no_extra(spec, {"start", "stop", "num", "spacing"}, where)
        start = _number(_req(spec, "start", where), f"{where}.start")
        stop = _number(_req(spec, "stop", where), f"{where}.stop")
        num = _integer(_req(spec, "num", where), f"{where}.num", minimum=1)
        spacing = spec.get("spacing", "log")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"{where}: log spacing needs positive bounds")
            vals = list(np.logspace(math.log10(start), math.log10(stop), num))
        elif spacing == "linear":
            vals = list(np.linspace(start, stop, num))
        else:
            raise ConfigError(f"{where}.spacing: expected 'log' or 'linear', got {spacing!r}")
    else:
        raise ConfigError(f"{where}: expected a number, list or range object")
    if not vals:
        raise ConfigError(f"{where}: empty range")
    for i, v in enumerate(vals):
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"{where}[{i}]: must be positive, got {v}")
    return tuple(float(v) for v in vals)


def _req(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}: missing required field '{key}'")
    return obj[key]


def _no_extra(obj: dict, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(extra)}")


def _number(v, where: str, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}: expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{where}: must be positive, got {v}")
    return float(v)


def _integer(v, where: str, minimum: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{where}: expected an integer >= {minimum}, got {v!r}")
    return v


def _vector(v, n: int, where: str) -> tuple:
    if not isinstance(v, list) or len(v) != n:
        raise ConfigError(f"{where}: expected a list of {n} numbers")
    return tuple(_number(x, f"{where}[{i}]") for i, x in enumerate(v))


def _surface(obj, where: str) -> SurfaceSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    _no_extra(obj, {"len_u", "len_v", "center", "angles_deg"}, where)
    return SurfaceSpec(
        len_u=_number(_req(obj, "len_u", where), f"{where}.len_u", positive=True),
        len_v=_number(_req(obj, "len_v", where), f"{where}.len_v", positive=True),
        center=_vector(obj.get("center", [0, 0, 0]), 3, f"{where}.center"),
        angles_deg=_vector(obj.get("angles_deg", [0, 0]), 2, f"{where}.angles_deg"),
    )


def _counting(obj, where: str) -> CountingRule:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    rule = obj.get("rule", "knee")
    if rule == "knee":
        _no_extra(obj, {"rule", "min_drop_db", "window_db", "fallback_db"}, where)
        d = Knee()
        return Knee(
            min_drop_db=_number(obj.get("min_drop_db", d.min_drop_db), f"{where}.min_drop_db", True),
            window_db=_number(obj.get("window_db", d.window_db), f"{where}.window_db", True),
            fallback_db=_number(obj.get("fallback_db", d.fallback_db), f"{where}.fallback_db", True),
        )
    if rule == "relative":
        _no_extra(obj, {"rule", "threshold_db"}, where)
        return Relative(_number(obj.get("threshold_db", 3.0), f"{where}.threshold_db", True))
    raise ConfigError(f"{where}.rule: expected 'knee' or 'relative', got {rule!r}")


_TOP_KEYS = {
    "schema_version", "frequency_hz", "tx", "rx", "distance", "analysis",
    "mesh_lambda_frac", "counting", "svd", "top_k", "quad_tol", "capacity",
    "polarization", "workers", "memory_cap_bytes", "output", "description",
}


def parse_config(doc: Any) -> ExperimentConfig:
    """Validate a decoded JSON document; errors name the offending field."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    _no_extra(doc, _TOP_KEYS, "config")
    version = _req(doc, "schema_version", "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")

    freq = _number(_req(doc, "frequency_hz", "config"), "frequency_hz", positive=True)
    tx = _surface(_req(doc, "tx", "config"), "tx")

    rx_obj = _req(doc, "rx", "config")
    if not isinstance(rx_obj, dict):
        raise ConfigError("rx: expected an object")
    if "len_u" in rx_obj:
        rx = RxSpec(surface=_surface(rx_obj, "rx"))
    else:
        _no_extra(rx_obj, {"area_m2", "aspect", "orientation"}, "rx")
        orientation = rx_obj.get("orientation", "parallel")
        if orientation not in ORIENTATIONS:
            raise ConfigError(f"rx.orientation: expected one of {ORIENTATIONS}, got {orientation!r}")
        rx = RxSpec(
            areas=expand_range(_req(rx_obj, "area_m2", "rx"), "rx.area_m2"),
            aspect=_number(rx_obj.get("aspect", 1.0), "rx.aspect", positive=True),
            orientation=orientation,
        )

    distance = None
    if rx.surface is None:
        dist_obj = _req(doc, "distance", "config")
        if not isinstance(dist_obj, dict) or len(dist_obj) != 1:
            raise ConfigError("distance: expected exactly one of 'd_m' or 'd2_over_ar'")
        (key, val), = dist_obj.items()
        if key not in ("d_m", "d2_over_ar"):
            raise ConfigError(f"distance: unknown field '{key}'")
        distance = DistanceSpec("d" if key == "d_m" else "d2_over_ar", expand_range(val, f"distance.{key}"))
    elif "distance" in doc:
        raise ConfigError("distance: not allowed with an explicit rx surface")

    analysis = doc.get("analysis", "full")
    if analysis not in ANALYSES:
        raise ConfigError(f"analysis: expected one of {ANALYSES}, got {analysis!r}")

    frac = doc.get("mesh_lambda_frac")
    if frac is not None:
        frac = _number(frac, "mesh_lambda_frac", positive=True)

    svd_obj = doc.get("svd", {})
    if not isinstance(svd_obj, dict):
        raise ConfigError("svd: expected an object")
    _no_extra(svd_obj, {"method", "seed", "k_max"}, "svd")
    method = svd_obj.get("method", "exact")
    if method not in ("exact", "randomized"):
        raise ConfigError(f"svd.method: expected 'exact' or 'randomized', got {method!r}")
    svd = SVDSpec(
        method=method,
        seed=_integer(svd_obj.get("seed", 0), "svd.seed"),
        k_max=_integer(svd_obj.get("k_max", 64), "svd.k_max", minimum=1),
    )

    cap_obj = doc.get("capacity", {})
    if not isinstance(cap_obj, dict):
        raise ConfigError("capacity: expected an object")
    _no_extra(cap_obj, {"noise", "total_power"}, "capacity")

    quad_tol = _number(doc.get("quad_tol", 1e-8), "quad_tol", positive=True)
    if quad_tol > 1e-2:
        raise ConfigError(f"quad_tol: must be at most 1e-2, got {quad_tol}")
    pol = doc.get("polarization", "u")
    if pol not in ("u", "v"):
        raise ConfigError(f"polarization: expected 'u' or 'v', got {pol!r}")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")

    return ExperimentConfig(
        frequency_hz=freq,
        tx=tx,
        rx=rx,
        distance=distance,
        analysis=analysis,
        mesh_lambda_frac=frac,
        counting=_counting(doc.get("counting", {}), "counting"),
        svd=svd,
        top_k=_integer(doc.get("top_k", 5), "top_k", minimum=1),
        quad_tol=quad_tol,
        noise=_number(cap_obj.get("noise", 1.0), "capacity.noise", positive=True),
        total_power=_number(cap_obj.get("total_power", 100.0), "capacity.total_power", positive=True),
        polarization=pol,
        workers=_integer(doc.get("workers", 1), "workers", minimum=1),
        memory_cap=_integer(doc.get("memory_cap_bytes", DEFAULT_MEMORY_CAP), "memory_cap_bytes", minimum=1),
        output=output,
    )


def loads_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(doc)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        text = fh.read()
    try:
        return loads_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
