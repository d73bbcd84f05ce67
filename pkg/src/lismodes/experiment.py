"""Single-link analysis, parameter sweeps and figure presets, all emitting CSV."""

from __future__ import annotations

import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from lismodes.capacity import capacity, waterfill
from lismodes.config import DistanceSpec, ExperimentConfig, RxSpec, SurfaceSpec, SVDSpec
from lismodes.emkernel import assemble_coupling_matrix, coupling_gram, dense_bytes
from lismodes.errors import ResourceLimitError
from lismodes.geometry import (
    Surface,
    Wave,
    build_mesh,
    check_separated,
    fraunhofer_distance,
    mesh_size,
)
from lismodes.linkbudget import GAIN_LIMIT, gain_exact, to_db
from lismodes.modes import count_modes, mode_spectrum, n_limit_parallel, n_paraxial, spectrum_from_gram

log = logging.getLogger(__name__)

AUTO_MESH_LIMIT = 5000


class PointError(RuntimeError):
    """A solver failure annotated with the sweep point that caused it."""


def tx_surface(cfg: ExperimentConfig) -> Surface:
    t = cfg.tx
    return Surface.from_angles(t.center, t.angles_deg, t.len_u, t.len_v)


def rx_surface(cfg: ExperimentConfig, tx: Surface, A_R: float, d: Optional[float]) -> Surface:
    """Receive surface at center distance ``d`` along the transmit normal.

    Height (``len_v``) to width ratio is ``rx.aspect``. The perpendicular
    layout turns the surface 90 degrees about the transmit u axis.
    """
    rx = cfg.rx
    if rx.surface is not None:
        s = rx.surface
        return Surface.from_angles(s.center, s.angles_deg, s.len_u, s.len_v)
    len_u = math.sqrt(A_R / rx.aspect)
    len_v = math.sqrt(A_R * rx.aspect)
    center = tx.center + d * tx.normal
    if rx.orientation == "parallel":
        return Surface(center, tx.basis_u, tx.basis_v, len_u, len_v)
    return Surface(center, tx.basis_u, tx.normal, len_u, len_v)


def mesh_spacing(surface: Surface, wave: Wave, frac: Optional[float]) -> float:
    if frac is not None:
        return frac * wave.wavelength
    h = 0.25 * wave.wavelength
    if mesh_size(surface, h) > AUTO_MESH_LIMIT:
        log.warning(
            "surface %.4g x %.4g m needs more than %d points at lambda/4; using lambda/2",
            surface.len_u, surface.len_v, AUTO_MESH_LIMIT,
        )
        h = 0.5 * wave.wavelength
    return h


def spectrum_for(cfg: ExperimentConfig, tx: Surface, rx: Surface, wave: Wave):
    mesh_t = build_mesh(tx, mesh_spacing(tx, wave, cfg.mesh_lambda_frac))
    mesh_r = build_mesh(rx, mesh_spacing(rx, wave, cfg.mesh_lambda_frac))
    if dense_bytes(len(mesh_r), len(mesh_t)) <= cfg.memory_cap:
        K = assemble_coupling_matrix(mesh_t, mesh_r, wave, memory_cap=cfg.memory_cap)
        return mode_spectrum(K, cfg.svd.k_max, cfg.svd.method, cfg.svd.seed, compute_vectors=False)
    small = min(len(mesh_t), len(mesh_r))
    if dense_bytes(small, small) > cfg.memory_cap:
        raise ResourceLimitError(dense_bytes(small, small), cfg.memory_cap)
    log.info("coupling matrix %dx%d over memory cap; using blocked Gram route", len(mesh_r), len(mesh_t))
    return spectrum_from_gram(coupling_gram(mesh_t, mesh_r, wave), cfg.svd.k_max)


def columns(cfg: ExperimentConfig) -> list:
    if cfg.analysis == "gain":
        return ["d", "d2_over_AR", "A_R", "aspect", "orientation", "gain_exact", "gain_exact_db",
                "gain_friis", "gain_friis_db", "gain_limit_db", "error"]
    sig = [f"sigma2_db_rel_{i}" for i in range(1, cfg.top_k + 1)]
    return (
        ["d", "d2_over_AR", "A_T", "A_R", "aspect", "orientation", "N_counted", "N_paraxial", "N_limit"]
        + sig
        + ["gain_exact", "gain_exact_db", "gain_friis", "gain_friis_db", "gain_limit_db", "capacity_bits", "error"]
    )


def _g(x: float) -> str:
    return f"{x:.10g}"


def _db(x: float) -> str:
    return f"{x:.3f}"


def evaluate_point(cfg: ExperimentConfig, A_R: float, d: Optional[float]) -> dict:
    """Compute one CSV row; raises :class:`PointError` on failure."""
    wave = Wave(cfg.frequency_hz)
    tx = tx_surface(cfg)
    try:
        rx = rx_surface(cfg, tx, A_R, d)
        if d is None:
            d = float(np.linalg.norm(rx.center - tx.center))
        check_separated(tx, rx)
        pol = tx.basis_u if cfg.polarization == "u" else tx.basis_v
        gain = gain_exact(rx, tx.center, pol, cfg.quad_tol)
        row = {
            "d": _g(d),
            "d2_over_AR": _g(d * d / rx.area),
            "A_R": _g(rx.area),
            "aspect": _g(rx.len_v / rx.len_u),
            "orientation": cfg.rx.orientation if cfg.rx.surface is None else "explicit",
            "gain_exact": _g(gain.gain_exact),
            "gain_exact_db": _db(gain.gain_exact_db),
            "gain_friis": _g(gain.gain_friis),
            "gain_friis_db": _db(gain.gain_friis_db),
            "gain_limit_db": _db(to_db(GAIN_LIMIT)),
            "error": "",
        }
        if cfg.analysis == "gain":
            return row
        spec = spectrum_for(cfg, tx, rx, wave)
        s2 = spec.sigma2
        s2_rel = s2 / s2[0] if s2[0] > 0 else s2
        db = spec.sigma2_db_rel()
        for i in range(cfg.top_k):
            row[f"sigma2_db_rel_{i + 1}"] = _db(db[i]) if i < len(db) else ""
        gains = s2_rel[s2_rel > 0]
        alloc = waterfill(gains, cfg.noise, cfg.total_power)
        row.update(
            A_T=_g(tx.area),
            N_counted=str(count_modes(spec, cfg.counting)),
            N_paraxial=_g(n_paraxial(tx.area, rx.area, wave, d)),
            N_limit=_g(n_limit_parallel(min(tx.area, rx.area), wave)),
            capacity_bits=_g(capacity(alloc)),
        )
        return row
    except Exception as exc:
        where = f"A_R={A_R:.6g} m^2, d={d:.6g} m" if d is not None else f"A_R={A_R:.6g} m^2"
        raise PointError(f"{type(exc).__name__}: {exc} ({where}, {cfg.rx.orientation})") from exc


def _point_job(args) -> dict:
    cfg, A_R, d = args
    try:
        return evaluate_point(cfg, A_R, d)
    except PointError as exc:
        ratio = d * d / A_R if d is not None else float("nan")
        return {"d": _g(d) if d is not None else "", "d2_over_AR": _g(ratio), "A_R": _g(A_R), "error": str(exc)}


def run_link(cfg: ExperimentConfig) -> list:
    """Evaluate the single geometry point of ``cfg``; errors propagate."""
    pts = cfg.sweep_points()
    if len(pts) != 1:
        raise PointError(f"link needs exactly one geometry point, config has {len(pts)}")
    return [evaluate_point(cfg, *pts[0])]


def write_rows(fh, cols: list, rows) -> int:
    w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    fh.flush()
    n = 0
    for row in rows:
        w.writerow(row)
        fh.flush()
        n += 1
    return n


def run_sweep(cfg: ExperimentConfig, out=None) -> int:
    """Write one CSV row per sweep point in ascending (A_R, d) order.

    Failures land in the ``error`` column. With ``cfg.workers > 1`` points
    run in worker processes; rows are still written in sweep order.
    Returns the number of data rows.
    """
    pts = cfg.sweep_points()
    jobs = [(cfg, a, d) for a, d in pts]

    def rows():
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = pool.map(_point_job, jobs)
                for i, row in enumerate(results, 1):
                    _progress(i, len(jobs), row)
                    yield row
        else:
            for i, job in enumerate(jobs, 1):
                row = _point_job(job)
                _progress(i, len(jobs), row)
                yield row

    return _emit(out, columns(cfg), rows())


def _progress(i: int, n: int, row: dict) -> None:
    status = row["error"] or f"N={row.get('N_counted', '-')} gain={row.get('gain_exact_db', '-')} dB"
    log.info("point %d/%d d2/A_R=%s: %s", i, n, row.get("d2_over_AR", ""), status)


def _emit(out, cols, rows) -> int:
    if out is None:
        return write_rows(sys.stdout, cols, rows)
    if hasattr(out, "write"):
        return write_rows(out, cols, rows)
    with open(out, "w", newline="") as fh:
        return write_rows(fh, cols, rows)


def fraunhofer_rows(sizes=(0.1, 0.5, 1.0), f_min=3e9, f_max=300e9, num=21):
    for D in sizes:
        for f in np.logspace(math.log10(f_min), math.log10(f_max), num):
            wave = Wave(float(f))
            yield {
                "D_m": _g(D),
                "frequency_hz": _g(wave.frequency),
                "wavelength_m": _g(wave.wavelength),
                "fraunhofer_m": _g(fraunhofer_distance(D, wave)),
            }


# Presets. Axis ranges are approximate: d^2/A_R is
# swept over [1e-2, 1e2], the receiving surface is 0.25 m^2 and the
# transmitting one 5 cm x 5 cm.

PRESET_AREA = 0.25
PRESET_RATIOS = DistanceSpec("d2_over_ar", tuple(float(x) for x in np.logspace(-2, 2, 9)))


def _fig3(freq: float, orientation: str, aspect: float, frac: Optional[float] = None) -> ExperimentConfig:
    return ExperimentConfig(
        frequency_hz=freq,
        tx=SurfaceSpec(0.05, 0.05),
        rx=RxSpec(areas=(PRESET_AREA,), aspect=aspect, orientation=orientation),
        distance=PRESET_RATIOS,
        mesh_lambda_frac=frac,
        svd=SVDSpec(k_max=128),
    )


def _fig4() -> ExperimentConfig:
    return ExperimentConfig(
        frequency_hz=28e9,
        tx=SurfaceSpec(0.05, 0.05),
        rx=RxSpec(areas=(1.0,)),
        distance=DistanceSpec("d2_over_ar", tuple(float(x) for x in np.logspace(-2, 2, 17))),
        analysis="gain",
    )


@dataclass(frozen=True)
class Preset:
    description: str
    config: Optional[Callable[[], ExperimentConfig]] = None


PRESETS = {
    "fig1": Preset("Fraunhofer distance 2D^2/lambda over 3-300 GHz for D = 0.1, 0.5, 1 m"),
    "fig3-28ghz-parallel-square": Preset(
        "mode count vs d^2/A_R, 28 GHz, parallel square surfaces", lambda: _fig3(28e9, "parallel", 1.0)
    ),
    "fig3-28ghz-parallel-rect": Preset(
        "mode count vs d^2/A_R, 28 GHz, parallel 4:1 rectangle", lambda: _fig3(28e9, "parallel", 4.0)
    ),
    "fig3-28ghz-perpendicular-square": Preset(
        "mode count vs d^2/A_R, 28 GHz, perpendicular square (crossing layouts report errors)",
        lambda: _fig3(28e9, "perpendicular", 1.0),
    ),
    "fig3-60ghz-parallel-square": Preset(
        "mode count vs d^2/A_R, 60 GHz, parallel square, lambda/2 mesh",
        lambda: _fig3(60e9, "parallel", 1.0, 0.5),
    ),
    "fig3-60ghz-parallel-rect": Preset(
        "mode count vs d^2/A_R, 60 GHz, parallel 4:1 rectangle, lambda/2 mesh",
        lambda: _fig3(60e9, "parallel", 4.0, 0.5),
    ),
    "fig4": Preset("isotropic-to-square gain vs d^2/A_R with Friis and 1/3 limit", _fig4),
}


def run_preset(name: str, out=None, seed: Optional[int] = None, workers: Optional[int] = None,
               mesh_lambda_frac: Optional[float] = None) -> int:
    if name not in PRESETS:
        raise KeyError(name)
    preset = PRESETS[name]
    if preset.config is None:
        return _emit(out, ["D_m", "frequency_hz", "wavelength_m", "fraunhofer_m"], fraunhofer_rows())
    cfg = preset.config().with_overrides(seed=seed, workers=workers, mesh_lambda_frac=mesh_lambda_frac)
    return run_sweep(cfg, out)


def rows_to_csv(cfg: ExperimentConfig, rows: list) -> str:
    buf = io.StringIO()
    write_rows(buf, columns(cfg), rows)
    return buf.getvalue()
