import csv
import io
import json
import math

import pytest

from lismodes.cli import main
from lismodes.config import ConfigError, expand_range, loads_config, parse_config
from lismodes.experiment import PRESETS, columns, run_link, run_sweep

BASE = {
    "schema_version": 1,
    "frequency_hz": 28e9,
    "tx": {"len_u": 0.05, "len_v": 0.05},
    "rx": {"area_m2": 0.0025},
    "distance": {"d2_over_ar": 1000},
}


def doc(**over):
    d = json.loads(json.dumps(BASE))
    d.update(over)
    return d


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return p


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- parsing ----------------------------------------------------------------


def test_defaults():
    cfg = parse_config(doc())
    assert cfg.analysis == "full" and cfg.top_k == 5 and cfg.svd.method == "exact"
    (A, d), = cfg.sweep_points()
    assert A == 0.0025 and d == pytest.approx(math.sqrt(1000 * 0.0025))


def test_expand_range():
    assert expand_range(2.0, "x") == (2.0,)
    assert expand_range([3, 1], "x") == (3.0, 1.0)
    r = expand_range({"start": 1, "stop": 100, "num": 3}, "x")
    assert r == pytest.approx((1.0, 10.0, 100.0))
    r = expand_range({"start": 1, "stop": 2, "num": 3, "spacing": "linear"}, "x")
    assert r == pytest.approx((1.0, 1.5, 2.0))
    with pytest.raises(ConfigError, match=r"x\[0\]"):
        expand_range([0.0], "x")


def test_json_syntax_error_has_line_and_column():
    with pytest.raises(ConfigError, match=r"line 3 column"):
        loads_config('{\n "schema_version": 1,\n "tx": ,\n}')


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.update(schema_version=2), "schema_version"),
        (lambda d: d["tx"].update(len_u=-1), "tx.len_u"),
        (lambda d: d["rx"].update(orientation="diagonal"), "rx.orientation"),
        (lambda d: d.update(distance={"d_m": 1, "d2_over_ar": 1}), "distance"),
        (lambda d: d.update(svd={"method": "lanczos"}), "svd.method"),
        (lambda d: d.update(counting={"rule": "relative", "threshold_db": 0}), "counting.threshold_db"),
        (lambda d: d.update(quad_tol=0.5), "quad_tol"),
        (lambda d: d.update(bogus=1), "bogus"),
        (lambda d: d.pop("frequency_hz"), "frequency_hz"),
    ],
)
def test_field_errors(mutate, field):
    d = doc()
    mutate(d)
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(d)


def test_explicit_rx_surface_forbids_distance():
    d = doc(rx={"len_u": 0.05, "len_v": 0.05, "center": [0, 0, 0.2]})
    with pytest.raises(ConfigError, match="distance"):
        parse_config(d)
    d.pop("distance")
    assert parse_config(d).sweep_points() == [(pytest.approx(0.0025), None)]


# --- runs -------------------------------------------------------------------


def test_link_far_field_single_row():
    rows = run_link(parse_config(doc()))
    assert len(rows) == 1
    r = rows[0]
    assert r["N_counted"] == "1" and r["error"] == ""
    assert float(r["gain_exact"]) == pytest.approx(float(r["gain_friis"]), rel=1e-3)


def test_link_perpendicular_near_field():
    cfg = parse_config(doc(rx={"area_m2": 0.0025, "orientation": "perpendicular"}, distance={"d2_over_ar": 1}))
    r = run_link(cfg)[0]
    assert int(r["N_counted"]) >= 2


def test_link_rejects_sweeps():
    cfg = parse_config(doc(distance={"d2_over_ar": [1, 10]}))
    with pytest.raises(RuntimeError):
        run_link(cfg)


def test_sweep_records_point_errors():
    # at d^2/A_R = 0.01 a perpendicular surface crosses the transmit plane
    cfg = parse_config(doc(rx={"area_m2": 0.0025, "orientation": "perpendicular"}, distance={"d2_over_ar": [0.01, 1]}))
    buf = io.StringIO()
    assert run_sweep(cfg, buf) == 2
    rows = read_csv(buf.getvalue())
    assert "GeometryError" in rows[0]["error"]
    assert rows[1]["error"] == "" and int(rows[1]["N_counted"]) >= 2


def test_parallel_workers_keep_order():
    d = doc(distance={"d2_over_ar": [100, 0.5, 10, 1, 3]}, analysis="gain")
    a, b = io.StringIO(), io.StringIO()
    run_sweep(parse_config(d), a)
    run_sweep(parse_config(dict(d, workers=3)), b)
    assert a.getvalue() == b.getvalue()
    ratios = [float(r["d2_over_AR"]) for r in read_csv(a.getvalue())]
    assert ratios == sorted(ratios)


def test_columns():
    cols = columns(parse_config(doc()))
    assert cols[:3] == ["d", "d2_over_AR", "A_T"]
    assert cols[-1] == "error" and "sigma2_db_rel_5" in cols


# --- command line -------------------------------------------------------------


def test_cli_validate(tmp_path, capsys):
    assert main(["validate-config", "--config", str(write(tmp_path, doc()))]) == 0
    assert "ok" in capsys.readouterr().out
    bad = write(tmp_path, doc(top_k=0), "bad.json")
    assert main(["validate-config", "--config", str(bad)]) == 2
    assert "top_k" in capsys.readouterr().err


def test_cli_link_to_file(tmp_path):
    out = tmp_path / "row.csv"
    assert main(["link", "--config", str(write(tmp_path, doc())), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("d,d2_over_AR")


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, doc(rx={"area_m2": 0.0025, "orientation": "perpendicular"}, distance={"d2_over_ar": 0.01}))
    assert main(["link", "--config", str(cfg)]) == 1
    assert "GeometryError" in capsys.readouterr().err


def test_cli_missing_file(tmp_path):
    assert main(["link", "--config", str(tmp_path / "nope.json")]) == 1


def test_cli_presets(tmp_path, capsys):
    assert main(["preset"]) == 0
    listed = capsys.readouterr().out
    assert all(name in listed for name in PRESETS)
    assert main(["preset", "fig99"]) == 2


def test_fig1_preset(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["preset", "fig1", "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 63


def test_fig4_preset(tmp_path):
    out = tmp_path / "fig4.csv"
    assert main(["preset", "fig4", "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    ratio = [float(r["gain_exact"]) / float(r["gain_friis"]) for r in rows]
    x = [float(r["d2_over_AR"]) for r in rows]
    assert all(r < 1 for r, xi in zip(ratio, x) if xi < 1)
    assert all(abs(r - 1) < 0.01 for r, xi in zip(ratio, x) if xi >= 100)
    assert all(float(r["gain_exact"]) < 1 / 3 for r in rows)


@pytest.mark.slow
def test_fig3_preset_shape(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["preset", "fig3-28ghz-parallel-square", "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 9 and all(r["error"] == "" for r in rows)
    n = [int(r["N_counted"]) for r in rows]
    x = [float(r["d2_over_AR"]) for r in rows]
    assert n[-1] == 1
    tail = [ni for ni, xi in zip(n, x) if xi >= 0.3]
    assert tail == sorted(tail, reverse=True)
