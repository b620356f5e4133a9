import subprocess
import sys

import pytest

from aoi_relay_plots import FIGURE_IDS, FigureJob, SchemaError, render
from aoi_relay_plots.cli import main

SCHEMA = [
    "scenario", "K", "mu", "lambda", "rho", "p", "seed", "horizon",
    "delay_analytic", "aoi_analytic",
    "delay_sim", "delay_sim_ci95",
    "aoi_sim_system", "aoi_sim_system_ci95",
    "aoi_sim_mixture", "aoi_sim_mixture_ci95",
    "ewy_analytic", "ewy_sim", "ewy_sim_ci95",
    "n_departures",
]

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _write_csv(path, rows):
    lines = [",".join(SCHEMA)]
    for row in rows:
        lines.append(",".join(str(row.get(col, "")) for col in SCHEMA))
    path.write_text("\n".join(lines) + "\n")


def _chain_rows():
    rows = []
    for k in (1, 2, 5):
        for rho in (0.2, 0.5, 0.8):
            delay = k / (1.0 - rho)
            aoi = 1.0 / rho + k + rho * k
            rows.append({
                "scenario": "chain", "K": k, "mu": 1.0, "lambda": rho, "rho": rho,
                "seed": 1, "horizon": 1e4,
                "delay_analytic": delay, "aoi_analytic": aoi,
                "delay_sim": delay * 1.01, "delay_sim_ci95": 0.05,
                "aoi_sim_system": aoi * 1.02, "aoi_sim_system_ci95": 0.1,
                "aoi_sim_mixture": aoi * 1.02, "aoi_sim_mixture_ci95": 0.1,
            })
    return rows


def _split_rows():
    rows = []
    for p in (0.0, 0.5, 1.0):
        for rho in (0.2, 0.5, 0.8):
            delay = (1.0 + p) / (1.0 - rho)
            aoi = 1.0 / rho + 1.0 + p + rho
            rows.append({
                "scenario": "split", "K": 2, "mu": 1.0, "lambda": rho, "rho": rho,
                "p": p, "seed": 1, "horizon": 1e4,
                "delay_analytic": delay, "aoi_analytic": aoi,
                "delay_sim": delay * 0.99, "delay_sim_ci95": 0.04,
                "aoi_sim_system": aoi * 1.01, "aoi_sim_system_ci95": 0.05,
                "aoi_sim_mixture": aoi * 1.03, "aoi_sim_mixture_ci95": 0.08,
            })
    return rows


def _optimize_rows():
    return [
        {"scenario": "chain", "K": k, "mu": 1.0, "rho": rho, "lambda": rho,
         "aoi_analytic": 3.0 + k}
        for k, rho in [(1, 0.53), (2, 0.45), (5, 0.34), (10, 0.27)]
    ]


def _multiground_rows():
    rows = []
    for k in (2, 5):
        for rho in (0.2, 0.5, 0.8):
            rows.append({
                "scenario": "multi-ground", "K": k, "mu": 1.0, "lambda": rho, "rho": rho,
                "seed": 1, "horizon": 1e4,
                "aoi_sim_system": 2.0 / rho + k, "aoi_sim_system_ci95": 0.1,
                "aoi_sim_mixture": 2.5 / rho + k, "aoi_sim_mixture_ci95": 0.1,
            })
    return rows


@pytest.fixture(scope="module")
def results_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("results")
    _write_csv(base / "chain.csv", _chain_rows())
    _write_csv(base / "split.csv", _split_rows())
    _write_csv(base / "optimize.csv", _optimize_rows())
    _write_csv(base / "multiground.csv", _multiground_rows())
    return base


_CSV_FOR = {
    "delay_chain": "chain.csv",
    "aoi_chain": "chain.csv",
    "rho_star": "optimize.csv",
    "delay_split": "split.csv",
    "aoi_split": "split.csv",
    "aoi_multiground": "multiground.csv",
}


@pytest.mark.parametrize("figure_id", FIGURE_IDS)
def test_each_figure_renders_and_is_byte_stable(figure_id, results_dir, tmp_path):
    csv_path = str(results_dir / _CSV_FOR[figure_id])
    out1 = tmp_path / f"{figure_id}_1.png"
    out2 = tmp_path / f"{figure_id}_2.png"
    render(FigureJob(figure_id, csv_path, str(out1)))
    render(FigureJob(figure_id, csv_path, str(out2)))
    data1, data2 = out1.read_bytes(), out2.read_bytes()
    assert data1.startswith(PNG_MAGIC) and len(data1) > 1000
    assert data1 == data2


def test_unknown_figure_id_rejected(results_dir):
    with pytest.raises(SchemaError):
        FigureJob("aoi_unknown", str(results_dir / "chain.csv"), "x.png")


def test_missing_column_diagnostic(tmp_path):
    bad = tmp_path / "bad.csv"
    cols = [c for c in SCHEMA if c != "delay_sim"]
    bad.write_text(",".join(cols) + "\n")
    with pytest.raises(SchemaError, match="delay_sim"):
        render(FigureJob("delay_chain", str(bad), str(tmp_path / "out.png")))


def test_cli_exit_codes(results_dir, tmp_path):
    ok = main(["aoi_chain", str(results_dir / "chain.csv"), str(tmp_path / "ok.png")])
    assert ok == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("scenario,K\n")
    assert main(["aoi_chain", str(bad), str(tmp_path / "bad.png")]) == 2
    assert main(["aoi_chain"]) == 1
    assert main([]) == 1


def test_cli_all_driver(results_dir, tmp_path):
    out_dir = tmp_path / "figs"
    assert main(["all", str(results_dir), str(out_dir)]) == 0
    for figure_id in FIGURE_IDS:
        data = (out_dir / f"{figure_id}.png").read_bytes()
        assert data.startswith(PNG_MAGIC)
    assert main(["all", str(tmp_path / "empty"), str(out_dir)]) == 2


# ---- integration through the producing CLI (the real external interface)


def _aoi_relay(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "aoi_relay", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def real_results(tmp_path_factory):
    base = tmp_path_factory.mktemp("real")
    _aoi_relay("sweep", "--scenario", "chain", "--k-list", "1,2", "--rho-grid",
               "0.2:0.8:0.3", "--horizon", "2e4", "--seed", "5",
               "--out", str(base / "chain.csv"))
    _aoi_relay("sweep", "--scenario", "split", "--p-list", "0,0.5,1", "--rho-grid",
               "0.3,0.6", "--horizon", "2e4", "--seed", "5",
               "--out", str(base / "split.csv"))
    _aoi_relay("optimize", "--scenario", "chain", "--k-list", "1,2,5", "--tol", "1e-3",
               "--out", str(base / "optimize.csv"))
    _aoi_relay("simulate", "--scenario", "multi-ground", "--k-list", "2,4",
               "--rho-grid", "0.3,0.6", "--horizon", "2e4", "--seed", "5",
               "--out", str(base / "multiground.csv"))
    return base


@pytest.mark.parametrize("figure_id", FIGURE_IDS)
def test_renders_real_cli_output(figure_id, real_results, tmp_path):
    csv_path = str(real_results / _CSV_FOR[figure_id])
    out = tmp_path / f"{figure_id}.png"
    render(FigureJob(figure_id, csv_path, str(out)))
    assert out.read_bytes().startswith(PNG_MAGIC)
