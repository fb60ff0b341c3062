"""Report figures: columnar data files, a manifest, and rendered images.

Each figure is written twice: a plain CSV holding exactly the plotted series
(so any tool can re-render it) and a PNG rendered here with matplotlib.  A
``manifest.json`` describes every data file's axes and columns.
"""

from __future__ import annotations

import dataclasses
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import CASE_UAV_START, ScenarioConfig
from .output import write_csv
from .simkit import EpisodeTrace, run_episode, run_monte_carlo

CONTROLLER_LABELS = {"iscc": "joint design", "lqg": "LQG benchmark",
                     "noncausal": "clairvoyant MPC"}
CONTROLLER_STYLE = {"iscc": ("tab:blue", "-"), "lqg": ("tab:orange", "--"),
                    "noncausal": ("tab:green", "-.")}


def _case_cfg(cfg: ScenarioConfig, case: int, init_mode: str) -> ScenarioConfig:
    return dataclasses.replace(cfg, uav_start=CASE_UAV_START[case],
                               init_mode=init_mode)


def _est_error(trace: EpisodeTrace) -> np.ndarray:
    return np.linalg.norm(trace.est - trace.target, axis=1)


def _plot_trajectories(traces: dict[str, EpisodeTrace], cfg: ScenarioConfig,
                       title: str, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    tgt = traces["iscc"].target
    ax.plot(tgt[:, 0], tgt[:, 1], color="black", lw=1.8, label="target")
    for name, trace in traces.items():
        color, style = CONTROLLER_STYLE[name]
        ax.plot(trace.uav[:, 0], trace.uav[:, 1], style, color=color,
                lw=1.4, label=CONTROLLER_LABELS[name])
        ax.plot(*trace.uav[0, :2], "o", color=color, ms=4)
    ax.plot(*cfg.gu_pos, "s", color="tab:red", ms=7, label="ground user")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_series(series: dict[str, np.ndarray], title: str, ylabel: str,
                 path: str, logy: bool = False) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    n = None
    for label, values in series.items():
        n = np.arange(1, len(values) + 1)
        ax.plot(n, values, lw=1.3, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("time slot")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_fractions(rows: list[tuple[str, str, float, float]], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    labels = [f"{CONTROLLER_LABELS[c]}\n({init})" for c, init, _, _ in rows]
    x = np.arange(len(rows))
    ax.bar(x - 0.18, [r[2] for r in rows], width=0.36, label="mean fraction")
    ax.bar(x + 0.18, [r[3] for r in rows], width=0.36, label="min fraction")
    ax.set_xticks(x, labels, fontsize=7)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("rate-satisfying slot fraction")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def export_all(cfg: ScenarioConfig, out_dir: str, trials: int = 10,
               seed: int = 1, threads: int = 1) -> list[str]:
    """Produce every report figure's data file and image under ``out_dir``.

    Representative single-seed episodes feed the trajectory and estimation
    plots for the three start cases (plus the poor-initialization variant);
    Monte Carlo aggregates feed the RMS/RMSE curves and the rate-fraction
    bars, all for the case-2 start.
    """
    os.makedirs(out_dir, exist_ok=True)
    manifest: list[dict] = []
    written: list[str] = []

    def emit(name, title, xlabel, ylabel, header, rows):
        path = os.path.join(out_dir, name)
        write_csv(path, header, rows)
        manifest.append({"file": name, "title": title, "x": xlabel,
                         "y": ylabel, "columns": list(header)})
        written.append(path)

    controllers = ("iscc", "lqg", "noncausal")

    # Representative episodes, accurate initialization, three start cases.
    for case in (1, 2, 3):
        case_cfg = _case_cfg(cfg, case, "accurate")
        traces = {c: run_episode(case_cfg, c, seed) for c in controllers}
        n = traces["iscc"].n_slots
        emit(f"fig4_case{case}_trajectories.csv",
             f"UAV trajectories, case {case}, accurate initialization",
             "x (m)", "y (m)",
             ("n", "tgt_px", "tgt_py") + tuple(f"{c}_p{ax}" for c in controllers for ax in "xy"),
             (((i + 1,) + tuple(traces["iscc"].target[i, :2])
               + tuple(v for c in controllers for v in traces[c].uav[i, :2]))
              for i in range(n)))
        _plot_trajectories(traces, case_cfg,
                           f"Case {case} (accurate initialization)",
                           os.path.join(out_dir, f"fig4_case{case}.png"))
        errs = {c: _est_error(traces[c]) for c in ("iscc", "lqg")}
        emit(f"fig5_case{case}_estimation_error.csv",
             f"Target estimation error, case {case}", "time slot",
             "state estimate error (m, m/s)",
             ("n", "iscc", "lqg"),
             ((i + 1, errs["iscc"][i], errs["lqg"][i]) for i in range(n)))
        _plot_series({CONTROLLER_LABELS[c]: errs[c] for c in errs},
                     f"Estimation error, case {case}", "state error norm",
                     os.path.join(out_dir, f"fig5_case{case}.png"), logy=True)

    # Case 2 with poor initialization (representative episode).
    bad_cfg = _case_cfg(cfg, 2, "inaccurate")
    traces = {c: run_episode(bad_cfg, c, seed) for c in controllers}
    n = traces["iscc"].n_slots
    emit("fig7_inaccurate_trajectories.csv",
         "UAV trajectories, case 2, inaccurate initialization",
         "x (m)", "y (m)",
         ("n", "tgt_px", "tgt_py") + tuple(f"{c}_p{ax}" for c in controllers for ax in "xy"),
         (((i + 1,) + tuple(traces["iscc"].target[i, :2])
           + tuple(v for c in controllers for v in traces[c].uav[i, :2]))
          for i in range(n)))
    _plot_trajectories(traces, bad_cfg, "Case 2 (inaccurate initialization)",
                       os.path.join(out_dir, "fig7a_trajectories.png"))
    errs = {c: _est_error(traces[c]) for c in ("iscc", "lqg")}
    emit("fig7_inaccurate_estimation_error.csv",
         "Target estimation error, case 2, inaccurate initialization",
         "time slot", "state estimate error (m, m/s)",
         ("n", "iscc", "lqg"),
         ((i + 1, errs["iscc"][i], errs["lqg"][i]) for i in range(n)))
    _plot_series({CONTROLLER_LABELS[c]: errs[c] for c in errs},
                 "Estimation error, case 2, inaccurate initialization",
                 "state error norm", os.path.join(out_dir, "fig7b_estimation.png"),
                 logy=True)

    # Monte Carlo aggregates, case 2, both initializations.
    metrics = {}
    for init in ("accurate", "inaccurate"):
        mc_cfg = _case_cfg(cfg, 2, init)
        for c in controllers:
            metrics[(c, init)] = run_monte_carlo(mc_cfg, c, trials, seed,
                                                 threads=threads)

    keys = [(c, init) for c in controllers for init in ("accurate", "inaccurate")]
    col_names = tuple(f"{c}_{init}" for c, init in keys)
    n = metrics[keys[0]].rms_error.shape[0]
    emit("fig8_rms_tracking_error.csv",
         f"RMS tracking error, case 2, {trials} trials", "time slot",
         "RMS tracking error (m, m/s)", ("n",) + col_names,
         (((i + 1,) + tuple(metrics[k].rms_error[i] for k in keys))
          for i in range(n)))
    _plot_series({f"{CONTROLLER_LABELS[c]} ({init})": metrics[(c, init)].rms_error
                  for c, init in keys},
                 "RMS tracking error (case 2)", "RMS error",
                 os.path.join(out_dir, "fig8_rms_tracking_error.png"), logy=True)

    est_keys = [(c, init) for c in ("iscc", "lqg") for init in ("accurate", "inaccurate")]
    est_cols = tuple(f"{c}_{init}" for c, init in est_keys)
    emit("fig9_rmse_position.csv",
         f"Position-estimate RMSE, case 2, {trials} trials", "time slot",
         "position RMSE (m)", ("n",) + est_cols,
         (((i + 1,) + tuple(metrics[k].rmse_position[i] for k in est_keys))
          for i in range(n)))
    _plot_series({f"{CONTROLLER_LABELS[c]} ({init})": metrics[(c, init)].rmse_position
                  for c, init in est_keys},
                 "Position-estimate RMSE (case 2)", "RMSE (m)",
                 os.path.join(out_dir, "fig9_rmse_position.png"), logy=True)
    emit("fig10_rmse_velocity.csv",
         f"Velocity-estimate RMSE, case 2, {trials} trials", "time slot",
         "velocity RMSE (m/s)", ("n",) + est_cols,
         (((i + 1,) + tuple(metrics[k].rmse_velocity[i] for k in est_keys))
          for i in range(n)))
    _plot_series({f"{CONTROLLER_LABELS[c]} ({init})": metrics[(c, init)].rmse_velocity
                  for c, init in est_keys},
                 "Velocity-estimate RMSE (case 2)", "RMSE (m/s)",
                 os.path.join(out_dir, "fig10_rmse_velocity.png"), logy=True)

    frac_rows = [(c, init, metrics[(c, init)].mean_fraction,
                  metrics[(c, init)].min_fraction) for c, init in keys]
    emit("fig11_rate_fraction.csv",
         f"Rate-constraint satisfaction, case 2, {trials} trials",
         "scheme", "fraction of satisfying slots",
         ("controller", "init_mode", "mean_fraction", "min_fraction"),
         frac_rows)
    _plot_fractions(frac_rows, os.path.join(out_dir, "fig11_rate_fraction.png"))

    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump({"figures": manifest}, fh, indent=2)
    written.append(manifest_path)
    return written
