"""Delimited-output writers with byte-stable float formatting."""

from __future__ import annotations

import os

import numpy as np

from .simkit import EpisodeTrace, TrialMetrics

TRACE_COLUMNS = ("n", "uav_px", "uav_py", "uav_vx", "uav_vy",
                 "tgt_px", "tgt_py", "tgt_vx", "tgt_vy",
                 "est_px", "est_py", "est_vx", "est_vy",
                 "u_x", "u_y", "rate", "echo_snr", "status")

METRICS_COLUMNS = ("n", "rms_e", "rmse_p", "rmse_v")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: str, header, rows) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def trace_rows(trace: EpisodeTrace):
    for i in range(trace.n_slots):
        yield ((i + 1,) + tuple(trace.uav[i]) + tuple(trace.target[i])
               + tuple(trace.est[i]) + tuple(trace.u[i])
               + (trace.rate[i], trace.echo_snr[i], trace.status[i]))


def write_trace(path: str, trace: EpisodeTrace) -> str:
    return write_csv(path, TRACE_COLUMNS, trace_rows(trace))


def write_metrics(path: str, metrics: TrialMetrics) -> str:
    n = metrics.rms_error.shape[0]
    rows = ((i + 1, metrics.rms_error[i], metrics.rmse_position[i],
             metrics.rmse_velocity[i]) for i in range(n))
    return write_csv(path, METRICS_COLUMNS, rows)
