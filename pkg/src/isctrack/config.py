"""Scenario configuration: presets, YAML loading, overrides, round-tripping.

The file format is a nested mapping with sections ``scenario``, ``rf``,
``dynamics``, ``mpc``, and ``solver``.  Quantities given in dB/dBm in the
file stay in dB/dBm on the dataclass and are converted to linear exactly once
through the derived accessors, so a dumped config reloads identically.

Defaults not fixed by the studied setup are marked below; they can all be
overridden from the file or from ``--set section.key=value`` pairs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
import yaml

from .dynamics import TransitionModel, build_transition
from .mpc import SolverOptions
from .rf import ArrayGeometry, RfConstants

# UAV start positions for the three standard cases.
CASE_UAV_START = {1: (0.0, 100.0), 2: (0.0, 150.0), 3: (0.0, 200.0)}


class ConfigError(ValueError):
    """Malformed configuration file, unknown key, or out-of-range value."""


@dataclass
class ScenarioConfig:
    # --- scenario ---
    uav_start: tuple[float, float] = CASE_UAV_START[1]
    uav_velocity_start: tuple[float, float] = (0.0, 0.0)     # not prescribed
    target_start: tuple[float, float] = (0.0, 400.0)
    target_velocity_start: tuple[float, float] = (1.5, -2.0)  # not prescribed
    gu_pos: tuple[float, float] = (300.0, 50.0)
    altitude: float = 50.0
    n_slots: int = 300
    slot_duration: float = 0.2
    horizon: int = 5
    init_mode: str = "accurate"           # accurate | inaccurate
    init_extra_pos_var: float = 400.0     # added to position MSE when inaccurate
    init_extra_vel_var: float = 4.0
    a_max: float = 10.0                   # not prescribed
    v_max: float = 30.0                   # not prescribed

    # --- rf ---
    tx_x: int = 4
    tx_y: int = 4
    rx_x: int = 4
    rx_y: int = 4
    power_dbm: float = 30.0
    carrier_hz: float = 30e9
    lightspeed: float = 3e8
    mf_gain: float = 1e3
    noise_comm_dbm: float = -80.0
    noise_radar_dbm: float = -80.0
    ref_channel_gain: float = 1e-6        # channel power at 1 m; not prescribed
    rcs: float = 25.0                     # target cross section; not prescribed
    a1: float = 20.0
    a2: float = 100.0
    rate_threshold: float = 2.5
    echo_snr_db: float = 5.0

    # --- dynamics ---
    sigma_px2: float = 4e-4
    sigma_py2: float = 4e-4
    sigma_vx2: float = 0.01
    sigma_vy2: float = 0.01

    # --- mpc ---
    q_diag: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    r_diag: tuple[float, float] = (1.0, 1.0)

    # --- solver ---
    barrier_t0: float = 1.0
    barrier_mu: float = 10.0
    gap_tol: float = 1e-8
    newton_tol: float = 1e-9
    max_newton: int = 80
    max_outer: int = 60
    soft_mode: bool = True
    soft_penalty: float = 1e4
    feas_tol: float = 1e-6

    # ----- derived quantities (single point of dB -> linear conversion) -----

    @property
    def power_w(self) -> float:
        return 10.0 ** ((self.power_dbm - 30.0) / 10.0)

    @property
    def sigma_c2(self) -> float:
        return 10.0 ** ((self.noise_comm_dbm - 30.0) / 10.0)

    @property
    def sigma_r2(self) -> float:
        return 10.0 ** ((self.noise_radar_dbm - 30.0) / 10.0)

    @property
    def echo_snr_linear(self) -> float:
        return 10.0 ** (self.echo_snr_db / 10.0)

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(mx_t=self.tx_x, my_t=self.tx_y,
                             mx_r=self.rx_x, my_r=self.rx_y)

    def rf_constants(self) -> RfConstants:
        return RfConstants(beta0=self.ref_channel_gain, fc=self.carrier_hz,
                           c=self.lightspeed, rcs=self.rcs,
                           sigma_c2=self.sigma_c2, sigma_r2=self.sigma_r2,
                           mf_gain=self.mf_gain, a1=self.a1, a2=self.a2,
                           altitude=self.altitude)

    def transition(self) -> TransitionModel:
        return build_transition(self.slot_duration,
                                (self.sigma_px2, self.sigma_py2,
                                 self.sigma_vx2, self.sigma_vy2))

    def q_matrix(self) -> np.ndarray:
        return np.diag(self.q_diag)

    def r_matrix(self) -> np.ndarray:
        return np.diag(self.r_diag)

    def gamma(self) -> float:
        """Full-power array gain toward any single direction."""
        return self.geometry().m_t * self.power_w

    def eta(self) -> float:
        """User-directed gain per squared distance required by the rate floor."""
        return self.sigma_c2 * (2.0 ** self.rate_threshold - 1.0) / self.ref_channel_gain

    def echo_gain_threshold(self) -> float:
        """Required ratio of target-directed gain to d^4 for the echo floor."""
        k = self.rf_constants()
        return (self.sigma_r2 * self.echo_snr_linear
                / (self.mf_gain * self.geometry().m_r * k.reflect_gain))

    def init_cov(self) -> np.ndarray:
        """Initial estimate MSE: process-noise floor, inflated when inaccurate."""
        base = np.diag((self.sigma_px2, self.sigma_py2,
                        self.sigma_vx2, self.sigma_vy2))
        if self.init_mode == "inaccurate":
            base = base + np.diag((self.init_extra_pos_var, self.init_extra_pos_var,
                                   self.init_extra_vel_var, self.init_extra_vel_var))
        return base

    def solver_options(self) -> SolverOptions:
        return SolverOptions(barrier_t0=self.barrier_t0, barrier_mu=self.barrier_mu,
                             gap_tol=self.gap_tol, newton_tol=self.newton_tol,
                             max_newton=self.max_newton, max_outer=self.max_outer,
                             soft_mode=self.soft_mode, soft_penalty=self.soft_penalty,
                             feas_tol=self.feas_tol)

    def validate(self) -> None:
        if self.slot_duration <= 0:
            raise ConfigError("slot_duration must be positive")
        if self.n_slots < 1:
            raise ConfigError("n_slots must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if min(self.tx_x, self.tx_y, self.rx_x, self.rx_y) < 1:
            raise ConfigError("antenna counts must be >= 1")
        if self.init_mode not in ("accurate", "inaccurate"):
            raise ConfigError(f"unknown init_mode {self.init_mode!r}")
        if self.a_max <= 0 or self.v_max <= 0:
            raise ConfigError("motion bounds must be positive")
        if min(self.sigma_px2, self.sigma_py2, self.sigma_vx2, self.sigma_vy2) < 0:
            raise ConfigError("process-noise variances must be nonnegative")
        if self.rate_threshold <= 0:
            raise ConfigError("rate_threshold must be positive")
        if min(self.q_diag) < 0 or min(self.r_diag) <= 0:
            raise ConfigError("q_diag must be nonnegative and r_diag positive")


# Section layout of the on-disk format: section name -> dataclass fields.
_SECTIONS = {
    "scenario": ("uav_start", "uav_velocity_start", "target_start",
                 "target_velocity_start", "gu_pos", "altitude", "n_slots",
                 "slot_duration", "horizon", "init_mode", "init_extra_pos_var",
                 "init_extra_vel_var", "a_max", "v_max"),
    "rf": ("tx_x", "tx_y", "rx_x", "rx_y", "power_dbm", "carrier_hz",
           "lightspeed", "mf_gain", "noise_comm_dbm", "noise_radar_dbm",
           "ref_channel_gain", "rcs", "a1", "a2", "rate_threshold",
           "echo_snr_db"),
    "dynamics": ("sigma_px2", "sigma_py2", "sigma_vx2", "sigma_vy2"),
    "mpc": ("q_diag", "r_diag"),
    "solver": ("barrier_t0", "barrier_mu", "gap_tol", "newton_tol",
               "max_newton", "max_outer", "soft_mode", "soft_penalty",
               "feas_tol"),
}

_FIELD_SECTION = {f: s for s, fields in _SECTIONS.items() for f in fields}
_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}

_TUPLE_FIELDS = {"uav_start", "uav_velocity_start", "target_start",
                 "target_velocity_start", "gu_pos", "q_diag", "r_diag"}
_INT_FIELDS = {"n_slots", "horizon", "tx_x", "tx_y", "rx_x", "rx_y",
               "max_newton", "max_outer"}
_BOOL_FIELDS = {"soft_mode"}
_STR_FIELDS = {"init_mode"}


def _coerce(name: str, value):
    if name in _TUPLE_FIELDS:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{name} must be a list of numbers")
        return tuple(float(v) for v in value)
    if name in _INT_FIELDS:
        return int(value)
    if name in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("true", "1", "yes"):
            return True
        if str(value).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{name} must be a boolean")
    if name in _STR_FIELDS:
        return str(value)
    return float(value)


def preset_config(preset: str | None = None) -> ScenarioConfig:
    """Default configuration, optionally placed at a case-1/2/3 start point."""
    cfg = ScenarioConfig()
    if preset is not None:
        name = preset.lower().replace("case", "").strip()
        try:
            case = int(name)
            cfg = dataclasses.replace(cfg, uav_start=CASE_UAV_START[case])
        except (ValueError, KeyError):
            raise ConfigError(f"unknown preset {preset!r}; expected case1/case2/case3")
    return cfg


def _apply_item(cfg: ScenarioConfig, section: str, key: str, value) -> ScenarioConfig:
    if section not in _SECTIONS:
        raise ConfigError(f"unknown section {section!r}")
    if key not in _SECTIONS[section]:
        raise ConfigError(f"unknown key {section}.{key}")
    return dataclasses.replace(cfg, **{key: _coerce(key, value)})


def load_config(path: str | None = None, preset: str | None = None,
                overrides: list[str] | None = None) -> ScenarioConfig:
    """Load a configuration: preset defaults, then file, then overrides.

    Overrides use dotted ``section.key=value`` syntax; list values may be
    written as comma-separated numbers.  Unknown sections or keys are
    rejected.
    """
    cfg = preset_config(preset)

    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a mapping")
        for section, items in doc.items():
            if items is None:
                continue
            if not isinstance(items, dict):
                raise ConfigError(f"section {section!r} must be a mapping")
            for key, value in items.items():
                cfg = _apply_item(cfg, str(section), str(key), value)

    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, raw = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override key {dotted!r} must be section.key")
        section, key = dotted.split(".", 1)
        value: object = raw
        if key in _TUPLE_FIELDS:
            value = [float(v) for v in raw.split(",")]
        cfg = _apply_item(cfg, section.strip(), key.strip(), value)

    cfg.validate()
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    out: dict = {}
    for section, names in _SECTIONS.items():
        out[section] = {}
        for name in names:
            value = getattr(cfg, name)
            if isinstance(value, tuple):
                value = list(value)
            out[section][name] = value
    return out


def dump_config(cfg: ScenarioConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)
