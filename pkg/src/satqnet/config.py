"""Scenario and platform parameter tables, presets, TOML load and save.

Configuration values live in the units the tables are quoted in (km,
cm, nm, ns, microradians, degrees); build_network_model converts to SI
exactly once. Built-in presets cover the three space-technology
scenarios (A, B, C) and the three memory platforms (siv, nv, atoms);
a TOML file with [scenario] and [platform] sections overrides any
subset of fields on top of a preset.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from satqnet.errors import ConfigParseError, ValidationError
from satqnet.link_budget import (
    MAX_OBSCURATION_GAMMA,
    AtmosphereAndCoupling,
    BackgroundEnvironment,
    OpticalChain,
    OpticalTerminal,
)
from satqnet.optimizer import GridSpec
from satqnet.performance_model import GroundSegment, NetworkModel
from satqnet.repeater_protocol import PlatformParams, lower_fixed_point

logger = logging.getLogger(__name__)

SCENARIO_PRESETS = ("A", "B", "C")
PLATFORM_PRESETS = ("siv", "nv", "atoms")
F_L_CHECK_TOL = 2e-3

_THIRD = 1.0 / 3.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Space-segment and link parameters of one technology scenario.

    Attributes mirror the satellite-to-ground parameter table plus the
    search-grid settings; see the attribute names for units.
    """
    name: str
    n_m: int
    d_tx_cm: float
    sigma_point_urad: float
    eta_optics: float
    eta_det: float
    eta_fc: float
    e_d: float = 0.01
    e_0: float = 0.5
    f_hz: float = 1e9
    eta_demux: float = 0.73
    altitudes_km: tuple = (500.0, 1000.0, 1500.0, 2000.0)
    d_rx_cm: float = 100.0
    obscuration_gamma: float = 0.2
    eta_zenith: float = 0.8
    h_sky_w_m2_um_sr: float = 1.5e-3
    delta_lambda_nm: float = 1.0
    delta_t_ns: float = 1.0
    phi_min_deg: float = 15.0
    r_e_km: float = 6378.0
    l0_min_km: float = 500.0
    l0_lattice_step_km: float = 250.0
    mu_min: float = 2e-4
    mu_max: float = 0.2
    n_mu: int = 40
    ft_min: float = 0.95
    ft_max: float = 1.0
    ft_step: float = 0.002

    def __post_init__(self):
        if not isinstance(self.n_m, int) or self.n_m < 1:
            raise ValidationError(
                f"scenario.n_m must be an integer >= 1, got {self.n_m}")
        for name in ("d_tx_cm", "d_rx_cm", "f_hz", "h_sky_w_m2_um_sr",
                     "delta_lambda_nm", "delta_t_ns", "r_e_km", "l0_min_km",
                     "l0_lattice_step_km"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(
                    f"scenario.{name} must be positive, got "
                    f"{getattr(self, name)}")
        if self.sigma_point_urad < 0.0:
            raise ValidationError("scenario.sigma_point_urad must be >= 0")
        for name in ("eta_optics", "eta_det", "eta_fc", "eta_zenith",
                     "eta_demux", "e_d", "e_0"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValidationError(
                    f"scenario.{name} must lie in (0, 1], got {value}")
        if self.e_d > self.e_0:
            raise ValidationError(
                f"scenario.e_d must not exceed e_0, got {self.e_d} > {self.e_0}")
        if not 0.0 <= self.obscuration_gamma <= MAX_OBSCURATION_GAMMA:
            raise ValidationError(
                f"scenario.obscuration_gamma must lie in "
                f"[0, {MAX_OBSCURATION_GAMMA}], got {self.obscuration_gamma}")
        if not 0.0 < self.phi_min_deg < 90.0:
            raise ValidationError(
                f"scenario.phi_min_deg must lie in (0, 90), got "
                f"{self.phi_min_deg}")
        if len(self.altitudes_km) == 0:
            raise ValidationError("scenario.altitudes_km must not be empty")
        if list(self.altitudes_km) != sorted(self.altitudes_km):
            raise ValidationError("scenario.altitudes_km must be ascending")
        if min(self.altitudes_km) <= 0.0:
            raise ValidationError("scenario.altitudes_km must be positive")
        # grid settings get their full check in GridSpec; fail early here
        self.grid_spec()

    @property
    def eta_cpl(self) -> float:
        """Combined internal and coupling efficiency on the ground."""
        return self.eta_optics * self.eta_det * self.eta_fc

    def grid_spec(self) -> GridSpec:
        """Search-grid settings of this scenario in SI units."""
        return GridSpec(mu_min=self.mu_min, mu_max=self.mu_max,
                        n_mu=self.n_mu, ft_min=self.ft_min,
                        ft_max=self.ft_max, ft_step=self.ft_step,
                        l0_min_m=self.l0_min_km * 1e3,
                        l0_lattice_start_m=self.l0_min_km * 1e3,
                        l0_lattice_step_m=self.l0_lattice_step_km * 1e3)


@dataclass(frozen=True)
class PlatformConfig:
    """Quantum-memory parameters of one ground platform."""
    name: str
    epsilon_r: float
    f_l: float
    epsilon_g: float
    t2_s: float
    eta_caps_etad: float
    transition_wavelength_nm: float
    f_s_hz: float
    p_x: float = _THIRD
    p_y: float = _THIRD
    p_z: float = _THIRD

    def __post_init__(self):
        # full invariants are enforced by PlatformParams; build it here
        # so bad files fail at load time with the config field names
        self.platform_params()

    def platform_params(self) -> PlatformParams:
        """SI-unit parameter bundle used by the protocol layer."""
        return PlatformParams(
            epsilon_g=self.epsilon_g, epsilon_r=self.epsilon_r,
            t2_s=self.t2_s, eta_caps_etad=self.eta_caps_etad,
            f_s_hz=self.f_s_hz,
            transition_wavelength_m=self.transition_wavelength_nm * 1e-9,
            f_l=self.f_l, p_x=self.p_x, p_y=self.p_y, p_z=self.p_z)


_SCENARIO_TABLE = {
    "A": dict(n_m=1, d_tx_cm=20.0, sigma_point_urad=2.0,
              eta_optics=0.1, eta_det=0.8, eta_fc=0.25),
    "B": dict(n_m=20, d_tx_cm=25.0, sigma_point_urad=1.5,
              eta_optics=0.1, eta_det=1.0, eta_fc=1.0),
    "C": dict(n_m=100, d_tx_cm=30.0, sigma_point_urad=1.0,
              eta_optics=0.25, eta_det=1.0, eta_fc=1.0),
}

_PLATFORM_TABLE = {
    "siv": dict(epsilon_r=1e-4, f_l=0.5017, epsilon_g=5e-4, t2_s=2.1,
                eta_caps_etad=0.4, transition_wavelength_nm=738.0),
    "nv": dict(epsilon_r=4e-4, f_l=0.5019, epsilon_g=3.5e-4, t2_s=75.0,
               eta_caps_etad=0.1, transition_wavelength_nm=638.0),
    "atoms": dict(epsilon_r=0.004, f_l=0.5162, epsilon_g=0.0025, t2_s=42.0,
                  eta_caps_etad=0.675, transition_wavelength_nm=780.0),
}

# interface bandwidths are platform-specific only for present-day
# hardware (scenario A); B and C assume interfaces matching the source
_F_S_SCENARIO_A_HZ = {"siv": 1e9, "nv": 1e8, "atoms": 3.34e8}
_F_S_MATCHED_HZ = 1e9


def scenario_preset(name: str) -> ScenarioConfig:
    """Built-in scenario table row; name is one of A, B, C."""
    key = name.strip().upper()
    if key not in _SCENARIO_TABLE:
        raise ValidationError(
            f"unknown scenario preset {name!r}; expected one of "
            f"{', '.join(SCENARIO_PRESETS)}")
    return ScenarioConfig(name=key, **_SCENARIO_TABLE[key])


def platform_preset(name: str, scenario_name: str = "B") -> PlatformConfig:
    """Built-in platform table row; the scenario picks the bandwidth.

    Only the interface bandwidth depends on the scenario: scenario A takes
    the per-platform hardware value, every other scenario assumes a source
    matched to a 1 GHz interface.
    """
    key = name.strip().lower()
    if key not in _PLATFORM_TABLE:
        raise ValidationError(
            f"unknown platform preset {name!r}; expected one of "
            f"{', '.join(PLATFORM_PRESETS)}")
    scenario_key = scenario_name.strip().upper()
    if scenario_key not in _SCENARIO_TABLE:
        raise ValidationError(
            f"unknown scenario preset {scenario_name!r}")
    if scenario_key == "A":
        f_s = _F_S_SCENARIO_A_HZ[key]
    else:
        f_s = _F_S_MATCHED_HZ
    return PlatformConfig(name=key, f_s_hz=f_s, **_PLATFORM_TABLE[key])


def _apply_section(base, section: dict, label: str):
    """Replace dataclass fields from one TOML table; reject unknowns."""
    valid = {f.name: f for f in dataclasses.fields(base)}
    updates = {}
    for key, value in section.items():
        if key not in valid:
            raise ConfigParseError(
                f"unknown key {label}.{key}; valid keys: "
                f"{', '.join(sorted(valid))}")
        if isinstance(value, bool):
            raise ConfigParseError(
                f"{label}.{key} must be a number or string, got {value!r}")
        if isinstance(value, list):
            value = tuple(float(v) for v in value)
        updates[key] = value
    try:
        return dataclasses.replace(base, **updates)
    except TypeError as exc:
        raise ConfigParseError(f"bad value type in [{label}]: {exc}") from exc


def _coerce_numbers(config):
    """Turn TOML integers on float-annotated fields into floats."""
    updates = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.type is float and isinstance(value, int):
            updates[f.name] = float(value)
    return dataclasses.replace(config, **updates) if updates else config


def load_config(scenario: str, platform: str,
                overrides: Union[str, Path, None] = None):
    """Resolve presets and optional TOML overrides into config objects.

    Args:
        scenario: Preset name (A, B or C).
        platform: Preset name (siv, nv or atoms).
        overrides: Optional TOML file with [scenario] and/or [platform]
            tables whose keys replace preset values. An empty file is a
            no-op. Unknown keys and malformed values are rejected with
            their location.

    Returns:
        (ScenarioConfig, PlatformConfig), fully validated. The tabulated
        F_l is cross-checked against the computed purification fixed
        point; disagreement beyond 2e-3 logs a warning.

    Raises:
        ConfigParseError: Unreadable or malformed TOML, unknown keys.
        ValidationError: A field violates its invariant.
    """
    scenario_cfg = scenario_preset(scenario)
    platform_cfg = platform_preset(platform, scenario)
    if overrides is not None:
        path = Path(overrides)
        try:
            with open(path, "rb") as handle:
                document = tomllib.load(handle)
        except FileNotFoundError as exc:
            raise ConfigParseError(f"config file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigParseError(f"{path}: {exc}") from exc
        unknown = set(document) - {"scenario", "platform"}
        if unknown:
            raise ConfigParseError(
                f"{path}: unknown sections {sorted(unknown)}; expected "
                f"[scenario] and/or [platform]")
        if "scenario" in document:
            scenario_cfg = _apply_section(scenario_cfg,
                                          document["scenario"], "scenario")
        if "platform" in document:
            platform_cfg = _apply_section(platform_cfg,
                                          document["platform"], "platform")
        scenario_cfg = _coerce_numbers(scenario_cfg)
        platform_cfg = _coerce_numbers(platform_cfg)
    params = platform_cfg.platform_params()
    computed = lower_fixed_point(dataclasses.replace(params, f_l=None))
    if abs(computed - platform_cfg.f_l) > F_L_CHECK_TOL:
        logger.warning(
            "tabulated F_l = %.4f for %s is %.2e away from the computed "
            "fixed point %.6f; check epsilon_g/epsilon_r or the Pauli "
            "weights", platform_cfg.f_l, platform_cfg.name,
            abs(computed - platform_cfg.f_l), computed)
    return scenario_cfg, platform_cfg


def _format_toml_value(value) -> str:
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_format_toml_value(v) for v in value) + "]"
    raise ValidationError(f"cannot serialize config value {value!r}")


def write_config(scenario_cfg: ScenarioConfig,
                 platform_cfg: PlatformConfig) -> str:
    """Serialize both configs as TOML text.

    Every field is written, so loading the text over any preset base
    reproduces the inputs exactly (round-trip identity).
    """
    lines = ["[scenario]"]
    for f in dataclasses.fields(scenario_cfg):
        lines.append(f"{f.name} = "
                     f"{_format_toml_value(getattr(scenario_cfg, f.name))}")
    lines.append("")
    lines.append("[platform]")
    for f in dataclasses.fields(platform_cfg):
        lines.append(f"{f.name} = "
                     f"{_format_toml_value(getattr(platform_cfg, f.name))}")
    lines.append("")
    return "\n".join(lines)


def build_network_model(scenario_cfg: ScenarioConfig,
                        platform_cfg: PlatformConfig,
                        altitude_km: float) -> NetworkModel:
    """Convert boundary-unit configs into one SI NetworkModel.

    The optical wavelength of both terminals and of the background
    photon energy is the platform transition wavelength; the memory
    must absorb what the satellite sends.
    """
    wavelength_m = platform_cfg.transition_wavelength_nm * 1e-9
    transmitter = OpticalTerminal(
        diameter_m=scenario_cfg.d_tx_cm * 1e-2,
        obscuration_gamma=scenario_cfg.obscuration_gamma,
        wavelength_m=wavelength_m,
        pointing_sigma_rad=scenario_cfg.sigma_point_urad * 1e-6)
    receiver = OpticalTerminal(
        diameter_m=scenario_cfg.d_rx_cm * 1e-2,
        obscuration_gamma=scenario_cfg.obscuration_gamma,
        wavelength_m=wavelength_m)
    atmosphere = AtmosphereAndCoupling(
        eta_zenith=scenario_cfg.eta_zenith,
        eta_optics=scenario_cfg.eta_optics,
        eta_det=scenario_cfg.eta_det,
        eta_fc=scenario_cfg.eta_fc)
    background = BackgroundEnvironment(
        h_sky_w_m3_sr=scenario_cfg.h_sky_w_m2_um_sr * 1e6,
        delta_lambda_m=scenario_cfg.delta_lambda_nm * 1e-9,
        delta_t_s=scenario_cfg.delta_t_ns * 1e-9)
    chain = OpticalChain(transmitter=transmitter, receiver=receiver,
                         atmosphere=atmosphere, background=background)
    params = platform_cfg.platform_params()
    ground = GroundSegment(
        n_m=scenario_cfg.n_m,
        beta=min(1.0, params.f_s_hz / scenario_cfg.f_hz),
        eta_caps_etad=platform_cfg.eta_caps_etad,
        eta_demux=scenario_cfg.eta_demux)
    return NetworkModel(chain=chain, ground=ground, platform=params,
                        f_hz=scenario_cfg.f_hz, e_d=scenario_cfg.e_d,
                        e_0=scenario_cfg.e_0, h_m=altitude_km * 1e3,
                        r_e_m=scenario_cfg.r_e_km * 1e3,
                        phi_min_rad=math.radians(scenario_cfg.phi_min_deg),
                        scenario=scenario_cfg.name,
                        platform_name=platform_cfg.name)


def build_network_models(scenario_cfg: ScenarioConfig,
                         platform_cfg: PlatformConfig) -> tuple:
    """One NetworkModel per configured altitude, ascending."""
    return tuple(build_network_model(scenario_cfg, platform_cfg, h_km)
                 for h_km in scenario_cfg.altitudes_km)
