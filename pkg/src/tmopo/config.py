"""Experiment configuration: flat key-value files with dotted section keys.

The defaults reproduce the reference type II OPO experiment out of the
box: a 6% output coupler (amplitude loss 0.03) with 0.008 extra loss, a
2.4 GHz free-spectral-range cavity, analysis frequency 0.18 cavity
bandwidths, lumped detection efficiency 0.65, escape efficiency 0.79 and
a 510 mW fundamental-mode threshold. Running the tools with no config
file reproduces the published operating point.

File format: one ``key = value`` pair per line, ``#`` starts a comment.
Example::

    cavity.mu = 0.0
    eff.eta_det = 1.0
    eff.eta_esc = 1.0
    omega_norm = 0.0
    pump_mode = optimal
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .opo_model import CavityParams, EfficiencyChain

PUMP_MODES = ("hg00", "hg20", "optimal", "custom")

DEFAULT_GAMMA_S = 0.03
DEFAULT_MU = 0.008
DEFAULT_TAU = 1.0 / 2.4e9
DEFAULT_ETA_DET = 0.65
DEFAULT_ETA_ESC = 0.79
DEFAULT_OMEGA_NORM = 0.18
DEFAULT_REFERENCE_MW = 510.0

_COEFF_NORM_SLACK = 1e-6


class ConfigError(ValueError):
    """A config file problem, reported with the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters consumed by the CLI commands."""

    cavity: CavityParams
    efficiencies: EfficiencyChain
    omega_norm: float = DEFAULT_OMEGA_NORM
    pump_mode: str = "hg00"
    custom_coefficients: tuple[float, ...] | None = None
    reference_threshold_mw: float = DEFAULT_REFERENCE_MW

    def __post_init__(self):
        if self.omega_norm < 0.0:
            raise ConfigError(f"omega_norm must be non-negative, got {self.omega_norm}")
        if not self.reference_threshold_mw > 0.0:
            raise ConfigError(
                f"reference_threshold_mw must be positive, got "
                f"{self.reference_threshold_mw}"
            )
        if self.pump_mode not in PUMP_MODES:
            raise ConfigError(
                f"pump_mode must be one of {PUMP_MODES}, got {self.pump_mode!r}"
            )
        if self.pump_mode == "custom":
            if not self.custom_coefficients:
                raise ConfigError("pump_mode = custom requires coefficients")
            object.__setattr__(
                self,
                "custom_coefficients",
                normalize_coefficients(self.custom_coefficients),
            )


def normalize_coefficients(coeffs: tuple[float, ...]) -> tuple[float, ...]:
    """Validate near-unit-norm coefficients and snap them onto the sphere."""
    power = sum(c * c for c in coeffs)
    if abs(power - 1.0) > _COEFF_NORM_SLACK:
        raise ConfigError(
            f"custom pump coefficients must be unit-norm (sum c^2 = {power:.8f})"
        )
    root = math.sqrt(power)
    return tuple(c / root for c in coeffs)


def default_cavity(
    gamma_s: float = DEFAULT_GAMMA_S,
    mu: float = DEFAULT_MU,
    tau: float = DEFAULT_TAU,
    chi: float | None = None,
    reference_threshold_mw: float = DEFAULT_REFERENCE_MW,
) -> CavityParams:
    """Cavity parameters with chi anchored to the reference threshold.

    When chi is not given it is chosen so the fundamental-mode threshold
    gamma'^2 / chi^2 equals reference_threshold_mw, keeping absolute
    powers in mW consistent across the toolkit.
    """
    gamma_prime = gamma_s + mu
    if chi is None:
        chi = gamma_prime / math.sqrt(reference_threshold_mw)
    return CavityParams(gamma_s=gamma_s, mu=mu, tau=tau, chi=chi)


def default_config() -> ExperimentConfig:
    return ExperimentConfig(
        cavity=default_cavity(),
        efficiencies=EfficiencyChain.from_totals(DEFAULT_ETA_DET, DEFAULT_ETA_ESC),
    )


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def parse_pump_mode(text: str) -> tuple[str, tuple[float, ...] | None]:
    """Parse ``hg00 | hg20 | optimal | custom:<c0,c1,...>``."""
    text = text.strip()
    if text.startswith("custom:"):
        body = text[len("custom:"):]
        try:
            coeffs = tuple(float(tok) for tok in body.split(","))
        except ValueError:
            raise ConfigError(
                f"pump_mode: bad custom coefficient list {body!r}"
            ) from None
        return "custom", coeffs
    if text in ("hg00", "hg20", "optimal"):
        return text, None
    raise ConfigError(f"pump_mode: unknown mode {text!r}")


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Load an ExperimentConfig, falling back to the built-in defaults."""
    values: dict[str, str] = {}
    if path is not None:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key in values:
                raise ConfigError(f"{key}: duplicate key (line {lineno})")
            values[key] = raw

    known = {
        "cavity.gamma_s", "cavity.mu", "cavity.tau", "cavity.chi",
        "eff.eta_prop", "eff.eta_hd", "eff.eta_phot", "eff.eta_esc",
        "eff.eta_det",
        "omega_norm", "pump_mode", "reference_threshold_mw",
    }
    for key in values:
        if key not in known:
            raise ConfigError(f"{key}: unknown configuration key")

    reference = _parse_float(
        "reference_threshold_mw",
        values.get("reference_threshold_mw", str(DEFAULT_REFERENCE_MW)),
    )

    try:
        cavity = default_cavity(
            gamma_s=_parse_float("cavity.gamma_s", values.get("cavity.gamma_s", str(DEFAULT_GAMMA_S))),
            mu=_parse_float("cavity.mu", values.get("cavity.mu", str(DEFAULT_MU))),
            tau=_parse_float("cavity.tau", values.get("cavity.tau", str(DEFAULT_TAU))),
            chi=_parse_float("cavity.chi", values["cavity.chi"]) if "cavity.chi" in values else None,
            reference_threshold_mw=reference,
        )
    except ValueError as exc:
        raise ConfigError(f"cavity.*: {exc}") from None

    component_keys = ("eff.eta_prop", "eff.eta_hd", "eff.eta_phot")
    has_components = any(key in values for key in component_keys)
    has_det = "eff.eta_det" in values
    if has_components and has_det:
        raise ConfigError(
            "eff.eta_det conflicts with component efficiencies "
            "(eff.eta_prop/eta_hd/eta_phot); give one form or the other"
        )
    eta_esc = _parse_float("eff.eta_esc", values.get("eff.eta_esc", str(DEFAULT_ETA_ESC)))
    try:
        if has_components:
            efficiencies = EfficiencyChain(
                eta_prop=_parse_float("eff.eta_prop", values.get("eff.eta_prop", "1.0")),
                eta_hd=_parse_float("eff.eta_hd", values.get("eff.eta_hd", "1.0")),
                eta_phot=_parse_float("eff.eta_phot", values.get("eff.eta_phot", "1.0")),
                eta_esc=eta_esc,
            )
        else:
            eta_det = _parse_float("eff.eta_det", values.get("eff.eta_det", str(DEFAULT_ETA_DET)))
            efficiencies = EfficiencyChain.from_totals(eta_det, eta_esc)
    except ValueError as exc:
        raise ConfigError(f"eff.*: {exc}") from None

    mode, coeffs = parse_pump_mode(values.get("pump_mode", "hg00"))
    return ExperimentConfig(
        cavity=cavity,
        efficiencies=efficiencies,
        omega_norm=_parse_float("omega_norm", values.get("omega_norm", str(DEFAULT_OMEGA_NORM))),
        pump_mode=mode,
        custom_coefficients=coeffs,
        reference_threshold_mw=reference,
    )
