"""Physical constants, units and the scattering-problem configuration.

All quantities are SI internally. Config keys carry their unit in a suffix
(``_um``, ``_THz``, ``_eV``, ``_meV``, ``_deg``) and are converted exactly once,
in :func:`validate`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Mapping


class Constants:
    """CODATA 2018 values (SI). ``e``, ``h`` and ``c0`` are exact by definition."""

    e: float = 1.602176634e-19
    h: float = 6.62607015e-34
    hbar: float = 6.62607015e-34 / (2.0 * math.pi)
    eps0: float = 8.8541878128e-12
    c0: float = 299792458.0
    # universal AC conductivity of graphene, pi e^2 / (2 h)
    sigma0: float = math.pi * 1.602176634e-19**2 / (2.0 * 6.62607015e-34)


UM = 1e-6
THZ = 1e12
EV = Constants.e
MEV = 1e-3 * Constants.e


class ConfigError(ValueError):
    """Invalid configuration value. ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"

    @classmethod
    def parse(cls, value) -> "Polarization":
        if isinstance(value, Polarization):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ConfigError("pol", f"unknown polarization {value!r}, expected TE or TM")


@dataclasses.dataclass(frozen=True)
class PhysicalConfig:
    """One plane-wave scattering problem: two dielectrics, period, incidence.

    Derived wavenumbers are exposed as properties. ``tau_u``/``tau_w`` are the
    polarization weights (1 in TE, 1/eps in TM).
    """

    eps_u: float
    eps_w: float
    d: float
    theta: float
    f: float
    polarization: Polarization

    def __post_init__(self):
        for key, value in (("eps_u", self.eps_u), ("eps_w", self.eps_w), ("d", self.d), ("f", self.f)):
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(key, f"must be positive, got {value!r}")
        if not (math.isfinite(self.theta) and abs(self.theta) < math.pi / 2):
            raise ConfigError("theta", f"|theta| must be below pi/2, got {self.theta!r}")
        object.__setattr__(self, "polarization", Polarization.parse(self.polarization))

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f

    @property
    def k0(self) -> float:
        return self.omega / Constants.c0

    @property
    def ku(self) -> float:
        return math.sqrt(self.eps_u) * self.k0

    @property
    def kw(self) -> float:
        return math.sqrt(self.eps_w) * self.k0

    @property
    def alpha(self) -> float:
        return self.ku * math.sin(self.theta)

    @property
    def gamma_u(self) -> float:
        return self.ku * math.cos(self.theta)

    @property
    def tau_u(self) -> float:
        return 1.0 if self.polarization is Polarization.TE else 1.0 / self.eps_u

    @property
    def tau_w(self) -> float:
        return 1.0 if self.polarization is Polarization.TE else 1.0 / self.eps_w

    def with_frequency(self, f: float) -> "PhysicalConfig":
        return dataclasses.replace(self, f=f)

    def with_period(self, d: float) -> "PhysicalConfig":
        return dataclasses.replace(self, d=d)


def wavenumbers(config: PhysicalConfig) -> tuple[float, float, float, float, float]:
    """Return ``(k0, ku, kw, alpha, gamma_u)`` in 1/m."""
    return config.k0, config.ku, config.kw, config.alpha, config.gamma_u


def _number(raw: Mapping[str, object], key: str, default=None) -> float:
    if key not in raw:
        if default is None:
            raise ConfigError(key, "missing required key")
        return default
    value = raw[key]
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"not a number: {value!r}")
    if not math.isfinite(out):
        raise ConfigError(key, f"not finite: {value!r}")
    return out


def _positive(raw: Mapping[str, object], key: str, default=None) -> float:
    value = _number(raw, key, default)
    if value <= 0:
        raise ConfigError(key, f"must be positive, got {value!r}")
    return value


def validate(raw: Mapping[str, object]) -> PhysicalConfig:
    """Build a :class:`PhysicalConfig` from keyed values in declared units.

    The frequency is taken from ``f_THz``, or from ``f_min_THz`` when only a
    sweep block is given. Errors are :class:`ConfigError` carrying the key.
    """
    eps_u = _positive(raw, "eps_u")
    eps_w = _positive(raw, "eps_w")
    d = _positive(raw, "d_um") * UM
    theta_deg = _number(raw, "theta_deg", 0.0)
    if abs(theta_deg) >= 90.0:
        raise ConfigError("theta_deg", f"|theta| must be below 90 degrees, got {theta_deg!r}")
    if "f_THz" in raw:
        f = _positive(raw, "f_THz") * THZ
    elif "f_min_THz" in raw:
        f = _positive(raw, "f_min_THz") * THZ
    else:
        raise ConfigError("f_THz", "missing frequency (f_THz or f_min_THz)")
    pol = Polarization.parse(raw.get("pol", "TM"))
    return PhysicalConfig(eps_u=eps_u, eps_w=eps_w, d=d, theta=math.radians(theta_deg), f=f, polarization=pol)


def to_keyed(config: PhysicalConfig) -> dict[str, str]:
    """Emit ``config`` back as keyed text values (inverse of :func:`validate`)."""
    return {
        "eps_u": repr(config.eps_u),
        "eps_w": repr(config.eps_w),
        "d_um": repr(config.d / UM),
        "theta_deg": repr(math.degrees(config.theta)),
        "f_THz": repr(config.f / THZ),
        "pol": config.polarization.value,
    }
