"""Per-interferer normalized power gains, the radiated-gain distribution,
and reference-link quantities."""

import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import AntennaPattern, mainlobe_prob
from .geometry import BlockageReport, UserSet, _wrap_angle

__all__ = ["LinkModel", "ReferenceLink", "OmegaVector", "GainPmf",
           "omega_vector", "omega_from_arrays", "interferer_gain_pmf", "beta0"]


@dataclass(frozen=True)
class LinkModel:
    """Nakagami/path-loss parameters shared by all links.

    noise is the linear noise power normalized by the reference transmit
    power (antenna gains excluded); power_ratio is the common interferer to
    reference transmit-power ratio P_i / P_0.
    """
    m_los: int = 4
    m_nlos: int = 2
    alpha_los: float = 2.0
    alpha_nlos: float = 4.0
    noise: float = 0.01
    p_t: float = 1.0
    power_ratio: float = 1.0

    def __post_init__(self):
        for name, m in (("m_los", self.m_los), ("m_nlos", self.m_nlos)):
            if m != int(m) or m < 1:
                raise ValueError(f"{name} must be a positive integer, got {m}")
        if not (0.0 < self.alpha_los <= self.alpha_nlos):
            raise ValueError("need alpha_nlos >= alpha_los > 0")
        if self.noise <= 0:
            raise ValueError("noise must be positive")
        if not (0.0 <= self.p_t <= 1.0):
            raise ValueError(f"p_t must lie in [0, 1], got {self.p_t}")
        if self.power_ratio <= 0:
            raise ValueError("power_ratio must be positive")


@dataclass(frozen=True)
class ReferenceLink:
    """Fixed reference transmitter at distance r0, azimuth phi0, elevation
    psi0 from the receiver; LOS by default (m0 = m_los, alpha0 = alpha_los)."""
    r0: float = 0.3
    phi0: float = 0.0
    psi0: float = 0.0
    m0: int = 4
    alpha0: float = 2.0

    def __post_init__(self):
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")
        if self.m0 != int(self.m0) or self.m0 < 1:
            raise ValueError(f"m0 must be a positive integer, got {self.m0}")

    @classmethod
    def from_link(cls, link: LinkModel, r0: float, phi0: float = 0.0,
                  psi0: float = 0.0, nlos: bool = False) -> "ReferenceLink":
        """LOS reference link by default; nlos=True swaps in the NLOS
        fading/path-loss parameters (self-blocked reference)."""
        if nlos:
            return cls(r0, phi0, psi0, link.m_nlos, link.alpha_nlos)
        return cls(r0, phi0, psi0, link.m_los, link.alpha_los)


@dataclass
class OmegaVector:
    """Normalized power gains: omega0 for the reference link, omega[i] for
    each interferer, with the LOS flags that produced them."""
    omega0: float
    omega: np.ndarray
    los_flags: np.ndarray = field(default_factory=lambda: np.zeros(0, bool))

    @property
    def k(self) -> int:
        return len(self.omega)


@dataclass(frozen=True)
class GainPmf:
    """Discrete distribution of the relative power an interferer radiates
    toward the receiver."""
    values: np.ndarray
    probs: np.ndarray


def omega_from_arrays(radii, azimuths, los_flags, ref: ReferenceLink,
                      rx: AntennaPattern, link: LinkModel,
                      trivial_elevation: bool = False,
                      power_ratio=None) -> OmegaVector:
    """OmegaVector from plain arrays of interferer polar coordinates.

    omega[i] = (P_i/P_0) * G_r * R_i^-alpha_i when the interferer azimuth
    falls within the receiver's main lobe (wrapped |phi_i - phi0| <=
    theta_az/2), else with g_r; alpha_i switches on the LOS flag. With
    trivial_elevation=True (reference beam tilted away from the horizontal
    plane) every interferer sees the side lobe.
    """
    radii = np.asarray(radii, dtype=float)
    azimuths = np.asarray(azimuths, dtype=float)
    los_flags = np.asarray(los_flags, dtype=bool)
    if np.any(radii == 0):
        raise ValueError("interferer co-located with the receiver (R_i = 0)")
    ratio = link.power_ratio if power_ratio is None else np.asarray(power_ratio, float)
    alpha = np.where(los_flags, link.alpha_los, link.alpha_nlos)
    if trivial_elevation:
        rx_gain = np.full(radii.shape, rx.gain_side)
    else:
        dphi = np.abs(_wrap_angle(azimuths - ref.phi0))
        rx_gain = np.where(dphi <= rx.theta_az / 2.0, rx.gain_main, rx.gain_side)
    omega = ratio * rx_gain * radii ** (-alpha)
    omega0 = rx.gain_main * ref.r0 ** (-ref.alpha0)
    return OmegaVector(omega0=omega0, omega=omega, los_flags=los_flags)


def omega_vector(users: UserSet, report: BlockageReport, ref: ReferenceLink,
                 rx: AntennaPattern, link: LinkModel,
                 trivial_elevation: bool = False,
                 power_ratio=None) -> OmegaVector:
    """OmegaVector for a user set with blockage flags already computed."""
    xy = users.tx_xy()
    radii = np.hypot(xy[:, 0], xy[:, 1])
    azimuths = np.arctan2(xy[:, 1], xy[:, 0])
    return omega_from_arrays(radii, azimuths, report.los, ref, rx, link,
                             trivial_elevation=trivial_elevation,
                             power_ratio=power_ratio)


def interferer_gain_pmf(tx: AntennaPattern, link: LinkModel) -> GainPmf:
    """Distribution of the relative radiated power I: 0 when silent, G_t
    when the random main lobe covers the receiver, g_t otherwise.

    Atoms with equal support values are merged and zero-probability atoms
    dropped, so e.g. p_t = 1 with an omni antenna is a single point mass.
    """
    p_m = mainlobe_prob(tx)
    raw = [(0.0, 1.0 - link.p_t),
           (tx.gain_side, link.p_t * (1.0 - p_m)),
           (tx.gain_main, link.p_t * p_m)]
    merged = {}
    for v, p in raw:
        if p > 0.0:
            merged[v] = merged.get(v, 0.0) + p
    values = np.array(sorted(merged))
    probs = np.array([merged[v] for v in values])
    return GainPmf(values=values, probs=probs)


def beta0(beta: float, ref: ReferenceLink, tx: AntennaPattern,
          omega0: float) -> float:
    """Normalized threshold beta * m0 / (G_t * omega0) that rate-parameterizes
    the reference link's gamma-distributed signal term."""
    if np.any(np.asarray(beta) < 0):
        raise ValueError("beta must be non-negative")
    return beta * ref.m0 / (tx.gain_main * omega0)
