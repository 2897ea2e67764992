"""Noisy estimates of the BS<->PU and PU->UE channel parameters.

The BS scans a uniform angular grid, so estimated angular sines are the
nearest grid cell centers and the estimation error stays within one half
cell. Attenuation estimates carry additive Gaussian error whose variance
scales with the true attenuation.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import ChannelSet, Scenario

_MAX_RESAMPLE = 1000


@dataclass(frozen=True)
class EstimationConfig:
    """Attenuation-noise strength and its interpretation.

    noise_mode "variance" gives sigma_alpha^2 = variance_fraction * alpha;
    "std" gives sigma_alpha = variance_fraction * alpha instead.
    """

    variance_fraction: float = 0.01
    noise_mode: str = "std"

    def __post_init__(self):
        if self.variance_fraction < 0:
            raise ValueError("variance_fraction must be >= 0")
        if self.noise_mode not in ("variance", "std"):
            raise ValueError(f"unknown noise_mode {self.noise_mode!r}")


@dataclass
class ChannelEstimate:
    sp_alpha_hat: np.ndarray   # (2,) BS->PU attenuation estimates, > 0
    sp_phi_hat: np.ndarray     # (2,) BS->PU angular sines on the M_b grid
    ps_phi_hat: np.ndarray     # (2, K) PU->UE angular sines on the M_u grid
    sigma_alpha_sq: np.ndarray  # (2,) error variances actually applied


def quantize_angle(phi_true, m_grid: int):
    """Snap an angular sine in [-1, 1] to the nearest of m_grid cell centers.

    The grid is -1 + (2i+1)/m_grid for i = 0..m_grid-1 (spacing 2/m_grid),
    so the quantization error always lies in [-1/m_grid, 1/m_grid].
    Accepts scalars or arrays.
    """
    if m_grid < 2:
        raise ValueError("m_grid must be >= 2")
    phi = np.asarray(phi_true, dtype=float)
    cell = np.clip(np.floor((phi + 1.0) * m_grid / 2.0).astype(int), 0, m_grid - 1)
    out = -1.0 + (2.0 * cell + 1.0) / m_grid
    return out if out.ndim else float(out)


def estimate_attenuation(
    alpha_true: float, rng: np.random.Generator, variance_fraction: float
) -> float:
    """True attenuation plus N(0, variance_fraction * alpha_true) error.

    Non-positive draws are resampled so the estimate stays usable in the
    path-loss formulas downstream.
    """
    if alpha_true <= 0:
        raise ValueError("alpha_true must be positive")
    if variance_fraction == 0:
        return alpha_true
    sigma = np.sqrt(variance_fraction * alpha_true)
    for _ in range(_MAX_RESAMPLE):
        alpha_hat = alpha_true + sigma * rng.standard_normal()
        if alpha_hat > 0:
            return float(alpha_hat)
    raise RuntimeError("could not draw a positive attenuation estimate")


def estimate_channels(
    channels: ChannelSet,
    scenario: Scenario,
    rng: np.random.Generator,
    config: EstimationConfig,
) -> ChannelEstimate:
    """Quantize PU angles on the BS/UE grids and perturb BS->PU attenuations."""
    sp_phi_hat = np.array(
        [quantize_angle(link.phi, scenario.m_bs) for link in channels.sp_links]
    )
    ps_phi_hat = np.array(
        [
            [quantize_angle(link.phi, scenario.m_ue) for link in row]
            for row in channels.ps_links
        ]
    )

    sp_alpha_hat = np.empty(2)
    sigma_sq = np.empty(2)
    for j, link in enumerate(channels.sp_links):
        if config.noise_mode == "variance":
            fraction = config.variance_fraction
        else:
            # sigma = f*alpha  <=>  sigma^2 = (f^2 * alpha) * alpha
            fraction = config.variance_fraction ** 2 * link.alpha
        sigma_sq[j] = fraction * link.alpha
        sp_alpha_hat[j] = estimate_attenuation(link.alpha, rng, fraction)

    return ChannelEstimate(
        sp_alpha_hat=sp_alpha_hat,
        sp_phi_hat=sp_phi_hat,
        ps_phi_hat=ps_phi_hat,
        sigma_alpha_sq=sigma_sq,
    )
