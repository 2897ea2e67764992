"""Projection-based nullsteering transmit and receive beamformers.

Each UE's receive beam points at the BS while nulling the two estimated
PU directions; each transmit beam points at its UE while nulling the two
estimated PU directions and every other UE's true direction. Both are the
orthogonal-complement projection of the target steering vector, which is
the gain-optimal unit vector under exact null constraints.
"""

from dataclasses import dataclass

import numpy as np

from .estimation import ChannelEstimate
from .geometry import ChannelSet, channel_matrix, steering_vector
from .interference import quadratic_form

# Null directions whose singular value falls below RANK_TOL * max are
# duplicates introduced by grid quantization and are dropped.
RANK_TOL = 1e-10
FEAS_TOL = 1e-8


class InfeasibleBeamError(RuntimeError):
    """Target direction lies (numerically) inside the null span."""


@dataclass
class BeamformerSet:
    """Per-UE beams and the scalar couplings the allocator consumes."""

    v: np.ndarray      # (K, m_bs) transmit beams, unit rows (zero if unservable)
    u: np.ndarray      # (K, m_ue) receive beams, unit rows (zero if unservable)
    gamma: np.ndarray  # (K,) effective gains |u^H H v|^2
    g1: np.ndarray     # (K,) leaked-power coupling toward PU-1's angle interval
    g2: np.ndarray     # (K,) same toward PU-2


def orthonormal_null_basis(nulls) -> np.ndarray:
    """Rank-robust orthonormal basis of span(nulls), columns orthonormal.

    Uses the SVD rather than the textbook A (A^H A)^{-1} A^H projector,
    which is singular whenever quantization maps two directions to the
    same grid angle.
    """
    if len(nulls) == 0:
        return np.zeros((0, 0), dtype=complex)
    a = np.column_stack(nulls)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    return u[:, s > RANK_TOL * s[0]]


def null_space_projector(nulls) -> np.ndarray:
    """Projector onto span(nulls) (P^2 = P, P^H = P)."""
    q = orthonormal_null_basis(nulls)
    if q.shape[1] == 0:
        m = len(nulls[0]) if len(nulls) else 0
        return np.zeros((m, m), dtype=complex)
    return q @ q.conj().T


def nullsteer(target: np.ndarray, nulls, eps_feas: float = FEAS_TOL) -> np.ndarray:
    """Unit beam maximizing |target^H w| subject to w^H n = 0 for all nulls.

    Raises InfeasibleBeamError when the residual of the target outside the
    null span is below eps_feas relative to its norm.
    """
    target = np.asarray(target, dtype=complex)
    target_norm = np.linalg.norm(target)
    q = orthonormal_null_basis(nulls)
    if q.shape[1] == 0:
        w = target.copy()
    else:
        w = target - q @ (q.conj().T @ target)
        # second pass: when the target is nearly inside the null span, the
        # first projection's rounding residue would otherwise be amplified
        # by 1/||w|| at normalization
        w = w - q @ (q.conj().T @ w)
    w_norm = np.linalg.norm(w)
    if w_norm < eps_feas * target_norm:
        raise InfeasibleBeamError("target direction inside null span")
    return w / w_norm


def rx_beamformers(channels: ChannelSet, estimates: ChannelEstimate) -> np.ndarray:
    """Receive beams toward the BS with nulls at both estimated PU angles.

    A UE whose BS direction is numerically inside its null span gets a
    zero row (unservable; admission drops it).
    """
    k = len(channels.ss_links)
    m_ue = channels.m_ue
    u = np.zeros((k, m_ue), dtype=complex)
    for i in range(k):
        phi1, phi2 = estimates.ps_phi_hat[0, i], estimates.ps_phi_hat[1, i]
        nulls = [steering_vector(m_ue, phi1)]
        if phi2 != phi1:
            nulls.append(steering_vector(m_ue, phi2))
        target = steering_vector(m_ue, channels.ss_links[i].phi)
        try:
            u[i] = nullsteer(target, nulls)
        except InfeasibleBeamError:
            pass
    return u


def tx_beamformers(channels: ChannelSet, estimates: ChannelEstimate) -> np.ndarray:
    """Transmit beams toward each UE, nulling estimated PU angles and all
    other UEs' true angles."""
    k = len(channels.ss_links)
    m_bs = channels.m_bs
    if k + 2 > m_bs:
        raise ValueError(f"need m_bs >= num_ue + 2, got m_bs={m_bs}, num_ue={k}")
    pu_nulls = [steering_vector(m_bs, estimates.sp_phi_hat[0])]
    if estimates.sp_phi_hat[1] != estimates.sp_phi_hat[0]:
        pu_nulls.append(steering_vector(m_bs, estimates.sp_phi_hat[1]))
    ue_vectors = [steering_vector(m_bs, link.phi) for link in channels.ss_links]

    v = np.zeros((k, m_bs), dtype=complex)
    for i in range(k):
        nulls = pu_nulls + [ue_vectors[l] for l in range(k) if l != i]
        try:
            v[i] = nullsteer(ue_vectors[i], nulls)
        except InfeasibleBeamError:
            pass
    return v


def effective_gains(
    channels: ChannelSet,
    v: np.ndarray,
    u: np.ndarray,
    bases: tuple,
):
    """Effective gains |u^H H v|^2 and leaked-power couplings per UE.

    The gain is evaluated both through the full bilinear form and through
    its factored form alpha^2 |u^H a_rx|^2 |a_tx^H v|^2; disagreement
    beyond 1e-9 relative indicates an inconsistent channel model.
    """
    k = len(channels.ss_links)
    gamma = np.zeros(k)
    g1 = np.zeros(k)
    g2 = np.zeros(k)
    for i in range(k):
        if not v[i].any() or not u[i].any():
            continue
        link = channels.ss_links[i]
        h = channel_matrix(link, channels.m_ue, channels.m_bs)
        bilinear = abs(np.vdot(u[i], h @ v[i])) ** 2
        a_rx = steering_vector(channels.m_ue, link.phi)
        a_tx = steering_vector(channels.m_bs, link.phi)
        factored = (
            link.alpha ** 2
            * abs(np.vdot(u[i], a_rx)) ** 2
            * abs(np.vdot(a_tx, v[i])) ** 2
        )
        # gains below the cancellation floor of the dot products (relative
        # to the Cauchy-Schwarz bound) are numerically zero; comparing them
        # relatively would amplify float noise
        floor = link.alpha ** 2 * channels.m_ue * channels.m_bs * 1e-14
        if abs(bilinear - factored) > 1e-9 * max(bilinear, factored, floor):
            raise ArithmeticError(
                f"gain forms disagree for UE {i}: {bilinear} vs {factored}"
            )
        gamma[i] = bilinear
        g1[i] = max(quadratic_form(bases[0], v[i]), 0.0)
        g2[i] = max(quadratic_form(bases[1], v[i]), 0.0)
    return gamma, g1, g2


def design_beamformers(
    channels: ChannelSet,
    estimates: ChannelEstimate,
    bases: tuple,
) -> BeamformerSet:
    """Receive beams, transmit beams, and their scalar couplings in one pass."""
    u = rx_beamformers(channels, estimates)
    v = tx_beamformers(channels, estimates)
    gamma, g1, g2 = effective_gains(channels, v, u, bases)
    return BeamformerSet(v=v, u=u, gamma=gamma, g1=g1, g2=g2)
