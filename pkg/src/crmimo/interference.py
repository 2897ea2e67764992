"""Interval-averaged interference matrix for an imperfectly known PU angle.

With the PU's angular sine known only to within one grid cell, the average
power leaked toward it by a beam v is v^H F(phi_hat) v, where F averages
the steering outer product a(phi) a(phi)^H uniformly over the cell
[phi_hat - 1/m, phi_hat + 1/m] (scaled by m/2, the inverse cell width).

The closed form of the average is Toeplitz with entries
F[i, j] = exp(-1j*pi*(i-j)*phi_hat) * sinc((i-j)/m); the quadrature
routine below integrates the definition numerically and exists purely to
validate that expression.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class InterferenceBasis:
    matrix: np.ndarray  # (m_bs, m_bs) complex Hermitian PSD
    phi_hat: float
    m_bs: int


def interference_basis(phi_hat: float, m_bs: int) -> InterferenceBasis:
    """Closed-form interval average of the steering outer product."""
    if m_bs < 2:
        raise ValueError("m_bs must be >= 2")
    offsets = np.arange(-(m_bs - 1), m_bs)
    kernel = np.exp(-1j * np.pi * offsets * phi_hat) * np.sinc(offsets / m_bs)
    idx = np.subtract.outer(np.arange(m_bs), np.arange(m_bs)) + (m_bs - 1)
    return InterferenceBasis(matrix=kernel[idx], phi_hat=phi_hat, m_bs=m_bs)


def interference_basis_quadrature(
    phi_hat: float, m_bs: int, nodes: int = 64
) -> InterferenceBasis:
    """Gauss-Legendre evaluation of the defining integral (test oracle).

    Evaluates the integrand from scratch so the result is independent of
    the closed form above.
    """
    if m_bs < 2:
        raise ValueError("m_bs must be >= 2")
    if nodes < 16:
        raise ValueError("nodes must be >= 16")
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 1.0 / m_bs
    phis = phi_hat + half * x
    # rows of A are a(phi_i)^T with a_m(phi) = exp(-1j*pi*m*phi)
    a = np.exp(-1j * np.pi * np.outer(phis, np.arange(m_bs)))
    weighted = (w[:, None] * a).T @ a.conj()
    matrix = (m_bs / 2.0) * half * weighted
    return InterferenceBasis(matrix=matrix, phi_hat=phi_hat, m_bs=m_bs)


def quadratic_form(basis: InterferenceBasis, v: np.ndarray) -> float:
    """Average leaked power v^H F v of beam v over the angle interval."""
    v = np.asarray(v)
    if v.shape != (basis.m_bs,):
        raise ValueError(f"expected vector of length {basis.m_bs}, got {v.shape}")
    q = np.vdot(v, basis.matrix @ v)
    norm_sq = float(np.real(np.vdot(v, v)))
    assert abs(q.imag) <= 1e-10 * max(norm_sq, 1e-300), "quadratic form not real"
    return float(q.real)
