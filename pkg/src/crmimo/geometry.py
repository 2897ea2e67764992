"""Node geometry, steering vectors, and true LOS channel synthesis.

Every array (the BS and each UE) is a half-wavelength uniform linear array
laid along the x-axis, so broadside points along +y and the angular sine of
a node at bearing theta from broadside is sin(theta) = dx / distance. One
angular sine per link drives both ends of that link.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_BS_POSITION = (0.0, 0.0)
DEFAULT_PU_POSITIONS = ((20.0, 20.0), (-30.0, 30.0))

# Distances below this are treated as coincident nodes.
MIN_DISTANCE = 1e-9


class GeometryError(ValueError):
    """Degenerate node placement (coincident nodes)."""


@dataclass(frozen=True)
class GeometryConfig:
    """Square-area layout and array sizes.

    side is the edge length in meters of the UE drop area centered on the
    BS; gamma is the path-loss exponent used for every link.
    """

    side: float = 100.0
    num_ue: int = 10
    m_bs: int = 128
    m_ue: int = 4
    gamma: float = 3.6
    preset: str = "default"

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("side must be positive")
        if self.num_ue < 1:
            raise ValueError("num_ue must be >= 1")
        if self.m_bs <= self.num_ue:
            raise ValueError(
                f"m_bs={self.m_bs} must exceed num_ue={self.num_ue}"
            )
        if self.m_ue < 3:
            # two receive nulls must leave a nonzero-gain dimension
            raise ValueError("m_ue must be >= 3")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.preset != "default":
            raise ValueError(f"unknown preset {self.preset!r}")


@dataclass
class Scenario:
    """Concrete node placement for one trial."""

    bs_position: np.ndarray   # (2,)
    pu_positions: np.ndarray  # (2, 2)
    ue_positions: np.ndarray  # (num_ue, 2)
    num_ue: int
    m_bs: int
    m_ue: int


@dataclass(frozen=True)
class LinkParams:
    """True parameters of one LOS link."""

    alpha: float     # amplitude attenuation, distance**(-gamma/2)
    psi: float       # phase, uniform on [0, 2*pi)
    phi: float       # angular sine of the far node seen from the array end
    distance: float  # meters


@dataclass
class ChannelSet:
    """True channels for all links, stored as per-link scalars.

    ss_links[k] is BS->UE-k, sp_links[j] is BS->PU-j, and ps_links[j][k]
    is PU-j seen from UE-k's array. Channel matrices are rank-1 and fully
    reconstructible from these parameters via channel_matrix().
    """

    ss_links: tuple
    sp_links: tuple
    ps_links: tuple
    gamma: float
    m_bs: int
    m_ue: int


def steering_vector(m: int, phi: float) -> np.ndarray:
    """Array response of an m-element ULA toward angular sine phi.

    Entry i is exp(-1j*pi*i*phi); the squared norm is m.
    """
    if m < 1:
        raise ValueError("antenna count must be >= 1")
    if not -1.0 <= phi <= 1.0:
        raise ValueError(f"angular sine {phi} outside [-1, 1]")
    return np.exp(-1j * np.pi * phi * np.arange(m))


def make_scenario(config: GeometryConfig, rng: np.random.Generator) -> Scenario:
    """Place the BS, both PUs, and num_ue UEs i.i.d. uniform over the square."""
    half = config.side / 2.0
    ue = rng.uniform(-half, half, size=(config.num_ue, 2))
    return Scenario(
        bs_position=np.array(DEFAULT_BS_POSITION),
        pu_positions=np.array(DEFAULT_PU_POSITIONS),
        ue_positions=ue,
        num_ue=config.num_ue,
        m_bs=config.m_bs,
        m_ue=config.m_ue,
    )


def _link(array_xy, target_xy, gamma: float, psi: float) -> LinkParams:
    delta = np.asarray(target_xy, dtype=float) - np.asarray(array_xy, dtype=float)
    d = float(np.hypot(delta[0], delta[1]))
    if d < MIN_DISTANCE:
        raise GeometryError(f"coincident nodes at {np.asarray(target_xy)}")
    phi = float(np.clip(delta[0] / d, -1.0, 1.0))
    return LinkParams(alpha=d ** (-gamma / 2.0), psi=psi, phi=phi, distance=d)


def compute_channels(
    scenario: Scenario, gamma: float, rng: np.random.Generator
) -> ChannelSet:
    """Derive every link's attenuation, phase, and angular sine.

    Attenuation follows alpha = d**(-gamma/2); phases are i.i.d. uniform on
    [0, 2*pi). Draw order is fixed (ss, sp, then ps by PU-major order) so a
    seeded generator yields reproducible channels.
    """
    k = scenario.num_ue
    psi_ss = rng.uniform(0.0, 2.0 * np.pi, size=k)
    psi_sp = rng.uniform(0.0, 2.0 * np.pi, size=2)
    psi_ps = rng.uniform(0.0, 2.0 * np.pi, size=(2, k))

    ss = tuple(
        _link(scenario.bs_position, scenario.ue_positions[i], gamma, psi_ss[i])
        for i in range(k)
    )
    sp = tuple(
        _link(scenario.bs_position, scenario.pu_positions[j], gamma, psi_sp[j])
        for j in range(2)
    )
    # PU bearings are taken from each UE's own array position.
    ps = tuple(
        tuple(
            _link(scenario.ue_positions[i], scenario.pu_positions[j], gamma, psi_ps[j, i])
            for i in range(k)
        )
        for j in range(2)
    )
    return ChannelSet(
        ss_links=ss, sp_links=sp, ps_links=ps,
        gamma=gamma, m_bs=scenario.m_bs, m_ue=scenario.m_ue,
    )


def channel_matrix(link: LinkParams, m_rx: int, m_tx: int) -> np.ndarray:
    """Rank-1 channel beta * a_rx(phi) a_tx(phi)^H for one link.

    MISO/SIMO links use m_rx or m_tx equal to 1.
    """
    beta = link.alpha * np.exp(1j * link.psi)
    a_rx = steering_vector(m_rx, link.phi)
    a_tx = steering_vector(m_tx, link.phi)
    return beta * np.outer(a_rx, a_tx.conj())
