"""Downlink nullsteering beamforming and admission control for an underlay
cognitive-radio network with a massive-MIMO secondary base station."""

from .admission import (
    AdmissionProblem,
    AdmissionResult,
    CapacityError,
    ConstraintSet,
    achieved_rate,
    equal_power_allocate,
    equal_rate_allocate,
    estimated_interference,
    ilp_admit,
    interference_control,
    required_power,
    true_interference,
)
from .beamforming import (
    BeamformerSet,
    InfeasibleBeamError,
    design_beamformers,
    effective_gains,
    nullsteer,
    rx_beamformers,
    tx_beamformers,
)
from .estimation import (
    ChannelEstimate,
    EstimationConfig,
    estimate_attenuation,
    estimate_channels,
    quantize_angle,
)
from .geometry import (
    ChannelSet,
    GeometryConfig,
    GeometryError,
    LinkParams,
    Scenario,
    channel_matrix,
    compute_channels,
    make_scenario,
    steering_vector,
)
from .harness import (
    ExperimentConfig,
    SummaryRow,
    TrialRecord,
    prepare_trial,
    run_sweep,
    run_trial,
)
from .interference import (
    InterferenceBasis,
    interference_basis,
    interference_basis_quadrature,
    quadratic_form,
)
from .units import dbm_to_mw, mw_to_dbm

__version__ = "0.1.0"
