"""Link-level MIMO simulator.

Correlated Rician fading with co-channel interferers, sector antenna
patterns with downtilt, a trisector reuse layout, and deterministic
variance-bounded Monte Carlo BER estimation.
"""

from .antenna import AntennaPattern, composite_gain, gain_cut, sample_pattern
from .channel import (
    AggregateInterferer,
    ChannelSpec,
    InterfererSpec,
    NormalizedChannelSpec,
    aggregate,
    build_link_spec,
    exponential_correlation,
    expected_rx_power,
    inr,
    los_mean,
    normalize,
    received_signal,
    rician_factor,
    sample_channel,
    snr,
)
from .modulation import ModulationScheme, demodulate, get_scheme, modulate
from .network import (
    PathLossModel,
    ReuseAssignment,
    SiteLayout,
    assign_segments,
    bundled_layout,
    interference_profile,
    load_layout,
    path_loss,
)
from .receiver import linear_receive
from .simulate import (
    BERCurve,
    BERPoint,
    SimConfig,
    StoppingRule,
    rayleigh_ber_oracle,
    run_point,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "composite_gain",
    "gain_cut",
    "sample_pattern",
    "AggregateInterferer",
    "ChannelSpec",
    "InterfererSpec",
    "NormalizedChannelSpec",
    "aggregate",
    "build_link_spec",
    "exponential_correlation",
    "expected_rx_power",
    "inr",
    "los_mean",
    "normalize",
    "received_signal",
    "rician_factor",
    "sample_channel",
    "snr",
    "ModulationScheme",
    "demodulate",
    "get_scheme",
    "modulate",
    "PathLossModel",
    "ReuseAssignment",
    "SiteLayout",
    "assign_segments",
    "bundled_layout",
    "interference_profile",
    "load_layout",
    "path_loss",
    "linear_receive",
    "BERCurve",
    "BERPoint",
    "SimConfig",
    "StoppingRule",
    "rayleigh_ber_oracle",
    "run_point",
    "run_sweep",
    "__version__",
]
