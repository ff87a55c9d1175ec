"""Random beamforming in multi-cell downlinks.

Closed-form and numerical sum rates, SINR distributions with their
extreme-value limits, a Monte Carlo reference simulator, and the high-SNR
degrees-of-freedom region.
"""

from .dof import (
    DofRegion,
    dof_member,
    dof_multicell,
    dof_region,
    dof_single,
    dof_single_opt,
    dof_support,
    dof_upper_region,
    rbf_is_dof_optimal,
)
from .mc import McConfig, McTrace, simulate_sumrate, simulate_trace
from .model import ConfigError, SystemModel, UserScaling, build_system, db_to_linear
from .rate import (
    PrecisionError,
    RateResult,
    dpc_upper_rate,
    scaling_law,
    sumrate_closed_multicell,
    sumrate_closed_single,
    sumrate_quadrature,
)
from .sinr import SinrDistribution, evt_constants, growth_function, sinr_cdf, sinr_pdf, sinr_tail

__version__ = "0.1.0"
