"""Task offloading in cell-free massive MIMO multi-tier computing.

Channel simulation, zero-forcing SINR, energy/delay cost accounting,
optimal bandwidth and offloading decisions, baselines and a seeded
Monte-Carlo sweep harness.
"""

__version__ = "0.1.0"

from .allocation import (
    argmin_allocation,
    brute_force_allocation,
    dual_allocation,
    theorem2_check,
    threshold_allocation,
)
from .bandwidth import bandwidth_oracle, optimal_bandwidth
from .baselines import noma_policy, noma_rates, random_bandwidth, random_offloading, tdma_policy
from .channel import ChannelRealization, first_hop_snr, path_loss, sample_realization
from .config import (
    ComputeSpec,
    PathLossParams,
    Scenario,
    TaskSpec,
    build_scenario,
    load_config,
    make_scenario,
)
from .cost import Allocation, CostBreakdown, evaluate, first_hop_rate, offload_delta
from .detection import SinrReport, asymptotic_sinr, exact_sinr, gram_eigenvalues, sinr_report, zf_detector
from .exceptions import (
    CapacityError,
    ConfigError,
    InfeasibleError,
    SingularChannelError,
    SolverError,
)
from .harness import SweepSpec, TrialResult, emit_csv, run_simulation, run_sweep, run_trial
