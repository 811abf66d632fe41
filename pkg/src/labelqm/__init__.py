"""Hidden-label vs. orthodox quantum measurement statistics at desk scale."""
from .config import ExperimentConfig, parse_config
from .errors import *  # noqa: F401,F403
from .hilbert import (
    Observable,
    QuantumState,
    born_probabilities,
    computational_basis,
    eigendecompose,
    fourier_basis,
    hadamard_basis,
    named_basis,
)
from .labels import LabelSpace, WeightTable, consistent_set, weight_table
from .measurement import direct_distribution, order_comparison, sample_protocol, sequential_distribution
from .pairs import ambiguity_report, joint_distribution, make_pair
from .phasespace import discrete_wigner, make_grid, phase_space_label_state
from .quaternion import Quaternion
from .runner import emit_report, run_experiment
from .ztable import SolverParams, ZTable, z_table

__version__ = "0.1.0"
