"""Symmetry-constrained Gaussian bosonic states, channels and monotones."""

from .config import RunConfig, get_config, load_config, set_config
from .gaussian_channels import GaussianChannel, GaussianUnitary
from .gaussian_states import GaussianState
from .phase_space_core import DomainError, InfeasibleError, UncertaintyWarning
from .representations import SymmetryRep

__version__ = "0.1.0"
