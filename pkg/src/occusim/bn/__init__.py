"""Discrete Bayesian networks and two-slice dynamic networks."""

from .dbn import (
    PREVIOUS,
    TwoSliceSpec,
    filter_sequence,
    filter_step,
    initial_belief,
    two_slice_errors,
    unroll_dbn,
    validate_two_slice,
)
from .errors import *  # noqa: F401,F403
from .inference import enumerate_posterior, infer_posterior, joint_probability
from .io import FormatError, dump_network, load_network, network_from_dict, network_to_dict
from .learning import learn_cpts
from .network import Cpt, Distribution, NetworkSpec, VariableSpec, network_errors, validate_network
from .sampling import sample_assignment, sample_indices, sample_records
