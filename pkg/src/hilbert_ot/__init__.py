"""Hilbert curve projection distances between weighted point clouds.

Core entry points:

* :func:`hcp_distance` - the curve-projection transport distance and plan
* :func:`iprhcp` / :func:`prhcp` - subspace-projected variants
* :func:`exact_wasserstein`, :func:`sliced_wasserstein`, :func:`gaussian_w2`
  - verification baselines
* :func:`run_flow` - particle gradient flows
* :func:`run_experiment` - bundled desk-scale experiments
"""

__version__ = "0.1.0"

from ._kernels import active_backend_name, available_backends
from .baselines import exact_wasserstein, gaussian_w2, sliced_wasserstein
from .cloud import BoundingBox, WeightedPointCloud, bounding_box, quantize
from .errors import HilbertOtError, InvalidInputError, ParameterError
from .flows import FlowConfig, FlowTrajectory, flow_step, run_flow
from .hcp import DistanceReport, HcpParams, hcp_distance, hcp_matched
from .hilbert import CurveParams, decode, encode
from .ot1d import SortedLine, SparseCoupling, northwest_coupling, wasserstein_1d
from .experiments import ExperimentSpec, generate, run_experiment
from .subspace import ProjectionSampler, iprhcp, prhcp, sample_stiefel

__all__ = [
    "BoundingBox",
    "CurveParams",
    "DistanceReport",
    "ExperimentSpec",
    "FlowConfig",
    "FlowTrajectory",
    "HcpParams",
    "HilbertOtError",
    "InvalidInputError",
    "ParameterError",
    "ProjectionSampler",
    "SortedLine",
    "SparseCoupling",
    "WeightedPointCloud",
    "active_backend_name",
    "available_backends",
    "bounding_box",
    "decode",
    "encode",
    "exact_wasserstein",
    "flow_step",
    "gaussian_w2",
    "generate",
    "hcp_distance",
    "hcp_matched",
    "iprhcp",
    "northwest_coupling",
    "prhcp",
    "quantize",
    "run_experiment",
    "run_flow",
    "sample_stiefel",
    "sliced_wasserstein",
    "wasserstein_1d",
    "__version__",
]
