"""Pure-source discovery in noisy LTI difference-algebraic systems."""

from .dipca import ConstraintBasis, NoiseModel, count_unity, estimate_noise, scaled_spectrum
from .lagstack import LagMatrix, build_lag_matrix
from .pipeline import DiscoverOptions, DiscoveryReport, discover
from .pov import (
    PartitionResult,
    SourceReport,
    classify_sources,
    condition_number,
    enumerate_partitions,
)
from .simulate import (
    External,
    GaussianWhite,
    MeasurementSet,
    Prbs,
    SourceSignalSpec,
    Step,
    Trajectory,
    add_noise,
    simulate_noise_free,
)
from .structure import (
    StructureEstimate,
    estimate_na,
    estimate_nd,
    estimate_structure,
    nd_from_counts,
)
from .sysmodel import (
    ALGEBRAIC,
    DIFFERENCE,
    ConstraintMatrix,
    Equation,
    GroundTruthPartition,
    LtiDaeSystem,
    build_constraint_matrix,
    ground_truth_partitions,
)

__version__ = "0.1.0"

__all__ = [
    "ALGEBRAIC",
    "DIFFERENCE",
    "ConstraintBasis",
    "ConstraintMatrix",
    "DiscoverOptions",
    "DiscoveryReport",
    "Equation",
    "External",
    "GaussianWhite",
    "GroundTruthPartition",
    "LagMatrix",
    "LtiDaeSystem",
    "MeasurementSet",
    "NoiseModel",
    "PartitionResult",
    "Prbs",
    "SourceReport",
    "SourceSignalSpec",
    "Step",
    "StructureEstimate",
    "Trajectory",
    "add_noise",
    "build_constraint_matrix",
    "build_lag_matrix",
    "classify_sources",
    "condition_number",
    "count_unity",
    "discover",
    "enumerate_partitions",
    "estimate_na",
    "estimate_nd",
    "estimate_noise",
    "estimate_structure",
    "ground_truth_partitions",
    "nd_from_counts",
    "scaled_spectrum",
    "simulate_noise_free",
]
