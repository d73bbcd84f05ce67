"""Communication modes and near-field link budgets between planar intelligent surfaces."""

from lismodes.capacity import Allocation, capacity, waterfill
from lismodes.emkernel import CouplingMatrix, assemble_coupling_matrix, green_scalar
from lismodes.errors import (
    ConvergenceError,
    GeometryError,
    InvalidArgument,
    InvalidInput,
    InvalidUse,
    ResourceLimitError,
    SingularKernelError,
)
from lismodes.geometry import (
    Mesh,
    Surface,
    Wave,
    build_mesh,
    fraunhofer_distance,
    transform,
)
from lismodes.linkbudget import GainReport, gain_exact, gain_friis, gain_from_modes
from lismodes.modes import (
    Knee,
    ModeSpectrum,
    Relative,
    count_modes,
    mode_spectrum,
    n_limit_parallel,
    n_paraxial,
)

__version__ = "0.1.0"
