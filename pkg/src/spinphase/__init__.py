"""Phase-space complexity of spin-j quantum states and channels."""
from .errors import DomainError, NumericalError
from .spin import (
    BlochPoint,
    SpinJ,
    angular_momentum_ops,
    as_spin,
    coherent_state,
    displacement,
)
from .states import (
    dicke,
    maximally_mixed,
    noon,
    projector,
    purity,
    qubit_bloch,
    random_mixed,
    random_pure,
    squeeze_one_axis_state,
    squeeze_two_axis_state,
    thermal,
)
from .phasespace import (
    SphereGrid,
    build_grid,
    default_grid,
    fisher_information,
    husimi,
    husimi_gradient,
    wehrl_entropy,
)
from .complexity import (
    OptimizationConfig,
    PhaseSpaceReport,
    complexity,
    conjecture_sweep,
    max_wehrl_search,
)
from .closed_forms import (
    dicke_wehrl_closed,
    noon_husimi_closed,
    qubit_complexity_closed,
    thermal_closed,
)
from .channels import (
    QuantumChannel,
    amplitude_damping,
    apply,
    c_minus,
    c_plus,
    channel_complexity,
    gate_fourier,
    gate_phase,
    gate_x,
    gate_z,
    squeeze_power_scan,
    squeeze_unitary_one_axis,
    squeeze_unitary_two_axis,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DomainError",
    "NumericalError",
    "BlochPoint",
    "SpinJ",
    "angular_momentum_ops",
    "as_spin",
    "coherent_state",
    "displacement",
    "dicke",
    "maximally_mixed",
    "noon",
    "projector",
    "purity",
    "qubit_bloch",
    "random_mixed",
    "random_pure",
    "squeeze_one_axis_state",
    "squeeze_two_axis_state",
    "thermal",
    "SphereGrid",
    "build_grid",
    "default_grid",
    "fisher_information",
    "husimi",
    "husimi_gradient",
    "wehrl_entropy",
    "OptimizationConfig",
    "PhaseSpaceReport",
    "complexity",
    "conjecture_sweep",
    "max_wehrl_search",
    "dicke_wehrl_closed",
    "noon_husimi_closed",
    "qubit_complexity_closed",
    "thermal_closed",
    "QuantumChannel",
    "amplitude_damping",
    "apply",
    "c_minus",
    "c_plus",
    "channel_complexity",
    "gate_fourier",
    "gate_phase",
    "gate_x",
    "gate_z",
    "squeeze_power_scan",
    "squeeze_unitary_one_axis",
    "squeeze_unitary_two_axis",
]
