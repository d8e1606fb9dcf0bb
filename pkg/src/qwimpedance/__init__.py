"""1D quantum scattering with transfer matrices, scattering matrices and the
quantum wave impedance, including closed-form N-cell cascades and Tamm levels
of a finite Dirac comb."""

from .dirac_comb import (
    CombSpec,
    TammLevel,
    bound_states_bruteforce,
    comb_cell_impedance_matrix,
    comb_cell_transfer,
    solve_tamm,
    tamm_residual_cot,
    tamm_residual_impedance,
)
from .errors import (
    BoundStatePoleError,
    ImpedanceMismatchError,
    NodeSingularityError,
    NonUnimodularError,
    ProfileError,
    ProfileSemanticError,
    ProfileSyntaxError,
    QWImpedanceError,
    ResonanceSingularityError,
    SingularInputError,
    ZeroTransmissionError,
)
from .impedance import (
    apply_impedance_matrix,
    delta_jump,
    impedance_from_amplitudes,
    impedance_from_reflection,
    profile_input_impedance,
    propagate_uniform,
    reflection_from_impedance,
)
from .matrices import (
    ImpedanceMatrix,
    ScatteringMatrix,
    TransferMatrix,
    compose,
    delta_matrix,
    impedance_matrix_to_transfer,
    interface_matrix,
    profile_transfer,
    propagation_matrix,
    rect_barrier_transfer,
    rt_from_transfer,
    scattering_to_transfer,
    transfer_to_impedance_matrix,
    transfer_to_scattering,
)
from .periodic import (
    AffixSpec,
    BlochParameter,
    CellSpec,
    chebyshev_U,
    eigen_residual_fps,
    input_impedance_N,
    matrix_power_chebyshev,
    rt_N,
)
from .potential import (
    DeltaBarrier,
    Lead,
    PotentialProfile,
    Segment,
    UnitSystem,
    build_profile,
    characteristic_impedance,
    parse_profile,
    serialize_profile,
    wavenumber,
)

__version__ = "0.1.0"
