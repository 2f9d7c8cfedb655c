"""Fractional-revival spin chains and heralded state transfer."""

from frchain.chain import (
    ChainError,
    ChainSpec,
    EigenSolverError,
    EigenSystem,
    TridiagonalHamiltonian,
    basis_state,
    build_hamiltonian,
    eigendecompose,
    evolve,
    is_mirror_symmetric,
    mirror_operator,
    transfer_amplitude,
)
from frchain.design import (
    FrDesign,
    FrSpectrumSpec,
    asymmetric_time_penalty,
    asymmetrize_odd,
    build_fr_spectrum,
    critical_angle,
    effective_angle_asymmetric,
    genest_chain,
    inverse_persymmetric_jacobi,
    odd_chain,
)
from frchain.protocol import (
    LogicalQubit,
    ProtocolStats,
    TrialRecord,
    encode,
    encode_qudit,
    expected_weighted_time,
    monte_carlo,
    protocol_round,
    run_until_success,
    speedup_ratio,
    tail_probability,
)
from frchain.revival import (
    bounds_report,
    check_spectral_conditions,
    detect_revival,
    fr_speed_limit,
    pst_speed_limit,
    trace_identity_check,
    verify_mirror_revival,
)

__version__ = "0.1.0"
