"""Default numerical tolerances.

Every function that compares floating point quantities takes its tolerance
as a keyword argument defaulting to one of these values.
"""

import os

#: dynamical identities (evolution, revival amplitudes)
DYNAMIC = 1e-10
#: algebraic identities (orthonormality, closed-form couplings)
ALGEBRAIC = 1e-12
#: relative eigenvalue separation below which a spectrum counts as degenerate
DEGENERACY = 1e-9
#: FR verdict threshold on the leaked probability / lattice residual
FR_RESIDUAL = 1e-6
#: bound saturation comparisons, scaled by the spectral spread
BOUND = 1e-8
#: support leakage tolerated when checking that a state lives on given sites
SUPPORT = 1e-9

ENV_VAR = "FRCHAIN_TOLERANCE"


def fr_residual_threshold() -> float:
    """FR verdict threshold, overridable through ``FRCHAIN_TOLERANCE``."""
    value = os.environ.get(ENV_VAR)
    if value is None:
        return FR_RESIDUAL
    tol = float(value)
    if not tol > 0:
        raise ValueError(f"{ENV_VAR} must be a positive number, got {value!r}")
    return tol
