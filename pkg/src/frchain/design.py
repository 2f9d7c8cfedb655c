"""Construction of chains with a fractional revival between the two ends.

Three routes are provided:

* ``genest_chain`` -- closed-form even-N couplings with a theta-revival at
  time pi/2 and zero fields;
* ``build_fr_spectrum`` + ``inverse_persymmetric_jacobi`` -- any mirror
  symmetric chain, obtained from a spectrum lying on the two lattices that
  force a revival (used for odd N);
* ``asymmetrize_odd`` -- odd chains whose two central couplings are
  unbalanced by an angle eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from frchain import tolerances
from frchain.chain import (
    ChainError,
    ChainSpec,
    EigenSolverError,
    chain_eigensystem,
    is_mirror_symmetric,
)

HALF_PI = math.pi / 2
WHICH_MAX = ("left_central", "right_central", "other")


@dataclass(frozen=True)
class FrDesign:
    chain: ChainSpec
    theta: float
    tau0: float = HALF_PI
    phi: float = -HALF_PI
    k: tuple[int, ...] = ()
    kprime: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise ValueError(f"theta must lie in (0, pi), got {self.theta!r}")
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0!r}")

    def metadata(self) -> dict:
        return {"theta": self.theta, "tau0": self.tau0, "k": list(self.k), "kprime": list(self.kprime)}


def default_lattice(n_sites: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """k_n = k'_n = n - 1, the densest interleaved lattice."""
    n_sym = (n_sites + 1) // 2
    n_anti = n_sites // 2
    return tuple(range(n_sym)), tuple(range(n_anti))


@dataclass(frozen=True)
class FrSpectrumSpec:
    """Lattice integers fixing a revival spectrum.

    Symmetric eigenvalues sit at lambda_1 - (2 pi / tau0) k_n, antisymmetric
    ones at lambda_1 - (2 pi / tau0) k'_n - 2 theta / tau0.
    """

    n_sites: int
    theta: float
    tau0: float = HALF_PI
    sym_integers: tuple[int, ...] | None = None
    antisym_integers: tuple[int, ...] | None = None

    def __post_init__(self):
        n = self.n_sites
        if n < 2:
            raise ValueError(f"need at least 2 sites, got {n}")
        if not 0 < self.theta < math.pi:
            raise ValueError(f"theta must lie in (0, pi), got {self.theta!r}")
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0!r}")
        k_default, kp_default = default_lattice(n)
        k = tuple(int(x) for x in (self.sym_integers if self.sym_integers is not None else k_default))
        kp = tuple(
            int(x) for x in (self.antisym_integers if self.antisym_integers is not None else kp_default)
        )
        if len(k) != (n + 1) // 2 or len(kp) != n // 2:
            raise ValueError(
                f"N={n} needs {(n + 1) // 2} symmetric and {n // 2} antisymmetric integers, "
                f"got {len(k)} and {len(kp)}"
            )
        if k[0] != 0:
            raise ValueError("the first symmetric integer must be 0")
        for name, seq in (("symmetric", k), ("antisymmetric", kp)):
            if any(x < 0 for x in seq) or any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} integers must be non-negative and strictly increasing: {seq}")
        object.__setattr__(self, "sym_integers", k)
        object.__setattr__(self, "antisym_integers", kp)


def build_fr_spectrum(spec: FrSpectrumSpec) -> np.ndarray:
    """Interleave the two lattices into a descending spectrum with lambda_1 = 0."""
    step = 2 * math.pi / spec.tau0
    offset = 2 * spec.theta / spec.tau0
    lam = np.empty(spec.n_sites)
    lam[0::2] = [-step * k for k in spec.sym_integers]
    lam[1::2] = [-step * k - offset for k in spec.antisym_integers]
    for i in range(spec.n_sites - 1):
        if not lam[i] > lam[i + 1]:
            raise ValueError(
                f"lattices do not interleave: lambda_{i + 1}={lam[i]!r} is not above "
                f"lambda_{i + 2}={lam[i + 1]!r}"
            )
    return lam


def genest_chain(n_sites: int, theta: float) -> FrDesign:
    """Even-N chain with zero fields and a theta-revival at time pi/2."""
    N = n_sites
    if N < 2 or N % 2:
        raise ValueError(f"the closed-form family needs an even N >= 2, got N={N}")
    if not 0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta!r}")
    couplings = []
    for n in range(1, N):
        num = n * (N - n) * ((N - 2 * n) ** 2 - 4 * theta**2 / math.pi**2)
        den = (N - 1 - 2 * n) * (N + 1 - 2 * n)
        radicand = num / den
        if not radicand > 0:
            raise ValueError(f"non-positive radicand {radicand!r} for J_{n} (N={N}, theta={theta!r})")
        couplings.append(math.sqrt(radicand))
    k, kp = default_lattice(N)
    return FrDesign(ChainSpec.from_arrays(couplings), theta, HALF_PI, -HALF_PI, k, kp)


def critical_angle(n_sites: int) -> float:
    """Revival angle at which the three central couplings of ``genest_chain`` tie."""
    N = n_sites
    if N < 2 or N % 2:
        raise ValueError(f"critical angle is defined for even N >= 2, got N={N}")
    return HALF_PI * math.sqrt(1 - 3 / (N**2 - 1))


def _persymmetric_weights(spectrum: np.ndarray) -> np.ndarray:
    # squared first components; parity alternation forces w_k proportional to 1/|p'(lambda_k)|
    diffs = spectrum[:, None] - spectrum[None, :]
    np.fill_diagonal(diffs, 1.0)
    logw = -np.log(np.abs(diffs)).sum(axis=1)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _lanczos(spectrum: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi matrix of the discrete measure sum_k w_k delta(x - lambda_k)."""
    n = len(spectrum)
    basis = np.zeros((n, n))
    basis[:, 0] = np.sqrt(weights)
    diag = np.zeros(n)
    off = np.zeros(n - 1)
    for j in range(n):
        q = basis[:, j]
        v = spectrum * q
        diag[j] = q @ v
        v -= diag[j] * q
        if j > 0:
            v -= off[j - 1] * basis[:, j - 1]
        # two passes of full reorthogonalisation
        for _ in range(2):
            v -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ v)
        if j < n - 1:
            off[j] = np.linalg.norm(v)
            if not off[j] > 0:
                raise EigenSolverError(f"Lanczos breakdown at step {j + 1}")
            basis[:, j + 1] = v / off[j]
    return diag, off


def inverse_persymmetric_jacobi(
    spectrum: Sequence[float], *, tol: float = tolerances.BOUND
) -> ChainSpec:
    """The mirror-symmetric chain with positive couplings and this spectrum."""
    lam = np.asarray(spectrum, dtype=float)
    if lam.ndim != 1 or len(lam) < 2:
        raise ValueError("spectrum must be a 1-d sequence of at least two eigenvalues")
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectrum must be finite")
    if np.any(np.diff(lam) >= 0):
        i = int(np.argmax(np.diff(lam) >= 0))
        raise ValueError(f"spectrum not strictly descending at positions {i + 1}, {i + 2}")
    n = len(lam)
    diag, off = _lanczos(lam, _persymmetric_weights(lam))
    # the leading half is the better conditioned one; mirror it
    half_b = n // 2
    off = np.concatenate([off[:half_b], off[: n - 1 - half_b][::-1]])
    half_a = (n + 1) // 2
    diag = np.concatenate([diag[:half_a], diag[: n - half_a][::-1]])
    if not np.all(off > 0):
        raise ChainError(f"reconstruction produced non-positive couplings: {off}")
    chain = ChainSpec.from_arrays(off, diag)
    got = chain_eigensystem(chain).eigenvalues
    spread = lam[0] - lam[-1]
    err = float(np.abs(got - lam).max())
    if err > tol * spread:
        raise EigenSolverError(f"reconstructed spectrum misses target by {err:.3e} (spread {spread:.3e})")
    return chain


def design_from_spectrum(spec: FrSpectrumSpec) -> FrDesign:
    """Realise a lattice spectrum as a chain.

    The spectrum is shifted to zero mean first, so the fields sum to zero.
    """
    lam = build_fr_spectrum(spec)
    chain = inverse_persymmetric_jacobi(lam - lam.mean())
    return FrDesign(chain, spec.theta, spec.tau0, -HALF_PI, spec.sym_integers, spec.antisym_integers)


def odd_chain(n_sites: int, theta: float, tau0: float = HALF_PI) -> FrDesign:
    """Symmetric odd-N FR chain on the default lattice."""
    if n_sites < 3 or n_sites % 2 == 0:
        raise ValueError(f"expected odd N >= 3, got {n_sites}")
    return design_from_spectrum(FrSpectrumSpec(n_sites, theta, tau0))


def asymmetrize_odd(chain: ChainSpec, eta: float) -> ChainSpec:
    """Replace the central coupling pair J, J by sqrt(2) J (cos eta, sin eta)."""
    N = chain.n_sites
    if N % 2 == 0 or N < 3:
        raise ValueError(f"asymmetric variants exist only for odd N >= 3, got N={N}")
    if not 0 < eta < HALF_PI:
        raise ValueError(f"eta must lie in (0, pi/2), got {eta!r}")
    if not is_mirror_symmetric(chain):
        raise ValueError("source chain must be mirror symmetric")
    left = (N - 1) // 2 - 1  # 0-based index of J_{(N-1)/2}
    central = chain.couplings[left]
    couplings = list(chain.couplings)
    couplings[left] = math.sqrt(2) * central * math.cos(eta)
    couplings[left + 1] = math.sqrt(2) * central * math.sin(eta)
    return ChainSpec(N, tuple(couplings), chain.fields)


def effective_angle_asymmetric(theta_prime: float, eta: float) -> float:
    return math.asin(min(1.0, math.sin(2 * eta) * math.sin(theta_prime)))


def classify_max(chain: ChainSpec, *, tol: float = tolerances.ALGEBRAIC) -> str:
    """Which coupling of an odd chain carries J_max: one of ``WHICH_MAX``."""
    N = chain.n_sites
    left = (N - 1) // 2 - 1
    j = np.asarray(chain.couplings)
    jmax = j.max()
    if j[left] >= jmax - tol and j[left] >= j[left + 1]:
        return "left_central"
    if j[left + 1] >= jmax - tol:
        return "right_central"
    return "other"


def asymmetric_time_penalty(eta: float, which_max: str) -> float:
    """Factor by which the expected transfer time grows relative to eta = pi/4."""
    if not 0 < eta < HALF_PI:
        raise ValueError(f"eta must lie in (0, pi/2), got {eta!r}")
    s2 = math.sin(2 * eta) ** 2
    if which_max == "left_central":
        if eta > math.pi / 4 + tolerances.ALGEBRAIC:
            raise ValueError("the left central coupling cannot be the maximum for eta > pi/4")
        return math.sqrt(2) * math.cos(eta) / s2
    if which_max == "right_central":
        if eta < math.pi / 4 - tolerances.ALGEBRAIC:
            raise ValueError("the right central coupling cannot be the maximum for eta < pi/4")
        return math.sqrt(2) * math.sin(eta) / s2
    if which_max == "other":
        return 1 / s2
    raise ValueError(f"which_max must be one of {WHICH_MAX}, got {which_max!r}")
