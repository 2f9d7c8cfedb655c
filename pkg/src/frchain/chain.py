"""XY spin chains restricted to the single-excitation subspace.

The chain Hamiltonian

    H = 1/2 sum_n J_n (X_n X_{n+1} + Y_n Y_{n+1}) - 1/2 sum_n B_n Z_n

conserves the number of excitations.  On the span of the states |n>
(excitation on site n, all other qubits in |0>) it acts as the Jacobi
matrix with diagonal B_n and off-diagonal J_n, up to the constant
-1/2 sum B_n which only contributes a global phase and is dropped.

Sites are numbered 1..N in every public function.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from frchain import tolerances


class ChainError(ValueError):
    """Invalid chain parameters."""


class EigenSolverError(RuntimeError):
    """The tridiagonal eigensolver failed or returned an unusable spectrum."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChainSpec:
    """Couplings J_1..J_{N-1} and fields B_1..B_N of an N-site chain."""

    n_sites: int
    couplings: tuple[float, ...]
    fields: tuple[float, ...] = ()

    def __post_init__(self):
        n = self.n_sites
        if int(n) != n or n < 2:
            raise ChainError(f"a chain needs at least 2 sites, got n_sites={n}")
        object.__setattr__(self, "n_sites", int(n))
        couplings = tuple(float(x) for x in self.couplings)
        fields = tuple(float(x) for x in self.fields) if len(self.fields) else (0.0,) * n
        if len(couplings) != n - 1:
            raise ChainError(f"expected {n - 1} couplings, got {len(couplings)}")
        if len(fields) != n:
            raise ChainError(f"expected {n} fields, got {len(fields)}")
        if not all(np.isfinite(couplings)) or not all(np.isfinite(fields)):
            raise ChainError("couplings and fields must be finite")
        bad = [i + 1 for i, j in enumerate(couplings) if not j > 0]
        if bad:
            raise ChainError(f"couplings must be strictly positive; J_n <= 0 at n={bad}")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "fields", fields)

    @classmethod
    def from_arrays(cls, couplings: Sequence[float], fields: Sequence[float] | None = None):
        couplings = list(couplings)
        n = len(couplings) + 1
        return cls(n, tuple(couplings), tuple(fields) if fields is not None else ())

    @property
    def j_max(self) -> float:
        return max(self.couplings)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n_sites, "couplings": list(self.couplings), "fields": list(self.fields)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChainSpec":
        try:
            return cls(data["n"], tuple(data["couplings"]), tuple(data["fields"]))
        except (KeyError, TypeError) as exc:
            raise ChainError(f"malformed chain JSON: {exc}") from exc


def j_max(chain: ChainSpec) -> float:
    return chain.j_max


def dump_chain(chain: ChainSpec, **extra) -> str:
    return json.dumps({**chain.to_dict(), **extra}, indent=2)


def load_chain(text: str) -> ChainSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainError(f"chain file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ChainError("chain JSON must be an object")
    return ChainSpec.from_dict(data)


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )

    def max_abs(self) -> float:
        return float(max(np.abs(self.diagonal).max(), np.abs(self.off_diagonal).max()))


def build_hamiltonian(chain: ChainSpec) -> TridiagonalHamiltonian:
    return TridiagonalHamiltonian(_frozen(chain.fields), _frozen(chain.couplings))


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in strictly descending order, eigenvectors as columns.

    Each eigenvector is sign-normalised so that its first component is
    positive (the first component of a Jacobi eigenvector never vanishes).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hamiltonian: TridiagonalHamiltonian = field(repr=False)

    @property
    def n_sites(self) -> int:
        return len(self.eigenvalues)

    def reconstruction_residual(self) -> float:
        v, lam = self.eigenvectors, self.eigenvalues
        return float(np.abs((v * lam) @ v.T - self.hamiltonian.dense()).max())

    def gram_residual(self) -> float:
        v = self.eigenvectors
        return float(np.abs(v.T @ v - np.eye(self.n_sites)).max())


def eigendecompose(
    h: TridiagonalHamiltonian, *, degeneracy_tol: float = tolerances.DEGENERACY
) -> EigenSystem:
    """Diagonalise ``h`` with the implicit-shift QL/QR tridiagonal solver."""
    try:
        lam, vecs = eigh_tridiagonal(
            np.asarray(h.diagonal, dtype=float),
            np.asarray(h.off_diagonal, dtype=float),
            lapack_driver="stev",
        )
    except LinAlgError as exc:
        raise EigenSolverError(f"tridiagonal eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(vecs))):
        raise EigenSolverError("tridiagonal eigensolver returned non-finite values")
    lam = lam[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    gaps = -np.diff(lam)
    scale = h.max_abs()
    if len(gaps) and gaps.min() <= degeneracy_tol * scale:
        k = int(np.argmin(gaps))
        raise EigenSolverError(
            f"near-degenerate eigenvalues lambda_{k + 1}={lam[k]!r}, "
            f"lambda_{k + 2}={lam[k + 1]!r}; a Jacobi matrix with positive "
            "couplings has a simple spectrum"
        )
    vecs *= np.where(vecs[0] < 0, -1.0, 1.0)
    return EigenSystem(_frozen(lam), _frozen(vecs), h)


@functools.lru_cache(maxsize=256)
def chain_eigensystem(chain: ChainSpec) -> EigenSystem:
    """Cached ``eigendecompose(build_hamiltonian(chain))``."""
    return eigendecompose(build_hamiltonian(chain))


def propagator(eig: EigenSystem, t: float) -> np.ndarray:
    """The N x N matrix exp(-i H t)."""
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.T


@functools.lru_cache(maxsize=256)
def chain_propagator(chain: ChainSpec, t: float) -> np.ndarray:
    u = propagator(chain_eigensystem(chain), t)
    u.setflags(write=False)
    return u


def basis_state(n_sites: int, site: int) -> np.ndarray:
    _check_site(n_sites, site)
    state = np.zeros(n_sites, dtype=complex)
    state[site - 1] = 1.0
    return state


def evolve(eig: EigenSystem, state: np.ndarray, t: float) -> np.ndarray:
    """Apply exp(-i H t) to a single-excitation amplitude vector."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (eig.n_sites,):
        raise ValueError(f"state has shape {state.shape}, expected ({eig.n_sites},)")
    if not np.isfinite(t):
        raise ValueError("evolution time must be finite")
    v = eig.eigenvectors
    return v @ (np.exp(-1j * eig.eigenvalues * t) * (v.T @ state))


def _check_site(n_sites: int, site: int) -> None:
    if not 1 <= site <= n_sites:
        raise IndexError(f"site {site} outside 1..{n_sites}")


def transfer_amplitude(eig: EigenSystem, source: int, target: int, t: float) -> complex:
    """<target| exp(-i H t) |source>."""
    _check_site(eig.n_sites, source)
    _check_site(eig.n_sites, target)
    v = eig.eigenvectors
    return complex(np.sum(v[target - 1] * np.exp(-1j * eig.eigenvalues * t) * v[source - 1]))


def mirror_operator(n_sites: int) -> np.ndarray:
    """Permutation matrix S sending site n to N + 1 - n."""
    return np.eye(n_sites)[::-1].copy()


def is_mirror_symmetric(chain: ChainSpec, *, tol: float = tolerances.ALGEBRAIC) -> bool:
    j = np.asarray(chain.couplings)
    b = np.asarray(chain.fields)
    return bool(np.all(np.abs(j - j[::-1]) <= tol) and np.all(np.abs(b - b[::-1]) <= tol))
