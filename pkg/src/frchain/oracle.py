"""Brute-force check of the protocol in the full 2^N qubit Hilbert space.

The oracle never uses the single-excitation reduction: it builds the full
XY Hamiltonian, applies the literal gate sequence (zero-controlled CNOT on
qubits 1, 2; evolution; CNOT on qubits N-1, N controlled by qubit N; Z
measurement of qubit N-1) and compares every intermediate state with the
reduced simulation driven by the same random draws.

Qubit 1 is the most significant bit of the basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from frchain.chain import ChainSpec, chain_propagator
from frchain.protocol import LogicalQubit, arrival_branches, encode, trial_rng

MAX_QUBITS = 12
_DENSE_LIMIT = 10
# branches this unlikely are round-off; renormalising them only amplifies noise
BRANCH_FLOOR = 1e-10


def _bit(n_qubits: int, qubit: int) -> int:
    return 1 << (n_qubits - qubit)


def full_hamiltonian(chain: ChainSpec) -> scipy.sparse.csr_matrix:
    """1/2 sum J_n (X_n X_{n+1} + Y_n Y_{n+1}) - 1/2 sum B_n Z_n on 2^N states."""
    N = chain.n_sites
    dim = 1 << N
    idx = np.arange(dim)
    diag = np.zeros(dim)
    for q, b in enumerate(chain.fields, start=1):
        z = np.where(idx & _bit(N, q), -1.0, 1.0)
        diag -= 0.5 * b * z
    rows, cols, vals = [idx], [idx], [diag]
    for q, j in enumerate(chain.couplings, start=1):
        m1, m2 = _bit(N, q), _bit(N, q + 1)
        # (XX + YY)/2 swaps |01> <-> |10> on the pair
        flip = ((idx & m1) > 0) != ((idx & m2) > 0)
        src = idx[flip]
        rows.append(src ^ (m1 | m2))
        cols.append(src)
        vals.append(np.full(len(src), j))
    h = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return h.tocsr()


def zero_controlled_cnot(state: np.ndarray, n_qubits: int, control: int, target: int) -> np.ndarray:
    """Flip ``target`` on basis states where ``control`` is |0>."""
    idx = np.arange(len(state))
    mask = (idx & _bit(n_qubits, control)) == 0
    perm = np.where(mask, idx ^ _bit(n_qubits, target), idx)
    out = np.empty_like(state)
    out[perm] = state
    return out


def cnot(state: np.ndarray, n_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(len(state))
    mask = (idx & _bit(n_qubits, control)) != 0
    perm = np.where(mask, idx ^ _bit(n_qubits, target), idx)
    out = np.empty_like(state)
    out[perm] = state
    return out


def product_state(psi: LogicalQubit, n_qubits: int) -> np.ndarray:
    """|psi> on qubit 1, |0> elsewhere."""
    state = np.zeros(1 << n_qubits, dtype=complex)
    state[0] = psi.alpha
    state[_bit(n_qubits, 1)] = psi.beta
    return state


def embed(reduced: np.ndarray) -> np.ndarray:
    """Single-excitation amplitudes a_n -> full vector on |0..1_n..0>."""
    N = len(reduced)
    full = np.zeros(1 << N, dtype=complex)
    for n in range(1, N + 1):
        full[_bit(N, n)] = reduced[n - 1]
    return full


def arrived_state(qubit: np.ndarray, n_qubits: int) -> np.ndarray:
    """|0...0>|1>_{N-1} (a|0> + b|1>)_N, the expected post-decode success state."""
    full = np.zeros(1 << n_qubits, dtype=complex)
    base = _bit(n_qubits, n_qubits - 1)
    full[base] = qubit[0]
    full[base | _bit(n_qubits, n_qubits)] = qubit[1]
    return full


def measure_probability(state: np.ndarray, n_qubits: int, qubit: int) -> float:
    ones = (np.arange(len(state)) & _bit(n_qubits, qubit)) != 0
    return float(np.vdot(state[ones], state[ones]).real)


def project(state: np.ndarray, n_qubits: int, qubit: int, outcome: int) -> np.ndarray:
    ones = (np.arange(len(state)) & _bit(n_qubits, qubit)) != 0
    keep = ones if outcome else ~ones
    out = np.where(keep, state, 0)
    return out / np.linalg.norm(out)


def qubit_marginal(state: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    """Pure state of ``qubit`` assuming the rest factorises; (amp|0>, amp|1>)."""
    ones = (np.arange(len(state)) & _bit(n_qubits, qubit)) != 0
    a0 = state[~ones]
    a1 = state[ones]
    i = int(np.argmax(np.abs(a0) + np.abs(a1)))
    vec = np.array([a0[i], a1[i]])
    return vec / np.linalg.norm(vec)


@dataclass
class OracleReport:
    n_sites: int
    rounds: int
    psi: LogicalQubit
    max_deviation: float = 0.0
    outcomes: list = field(default_factory=list)
    arrivals: list = field(default_factory=list)
    arrived_qubits: list = field(default_factory=list)

    def arrival_fidelities(self) -> list[float]:
        return [float(abs(np.vdot(self.psi.vector, q)) ** 2) for q in self.arrived_qubits]

    def to_dict(self) -> dict:
        return {
            "n": self.n_sites,
            "rounds": self.rounds,
            "max_deviation": self.max_deviation,
            "outcomes": list(self.outcomes),
            "arrivals": [list(a) for a in self.arrivals],
            "arrival_fidelities": self.arrival_fidelities(),
        }


def full_space_oracle(
    chain: ChainSpec, tau0: float, psi: LogicalQubit, n_rounds: int, seed: int
) -> OracleReport:
    """Run ``n_rounds`` protocol rounds in both representations and compare.

    After an arrival a fresh trial starts (next counter stream) so that the
    requested number of rounds is always simulated.  Both measurement
    branches are compared every round, not only the one that is drawn,
    unless a branch has probability below ``BRANCH_FLOOR``.
    """
    N = chain.n_sites
    if N > MAX_QUBITS:
        raise ValueError(f"full-space oracle is capped at {MAX_QUBITS} qubits, got N={N}")
    if N < 4:
        raise ValueError(f"protocol needs N >= 4, got N={N}")
    if n_rounds < 1:
        raise ValueError("n_rounds must be at least 1")
    h = full_hamiltonian(chain)
    if N <= _DENSE_LIMIT:
        u_full = scipy.linalg.expm(-1j * tau0 * h.toarray())
        step = lambda s: u_full @ s  # noqa: E731
    else:
        step = lambda s: scipy.sparse.linalg.expm_multiply(-1j * tau0 * h, s)  # noqa: E731
    # the reduced model drops the constant -1/2 sum B_n; restore its phase
    vacuum_phase = np.exp(0.5j * math.fsum(chain.fields) * tau0)
    u_red = vacuum_phase * chain_propagator(chain, float(tau0))

    report = OracleReport(N, n_rounds, psi)

    def record(dev):
        report.max_deviation = max(report.max_deviation, float(dev))

    trial = 0
    rng = trial_rng(seed, trial)

    def prepare():
        full = zero_controlled_cnot(product_state(psi, N), N, control=1, target=2)
        red = encode(psi, N)
        record(np.abs(full - embed(red)).max())
        return full, red

    full, red = prepare()
    for r in range(1, n_rounds + 1):
        full = step(full)
        red = u_red @ red
        record(np.abs(full - embed(red)).max())

        full = cnot(full, N, control=N, target=N - 1)
        p_full = measure_probability(full, N, N - 1)
        br = arrival_branches(red, 2)
        record(abs(p_full - br.success_probability))
        if br.success_probability > BRANCH_FLOOR:
            record(np.abs(project(full, N, N - 1, 1) - arrived_state(br.decoded, N)).max())
        if br.success_probability < 1 - BRANCH_FLOOR:
            record(np.abs(project(full, N, N - 1, 0) - embed(br.failure_state)).max())

        draw = rng.random()
        if draw < br.success_probability:
            report.outcomes.append(1)
            report.arrivals.append((trial, r))
            report.arrived_qubits.append(qubit_marginal(project(full, N, N - 1, 1), N, N))
            trial += 1
            rng = trial_rng(seed, trial)
            full, red = prepare()
        else:
            report.outcomes.append(0)
            full = project(full, N, N - 1, 0)
            red = br.failure_state
    return report
