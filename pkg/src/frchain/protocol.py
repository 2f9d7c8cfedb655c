"""Heralded state transfer over a fractional-revival chain.

A logical qubit a|0> + b|1> is stored as a|2> + b|1> in the single
excitation subspace.  Each round the chain evolves for the revival time,
and a projective test asks whether the excitation sits on the last two
sites.  On arrival the qubit is read out there; otherwise the excitation is
back on the first two sites and the round is repeated.

Randomness is counter based: the draws of trial ``i`` come from the stream
``numpy.random.default_rng([seed, i])``, consumed one per round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from frchain import tolerances
from frchain.chain import ChainSpec, chain_propagator
from frchain.design import critical_angle, genest_chain
from frchain.revival import pst_speed_limit

DEFAULT_MAX_ROUNDS = 10**6


@dataclass(frozen=True)
class LogicalQubit:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > tolerances.ALGEBRAIC:
            raise ValueError(f"qubit amplitudes have squared norm {norm!r}, expected 1")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "LogicalQubit":
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0:
            raise ValueError("zero vector cannot be normalised")
        return cls(alpha / norm, beta / norm)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])


def fidelity(expected: Sequence[complex], actual: Sequence[complex] | None) -> float:
    """|<expected|actual>|^2 for normalised vectors (0 when ``actual`` is None)."""
    if actual is None:
        return 0.0
    overlap = abs(np.vdot(np.asarray(expected), np.asarray(actual))) ** 2
    return float(min(1.0, overlap))


def encode_qudit(amplitudes: Sequence[complex], n_sites: int) -> np.ndarray:
    """Component j (1-based) goes to site d + 1 - j."""
    amps = np.asarray(amplitudes, dtype=complex)
    d = len(amps)
    if not 2 <= d <= n_sites // 2:
        raise ValueError(f"need 2 <= d <= N/2, got d={d} for N={n_sites}")
    if abs(np.vdot(amps, amps).real - 1) > tolerances.ALGEBRAIC:
        raise ValueError("qudit amplitudes must be normalised")
    state = np.zeros(n_sites, dtype=complex)
    state[:d] = amps[::-1]
    return state


def encode(psi: LogicalQubit, n_sites: int) -> np.ndarray:
    """a|0> + b|1>  ->  a|2> + b|1>."""
    if n_sites < 4:
        raise ValueError(f"encoding needs N >= 4 so that the end pairs are disjoint, got N={n_sites}")
    return encode_qudit([psi.alpha, psi.beta], n_sites)


@dataclass(frozen=True)
class Branches:
    """Both outcomes of the arrival test applied to an evolved state."""

    success_probability: float
    success_state: np.ndarray | None
    decoded: np.ndarray | None
    failure_state: np.ndarray | None


def arrival_branches(state: np.ndarray, d: int = 2) -> Branches:
    N = len(state)
    if not 2 <= d <= N // 2:
        raise ValueError(f"need 2 <= d <= N/2, got d={d} for N={N}")
    tail = state[N - d :]
    p = float(min(1.0, np.vdot(tail, tail).real))
    success = failure = decoded = None
    if p > 0:
        success = np.zeros(N, dtype=complex)
        success[N - d :] = tail / math.sqrt(p)
        # site N - d + j carries component j
        decoded = success[N - d :].copy()
    if p < 1:
        failure = state.copy()
        failure[N - d :] = 0
        failure /= math.sqrt(1 - p)
    return Branches(p, success, decoded, failure)


@dataclass(frozen=True)
class RoundOutcome:
    success: bool
    probability: float
    post_state: np.ndarray
    decoded: np.ndarray | None = None

    def decoded_qubit(self) -> LogicalQubit | None:
        if self.decoded is None or len(self.decoded) != 2:
            return None
        return LogicalQubit.normalized(*self.decoded)


def _check_support(state: np.ndarray, d: int, tol: float) -> None:
    leak = float(np.vdot(state[d:], state[d:]).real)
    if leak > tol:
        raise ValueError(
            f"state has weight {leak:.3e} outside sites 1..{d}; the protocol expects "
            "a fresh or reset encoding"
        )


def protocol_round(
    state: np.ndarray,
    chain: ChainSpec,
    tau0: float,
    random_draw: float,
    *,
    d: int = 2,
    support_tol: float = tolerances.SUPPORT,
) -> RoundOutcome:
    """Evolve for ``tau0`` and run the arrival test with the given uniform draw."""
    state = np.asarray(state, dtype=complex)
    _check_support(state, d, support_tol)
    evolved = chain_propagator(chain, float(tau0)) @ state
    br = arrival_branches(evolved, d)
    if random_draw < br.success_probability:
        return RoundOutcome(True, br.success_probability, br.success_state, br.decoded)
    return RoundOutcome(False, br.success_probability, br.failure_state)


def detect_qudit_arrival(state: np.ndarray, d: int, random_draw: float) -> RoundOutcome:
    """Arrival test on an already evolved state, looking at the last ``d`` sites."""
    br = arrival_branches(np.asarray(state, dtype=complex), d)
    if random_draw < br.success_probability:
        return RoundOutcome(True, br.success_probability, br.success_state, br.decoded)
    return RoundOutcome(False, br.success_probability, br.failure_state)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


@dataclass(frozen=True)
class TrialRecord:
    rounds: int
    total_time: float
    weighted_time: float
    fidelity: float
    truncated: bool = False


def run_until_success(
    psi: LogicalQubit | Sequence[complex],
    chain: ChainSpec,
    tau0: float,
    seed: int,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    *,
    trial: int = 0,
) -> TrialRecord:
    """Repeat rounds until arrival; a truncated trial reports fidelity 0."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    amps = psi.vector if isinstance(psi, LogicalQubit) else np.asarray(psi, dtype=complex)
    d = len(amps)
    state = encode_qudit(amps, chain.n_sites)
    rng = trial_rng(seed, trial)
    jmax = chain.j_max
    for rounds in range(1, max_rounds + 1):
        outcome = protocol_round(state, chain, tau0, rng.random(), d=d)
        if outcome.success:
            t = rounds * tau0
            return TrialRecord(rounds, t, jmax * t, fidelity(amps, outcome.decoded))
        state = outcome.post_state
    t = max_rounds * tau0
    return TrialRecord(max_rounds, t, jmax * t, 0.0, truncated=True)


@dataclass(frozen=True)
class ProtocolStats:
    n_trials: int
    mean_rounds: float
    mean_weighted_time: float
    std_error: float
    min_fidelity: float
    empirical_tail: dict = field(default_factory=dict)
    n_truncated: int = 0

    def to_dict(self) -> dict:
        return {
            "trials": self.n_trials,
            "mean_rounds": self.mean_rounds,
            "mean_weighted_time": self.mean_weighted_time,
            "std_error": self.std_error,
            "min_fidelity": self.min_fidelity,
            "tail": [[k, v] for k, v in sorted(self.empirical_tail.items())],
        }


def run_trials(
    psi, chain: ChainSpec, tau0: float, n_trials: int, seed: int, max_rounds: int = DEFAULT_MAX_ROUNDS
) -> list[TrialRecord]:
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    return [run_until_success(psi, chain, tau0, seed, max_rounds, trial=i) for i in range(n_trials)]


def summarize(records: Sequence[TrialRecord], tail_max_k: int = 10) -> ProtocolStats:
    n = len(records)
    rounds = np.array([r.rounds for r in records], dtype=float)
    mean = math.fsum(rounds) / n
    var = math.fsum((rounds - mean) ** 2) / (n - 1) if n > 1 else 0.0
    tail = {k: int(np.count_nonzero(rounds > k)) / n for k in range(tail_max_k + 1)}
    return ProtocolStats(
        n_trials=n,
        mean_rounds=mean,
        mean_weighted_time=math.fsum(r.weighted_time for r in records) / n,
        std_error=math.sqrt(var / n),
        min_fidelity=min(r.fidelity for r in records),
        empirical_tail=tail,
        n_truncated=sum(r.truncated for r in records),
    )


def monte_carlo(
    psi,
    chain: ChainSpec,
    tau0: float,
    n_trials: int,
    seed: int,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    tail_max_k: int = 10,
) -> ProtocolStats:
    return summarize(run_trials(psi, chain, tau0, n_trials, seed, max_rounds), tail_max_k)


def expected_weighted_time(chain: ChainSpec, theta: float, tau0: float) -> float:
    """E[J_max T] = J_max tau0 / sin^2(theta) for geometric arrival."""
    s2 = math.sin(theta) ** 2
    if not 0 < theta < math.pi or s2 == 0:
        raise ValueError(f"theta must lie in (0, pi) for a finite expectation, got {theta!r}")
    return chain.j_max * tau0 / s2


def tail_probability(theta: float, k: int) -> float:
    """P(rounds > k) = cos^(2k) theta."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return math.cos(theta) ** (2 * k)


def _check_speedup_n(n_sites: int) -> None:
    if n_sites < 4 or n_sites % 2:
        raise ValueError(f"speedup ratio is defined for even N >= 4, got N={n_sites}")


def speedup_ratio(n_sites: int) -> float:
    """Expected weighted arrival time at the critical angle over the PST limit."""
    _check_speedup_n(n_sites)
    theta = critical_angle(n_sites)
    design = genest_chain(n_sites, theta)
    return expected_weighted_time(design.chain, theta, design.tau0) / pst_speed_limit(n_sites)


def speedup_ratio_epsilon(n_sites: int) -> float:
    """Same ratio through (1 - eps) / cos^2(pi eps / 2), theta_c = (pi/2)(1 - eps)."""
    _check_speedup_n(n_sites)
    eps = 1 - math.sqrt(1 - 3 / (n_sites**2 - 1))
    return (1 - eps) / math.cos(math.pi * eps / 2) ** 2
