import math

import numpy as np
import pytest

from frchain.design import critical_angle, genest_chain, odd_chain
from frchain.oracle import (
    cnot,
    embed,
    full_hamiltonian,
    full_space_oracle,
    measure_probability,
    product_state,
    project,
    zero_controlled_cnot,
)
from frchain.chain import ChainSpec, build_hamiltonian
from frchain.protocol import LogicalQubit, encode, run_until_success

PI = math.pi
PSI = LogicalQubit(0.6, 0.8j)


def test_full_hamiltonian_single_excitation_block():
    chain = ChainSpec(4, (1.0, 0.5, 2.0), (0.3, -0.1, 0.2, 0.4))
    h = full_hamiltonian(chain).toarray()
    assert np.allclose(h, h.conj().T)
    idx = [1 << (4 - n) for n in range(1, 5)]
    block = h[np.ix_(idx, idx)]
    shift = -0.5 * sum(chain.fields)
    np.testing.assert_allclose(block, build_hamiltonian(chain).dense() + shift * np.eye(4), atol=1e-15)


def test_full_hamiltonian_conserves_excitations():
    h = full_hamiltonian(ChainSpec(5, (1.0, 2.0, 3.0, 4.0))).tocoo()
    for r, c in zip(h.row, h.col):
        assert bin(r).count("1") == bin(c).count("1")


def test_zero_controlled_cnot_encodes():
    for psi in (LogicalQubit(1, 0), LogicalQubit(0, 1), PSI):
        full = zero_controlled_cnot(product_state(psi, 5), 5, control=1, target=2)
        np.testing.assert_allclose(full, embed(encode(psi, 5)), atol=1e-16)


def test_decode_cnot_moves_qubit_to_last_site():
    # alpha|N-1> + beta|N>  ->  |1>_{N-1} (alpha|0> + beta|1>)_N
    n = 5
    red = np.zeros(n, dtype=complex)
    red[n - 2], red[n - 1] = PSI.alpha, PSI.beta
    out = cnot(embed(red), n, control=n, target=n - 1)
    assert measure_probability(out, n, n - 1) == pytest.approx(1)
    assert out[0b00010] == PSI.alpha and out[0b00011] == PSI.beta


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("theta", ["pi/3", "critical"])
def test_oracle_matches_reduced(n, theta):
    th = PI / 3 if theta == "pi/3" else critical_angle(n)
    d = genest_chain(n, th)
    rep = full_space_oracle(d.chain, d.tau0, PSI, 5, seed=4)
    assert rep.max_deviation < 1e-10
    assert len(rep.outcomes) == 5
    assert all(f == pytest.approx(1, abs=1e-9) for f in rep.arrival_fidelities())


@pytest.mark.parametrize("n", range(4, 13))
def test_oracle_pst_arrives_first_round(n):
    d = genest_chain(n, PI / 2) if n % 2 == 0 else odd_chain(n, PI / 2)
    rep = full_space_oracle(d.chain, d.tau0, PSI, 1, seed=0)
    assert rep.arrivals == [(0, 1)]
    assert rep.arrival_fidelities()[0] == pytest.approx(1, abs=1e-9)
    assert rep.max_deviation < 1e-9


def test_oracle_failure_branch_is_reset():
    n = 6
    d = genest_chain(n, PI / 4)
    u = __import__("scipy.linalg").linalg.expm(-1j * d.tau0 * full_hamiltonian(d.chain).toarray())
    full = zero_controlled_cnot(product_state(PSI, n), n, 1, 2)
    after = cnot(u @ full, n, control=n, target=n - 1)
    fail = project(after, n, n - 1, 0)
    ov = np.vdot(full, fail)
    assert abs(ov) == pytest.approx(1, abs=1e-9)
    support = np.flatnonzero(np.abs(fail) > 1e-9)
    assert set(support) == {1 << (n - 1), 1 << (n - 2)}


def test_oracle_first_trial_matches_run_until_success():
    d = genest_chain(6, 0.5)
    rep = full_space_oracle(d.chain, d.tau0, PSI, 30, seed=5)
    rec = run_until_success(PSI, d.chain, d.tau0, 5, trial=0)
    assert rep.arrivals[0] == (0, rec.rounds)


def test_oracle_with_fields_and_odd_chain():
    d = odd_chain(7, 1.3)
    rep = full_space_oracle(d.chain, d.tau0, PSI, 6, seed=1)
    assert rep.max_deviation < 1e-10
    chain = ChainSpec(4, d.chain.couplings[:3], (0.5, -0.2, -0.2, 0.5))
    # not an FR chain: only the deviation matters here
    rep = full_space_oracle(chain, 0.7, PSI, 1, seed=1)
    assert rep.max_deviation < 1e-10


def test_oracle_limits():
    with pytest.raises(ValueError):
        full_space_oracle(genest_chain(14, 1.0).chain, PI / 2, PSI, 1, 0)
    with pytest.raises(ValueError):
        full_space_oracle(genest_chain(2, 1.0).chain, PI / 2, PSI, 1, 0)
