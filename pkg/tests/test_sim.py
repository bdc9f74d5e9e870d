import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhdc.errors import ImpossibleOutcomeError, InvalidArgumentError, ResourceLimitError
from qhdc.sim import statevector as sv
from qhdc.sim.circuit import CNOT, QFT, Block, Controlled, Diagonal, H, PhaseShift, Ry, Rz, UnitaryMatrix, X

S2 = 1 / math.sqrt(2)


def random_state(n, g):
    a = g.normal(size=1 << n) + 1j * g.normal(size=1 << n)
    return sv.Statevector(a / np.linalg.norm(a), n)


def test_zero_state():
    assert np.allclose(sv.zero_state(1).amplitudes, [1, 0])
    assert np.allclose(sv.zero_state(2).amplitudes, [1, 0, 0, 0])


def test_register_cap(monkeypatch):
    monkeypatch.delenv("QHDC_MAX_QUBITS", raising=False)
    with pytest.raises(ResourceLimitError):
        sv.zero_state(17)
    monkeypatch.setenv("QHDC_MAX_QUBITS", "3")
    with pytest.raises(ResourceLimitError):
        sv.zero_state(4)


def test_basic_gates(backend):
    assert np.allclose(sv.apply(sv.zero_state(1), H(0)).amplitudes, [S2, S2])
    uniform = sv.run([H(0), H(1)], n_qubits=2)
    out = sv.apply(uniform, Diagonal((0, 1), np.array([1, -1, 1, -1])))
    assert np.allclose(out.amplitudes, 0.5 * np.array([1, -1, 1, -1]))
    # control on qubit 1 (value 1) while it is |0>
    assert np.allclose(sv.apply(sv.zero_state(2), Controlled(X(0), (1,), (1,))).amplitudes, [1, 0, 0, 0])


def test_qubit_zero_is_least_significant(backend):
    assert np.argmax(np.abs(sv.apply(sv.zero_state(3), X(1)).amplitudes)) == 2


def test_gate_outside_register():
    with pytest.raises(InvalidArgumentError):
        sv.apply(sv.zero_state(2), H(2))


def test_qft_on_one():
    state = sv.apply(sv.zero_state(2), X(0))
    out = sv.apply_qft(state, [0, 1])
    assert np.allclose(out.amplitudes, 0.5 * np.array([1, 1j, -1, -1j]), atol=1e-12)


def test_qft_matches_dft_and_inverts(backend):
    for n in range(1, 6):
        D = 1 << n
        U = sv.unitary_of([QFT(tuple(range(n)))], n)
        j, k = np.meshgrid(np.arange(D), np.arange(D))
        assert np.allclose(U, np.exp(2j * np.pi * j * k / D) / math.sqrt(D), atol=1e-10)
        both = sv.unitary_of([QFT(tuple(range(n))), QFT(tuple(range(n)), True)], n)
        assert np.allclose(both, np.eye(D), atol=1e-10)


def test_qft_on_subset_matches_kron(backend):
    # QFT on qubits (1, 2) of a 3-qubit register: identity on qubit 0
    U = sv.unitary_of([QFT((1, 2))], 3)
    F = sv.unitary_of([QFT((0, 1))], 2)
    assert np.allclose(U, np.kron(F, np.eye(2)), atol=1e-12)


def test_controlled_block_structure(backend):
    g = np.random.default_rng(0)
    M = np.linalg.qr(g.normal(size=(4, 4)) + 1j * g.normal(size=(4, 4)))[0]
    U = sv.unitary_of([Controlled(UnitaryMatrix((0, 1), M), (2,), (1,))], 3)
    assert np.allclose(U[:4, :4], np.eye(4))
    assert np.allclose(U[4:, 4:], M)
    assert np.allclose(U[:4, 4:], 0) and np.allclose(U[4:, :4], 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_random_circuits_are_unitary(n, seed):
    g = np.random.default_rng(seed)
    gates = []
    for _ in range(12):
        q = int(g.integers(n))
        kind = int(g.integers(5))
        if kind == 0:
            gates.append(H(q))
        elif kind == 1:
            gates.append(Rz(q, float(g.uniform(-4, 4))))
        elif kind == 2:
            gates.append(Ry(q, float(g.uniform(-4, 4))))
        elif kind == 3 and n > 1:
            gates.append(CNOT(q, (q + 1) % n))
        else:
            gates.append(PhaseShift(q, float(g.uniform(-4, 4))))
    U = sv.unitary_of(gates, n)
    assert np.allclose(U.conj().T @ U, np.eye(1 << n), atol=1e-10)
    state = sv.run(gates, n_qubits=n)
    assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_inner_product():
    g = np.random.default_rng(1)
    psi = random_state(3, g)
    assert sv.inner_product(psi, psi) == pytest.approx(1.0)
    one = sv.apply(sv.zero_state(1), X(0))
    assert sv.inner_product(sv.zero_state(1), one) == 0
    with pytest.raises(InvalidArgumentError):
        sv.inner_product(sv.zero_state(1), sv.zero_state(2))


def test_inner_product_of_phase_states_is_normalized_dot():
    g = np.random.default_rng(2)
    u, v = g.choice([-1, 1], size=(2, 16))
    a = sv.Statevector(u / 4.0, 4)
    b = sv.Statevector(v / 4.0, 4)
    assert sv.inner_product(a, b).real == pytest.approx(np.dot(u, v) / 16, abs=1e-12)


def test_project():
    post, p = sv.project(sv.zero_state(2), [0], [0])
    assert p == 1.0 and np.allclose(post.amplitudes, [1, 0, 0, 0])
    post, p = sv.project(sv.apply(sv.zero_state(1), H(0)), [0], [0])
    assert p == pytest.approx(0.5) and np.allclose(post.amplitudes, [1, 0])
    with pytest.raises(ImpossibleOutcomeError):
        sv.project(sv.zero_state(1), [0], [1])


def test_reduced_system_picks_ancilla_block():
    g = np.random.default_rng(3)
    psi = random_state(3, g)
    sub, p = sv.reduced_system(psi, [0, 1], [2], 0)
    block = psi.amplitudes[:4]
    assert p == pytest.approx(np.vdot(block, block).real)
    assert np.allclose(sub.amplitudes, block / np.linalg.norm(block))


def test_sampling_deterministic_and_calibrated():
    assert sv.sample(sv.zero_state(1), [0], 100, rng=0).counts == {"0": 100}
    plus = sv.apply(sv.zero_state(1), H(0))
    a = sv.sample(plus, [0], 10_000, rng=42)
    b = sv.sample(plus, [0], 10_000, rng=42)
    assert a.counts == b.counts
    assert abs(a.probability("0") - 0.5) <= 3 * 0.005


def test_sampling_noise_zero_matches_noiseless():
    plus = sv.apply(sv.zero_state(2), H(0))
    assert sv.sample(plus, [0, 1], 500, rng=9).counts == sv.sample(plus, [0, 1], 500, rng=9, noise=0.0).counts
    flipped = sv.sample(sv.zero_state(1), [0], 1000, rng=9, noise=1.0)
    assert flipped.counts == {"1": 1000}


def test_sampling_rejects_bad_args():
    with pytest.raises(InvalidArgumentError):
        sv.sample(sv.zero_state(1), [0], 0)
    with pytest.raises(InvalidArgumentError):
        sv.sample(sv.zero_state(1), [1], 10)


def test_block_inverse_undoes_block(backend):
    g = np.random.default_rng(4)
    blk = Block((H(0), Rz(1, 0.3), CNOT(0, 1), Diagonal((0, 1), np.exp(1j * g.uniform(0, 6, 4)))))
    U = sv.unitary_of([blk, blk.inverse()], 2)
    assert np.allclose(U, np.eye(4), atol=1e-12)
