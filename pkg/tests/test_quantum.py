import random
from fractions import Fraction as F

import numpy as np
import pytest

from postorder.errors import DimensionMismatch, ValidationError
from postorder.exact import G, gmatrix
from postorder.postproc import Relation
from postorder.quantum import (
    QuantumEnsemble, Superoperator, bell_projector_povm, block_povm_from_channel, choi,
    choi_min_eigenvalue, compose, computational_povm, constant_channel, dephasing_channel,
    depolarizing_channel, entangled_basis, helstrom_binary, identity_channel, is_cp, is_unital,
    ket_bra, make_povm, markov_channel, max_abs_difference, phi_from_blocks, qc_channel, qcompare,
    qpg, random_channel, tensor_with_identity, transpose_map, trivial_povm, verify_factorization,
    verify_qverdict,
)
from postorder.sampling import random_povm, random_qensemble

H = F(1, 2)
KET0, KET1 = ket_bra([1, 0]), ket_bra([0, 1])
PLUS = gmatrix([[H, H], [H, H]])
MINUS = gmatrix([[H, -H], [-H, H]])
Z = make_povm(2, [KET0, KET1])
X = make_povm(2, [PLUS, MINUS])


def half(m):
    return tuple(tuple(x * G(H) for x in row) for row in m)


def float_povm(rng, side, outcomes):
    gs = [rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side)) for _ in range(outcomes)]
    ps = [g @ g.conj().T for g in gs]
    w, v = np.linalg.eigh(sum(ps))
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    return [inv_sqrt @ p @ inv_sqrt for p in ps]


# --- POVMs and exact comparison ---------------------------------------------

def test_make_povm_examples():
    assert len(Z) == 2
    assert len(make_povm(2, [gmatrix([[H, 0], [0, H]])] * 2)) == 2
    with pytest.raises(ValidationError, match="identity"):
        make_povm(2, [KET0, KET0])
    with pytest.raises(ValidationError):
        make_povm(2, [gmatrix([[1, 1], [0, 0]]), gmatrix([[0, -1], [0, 1]])])
    with pytest.raises(ValidationError):
        make_povm(2, [gmatrix([[2, 0], [0, 1]]), gmatrix([[-1, 0], [0, 0]])])


def test_qcompare_examples():
    assert qcompare(Z, Z).relation is Relation.EQUIVALENT
    triv = make_povm(2, [gmatrix([[H, 0], [0, H]])] * 2)
    v = qcompare(triv, Z)
    assert v.relation is Relation.LESS
    assert v.markov_fwd.entries == ((H, H), (H, H))
    v = qcompare(Z, X)
    assert v.relation is Relation.INCOMPARABLE
    assert verify_qverdict(v, Z, X)
    assert qpg(v.ensemble_fwd, Z) > qpg(v.ensemble_fwd, X)
    assert qpg(v.ensemble_bwd, X) > qpg(v.ensemble_bwd, Z)


def test_qcompare_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        qcompare(computational_povm(2), computational_povm(3))


def test_qcompare_complex_entries():
    y_plus = gmatrix([[H, G(0, -H)], [G(0, H), H]])
    y_minus = gmatrix([[H, G(0, H)], [G(0, -H), H]])
    Y = make_povm(2, [y_plus, y_minus])
    v = qcompare(Y, X)
    assert v.relation is Relation.INCOMPARABLE
    assert verify_qverdict(v, Y, X)


def test_qpg_examples():
    e = QuantumEnsemble(2, (half(KET0), half(KET1)))
    assert qpg(e, Z) == 1
    assert qpg(e, trivial_povm(2)) == H
    e2 = QuantumEnsemble(2, (half(KET0), half(PLUS)))
    assert qpg(e2, Z) == F(3, 4)


def test_helstrom_examples():
    assert helstrom_binary(QuantumEnsemble(2, (half(KET0), half(KET1)))) == pytest.approx(1.0, abs=1e-12)
    assert helstrom_binary(QuantumEnsemble(2, (half(PLUS), half(PLUS)))) == pytest.approx(0.5, abs=1e-12)
    v = helstrom_binary(QuantumEnsemble(2, (half(KET0), half(PLUS))))
    assert v == pytest.approx((1 + 2 ** -0.5) / 2, abs=1e-12)
    with pytest.raises(ValidationError):
        helstrom_binary([np.eye(2) / 6] * 3)


def test_helstrom_dominates_fixed_povm():
    rng = random.Random(17)
    for _ in range(40):
        d = rng.choice([2, 3])
        e = random_qensemble(rng, d, 2)
        m = random_povm(rng, d, rng.randint(2, 3))
        assert helstrom_binary(e) >= float(qpg(e, m)) - 1e-9


def test_qpg_monotone_under_less():
    rng = random.Random(4)
    pairs = 0
    for _ in range(6):
        n = random_povm(rng, 2, 3)
        v = qcompare(trivial_povm(2, 2), n)
        assert v.relation.leq
        for _ in range(80):
            e = random_qensemble(rng, 2, rng.randint(1, 3))
            assert qpg(e, trivial_povm(2, 2)) <= qpg(e, n)
            pairs += 1
    assert pairs == 480


# --- superoperators ----------------------------------------------------------

def test_qc_channel_examples():
    g = qc_channel(trivial_povm(2))
    a = np.array([[3.0]])
    assert np.allclose(g(a), 3 * np.eye(2))
    gz = qc_channel(Z)
    assert np.allclose(gz(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]))
    rng = random.Random(2)
    for _ in range(5):
        gm = qc_channel(random_povm(rng, 2, 3))
        assert is_unital(gm) and is_cp(gm)


def test_entangled_basis():
    eta = entangled_basis(2)
    assert np.allclose(eta[0], np.array([1, 0, 0, 1]) / np.sqrt(2))
    for d in (2, 3):
        b = np.stack(entangled_basis(d), axis=1)
        assert np.max(np.abs(b.conj().T @ b - np.eye(d * d))) < 1e-12
    assert np.allclose(entangled_basis(1)[0], [1])


def test_choi_examples():
    ident = identity_channel(2)
    phi_plus = np.outer(entangled_basis(2)[0], entangled_basis(2)[0].conj())
    assert np.allclose(choi(ident), 2 * phi_plus)
    assert is_cp(ident) and is_unital(ident)
    assert choi_min_eigenvalue(transpose_map(2)) == pytest.approx(-1.0)
    assert not is_cp(transpose_map(2))


def test_superoperator_json_round_trip():
    s = random_channel(2, 3, np.random.default_rng(0))
    t = Superoperator.from_json(s.to_json())
    assert max_abs_difference(s, t) == 0.0


def test_phi_identity_from_bell_projectors():
    for d in (2, 3):
        phi = phi_from_blocks(bell_projector_povm(d), d)
        assert max_abs_difference(phi, identity_channel(d)) < 1e-10


def test_phi_rejects_incomplete():
    mt = bell_projector_povm(2)
    with pytest.raises(ValidationError):
        phi_from_blocks(mt[:3] + [np.zeros((4, 4))], 2)
    with pytest.raises(DimensionMismatch):
        phi_from_blocks(mt[:3], 2)


@pytest.mark.parametrize("d", [2, 3])
def test_phi_unital_cp_for_random_povms(d):
    rng = np.random.default_rng(d)
    for _ in range(50):
        dJ = int(rng.integers(1, 4))
        phi = phi_from_blocks(float_povm(rng, dJ * d, d * d), d)
        assert is_unital(phi) and is_cp(phi)


def test_pipeline_recovers_channel():
    rng = np.random.default_rng(99)
    deph = dephasing_channel(2)
    for _ in range(10):
        psi = random_channel(2, 2, rng)
        phi = phi_from_blocks(block_povm_from_channel(psi), 2)
        for lam in (identity_channel(2), deph):
            assert max_abs_difference(compose(lam, phi), compose(lam, psi)) < 1e-8


def test_factorization_examples():
    ident = identity_channel(2)
    assert verify_factorization(ident, ident, ident, 1e-9)
    psi = depolarizing_channel(2, 0.5)
    phi = phi_from_blocks(block_povm_from_channel(psi), 2)
    assert verify_factorization(psi, ident, phi, 1e-9)
    const = constant_channel(2, 2)
    for cand in (ident, dephasing_channel(2), psi):
        assert not verify_factorization(dephasing_channel(2), const, cand, 1e-9)
    with pytest.raises(DimensionMismatch):
        verify_factorization(ident, identity_channel(3), ident, 1e-9)


def test_markov_channel_links_qc_channels():
    rng = random.Random(21)
    hits = 0
    for _ in range(30):
        d = rng.choice([2, 3])
        n = random_povm(rng, d, rng.randint(2, 3))
        m = trivial_povm(d, rng.randint(1, 3)) if rng.random() < 0.5 else random_povm(rng, d, 2)
        v = qcompare(m, n)
        if not v.relation.leq:
            continue
        hits += 1
        lam = markov_channel(v.markov_fwd)
        assert verify_factorization(qc_channel(m), qc_channel(n), lam, 1e-9)
    assert hits >= 10


def test_side_information_desk_check():
    rng = np.random.default_rng(7)
    for _ in range(50):
        psi = random_channel(2, 2, rng)
        lam = random_channel(2, 2, rng)
        gamma = compose(lam, psi)
        g2, l2 = tensor_with_identity(gamma, 2), tensor_with_identity(lam, 2)
        states = []
        for _ in range(2):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            states.append(np.outer(v, v.conj()))
        w = rng.random()
        members = [w * states[0] / np.trace(states[0]).real,
                   (1 - w) * states[1] / np.trace(states[1]).real]
        assert helstrom_binary(members, g2) <= helstrom_binary(members, l2) + 1e-8


def test_superoperator_rejects_non_hermiticity_preserving():
    m = np.zeros((4, 4), dtype=complex)
    m[1, 0] = 1.0  # maps |0><0| to the non-Hermitian |1><0|
    with pytest.raises(ValidationError):
        Superoperator(2, 2, m)
