import random
from fractions import Fraction as F

import pytest

from postorder.classical import BIT, Ensemble, a_family, identity_evm, make_evm, trivial_evm
from postorder.errors import ComparableError, DimensionMismatch, ValidationError
from postorder.poset import main1_embedding
from postorder.postproc import (
    MarkovMatrix, Relation, compare, enumerate_ensembles, pg, quotient, separating_ensemble,
    verify_verdict,
)
from postorder.sampling import random_ensemble, random_evm

HALF = F(1, 2)
DISC = Ensemble(BIT, ((HALF, 0), (0, HALF)))


def test_compare_reflexive():
    m = a_family(F(1, 3), F(4, 5))
    v = compare(m, m)
    assert v.relation is Relation.EQUIVALENT
    assert verify_verdict(v, m, m)


def test_trivial_below_sharp():
    v = compare(a_family(HALF, HALF), a_family(1, 0))
    assert v.relation is Relation.LESS
    assert v.markov_fwd.entries == ((HALF, HALF), (HALF, HALF))
    assert v.ensemble_bwd is not None and v.gaps["bwd"] > 0


def test_parabola_pair_incomparable():
    m, n = a_family(F(1, 3), F(1, 9)), a_family(F(2, 3), F(4, 9))
    v = compare(m, n)
    assert v.relation is Relation.INCOMPARABLE
    assert pg(v.ensemble_fwd, m) > pg(v.ensemble_fwd, n)
    assert pg(v.ensemble_bwd, n) > pg(v.ensemble_bwd, m)
    assert verify_verdict(v, m, n)


def test_coarse_graining():
    v = compare(trivial_evm(2), make_evm(2, [[HALF, 0], [HALF, 1]]))
    assert v.relation is Relation.LESS
    assert v.markov_fwd.entries == ((1, 1),)


def test_compare_space_mismatch():
    with pytest.raises(DimensionMismatch):
        compare(trivial_evm(2), trivial_evm(3))


def test_separating_ensemble_examples():
    m, n = a_family(F(2, 3), F(4, 9)), a_family(F(1, 3), F(1, 9))
    e = separating_ensemble(m, n)
    assert pg(e, m) > pg(e, n)
    e2 = separating_ensemble(identity_evm(2), trivial_evm(2))
    assert pg(e2, identity_evm(2)) > pg(e2, trivial_evm(2))
    assert pg(DISC, identity_evm(2)) - pg(DISC, trivial_evm(2)) == HALF
    with pytest.raises(ComparableError):
        separating_ensemble(trivial_evm(2), a_family(F(1, 4), F(3, 4)))


def test_pg_examples():
    assert pg(DISC, identity_evm(2)) == 1
    assert pg(DISC, trivial_evm(2)) == HALF
    assert pg(DISC, a_family(HALF, F(1, 4))) == F(5, 8)


def test_pg_floor_and_ceiling():
    rng = random.Random(3)
    for _ in range(200):
        d = rng.randint(1, 3)
        e = random_ensemble(rng, d, rng.randint(1, 3))
        m = random_evm(rng, d, rng.randint(1, 4))
        floor = max(sum(r) for r in e.members)
        assert pg(e, trivial_evm(d)) == floor
        assert floor <= pg(e, m) <= 1


def test_markov_matrix_validation():
    with pytest.raises(ValidationError):
        MarkovMatrix(((HALF, 1), (HALF, 1)))
    with pytest.raises(ValidationError):
        MarkovMatrix(((F(3, 2),), (F(-1, 2),)))


def test_quotient_examples():
    assert quotient([trivial_evm(2), a_family(HALF, HALF), a_family(1, 0)]) == [[0, 1], [2]]
    assert quotient([identity_evm(3)]) == [[0]]
    s, t = F(1, 4), F(1, 2)
    assert quotient([a_family(s, s * s), a_family(t, t * t)]) == [[0], [1]]


def test_quotient_identifies_relabelings():
    m = make_evm(2, [[F(1, 3), F(1, 5)], [F(2, 3), F(4, 5)]])
    swapped = make_evm(2, [[F(2, 3), F(4, 5)], [F(1, 3), F(1, 5)]])
    split = make_evm(2, [[F(1, 6), F(1, 10)], [F(1, 6), F(1, 10)], [F(2, 3), F(4, 5)]])
    assert quotient([m, swapped, split, trivial_evm(2)]) == [[0, 1, 2], [3]]


def test_enumerate_small_cases():
    ens = enumerate_ensembles(2, 1, 1)
    assert [e.members for e in ens] == [((0, 1),), ((1, 0),)]
    assert len(enumerate_ensembles(BIT, 2, 2)) == 13
    with pytest.raises(ValidationError):
        enumerate_ensembles(2, 0, 4)


def test_enumerate_is_sorted_and_unique():
    ens = enumerate_ensembles(3, 2, 3)
    keys = [tuple(x * 3 for m in e.members for x in m) for e in ens]
    assert keys == sorted(keys)
    assert len(set(e.members for e in ens)) == len(ens)


def test_enumerator_separates_main1_pairs():
    evms, _ = main1_embedding(3)
    targets = [(i, j) for i in range(6) for j in range(6)
               if i != j and not compare(evms[i], evms[j]).relation.leq]
    assert len(targets) == 24
    remaining = set(targets)
    for den in (2, 4, 8, 16, 32, 64):
        for e in enumerate_ensembles(BIT, 2, den):
            remaining = {(i, j) for (i, j) in remaining if not pg(e, evms[i]) > pg(e, evms[j])}
            if not remaining:
                break
        if not remaining:
            break
    assert not remaining


@pytest.mark.parametrize("seed", range(40))
def test_transitivity(seed):
    rng = random.Random(seed)
    d = rng.choice([2, 3])
    c = random_evm(rng, d, rng.randint(2, 4))
    # build b from c and a from b by random Markov matrices so the chain is guaranteed
    b = _random_post(rng, c)
    a = _random_post(rng, b)
    assert compare(a, b).relation.leq
    assert compare(b, c).relation.leq
    assert compare(a, c).relation.leq


def _random_post(rng, m):
    k = len(m)
    out = rng.randint(1, 3)
    cols = []
    for _ in range(k):
        den = rng.randint(1, 5)
        cuts = sorted(rng.randint(0, den) for _ in range(out - 1))
        b = [0] + cuts + [den]
        cols.append([F(b[i + 1] - b[i], den) for i in range(out)])
    p = MarkovMatrix(tuple(tuple(cols[kk][j] for kk in range(k)) for j in range(out)))
    return make_evm(m.space, [list(v) for v in p.apply(m.vectors)])


@pytest.mark.parametrize("seed", range(30))
def test_random_pairs_verify(seed):
    rng = random.Random(1000 + seed)
    d = rng.choice([2, 3])
    m = random_evm(rng, d, rng.randint(1, 4))
    n = random_evm(rng, d, rng.randint(1, 4))
    v = compare(m, n)
    assert verify_verdict(v, m, n)
    assert compare(n, m).relation is v.relation.flipped()
