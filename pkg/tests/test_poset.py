import random
from fractions import Fraction as F

import pytest

from postorder.errors import ValidationError
from postorder.poset import (
    ExceedsBound, LinearExtension, antichain, chain, characterizes, check_embedding,
    critical_pairs, hasse_edges, indicator_family, indicator_monotone, induced_poset,
    is_linear_extension, is_monotone, main1_embedding, make_poset, order_dimension,
    order_monotone_dimension, parabola_parameters, pullback_extension, realizer_to_monotones,
    realizes, restrict, standard_example, to_dot, ComparatorInconsistency,
)
from postorder.postproc import Relation, compare
from postorder.classical import a_family, trivial_evm
from postorder.sampling import random_poset

from oracles import all_posets, brute_dimension


def test_poset_counts_up_to_isomorphism():
    assert [sum(1 for _ in all_posets(n)) for n in range(1, 5)] == [1, 2, 5, 16]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dimension_matches_oracle_exhaustive(n):
    for p in all_posets(n):
        res = order_dimension(p)
        assert res.k == brute_dimension(p)
        assert realizes(p, res.realizer.extensions)
        assert order_dimension(p, pairs="all").k == res.k


def test_dimension_matches_oracle_sampled_five():
    rng = random.Random(55)
    for _ in range(60):
        p = random_poset(rng, 5, rng.choice([0.2, 0.4, 0.6]))
        assert order_dimension(p).k == brute_dimension(p)


# --- construction and validation -------------------------------------------

def test_make_poset_examples():
    p = make_poset("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert p.is_total()
    with pytest.raises(ValidationError, match="antisym"):
        make_poset("ab", [("a", "b"), ("b", "a")])
    with pytest.raises(ValidationError) as exc:
        make_poset("abc", [("a", "b"), ("b", "c")])
    assert all(x in str(exc.value) for x in "abc")


def test_standard_example():
    s2 = standard_example(2)
    assert sorted(s2.strict_pairs()) == [("a0", "b1"), ("a1", "b0")]
    s3 = standard_example(3)
    for j in range(3):
        assert sum(s3.leq(f"a{j}", f"b{k}") for k in range(3)) == 2
    assert len(s3.strict_pairs()) == 6
    with pytest.raises(ValidationError):
        standard_example(1)


def test_linear_extensions_and_realizers():
    c = chain(4)
    assert realizes(c, [list(c.labels)])
    s2 = standard_example(2)
    ext = ["a0", "a1", "b0", "b1"]
    assert is_linear_extension(s2, ext)
    assert not realizes(s2, [ext])
    assert not is_linear_extension(s2, ["b1", "a0", "a1", "b0"])


def test_dimension_examples():
    assert order_dimension(chain(4)).k == 1
    assert order_dimension(chain(1)).k == 1
    assert order_dimension(antichain(3)).k == 2
    for n in (2, 3, 4):
        assert order_dimension(standard_example(n)).k == n


def test_dimension_bound():
    with pytest.raises(ExceedsBound):
        order_dimension(standard_example(4), max_k=3)


def test_dimension_guard():
    with pytest.raises(ValidationError):
        order_dimension(antichain(13))


def test_critical_pairs_of_standard_example():
    # each realizer must put b_j below a_j somewhere, and nothing else is forced
    assert critical_pairs(standard_example(3)) == [(3, 0), (4, 1), (5, 2)]
    assert critical_pairs(chain(3)) == []


def test_monotones_examples():
    c = make_poset("ab", [("a", "b")])
    assert indicator_monotone(c, "b") == (0, 1)
    assert indicator_monotone(c, "a") == (1, 1)
    k, fam = order_monotone_dimension(chain(3))
    assert k == 1 and characterizes(chain(3), fam)
    s2 = standard_example(2)
    fam2 = realizer_to_monotones(s2, order_dimension(s2).realizer)
    assert len(fam2.functions) == 2 and characterizes(s2, fam2)
    assert order_monotone_dimension(standard_example(3))[0] == 3
    const = [tuple(F(0) for _ in s2.labels)]
    assert is_monotone(s2, const[0]) and not characterizes(s2, const)


def test_indicator_family_characterizes_random_posets():
    rng = random.Random(8)
    for _ in range(30):
        p = random_poset(rng, rng.randint(1, 8), rng.random())
        assert characterizes(p, indicator_family(p))


def test_restrict_examples():
    s3 = standard_example(3)
    r = restrict(s3, ["a0", "a1"])
    assert not r.strict_pairs() and len(r) == 2
    assert restrict(s3, s3.labels).rel == s3.rel
    c = chain(4)
    assert restrict(c, ["c0", "c3"]).strict_pairs() == [("c0", "c3")]
    with pytest.raises(ValidationError):
        restrict(c, ["zz"])


def test_pullback_examples():
    s2 = standard_example(2)
    ext = order_dimension(s2).realizer.extensions[0].order
    ident = {x: x for x in s2.labels}
    assert pullback_extension(ident, ext) == tuple(ext)
    g = {"a0": "a0", "a1": "a1"}
    out = pullback_extension(g, ext)
    assert set(out) == {"a0", "a1"}
    with pytest.raises(ValidationError):
        pullback_extension({"a0": "b0", "a1": "b0"}, ext)


def test_pullback_realizes_subposet():
    s3 = standard_example(3)
    r = order_dimension(s3).realizer
    sub = ["a0", "a1", "b2", "b0"]
    g = {x: x for x in sub}
    pulled = [pullback_extension(g, e.order) for e in r.extensions]
    assert realizes(restrict(s3, sub), pulled)


def test_induced_poset_examples():
    items = [trivial_evm(2), a_family(F(1, 2), F(1, 2)), a_family(1, 0)]
    p, classes = induced_poset(items, compare)
    assert classes == [[0, 1], [2]]
    assert len(p) == 2 and p.is_total()
    p1, c1 = induced_poset([trivial_evm(2)], compare)
    assert len(p1) == 1 and c1 == [[0]]


def test_induced_poset_rejects_intransitive_comparator():
    table = {(0, 1): Relation.LESS, (1, 2): Relation.LESS, (0, 2): Relation.INCOMPARABLE}
    with pytest.raises(ComparatorInconsistency):
        induced_poset([0, 1, 2], lambda x, y: table[(x, y)])


def test_main1_parameters_and_shapes():
    assert parabola_parameters(3) == [F(1, 27), F(1, 9), F(1, 3)]
    evms, s3 = main1_embedding(3)
    assert [len(m) for m in evms] == [3, 3, 3, 5, 5, 5]
    with pytest.raises(ValidationError):
        main1_embedding(2)


def test_main1_embedding_is_order_embedding():
    evms, s3 = main1_embedding(3)
    f = dict(zip(s3.labels, evms))
    assert check_embedding(f, s3, compare)
    swapped = dict(f, a0=f["a1"], a1=f["a0"])
    assert not check_embedding(swapped, s3, compare)
    assert check_embedding({x: x for x in s3.labels}, s3,
                           lambda x, y: (s3.leq(x, y), s3.leq(y, x)))


def test_restriction_monotonicity_small():
    rng = random.Random(12)
    for _ in range(40):
        p = random_poset(rng, rng.randint(1, 7), rng.random())
        sub = [x for x in p.labels if rng.random() < 0.6] or [p.labels[0]]
        assert order_dimension(restrict(p, sub)).k <= order_dimension(p).k


def test_hasse_and_dot():
    s2 = standard_example(2)
    assert hasse_edges(s2) == [("a0", "b1"), ("a1", "b0")]
    assert hasse_edges(chain(3)) == [("c0", "c1"), ("c1", "c2")]
    dot = to_dot(s2)
    assert dot.startswith("digraph hasse {") and '"a0" -> "b1";' in dot
    assert to_dot(s2) == dot


def test_json_shape():
    s2 = standard_example(2)
    assert s2.to_json() == {"elements": ["a0", "a1", "b0", "b1"], "pairs": [["a0", "b1"], ["a1", "b0"]]}
    r = order_dimension(s2).realizer
    assert all(isinstance(e, list) for e in r.to_json())
    assert isinstance(r.extensions[0], LinearExtension)
