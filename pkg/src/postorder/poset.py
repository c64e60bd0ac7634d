"""Finite posets, realizers and exact order dimension.

Elements are addressed by label in the public API and by index internally.
``rel[i][j]`` is true iff element ``i`` is below or equal to element ``j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import PostorderError, ValidationError
from .exact import format_rational


class ExceedsBound(PostorderError):
    def __init__(self, max_k: int):
        super().__init__(f"order dimension exceeds the bound {max_k}")
        self.max_k = max_k


class ComparatorInconsistency(PostorderError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    labels: tuple
    rel: tuple

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        rel = tuple(tuple(bool(v) for v in row) for row in self.rel)
        n = len(labels)
        if len(set(labels)) != n:
            raise ValidationError("duplicate element labels")
        if len(rel) != n or any(len(row) != n for row in rel):
            raise ValidationError("relation matrix does not match the element count")
        for i in range(n):
            if not rel[i][i]:
                raise ValidationError(f"reflexivity fails at {labels[i]}")
        for i in range(n):
            for j in range(i + 1, n):
                if rel[i][j] and rel[j][i]:
                    raise ValidationError(
                        f"antisymmetry fails: {labels[i]} <= {labels[j]} and {labels[j]} <= {labels[i]}")
        for i in range(n):
            for j in range(n):
                if i == j or not rel[i][j]:
                    continue
                for k in range(n):
                    if rel[j][k] and not rel[i][k]:
                        raise ValidationError(
                            f"transitivity fails: {labels[i]} <= {labels[j]} <= {labels[k]} "
                            f"but not {labels[i]} <= {labels[k]}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rel", rel)

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValidationError(f"unknown element {label!r}") from None

    def leq(self, x, y) -> bool:
        return self.rel[self.index(x)][self.index(y)]

    def comparable(self, i: int, j: int) -> bool:
        return self.rel[i][j] or self.rel[j][i]

    def is_total(self) -> bool:
        n = len(self)
        return all(self.comparable(i, j) for i in range(n) for j in range(n))

    def strict_pairs(self) -> list:
        n = len(self)
        return [(self.labels[i], self.labels[j]) for i in range(n) for j in range(n)
                if i != j and self.rel[i][j]]

    def to_json(self) -> dict:
        return {"elements": list(self.labels), "pairs": [list(p) for p in self.strict_pairs()]}


def make_poset(labels: Sequence, pairs: Iterable) -> FinitePoset:
    """Poset from strict ``(x, y)`` pairs meaning ``x <= y``.

    Reflexive pairs are implied; transitive closure is *not* taken, so the
    pairs must already be transitive.
    """
    labels = tuple(str(x) for x in labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    if len(pos) != len(labels):
        raise ValidationError("duplicate element labels")
    n = len(labels)
    rel = [[i == j for j in range(n)] for i in range(n)]
    for x, y in pairs:
        x, y = str(x), str(y)
        if x not in pos or y not in pos:
            raise ValidationError(f"pair ({x}, {y}) mentions an unknown element")
        rel[pos[x]][pos[y]] = True
    return FinitePoset(labels, rel)


def chain(n: int) -> FinitePoset:
    labels = [f"c{i}" for i in range(n)]
    return FinitePoset(labels, [[i <= j for j in range(n)] for i in range(n)])


def antichain(n: int) -> FinitePoset:
    labels = [f"x{i}" for i in range(n)]
    return FinitePoset(labels, [[i == j for j in range(n)] for i in range(n)])


def standard_example(n: int) -> FinitePoset:
    """a_0..a_{n-1}, b_0..b_{n-1} with a_j < b_k exactly when j != k."""
    if n < 2:
        raise ValidationError("the standard example needs n >= 2")
    labels = [f"a{j}" for j in range(n)] + [f"b{j}" for j in range(n)]
    pairs = [(f"a{j}", f"b{k}") for j in range(n) for k in range(n) if j != k]
    return make_poset(labels, pairs)


def restrict(p: FinitePoset, subset: Iterable) -> FinitePoset:
    idx = sorted({p.index(x) for x in subset})
    return FinitePoset([p.labels[i] for i in idx], [[p.rel[i][j] for j in idx] for i in idx])


# ---------------------------------------------------------------------------
# linear extensions and realizers

@dataclass(frozen=True)
class LinearExtension:
    order: tuple  # labels from bottom to top

    def rank(self) -> dict:
        return {x: r for r, x in enumerate(self.order)}


@dataclass(frozen=True)
class Realizer:
    extensions: tuple

    def __len__(self):
        return len(self.extensions)

    def to_json(self) -> list:
        return [list(e.order) for e in self.extensions]


def _as_order(p: FinitePoset, candidate) -> tuple:
    order = tuple(str(x) for x in (candidate.order if isinstance(candidate, LinearExtension) else candidate))
    if sorted(order) != sorted(p.labels):
        raise ValidationError("candidate order is not a permutation of the poset's elements")
    return order


def is_linear_extension(p: FinitePoset, candidate) -> bool:
    rank = {x: r for r, x in enumerate(_as_order(p, candidate))}
    return all(rank[x] <= rank[y] for x, y in p.strict_pairs())


def realizes(p: FinitePoset, extensions) -> bool:
    exts = [_as_order(p, e) for e in extensions]
    if not exts or not all(is_linear_extension(p, e) for e in exts):
        return False
    ranks = [{x: r for r, x in enumerate(e)} for e in exts]
    for x in p.labels:
        for y in p.labels:
            if all(rk[x] <= rk[y] for rk in ranks) != p.leq(x, y):
                return False
    return True


def critical_pairs(p: FinitePoset) -> list:
    """Index pairs ``(u, v)`` that some extension must place as ``u`` below ``v``.

    ``(a, b)`` is critical when ``a`` and ``b`` are incomparable, everything
    strictly below ``a`` is below ``b`` and everything strictly above ``b`` is
    above ``a``.  A family of linear extensions realizes the order iff each
    critical pair is reversed (``b`` below ``a``) somewhere.
    """
    n = len(p)
    rel = p.rel
    out = []
    for a in range(n):
        for b in range(n):
            if a == b or p.comparable(a, b):
                continue
            down_ok = all(rel[z][b] for z in range(n) if z != a and rel[z][a])
            up_ok = all(rel[a][z] for z in range(n) if z != b and rel[b][z])
            if down_ok and up_ok:
                out.append((b, a))
    return out


def incomparable_pairs(p: FinitePoset) -> list:
    n = len(p)
    return [(u, v) for u in range(n) for v in range(n) if u != v and not p.comparable(u, v)]


def _extension_from_closure(up: list, n: int) -> list:
    """Smallest-index-first topological order of the order given by up-sets."""
    placed = 0
    order = []
    for _ in range(n):
        for v in range(n):
            if placed >> v & 1:
                continue
            # every strict predecessor of v already placed
            if all((placed >> u & 1) or u == v or not (up[u] >> v & 1) for u in range(n)):
                order.append(v)
                placed |= 1 << v
                break
    return order


def _search(p: FinitePoset, k: int, required: list):
    n = len(p)
    base = [sum(1 << j for j in range(n) if p.rel[i][j]) for i in range(n)]

    def add(up, u, v):
        if up[v] >> u & 1:
            return None
        if up[u] >> v & 1:
            return up
        new = list(up)
        for a in range(n):
            if up[a] >> u & 1:
                new[a] |= up[v]
        return new

    slots = [base] * k

    def backtrack(t: int, used: int):
        if t == len(required):
            return True
        u, v = required[t]
        for s in range(min(used + 1, k)):
            new = add(slots[s], u, v)
            if new is None:
                continue
            saved = slots[s]
            slots[s] = new
            if backtrack(t + 1, max(used, s + 1)):
                return True
            slots[s] = saved
        return False

    if not backtrack(0, 0):
        return None
    return [_extension_from_closure(up, n) for up in slots]


@dataclass(frozen=True)
class DimensionResult:
    k: int
    realizer: Realizer


def order_dimension(p: FinitePoset, max_k: int | None = None, pairs: str = "critical",
                    max_elements: int = 12) -> DimensionResult:
    """Minimal realizer by iterative deepening over slot assignments.

    Each required ordered pair is assigned to one of ``k`` extensions; an
    extension is consistent while the strict order plus its assigned pairs
    stays acyclic.  ``pairs="all"`` covers every ordered incomparable pair,
    ``pairs="critical"`` only the critical ones (same answer, smaller search).
    """
    n = len(p)
    if n == 0:
        raise ValidationError("the empty poset has no realizer")
    if n > max_elements:
        raise ValidationError(f"{n} elements exceeds the search guard of {max_elements}")
    if pairs == "critical":
        required = critical_pairs(p)
    elif pairs == "all":
        required = incomparable_pairs(p)
    else:
        raise ValueError(f"unknown pair mode {pairs!r}")
    if max_k is None:
        max_k = max(1, n)
    lower = 1 if p.is_total() else 2
    for k in range(lower, max_k + 1):
        found = _search(p, k, required)
        if found is None:
            continue
        realizer = Realizer(tuple(LinearExtension(tuple(p.labels[i] for i in order))
                                  for order in found))
        if not realizes(p, realizer.extensions):
            raise PostorderError("dimension search produced a family that does not realize the order")
        return DimensionResult(k, realizer)
    raise ExceedsBound(max_k)


# ---------------------------------------------------------------------------
# monotones

@dataclass(frozen=True)
class MonotoneFamily:
    labels: tuple
    functions: tuple  # each a tuple of Fractions indexed like labels

    def to_json(self) -> list:
        return [{lab: format_rational(v) for lab, v in zip(self.labels, f)} for f in self.functions]


def _values(p: FinitePoset, f) -> tuple:
    if isinstance(f, Mapping):
        return tuple(Fraction(f[x]) for x in p.labels)
    vals = tuple(Fraction(v) for v in f)
    if len(vals) != len(p):
        raise ValidationError("function is not indexed by the poset's elements")
    return vals


def is_monotone(p: FinitePoset, f) -> bool:
    v = _values(p, f)
    n = len(p)
    return all(v[i] <= v[j] for i in range(n) for j in range(n) if p.rel[i][j])


def characterizes(p: FinitePoset, family) -> bool:
    fs = [_values(p, f) for f in (family.functions if isinstance(family, MonotoneFamily) else family)]
    n = len(p)
    for i in range(n):
        for j in range(n):
            if all(f[i] <= f[j] for f in fs) != p.rel[i][j]:
                return False
    return True


def indicator_monotone(p: FinitePoset, a) -> tuple:
    ia = p.index(a)
    return tuple(Fraction(1) if p.rel[ia][x] else Fraction(0) for x in range(len(p)))


def indicator_family(p: FinitePoset) -> MonotoneFamily:
    return MonotoneFamily(p.labels, tuple(indicator_monotone(p, a) for a in p.labels))


def realizer_to_monotones(p: FinitePoset, r: Realizer) -> MonotoneFamily:
    """Rank functions of the extensions in ``r``."""
    if not realizes(p, r.extensions):
        raise ValidationError("not a realizer of this poset")
    fs = []
    for ext in r.extensions:
        rank = ext.rank()
        fs.append(tuple(Fraction(rank[x]) for x in p.labels))
    return MonotoneFamily(p.labels, tuple(fs))


def order_monotone_dimension(p: FinitePoset, max_k: int | None = None):
    """For finite posets this equals the order dimension; the rank functions
    of a minimal realizer form a minimal characterizing family."""
    res = order_dimension(p, max_k)
    family = realizer_to_monotones(p, res.realizer)
    if not characterizes(p, family):
        raise PostorderError("rank functions failed to characterize the order")
    return res.k, family


# ---------------------------------------------------------------------------
# maps between posets

def pullback_extension(g: Mapping, order: Sequence) -> tuple:
    """Total order on ``g``'s domain: ``x`` before ``y`` iff ``g(x)`` before ``g(y)``."""
    images = list(g.values())
    if len(set(images)) != len(images):
        raise ValidationError("pullback needs an injective map")
    rank = {str(t): r for r, t in enumerate(order)}
    missing = [t for t in images if str(t) not in rank]
    if missing:
        raise ValidationError(f"images {missing} not in the total order")
    return tuple(sorted((str(x) for x in g), key=lambda x: rank[str(g[x])]))


def _leq_geq(value) -> tuple:
    rel = getattr(value, "relation", value)
    if isinstance(rel, tuple):
        return bool(rel[0]), bool(rel[1])
    return rel.leq, rel.geq


def induced_poset(items: Sequence, comparator: Callable, labels: Sequence | None = None,
                  map_fn: Callable = map):
    """Quotient ``items`` by mutual comparability and order the classes.

    ``comparator(x, y)`` must return a relation with ``leq``/``geq`` (or an
    object carrying one as ``.relation``); it is called once per unordered
    pair.  Returns ``(poset, classes)`` where ``classes[c]`` lists the item
    indices in class ``c``.
    """
    n = len(items)
    labels = [str(x) for x in (labels if labels is not None else range(n))]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    results = list(map_fn(lambda ij: _leq_geq(comparator(items[ij[0]], items[ij[1]])), pairs))
    leq = [[i == j for j in range(n)] for i in range(n)]
    for (i, j), (le, ge) in zip(pairs, results):
        leq[i][j] = le
        leq[j][i] = ge
    for i in range(n):
        for j in range(n):
            if not leq[i][j]:
                continue
            for k in range(n):
                if leq[j][k] and not leq[i][k]:
                    raise ComparatorInconsistency(
                        f"comparator is not transitive on items {labels[i]}, {labels[j]}, {labels[k]}")
    classes: list[list[int]] = []
    for i in range(n):
        for cls in classes:
            r = cls[0]
            if leq[i][r] and leq[r][i]:
                cls.append(i)
                break
        else:
            classes.append([i])
    reps = [c[0] for c in classes]
    poset = FinitePoset([labels[r] for r in reps], [[leq[a][b] for b in reps] for a in reps])
    return poset, classes


def embedding_failures(f: Mapping, p: FinitePoset, comparator: Callable) -> list:
    """Pairs ``(x, y)`` where ``x <= y`` in ``p`` disagrees with the comparator on images."""
    bad = []
    labs = p.labels
    for i, x in enumerate(labs):
        for y in labs[i + 1:]:
            le, ge = _leq_geq(comparator(f[x], f[y]))
            if le != p.leq(x, y):
                bad.append((x, y))
            if ge != p.leq(y, x):
                bad.append((y, x))
    return bad


def check_embedding(f: Mapping, p: FinitePoset, comparator: Callable) -> bool:
    missing = [x for x in p.labels if x not in f]
    if missing:
        raise ValidationError(f"map is undefined on {missing}")
    return not embedding_failures(f, p, comparator)


def main1_embedding(n: int):
    """EVMs on a bit realizing the standard example S_n (n >= 3).

    With s_j = 3^(j-n) and U the trivial EVM:
    A(j) = (1/n) A_{s_j, s_j^2} + ((n-1)/n) U,
    B(j) = (1/n) U + sum_{k != j} (1/n) A_{s_k, s_k^2}  (direct mixtures).
    Returns ``(evms, S_n)`` with evms ordered a_0..a_{n-1}, b_0..b_{n-1}.
    """
    from .classical import BIT, a_family, direct_mixture, trivial_evm

    if n < 3:
        raise ValidationError("the construction needs n >= 3")
    s = parabola_parameters(n)
    U = trivial_evm(BIT)
    parab = [a_family(x, x * x) for x in s]
    w = Fraction(1, n)
    A = [direct_mixture([(w, parab[j]), (1 - w, U)]) for j in range(n)]
    B = [direct_mixture([(w, U)] + [(w, parab[k]) for k in range(n) if k != j]) for j in range(n)]
    return A + B, standard_example(n)


def parabola_parameters(n: int) -> list:
    return [Fraction(1, 3 ** (n - j)) for j in range(n)]


# ---------------------------------------------------------------------------
# Hasse diagrams

def hasse_edges(p: FinitePoset) -> list:
    """Covering pairs (transitive reduction), sorted by label."""
    n = len(p)
    rel = p.rel
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j or not rel[i][j]:
                continue
            if any(k not in (i, j) and rel[i][k] and rel[k][j] for k in range(n)):
                continue
            edges.append((p.labels[i], p.labels[j]))
    return sorted(edges)


def to_dot(p: FinitePoset, name: str = "hasse") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for lab in sorted(p.labels):
        lines.append(f'  "{lab}";')
    for x, y in hasse_edges(p):
        lines.append(f'  "{x}" -> "{y}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
