"""The post-processing order on finite-outcome EVMs.

``M`` is a post-processing of ``N`` when ``M(j) = sum_k p(j|k) N(k)`` for a
Markov matrix ``p``.  Both directions are decided by exact LP; every
negative answer carries a separating ensemble built from the Farkas dual.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .classical import ClassicalSpace, Ensemble, Evm, inner
from .errors import CertificateError, ComparableError, DimensionMismatch, ValidationError
from .exact import Feasible, LpProblem, format_rational, lp_feasible


class Relation(str, enum.Enum):
    LESS = "less"
    GREATER = "greater"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"

    @property
    def leq(self) -> bool:
        return self in (Relation.LESS, Relation.EQUIVALENT)

    @property
    def geq(self) -> bool:
        return self in (Relation.GREATER, Relation.EQUIVALENT)

    def flipped(self) -> "Relation":
        return {Relation.LESS: Relation.GREATER, Relation.GREATER: Relation.LESS}.get(self, self)


@dataclass(frozen=True)
class MarkovMatrix:
    """``entries[j][k] = p(j|k)``; columns are probability vectors."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValidationError("empty Markov matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValidationError("ragged Markov matrix")
        if any(x < 0 for r in rows for x in r):
            raise ValidationError("negative Markov matrix entry")
        for k in range(len(rows[0])):
            if sum(r[k] for r in rows) != 1:
                raise ValidationError(f"column {k} of the Markov matrix does not sum to 1")
        object.__setattr__(self, "entries", rows)

    @property
    def shape(self) -> tuple:
        return len(self.entries), len(self.entries[0])

    def apply(self, vectors: Sequence[Sequence[Fraction]]) -> tuple:
        """Return ``(sum_k p(j|k) v_k)_j`` for coordinate vectors ``v_k``."""
        if len(vectors) != self.shape[1]:
            raise DimensionMismatch("Markov matrix width does not match the number of outcomes")
        dim = len(vectors[0])
        return tuple(
            tuple(sum((row[k] * vectors[k][c] for k in range(len(vectors))), Fraction(0))
                  for c in range(dim))
            for row in self.entries)

    def to_json(self) -> list:
        return [[format_rational(x) for x in row] for row in self.entries]


def markov_problem(target: Sequence[Sequence[Fraction]],
                   source: Sequence[Sequence[Fraction]]) -> LpProblem:
    """LP in the variables p(j|k) (index ``j * len(source) + k``)."""
    m, n = len(target), len(source)
    dim = len(source[0])
    if any(len(v) != dim for v in list(target) + list(source)):
        raise DimensionMismatch("effects have inconsistent coordinate dimensions")
    nv = m * n
    A, b = [], []
    for j in range(m):
        for c in range(dim):
            row = [Fraction(0)] * nv
            for k in range(n):
                row[j * n + k] = source[k][c]
            A.append(row)
            b.append(target[j][c])
    for k in range(n):
        row = [Fraction(0)] * nv
        for j in range(m):
            row[j * n + k] = Fraction(1)
        A.append(row)
        b.append(Fraction(1))
    return LpProblem.build(A, b, nv)


def markov_or_dual(target, source):
    """Markov matrix realizing ``target`` from ``source``, or the dual vectors.

    On failure returns ``(ys, zs)``: one coordinate vector ``y_j`` per target
    outcome and one scalar ``z_k`` per source outcome with
    ``<y_j, source_k> + z_k <= 0`` and ``sum_j <y_j, target_j> + sum_k z_k > 0``.
    """
    problem = markov_problem(target, source)
    res = lp_feasible(problem)
    m, n = len(target), len(source)
    if isinstance(res, Feasible):
        entries = [[res.x[j * n + k] for k in range(n)] for j in range(m)]
        markov = MarkovMatrix(entries)
        if markov.apply(source) != tuple(tuple(v) for v in target):
            raise CertificateError("Markov witness does not reproduce the target EVM")
        return markov
    y = res.certificate.y
    dim = len(source[0])
    ys = [tuple(y[j * dim:(j + 1) * dim]) for j in range(m)]
    zs = list(y[m * dim:])
    return ys, zs


def pg(e: Ensemble, m: Evm) -> Fraction:
    """Optimal guessing probability: ``sum_j max_k <M(j), rho_k>``."""
    if e.space != m.space:
        raise DimensionMismatch("ensemble and EVM live on different spaces")
    return sum((max(inner(eff.values, rho) for rho in e.members) for eff in m.effects), Fraction(0))


@dataclass(frozen=True)
class CompareVerdict:
    """Outcome of comparing ``m`` against ``n``.

    ``markov_fwd`` witnesses ``m <= n`` and ``markov_bwd`` witnesses
    ``n <= m``.  ``ensemble_fwd`` has ``P_g(E; m) > P_g(E; n)`` and so refutes
    ``m <= n``; ``ensemble_bwd`` refutes ``n <= m``.
    """

    relation: Relation
    markov_fwd: MarkovMatrix | None = None
    markov_bwd: MarkovMatrix | None = None
    ensemble_fwd: object | None = None
    ensemble_bwd: object | None = None
    gaps: dict = field(default_factory=dict, compare=False)

    @property
    def leq(self) -> bool:
        return self.relation.leq

    @property
    def geq(self) -> bool:
        return self.relation.geq


def _relation(fwd: bool, bwd: bool) -> Relation:
    if fwd and bwd:
        return Relation.EQUIVALENT
    if fwd:
        return Relation.LESS
    if bwd:
        return Relation.GREATER
    return Relation.INCOMPARABLE


def compare_generic(m_vecs, n_vecs, build_ensemble: Callable, pg_fn: Callable,
                    m, n) -> CompareVerdict:
    """Shared decision procedure for any space given in linear coordinates."""
    fwd = markov_or_dual(m_vecs, n_vecs)
    bwd = markov_or_dual(n_vecs, m_vecs)
    verdict = {}
    gaps = {}
    if isinstance(fwd, MarkovMatrix):
        verdict["markov_fwd"] = fwd
    else:
        ens = build_ensemble(fwd[0])
        gaps["fwd"] = _strict_gap(pg_fn, ens, m, n)
        verdict["ensemble_fwd"] = ens
    if isinstance(bwd, MarkovMatrix):
        verdict["markov_bwd"] = bwd
    else:
        ens = build_ensemble(bwd[0])
        gaps["bwd"] = _strict_gap(pg_fn, ens, n, m)
        verdict["ensemble_bwd"] = ens
    rel = _relation(isinstance(fwd, MarkovMatrix), isinstance(bwd, MarkovMatrix))
    return CompareVerdict(rel, gaps=gaps, **verdict)


def _strict_gap(pg_fn, ens, better, worse) -> Fraction:
    gap = pg_fn(ens, better) - pg_fn(ens, worse)
    if gap <= 0:
        raise CertificateError(f"separating ensemble shows no strict gap ({gap})")
    return gap


def ensemble_from_dual(space: ClassicalSpace, ys) -> Ensemble:
    """Shift the dual vectors by ``c * 1`` to nonnegativity, then normalize.

    Every EVM pairs with the all-ones vector to ``d``, so the shift adds the
    same constant to both guessing probabilities and keeps the gap strict.
    """
    c = max(Fraction(0), -min(v for y in ys for v in y))
    shifted = [tuple(v + c for v in y) for y in ys]
    z = sum((sum(y) for y in shifted), Fraction(0))
    if z <= 0:
        raise CertificateError("dual vectors normalize to zero")
    return Ensemble(space, tuple(tuple(v / z for v in y) for y in shifted))


def compare(m: Evm, n: Evm) -> CompareVerdict:
    if m.space != n.space:
        raise DimensionMismatch("EVMs live on different spaces")
    return compare_generic(m.vectors, n.vectors,
                           lambda ys: ensemble_from_dual(m.space, ys), pg, m, n)


def separating_ensemble(m: Evm, n: Evm) -> Ensemble:
    """An ensemble with ``P_g(E; m) > P_g(E; n)``; requires ``not m <= n``."""
    if m.space != n.space:
        raise DimensionMismatch("EVMs live on different spaces")
    res = markov_or_dual(m.vectors, n.vectors)
    if isinstance(res, MarkovMatrix):
        raise ComparableError("m is a post-processing of n; no separating ensemble exists")
    ens = ensemble_from_dual(m.space, res[0])
    _strict_gap(pg, ens, m, n)
    return ens


def verify_verdict(verdict: CompareVerdict, m, n, pg_fn=pg, coords=None) -> bool:
    """Re-check every certificate carried by ``verdict`` without solving anything."""
    coords = coords or (lambda evm: evm.vectors)
    mv, nv = coords(m), coords(n)
    rel = verdict.relation
    if rel.leq:
        w = verdict.markov_fwd
        if w is None or w.shape != (len(mv), len(nv)) or w.apply(nv) != tuple(map(tuple, mv)):
            return False
    else:
        e = verdict.ensemble_fwd
        if e is None or not pg_fn(e, m) > pg_fn(e, n):
            return False
    if rel.geq:
        w = verdict.markov_bwd
        if w is None or w.shape != (len(nv), len(mv)) or w.apply(mv) != tuple(map(tuple, nv)):
            return False
    else:
        e = verdict.ensemble_bwd
        if e is None or not pg_fn(e, n) > pg_fn(e, m):
            return False
    return True


def quotient(ms: Sequence, cmp: Callable = None) -> list:
    """Partition indices of ``ms`` into post-processing equivalence classes."""
    cmp = cmp or compare
    classes: list[list[int]] = []
    for i, m in enumerate(ms):
        for cls in classes:
            if cmp(ms[cls[0]], m).relation is Relation.EQUIVALENT:
                cls.append(i)
                break
        else:
            classes.append([i])
    return classes


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_ensembles(space: ClassicalSpace | int, max_members: int,
                        max_denominator: int) -> list:
    """All ensembles with at most ``max_members`` members and entries in
    ``(1/max_denominator) Z``, sorted by their flattened numerator tuples."""
    if isinstance(space, int):
        space = ClassicalSpace(space)
    if max_members < 1 or max_denominator < 1:
        raise ValidationError("max_members and max_denominator must be >= 1")
    d, D = space.d, max_denominator
    keys = []
    for count in range(1, max_members + 1):
        keys.extend(_compositions(D, count * d))
    keys.sort()
    return [Ensemble(space, tuple(tuple(Fraction(x, D) for x in key[i * d:(i + 1) * d])
                                  for i in range(len(key) // d)))
            for key in keys]
