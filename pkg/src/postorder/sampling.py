"""Seeded generators of random exact objects for tests and benchmarks."""
from __future__ import annotations

import random
from fractions import Fraction

from .classical import ClassicalSpace, Ensemble, Evm, make_evm
from .exact import GaussianRational, g_add, g_dagger, g_identity, g_matmul, g_scale, g_trace, g_zeros
from .poset import FinitePoset
from .quantum import QuantumEnsemble, QuantumEvm


def composition(rng: random.Random, total: int, parts: int) -> list:
    """Uniformly random weak composition of ``total`` into ``parts`` nonnegative integers."""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def random_evm(rng: random.Random, d: int, outcomes: int, max_den: int = 12) -> Evm:
    cols = []
    for _ in range(d):
        den = rng.randint(1, max_den)
        cols.append([Fraction(c, den) for c in composition(rng, den, outcomes)])
    return make_evm(d, [[cols[x][j] for x in range(d)] for j in range(outcomes)])


def random_ensemble(rng: random.Random, d: int, members: int, max_den: int = 24) -> Ensemble:
    den = rng.randint(1, max_den)
    flat = [Fraction(c, den) for c in composition(rng, den, members * d)]
    return Ensemble(ClassicalSpace(d), tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(members)))


def random_poset(rng: random.Random, n: int, density: float = 0.3) -> FinitePoset:
    """Random DAG on a shuffled ground set, closed transitively."""
    perm = list(range(n))
    rng.shuffle(perm)
    rel = [[i == j for j in range(n)] for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                rel[perm[a]][perm[b]] = True
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                for j in range(n):
                    if rel[k][j]:
                        rel[i][j] = True
    return FinitePoset([f"e{i}" for i in range(n)], rel)


def random_gaussian_matrix(rng: random.Random, rows: int, cols: int, bound: int = 3) -> tuple:
    return tuple(tuple(GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound))
                       for _ in range(cols)) for _ in range(rows))


def random_hermitian(rng: random.Random, d: int, bound: int = 4, max_den: int = 4) -> tuple:
    m = [[None] * d for _ in range(d)]
    for i in range(d):
        m[i][i] = GaussianRational(Fraction(rng.randint(-bound, bound), rng.randint(1, max_den)))
        for j in range(i + 1, d):
            z = GaussianRational(Fraction(rng.randint(-bound, bound), rng.randint(1, max_den)),
                                 Fraction(rng.randint(-bound, bound), rng.randint(1, max_den)))
            m[i][j] = z
            m[j][i] = z.conjugate()
    return tuple(tuple(r) for r in m)


def _random_psd(rng: random.Random, d: int, rank: int) -> tuple:
    b = random_gaussian_matrix(rng, d, rank)
    return g_matmul(b, g_dagger(b))


def random_povm(rng: random.Random, d: int, outcomes: int, rank: int = 1) -> QuantumEvm:
    """``outcomes - 1`` random PSD effects scaled to total trace 1, completed by ``I - sum``."""
    parts = [_random_psd(rng, d, rank) for _ in range(outcomes - 1)]
    total = sum((g_trace(p).re for p in parts), Fraction(0))
    if total == 0:
        return QuantumEvm(d, tuple([g_identity(d)] + [g_zeros(d)] * (outcomes - 1)))
    parts = [g_scale(Fraction(1) / total, p) for p in parts]
    rest = g_identity(d)
    for p in parts:
        rest = g_add(rest, g_scale(-1, p))
    return QuantumEvm(d, tuple(parts + [rest]))


def random_qensemble(rng: random.Random, d: int, members: int, rank: int = 1) -> QuantumEnsemble:
    parts = [_random_psd(rng, d, rank) for _ in range(members)]
    total = sum((g_trace(p).re for p in parts), Fraction(0))
    if total == 0:
        parts[0] = g_identity(d)
        total = Fraction(d)
    return QuantumEnsemble(d, tuple(g_scale(Fraction(1) / total, p) for p in parts))
