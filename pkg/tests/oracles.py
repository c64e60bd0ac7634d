"""Independent brute-force oracles shared by the test modules."""
import itertools

from postorder.poset import FinitePoset


def linear_extensions(p):
    """Rank vectors (position of each element) of every linear extension."""
    n = len(p)
    for perm in itertools.permutations(range(n)):
        pos = [0] * n
        for r, v in enumerate(perm):
            pos[v] = r
        if all(pos[i] <= pos[j] for i in range(n) for j in range(n) if p.rel[i][j]):
            yield pos


def brute_dimension(p):
    n = len(p)
    exts = list(linear_extensions(p))
    for k in range(1, len(exts) + 1):
        for combo in itertools.combinations(exts, k):
            if all(p.rel[i][j] == all(pos[i] <= pos[j] for pos in combo)
                   for i in range(n) for j in range(n)):
                return k
    raise AssertionError("no realizer found")


def all_posets(n):
    """Every partial order on n points, one representative per isomorphism class."""
    seen = set()
    pairs = [(i, j) for i in range(n) for j in range(n) if i < j]
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        rel = [[i == j for j in range(n)] for i in range(n)]
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                rel[i][j] = True
            elif c == 2:
                rel[j][i] = True
        if not all(rel[i][k] for i in range(n) for j in range(n) for k in range(n)
                   if rel[i][j] and rel[j][k]):
            continue
        canon = min(tuple(rel[perm[i]][perm[j]] for i in range(n) for j in range(n))
                    for perm in itertools.permutations(range(n)))
        if canon in seen:
            continue
        seen.add(canon)
        yield FinitePoset([f"e{i}" for i in range(n)], rel)
