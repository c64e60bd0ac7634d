"""Classical (simplex) state spaces: effects, EVMs, states, ensembles.

A classical space with ``d`` pure states has the probability simplex as its
state space and the all-ones vector as unit.  Effects are vectors with
entries in ``[0, 1]``; an EVM is a list of effects summing to the unit.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, ValidationError
from .exact import Q, format_rational


@dataclass(frozen=True)
class ClassicalSpace:
    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValidationError(f"classical space needs d >= 1, got {self.d!r}")

    @property
    def unit(self) -> tuple:
        return tuple(Fraction(1) for _ in range(self.d))

    def to_json(self) -> dict:
        return {"classical": self.d}


BIT = ClassicalSpace(2)


def _vector(values, d: int, what: str) -> tuple:
    vec = tuple(Q(v) for v in values)
    if len(vec) != d:
        raise DimensionMismatch(f"{what} has length {len(vec)}, space has d={d}")
    return vec


def inner(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class Effect:
    space: ClassicalSpace
    values: tuple

    def __post_init__(self):
        vals = _vector(self.values, self.space.d, "effect")
        for x, v in enumerate(vals):
            if v < 0:
                raise ValidationError(f"effect entry {x} is negative ({v})")
            if v > 1:
                raise ValidationError(f"effect entry {x} exceeds 1 ({v})")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Evm:
    space: ClassicalSpace
    effects: tuple  # tuple[Effect, ...]

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Effect) else Effect(self.space, e) for e in self.effects)
        if not effects:
            raise ValidationError("an EVM needs at least one effect")
        for e in effects:
            if e.space != self.space:
                raise DimensionMismatch("effect lives on a different space")
        total = tuple(sum(col, Fraction(0)) for col in zip(*(e.values for e in effects)))
        if total != self.space.unit:
            shown = "(" + ",".join(str(t) for t in total) + ")"
            raise ValidationError(f"effects sum to {shown}, not the unit")
        object.__setattr__(self, "effects", effects)

    @property
    def vectors(self) -> tuple:
        return tuple(e.values for e in self.effects)

    def __len__(self):
        return len(self.effects)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(),
                "effects": [[format_rational(v) for v in e.values] for e in self.effects]}


@dataclass(frozen=True)
class State:
    space: ClassicalSpace
    values: tuple

    def __post_init__(self):
        vals = _vector(self.values, self.space.d, "state")
        if any(v < 0 for v in vals):
            raise ValidationError("state has a negative entry")
        if sum(vals) != 1:
            raise ValidationError(f"state entries sum to {sum(vals)}, not 1")
        object.__setattr__(self, "values", vals)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "values": [format_rational(v) for v in self.values]}


@dataclass(frozen=True)
class Ensemble:
    space: ClassicalSpace
    members: tuple

    def __post_init__(self):
        members = tuple(_vector(m, self.space.d, "ensemble member") for m in self.members)
        if not members:
            raise ValidationError("an ensemble needs at least one member")
        for k, m in enumerate(members):
            if any(v < 0 for v in m):
                raise ValidationError(f"ensemble member {k} has a negative entry")
        total = sum((sum(m) for m in members), Fraction(0))
        if total != 1:
            raise ValidationError(f"ensemble weights sum to {total}, not 1")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(),
                "members": [[format_rational(v) for v in m] for m in self.members]}


def make_evm(space: ClassicalSpace | int, effects) -> Evm:
    if isinstance(space, int):
        space = ClassicalSpace(space)
    return Evm(space, tuple(Effect(space, e) for e in effects))


def outcome_distribution(m: Evm, state: State) -> tuple:
    if m.space != state.space:
        raise DimensionMismatch("EVM and state live on different spaces")
    return tuple(inner(e.values, state.values) for e in m.effects)


def direct_mixture(parts) -> Evm:
    """Weighted direct sum: outcome ``(j, k)`` of the result is ``p_j M_j(k)``.

    Zero-weight parts keep their (zero) blocks so that outcome indexing is
    independent of the weights.
    """
    parts = [(Q(w), m) for w, m in parts]
    if not parts:
        raise ValidationError("direct mixture of nothing")
    if any(w < 0 for w, _ in parts):
        raise ValidationError("negative mixture weight")
    total = sum(w for w, _ in parts)
    if total != 1:
        raise ValidationError(f"mixture weights sum to {total}, not 1")
    space = parts[0][1].space
    if any(m.space != space for _, m in parts):
        raise DimensionMismatch("direct mixture of EVMs on different spaces")
    effects = [tuple(w * v for v in e.values) for w, m in parts for e in m.effects]
    return make_evm(space, effects)


def is_trivial(m: Evm) -> bool:
    return all(len(set(e.values)) == 1 for e in m.effects)


def trivial_evm(space: ClassicalSpace | int) -> Evm:
    if isinstance(space, int):
        space = ClassicalSpace(space)
    return make_evm(space, [space.unit])


def identity_evm(space: ClassicalSpace | int) -> Evm:
    if isinstance(space, int):
        space = ClassicalSpace(space)
    d = space.d
    return make_evm(space, [[1 if x == k else 0 for x in range(d)] for k in range(d)])


def a_family(s0, s1) -> Evm:
    """Bit EVM with effects (s0, s1) and (1 - s0, 1 - s1)."""
    s0, s1 = Q(s0), Q(s1)
    for s in (s0, s1):
        if not 0 <= s <= 1:
            raise ValidationError(f"parameter {s} outside [0, 1]")
    return make_evm(BIT, [(s0, s1), (1 - s0, 1 - s1)])


@dataclass(frozen=True)
class Inside:
    p: Fraction
    q: Fraction


class Outside:
    def __repr__(self):
        return "Outside()"

    def __eq__(self, other):
        return isinstance(other, Outside)

    def __hash__(self):
        return hash(Outside)


def parallelogram_member(s, t) -> Inside | Outside:
    """Is ``s`` in the parallelogram (0,0)-(t0,t1)-(1,1)-(1-t0,1-t1)?

    Solves ``s = p t + q (1 - t)`` for ``p, q`` in ``[0, 1]``.  When
    ``t0 == t1`` the two generators are parallel and the parallelogram is
    the diagonal segment; the returned witness then takes the smallest
    admissible ``q``.
    """
    s0, s1 = (Q(x) for x in s)
    t0, t1 = (Q(x) for x in t)
    det = t0 * (1 - t1) - t1 * (1 - t0)  # = t0 - t1
    if det != 0:
        p = (s0 * (1 - t1) - s1 * (1 - t0)) / det
        q = (t0 * s1 - t1 * s0) / det
        if 0 <= p <= 1 and 0 <= q <= 1:
            return Inside(p, q)
        return Outside()
    if s0 != s1:
        return Outside()
    # s0 = p t + q (1 - t) with t = t0 = t1
    s, t = s0, t0
    if t == 1:
        return Inside(s, Fraction(0))
    if t == 0:
        return Inside(Fraction(0), s)
    # q ranges over [max(0, (s - t)/(1 - t)), min(1, s/(1 - t))] intersected with p in [0, 1]
    q = max(Fraction(0), (s - t) / (1 - t))
    p = (s - q * (1 - t)) / t
    if 0 <= p <= 1 and 0 <= q <= 1:
        return Inside(p, q)
    return Outside()


@dataclass(frozen=True)
class UnitalPositiveMap:
    """Linear map from the bit effect space: (x0, x1) -> x0 a + x1 a'."""

    target: ClassicalSpace
    a: tuple
    a_prime: tuple

    def __post_init__(self):
        Effect(self.target, self.a)
        Effect(self.target, self.a_prime)
        if tuple(x + y for x, y in zip(self.a, self.a_prime)) != self.target.unit:
            raise ValidationError("a + a' must equal the unit")
        if len(set(self.a)) == 1:
            raise ValidationError("(a, a') must be linearly independent")

    def __call__(self, alpha) -> tuple:
        a0, a1 = (Q(x) for x in alpha)
        return tuple(a0 * x + a1 * y for x, y in zip(self.a, self.a_prime))

    def to_json(self) -> dict:
        return {"target": self.target.to_json(),
                "a": [format_rational(v) for v in self.a],
                "a_prime": [format_rational(v) for v in self.a_prime]}


def cbit_embedding(a0, target: ClassicalSpace | int) -> UnitalPositiveMap:
    """Embed bit EVMs into ``target`` through the direction ``a0``.

    ``a = (a0 + |a0| u) / |a0 + |a0| u|`` with the sup norm, ``a' = u - a``.
    """
    if isinstance(target, int):
        target = ClassicalSpace(target)
    a0 = _vector(a0, target.d, "a0")
    if len(set(a0)) == 1:
        raise ValidationError("a0 is proportional to the unit; the embedding needs a second direction")
    norm = max(abs(v) for v in a0)
    shifted = tuple(v + norm for v in a0)
    scale = max(abs(v) for v in shifted)
    a = tuple(v / scale for v in shifted)
    return UnitalPositiveMap(target, a, tuple(1 - v for v in a))


def apply_map(psi: UnitalPositiveMap, m: Evm) -> Evm:
    if m.space != BIT:
        raise DimensionMismatch("the embedding acts on bit EVMs only")
    return make_evm(psi.target, [psi(e.values) for e in m.effects])
