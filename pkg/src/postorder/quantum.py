"""Finite-dimensional quantum measurements and channels.

Two numeric regimes live here.  POVMs, ensembles, ``qcompare`` and ``qpg``
use exact Gaussian-rational matrices.  Channels (:class:`Superoperator`)
are complex float matrices acting on column-stacked operators, because the
entangled basis involves irrational roots of unity for ``d >= 3``.

Channels are in the Heisenberg picture: a superoperator with ``d_in`` and
``d_out`` maps ``d_in x d_in`` observables to ``d_out x d_out`` ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .exact import (G, GaussianRational, g_add, g_identity, g_to_numpy, gmatrix,
                    is_hermitian_exact, psd_exact, trace_norm_float)
from .postproc import CompareVerdict, MarkovMatrix, compare_generic, verify_verdict

TOL = 1e-9


@dataclass(frozen=True)
class QuantumEvm:
    dim: int
    effects: tuple

    def __post_init__(self):
        effects = tuple(gmatrix(e) for e in self.effects)
        if not effects:
            raise ValidationError("a POVM needs at least one effect")
        for k, e in enumerate(effects):
            if len(e) != self.dim or any(len(r) != self.dim for r in e):
                raise DimensionMismatch(f"effect {k} is not {self.dim}x{self.dim}")
            if not is_hermitian_exact(e):
                raise ValidationError(f"effect {k} is not Hermitian")
            if not psd_exact(e):
                raise ValidationError(f"effect {k} is not positive semidefinite")
        total = effects[0]
        for e in effects[1:]:
            total = g_add(total, e)
        if total != g_identity(self.dim):
            raise ValidationError("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    def __len__(self):
        return len(self.effects)

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "effects": [[[x.to_json() for x in row] for row in e] for e in self.effects]}


@dataclass(frozen=True)
class QuantumEnsemble:
    dim: int
    members: tuple

    def __post_init__(self):
        members = tuple(gmatrix(m) for m in self.members)
        if not members:
            raise ValidationError("an ensemble needs at least one member")
        total = Fraction(0)
        for k, m in enumerate(members):
            if len(m) != self.dim or any(len(r) != self.dim for r in m):
                raise DimensionMismatch(f"member {k} is not {self.dim}x{self.dim}")
            if not is_hermitian_exact(m) or not psd_exact(m):
                raise ValidationError(f"member {k} is not positive semidefinite")
            total += sum(m[i][i].re for i in range(self.dim))
        if total != 1:
            raise ValidationError(f"ensemble traces sum to {total}, not 1")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "members": [[[x.to_json() for x in row] for row in m] for m in self.members]}


def make_povm(dim: int, matrices) -> QuantumEvm:
    return QuantumEvm(dim, tuple(matrices))


def ket_bra(vec: Sequence) -> tuple:
    v = [GaussianRational.of(x) for x in vec]
    return tuple(tuple(a * b.conjugate() for b in v) for a in v)


def computational_povm(d: int) -> QuantumEvm:
    return make_povm(d, [ket_bra([1 if i == k else 0 for i in range(d)]) for k in range(d)])


def trivial_povm(d: int, outcomes: int = 1) -> QuantumEvm:
    w = Fraction(1, outcomes)
    return make_povm(d, [tuple(tuple(G(w if i == j else 0) for j in range(d)) for i in range(d))] * outcomes)


# ---------------------------------------------------------------------------
# exact comparison

def hermitian_coordinates(h) -> tuple:
    """Real coordinates: diagonal, then Re and Im of the strict upper triangle."""
    n = len(h)
    diag = [h[i][i].re for i in range(n)]
    re = [h[i][j].re for i in range(n) for j in range(i + 1, n)]
    im = [h[i][j].im for i in range(n) for j in range(i + 1, n)]
    return tuple(diag + re + im)


def hermitian_from_functional(w: Sequence[Fraction], n: int) -> tuple:
    """The Hermitian ``Y`` with ``tr(Y X) = <w, hermitian_coordinates(X)>``."""
    Y = [[G() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        Y[i][i] = G(w[i])
    upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
    off = len(upper)
    for t, (i, j) in enumerate(upper):
        z = G(w[n + t] / 2, w[n + off + t] / 2)
        Y[i][j] = z
        Y[j][i] = z.conjugate()
    return tuple(tuple(r) for r in Y)


def trace_product(a, b) -> Fraction:
    """``tr(a b)`` for Hermitian ``a, b`` (real)."""
    n = len(a)
    s = G()
    for i in range(n):
        for j in range(n):
            s = s + a[i][j] * b[j][i]
    return s.re


def qpg(e: QuantumEnsemble, m: QuantumEvm) -> Fraction:
    if e.dim != m.dim:
        raise DimensionMismatch("ensemble and POVM dimensions differ")
    return sum((max(trace_product(eff, rho) for rho in e.members) for eff in m.effects), Fraction(0))


def ensemble_from_dual_hermitian(dim: int, ws) -> QuantumEnsemble:
    """Shift the dual operators by ``c * 1`` to positivity, then normalize.

    ``c`` is a Gershgorin bound with ``|re| + |im|`` in place of the modulus,
    so it stays rational and makes every shifted operator diagonally dominant.
    """
    Ys = [hermitian_from_functional(w, dim) for w in ws]
    c = Fraction(0)
    for Y in Ys:
        for i in range(dim):
            radius = sum((abs(Y[i][j].re) + abs(Y[i][j].im) for j in range(dim) if j != i), Fraction(0))
            c = max(c, radius - Y[i][i].re)
    shifted = [tuple(tuple(Y[i][j] + (c if i == j else 0) for j in range(dim)) for i in range(dim))
               for Y in Ys]
    z = sum((sum(Y[i][i].re for i in range(dim)) for Y in shifted), Fraction(0))
    if z <= 0:
        raise ValidationError("dual operators normalize to zero")
    inv = G(1 / z)
    return QuantumEnsemble(dim, tuple(tuple(tuple(inv * x for x in row) for row in Y) for Y in shifted))


def _coords(m: QuantumEvm) -> tuple:
    return tuple(hermitian_coordinates(e) for e in m.effects)


def qcompare(m: QuantumEvm, n: QuantumEvm) -> CompareVerdict:
    if m.dim != n.dim:
        raise DimensionMismatch("POVM dimensions differ")
    return compare_generic(_coords(m), _coords(n),
                           lambda ws: ensemble_from_dual_hermitian(m.dim, ws), qpg, m, n)


def verify_qverdict(verdict: CompareVerdict, m: QuantumEvm, n: QuantumEvm) -> bool:
    return verify_verdict(verdict, m, n, pg_fn=qpg, coords=_coords)


# ---------------------------------------------------------------------------
# superoperators

def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1
    return e


@dataclass(frozen=True, eq=False)
class Superoperator:
    d_in: int
    d_out: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.d_out ** 2, self.d_in ** 2):
            raise DimensionMismatch(
                f"superoperator matrix has shape {mat.shape}, expected {(self.d_out ** 2, self.d_in ** 2)}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        for i in range(self.d_in):
            for j in range(i, self.d_in):
                x = self(matrix_unit(self.d_in, i, j) + matrix_unit(self.d_in, j, i))
                y = self(1j * (matrix_unit(self.d_in, i, j) - matrix_unit(self.d_in, j, i)))
                for out in (x, y):
                    if np.max(np.abs(out - out.conj().T)) > TOL:
                        raise ValidationError("superoperator does not preserve Hermiticity")

    def __call__(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.d_in, self.d_in):
            raise DimensionMismatch(f"input must be {self.d_in}x{self.d_in}")
        return unvec(self.matrix @ vec(a), self.d_out)

    def predual(self, rho) -> np.ndarray:
        """Schroedinger-picture image: ``tr(rho S(a)) = tr(S_*(rho) a)``."""
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.d_out, self.d_out):
            raise DimensionMismatch(f"state must be {self.d_out}x{self.d_out}")
        return unvec(self.matrix.conj().T @ vec(rho), self.d_in)

    def to_json(self) -> dict:
        return {"d_in": self.d_in, "d_out": self.d_out,
                "re": self.matrix.real.tolist(), "im": self.matrix.imag.tolist()}

    @staticmethod
    def from_json(obj) -> "Superoperator":
        mat = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
        return Superoperator(int(obj["d_in"]), int(obj["d_out"]), mat)


def superop_from_function(f, d_in: int, d_out: int) -> Superoperator:
    cols = []
    for j in range(d_in):
        for i in range(d_in):  # column-stacking: index i + j * d_in
            cols.append(vec(f(matrix_unit(d_in, i, j))))
    return Superoperator(d_in, d_out, np.stack(cols, axis=1))


def identity_channel(d: int) -> Superoperator:
    return Superoperator(d, d, np.eye(d * d))


def transpose_map(d: int) -> Superoperator:
    return superop_from_function(lambda a: a.T, d, d)


def dephasing_channel(d: int) -> Superoperator:
    return superop_from_function(lambda a: np.diag(np.diag(a)), d, d)


def depolarizing_channel(d: int, lam: float) -> Superoperator:
    """``a -> lam * a + (1 - lam) * tr(a) / d * 1`` (self-dual, unital)."""
    return superop_from_function(lambda a: lam * a + (1 - lam) * np.trace(a) / d * np.eye(d), d, d)


def constant_channel(d_in: int, d_out: int, rho0=None) -> Superoperator:
    """``a -> tr(rho0 a) 1``: the Heisenberg picture of discarding and preparing ``rho0``."""
    rho0 = np.eye(d_in) / d_in if rho0 is None else np.asarray(rho0, dtype=complex)
    return superop_from_function(lambda a: np.trace(rho0 @ a) * np.eye(d_out), d_in, d_out)


def kraus_channel(kraus: Sequence[np.ndarray]) -> Superoperator:
    """Heisenberg map ``a -> sum_i V_i^dag a V_i`` with ``V_i : C^d_out -> C^d_in``."""
    kraus = [np.asarray(v, dtype=complex) for v in kraus]
    d_in, d_out = kraus[0].shape
    return superop_from_function(lambda a: sum(v.conj().T @ a @ v for v in kraus), d_in, d_out)


def random_channel(d_in: int, d_out: int, rng: np.random.Generator, rank: int = 2) -> Superoperator:
    """Random unital CP map from a Haar-ish isometry ``C^d_out -> C^d_in (x) C^rank``."""
    z = rng.normal(size=(d_in * rank, d_out)) + 1j * rng.normal(size=(d_in * rank, d_out))
    q, _ = np.linalg.qr(z)
    kraus = [q[r * d_in:(r + 1) * d_in, :] for r in range(rank)]
    return kraus_channel(kraus)


def compose(outer: Superoperator, inner: Superoperator) -> Superoperator:
    """``outer o inner`` (apply ``inner`` first)."""
    if inner.d_out != outer.d_in:
        raise DimensionMismatch(f"cannot compose: inner outputs {inner.d_out}, outer expects {outer.d_in}")
    return Superoperator(inner.d_in, outer.d_out, outer.matrix @ inner.matrix)


def tensor_with_identity(s: Superoperator, n: int) -> Superoperator:
    """``s (x) id_n`` on operators of ``C^d (x) C^n`` (first factor acted on)."""
    d_in, d_out = s.d_in, s.d_out

    def f(a):
        blocks = a.reshape(d_in, n, d_in, n)
        out = np.zeros((d_out, n, d_out, n), dtype=complex)
        for p in range(n):
            for q in range(n):
                out[:, p, :, q] = s(blocks[:, p, :, q])
        return out.reshape(d_out * n, d_out * n)

    return superop_from_function(f, d_in * n, d_out * n)


def choi(s: Superoperator) -> np.ndarray:
    """Block matrix ``(S(|j><j'|))_{j, j'}`` of size ``d_in * d_out``."""
    d_in, d_out = s.d_in, s.d_out
    out = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for j in range(d_in):
        for jp in range(d_in):
            out[j * d_out:(j + 1) * d_out, jp * d_out:(jp + 1) * d_out] = s(matrix_unit(d_in, j, jp))
    return out


def choi_min_eigenvalue(s: Superoperator) -> float:
    c = choi(s)
    return float(np.min(np.linalg.eigvalsh((c + c.conj().T) / 2)))


def is_cp(s: Superoperator, tol: float = TOL) -> bool:
    return choi_min_eigenvalue(s) >= -tol


def is_unital(s: Superoperator, tol: float = TOL) -> bool:
    return float(np.max(np.abs(s(np.eye(s.d_in)) - np.eye(s.d_out)))) <= tol


def max_abs_difference(a: Superoperator, b: Superoperator) -> float:
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        raise DimensionMismatch("superoperators act between different spaces")
    return float(np.max(np.abs(a.matrix - b.matrix)))


def verify_factorization(gamma: Superoperator, lam: Superoperator, phi: Superoperator,
                         tol: float = TOL) -> bool:
    """``gamma == lam o phi`` entrywise within ``tol``, with ``phi`` unital and CP."""
    if phi.d_out != lam.d_in or gamma.d_in != phi.d_in or gamma.d_out != lam.d_out:
        raise DimensionMismatch("dimension chain gamma = lam o phi does not match")
    return (max_abs_difference(compose(lam, phi), gamma) <= tol
            and is_cp(phi) and is_unital(phi))


def qc_channel(m: QuantumEvm) -> Superoperator:
    """``a -> sum_j <j|a|j> M(j)`` from the outcome register to the system."""
    effects = [g_to_numpy(e) for e in m.effects]
    k = len(effects)
    return superop_from_function(lambda a: sum(a[j, j] * effects[j] for j in range(k)), k, m.dim)


def markov_channel(p: MarkovMatrix) -> Superoperator:
    """Classical relabeling ``a -> sum_k (sum_j p(j|k) a_jj) |k><k|``.

    Maps observables on the ``m``-outcome register to the ``n``-outcome one,
    so that ``qc_channel(N) o markov_channel(p) = qc_channel(M)`` whenever
    ``M(j) = sum_k p(j|k) N(k)``.
    """
    P = np.array([[float(x) for x in row] for row in p.entries])
    m, n = P.shape
    return superop_from_function(lambda a: np.diag(P.T @ np.diag(a)), m, n)


def entangled_basis(d: int) -> list:
    """Vectors ``eta_{k,m} = d^{-1/2} sum_j w^{jm} xi_j (x) e_{j+k}``, ordered ``k * d + m``."""
    if d < 1:
        raise ValidationError("dimension must be >= 1")
    out = []
    for k in range(d):
        for m in range(d):
            v = np.zeros(d * d, dtype=complex)
            for j in range(d):
                v[j * d + (j + k) % d] += np.exp(2j * np.pi * j * m / d) / np.sqrt(d)
            out.append(v)
    return out


def bell_projector_povm(d: int) -> list:
    return [np.outer(v, v.conj()) for v in entangled_basis(d)]


def phi_from_blocks(mt: Sequence, d: int, tol: float = TOL) -> Superoperator:
    """Channel ``B(C^d) -> B(J)`` assembled from a ``d^2``-outcome POVM on ``J (x) C^d``.

    ``mt[k * d + m]`` is the effect for outcome ``(k, m)``; its ``C^d`` blocks
    are ``M^{(k,m)}_{j,j'}`` and
    ``Phi(|j><j'|) = (1/d) sum_{k,m} w^{(j'-j) m} M^{(k,m)}_{j+k, j'+k}``.
    """
    mt = [np.asarray(x, dtype=complex) for x in mt]
    if len(mt) != d * d:
        raise DimensionMismatch(f"expected {d * d} effects, got {len(mt)}")
    side = mt[0].shape[0]
    if side % d or any(x.shape != (side, side) for x in mt):
        raise DimensionMismatch("effects must be square with size divisible by d")
    dJ = side // d
    total = sum(mt)
    if np.max(np.abs(total - np.eye(side))) > tol:
        raise ValidationError("block POVM is not complete")
    for x in mt:
        if np.max(np.abs(x - x.conj().T)) > tol or np.min(np.linalg.eigvalsh((x + x.conj().T) / 2)) < -tol:
            raise ValidationError("block POVM has a non-positive effect")
    blocks = [x.reshape(dJ, d, dJ, d) for x in mt]

    images = {}
    for j in range(d):
        for jp in range(d):
            acc = np.zeros((dJ, dJ), dtype=complex)
            for k in range(d):
                for m in range(d):
                    phase = np.exp(2j * np.pi * (jp - j) * m / d)
                    acc += phase * blocks[k * d + m][:, (j + k) % d, :, (jp + k) % d]
            images[j, jp] = acc / d

    cols = []
    for jp in range(d):
        for j in range(d):
            cols.append(vec(images[j, jp]))
    return Superoperator(d, dJ, np.stack(cols, axis=1))


def block_povm_from_channel(psi: Superoperator) -> list:
    """``(psi (x) id_d)(|eta_{k,m}><eta_{k,m}|)`` for the entangled basis of ``C^d (x) C^d``."""
    d = psi.d_in
    lifted = tensor_with_identity(psi, d)
    return [lifted(proj) for proj in bell_projector_povm(d)]


def helstrom_binary(members: Sequence, gamma: Superoperator | None = None) -> float:
    """Optimal two-state discrimination ``(tr r0 + tr r1 + ||r0 - r1||_1) / 2``.

    With ``gamma`` the members are first pushed through its predual.
    Accuracy is that of ``eigvalsh`` (absolute error ~1e-15 for unit trace).
    """
    if isinstance(members, QuantumEnsemble):
        members = members.members
    mats = [g_to_numpy(m) if isinstance(m, tuple) else np.asarray(m, dtype=complex) for m in members]
    if len(mats) != 2:
        raise ValidationError(f"binary discrimination needs exactly 2 members, got {len(mats)}")
    if gamma is not None:
        mats = [gamma.predual(r) for r in mats]
    r0, r1 = mats
    return float((np.trace(r0).real + np.trace(r1).real + trace_norm_float(r0 - r1)) / 2)
