"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Gaussian rationals are pairs of fractions.  Matrices are
plain nested tuples, row-major.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, CertificateError, ValidationError

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def Q(value: RationalLike) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected; every decision in this package is exact.
    """
    if isinstance(value, bool):
        raise ValidationError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {value!r}") from exc
    raise ValidationError(f"not an exact rational: {value!r} ({type(value).__name__})")


def format_rational(q: Fraction) -> str:
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Q(self.re))
        object.__setattr__(self, "im", Q(self.im))

    @staticmethod
    def of(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, dict):
            return GaussianRational(Q(value.get("re", 0)), Q(value.get("im", 0)))
        return GaussianRational(Q(value), Fraction(0))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __eq__(self, other):
        try:
            o = GaussianRational.of(other)
        except ValidationError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}+{self.im}i)"


G = GaussianRational
GaussianMatrix = tuple  # tuple[tuple[GaussianRational, ...], ...]
RationalMatrix = tuple  # tuple[tuple[Fraction, ...], ...]


def gmatrix(rows) -> GaussianMatrix:
    """Build a square-or-rectangular Gaussian-rational matrix from nested data."""
    out = tuple(tuple(GaussianRational.of(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionMismatch("ragged matrix")
    return out


def g_identity(n: int) -> GaussianMatrix:
    return tuple(tuple(G(1 if i == j else 0) for j in range(n)) for i in range(n))


def g_zeros(n: int) -> GaussianMatrix:
    return tuple(tuple(G() for _ in range(n)) for _ in range(n))


def g_add(a: GaussianMatrix, b: GaussianMatrix) -> GaussianMatrix:
    _check_same_shape(a, b)
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def g_scale(c, a: GaussianMatrix) -> GaussianMatrix:
    c = GaussianRational.of(c)
    return tuple(tuple(c * x for x in row) for row in a)


def g_matmul(a: GaussianMatrix, b: GaussianMatrix) -> GaussianMatrix:
    if len(a[0]) != len(b):
        raise DimensionMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), G()) for col in cols) for row in a)


def g_dagger(a: GaussianMatrix) -> GaussianMatrix:
    return tuple(tuple(x.conjugate() for x in col) for col in zip(*a))


def g_trace(a: GaussianMatrix) -> GaussianRational:
    return sum((a[i][i] for i in range(len(a))), G())


def g_to_numpy(a: GaussianMatrix) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in a], dtype=complex)


def is_hermitian_exact(a: GaussianMatrix) -> bool:
    n = len(a)
    if any(len(row) != n for row in a):
        return False
    return all(a[i][j] == a[j][i].conjugate() for i in range(n) for j in range(i, n))


def _check_same_shape(a, b):
    if len(a) != len(b) or any(len(x) != len(y) for x, y in zip(a, b)):
        raise DimensionMismatch("matrix shapes differ")


# ---------------------------------------------------------------------------
# LP feasibility

@dataclass(frozen=True)
class LpProblem:
    """Feasibility of ``A x = b, x >= 0`` over the rationals."""

    A: tuple
    b: tuple
    num_vars: int

    @staticmethod
    def build(A: Sequence[Sequence[RationalLike]], b: Sequence[RationalLike],
              num_vars: int | None = None) -> "LpProblem":
        A = tuple(tuple(Q(x) for x in row) for row in A)
        b = tuple(Q(x) for x in b)
        if num_vars is None:
            num_vars = len(A[0]) if A else 0
        if len(A) != len(b):
            raise DimensionMismatch(f"A has {len(A)} rows but b has length {len(b)}")
        for i, row in enumerate(A):
            if len(row) != num_vars:
                raise DimensionMismatch(f"row {i} of A has {len(row)} entries, expected {num_vars}")
        return LpProblem(A, b, num_vars)


@dataclass(frozen=True)
class FarkasCertificate:
    """``y`` with ``y^T A <= 0`` and ``y^T b > 0``."""

    y: tuple

    def check(self, p: LpProblem) -> bool:
        if len(self.y) != len(p.b):
            return False
        for j in range(p.num_vars):
            if sum(self.y[i] * p.A[i][j] for i in range(len(p.b))) > 0:
                return False
        return sum(yi * bi for yi, bi in zip(self.y, p.b)) > 0


@dataclass(frozen=True)
class Feasible:
    x: tuple

    def check(self, p: LpProblem) -> bool:
        if len(self.x) != p.num_vars or any(v < 0 for v in self.x):
            return False
        return all(sum(a * v for a, v in zip(row, self.x)) == bi for row, bi in zip(p.A, p.b))


@dataclass(frozen=True)
class Infeasible:
    certificate: FarkasCertificate

    def check(self, p: LpProblem) -> bool:
        return self.certificate.check(p)


def lp_feasible(p: LpProblem) -> Feasible | Infeasible:
    """Decide ``A x = b, x >= 0`` with a phase-one simplex (Bland's rule).

    Returns a feasible point or a Farkas certificate read off the final
    basis; both are re-verified exactly before returning.
    """
    if not isinstance(p, LpProblem):
        raise TypeError("expected an LpProblem")
    m, n = len(p.b), p.num_vars
    if m == 0:
        result = Feasible(tuple(Fraction(0) for _ in range(n)))
        return result

    sign = [(-1 if bi < 0 else 1) for bi in p.b]
    width = n + m
    # tableau rows: [A' | I | b']
    T = []
    for i in range(m):
        row = [sign[i] * a for a in p.A[i]]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        row.append(sign[i] * p.b[i])
        T.append(row)
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m

    # reduced costs r_j = c_j - sum_i c_B[i] T[i][j]; last entry tracks -objective
    red = cost[:] + [Fraction(0)]
    for i in range(m):
        for j in range(width + 1):
            red[j] -= T[i][j]

    while True:
        entering = next((j for j in range(width) if red[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][width] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # cannot happen in phase one: objective is bounded below by 0
            raise CertificateError("phase-one simplex reported unboundedness")
        r = best[1]
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            if i != r and T[i][entering] != 0:
                f = T[i][entering]
                Ti, Tr = T[i], T[r]
                T[i] = [a - f * b for a, b in zip(Ti, Tr)]
        f = red[entering]
        red = [a - f * b for a, b in zip(red, T[r])]
        basis[r] = entering

    objective = -red[width]
    if objective == 0:
        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = T[i][width]
        result = Feasible(tuple(x))
    else:
        # artificial column i has reduced cost 1 - y'_i
        y = tuple(sign[i] * (1 - red[n + i]) for i in range(m))
        result = Infeasible(FarkasCertificate(y))
    if not result.check(p):
        raise CertificateError(f"{type(result).__name__} result failed exact verification")
    return result


# ---------------------------------------------------------------------------
# PSD tests

def char_poly_coefficients(h: GaussianMatrix) -> list:
    """Coefficients c_0..c_n of det(lambda I - h) via Faddeev-LeVerrier."""
    n = len(h)
    coeffs = [G()] * (n + 1)
    coeffs[n] = G(1)
    Mk = g_zeros(n)
    ident = g_identity(n)
    for k in range(1, n + 1):
        Mk = g_add(g_matmul(h, Mk), g_scale(coeffs[n - k + 1], ident))
        coeffs[n - k] = g_trace(g_matmul(h, Mk)) * G(Fraction(-1, k))
    return coeffs


def psd_exact(h) -> bool:
    """Exact positive-semidefiniteness test for a Hermitian Gaussian-rational matrix.

    With det(lambda I - h) = lambda^n - e1 lambda^(n-1) + e2 lambda^(n-2) - ...,
    the e_k are elementary symmetric functions of the (real) spectrum, and
    h is PSD iff every e_k >= 0.
    """
    h = gmatrix(h)
    if not is_hermitian_exact(h):
        raise ValidationError("psd_exact requires a Hermitian matrix")
    n = len(h)
    if n == 0:
        return True
    coeffs = char_poly_coefficients(h)
    for k in range(1, n + 1):
        c = coeffs[n - k]
        if c.im != 0:
            raise CertificateError("characteristic polynomial of a Hermitian matrix is not real")
        e_k = c.re if k % 2 == 0 else -c.re
        if e_k < 0:
            return False
    return True


def trace_norm_float(h, tol: float = 1e-9) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix (LAPACK ``eigvalsh``).

    ``eigvalsh`` is backward stable, so the result carries an absolute error
    of order ``n * eps * ||h||``.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("trace norm needs a square matrix")
    if h.size and np.max(np.abs(h - h.conj().T)) > tol:
        raise ValidationError("matrix is not Hermitian within tolerance")
    return float(np.sum(np.abs(np.linalg.eigvalsh((h + h.conj().T) / 2))))
