"""Dense univariate polynomials over two numeric backends.

A polynomial is a coefficient vector (index i = coefficient of x**i) over
either exact rationals (``fractions.Fraction`` / ``int``) or float64.  The
exact backend never rounds, which is what the adversarial constructions and
small-scale ground-truth checks need; the float backend is for large sweeps.

Sign convention: sign(0) = +1 everywhere, with no tolerance band.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

EXACT = "exact"
FLOAT = "float"

Scalar = Union[int, Fraction, float]
SignPattern = tuple[int, ...]


class DuplicateRoots(ValueError):
    """Raised when a root list contains a repeated value."""


class BackendMismatch(TypeError):
    """Raised when exact and float values would silently mix."""


def sign_of(value) -> int:
    """Sign in {-1, +1} with sign(0) = +1."""
    return -1 if value < 0 else 1


def _is_exact(value) -> bool:
    return isinstance(value, Rational)  # int and Fraction, not float


class Polynomial:
    """Immutable dense polynomial tagged with its numeric backend.

    ``coeffs`` has trailing zeros stripped, so the last entry is the leading
    coefficient unless the polynomial is identically zero (empty tuple,
    degree -1).
    """

    __slots__ = ("coeffs", "backend")

    def __init__(self, coeffs: Iterable[Scalar], backend: str | None = None):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if backend is None:
            backend = EXACT if all(_is_exact(c) for c in coeffs) else FLOAT
        if backend == EXACT:
            if not all(_is_exact(c) for c in coeffs):
                raise BackendMismatch("exact polynomial given non-rational coefficients")
        elif backend == FLOAT:
            coeffs = [float(c) for c in coeffs]
        else:
            raise ValueError(f"unknown backend {backend!r}")
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @property
    def degree(self) -> int:
        """Highest index with a nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check_point(self, x):
        if self.backend == EXACT:
            if not _is_exact(x):
                raise BackendMismatch("exact polynomial evaluated at non-rational point")
            return x
        return float(x)

    def eval(self, x: Scalar):
        """Horner evaluation of p(x) in the polynomial's own backend."""
        x = self._check_point(x)
        acc = 0 if self.backend == EXACT else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized Horner evaluation (float backend only)."""
        if self.backend != FLOAT:
            raise BackendMismatch("eval_many requires the float backend")
        if not self.coeffs:
            return np.zeros(len(xs))
        return np.polynomial.polynomial.polyval(xs, np.asarray(self.coeffs))

    def eval_sign(self, x: Scalar) -> int:
        return sign_of(self.eval(x))

    def eval_sign_many(self, xs: np.ndarray) -> np.ndarray:
        vals = self.eval_many(xs)
        return np.where(vals < 0, -1, 1).astype(np.int8)

    def derivative(self, order: int = 1) -> "Polynomial":
        """Formal derivative applied ``order`` times (order 0 returns self)."""
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if order == 0:
            return self
        coeffs = self.coeffs
        for _ in range(order):
            if len(coeffs) <= 1:
                coeffs = ()
                break
            coeffs = tuple(i * coeffs[i] for i in range(1, len(coeffs)))
        return Polynomial(coeffs, backend=self.backend)

    def __mul__(self, scalar):
        return Polynomial([scalar * c for c in self.coeffs], backend=self.backend)

    __rmul__ = __mul__

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.backend != other.backend:
            raise BackendMismatch("cannot add polynomials of different backends")
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out, backend=self.backend)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.backend == other.backend
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.backend, self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r}, backend={self.backend!r})"

    def to_float(self) -> "Polynomial":
        return Polynomial([float(c) for c in self.coeffs], backend=FLOAT)

    def to_json(self) -> dict:
        if self.backend == EXACT:
            coeffs = [f"{Fraction(c).numerator}/{Fraction(c).denominator}" for c in self.coeffs]
        else:
            coeffs = list(self.coeffs)
        return {"coeffs": coeffs, "backend": self.backend}

    @classmethod
    def from_json(cls, obj: dict) -> "Polynomial":
        backend = obj["backend"]
        if backend == EXACT:
            coeffs = [Fraction(c) for c in obj["coeffs"]]
        else:
            coeffs = [float(c) for c in obj["coeffs"]]
        return cls(coeffs, backend=backend)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> "Polynomial":
        return cls.from_json(json.loads(text))


def from_roots(roots: Sequence[Scalar], leading: int = 1, backend: str | None = None) -> Polynomial:
    """Expand ``leading * prod(x - r_i)`` to a coefficient vector.

    Roots must be pairwise distinct (the constructions this feeds require
    simple roots); equality is checked exactly, with no tolerance.
    """
    if leading not in (-1, 1):
        raise ValueError("leading sign must be -1 or +1")
    roots = sorted(roots)
    for a, b in zip(roots, roots[1:]):
        if a == b:
            raise DuplicateRoots(f"repeated root {a!r}")
    if backend is None:
        backend = EXACT if all(_is_exact(r) for r in roots) else FLOAT
    one = 1 if backend == EXACT else 1.0
    coeffs = [one]
    for r in roots:
        r = r if backend == EXACT else float(r)
        nxt = [0 * one] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += -r * c
            nxt[i + 1] += c
        coeffs = nxt
    if leading < 0:
        coeffs = [-c for c in coeffs]
    return Polynomial(coeffs, backend=backend)


def sign_pattern(p: Polynomial, x: Scalar, d: int) -> SignPattern:
    """Signs of p and its first d derivatives at x, as a (d+1)-tuple."""
    if p.degree > d:
        raise ValueError(f"polynomial degree {p.degree} exceeds ambient bound {d}")
    out = []
    q = p
    for _ in range(d + 1):
        out.append(q.eval_sign(x))
        q = q.derivative()
    return tuple(out)
