"""Exact scalar arithmetic: prime fields GF(p) and the rational field.

Matrices elsewhere in the package store raw entries (machine integers for
GF(p), `fractions.Fraction` for the rationals) inside numpy arrays; the
field object owns reduction, inversion and coercion so that every
operation stays exact.  Prime field products are computed in 64-bit
integers, which is safe for p up to 2^31; longer accumulations are
chunked in :meth:`PrimeField.matmul`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DivisionByZero, FieldMismatch

PRIME_CAP = 1 << 31


def is_prime(n: int) -> bool:
    """Trial-division primality test, adequate for p <= 2^31."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """GF(p); elements are plain integers reduced into [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not (2 <= p <= PRIME_CAP) or not is_prime(p):
            raise ValueError(f"p must be a prime in [2, 2^31], got {p!r}")
        self.p = p

    # -- identity ---------------------------------------------------------
    @property
    def name(self) -> str:
        return f"GF({self.p})"

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    # -- scalar operations ------------------------------------------------
    zero = 0
    one = 1

    def coerce(self, x) -> int:
        if isinstance(x, (bool, float)):
            raise TypeError(f"not a GF({self.p}) element: {x!r}")
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        raise TypeError(f"not a GF({self.p}) element: {x!r}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a = int(a) % self.p
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.p})")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    # -- array support ------------------------------------------------------
    dtype = np.int64

    def array(self, data) -> np.ndarray:
        a = np.asarray(data, dtype=np.int64)
        return a % self.p

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def normalize(self, a: np.ndarray) -> np.ndarray:
        return a % self.p

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        inner = a.shape[-1]
        if inner == 0:
            return np.zeros((a.shape[0], b.shape[-1]), dtype=np.int64)
        # keep partial sums below 2^62: inner * (p-1)^2 must fit
        limit = (1 << 62) // max((self.p - 1) ** 2, 1)
        if inner <= limit:
            return (a @ b) % self.p
        acc = np.zeros((a.shape[0], b.shape[-1]), dtype=np.int64)
        step = max(1, limit)
        for k in range(0, inner, step):
            acc = (acc + a[:, k : k + step] @ b[k : k + step, :]) % self.p
        return acc

    def elements(self):
        return range(self.p)


class RationalField:
    """The field of rational numbers; elements are `Fraction` values."""

    __slots__ = ()

    @property
    def name(self) -> str:
        return "Q"

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x) -> Fraction:
        if isinstance(x, bool) or isinstance(x, float):
            raise TypeError(f"not an exact rational: {x!r}")
        if isinstance(x, (int, np.integer)):
            return Fraction(int(x))
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"not an exact rational: {x!r}")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("0 has no inverse in Q")
        return 1 / Fraction(a)

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero("division by zero in Q")
        return Fraction(a) / Fraction(b)

    dtype = object

    def array(self, data) -> np.ndarray:
        a = np.empty(np.shape(data), dtype=object)
        flat = a.reshape(-1)
        src = np.asarray(data, dtype=object).reshape(-1)
        for i, x in enumerate(src):
            flat[i] = self.coerce(x)
        return a

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.full((rows, cols), Fraction(0), dtype=object)

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = Fraction(1)
        return a

    def normalize(self, a: np.ndarray) -> np.ndarray:
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[-1] == 0:
            return self.zeros(a.shape[0], b.shape[-1])
        return np.dot(a, b)


QQ = RationalField()

_GF_RE = re.compile(r"^GF\((\d+)\)$")


def field_from_name(name: str):
    """Parse the serialized field name: ``"GF(p)"`` or ``"Q"``."""
    if name == "Q":
        return QQ
    m = _GF_RE.match(name)
    if m:
        return PrimeField(int(m.group(1)))
    raise ValueError(f"unknown field name {name!r}")


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field, for checked arithmetic."""

    field: object
    value: object

    @classmethod
    def of(cls, field, value) -> "Scalar":
        return cls(field, field.coerce(value))

    def _same(self, other):
        if not isinstance(other, Scalar) or other.field != self.field:
            raise FieldMismatch(f"{self!r} and {other!r} are not over the same field")
        return other

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._same(other).value))

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._same(other).value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._same(other).value))

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._same(other).value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __repr__(self):
        return f"{self.value}:{self.field.name}"


def field_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Checked scalar arithmetic; op is one of add/sub/mul/div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
