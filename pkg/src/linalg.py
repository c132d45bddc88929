"""Exact linear algebra over QQ or GF(p) on top of sympy's DomainMatrix."""

import logging
import random
from dataclasses import dataclass
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix

from .errors import StringAlgebraError

logger = logging.getLogger(__name__)

Vector = Tuple[Any, ...]


class ExactField:
    """The coefficient field of a session: the rationals or a prime field."""

    def __init__(self, characteristic: Optional[int] = None):
        """Initialize the field.
        Args:
            characteristic: None for QQ, a prime p for GF(p)
        """
        self.characteristic = characteristic
        self.domain = QQ if characteristic is None else GF(characteristic)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactField) and other.characteristic == self.characteristic

    def __hash__(self) -> int:
        return hash(("ExactField", self.characteristic))

    def __repr__(self) -> str:
        return f"ExactField({self.name})"

    @property
    def name(self) -> str:
        return "QQ" if self.characteristic is None else f"GF({self.characteristic})"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __call__(self, value: Any):
        if isinstance(value, str):
            return self.parse(value)
        return self.domain(int(value))

    def parse(self, text: str):
        """Parse an integer or fraction like ``-3/4``.

        Raises:
            StringAlgebraError: If the text is not a rational number or its denominator vanishes mod p
        """
        try:
            r = sympy.Rational(text.strip())
        except (TypeError, ValueError, sympy.SympifyError) as e:
            raise StringAlgebraError(f"Error parsing scalar {text!r}: {str(e)}")
        num, den = int(r.p), int(r.q)
        if self.characteristic is None:
            return QQ(num, den)
        if den % self.characteristic == 0:
            raise StringAlgebraError(f"Scalar {text} is undefined over {self.name}")
        return self.domain(num) / self.domain(den)

    def format(self, x) -> str:
        if self.characteristic is None:
            return str(self.domain.to_sympy(x))
        return str(int(self.domain.to_int(x)) % self.characteristic)

    def is_zero(self, x) -> bool:
        return x == self.domain.zero

    def is_zero_vector(self, v: Sequence) -> bool:
        return all(self.is_zero(x) for x in v)

    def random_element(self, rng: random.Random, bound: int = 3):
        return self.domain(rng.randint(-bound, bound))

    def random_nonzero(self, rng: random.Random, bound: int = 3):
        while True:
            x = self.random_element(rng, bound)
            if not self.is_zero(x):
                return x

    def lambda_values(self, samples: Iterable[int]) -> List[Any]:
        """Nonzero field elements for the given integer samples, duplicates removed."""
        values = []
        for sample in samples:
            x = self.domain(int(sample))
            if not self.is_zero(x) and x not in values:
                values.append(x)
        return values

    # vectors

    def zero_vector(self, n: int) -> Vector:
        return tuple(self.zero for _ in range(n))

    def unit_vector(self, n: int, i: int) -> Vector:
        return tuple(self.one if j == i else self.zero for j in range(n))

    def add(self, v: Sequence, w: Sequence) -> Vector:
        return tuple(a + b for a, b in zip(v, w))

    def sub(self, v: Sequence, w: Sequence) -> Vector:
        return tuple(a - b for a, b in zip(v, w))

    def scale(self, c, v: Sequence) -> Vector:
        return tuple(c * a for a in v)

    # matrices

    def matrix(self, rows: Sequence[Sequence], nrows: int, ncols: int) -> DomainMatrix:
        if nrows == 0 or ncols == 0:
            return DomainMatrix.zeros((nrows, ncols), self.domain)
        return DomainMatrix([list(row) for row in rows], (nrows, ncols), self.domain)

    def zeros(self, nrows: int, ncols: int) -> DomainMatrix:
        return DomainMatrix.zeros((nrows, ncols), self.domain)

    def identity(self, n: int) -> DomainMatrix:
        if n == 0:
            return self.zeros(0, 0)
        return DomainMatrix.eye(n, self.domain)

    def rows_of(self, A: DomainMatrix) -> List[Vector]:
        nrows, ncols = A.shape
        if nrows == 0:
            return []
        if ncols == 0:
            return [() for _ in range(nrows)]
        return [tuple(row) for row in A.to_list()]

    def matmul(self, A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
        (m, k), (k2, n) = A.shape, B.shape
        if k != k2:
            raise StringAlgebraError(f"Matrix shapes {A.shape} and {B.shape} do not compose")
        if m == 0 or n == 0 or k == 0:
            return self.zeros(m, n)
        return A.matmul(B)

    def apply(self, A: DomainMatrix, v: Sequence) -> Vector:
        """The column-vector product ``A v``."""
        m, n = A.shape
        if m == 0:
            return ()
        if n == 0:
            return self.zero_vector(m)
        column = self.matrix([[x] for x in v], n, 1)
        return tuple(row[0] for row in A.matmul(column).to_list())

    def matrices_equal(self, A: DomainMatrix, B: DomainMatrix) -> bool:
        return A.shape == B.shape and self.rows_of(A) == self.rows_of(B)

    # elimination

    def rref_rows(self, rows: Iterable[Sequence], ncols: int) -> List[Vector]:
        """Nonzero rows of the reduced row echelon form of the given rows."""
        rows = [list(row) for row in rows if not self.is_zero_vector(row)]
        if not rows or ncols == 0:
            return []
        reduced, pivots = self.matrix(rows, len(rows), ncols).rref()
        return [tuple(row) for row in reduced.to_list()[:len(pivots)]]

    def rank(self, rows: Iterable[Sequence], ncols: int) -> int:
        return len(self.rref_rows(rows, ncols))

    def nullspace(self, rows: Iterable[Sequence], ncols: int) -> List[Vector]:
        """A basis of ``{x : R x = 0}``."""
        if ncols == 0:
            return []
        rows = [list(row) for row in rows if not self.is_zero_vector(row)]
        if not rows:
            return [self.unit_vector(ncols, i) for i in range(ncols)]
        null = self.matrix(rows, len(rows), ncols).nullspace()
        return [tuple(row) for row in self.rows_of(null) if not self.is_zero_vector(row)]

    def solve(self, rows: Sequence[Sequence], ncols: int, rhs: Sequence) -> Optional[Vector]:
        """One solution of ``R x = rhs``, or None."""
        if not rows:
            return self.zero_vector(ncols)
        augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
        for vector in self.nullspace(augmented, ncols + 1):
            t = vector[-1]
            if not self.is_zero(t):
                return tuple(-x / t for x in vector[:-1])
        return None


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``K^n`` stored by its reduced row echelon basis."""

    field: ExactField
    ambient: int
    basis: Tuple[Vector, ...] = ()

    @classmethod
    def span(cls, field: ExactField, ambient: int, vectors: Iterable[Sequence]) -> "Subspace":
        return cls(field, ambient, tuple(field.rref_rows(vectors, ambient)))

    @classmethod
    def zero(cls, field: ExactField, ambient: int) -> "Subspace":
        return cls(field, ambient, ())

    @classmethod
    def full(cls, field: ExactField, ambient: int) -> "Subspace":
        return cls(field, ambient, tuple(field.unit_vector(ambient, i) for i in range(ambient)))

    @classmethod
    def solutions(cls, field: ExactField, ambient: int, equations: Iterable[Sequence]) -> "Subspace":
        """The subspace cut out by the linear forms in ``equations``."""
        return cls.span(field, ambient, field.nullspace(list(equations), ambient))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def equations(self) -> List[Vector]:
        """Linear forms whose common kernel is this subspace."""
        if not self.basis:
            return [self.field.unit_vector(self.ambient, i) for i in range(self.ambient)]
        return self.field.nullspace(self.basis, self.ambient)

    def contains(self, v: Sequence) -> bool:
        if self.field.is_zero_vector(v):
            return True
        return self.field.rank(list(self.basis) + [v], self.ambient) == self.dim

    def __contains__(self, v: Sequence) -> bool:
        return self.contains(v)

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __le__(self, other: "Subspace") -> bool:
        return self.issubspace(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.field, self.ambient, list(self.basis) + list(other.basis))

    def __and__(self, other: "Subspace") -> "Subspace":
        if self.is_full():
            return other
        if other.is_full():
            return self
        return Subspace.solutions(self.field, self.ambient, self.equations() + other.equations())

    def image(self, A: DomainMatrix) -> "Subspace":
        """``A`` applied to this subspace; ``A`` has shape (m, ambient)."""
        m = A.shape[0]
        return Subspace.span(self.field, m, [self.field.apply(A, v) for v in self.basis])

    def preimage(self, A: DomainMatrix) -> "Subspace":
        """``{x : A x in self}``; ``A`` has shape (ambient, n)."""
        n = A.shape[1]
        if self.is_full():
            return Subspace.full(self.field, n)
        forms = self.equations()
        Q = self.field.matrix(forms, len(forms), self.ambient)
        return Subspace.solutions(self.field, n, self.field.rows_of(self.field.matmul(Q, A)))

    def decompose(self, other: "Subspace", v: Sequence) -> Optional[Tuple[Vector, Vector]]:
        """Split ``v = s + t`` with s in self and t in other, or None if v is not in the sum."""
        generators = list(self.basis) + list(other.basis)
        if not generators:
            return (v, self.field.zero_vector(self.ambient)) if self.field.is_zero_vector(v) else None
        columns = [[g[i] for g in generators] for i in range(self.ambient)]
        coefficients = self.field.solve(columns, len(generators), v)
        if coefficients is None:
            return None
        s = self.field.zero_vector(self.ambient)
        for c, g in zip(coefficients[:self.dim], self.basis):
            s = self.field.add(s, self.field.scale(c, g))
        return s, self.field.sub(v, s)

    def coordinates(self, v: Sequence) -> Optional[Vector]:
        """Coefficients of ``v`` along the stored basis, or None if v is outside."""
        if not self.basis:
            return () if self.field.is_zero_vector(v) else None
        columns = [[b[i] for b in self.basis] for i in range(self.ambient)]
        return self.field.solve(columns, self.dim, v)
