"""The mixed-dimensional space R^inf = union of R^n.

Vectors of different lengths are compared by blowing both up to the least
common multiple of their lengths (Kronecker product with a ones vector).
The inner product is normalized by that common length, so ``x`` and
``x (x) 1_k`` have the same norm and are equivalent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionOverflowError, ShapeError

EPS_EQ = 1e-9
_INT64_MAX = 2**63 - 1


def lcm(p: int, q: int) -> int:
    """Least common multiple with a 64-bit overflow check."""
    t = math.lcm(int(p), int(q))
    if t > _INT64_MAX:
        raise DimensionOverflowError(f"lcm({p}, {q}) exceeds the 64-bit range")
    return t


@dataclass(frozen=True, eq=False)
class DimVector:
    """A real vector together with its dimension."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float).reshape(-1)
        if a.size < 1:
            raise ShapeError("DimVector needs at least one entry")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def of(cls, x) -> "DimVector":
        return x if isinstance(x, cls) else cls(x)

    @property
    def dim(self) -> int:
        return self.entries.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __len__(self):
        return self.dim

    def __neg__(self):
        return DimVector(-self.entries)

    def __mul__(self, s):
        return DimVector(self.entries * float(s))

    __rmul__ = __mul__

    def __add__(self, other):
        return stp_add(self, other)

    def __sub__(self, other):
        return stp_add(self, -DimVector.of(other))

    def blow_up(self, k: int) -> "DimVector":
        """``x (x) 1_k``."""
        return DimVector(np.repeat(self.entries, k))

    def __repr__(self):
        return f"DimVector({self.entries.tolist()})"


def _pair(x, y):
    x, y = DimVector.of(x), DimVector.of(y)
    t = lcm(x.dim, y.dim)
    return np.repeat(x.entries, t // x.dim), np.repeat(y.entries, t // y.dim), t


def stp_add(x, y) -> DimVector:
    """Semi-tensor addition: both vectors blown up to ``lcm`` then added."""
    a, b, _ = _pair(x, y)
    return DimVector(a + b)


def inner(x, y) -> float:
    a, b, t = _pair(x, y)
    return float(a @ b) / t


def norm(x) -> float:
    return math.sqrt(max(inner(x, x), 0.0))


def distance(x, y) -> float:
    return norm(stp_add(x, -DimVector.of(y)))


def equivalent(x, y, eps: float = EPS_EQ) -> bool:
    return distance(x, y) <= eps


def _overlap_counts(n: int, m: int) -> np.ndarray:
    """``(I_n (x) 1^T_{t/n}) (I_m (x) 1_{t/m})`` as an integer n x m matrix."""
    t = lcm(n, m)
    left = np.kron(np.eye(n, dtype=np.int64), np.ones((1, t // n), dtype=np.int64))
    right = np.kron(np.eye(m, dtype=np.int64), np.ones((t // m, 1), dtype=np.int64))
    return left @ right


def projection_matrix(m: int, n: int, exact: bool = False) -> np.ndarray:
    """The n x m matrix projecting R^m onto R^n in the ``||.||_V`` sense.

    With ``t = lcm(m, n)`` the result is ``(n/t) (I_n (x) 1^T_{t/n}) (I_m (x) 1_{t/m})``.
    ``exact=True`` returns Fractions.
    """
    if m < 1 or n < 1:
        raise ShapeError(f"projection_matrix needs positive dimensions, got ({m}, {n})")
    t = lcm(m, n)
    counts = _overlap_counts(n, m)
    if exact:
        scale = Fraction(n, t)
        out = np.empty(counts.shape, dtype=object)
        for idx, c in np.ndenumerate(counts):
            out[idx] = scale * int(c)
        return out
    return counts * (n / t)


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """``projection_matrix`` bundled with its source and target dimensions."""

    m: int
    n: int
    matrix: np.ndarray

    @classmethod
    def build(cls, m: int, n: int, exact: bool = False) -> "ProjectionMatrix":
        return cls(m, n, projection_matrix(m, n, exact=exact))

    def __call__(self, xi) -> DimVector:
        xi = DimVector.of(xi)
        if xi.dim != self.m:
            raise ShapeError(f"expected a vector of dimension {self.m}, got {xi.dim}")
        return DimVector(np.asarray(self.matrix, dtype=float) @ xi.entries)


def project(xi, n: int) -> DimVector:
    """Closest point of R^n to ``xi`` under the normalized distance."""
    xi = DimVector.of(xi)
    return DimVector(projection_matrix(xi.dim, n) @ xi.entries)
