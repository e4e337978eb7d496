"""Step-2 free-nilpotent Lie algebras with k generators.

The algebra has dimension k(k+1)/2 and splits into a first layer spanned by
generators X_1..X_k and a second layer spanned by X_ij for 1 <= i < j <= k.
The only nonzero brackets among basis elements are [X_i, X_j] = X_ij for
i < j; second-layer elements are central.

Coefficient vectors and coordinate arrays use the basis order

    X_1, ..., X_k, X_12, X_13, ..., X_1k, X_23, ..., X_(k-1)k

i.e. the pairs run lexicographically.  All public indices are 1-based to
match the usual double-subscript notation; flat array offsets are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_GENERATORS = 12


@dataclass(frozen=True)
class AlgebraShape:
    """Dimensions and index bookkeeping for the algebra with k generators."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)):
            raise TypeError(f"k must be an integer, got {type(self.k).__name__}")
        if self.k < 2:
            raise ValueError(f"need at least 2 generators, got k={self.k}")
        if self.k > MAX_GENERATORS:
            raise ValueError(
                f"k={self.k} exceeds the supported ceiling of {MAX_GENERATORS} "
                f"generators (dimension {MAX_GENERATORS * (MAX_GENERATORS + 1) // 2})"
            )

    @property
    def dim_first(self) -> int:
        return self.k

    @property
    def dim_second(self) -> int:
        return self.k * (self.k - 1) // 2

    @property
    def dim_total(self) -> int:
        return self.k * (self.k + 1) // 2

    def pair_index(self, i: int, j: int) -> int:
        """Flat 0-based offset of the pair (i, j), i < j, into the second layer."""
        return pair_index(self.k, i, j)

    def pair_unindex(self, idx: int) -> tuple[int, int]:
        """Inverse of pair_index: recover (i, j) from a flat offset."""
        return pair_unindex(self.k, idx)

    def pairs(self):
        """All pairs (i, j) with i < j in flat order."""
        for i in range(1, self.k):
            for j in range(i + 1, self.k + 1):
                yield (i, j)


def pair_index(k: int, i: int, j: int) -> int:
    """Flat offset of (i, j) with 1 <= i < j <= k in lexicographic pair order.

    Rows are blocks of decreasing length: pairs (1, *) occupy offsets
    0..k-2, pairs (2, *) the next k-2 slots, and so on.
    """
    if not (1 <= i < j <= k):
        raise ValueError(f"pair ({i}, {j}) is not ordered within 1..{k}")
    return (i - 1) * k - i * (i - 1) // 2 + (j - i - 1)


def pair_unindex(k: int, idx: int) -> tuple[int, int]:
    n2 = k * (k - 1) // 2
    if not (0 <= idx < n2):
        raise ValueError(f"flat pair offset {idx} out of range 0..{n2 - 1}")
    off = idx
    for i in range(1, k):
        row = k - i
        if off < row:
            return (i, i + 1 + off)
        off -= row
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class GroupPoint:
    """A point of the step-2 group in exponential coordinates.

    x holds the first-layer coordinates (length k), x2 the second-layer
    coordinates (length k(k-1)/2, flat pair order).
    """

    x: np.ndarray
    x2: np.ndarray
    shape: AlgebraShape = field(init=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        x2 = np.asarray(self.x2, dtype=float)
        if x.ndim != 1 or x2.ndim != 1:
            raise ValueError("x and x2 must be one-dimensional")
        shape = AlgebraShape(len(x))
        if len(x2) != shape.dim_second:
            raise ValueError(
                f"x2 has length {len(x2)}, expected {shape.dim_second} for k={shape.k}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x2))):
            raise ValueError("group point coordinates must be finite")
        x.setflags(write=False)
        x2.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def origin(cls, k: int) -> "GroupPoint":
        return cls(np.zeros(k), np.zeros(k * (k - 1) // 2))


def _as_label(shape: AlgebraShape, label) -> tuple:
    """Normalize a basis label: an int i means X_i, a pair (i, j) means X_ij."""
    k = shape.k
    if isinstance(label, (int, np.integer)):
        if not (1 <= label <= k):
            raise ValueError(f"generator index {label} out of range 1..{k}")
        return ("first", int(label))
    if isinstance(label, (tuple, list)) and len(label) == 2:
        i, j = int(label[0]), int(label[1])
        if not (1 <= i < j <= k):
            raise ValueError(f"second-layer label ({i}, {j}) must satisfy 1 <= i < j <= {k}")
        return ("second", (i, j))
    raise TypeError(f"basis label must be an int or an ordered pair, got {label!r}")


def bracket(shape: AlgebraShape, a, b) -> np.ndarray:
    """Bracket of two basis elements as a coefficient vector over the basis.

    [X_i, X_j] = X_ij for i < j, antisymmetric in (i, j); any bracket
    involving a second-layer element vanishes.
    """
    kind_a, la = _as_label(shape, a)
    kind_b, lb = _as_label(shape, b)
    out = np.zeros(shape.dim_total)
    if kind_a != "first" or kind_b != "first":
        return out
    i, j = la, lb
    if i == j:
        return out
    sign = 1.0
    if i > j:
        i, j = j, i
        sign = -1.0
    out[shape.k + shape.pair_index(i, j)] = sign
    return out


def bracket_vectors(shape: AlgebraShape, va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """Bilinear extension of the basis bracket to coefficient vectors."""
    va = np.asarray(va, dtype=float)
    vb = np.asarray(vb, dtype=float)
    if va.shape != (shape.dim_total,) or vb.shape != (shape.dim_total,):
        raise ValueError("coefficient vectors must have the full algebra dimension")
    out = np.zeros(shape.dim_total)
    k = shape.k
    # only first-layer x first-layer terms survive
    for i in range(1, k + 1):
        ai = va[i - 1]
        if ai == 0.0:
            continue
        for j in range(i + 1, k + 1):
            c = ai * vb[j - 1] - va[j - 1] * vb[i - 1]
            if c != 0.0:
                out[k + shape.pair_index(i, j)] += c
    return out


def model_field(shape: AlgebraShape, i: int, g: GroupPoint) -> np.ndarray:
    """Left-invariant frame field of generator i at the group point g.

    In exponential coordinates the generator acts as

        X_i = d/dx_i - sum_{j > i} (x_j / 2) d/dx_ij + sum_{j < i} (x_j / 2) d/dx_ji

    so the returned tangent vector has a 1 in slot i, -x_j/2 in slot (i, j)
    for j > i and +x_j/2 in slot (j, i) for j < i.
    """
    k = shape.k
    if not (1 <= i <= k):
        raise ValueError(f"generator index {i} out of range 1..{k}")
    if g.shape.k != k:
        raise ValueError(f"group point has k={g.shape.k}, expected {k}")
    out = np.zeros(shape.dim_total)
    out[i - 1] = 1.0
    x = g.x
    for j in range(i + 1, k + 1):
        out[k + shape.pair_index(i, j)] = -0.5 * x[j - 1]
    for j in range(1, i):
        out[k + shape.pair_index(j, i)] = 0.5 * x[j - 1]
    return out
