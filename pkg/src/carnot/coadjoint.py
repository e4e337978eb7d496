"""Coadjoint orbits of step-2 free-nilpotent Lie algebras.

A covector carries first-layer coordinates h_1..h_k and second-layer
coordinates h_ij (flat pair order).  Because the second layer is central,
the h_ij are constants of the coadjoint action and assemble into the skew
matrix M = (h_ij), the Poisson bivector of the first-layer slice.  Orbits
are the affine subspaces obtained by freezing every h_ij together with the
linear integrals <a, h> for a in ker M; their dimension is rank M, always
even.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgebraShape, pair_index

DEFAULT_RANK_TOL = 1e-9


def _is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _coerce_coords(values, name: str) -> np.ndarray:
    """Turn a coordinate sequence into a float array, or an object array of
    Fractions when any entry is a Fraction (exact mode)."""
    seq = list(values)
    if any(isinstance(v, Fraction) for v in seq):
        exact = [v if isinstance(v, Fraction) else Fraction(v) for v in seq]
        arr = np.empty(len(exact), dtype=object)
        arr[:] = exact
        return arr
    arr = np.asarray(seq, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must have finite entries")
    return arr


@dataclass(frozen=True)
class CovectorPoint:
    """A point of the dual space: first layer h (length k), second layer h2
    (length k(k-1)/2).  Entries are floats, or Fractions for exact runs."""

    h: np.ndarray
    h2: np.ndarray
    shape: AlgebraShape = field(init=False, compare=False)

    def __post_init__(self):
        h = _coerce_coords(self.h, "h")
        h2 = _coerce_coords(self.h2, "h2")
        shape = AlgebraShape(len(h))
        if len(h2) != shape.dim_second:
            raise ValueError(
                f"h2 has length {len(h2)}, expected {shape.dim_second} for k={shape.k}"
            )
        h.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "shape", shape)

    @property
    def k(self) -> int:
        return self.shape.k

    @property
    def exact(self) -> bool:
        return _is_exact(self.h) or _is_exact(self.h2)

    def as_float(self) -> "CovectorPoint":
        if not self.exact:
            return self
        return CovectorPoint(
            np.array([float(v) for v in self.h]),
            np.array([float(v) for v in self.h2]),
        )

    def with_h(self, h) -> "CovectorPoint":
        return CovectorPoint(h, self.h2)

    def pair(self, i: int, j: int):
        """Entry h_ij for i < j; antisymmetric continuation for i > j."""
        if i == j:
            return self.h2[0] * 0
        if i < j:
            return self.h2[pair_index(self.k, i, j)]
        return -self.h2[pair_index(self.k, j, i)]


def poisson_matrix(p: CovectorPoint) -> np.ndarray:
    """Skew matrix M with M[i, j] = h_ij above the diagonal (0-based rows and
    columns correspond to generators 1..k).  Constructed exactly skew; dtype
    follows the point (float, or object for Fraction entries)."""
    k = p.k
    if _is_exact(p.h2):
        m = np.empty((k, k), dtype=object)
        m[:] = Fraction(0)
    else:
        m = np.zeros((k, k))
    idx = 0
    for i in range(k - 1):
        for j in range(i + 1, k):
            v = p.h2[idx]
            m[i, j] = v
            m[j, i] = -v
            idx += 1
    return m


def rank_and_kernel(m: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> tuple[int, np.ndarray]:
    """Numerical rank and an orthonormal kernel basis of a skew matrix.

    Rank is the count of singular values above tol times the largest one.
    Skew matrices have even rank; a thresholded odd count indicates a
    singular value straddling the cutoff, so the rank is repaired downward
    and a warning is emitted.  Returns (rank, kernel) with kernel of shape
    (k, k - rank), columns orthonormal.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    k = m.shape[0]
    _, s, vt = np.linalg.svd(m)
    cutoff = tol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    if rank % 2 == 1:
        warnings.warn(
            f"thresholded rank {rank} of a skew matrix is odd; a singular value "
            f"sits near the cutoff {cutoff:.3e}. Repairing rank downward to "
            f"{rank - 1}; consider adjusting the tolerance.",
            RuntimeWarning,
            stacklevel=2,
        )
        rank -= 1
    kernel = vt[rank:].T.copy() if rank < k else np.zeros((k, 0))
    return rank, kernel


def _canonical_subspace_basis(projector: np.ndarray, dim: int, m: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the subspace given by an orthogonal
    projector: Gram-Schmidt over the projected standard basis vectors taken
    in index order.  For a two-dimensional subspace the second vector's sign
    is fixed so that d1' M d2 >= 0, pinning the frame's orientation to the
    flow it parametrizes."""
    k = projector.shape[0]
    basis: list[np.ndarray] = []
    for i in range(k):
        v = projector[:, i].copy()
        for b in basis:
            v -= (b @ v) * b
        n = np.linalg.norm(v)
        if n > 1e-10:
            basis.append(v / n)
        if len(basis) == dim:
            break
    if len(basis) != dim:
        raise RuntimeError("failed to build a basis of the requested dimension")
    out = np.column_stack(basis) if basis else np.zeros((k, 0))
    if dim == 2 and out[:, 0] @ m @ out[:, 1] < 0:
        out[:, 1] = -out[:, 1]
    return out


@dataclass(frozen=True)
class Leaf:
    """An orbit leaf: the affine subspace through base spanned by directions
    inside the first-layer slice.  directions has shape (k, dim) with
    orthonormal columns; kernel holds an orthonormal basis of ker M(base),
    whose linear integrals <a, h> cut the leaf out of the slice."""

    base: CovectorPoint
    directions: np.ndarray
    dim: int
    kernel: np.ndarray

    def plane_coords(self, h: np.ndarray) -> np.ndarray:
        """In-leaf coordinates of a first-layer point (or batch, axis -1)."""
        h = np.asarray(h, dtype=float)
        base_h = np.asarray(self.base.h, dtype=float)
        return (h - base_h) @ self.directions

    def point_at(self, y: np.ndarray) -> np.ndarray:
        """First-layer point at in-leaf coordinates y (or batch, axis -1)."""
        y = np.asarray(y, dtype=float)
        base_h = np.asarray(self.base.h, dtype=float)
        return base_h + y @ self.directions.T


def leaf_through(p0: CovectorPoint, tol: float = DEFAULT_RANK_TOL) -> Leaf:
    """Orbit leaf through p0.

    The in-plane directions span the row space of M(p0) (the orthogonal
    complement of its kernel), orthonormalized deterministically so that
    repeated runs produce the same frame.
    """
    pf = p0.as_float()
    m = poisson_matrix(pf)
    rank, kernel = rank_and_kernel(m, tol)
    if rank == 0:
        directions = np.zeros((pf.k, 0))
    else:
        projector = np.eye(pf.k) - kernel @ kernel.T
        directions = _canonical_subspace_basis(projector, rank, m)
    return Leaf(base=pf, directions=directions, dim=rank, kernel=kernel)


def linear_integral(p: CovectorPoint, a: np.ndarray):
    """The linear first integral <a, h(p)> attached to a kernel vector a."""
    a = np.asarray(a)
    if a.shape != (p.k,):
        raise ValueError(f"coefficient vector must have length {p.k}")
    return a @ p.h


def same_leaf(p: CovectorPoint, lf: Leaf, tol: float = 1e-7) -> bool:
    """Whether p lies on the leaf within tol.

    Checks that every second-layer coordinate matches the base and that each
    kernel linear integral agrees, both against mixed absolute/relative
    scales of the base point.
    """
    pf = p.as_float()
    base = lf.base
    if pf.k != base.k:
        return False
    h2_scale = 1.0 + float(np.max(np.abs(base.h2))) if base.h2.size else 1.0
    if pf.h2.size and np.max(np.abs(pf.h2 - base.h2)) > tol * h2_scale:
        return False
    h_scale = 1.0 + float(np.linalg.norm(base.h))
    for a in lf.kernel.T:
        if abs(a @ (pf.h - base.h)) > tol * h_scale:
            return False
    return True
