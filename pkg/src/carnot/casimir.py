"""Casimir functions on the dual of a step-2 free-nilpotent Lie algebra.

Every second-layer coordinate h_ij is a Casimir because the second layer is
central.  For an odd number of generators k = 2n + 1 there is one more,
polynomial of degree n + 1:

    C(p) = sum_i a_i(p) h_i(p),

    a_i(p) = sum over ordered tuples (j_1, ..., j_2n) of pairwise distinct
             indices drawn from {1..k} \\ {i} of
             (-1)^(sigma + i) h_{j_1 j_2} h_{j_3 j_4} ... h_{j_(2n-1) j_2n}

with h_ab = -h_ba for a > b and sigma the parity of the permutation taking
the increasing arrangement of {1..k} \\ {i} to the tuple.  The coefficient
vector a(p) spans ker M(p) for generic p, which is what makes C constant on
orbits: M(p)^T a(p) = 0 identically in the h_ij.

The tuple sum is the normative definition and is kept verbatim as an oracle
(`pfaffian_coefficients(..., method="tuples")`).  The default path collapses
the (2n)! tuples onto the (2n-1)!! perfect matchings of the reduced index
set, each carrying the common signed weight 2^n n!; both paths produce the
same monomial table, which the tests compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

import numpy as np

from .algebra import pair_index
from .coadjoint import CovectorPoint, poisson_matrix

MAX_ODD_K = 11


class EvenGeneratorCountError(ValueError):
    """Raised when the polynomial Casimir is requested for even k."""

    def __init__(self, k: int):
        super().__init__(
            f"no polynomial Casimir beyond the h_ij exists for k={k}: with an "
            f"even number of generators the Poisson matrix is generically "
            f"nonsingular and only the k(k-1)/2 second-layer coordinates are "
            f"independent Casimirs"
        )
        self.k = k


def trivial_casimirs(p: CovectorPoint) -> np.ndarray:
    """The always-present Casimirs: the second-layer coordinates themselves."""
    return p.h2.copy()


def _check_odd_k(k: int) -> int:
    if k % 2 == 0:
        raise EvenGeneratorCountError(k)
    if k > MAX_ODD_K:
        raise ValueError(
            f"k={k} exceeds the enumeration ceiling {MAX_ODD_K} for the "
            f"polynomial Casimir"
        )
    return (k - 1) // 2


def _parity(tup: tuple[int, ...], rank: dict[int, int]) -> int:
    """Inversion-count parity of tup relative to its sorted arrangement."""
    pos = [rank[v] for v in tup]
    inv = 0
    for a in range(len(pos)):
        pa = pos[a]
        for b in range(a + 1, len(pos)):
            if pa > pos[b]:
                inv += 1
    return inv & 1


def _tuple_monomials(k: int, i: int) -> tuple[dict[tuple[int, ...], int], int]:
    """Literal enumeration of the ordered-tuple sum for generator i.

    Returns (monomials, n_tuples): monomials maps a sorted tuple of flat h2
    offsets (the pair factors h_{ab}, a < b) to its integer coefficient,
    after folding the antisymmetric sign of every inverted pair.
    """
    others = [j for j in range(1, k + 1) if j != i]
    rank = {v: r for r, v in enumerate(others)}
    acc: dict[tuple[int, ...], int] = {}
    count = 0
    for tup in permutations(others):
        count += 1
        sign = -1 if ((_parity(tup, rank) + i) & 1) else 1
        key = []
        for m in range(0, len(tup), 2):
            a, b = tup[m], tup[m + 1]
            if a > b:
                a, b = b, a
                sign = -sign
            key.append(pair_index(k, a, b))
        key_t = tuple(sorted(key))
        acc[key_t] = acc.get(key_t, 0) + sign
    return {key: c for key, c in acc.items() if c != 0}, count


def _matchings(items: list[int]):
    """All perfect matchings of items as lists of (a, b) pairs with a < b."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for idx in range(len(rest)):
        partner = rest[idx]
        remaining = rest[:idx] + rest[idx + 1 :]
        for sub in _matchings(remaining):
            yield [(first, partner)] + sub


def _matching_monomials(k: int, i: int) -> dict[tuple[int, ...], int]:
    """Matching-collapsed form of the tuple sum for generator i.

    Each perfect matching of {1..k} \\ {i} absorbs the 2^n n! ordered tuples
    that induce it: flipping a pair toggles both the permutation parity and
    the antisymmetric sign of the factor, and permuting whole pairs is even,
    so every such tuple contributes the same signed monomial.
    """
    others = [j for j in range(1, k + 1) if j != i]
    rank = {v: r for r, v in enumerate(others)}
    n = len(others) // 2
    weight = (2**n) * factorial(n)
    out: dict[tuple[int, ...], int] = {}
    for match in _matchings(others):
        arrangement = tuple(v for pair in match for v in pair)
        sign = -1 if ((_parity(arrangement, rank) + i) & 1) else 1
        key = tuple(sorted(pair_index(k, a, b) for a, b in match))
        out[key] = sign * weight
    return out


_PATTERN_CACHE: dict[int, list[dict[tuple[int, ...], int]]] = {}


def _patterns(k: int) -> list[dict[tuple[int, ...], int]]:
    if k not in _PATTERN_CACHE:
        _PATTERN_CACHE[k] = [_matching_monomials(k, i) for i in range(1, k + 1)]
    return _PATTERN_CACHE[k]


def _evaluate(monomials: dict[tuple[int, ...], int], h2: np.ndarray):
    total = None
    for key, coef in monomials.items():
        term = coef
        for idx in key:
            term = term * h2[idx]
        total = term if total is None else total + term
    if total is None:
        return h2[0] * 0 if len(h2) else 0
    return total


def pfaffian_coefficients(p: CovectorPoint, method: str = "matchings") -> np.ndarray:
    """Coefficient vector a(p) of the polynomial Casimir (odd k only).

    a_i is the signed sub-Pfaffian of M(p) with row and column i removed, up
    to the common weight 2^n n!.  method="tuples" runs the literal ordered
    tuple enumeration; "matchings" (default) evaluates the collapsed table.
    Exact Fraction coordinates stay exact.
    """
    k = p.k
    _check_odd_k(k)
    if method == "matchings":
        tables = _patterns(k)
    elif method == "tuples":
        tables = [_tuple_monomials(k, i)[0] for i in range(1, k + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = [_evaluate(tables[i], p.h2) for i in range(k)]
    if p.h2.dtype == object:
        out = np.empty(k, dtype=object)
        out[:] = vals
        return out
    return np.asarray(vals, dtype=float)


def polynomial_casimir(p: CovectorPoint, method: str = "matchings"):
    """The degree-(n+1) Casimir C(p) = <a(p), h(p)> for odd k."""
    a = pfaffian_coefficients(p, method=method)
    if a.dtype == object or p.h.dtype == object:
        return sum(ai * hi for ai, hi in zip(a, p.h))
    return float(a @ p.h)


def identity_residual(p: CovectorPoint, method: str = "matchings") -> np.ndarray:
    """The vector (sum_i a_i h_il)_l = M(p)^T a(p).

    Identically zero as a polynomial in the h_ij; exact arithmetic returns
    exact zeros, floating arithmetic a residual at rounding scale.
    """
    a = pfaffian_coefficients(p, method=method)
    m = poisson_matrix(p)
    return m.T.dot(a)


def residual_scale(p: CovectorPoint) -> float:
    """Normalization ||a|| * ||M|| for judging a floating-point residual."""
    pf = p.as_float()
    a = pfaffian_coefficients(pf)
    m = poisson_matrix(pf)
    return float(np.linalg.norm(a) * np.linalg.norm(m, 2))


@dataclass(frozen=True)
class CasimirReport:
    """Casimir summary at a point: the trivial h_ij, and for odd k the
    coefficient vector and value of the polynomial Casimir."""

    trivial: np.ndarray
    a_vec: np.ndarray | None
    c_value: object | None


def casimir_report(p: CovectorPoint) -> CasimirReport:
    trivial = trivial_casimirs(p)
    if p.k % 2 == 0:
        return CasimirReport(trivial=trivial, a_vec=None, c_value=None)
    a = pfaffian_coefficients(p)
    return CasimirReport(trivial=trivial, a_vec=a, c_value=polynomial_casimir(p))
