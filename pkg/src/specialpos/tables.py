"""Vectorized tables over small prime fields.

Everything here works on ``int64`` numpy arrays of residues and is cached
per ``(q, n, m)``: the full list of m-dimensional subspaces of P^n(F_q) as
RREF bases, their Plücker vectors, and the signed "dual" Plücker vectors
that turn the incidence test for complementary-dimensional subspaces into a
matrix product.  For an (n-k)-plane L and a (k-1)-plane Λ,
``det[L; Λ] = sum_K w_K(L) p_K(Λ)`` (Laplace expansion along L's rows), so
L meets Λ iff that sum vanishes.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

import numpy as np

from .errors import BudgetExceeded, InputError

DEFAULT_BUDGET = 10**7


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_count(q: int, n: int, m: int) -> int:
    """Number of m-dimensional subspaces of P^n(F_q)."""
    return gaussian_binomial(n + 1, m + 1, q)


def check_budget(what: str, count: int, budget: int | None) -> None:
    if budget is not None and count > budget:
        raise BudgetExceeded(what, count, budget)


def pivot_patterns(n: int, m: int):
    return itertools.combinations(range(n + 1), m + 1)


def free_positions(pivots: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    """(row, col) slots of an RREF basis with these pivots, row-major."""
    pivset = set(pivots)
    return [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n + 1) if c not in pivset]


def _assignments(q: int, f: int) -> np.ndarray:
    """All vectors of F_q^f in lexicographic order, shape (q**f, f)."""
    if f == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(q**f, dtype=np.int64)
    powers = q ** np.arange(f - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % q


@lru_cache(maxsize=64)
def _subspace_table(q: int, n: int, m: int) -> np.ndarray:
    blocks = []
    for pivots in pivot_patterns(n, m):
        slots = free_positions(pivots, n)
        vals = _assignments(q, len(slots))
        block = np.zeros((vals.shape[0], m + 1, n + 1), dtype=np.int64)
        for i, c in enumerate(pivots):
            block[:, i, c] = 1
        for t, (i, c) in enumerate(slots):
            block[:, i, c] = vals[:, t]
        blocks.append(block)
    table = np.concatenate(blocks) if blocks else np.zeros((0, m + 1, n + 1), dtype=np.int64)
    table.setflags(write=False)
    return table


def subspace_table(q: int, n: int, m: int, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """RREF bases of every m-dimensional subspace of P^n(F_q), shape
    ``(count, m+1, n+1)``, ordered by pivot pattern then free entries."""
    if not 0 <= m <= n:
        raise InputError(f"need 0 <= m <= n, got m={m}, n={n}")
    check_budget(f"subspaces of dim {m} in P^{n}(F_{q})", subspace_count(q, n, m), budget)
    return _subspace_table(q, n, m)


def _inverse_mod(x: np.ndarray, p: int) -> np.ndarray:
    if p <= 1 << 20:
        table = np.zeros(p, dtype=np.int64)
        table[1:] = [pow(i, -1, p) for i in range(1, p)]
        return table[x]
    return np.array([pow(int(v), -1, p) if v else 0 for v in x.ravel()], dtype=np.int64).reshape(x.shape)


def batched_det_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of square matrices, shape (B, s, s)."""
    a = np.array(a, dtype=np.int64) % p
    batch, s, _ = a.shape
    det = np.ones(batch, dtype=np.int64)
    rows = np.arange(batch)
    for c in range(s):
        nz = a[:, c:, c] != 0
        has = nz.any(axis=1)
        piv = nz.argmax(axis=1) + c
        det[~has] = 0
        swap = has & (piv != c)
        if swap.any():
            r = rows[swap]
            top = a[r, c].copy()
            a[r, c] = a[r, piv[swap]]
            a[r, piv[swap]] = top
            det[swap] = (-det[swap]) % p
        lead = a[:, c, c]
        det = det * lead % p
        inv = _inverse_mod(np.where(has, lead, 1), p)
        factors = a[:, c + 1 :, c] * inv[:, None] % p
        a[:, c + 1 :, :] = (a[:, c + 1 :, :] - factors[:, :, None] * a[:, c : c + 1, :]) % p
    return det


def column_subsets(n: int, size: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n + 1), size))


def plucker_rows(bases: np.ndarray, p: int) -> np.ndarray:
    """Maximal minors of each basis in a stack ``(B, s, n+1)``, columns in
    lexicographic order of the s-subsets.  Not normalized."""
    batch, s, ncols = bases.shape
    subsets = column_subsets(ncols - 1, s)
    out = np.empty((batch, len(subsets)), dtype=np.int64)
    if s == 1:
        return bases[:, 0, :] % p
    for t, cols in enumerate(subsets):
        out[:, t] = batched_det_mod(bases[:, :, cols], p)
    return out


def complement_sign(subset: tuple[int, ...]) -> int:
    """Sign of the Laplace term pairing column set ``subset`` (first rows)
    with its complement (remaining rows)."""
    s = len(subset)
    return -1 if (sum(subset) - s * (s - 1) // 2) % 2 else 1


def dual_rows(plucker: np.ndarray, n: int, s: int, p: int) -> np.ndarray:
    """Reindex Plücker vectors of s-row bases by complementary column sets,
    with Laplace signs, so that ``dual @ plucker_other.T`` is ``det[A; B]``."""
    subsets = column_subsets(n, s)
    comp_index = {c: i for i, c in enumerate(column_subsets(n, n + 1 - s))}
    out = np.zeros((plucker.shape[0], len(comp_index)), dtype=np.int64)
    full = set(range(n + 1))
    for t, sub in enumerate(subsets):
        comp = tuple(sorted(full - set(sub)))
        sign = complement_sign(sub)
        out[:, comp_index[comp]] = plucker[:, t] if sign == 1 else (-plucker[:, t]) % p
    return out


@lru_cache(maxsize=64)
def _dual_table(q: int, n: int, m: int) -> np.ndarray:
    table = dual_rows(plucker_rows(_subspace_table(q, n, m), q), n, m + 1, q)
    table.setflags(write=False)
    return table


def dual_table(q: int, n: int, m: int, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """Signed dual Plücker vectors of all m-planes of P^n(F_q), columns
    indexed by (n-m)-subsets; pairs with Plücker vectors of (n-m-1)-planes."""
    subspace_table(q, n, m, budget)
    return _dual_table(q, n, m)


@lru_cache(maxsize=64)
def _plucker_table(q: int, n: int, m: int) -> np.ndarray:
    table = plucker_rows(_subspace_table(q, n, m), q)
    table.setflags(write=False)
    return table


def plucker_table(q: int, n: int, m: int, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    subspace_table(q, n, m, budget)
    return _plucker_table(q, n, m)


def pairing(dual: np.ndarray, plucker: np.ndarray, p: int) -> np.ndarray:
    """``(dual @ plucker.T) mod p`` without int64 overflow."""
    width = dual.shape[1]
    if width * (p - 1) ** 2 < 2**63:
        return (dual @ plucker.T) % p
    return (dual.astype(object) @ plucker.astype(object).T) % p


def meet_matrix(dual: np.ndarray, plucker: np.ndarray, p: int) -> np.ndarray:
    """Boolean ``M[i, j]``: subspace i of the dual family meets subspace j."""
    return pairing(dual, plucker, p) == 0


def plucker_column_count(n: int, k: int) -> int:
    return comb(n + 1, k)
