"""Dense complex-matrix kernels: unitarity checks, submatrix assembly and
three permanent evaluation routes with a cost model to choose among them.

All matrices are dense ``complex128`` numpy arrays.  Occupation vectors are
plain tuples of nonnegative ints; mode-assignment tuples are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

UNITARITY_TOL = 1e-10
EXACT_PERMANENT_LIMIT = 30

# Pairwise-summation block size for the Gray-code walk (fixed reduction tree,
# so the result is independent of any sharding of the outer loop).
_BLOCK = 4096


class PermanentSizeError(ValueError):
    """Matrix exceeds the configured size limit for exact evaluation."""


def random_unitary(m: int, seed: int) -> np.ndarray:
    """Haar-random m x m unitary from a seeded Ginibre + QR draw."""
    if m < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q


def unitarity_defect(U: np.ndarray) -> float:
    """Max-norm of U^dag U - I."""
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(m))))


def check_unitary(U: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("matrix must be square")
    if U.shape[0] < 1:
        raise ValueError("dimension must be >= 1")
    defect = unitarity_defect(U)
    if defect >= tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} >= {tol:.1e})")
    return U


def build_submatrix(U, S, T=None, rows=None) -> np.ndarray:
    """Assemble U_{S,T} (or U_{S,r}).

    Takes ``s_i`` copies of column ``i`` of ``U`` to form the m x n matrix
    ``U_S``, then ``t_j`` copies of row ``j`` (or row ``r_i`` for each entry of
    ``rows``, 1-based) to form the n x n submatrix.
    """
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    if U.shape[1] != m:
        raise ValueError("matrix must be square")
    if (T is None) == (rows is None):
        raise ValueError("exactly one of T or rows must be given")
    if len(S) != m:
        raise ValueError("occupation length must equal matrix dimension")
    if any(s < 0 for s in S):
        raise ValueError("occupations must be nonnegative")
    n = sum(S)
    col_idx = [i for i, s in enumerate(S) for _ in range(s)]
    if T is not None:
        if len(T) != m:
            raise ValueError("occupation length must equal matrix dimension")
        if any(t < 0 for t in T):
            raise ValueError("occupations must be nonnegative")
        if sum(T) != n:
            raise ValueError("photon-number mismatch between S and T")
        row_idx = [j for j, t in enumerate(T) for _ in range(t)]
    else:
        if len(rows) != n:
            raise ValueError("photon-number mismatch between S and rows")
        if any(not (1 <= r <= m) for r in rows):
            raise ValueError("mode-assignment entry out of range")
        row_idx = [r - 1 for r in rows]
    return U[np.ix_(row_idx, col_idx)]


def _ryser_gray(M: np.ndarray):
    """Gray-code Ryser walk.  Returns (permanent, elementary-op count)."""
    n = M.shape[0]
    row_sums = np.zeros(n, dtype=complex)
    gray = 0
    ops = 0
    block: list[complex] = []
    partials: list[complex] = []
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        bit = 1 << j
        if gray & bit:
            row_sums -= M[:, j]
        else:
            row_sums += M[:, j]
        gray ^= bit
        prod = complex(np.prod(row_sums))
        ops += 2 * n  # n adds for the column update, n-1 mults, 1 accumulate
        term = prod if (gray.bit_count() & 1) == (n & 1) else -prod
        block.append(term)
        if len(block) == _BLOCK:
            partials.append(complex(np.sum(block)))
            block = []
    if block:
        partials.append(complex(np.sum(block)))
    return complex(np.sum(partials)), ops


def permanent_exact(M, limit: int = EXACT_PERMANENT_LIMIT) -> complex:
    """Permanent via the Gray-code Ryser O(2^n n) evaluation."""
    value, _ = permanent_exact_with_ops(M, limit=limit)
    return value


def permanent_exact_with_ops(M, limit: int = EXACT_PERMANENT_LIMIT):
    """Like :func:`permanent_exact`, also returns the instrumented op count."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    n = M.shape[0]
    if n > limit:
        raise PermanentSizeError(f"matrix size {n} exceeds exact limit {limit}")
    if n == 0:
        return 1 + 0j, 0
    return _ryser_gray(M)


def permanent_naive(M) -> complex:
    """n!-term permutation-sum permanent.  Test oracle only."""
    import itertools

    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if n == 0:
        return 1 + 0j
    total = 0j
    idx = range(n)
    for perm in itertools.permutations(idx):
        p = 1 + 0j
        for i in idx:
            p *= M[i, perm[i]]
        total += p
    return complex(total)


@lru_cache(maxsize=4096)
def _glynn_tables(S: tuple):
    """Sign/binomial tables for the repeated-column expansion over S.

    Returns (V, coeff) where V enumerates all 0 <= v_i <= s_i over the
    nonzero support of S (lexicographic) and coeff = (-1)^{sum v} * prod
    binom(s_i, v_i).
    """
    import itertools

    support = tuple(s for s in S if s > 0)
    V = np.array(list(itertools.product(*(range(s + 1) for s in support))),
                 dtype=np.int64)
    if V.size == 0:
        V = V.reshape(1, 0)
    nv = V.shape[0]
    coeff = np.ones(nv)
    for c, s in enumerate(support):
        coeff *= np.array([math.comb(s, v) for v in range(s + 1)])[V[:, c]]
    coeff *= np.where(np.sum(V, axis=1) % 2 == 0, 1.0, -1.0)
    return V, coeff


def permanent_repeated(U, S, T) -> complex:
    """Per(U_{S,T}) by the repeated-row/column expansion.

    Sums over v with 0 <= v_i <= s_i, sign (-1)^{sum v}, binomial weights,
    and row values raised to the output multiplicities.  The roles of S and T
    are swapped (through the transpose) whenever prod(t_j + 1) < prod(s_i + 1),
    which leaves the permanent unchanged.
    """
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    S = tuple(int(s) for s in S)
    T = tuple(int(t) for t in T)
    if len(S) != m or len(T) != m:
        raise ValueError("occupation length must equal matrix dimension")
    n = sum(S)
    if sum(T) != n:
        raise ValueError("photon-number mismatch between S and T")
    if n == 0:
        return 1 + 0j
    ps = math.prod(s + 1 for s in S)
    pt = math.prod(t + 1 for t in T)
    if pt < ps:
        U, S, T = U.T, T, S
    cols = [i for i, s in enumerate(S) if s > 0]
    rows = [k for k, t in enumerate(T) if t > 0]
    s_sub = np.array([S[i] for i in cols], dtype=np.int64)
    t_sub = np.array([T[k] for k in rows], dtype=np.int64)
    V, coeff = _glynn_tables(S)
    A = (s_sub - 2 * V).astype(float)  # (nv, |cols|)
    W = A @ U[np.ix_(rows, cols)].T  # (nv, |rows|)
    P = np.prod(W ** t_sub, axis=1)
    return complex((coeff @ P) / 2**n)


@dataclass(frozen=True)
class CostModel:
    """Operation counts for the repeated-column permanent expansion."""

    tau_st: int  # per-permanent cost min(prod(s+1), prod(t+1)) * aS * aT
    tau_global: int  # worst case over marginals: n * prod(s+1) * aS
    alpha_s: int
    alpha_t: int


def cost_estimate(S, T) -> CostModel:
    S = tuple(int(s) for s in S)
    T = tuple(int(t) for t in T)
    if sum(S) != sum(T):
        raise ValueError("photon-number mismatch between S and T")
    n = sum(S)
    alpha_s = sum(1 for s in S if s > 0)
    alpha_t = sum(1 for t in T if t > 0)
    ps = math.prod(s + 1 for s in S)
    pt = math.prod(t + 1 for t in T)
    return CostModel(
        tau_st=min(ps, pt) * alpha_s * alpha_t,
        tau_global=n * ps * alpha_s,
        alpha_s=alpha_s,
        alpha_t=alpha_t,
    )
