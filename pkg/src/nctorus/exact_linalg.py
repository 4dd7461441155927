"""Exact dense linear algebra over the integers and rationals.

Matrices are numpy arrays with ``dtype=object`` whose entries are Python
``int`` or ``fractions.Fraction`` values, so everything here is exact; no
floating point enters this module.  Pivoting rules are fixed so outputs are
reproducible, but the contracts are predicate-based: any factor satisfying
the stated equation is correct, and the factorizations re-multiply and check
themselves before returning.

Empty blocks (0xm, mx0) are first-class values throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class ExactLinalgError(Exception):
    """Base class for exact-arithmetic failures."""


class Singular(ExactLinalgError):
    """Matrix has determinant zero where an inverse was required."""


class NotSkew(ExactLinalgError):
    """Input is not skew-symmetric."""


class OddSize(ExactLinalgError):
    """Operation requires an even-sized square matrix."""


class BothZero(ExactLinalgError):
    """gcd certificate of (0, 0) requested."""


class Inconsistent(ExactLinalgError):
    """Linear system has no exact solution."""


# ---------------------------------------------------------------------------
# constructors and predicates


def mat(rows) -> np.ndarray:
    """Build an object-dtype matrix from nested sequences of int/Fraction."""
    A = np.array(rows, dtype=object)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    return A


def zeros(r: int, c: int) -> np.ndarray:
    A = np.empty((r, c), dtype=object)
    A[...] = 0
    return A


def eye(n: int) -> np.ndarray:
    A = zeros(n, n)
    for i in range(n):
        A[i, i] = 1
    return A


def diag(entries) -> np.ndarray:
    entries = list(entries)
    A = zeros(len(entries), len(entries))
    for i, e in enumerate(entries):
        A[i, i] = e
    return A


def block_diag(*mats: np.ndarray) -> np.ndarray:
    r = sum(M.shape[0] for M in mats)
    c = sum(M.shape[1] for M in mats)
    A = zeros(r, c)
    i = j = 0
    for M in mats:
        A[i : i + M.shape[0], j : j + M.shape[1]] = M
        i += M.shape[0]
        j += M.shape[1]
    return A


def mat_eq(A: np.ndarray, B: np.ndarray) -> bool:
    if A.shape != B.shape:
        return False
    return bool((A == B).all()) if A.size else True


def is_zero(A: np.ndarray) -> bool:
    return bool((A == 0).all()) if A.size else True


def is_skew(A: np.ndarray) -> bool:
    return A.shape[0] == A.shape[1] and mat_eq(A, -A.T)


def _denominator(x) -> int:
    return x.denominator if isinstance(x, Fraction) else 1


def is_integral(A: np.ndarray) -> bool:
    return all(_denominator(x) == 1 for x in A.flat)


def to_int(A: np.ndarray) -> np.ndarray:
    """Cast an exactly-integral matrix to Python-int entries."""
    if not is_integral(A):
        raise ValueError("matrix has non-integer entries")
    B = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        B[idx] = int(x)
    return B


def to_fraction(A: np.ndarray) -> np.ndarray:
    B = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        B[idx] = Fraction(x)
    return B


def lcm_denominators(A: np.ndarray) -> int:
    m = 1
    for x in A.flat:
        m = m * _denominator(x) // math.gcd(m, _denominator(x))
    return m


def strict_upper(A: np.ndarray) -> np.ndarray:
    B = zeros(*A.shape)
    for i in range(A.shape[0]):
        for j in range(i + 1, A.shape[1]):
            B[i, j] = A[i, j]
    return B


def freeze(A: np.ndarray) -> np.ndarray:
    A.flags.writeable = False
    return A


# ---------------------------------------------------------------------------
# elimination-based kernels


def det(M: np.ndarray) -> Fraction:
    """Exact determinant; det of the empty 0x0 matrix is 1."""
    n, m = M.shape
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    A = to_fraction(M)
    sign = 1
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r, col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            sign = -sign
        p = A[col, col]
        d *= p
        for r in range(col + 1, n):
            if A[r, col] != 0:
                A[r, col:] = A[r, col:] - (A[r, col] / p) * A[col, col:]
    return sign * d


def rank(M: np.ndarray) -> int:
    A = to_fraction(M)
    n, m = A.shape
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, n) if A[i, col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        p = A[r, col]
        for i in range(r + 1, n):
            if A[i, col] != 0:
                A[i, col:] = A[i, col:] - (A[i, col] / p) * A[r, col:]
        r += 1
        if r == n:
            break
    return r


def rational_inverse(M: np.ndarray) -> np.ndarray:
    """Exact inverse by Gauss-Jordan elimination.

    Raises:
        Singular: if the determinant is zero.
    """
    n, m = M.shape
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    A = to_fraction(M)
    B = to_fraction(eye(n))
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r, col] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            B[[col, piv]] = B[[piv, col]]
        p = A[col, col]
        A[col] = A[col] / p
        B[col] = B[col] / p
        for r in range(n):
            if r != col and A[r, col] != 0:
                f = A[r, col]
                A[r] = A[r] - f * A[col]
                B[r] = B[r] - f * B[col]
    return B


def int_inverse(M: np.ndarray) -> np.ndarray:
    """Inverse of a unimodular integer matrix, with integer entries."""
    return to_int(rational_inverse(M))


def solve_unique(A: np.ndarray, B: np.ndarray, pivot_order: str = "first") -> np.ndarray:
    """Solve A X = B exactly for A of full column rank.

    ``pivot_order`` selects which row supplies each pivot ("first" scans
    top-down, "last" bottom-up); full column rank makes the solution
    independent of that choice, which callers use as a uniqueness check.

    Raises:
        Inconsistent: if no exact solution exists or A is column-rank
            deficient.
    """
    m, r = A.shape
    if B.shape[0] != m:
        raise ValueError("shape mismatch")
    W = np.concatenate([to_fraction(A), to_fraction(B)], axis=1)
    rows = list(range(m)) if pivot_order == "first" else list(range(m - 1, -1, -1))
    used: list[int] = []
    pivots: list[tuple[int, int]] = []
    for col in range(r):
        piv = next((i for i in rows if i not in used and W[i, col] != 0), None)
        if piv is None:
            raise Inconsistent("coefficient matrix is column-rank deficient")
        used.append(piv)
        pivots.append((piv, col))
        p = W[piv, col]
        W[piv] = W[piv] / p
        for i in range(m):
            if i != piv and W[i, col] != 0:
                W[i] = W[i] - W[i, col] * W[piv]
    for i in range(m):
        if i not in used and not is_zero(W[i : i + 1, r:]):
            raise Inconsistent("system has no exact solution")
    X = zeros(r, B.shape[1])
    for piv, col in pivots:
        X[col, :] = W[piv, r:]
    return X


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd with a canonical Bezout certificate.

    Returns (g, c, d) with c*a + d*b = g = gcd(a, b) > 0 and, when b != 0,
    0 <= c < |b|/g.  For b == 0 the certificate is (|a|, sign(a), 0).

    Raises:
        BothZero: if a == b == 0.
    """
    if a == 0 and b == 0:
        raise BothZero("gcd(0, 0) has no certificate")
    if b == 0:
        return abs(a), (1 if a > 0 else -1), 0
    g, c0, d0 = _euclid(a, b)
    step = abs(b) // g
    c = c0 % step
    d = (g - c * a) // b
    return g, c, d


def _euclid(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True, eq=False)
class SnfResult:
    """U @ M @ V = D with U, V unimodular and D in Smith form."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray


def _min_entry(M: np.ndarray, t: int):
    best = None
    best_val = None
    for i in range(t, M.shape[0]):
        for j in range(t, M.shape[1]):
            v = M[i, j]
            if v != 0 and (best is None or abs(v) < best_val):
                best, best_val = (i, j), abs(v)
    return best


def smith_normal_form(M: np.ndarray) -> SnfResult:
    """Smith normal form with a fixed pivot rule.

    Pivot selection takes the nonzero entry of smallest absolute value in the
    working block, ties broken in row-major order; the diagonal is
    sign-normalized to be non-negative.  The result is verified by
    re-multiplication before returning.
    """
    A = to_int(M)
    m, n = A.shape
    U = eye(m)
    V = eye(n)
    t = 0
    while t < min(m, n):
        if _min_entry(A, t) is None:
            break
        while True:
            i, j = _min_entry(A, t)
            if i != t:
                A[[t, i]] = A[[i, t]]
                U[[t, i]] = U[[i, t]]
            if j != t:
                A[:, [t, j]] = A[:, [j, t]]
                V[:, [t, j]] = V[:, [j, t]]
            p = A[t, t]
            again = False
            for r in range(t + 1, m):
                if A[r, t] != 0:
                    q = A[r, t] // p
                    if q:
                        A[r] = A[r] - q * A[t]
                        U[r] = U[r] - q * U[t]
                    if A[r, t] != 0:
                        again = True
            if again:
                continue
            for c in range(t + 1, n):
                if A[t, c] != 0:
                    q = A[t, c] // p
                    if q:
                        A[:, c] = A[:, c] - q * A[:, t]
                        V[:, c] = V[:, c] - q * V[:, t]
                    if A[t, c] != 0:
                        again = True
            if again:
                continue
            bad = None
            for r in range(t + 1, m):
                if any(A[r, c] % p != 0 for c in range(t + 1, n)):
                    bad = r
                    break
            if bad is None:
                break
            A[t] = A[t] + A[bad]
            U[t] = U[t] + U[bad]
        t += 1
    for i in range(min(m, n)):
        if A[i, i] < 0:
            A[i] = -A[i]
            U[i] = -U[i]
    res = SnfResult(U=U, D=A, V=V)
    _check_snf(M, res)
    return res


def _check_snf(M: np.ndarray, res: SnfResult) -> None:
    if not mat_eq(res.U @ to_int(M) @ res.V, res.D):
        raise AssertionError("smith factor re-multiplication failed")
    if abs(det(res.U)) != 1 or abs(det(res.V)) != 1:
        raise AssertionError("smith transforms are not unimodular")
    d = [res.D[i, i] for i in range(min(res.D.shape))]
    for a, b in zip(d, d[1:]):
        if a == 0 and b != 0:
            raise AssertionError("zero invariant factor precedes a nonzero one")
        if a != 0 and b % a != 0:
            raise AssertionError("invariant factors do not divide in order")


def snf_rank(res: SnfResult) -> int:
    return sum(1 for i in range(min(res.D.shape)) if res.D[i, i] != 0)


def kernel_lattice_basis(C: np.ndarray) -> np.ndarray:
    """Primitive basis of the integer kernel {x : Cx = 0}, as columns.

    The basis is saturated: it spans the full lattice of integer kernel
    vectors, not a finite-index sublattice.
    """
    res = smith_normal_form(C)
    r = snf_rank(res)
    return res.V[:, r:].copy()


def complete_basis(C: np.ndarray, n: int) -> np.ndarray:
    """Unimodular matrix whose trailing columns span the integer kernel of C."""
    if C.shape[1] != n:
        raise ValueError("C must have n columns")
    res = smith_normal_form(C)
    return res.V.copy()


# ---------------------------------------------------------------------------
# alternating and symplectic normal forms


def _congr_swap(W: np.ndarray, Q: np.ndarray, i: int, j: int) -> None:
    W[[i, j]] = W[[j, i]]
    W[:, [i, j]] = W[:, [j, i]]
    Q[:, [i, j]] = Q[:, [j, i]]


def _congr_add(W: np.ndarray, Q: np.ndarray, dst: int, src: int, s) -> None:
    # column op followed by its mirrored row op keeps W congruent-skew.
    W[:, dst] = W[:, dst] + s * W[:, src]
    W[dst, :] = W[dst, :] + s * W[src, :]
    Q[:, dst] = Q[:, dst] + s * Q[:, src]


def canonical_alternating(h: list, size: int) -> np.ndarray:
    """The block matrix [[0, P, 0], [-P, 0, 0], [0, 0, 0]] with P = diag(h)."""
    k = len(h)
    M = zeros(size, size)
    for j, v in enumerate(h):
        M[j, k + j] = v
        M[k + j, j] = -v
    return M


def alternating_normal_form_int(A: np.ndarray) -> tuple[np.ndarray, list]:
    """Reduce an integer alternating form: A = R^t * canonical * R.

    Returns (R, h) with R unimodular and h the positive block multipliers
    h_1..h_k, k = rank(A)/2.  Verified by re-multiplication.

    Raises:
        NotSkew: if A != -A^t.
        OddSize: if A is not of even size.
    """
    n = A.shape[0]
    if A.shape[0] != A.shape[1] or not is_skew(A):
        raise NotSkew("alternating reduction needs an integer skew-symmetric matrix")
    if n % 2 != 0:
        raise OddSize("alternating reduction is defined for even size")
    W = to_int(A)
    Q = eye(n)
    t = 0
    hs: list = []
    while t < n:
        loc = _min_entry_upper(W, t)
        if loc is None:
            break
        while True:
            i, j = _min_entry_upper(W, t)
            if i != t:
                _congr_swap(W, Q, t, i)
                if j == t:
                    j = i
            if j != t + 1:
                _congr_swap(W, Q, t + 1, j)
            a = W[t, t + 1]
            again = False
            for c in range(t + 2, n):
                if W[t, c] != 0:
                    _congr_add(W, Q, c, t + 1, -(W[t, c] // a))
                    if W[t, c] != 0:
                        again = True
                if W[t + 1, c] != 0:
                    # W[t+1, t] = -a, so adding s*col_t moves W[t+1,c] by -s*a.
                    _congr_add(W, Q, c, t, W[t + 1, c] // a)
                    if W[t + 1, c] != 0:
                        again = True
            if not again:
                break
        hs.append(W[t, t + 1])
        t += 2
    for idx in range(len(hs)):
        if hs[idx] < 0:
            _congr_swap(W, Q, 2 * idx, 2 * idx + 1)
            hs[idx] = -hs[idx]
    k = len(hs)
    order = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2)) + list(range(2 * k, n))
    W = W[np.ix_(order, order)]
    Q = Q[:, order]
    R = int_inverse(Q)
    target = canonical_alternating(hs, n)
    if not mat_eq(W, target) or not mat_eq(R.T @ target @ R, to_int(A)):
        raise AssertionError("alternating reduction re-multiplication failed")
    return R, hs


def _min_entry_upper(W: np.ndarray, t: int):
    best = None
    best_val = None
    for i in range(t, W.shape[0]):
        for j in range(i + 1, W.shape[1]):
            v = W[i, j]
            if v != 0 and (best is None or abs(v) < best_val):
                best, best_val = (i, j), abs(v)
    return best


def standard_symplectic(p: int) -> np.ndarray:
    J0 = zeros(2 * p, 2 * p)
    for i in range(p):
        J0[i, p + i] = 1
        J0[p + i, i] = -1
    return J0


def symplectic_factor_rational(A: np.ndarray) -> np.ndarray:
    """Rational T with T^t J0 T = A for invertible skew rational A.

    Symplectic Gram-Schmidt over the rationals: the pivot is the first basis
    vector not yet consumed, its partner the first remaining vector with
    nonzero pairing, and the pivot is rescaled so the pair couples to 1.
    Verified by re-multiplication.

    Raises:
        NotSkew: if A is not skew-symmetric.
        Singular: if A is singular (odd sizes always are).
    """
    if not is_skew(A):
        raise NotSkew("symplectic factorization needs a skew-symmetric matrix")
    n = A.shape[0]
    if n == 0:
        return zeros(0, 0)
    if det(A) == 0:
        raise Singular("alternating form is degenerate")
    p = n // 2
    F = to_fraction(A)

    def pair(x, y):
        return x @ F @ y

    remaining = [to_fraction(eye(n))[i] for i in range(n)]
    us, vs = [], []
    while remaining:
        u = remaining.pop(0)
        idx = next((i for i, w in enumerate(remaining) if pair(u, w) != 0), None)
        if idx is None:
            raise Singular("alternating form is degenerate")
        v = remaining.pop(idx)
        u = u / pair(u, v)
        remaining = [r + pair(v, r) * u - pair(u, r) * v for r in remaining]
        us.append(u)
        vs.append(v)
    S = np.stack(us + vs, axis=1)
    T = rational_inverse(S)
    if not mat_eq(T.T @ standard_symplectic(p) @ T, to_fraction(A)):
        raise AssertionError("symplectic factor re-multiplication failed")
    return T
