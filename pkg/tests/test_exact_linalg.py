import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nctorus import exact_linalg as xl


def F2(a, b):
    return F(a, b)


def square_int_matrices(max_n=4, lo=-5, hi=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(lo, hi), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )


def int_matrices(max_r=4, max_c=4, lo=-5, hi=5):
    return st.tuples(st.integers(1, max_r), st.integers(1, max_c)).flatmap(
        lambda rc: st.lists(
            st.lists(st.integers(lo, hi), min_size=rc[1], max_size=rc[1]),
            min_size=rc[0],
            max_size=rc[0],
        )
    )


def minors_gcd(M, k):
    """gcd of all k x k minors; the brute-force invariant-factor oracle."""
    m, n = M.shape
    g = 0
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), k):
            sub = M[np.ix_(rows, cols)]
            g = abs(int(np.gcd(g, int(xl.det(sub)))))
            if g == 1:
                return 1
    return g


def invariant_factors_oracle(M):
    m, n = M.shape
    facs = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = minors_gcd(M, k)
        if g == 0:
            break
        facs.append(g // prev)
        prev = g
    return facs


class TestRationalInverse:
    def test_identity(self):
        assert xl.mat_eq(xl.rational_inverse(xl.eye(3)), xl.to_fraction(xl.eye(3)))

    def test_skew_2x2(self):
        A = xl.mat([[0, F2(1, 3)], [F2(-1, 3), 0]])
        inv = xl.rational_inverse(A)
        assert xl.mat_eq(inv, xl.mat([[0, -3], [3, 0]]))
        assert xl.mat_eq(A @ inv, xl.to_fraction(xl.eye(2)))

    def test_singular(self):
        with pytest.raises(xl.Singular):
            xl.rational_inverse(xl.mat([[1, 1], [1, 1]]))

    def test_empty(self):
        assert xl.rational_inverse(xl.zeros(0, 0)).shape == (0, 0)
        assert xl.det(xl.zeros(0, 0)) == 1


class TestSmith:
    def test_identity(self):
        res = xl.smith_normal_form(xl.eye(2))
        assert xl.mat_eq(res.D, xl.eye(2))

    def test_2x2(self):
        res = xl.smith_normal_form(xl.mat([[2, 4], [6, 8]]))
        assert [res.D[0, 0], res.D[1, 1]] == [2, 4]

    def test_zero(self):
        res = xl.smith_normal_form(xl.mat([[0]]))
        assert res.D[0, 0] == 0

    @settings(max_examples=120, deadline=None)
    @given(rows=int_matrices())
    def test_matches_minors_oracle(self, rows):
        M = xl.mat(rows)
        res = xl.smith_normal_form(M)
        d = [int(res.D[i, i]) for i in range(min(M.shape)) if res.D[i, i] != 0]
        assert d == invariant_factors_oracle(M)

    @settings(max_examples=120, deadline=None)
    @given(rows=int_matrices())
    def test_invariants(self, rows):
        M = xl.mat(rows)
        res = xl.smith_normal_form(M)
        assert xl.mat_eq(res.U @ M @ res.V, res.D)
        assert abs(xl.det(res.U)) == 1
        assert abs(xl.det(res.V)) == 1
        diag = [res.D[i, i] for i in range(min(M.shape))]
        for a, b in zip(diag, diag[1:]):
            assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
            assert a >= 0

    def test_deterministic(self):
        rng = random.Random(11)
        rows = [[rng.randint(-5, 5) for _ in range(5)] for _ in range(4)]
        r1 = xl.smith_normal_form(xl.mat(rows))
        r2 = xl.smith_normal_form(xl.mat(rows))
        assert xl.mat_eq(r1.U, r2.U) and xl.mat_eq(r1.V, r2.V)


class TestKernelAndCompletion:
    def test_full_kernel(self):
        assert xl.mat_eq(xl.kernel_lattice_basis(xl.zeros(2, 2)), xl.eye(2))

    def test_trivial_kernel(self):
        assert xl.kernel_lattice_basis(xl.eye(2)).shape == (2, 0)

    def test_primitive_vector(self):
        C = xl.mat([[2, 4]])
        B = xl.kernel_lattice_basis(C)
        assert B.shape == (2, 1)
        assert xl.is_zero(C @ B)
        assert np.gcd(int(B[0, 0]), int(B[1, 0])) == 1

    @settings(max_examples=80, deadline=None)
    @given(rows=int_matrices(max_r=3, max_c=4, lo=-4, hi=4))
    def test_kernel_primitivity(self, rows):
        C = xl.mat(rows)
        B = xl.kernel_lattice_basis(C)
        assert xl.is_zero(C @ B)
        assert B.shape[1] == C.shape[1] - xl.rank(C)
        if B.shape[1]:
            res = xl.smith_normal_form(B)
            assert all(res.D[i, i] == 1 for i in range(B.shape[1]))

    @settings(max_examples=80, deadline=None)
    @given(rows=int_matrices(max_r=3, max_c=4, lo=-4, hi=4))
    def test_complete_basis(self, rows):
        C = xl.mat(rows)
        n = C.shape[1]
        R0 = xl.complete_basis(C, n)
        assert abs(xl.det(R0)) == 1
        prod = C @ R0
        r = xl.rank(C)
        assert xl.is_zero(prod[:, r:])
        assert xl.rank(prod[:, :r]) == r

    def test_complete_basis_trivial(self):
        assert xl.mat_eq(xl.complete_basis(xl.zeros(2, 2), 2), xl.eye(2))
        assert xl.mat_eq(xl.complete_basis(xl.eye(3), 3), xl.eye(3))


class TestAlternatingForm:
    def test_zero(self):
        R, h = xl.alternating_normal_form_int(xl.zeros(2, 2))
        assert xl.mat_eq(R, xl.eye(2)) and h == []

    def test_already_canonical(self):
        R, h = xl.alternating_normal_form_int(xl.mat([[0, 6], [-6, 0]]))
        assert xl.mat_eq(R, xl.eye(2)) and h == [6]

    def test_interleaved_blocks(self):
        A = xl.mat(
            [[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, 4], [0, 0, -4, 0]]
        )
        R, h = xl.alternating_normal_form_int(A)
        assert h == [2, 4]
        assert xl.mat_eq(R.T @ xl.canonical_alternating(h, 4) @ R, A)

    def test_rejects(self):
        with pytest.raises(xl.NotSkew):
            xl.alternating_normal_form_int(xl.mat([[0, 1], [1, 0]]))
        with pytest.raises(xl.OddSize):
            xl.alternating_normal_form_int(xl.zeros(3, 3))

    @settings(max_examples=80, deadline=None)
    @given(
        n=st.sampled_from([2, 4, 6]),
        data=st.data(),
    )
    def test_random_skew(self, n, data):
        A = xl.zeros(n, n)
        for i in range(n):
            for j in range(i + 1, n):
                v = data.draw(st.integers(-4, 4))
                A[i, j] = v
                A[j, i] = -v
        R, h = xl.alternating_normal_form_int(A)
        assert abs(xl.det(R)) == 1
        assert all(v > 0 for v in h)
        assert 2 * len(h) == xl.rank(A)
        assert xl.mat_eq(R.T @ xl.canonical_alternating(h, n) @ R, A)


class TestSymplecticFactor:
    def test_standard(self):
        J0 = xl.standard_symplectic(2)
        assert xl.mat_eq(xl.symplectic_factor_rational(J0), xl.to_fraction(xl.eye(4)))

    def test_scaled(self):
        A = xl.mat([[0, F2(1, 3)], [F2(-1, 3), 0]])
        assert xl.mat_eq(xl.symplectic_factor_rational(A), xl.diag([F2(1, 3), F(1)]))
        B = xl.mat([[0, 2], [-2, 0]])
        assert xl.mat_eq(xl.symplectic_factor_rational(B), xl.to_fraction(xl.diag([2, 1])))

    def test_rejects(self):
        with pytest.raises(xl.Singular):
            xl.symplectic_factor_rational(xl.zeros(2, 2))
        with pytest.raises(xl.NotSkew):
            xl.symplectic_factor_rational(xl.eye(2))

    def test_random(self):
        rng = random.Random(5)
        for _ in range(25):
            p = rng.randint(1, 3)
            while True:
                A = xl.zeros(2 * p, 2 * p)
                for i in range(2 * p):
                    for j in range(i + 1, 2 * p):
                        v = F(rng.randint(-6, 6), rng.randint(1, 6))
                        A[i, j] = v
                        A[j, i] = -v
                if xl.det(A) != 0:
                    break
            T = xl.symplectic_factor_rational(A)
            assert xl.mat_eq(T.T @ xl.standard_symplectic(p) @ T, xl.to_fraction(A))


class TestExtGcd:
    def test_unit(self):
        assert xl.ext_gcd(1, 5) == (1, 1, 0)

    def test_coprime(self):
        assert xl.ext_gcd(3, 5) == (1, 2, -1)

    def test_negative(self):
        g, c, d = xl.ext_gcd(-4, 6)
        assert g == 2 and c * (-4) + d * 6 == 2
        assert 0 <= c < 3

    def test_zero_cases(self):
        assert xl.ext_gcd(-7, 0) == (7, -1, 0)
        assert xl.ext_gcd(0, 4) == (4, 0, 1)
        with pytest.raises(xl.BothZero):
            xl.ext_gcd(0, 0)

    @settings(max_examples=200, deadline=None)
    @given(a=st.integers(-40, 40), b=st.integers(-40, 40))
    def test_certificate(self, a, b):
        if a == 0 and b == 0:
            return
        g, c, d = xl.ext_gcd(a, b)
        assert g > 0 and c * a + d * b == g
        assert a % g == 0 and b % g == 0
        if b != 0:
            assert 0 <= c < abs(b) // g


class TestSolveUnique:
    def test_pivot_order_independent(self):
        rng = random.Random(3)
        for _ in range(20):
            m, r = rng.randint(2, 4), rng.randint(1, 2)
            while True:
                A = xl.mat([[rng.randint(-4, 4) for _ in range(r)] for _ in range(m)])
                if xl.rank(A) == r:
                    break
            X = xl.mat([[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(2)] for _ in range(r)])
            B = A @ X
            X1 = xl.solve_unique(A, B, pivot_order="first")
            X2 = xl.solve_unique(A, B, pivot_order="last")
            assert xl.mat_eq(X1, X) and xl.mat_eq(X2, X)

    def test_inconsistent(self):
        A = xl.mat([[1], [1]])
        B = xl.mat([[0], [1]])
        with pytest.raises(xl.Inconsistent):
            xl.solve_unique(A, B)


class TestHelpers:
    def test_strict_upper_splits_skew(self):
        A = xl.mat([[0, 3, -2], [-3, 0, 5], [2, -5, 0]])
        U = xl.strict_upper(A)
        assert xl.mat_eq(U - U.T, A)

    def test_lcm_denominators(self):
        A = xl.mat([[F2(1, 2), F2(1, 3)], [2, F2(5, 6)]])
        assert xl.lcm_denominators(A) == 6

    def test_block_diag(self):
        B = xl.block_diag(xl.eye(2), xl.zeros(0, 0), xl.mat([[5]]))
        assert B.shape == (3, 3) and B[2, 2] == 5
