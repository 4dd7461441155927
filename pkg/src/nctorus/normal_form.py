"""Special-form detection and right normalization of group elements.

An element is in special form when its C block has exactly the shape
[C11 0; C21 0] with the leading 2p columns of full column rank and the
leading 2p columns of D equal to -C Z for a (then unique, rational,
skew-symmetric) 2p x 2p matrix Z.  Every element can be brought to this
shape by right multiplication with rho(R0) for a unimodular R0 assembled
from a completed integer kernel basis of C.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exact_linalg as xl
from .torus_group import GroupElement, Theta, compose, rho


class NormalFormError(Exception):
    pass


class NotSpecialForm(NormalFormError):
    """C/D blocks do not have the required shape; normalize first."""


class OddRank(NormalFormError):
    """rank(C) came out odd, which valid input cannot produce."""


@dataclass(frozen=True, eq=False)
class SpecialForm:
    n: int
    p: int
    Z: np.ndarray  # 2p x 2p rational skew
    C11: np.ndarray
    C21: np.ndarray
    D12: np.ndarray
    D22: np.ndarray

    @property
    def q(self) -> int:
        return self.n - 2 * self.p

    def c_matrix(self) -> np.ndarray:
        left = np.concatenate([self.C11, self.C21], axis=0)
        return np.concatenate([left, xl.zeros(self.n, self.q)], axis=1)

    def d_matrix(self) -> np.ndarray:
        left = -np.concatenate([self.C11, self.C21], axis=0) @ self.Z
        right = np.concatenate([self.D12, self.D22], axis=0)
        return xl.to_int(np.concatenate([left, right], axis=1))

    def mixed_matrix(self) -> np.ndarray:
        return np.block([[self.C11, self.D12], [self.C21, self.D22]])


def detect_special_form(g: GroupElement) -> SpecialForm:
    """Read off (p, Z) or explain why the shape is wrong.

    The width of the leading block is fixed as n minus the number of
    trailing all-zero columns of C; an interior zero column therefore shows
    up as a rank-deficient leading block and is rejected.

    Raises:
        NotSpecialForm: leading block rank-deficient, no exact solution for
            Z, Z not skew, or the mixed C/D matrix singular.
        OddRank: full-rank leading block of odd width (corrupted input).
    """
    n = g.n
    C, D = g.C, g.D
    width = n
    while width > 0 and xl.is_zero(C[:, width - 1 : width]):
        width -= 1
    lead = C[:, :width]
    r = xl.rank(lead)
    if r < width:
        raise NotSpecialForm("leading columns of C are rank-deficient")
    if width % 2 != 0:
        raise OddRank("rank of C is odd")
    p = width // 2
    try:
        Z = xl.solve_unique(-lead, D[:, :width])
    except xl.Inconsistent:
        raise NotSpecialForm("leading columns of D are not -C Z for any Z") from None
    if not xl.is_skew(Z):
        raise NotSpecialForm("solved Z is not skew-symmetric")
    sf = SpecialForm(
        n=n,
        p=p,
        Z=xl.freeze(xl.to_fraction(Z)),
        C11=C[:width, :width],
        C21=C[width:, :width],
        D12=D[:width, width:],
        D22=D[width:, width:],
    )
    if xl.det(sf.mixed_matrix()) == 0:
        raise NotSpecialForm("mixed block matrix [C11 D12; C21 D22] is singular")
    return sf


def normalize_right(g: GroupElement) -> np.ndarray:
    """Unimodular R0 such that g * rho(R0) is in special form.

    The trailing columns of R0 are a primitive basis of the integer kernel
    of C, so C R0 keeps its nonzero columns in the leading even-rank block.

    Raises:
        OddRank: if rank(C) is odd (impossible for valid input).
    """
    n = g.n
    R0 = xl.complete_basis(g.C, n)
    if xl.rank(g.C) % 2 != 0:
        raise OddRank("rank of C is odd")
    detect_special_form(compose(g, rho(R0)))
    return R0


@dataclass(frozen=True, eq=False)
class DomainCheck:
    defined: bool
    F11: np.ndarray | None  # (theta_11 - Z)^-1 when defined


def domain_check(sf: SpecialForm, theta: Theta) -> DomainCheck:
    """Decide definedness of the action from theta_11 - Z alone.

    When defined, the inverse F11 is returned and the block identity
    (C theta + D)^-1 C = blk(F11, 0; 0, 0) is verified exactly; F11 is also
    checked to be skew.  Undefined is a value, not an error.
    """
    if sf.n != theta.n:
        raise ValueError("dimension mismatch")
    diff = theta.block(sf.p, "11") - sf.Z
    try:
        F11 = xl.rational_inverse(diff)
    except xl.Singular:
        return DomainCheck(defined=False, F11=None)
    if not xl.is_skew(F11):
        raise AssertionError("F11 is not skew-symmetric")
    C = sf.c_matrix()
    M = C @ theta.M + sf.d_matrix()
    expected = xl.block_diag(F11, xl.zeros(sf.q, sf.q))
    if not xl.mat_eq(xl.rational_inverse(M) @ C, expected):
        raise AssertionError("(C theta + D)^-1 C block identity failed")
    return DomainCheck(defined=True, F11=xl.freeze(F11))
