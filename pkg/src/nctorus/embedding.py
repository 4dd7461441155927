"""Construction of the dual pair of lattice embeddings and the companion
group element, with exact certificates at every step.

Given a special-form element and a compatible skew matrix theta, this module
builds, over the ambient phase space of dimension n + q + 2k:

  * the torsion data of the unique rational skew block Z,
  * the embedding matrix T with T^t J T = theta,
  * the dual embedding S onto the annihilator lattice, cross-checked against
    its closed form,
  * theta' = -S^t J S together with its displayed block formulas,
  * the matrix of the dual tangent isomorphism and the normalized curvature,
  * the companion element g' with theta' = g' theta, both by the resolvent
    formulas and by theta-independent closed forms,
  * the factorization g = mu(N) rho(A) g' of the normalized element.

Every identity is checked in exact arithmetic and recorded as a named
certificate; a failed certificate raises and carries the offending matrix
as a witness.  The pipeline wires these into the full equivalence chain.

The closed forms for the diagonal corner of A' and D' are taken as -I_q:
with +I_q the product identity theta' = g' theta fails on any example with
p > 0 and q > 0, while -I_q reproduces the resolvent-formula output exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact_linalg as xl
from .module_sim import ModuleDescriptor
from .normal_form import SpecialForm, detect_special_form, domain_check, normalize_right
from .torus_group import (
    DeterminantNotOne,
    GroupElement,
    RelationViolated,
    Theta,
    Undefined,
    act,
    check_membership,
    compose,
    invert_element,
    is_defined,
    make_theta,
    mu,
    rho,
)


class EmbeddingError(Exception):
    """A named certificate failed; .name and .witness identify it."""

    def __init__(self, name: str, message: str, witness=None):
        super().__init__(f"{name}: {message}")
        self.name = name
        self.witness = witness


class InternalMismatch(EmbeddingError):
    pass


class DualityFailed(EmbeddingError):
    pass


class NotIntegral(EmbeddingError):
    pass


class MembershipFailed(EmbeddingError):
    pass


class ActionMismatch(EmbeddingError):
    pass


class ClosedFormMismatch(EmbeddingError):
    pass


class CtildeNonzero(EmbeddingError):
    pass


class ReassemblyMismatch(EmbeddingError):
    pass


@dataclass(frozen=True)
class Certificate:
    name: str
    passed: bool
    witness: np.ndarray | None = None


class CertificateLog:
    """Ordered, eagerly evaluated certificate list."""

    def __init__(self):
        self.entries: list[Certificate] = []

    def check(self, name: str, ok: bool, exc: type[EmbeddingError], message: str, witness=None):
        self.entries.append(Certificate(name=name, passed=bool(ok), witness=None if ok else witness))
        if not ok:
            raise exc(name, message, witness=witness)

    def names(self) -> list[str]:
        return [c.name for c in self.entries]

    def all_passed(self) -> bool:
        return all(c.passed for c in self.entries)


# ---------------------------------------------------------------------------
# torsion data


@dataclass(frozen=True, eq=False)
class TorsionData:
    """Normal-form data of the rational skew block Z.

    m clears the denominators of Z, R is the unimodular change of basis with
    m Z = R^t [[0, P, 0], [-P, 0, 0], [0, 0, 0]] R, P = diag(h), and each
    ratio h_j / m reduces to m_j / n_j with the Bezout pair (c_j, d_j).
    Torsion factors with n_j = 1 are kept so matrix shapes stay uniform.
    """

    p: int
    m: int
    R: np.ndarray
    h: tuple[int, ...]
    mj: tuple[int, ...]
    nj: tuple[int, ...]
    cj: tuple[int, ...]
    dj: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.h)

    @property
    def P1(self) -> np.ndarray:
        return xl.diag([Fraction(1, n) for n in self.nj])

    @property
    def P2(self) -> np.ndarray:
        return xl.diag(list(self.mj))

    @property
    def Q1(self) -> np.ndarray:
        return xl.diag(list(self.dj))

    @property
    def Q2(self) -> np.ndarray:
        return xl.diag(list(self.cj))

    @property
    def T4(self) -> np.ndarray:
        return xl.diag(list(self.nj) + list(self.nj))


def build_torsion_data(Z: np.ndarray) -> TorsionData:
    """Clear denominators, reduce the alternating form, and take Bezout data."""
    two_p = Z.shape[0]
    if not xl.is_skew(Z):
        raise xl.NotSkew("Z must be skew-symmetric")
    m = xl.lcm_denominators(Z)
    R, h = xl.alternating_normal_form_int(xl.to_int(m * Z))
    mj, nj, cj, dj = [], [], [], []
    for hj in h:
        ratio = Fraction(hj, m)
        g, c, d = xl.ext_gcd(ratio.numerator, ratio.denominator)
        mj.append(ratio.numerator)
        nj.append(ratio.denominator)
        cj.append(c)
        dj.append(d)
    td = TorsionData(
        p=two_p // 2, m=m, R=R, h=tuple(h), mj=tuple(mj), nj=tuple(nj), cj=tuple(cj), dj=tuple(dj)
    )
    for j in range(td.k):
        if cj[j] * mj[j] + dj[j] * nj[j] != 1:
            raise AssertionError("Bezout certificate failed")
    return td


def _blk3(td: TorsionData) -> np.ndarray:
    """diag-block (P1, P1, -I) cut as (k, k, 2p - 2k)."""
    return xl.block_diag(td.P1, td.P1, -xl.eye(2 * td.p - 2 * td.k))


def _corner_form(td: TorsionData, top_right: np.ndarray) -> np.ndarray:
    """[[0, -X, 0], [X, 0, 0], [0, 0, 0]] cut as (k, k, 2p - 2k)."""
    k = td.k
    M = xl.zeros(2 * td.p, 2 * td.p)
    M[:k, k : 2 * k] = -top_right
    M[k : 2 * k, :k] = top_right
    return M


# ---------------------------------------------------------------------------
# phase-space form and embedding maps


def build_forms(p: int, q: int, orders: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """The 2-form J on the ambient space and its positive half J'."""
    k = len(orders)
    J0 = xl.standard_symplectic(p)
    J1 = xl.zeros(2 * p + 2 * q, 2 * p + 2 * q)
    J1[: 2 * p, : 2 * p] = J0
    J1[2 * p : 2 * p + q, 2 * p + q :] = xl.eye(q)
    J1[2 * p + q :, 2 * p : 2 * p + q] = -xl.eye(q)
    P1 = xl.diag([Fraction(1, n) for n in orders])
    J2 = xl.zeros(2 * k, 2 * k)
    J2[:k, k:] = P1
    J2[k:, :k] = -P1
    J = xl.block_diag(J1, J2)
    Jp = xl.zeros(*J.shape)
    for idx, v in np.ndenumerate(J):
        if v > 0:
            Jp[idx] = v
    if not xl.mat_eq(J, Jp - Jp.T):
        raise AssertionError("positive half does not reassemble the form")
    return J, Jp


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """A linear map into the ambient phase space carrying the lattice.

    Rows are ordered (u, u^, a, a^, w, w^); the a, w, w^ rows must be
    integral so standard basis vectors land in the covering lattice, and the
    projection to the (u, u^, a) rows must be invertible.
    """

    p: int
    q: int
    k: int
    orders: tuple[int, ...]
    matrix: np.ndarray
    J: np.ndarray
    Jprime: np.ndarray
    blocks: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return 2 * self.p + self.q

    def tilde(self) -> np.ndarray:
        """Projection onto the (u, u^, a) rows."""
        return self.matrix[: 2 * self.p + self.q, :]

    def integral_rows_ok(self) -> bool:
        a_rows = self.matrix[2 * self.p : 2 * self.p + self.q, :]
        w_rows = self.matrix[self.n + self.q :, :]
        return xl.is_integral(a_rows) and xl.is_integral(w_rows)

    def pullback(self) -> np.ndarray:
        return self.matrix.T @ self.J @ self.matrix


def build_T(sf: SpecialForm, td: TorsionData, theta: Theta, certs: CertificateLog | None = None) -> EmbeddingMap:
    """The embedding map for theta.

    The symplectic block realizes theta_11 - Z against the standard form,
    the a^ rows carry theta_21 and a fixed strict-upper splitting of
    theta_22, and the torsion rows land the reduced basis multiples in the
    covering lattice of W x W^.
    """
    certs = certs if certs is not None else CertificateLog()
    p, q, k = sf.p, sf.q, td.k
    n = sf.n
    T11 = xl.symplectic_factor_rational(theta.block(p, "11") - sf.Z)
    T31 = theta.block(p, "21")
    T32 = xl.strict_upper(theta.block(p, "22"))
    T1 = xl.zeros(n + q, n)
    T1[: 2 * p, : 2 * p] = T11
    T1[2 * p : n, 2 * p :] = xl.eye(q)
    T1[n:, : 2 * p] = T31
    T1[n:, 2 * p :] = T32
    B0 = xl.zeros(2 * k, n)
    B0[:k, :k] = td.P2
    B0[k:, k : 2 * k] = xl.eye(k)
    T2 = B0 @ xl.block_diag(td.R, xl.eye(q))
    T = np.concatenate([T1, T2], axis=0)
    J, Jp = build_forms(p, q, td.nj)
    emb = EmbeddingMap(
        p=p, q=q, k=k, orders=td.nj, matrix=xl.freeze(T), J=J, Jprime=Jp,
        blocks={"T11": T11, "T31": T31, "T32": T32, "T1": T1, "T2": T2},
    )
    certs.check(
        "T_pullback",
        xl.mat_eq(emb.pullback(), theta.M),
        InternalMismatch,
        "T^t J T != theta",
        witness=emb.pullback() - theta.M,
    )
    certs.check(
        "T_lattice_rows", emb.integral_rows_ok(), InternalMismatch, "integer rows of T not integral", witness=T
    )
    certs.check(
        "T_tilde_invertible",
        xl.det(emb.tilde()[:, :n]) != 0,
        InternalMismatch,
        "projection of T is singular",
        witness=emb.tilde(),
    )
    return emb


def _phi_matrices(td: TorsionData, p: int, q: int) -> np.ndarray:
    """The embedding of the lattice into the ambient certificate coordinates.

    Coordinates are cut (2p, q, q, 2k); the middle q block is identically
    zero.  The first 2p rows then pick up the transposed reduction matrix.
    """
    k = td.k
    n = 2 * p + q
    amb = n + q + 2 * k
    phi1 = xl.zeros(amb, n)
    for j in range(k):
        phi1[j, j] = -td.dj[j]
    for i in range(2 * k, 2 * p):
        phi1[i, i] = 1
    for j in range(q):
        phi1[2 * p + q + j, 2 * p + j] = 1
    for j in range(k):
        phi1[2 * p + 2 * q + j, j] = td.cj[j]
    for j in range(k):
        phi1[2 * p + 2 * q + k + j, k + j] = 1
    return xl.block_diag(td.R.T, xl.eye(2 * q + 2 * k)) @ phi1


def build_S(
    sf: SpecialForm,
    td: TorsionData,
    emb: EmbeddingMap,
    theta: Theta,
    certs: CertificateLog | None = None,
) -> EmbeddingMap:
    """The dual embedding onto the annihilator of the image lattice.

    Computed as (Tbar^t J)^-1 composed with the lattice splitting, then
    cross-checked entry-by-entry against the closed-form blocks.
    """
    certs = certs if certs is not None else CertificateLog()
    p, q, k = sf.p, sf.q, td.k
    n = sf.n
    T1, T2, T11 = emb.blocks["T1"], emb.blocks["T2"], emb.blocks["T11"]
    T31, T32 = emb.blocks["T31"], emb.blocks["T32"]
    T3 = xl.zeros(n + q, q)
    T3[n:, :] = -xl.eye(q)
    T4 = td.T4
    Tbar = xl.zeros(emb.matrix.shape[0], emb.matrix.shape[0])
    Tbar[: n + q, :n] = T1
    Tbar[: n + q, n : n + q] = T3
    Tbar[n + q :, :n] = T2
    Tbar[n + q :, n + q :] = T4
    dual_gram_inv = None
    try:
        dual_gram_inv = xl.rational_inverse(Tbar.T @ emb.J)
    except xl.Singular:
        pass
    certs.check(
        "S_tbar_invertible", dual_gram_inv is not None, InternalMismatch, "Tbar^t J is singular", witness=Tbar
    )
    phi = _phi_matrices(td, p, q)
    S = dual_gram_inv @ phi

    # closed form
    T11t_inv = xl.rational_inverse(T11.T)
    J0 = xl.standard_symplectic(p)
    blk3 = _blk3(td)
    W1 = xl.zeros(n + q, 2 * p)
    W1[: 2 * p, :] = J0 @ T11t_inv @ td.R.T @ blk3
    W2 = xl.zeros(n + q, q)
    W2[: 2 * p, :] = -(J0 @ T11t_inv @ T31.T)
    W2[2 * p : n, :] = xl.eye(q)
    W2[n:, :] = T32.T
    bottom = xl.zeros(2 * k, n)
    bottom[:k, k : 2 * k] = -xl.eye(k)
    bottom[k:, :k] = td.Q2
    S_closed = xl.zeros(*S.shape)
    S_closed[: n + q, : 2 * p] = W1
    S_closed[: n + q, 2 * p :] = W2
    S_closed[n + q :, :] = bottom
    certs.check(
        "S_closed_form",
        xl.mat_eq(S, S_closed),
        InternalMismatch,
        "computed dual map disagrees with its closed form",
        witness=S - S_closed,
    )
    dual = EmbeddingMap(
        p=p, q=q, k=k, orders=td.nj, matrix=xl.freeze(S), J=emb.J, Jprime=emb.Jprime,
        blocks={"W1": W1, "W2": W2, "bottom": bottom, "phi": phi, "Tbar": Tbar},
    )
    certs.check(
        "S_lattice_rows", dual.integral_rows_ok(), InternalMismatch, "integer rows of S not integral", witness=S
    )
    certs.check(
        "S_tilde_invertible",
        xl.det(dual.tilde()[:, :n]) != 0,
        InternalMismatch,
        "projection of S is singular",
        witness=dual.tilde(),
    )
    return dual


def verify_duality(
    emb: EmbeddingMap, dual: EmbeddingMap, td: TorsionData, certs: CertificateLog | None = None
) -> None:
    """Two exact duality checks.

    (a) S^t J T integral: the skew bicharacter pairs the two image lattices
        trivially.
    (b) The stacked basis of the kernel sublattice and the embedded lattice
        is a basis of the full certificate lattice: determinant +-1.
    """
    certs = certs if certs is not None else CertificateLog()
    gram = dual.matrix.T @ emb.J @ emb.matrix
    certs.check(
        "pairing_integral",
        xl.is_integral(gram),
        DualityFailed,
        "S^t J T has a non-integer entry",
        witness=gram,
    )
    p, q, k = emb.p, emb.q, emb.k
    n = emb.n
    T2 = emb.blocks["T2"]
    delta = xl.zeros(n + q + 2 * k, 2 * k)
    delta[:n, :] = T2.T
    delta[n + q :, :] = td.T4
    if not xl.is_zero(delta[2 * p : n, :]):
        certs.check(
            "dual_lattice_unimodular", False, DualityFailed, "kernel sublattice leaves the zero block", witness=delta
        )
    phi = dual.blocks["phi"]
    stack = np.concatenate([delta, phi], axis=1)
    if not xl.is_zero(stack[2 * p : 2 * p + q, :]):
        certs.check(
            "dual_lattice_unimodular", False, DualityFailed, "stack has entries in the zero block", witness=stack
        )
    keep = list(range(2 * p)) + list(range(2 * p + q, n + q + 2 * k))
    square = xl.to_int(stack[keep, :])
    certs.check(
        "dual_lattice_unimodular",
        abs(xl.det(square)) == 1,
        DualityFailed,
        "stacked lattice basis is not unimodular",
        witness=square,
    )


def theta_prime(
    dual: EmbeddingMap,
    td: TorsionData,
    theta: Theta,
    F11: np.ndarray,
    certs: CertificateLog | None = None,
) -> Theta:
    """theta' = -S^t J S, cross-checked against the four displayed blocks."""
    certs = certs if certs is not None else CertificateLog()
    p, q = dual.p, dual.q
    tp = -dual.pullback()
    certs.check(
        "S_pullback", xl.is_skew(tp), InternalMismatch, "-S^t J S is not skew", witness=tp
    )
    blk3 = _blk3(td)
    R = td.R
    t12 = theta.block(p, "12")
    t21 = theta.block(p, "21")
    t22 = theta.block(p, "22")
    expect = xl.zeros(*tp.shape)
    expect[: 2 * p, : 2 * p] = blk3 @ R @ F11 @ R.T @ blk3 + _corner_form(td, td.Q2 @ td.P1)
    expect[: 2 * p, 2 * p :] = blk3 @ R @ F11 @ t12
    expect[2 * p :, : 2 * p] = -(t21 @ F11 @ R.T @ blk3)
    expect[2 * p :, 2 * p :] = -(t21 @ F11 @ t12) + t22
    certs.check(
        "theta_prime_blocks",
        xl.mat_eq(tp, expect),
        InternalMismatch,
        "block formulas for theta' disagree with -S^t J S",
        witness=tp - expect,
    )
    return make_theta(tp)


def build_gprime(
    sf: SpecialForm,
    td: TorsionData,
    theta: Theta,
    theta_out: Theta,
    F11: np.ndarray,
    certs: CertificateLog | None = None,
) -> tuple[np.ndarray, np.ndarray, GroupElement]:
    """The dual tangent matrix, the normalized curvature, and g'.

    g' is assembled from the resolvent formulas

        C' = A^-1 Phi,  D' = A^-1 - C' theta,
        A' = A^t + theta' C',  B' = theta' A^-1 - A' theta,

    asserted integral and a group member with theta' = g' theta, then
    matched against theta-independent closed forms.
    """
    certs = certs if certs is not None else CertificateLog()
    p, q = sf.p, sf.q
    n = sf.n
    k = td.k
    blk3 = _blk3(td)
    phi_star = xl.zeros(n, n)
    phi_star[: 2 * p, : 2 * p] = F11 @ td.R.T @ blk3
    phi_star[: 2 * p, 2 * p :] = F11 @ theta.block(p, "12")
    phi_star[2 * p :, 2 * p :] = -xl.eye(q)
    curvature = xl.block_diag(F11, xl.zeros(q, q))
    inv = xl.rational_inverse(phi_star)
    Cp = inv @ curvature
    Dp = inv - Cp @ theta.M
    Ap = phi_star.T + theta_out.M @ Cp
    Bp = theta_out.M @ inv - Ap @ theta.M
    assembled = np.block([[Ap, Bp], [Cp, Dp]])
    certs.check(
        "gprime_integral",
        xl.is_integral(assembled),
        NotIntegral,
        "resolvent formulas produced non-integer blocks",
        witness=assembled,
    )
    gp = None
    detail = ""
    try:
        gp = check_membership(xl.to_int(Ap), xl.to_int(Bp), xl.to_int(Cp), xl.to_int(Dp))
    except (RelationViolated, DeterminantNotOne) as e:
        detail = str(e)
    certs.check("gprime_membership", gp is not None, MembershipFailed, detail, witness=assembled)
    certs.check(
        "gprime_action",
        is_defined(gp, theta) and act(gp, theta) == theta_out,
        ActionMismatch,
        "g' theta != theta'",
        witness=assembled,
    )
    Rt_inv = xl.int_inverse(td.R).T
    rest = 2 * p - 2 * k
    Cp_cf = xl.block_diag(xl.block_diag(td.T4, -xl.eye(rest)) @ Rt_inv, xl.zeros(q, q))
    Dp_cf = xl.block_diag(_corner_form(td, td.P2) @ td.R, -xl.eye(q))
    Ap_cf = xl.block_diag(_corner_form(td, td.Q2) @ Rt_inv, -xl.eye(q))
    Bp_cf = xl.block_diag(xl.block_diag(td.Q1, td.Q1, -xl.eye(rest)) @ td.R, xl.zeros(q, q))
    closed = np.block([[Ap_cf, Bp_cf], [Cp_cf, Dp_cf]])
    certs.check(
        "gprime_closed_form",
        xl.mat_eq(xl.to_fraction(assembled), xl.to_fraction(closed)),
        ClosedFormMismatch,
        "resolvent formulas disagree with the closed forms",
        witness=assembled - closed,
    )
    return xl.freeze(phi_star), xl.freeze(curvature), gp


def decompose(
    g: GroupElement, gp: GroupElement, certs: CertificateLog | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Factor g = mu(N) rho(A) g' and verify the reassembly exactly."""
    certs = certs if certs is not None else CertificateLog()
    gt = compose(g, invert_element(gp))
    certs.check(
        "decomp_ctilde_zero", xl.is_zero(gt.C), CtildeNonzero, "C block of g (g')^-1 is nonzero", witness=gt.C
    )
    certs.check(
        "decomp_unimodular",
        xl.mat_eq(gt.A.T @ gt.D, xl.eye(g.n)),
        ReassemblyMismatch,
        "A^t D != I in the triangular factor",
        witness=gt.matrix(),
    )
    N = gt.B @ gt.A.T
    certs.check("decomp_shear_skew", xl.is_skew(N), ReassemblyMismatch, "B A^t is not skew", witness=N)
    rebuilt = compose(mu(N), rho(gt.A), gp)
    certs.check(
        "decomp_reassembly",
        rebuilt == g,
        ReassemblyMismatch,
        "mu(N) rho(A) g' does not reproduce g",
        witness=rebuilt.matrix(),
    )
    return xl.to_int(N), gt.A.copy()


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True, eq=False)
class ChainStep:
    kind: str  # "iso_rho" | "iso_mu" | "heisenberg"
    R: np.ndarray | None = None
    N: np.ndarray | None = None
    descriptor: ModuleDescriptor | None = None

    def apply(self, theta: Theta) -> Theta:
        if self.kind == "iso_rho":
            return make_theta(self.R @ theta.M @ self.R.T)
        if self.kind == "iso_mu":
            return make_theta(theta.M + self.N)
        if self.kind == "heisenberg":
            if theta != self.descriptor.theta:
                raise AssertionError("module step applied to the wrong matrix")
            return self.descriptor.theta_prime
        raise ValueError(f"unknown step kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class MoritaChain:
    source: Theta
    target: Theta
    steps: tuple[ChainStep, ...]

    def endpoint(self) -> Theta:
        cur = self.source
        for step in self.steps:
            cur = step.apply(cur)
        return cur


@dataclass(frozen=True, eq=False)
class EmbeddingData:
    special: SpecialForm
    torsion: TorsionData
    emb: EmbeddingMap
    dual: EmbeddingMap
    f11: np.ndarray
    theta_in: Theta
    theta_out: Theta
    phi_star: np.ndarray
    curvature: np.ndarray
    g_prime: GroupElement
    shear: np.ndarray
    basis_change: np.ndarray
    r0: np.ndarray
    g1: GroupElement
    certificates: tuple[Certificate, ...]

    def all_passed(self) -> bool:
        return all(c.passed for c in self.certificates)


@dataclass(frozen=True, eq=False)
class PipelineResult:
    data: EmbeddingData
    chain: MoritaChain
    descriptor: ModuleDescriptor


def build_embedding(
    g1: GroupElement, theta1: Theta, certs: CertificateLog
) -> tuple[SpecialForm, TorsionData, EmbeddingMap, EmbeddingMap, np.ndarray, Theta, np.ndarray, np.ndarray, GroupElement]:
    """Run the construction on an element already in special form."""
    sf = detect_special_form(g1)
    chk = domain_check(sf, theta1)
    certs.check(
        "domain_defined", chk.defined, ActionMismatch, "theta_11 - Z is singular", witness=theta1.M
    )
    td = build_torsion_data(sf.Z)
    certs.check(
        "torsion_normal_form",
        xl.mat_eq(
            xl.to_fraction(td.R.T @ xl.canonical_alternating(list(td.h), 2 * td.p) @ td.R),
            xl.to_fraction(td.m * sf.Z),
        ),
        InternalMismatch,
        "alternating reduction does not reproduce m Z",
        witness=sf.Z,
    )
    emb = build_T(sf, td, theta1, certs)
    dual = build_S(sf, td, emb, theta1, certs)
    verify_duality(emb, dual, td, certs)
    tp = theta_prime(dual, td, theta1, chk.F11, certs)
    phi_star, curvature, gp = build_gprime(sf, td, theta1, tp, chk.F11, certs)
    return sf, td, emb, dual, chk.F11, tp, phi_star, curvature, gp


def pipeline(g: GroupElement, theta: Theta) -> PipelineResult:
    """Normalize, build the dual embeddings, factor g, and emit the chain.

    Raises:
        Undefined: if the action of g at theta is not defined.
        EmbeddingError: if any exact certificate fails.
    """
    if not is_defined(g, theta):
        raise Undefined("C theta + D is singular")
    certs = CertificateLog()
    R0 = normalize_right(g)
    g1 = compose(g, rho(R0))
    R0_inv = xl.int_inverse(R0)
    theta1 = act(rho(R0_inv), theta)
    sf, td, emb, dual, F11, tp, phi_star, curvature, gp = build_embedding(g1, theta1, certs)
    N, At = decompose(g1, gp, certs)
    descriptor = ModuleDescriptor(
        p=sf.p,
        q=sf.q,
        k=td.k,
        orders=td.nj,
        T=emb.matrix,
        S=dual.matrix,
        theta=theta1,
        theta_prime=tp,
        J=emb.J,
        Jprime=emb.Jprime,
        curvature=curvature,
        phi_star=phi_star,
    )
    chain = MoritaChain(
        source=theta,
        target=act(g, theta),
        steps=(
            ChainStep(kind="iso_rho", R=R0_inv),
            ChainStep(kind="heisenberg", descriptor=descriptor),
            ChainStep(kind="iso_rho", R=At),
            ChainStep(kind="iso_mu", N=N),
        ),
    )
    certs.check(
        "chain_endpoint",
        chain.endpoint() == chain.target,
        ActionMismatch,
        "composed chain does not reach g theta",
        witness=chain.endpoint().M,
    )
    data = EmbeddingData(
        special=sf,
        torsion=td,
        emb=emb,
        dual=dual,
        f11=F11,
        theta_in=theta1,
        theta_out=tp,
        phi_star=phi_star,
        curvature=curvature,
        g_prime=gp,
        shear=N,
        basis_change=At,
        r0=R0,
        g1=g1,
        certificates=tuple(certs.entries),
    )
    return PipelineResult(data=data, chain=chain, descriptor=descriptor)


CERTIFICATE_NAMES = [
    "domain_defined",
    "torsion_normal_form",
    "T_pullback",
    "T_lattice_rows",
    "T_tilde_invertible",
    "S_tbar_invertible",
    "S_closed_form",
    "S_lattice_rows",
    "S_tilde_invertible",
    "pairing_integral",
    "dual_lattice_unimodular",
    "S_pullback",
    "theta_prime_blocks",
    "gprime_integral",
    "gprime_membership",
    "gprime_action",
    "gprime_closed_form",
    "decomp_ctilde_zero",
    "decomp_unimodular",
    "decomp_shear_skew",
    "decomp_reassembly",
    "chain_endpoint",
]
