"""Wire documents: exact-rational JSON in, exact-rational JSON out.

Rationals travel as strings "p/q" (or "p" when integral) so that nothing is
ever rounded; integer matrices travel as plain JSON integers.  Serialization
is deterministic (sorted keys, fixed separators), so identical inputs and
seeds produce byte-identical reports.  Certificate timings are withheld from
documents unless explicitly requested, to keep that guarantee.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import exact_linalg as xl
from .embedding import Certificate, EmbeddingData, MoritaChain, PipelineResult
from .module_sim import ModuleDescriptor
from .torus_group import GroupElement, Theta, check_membership, make_theta

FORMAT_VERSION = "nctorus/1"


class ParseError(Exception):
    pass


# ---------------------------------------------------------------------------
# scalars and matrices


def rat_str(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ParseError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"bad rational {s!r}: {e}") from None
    raise ParseError(f"not a rational: {s!r}")


def rat_matrix_doc(M: np.ndarray) -> list[list[str]]:
    return [[rat_str(x) for x in row] for row in M.tolist()]


def int_matrix_doc(M: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in row] for row in M.tolist()]


def parse_rat_matrix(rows, what="matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{what} must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError(f"{what} rows have unequal lengths")
    M = xl.zeros(len(rows), width)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            M[i, j] = parse_rat(x)
    return M


def parse_int_matrix(rows, what="matrix") -> np.ndarray:
    M = parse_rat_matrix(rows, what)
    if not xl.is_integral(M):
        raise ParseError(f"{what} must have integer entries")
    return xl.to_int(M)


# ---------------------------------------------------------------------------
# job documents


def theta_from_doc(doc, n: int | None = None) -> Theta:
    M = parse_rat_matrix(doc, "theta")
    if M.shape[0] != M.shape[1]:
        raise ParseError("theta must be square")
    if n is not None and M.shape[0] != n:
        raise ParseError(f"theta has size {M.shape[0]}, document says n={n}")
    if not xl.is_skew(M):
        raise ParseError("theta must be skew-symmetric")
    try:
        return make_theta(M)
    except ValueError as e:
        raise ParseError(str(e)) from None


def theta_doc(theta: Theta) -> list[list[str]]:
    return rat_matrix_doc(theta.M)


def group_blocks_from_doc(doc, n: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parse the four blocks; membership is checked by the caller."""
    if not isinstance(doc, dict) or set("ABCD") - set(doc):
        raise ParseError("g must be an object with blocks A, B, C, D")
    blocks = tuple(parse_int_matrix(doc[key], f"g.{key}") for key in "ABCD")
    sizes = {M.shape for M in blocks}
    if len(sizes) != 1 or blocks[0].shape[0] != blocks[0].shape[1]:
        raise ParseError("g blocks must be square and of equal size")
    if n is not None and blocks[0].shape[0] != n:
        raise ParseError(f"g blocks have size {blocks[0].shape[0]}, document says n={n}")
    return blocks


def group_doc(g: GroupElement) -> dict:
    return {
        "A": int_matrix_doc(g.A),
        "B": int_matrix_doc(g.B),
        "C": int_matrix_doc(g.C),
        "D": int_matrix_doc(g.D),
    }


def load_job(doc: dict) -> dict:
    """Validate the envelope of an input document."""
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported document version {version!r}")
    out = {"options": doc.get("options", {})}
    if not isinstance(out["options"], dict):
        raise ParseError("options must be an object")
    n = doc.get("n")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 2):
        raise ParseError("n must be an integer >= 2")
    out["n"] = n
    if "g" in doc:
        out["g_blocks"] = group_blocks_from_doc(doc["g"], n)
    if "theta" in doc:
        out["theta"] = theta_from_doc(doc["theta"], n)
    if "module_descriptor" in doc:
        out["descriptor"] = descriptor_from_doc(doc["module_descriptor"])
    return out


# ---------------------------------------------------------------------------
# result documents


def certificates_doc(certs, include_timings: bool = False, timings: dict | None = None) -> list[dict]:
    out = []
    for c in certs:
        entry: dict = {"name": c.name, "passed": c.passed}
        if not c.passed and c.witness is not None:
            entry["witness"] = rat_matrix_doc(xl.to_fraction(c.witness))
        if include_timings and timings is not None:
            entry["seconds"] = timings.get(c.name)
        out.append(entry)
    return out


def descriptor_doc(d: ModuleDescriptor) -> dict:
    return {
        "p": d.p,
        "q": d.q,
        "k": d.k,
        "orders": list(d.orders),
        "T": rat_matrix_doc(d.T),
        "S": rat_matrix_doc(d.S),
        "theta": theta_doc(d.theta),
        "theta_prime": theta_doc(d.theta_prime),
        "K": d.K,
    }


def descriptor_from_doc(doc) -> ModuleDescriptor:
    if not isinstance(doc, dict):
        raise ParseError("module_descriptor must be an object")
    try:
        p, q, k = int(doc["p"]), int(doc["q"]), int(doc["k"])
        orders = tuple(int(x) for x in doc["orders"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad module_descriptor: {e}") from None
    if len(orders) != k or any(x < 1 for x in orders):
        raise ParseError("orders must list k positive integers")
    from .embedding import build_forms  # local import keeps module load light

    T = parse_rat_matrix(doc.get("T"), "T")
    S = parse_rat_matrix(doc.get("S"), "S")
    theta = theta_from_doc(doc.get("theta"))
    theta_prime = theta_from_doc(doc.get("theta_prime"))
    n = 2 * p + q
    amb = n + q + 2 * k
    if T.shape != (amb, n) or S.shape != (amb, n):
        raise ParseError("T and S must have shape (n+q+2k) x n")
    J, Jp = build_forms(p, q, orders)
    return ModuleDescriptor(
        p=p, q=q, k=k, orders=orders, T=T, S=S, theta=theta, theta_prime=theta_prime, J=J, Jprime=Jp
    )


def chain_doc(chain: MoritaChain) -> dict:
    steps = []
    for step in chain.steps:
        if step.kind == "iso_rho":
            steps.append({"kind": "iso_rho", "R": int_matrix_doc(step.R)})
        elif step.kind == "iso_mu":
            steps.append({"kind": "iso_mu", "N": int_matrix_doc(step.N)})
        else:
            steps.append(
                {
                    "kind": "heisenberg",
                    "theta": theta_doc(step.descriptor.theta),
                    "theta_prime": theta_doc(step.descriptor.theta_prime),
                }
            )
    return {
        "source": theta_doc(chain.source),
        "target": theta_doc(chain.target),
        "steps": steps,
    }


def embedding_doc(data: EmbeddingData) -> dict:
    td = data.torsion
    return {
        "n": data.g1.n,
        "p": data.special.p,
        "q": data.special.q,
        "k": td.k,
        "orders": list(td.nj),
        "m": td.m,
        "h": list(td.h),
        "R0": int_matrix_doc(data.r0),
        "Z": rat_matrix_doc(data.special.Z),
        "theta_in": theta_doc(data.theta_in),
        "theta_prime": theta_doc(data.theta_out),
        "T": rat_matrix_doc(data.emb.matrix),
        "S": rat_matrix_doc(data.dual.matrix),
        "phi_star": rat_matrix_doc(data.phi_star),
        "curvature": rat_matrix_doc(data.curvature),
        "g_prime": group_doc(data.g_prime),
        "shear": int_matrix_doc(data.shear),
        "basis_change": int_matrix_doc(data.basis_change),
        "certificates": certificates_doc(data.certificates),
        "all_passed": data.all_passed(),
    }


def pipeline_doc(res: PipelineResult) -> dict:
    doc = embedding_doc(res.data)
    doc["chain"] = chain_doc(res.chain)
    doc["module_descriptor"] = descriptor_doc(res.descriptor)
    return doc


def error_doc(kind: str, message: str, name: str | None = None) -> dict:
    err: dict = {"kind": kind, "message": message}
    if name:
        err["name"] = name
    return {"version": FORMAT_VERSION, "error": err}


def dumps(doc: dict) -> str:
    doc = dict(doc)
    doc.setdefault("version", FORMAT_VERSION)
    return json.dumps(doc, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    return doc
