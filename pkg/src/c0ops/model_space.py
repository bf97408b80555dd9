"""Model spaces H(theta) and the compressed shift as a concrete matrix.

For theta = z^d the monomial basis is used and the shift matrix is the
exact nilpotent lower Jordan block.  Otherwise the space is spanned by
Cauchy kernels 1/(1 - conj(a) z) and their conj(a)-derivatives (one chain
per zero, chain length = multiplicity), which are orthonormalized in the
closed-form Gram metric.  The resulting orthonormal family is the
rational orthonormal basis classically attached to the zero set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import inner
from .errors import DegenerateGram, NotADivisor, SingularResolvent
from .inner import InnerFunction

GRAM_COND_LIMIT = 1e12


def _kernel_pair_ip(j: int, l: int, x: complex, y: complex) -> complex:
    """<k_a^(j), k_b^(l)> in H^2, with x = conj(a), y = b.

    Equals d^j/dx^j d^l/dy^l of 1/(1 - x y), expanded by the Leibniz rule.
    """
    total = 0j
    one_m_xy = 1.0 - x * y
    for i in range(max(0, j - l), j + 1):
        coef = (
            math.comb(j, i)
            * math.factorial(l)
            // math.factorial(l - j + i)
            * math.factorial(l + i)
        )
        total += coef * x ** (l - j + i) * y**i / one_m_xy ** (l + 1 + i)
    return total


@dataclass(frozen=True)
class ModelSpace:
    """H(theta) with an orthonormal basis and the matrix of S(theta)."""

    theta: InnerFunction
    dim: int
    basis_kind: str  # "monomial" | "orthonormal-rational"
    shift_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.shift_matrix.setflags(write=False)

    def vector(self, coords) -> "ModelVector":
        return ModelVector(self, np.asarray(coords, dtype=complex))


@dataclass(frozen=True)
class ModelVector:
    space: ModelSpace
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=complex).reshape(-1)
        if coords.shape[0] != self.space.dim:
            raise ValueError("coordinate length does not match space dim")
        object.__setattr__(self, "coords", coords)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def _gram_schmidt_in_metric(gram: np.ndarray) -> np.ndarray:
    """Coefficients C of an orthonormal basis, QR-style with a second pass.

    Columns of C express the orthonormal vectors in the original (kernel)
    basis whose Gram matrix is `gram`.
    """
    d = gram.shape[0]
    ip = lambda c1, c2: complex(c2.conj() @ gram @ c1)
    cols = []
    for k in range(d):
        c = np.zeros(d, dtype=complex)
        c[k] = 1.0
        for _ in range(2):  # reorthogonalize once for stability
            for q in cols:
                c = c - ip(c, q) * q
        nrm = math.sqrt(max(ip(c, c).real, 0.0))
        if nrm <= 0.0:
            raise DegenerateGram("kernel basis numerically dependent")
        cols.append(c / nrm)
    return np.column_stack(cols)


def build_model_space(theta: InnerFunction) -> ModelSpace:
    """Construct H(theta) and the matrix of the compressed shift."""
    d = theta.degree
    if d < 1:
        raise ValueError("degree of theta must be >= 1")
    if all(abs(a) <= inner.MATCH_TOL for a, _ in theta.zeros):
        # theta = z^d: monomial basis {1, z, ..., z^{d-1}}, exact nilpotent.
        shift = np.zeros((d, d), dtype=complex)
        for k in range(d - 1):
            shift[k + 1, k] = 1.0
        return ModelSpace(theta, d, "monomial", shift)

    basis = [(a, j) for a, m in theta.zeros for j in range(m)]
    gram = np.empty((d, d), dtype=complex)
    for p, (ap, jp) in enumerate(basis):
        for q, (aq, jq) in enumerate(basis):
            gram[p, q] = _kernel_pair_ip(jq, jp, aq.conjugate(), ap)
    if np.linalg.cond(gram) > GRAM_COND_LIMIT:
        raise DegenerateGram("zeros of theta too clustered")

    # Action of the backward shift on the kernel chains is upper triangular:
    # S* k_{a,j} = conj(a) k_{a,j} + j k_{a,j-1}.
    act = np.zeros((d, d), dtype=complex)
    for q, (a, j) in enumerate(basis):
        act[q, q] = a.conjugate()
        if j > 0:
            act[q - 1, q] = j
    coeffs = _gram_schmidt_in_metric(gram)
    adjoint = coeffs.conj().T @ gram @ (act @ coeffs)
    return ModelSpace(theta, d, "orthonormal-rational", adjoint.conj().T)


def blaschke_of_matrix(u: InnerFunction, a_mat: np.ndarray) -> np.ndarray:
    """u(A) for a finite Blaschke product u and a square matrix A."""
    a_mat = np.asarray(a_mat, dtype=complex)
    n = a_mat.shape[0]
    out = np.eye(n, dtype=complex)
    eye = np.eye(n, dtype=complex)
    for a, m in u.zeros:
        try:
            factor = np.linalg.solve(eye - a.conjugate() * a_mat, a_mat - a * eye)
        except np.linalg.LinAlgError as exc:  # cannot occur for contractions
            raise SingularResolvent(str(exc)) from exc
        for _ in range(m):
            out = out @ factor
    return out


def functional_calculus(space: ModelSpace, u: InnerFunction) -> np.ndarray:
    """Matrix of u(S(theta)) in the space's orthonormal basis."""
    return blaschke_of_matrix(u, space.shift_matrix)


def project_onto_submodel(
    space: ModelSpace, f: ModelVector, divisor: InnerFunction
) -> ModelVector:
    """Orthogonal projection of f onto H(theta/divisor) inside H(theta).

    H(theta/d) is the orthocomplement in H(theta) of the invariant
    subspace d H^2 (-) theta H^2 = ran d(S(theta)).
    """
    if not inner.divides(divisor, space.theta):
        raise NotADivisor(f"{divisor!r} does not divide theta")
    if f.space is not space and f.space.theta != space.theta:
        raise ValueError("vector does not live in the given space")
    if divisor.is_one():
        return f
    delta = inner.quotient(space.theta, divisor)  # H(delta) is the target
    if delta.is_one():
        return ModelVector(space, np.zeros(space.dim, dtype=complex))
    op = functional_calculus(space, delta)
    u_mat, _, _ = np.linalg.svd(op)
    rank = space.theta.degree - delta.degree
    frame = u_mat[:, :rank]
    coords = f.coords - frame @ (frame.conj().T @ f.coords)
    return ModelVector(space, coords)
