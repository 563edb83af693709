"""Classification of phase-boundary conditions between two local extensions.

For two commutative Q-systems ``A^L``, ``A^R`` over the same product
category, the centre of the braided product ``A^L x^- A^R`` is the
commutative *-algebra on ``Hom(Theta^R, Theta^L)`` spanned by
``T = W^L_rho W^R_rho{}^dag`` with product

    T1 * T2 = X^L{}^dag (1 (x) T1)(T2 (x) 1) X^R

and Frobenius conjugation as involution.  Its minimal idempotents are the
boundary conditions; the eigenvalue ``pi_m(B_rho)`` of each basis element
in the m-th representation is the "angle" between the left and right
charged fields, and the matrix

    S^{AB}[m, T] = dim(beta_m) sqrt(dim rho_T) pi_m(B_T) / (d_A d_B d_R)

is unitary and obeys a generalized Verlinde formula for the fusion of the
underlying bimodules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .category import CategoryData, CategoryError, modular_data
from .morphisms import (Morphism, identity, compose, dagger, tensor, scalar)
from .qsystem import QSystem, is_commutative, charged_fields, canonical_qsystem

__all__ = [
    "CentreAlgebra", "centre_algebra", "cardy_algebra", "BoundaryCondition",
    "classify", "verlinde_table", "GeneralizedS", "s_matrix",
    "recovered_fusion",
]


@dataclass
class CentreAlgebra:
    """The centre of ``A^L x^- A^R`` in its charged-field basis.

    ``basis[i] = (rho, k, l)`` labels ``T_i = W^L_{rho,k} W^R_{rho,l}^dag``;
    ``f[i, j, k]`` are the structure constants ``T_i * T_j = sum_k f[ijk] T_k``
    and ``star[i, j]`` expands the Frobenius conjugate of ``T_i``.
    """

    left: QSystem
    right: QSystem
    basis: list[tuple[int, int, int]]
    f: np.ndarray
    star: np.ndarray
    unit_index: int
    dims_T: np.ndarray      # dim(rho_T) per basis element
    d_R: float              # canonical dimension sqrt(sum_chiral d^2)
    kappa: float            # d_A d_B d_R (bimodule-dimension normalization)
    T_morphisms: list[Morphism] | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def multiply(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abc->c", u, v, self.f)

    def conjugate(self, u: np.ndarray) -> np.ndarray:
        return self.star.T @ np.conj(u)

    def unit_vector(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[self.unit_index] = 1.0
        return e

    def left_multiplication(self, i: int) -> np.ndarray:
        return self.f[i].T.copy()  # (out, in) = f[i, in, out]^T

    def sector_names(self) -> list[str]:
        cat = self.left.cat
        out = []
        for rho, k, l in self.basis:
            name = cat.label_name(rho)
            if k or l:
                name += f"[{k},{l}]"
            out.append(name)
        return out


def _chiral_d_R(cat: CategoryData) -> float:
    if cat.product_structure is None:
        raise CategoryError("boundary classification expects a product category")
    base, _ = cat.product_structure
    dims = modular_data(base).dims
    return math.sqrt(float(np.sum(dims ** 2)))


def star_product(AL: QSystem, AR: QSystem, T1: Morphism, T2: Morphism) -> Morphism:
    """``T1 * T2 = X^L{}^dag (1 (x) T1)(T2 (x) 1) X^R`` in Hom(Theta^R, Theta^L)."""
    cat = AL.cat
    idL = identity(cat, (AL.theta,))
    idR = identity(cat, (AR.theta,))
    return compose(dagger(AL.x), tensor(idL, T1), tensor(T2, idR), AR.x)


def frobenius_conjugate(AL: QSystem, AR: QSystem, S: Morphism) -> Morphism:
    """The Frobenius conjugation Hom(Theta^L, Theta^R) -> Hom(Theta^R, Theta^L),
    ``S -> R^R{}^dag Theta^R(S R^L)`` with ``R^Y = X^Y W^Y``."""
    cat = AL.cat
    rL = compose(AL.x, AL.w)
    rR = compose(AR.x, AR.w)
    idL = identity(cat, (AL.theta,))
    idR = identity(cat, (AR.theta,))
    inner = compose(tensor(S, idL), rL)             # () -> (Theta_R, Theta_L)
    return compose(tensor(dagger(rR), idL), tensor(idR, inner))


def centre_algebra(AL: QSystem, AR: QSystem, tol: float = 1e-9) -> CentreAlgebra:
    """Structure constants and conjugation of the boundary centre algebra.

    Both Q-systems must be commutative (the identification of the relative
    commutant with the centre requires it) and live in the same product
    category.
    """
    if AL.cat is not AR.cat:
        raise CategoryError("boundary needs both Q-systems over one category")
    cat = AL.cat
    if not is_commutative(AL, 1e-8) or not is_commutative(AR, 1e-8):
        raise CategoryError("centre algebra requires commutative Q-systems")
    d_R = _chiral_d_R(cat)
    dims = modular_data(cat).dims
    cfL = charged_fields(AL)
    cfR = charged_fields(AR)

    basis = []
    Ts = []
    for rho, mL in AL.theta.sectors():
        mR = AR.theta.mult(rho)
        for k in range(mL):
            for l in range(mR):
                basis.append((rho, k, l))
                Ts.append(compose(cfL.w_rho(rho, k), dagger(cfR.w_rho(rho, l))))
    n = len(basis)
    if n == 0:
        raise CategoryError("no common sectors: empty centre algebra")

    dL, dRq = AL.d, AR.d

    def extract(G: Morphism) -> np.ndarray:
        """Coefficients of G in the T basis."""
        out = np.zeros(n, dtype=complex)
        for i, (tau, k, l) in enumerate(basis):
            val = compose(dagger(cfL.w_rho(tau, k)), G, cfR.w_rho(tau, l))
            out[i] = val.block(tau)[0, 0] * dims[tau] ** 2 / (dL * dRq)
        return out

    f = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            coeffs = extract(star_product(AL, AR, Ts[i], Ts[j]))
            f[i, j] = coeffs
            f[j, i] = coeffs  # the *-product is commutative here
    star = np.zeros((n, n), dtype=complex)
    for i in range(n):
        star[i] = extract(frobenius_conjugate(AL, AR, dagger(Ts[i])))

    unit_index = basis.index((0, 0, 0))
    alg = CentreAlgebra(
        left=AL, right=AR, basis=basis, f=f, star=star, unit_index=unit_index,
        dims_T=np.array([dims[rho] for rho, _, _ in basis]),
        d_R=d_R,
        kappa=(AL.chiral_dim or 1.0) * (AR.chiral_dim or 1.0) * d_R,
        T_morphisms=Ts,
    )
    _check_algebra(alg, tol)
    return alg


def _check_algebra(alg: CentreAlgebra, tol: float):
    n = alg.dim
    dev_comm = float(np.max(np.abs(alg.f - alg.f.transpose(1, 0, 2))))
    unit_rows = alg.f[alg.unit_index]
    dev_unit = float(np.max(np.abs(unit_rows - np.eye(n))))
    if max(dev_comm, dev_unit) > max(tol, 1e-8):
        raise CategoryError(
            f"centre algebra inconsistent: commutativity {dev_comm:.2e}, "
            f"unit law {dev_unit:.2e}")


def cardy_algebra(cat: CategoryData) -> CentreAlgebra:
    """The Cardy-case centre algebra of a modular category, from fusion data
    only: ``f[rho,sig,tau] = N[rho,sig,tau] dim(tau)/(dim(rho) dim(sig))``.

    Entrywise equal to ``centre_algebra(canonical, canonical)`` with basis
    element i realized on the diagonal product sector ``(rho_i, rhobar_i)``.
    """
    md = modular_data(cat)
    if not md.is_modular:
        raise CategoryError("the Cardy algebra requires a modular category")
    n = cat.n_labels
    dims = md.dims
    N = cat.ring.N
    prod = None
    try:
        from .category import product_opposite
        prod = product_opposite(cat)
    except CategoryError:  # pragma: no cover
        pass
    _, pairs = prod.product_structure
    index = {p: i for i, p in enumerate(pairs)}
    basis = [(index[(r, cat.dual(r))], 0, 0) for r in range(n)]
    f = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            for c in cat.fusion_outcomes(a, b):
                f[a, b, c] = N[a, b, c] * dims[c] / (dims[a] * dims[b])
    star = np.zeros((n, n), dtype=complex)
    for a in range(n):
        star[a, cat.dual(a)] = 1.0
    d_R = math.sqrt(float(np.sum(dims ** 2)))
    AL = canonical_qsystem(cat)
    return CentreAlgebra(
        left=AL, right=AL, basis=basis, f=f, star=star, unit_index=0,
        dims_T=dims ** 2,  # dim(rho (x) rhobar) = d_rho^2
        d_R=d_R, kappa=d_R, T_morphisms=None,
    )


@dataclass
class BoundaryCondition:
    """One irreducible representation of the centre: a minimal idempotent,
    the values ``pi_m(B_T)`` and the recovered bimodule dimension."""

    index: int
    idempotent: np.ndarray
    values: np.ndarray
    dim_beta: float

    def value_for(self, alg: CentreAlgebra, rho: int, k: int = 0, l: int = 0) -> complex:
        return complex(self.values[alg.basis.index((rho, k, l))])


def classify(alg: CentreAlgebra, tol: float = 1e-9, cluster_tol: float = 1e-7,
             seed: int = 7, max_attempts: int = 8) -> list[BoundaryCondition]:
    """Minimal idempotents of the centre algebra by simultaneous
    diagonalization of the (commuting, normal) left-multiplication operators.

    A random self-adjoint element is diagonalized; degenerate spectra are
    retried with fresh randomness and reported as an error beyond
    `max_attempts`.  Conditions are sorted by (dim_beta, value vector) for
    deterministic output.
    """
    n = alg.dim
    rng = np.random.default_rng(seed)
    L = np.stack([alg.left_multiplication(i) for i in range(n)])

    vecs = None
    for _ in range(max_attempts):
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c = c + alg.star.T @ np.conj(c)     # self-adjoint combination
        H = np.einsum("a,aij->ij", c, L)
        vals, V = np.linalg.eig(H)
        order = np.argsort(vals.real + 1e-3 * vals.imag)
        vals, V = vals[order], V[:, order]
        gaps = np.abs(np.diff(vals))
        scale = max(1.0, float(np.max(np.abs(vals))))
        if n == 1 or np.all(gaps > cluster_tol * scale):
            vecs = V
            break
    if vecs is None:
        raise CategoryError(
            "could not separate the joint spectrum of the centre algebra "
            f"(degenerate beyond {cluster_tol} after {max_attempts} attempts)")

    # characters pi_m(B_i) from the joint eigenvectors
    P = np.zeros((n, n), dtype=complex)  # P[i, m]
    for m in range(n):
        v = vecs[:, m]
        j = int(np.argmax(np.abs(v)))
        for i in range(n):
            P[i, m] = (L[i] @ v)[j] / v[j]
    # idempotent coefficient vectors: columns of (P^T)^{-1}
    Q = np.linalg.inv(P.T)
    idempotents = [Q[:, m] for m in range(n)]

    unit = alg.unit_vector()
    dev = float(np.max(np.abs(sum(idempotents) - unit)))
    for m in range(n):
        em = idempotents[m]
        dev = max(dev, float(np.max(np.abs(alg.multiply(em, em) - em))))
        dev = max(dev, float(np.max(np.abs(alg.conjugate(em) - em))))
        for m2 in range(m + 1, n):
            dev = max(dev, float(np.max(np.abs(alg.multiply(em, idempotents[m2])))))
    if dev > max(tol, 1e-8):
        raise CategoryError(f"idempotent system fails its defining equations "
                            f"by {dev:.2e}")

    conds = []
    for m in range(n):
        values = P[:, m].copy()
        if abs(values[alg.unit_index] - 1.0) > max(tol, 1e-8):
            raise CategoryError("character does not fix the unit")
        weight = float(np.sum(alg.dims_T * np.abs(values) ** 2))
        dim_beta = alg.kappa / math.sqrt(weight)
        conds.append(BoundaryCondition(index=m, idempotent=idempotents[m],
                                       values=values, dim_beta=dim_beta))
    conds.sort(key=lambda bc: (round(bc.dim_beta, 9),
                               tuple((round(z.real, 9), round(z.imag, 9))
                                     for z in bc.values)))
    for m, bc in enumerate(conds):
        bc.index = m
    return conds


def verlinde_table(cat: CategoryData) -> np.ndarray:
    """Closed-form Cardy boundary values
    ``table[sigma, rho] = S[rho,sigma] S[0,0] / (S[rho,0] S[0,sigma])``,
    row sigma being one boundary condition."""
    md = modular_data(cat)
    if not md.is_modular:
        raise CategoryError("the Verlinde table requires a modular category")
    S = md.S
    return np.array([[S[rho, sig] * S[0, 0] / (S[rho, 0] * S[0, sig])
                      for rho in cat.labels] for sig in cat.labels])


@dataclass
class GeneralizedS:
    """The unitary overlap matrix between boundary conditions and the
    charged-field basis."""

    matrix: np.ndarray      # (m, T)
    conditions: list[BoundaryCondition]
    basis: list[tuple[int, int, int]]
    unitarity_dev: float


def s_matrix(conds: list[BoundaryCondition], alg: CentreAlgebra,
             tol: float = 1e-8) -> GeneralizedS:
    """``S^{AB}[m, T] = dim(beta_m) sqrt(dim rho_T) pi_m(B_T) / kappa``;
    raises when the result is not unitary (a misclassification signal)."""
    rows = []
    for bc in conds:
        rows.append(bc.dim_beta * np.sqrt(alg.dims_T) * bc.values / alg.kappa)
    M = np.array(rows)
    dev = float(np.max(np.abs(M @ M.conj().T - np.eye(M.shape[0]))))
    if dev > tol:
        raise CategoryError(f"generalized S-matrix is not unitary ({dev:.2e})")
    return GeneralizedS(matrix=M, conditions=conds, basis=list(alg.basis),
                        unitarity_dev=dev)


def recovered_fusion(S_ab: GeneralizedS, S_bc: GeneralizedS, S_ac: GeneralizedS,
                     alg: CentreAlgebra, scp=None,
                     tol: float = 1e-6) -> np.ndarray:
    """Bimodule fusion multiplicities from generalized S-matrices.

    Multiplicity-free case (default):

        N[m1, m2, m3] = sum_T  d_R / sqrt(dim rho_T)
                        * S^{AB}[m1,T] S^{BC}[m2,T] conj(S^{AC}[m3,T]).

    With multiplicities, pass ``scp[t3, t1, t2]`` = the pairing
    ``(T_3, T_1 T_2)``; the general formula

        N = sum_{T1,T2,T3} dim(rho)^{3/2} / d_R^2 * (T3, T1 T2)
            * S^{AB}[m1,T1] S^{BC}[m2,T2] conj(S^{AC}[m3,T3])

    is used, where dim(rho)^{3/2} collects the three basis normalizations.
    Entries must be nonnegative integers within `tol`.
    """
    d_R = alg.d_R
    dims_T = alg.dims_T
    if scp is None:
        weights = d_R / np.sqrt(dims_T)
        N = np.einsum("t,at,bt,ct->abc", weights, S_ab.matrix, S_bc.matrix,
                      np.conj(S_ac.matrix))
    else:
        root = np.sqrt(dims_T)
        pref = (root[:, None, None] * root[None, :, None]
                * root[None, None, :]) / d_R ** 2
        N = np.einsum("xyz,ay,bz,cx->abc", pref * scp, S_ab.matrix,
                      S_bc.matrix, np.conj(S_ac.matrix))
    rounded = np.round(N.real)
    dev = float(np.max(np.abs(N - rounded)))
    if dev > tol or np.min(rounded) < -0.5:
        raise CategoryError(
            f"recovered fusion multiplicities are not nonnegative integers "
            f"(deviation {dev:.2e})")
    return rounded.astype(int)
