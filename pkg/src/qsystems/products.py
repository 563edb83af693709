"""Braided products of Q-systems, centre projections, reduction, full centre.

The braided product of two Q-systems over the same category is

    theta = theta_1 theta_2,  w = (1 (x) w_2) w_1,
    x^pm  = (1 (x) eps^pm_{theta_1, theta_2} (x) 1)(x_1 (x) 1 (x) 1)(1 (x) x_2).

The left/right centre projections of any Q-system are

    p^pm = (r^dag (x) 1)(1 (x) eps^pm_{theta,theta}) x^(2),

with ``x^(2) = (x (x) 1) x`` and ``r = x w``; reducing by an intermediate
projection yields a Q-system again, commutative when the projection
satisfies the one-sided locality relation.  The (left) full centre of a
chiral Q-system A is the left centre of ``(A (x) 1) x^+ R`` with R the
canonical Q-system of ``C (x) C^opp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .category import CategoryData, CategoryError, modular_data
from .trees import Obj, tree_paths
from .morphisms import (Morphism, identity, compose, dagger, tensor, braid,
                        scalar, fuse_legs, group_dst_pair)
from .qsystem import QSystem, verify_qsystem, is_commutative, canonical_qsystem

__all__ = [
    "braided_product", "ProjectionInTheta", "centre_projection",
    "theta_trace", "reduce_qsystem", "left_centre", "right_centre",
    "full_centre", "right_full_centre", "CouplingMatrix", "coupling_matrix",
]


def braided_product(A1: QSystem, A2: QSystem, sign: int = +1) -> QSystem:
    """The braided product Q-system ``A1 x^sign A2`` (over one category).

    The result generally has ``dim Hom(1, theta) > 1``; it still satisfies
    all four Q-system relations, and its dimension is ``d_1 * d_2``.
    """
    if A1.cat is not A2.cat:
        raise CategoryError("braided product needs Q-systems over one category")
    cat = A1.cat
    t1, t2 = A1.theta, A2.theta
    id1 = identity(cat, (t1,))
    id2 = identity(cat, (t2,))
    w_pair = compose(tensor(id1, A2.w), A1.w)
    x_pair = compose(
        tensor(id1, braid(t1, t2, sign), id2),
        tensor(A1.x, id2, id2),
        tensor(id1, A2.x),
    )
    w = fuse_legs(w_pair, "dst")
    x = fuse_legs(group_dst_pair(x_pair, 2), "src")
    name = f"{A1.name} x{'+' if sign > 0 else '-'} {A2.name}"
    return QSystem(cat, w.dst[0], w, x, name=name)


@dataclass
class ProjectionInTheta:
    """A projection in Hom(theta, theta) with its locality diagnostics."""

    qsystem: QSystem
    p: Morphism
    side: int
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-9

    @property
    def satisfies_projection(self) -> bool:
        return (self.residuals["idempotent"] <= self.tol
                and self.residuals["selfadjoint"] <= self.tol)

    @property
    def satisfies_intermediate(self) -> bool:
        return all(self.residuals[k] <= self.tol
                   for k in ("pw", "pxp_left", "pxp_right"))

    @property
    def satisfies_left_centre_rel(self) -> bool:
        return self.residuals["centre_rel_left"] <= self.tol

    @property
    def satisfies_right_centre_rel(self) -> bool:
        return self.residuals["centre_rel_right"] <= self.tol

    def trace(self) -> float:
        return theta_trace(self.qsystem, self.p)


def _projection_residuals(A: QSystem, p: Morphism) -> dict[str, float]:
    cat = A.cat
    th = A.theta
    id_th = identity(cat, (th,))
    w, x = A.w, A.x
    pp = compose(p, p)
    res = {
        "idempotent": pp.distance(p),
        "selfadjoint": dagger(p).distance(p),
        "pw": compose(p, w).distance(w),
    }
    # intermediate relations: p theta(p) x = p x p = theta(p) x p
    pxp = compose(tensor(p, id_th), x, p)
    res["pxp_left"] = compose(tensor(p, p), x).distance(pxp)
    res["pxp_right"] = compose(tensor(id_th, p), x, p).distance(pxp)
    # one-sided locality: theta(p) x = eps^{+/-} p x
    theta_p_x = compose(tensor(id_th, p), x)
    px = compose(tensor(p, id_th), x)
    eps = braid(th, th, +1)
    res["centre_rel_left"] = theta_p_x.distance(compose(eps, px))
    res["centre_rel_right"] = theta_p_x.distance(compose(dagger(eps), px))
    return res


def centre_projection(A: QSystem, side: int = +1, tol: float = 1e-9) -> ProjectionInTheta:
    """The projection ``p^side`` cutting out the left (+) / right (-) centre.

    For a commutative Q-system both projections are the identity.
    """
    cat = A.cat
    th = A.theta
    id_th = identity(cat, (th,))
    r = compose(A.x, A.w)
    x2 = compose(tensor(A.x, id_th), A.x)
    p = compose(tensor(dagger(r), id_th), tensor(id_th, braid(th, th, side)), x2)
    # the raw composite is d * p for the projection p (r* x = d w*), hence 1/d
    p = (1.0 / A.d) * p
    return ProjectionInTheta(qsystem=A, p=p, side=side,
                             residuals=_projection_residuals(A, p), tol=tol)


def theta_trace(A: QSystem, p: Morphism) -> float:
    """The categorical trace ``r^dag (1 (x) p) r`` with ``r = x w``."""
    r = compose(A.x, A.w)
    val = scalar(compose(dagger(r), tensor(identity(A.cat, (A.theta,)), p), r))
    return float(np.real(val))


def reduce_qsystem(A: QSystem, proj: ProjectionInTheta | Morphism,
                   tol: float = 1e-9, verify: bool = True) -> QSystem:
    """The reduced Q-system cut out by an intermediate projection.

    The projection is factored as ``p = s s^dag`` with a deterministic
    isometry s (per-label eigenbasis, first significant component of each
    column made positive real, columns ordered by leading row).
    """
    if isinstance(proj, ProjectionInTheta):
        if not (proj.satisfies_projection and proj.satisfies_intermediate):
            raise CategoryError(
                "reduction requires an intermediate projection; residuals: "
                f"{proj.residuals}")
        p = proj.p
    else:
        p = proj
    cat = A.cat
    s_blocks = {}
    mults = {}
    for a, m in A.theta.sectors():
        block = p.block(a)
        cols = _isometry_columns(block, tol)
        if cols.shape[1]:
            s_blocks[a] = cols
            mults[a] = cols.shape[1]
    theta_p = Obj(cat, mults)
    s = Morphism(cat, (theta_p,), (A.theta,), s_blocks)
    # compression alone gives w'^dag w' = d_A; rescale to the standardness
    # of the reduced dimension (the unit property is scale-invariant here)
    dims = modular_data(cat).dims
    d_p = math.sqrt(theta_p.dim(dims))
    alpha = math.sqrt(d_p / A.d)
    w_p = alpha * compose(dagger(s), A.w)
    x_p = (1.0 / alpha) * compose(tensor(dagger(s), dagger(s)), A.x, s)
    B = QSystem(cat, theta_p, w_p, x_p, name=f"reduce[{A.name}]")
    if verify:
        report = verify_qsystem(B, max(tol, 1e-8))
        if not report.ok:
            raise CategoryError(f"reduction failed: {report.summary()}")
    return B


def _isometry_columns(block: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning the range of a projection block, with a
    deterministic phase and ordering convention."""
    vals, vecs = np.linalg.eigh(block)
    keep = [i for i, v in enumerate(vals) if v > 0.5]
    for i in keep:
        if abs(vals[i] - 1.0) > 1e-6:
            raise CategoryError(
                f"projection block has eigenvalue {vals[i]!r}, not 0/1")
    cols = []
    for i in keep:
        v = vecs[:, i].copy()
        lead = next(k for k in range(len(v)) if abs(v[k]) > 1e-8)
        v *= np.conj(v[lead]) / abs(v[lead])
        cols.append((lead, tuple(np.round(v.real, 9)), v))
    cols.sort(key=lambda t: (t[0], t[1]))
    if not cols:
        return np.zeros((block.shape[0], 0), dtype=complex)
    return np.stack([v for _, _, v in cols], axis=1)


def left_centre(A: QSystem, tol: float = 1e-9) -> QSystem:
    """The maximal commutative reduction ``C^+[A]``."""
    return reduce_qsystem(A, centre_projection(A, +1, tol), tol)


def right_centre(A: QSystem, tol: float = 1e-9) -> QSystem:
    """The maximal commutative reduction ``C^-[A]``."""
    return reduce_qsystem(A, centre_projection(A, -1, tol), tol)


def full_centre(A: QSystem, tol: float = 1e-9) -> QSystem:
    """The (left) full centre ``Z[A] = C^+[(A (x) 1) x^+ R]`` of a chiral
    Q-system, a commutative Q-system in ``C (x) C^opp`` with
    ``dim Theta = d_R^2``."""
    from .lifting import LiftMap, lift_qsystem
    cat = A.cat
    if not modular_data(cat).is_modular:
        raise CategoryError("the full centre requires a modular category")
    lifted = lift_qsystem(A, LiftMap.into_product(cat))
    R = canonical_qsystem(cat)
    C = braided_product(lifted, R, +1)
    Z = left_centre(C, tol)
    if not is_commutative(Z, max(tol, 1e-8)):
        raise CategoryError("full centre came out non-commutative")
    Z.name = f"fullcentre[{A.name}]"
    Z.chiral_dim = A.d
    return Z


def right_full_centre(A: QSystem, tol: float = 1e-9) -> QSystem:
    """``Z^-[A] = C^-[(A (x) 1) x^- R]`` (implemented by symmetry)."""
    from .lifting import LiftMap, lift_qsystem
    cat = A.cat
    if not modular_data(cat).is_modular:
        raise CategoryError("the full centre requires a modular category")
    lifted = lift_qsystem(A, LiftMap.into_product(cat))
    R = canonical_qsystem(cat)
    C = braided_product(lifted, R, -1)
    Z = right_centre(C, tol)
    Z.name = f"rightfullcentre[{A.name}]"
    Z.chiral_dim = A.d
    return Z


@dataclass
class CouplingMatrix:
    """Multiplicities ``Z[sigma, tau]`` of ``sigma (x) tau`` in Theta, for a
    Q-system over a product category."""

    base: CategoryData
    Z: np.ndarray

    def commutes_with_modular(self, tol: float = 1e-8) -> bool:
        md = modular_data(self.base)
        Zc = self.Z.astype(complex)
        return bool(np.max(np.abs(md.S @ Zc - Zc @ md.S)) <= tol
                    and np.max(np.abs(md.T @ Zc - Zc @ md.T)) <= tol)

    def total_dimension(self) -> float:
        d = modular_data(self.base).dims
        return float(d @ self.Z @ d)

    def __str__(self):
        return np.array2string(self.Z)


def coupling_matrix(Q2d: QSystem) -> CouplingMatrix:
    """Read off the coupling matrix of a Q-system in ``C (x) C^opp``."""
    if Q2d.cat.product_structure is None:
        raise CategoryError("coupling matrix needs a product-category Q-system")
    base, pairs = Q2d.cat.product_structure
    n = base.n_labels
    Z = np.zeros((n, n), dtype=int)
    for lab, m in Q2d.theta.sectors():
        a, b = pairs[lab]
        Z[a, b] += m
    return CouplingMatrix(base=base, Z=Z)
