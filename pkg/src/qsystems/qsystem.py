"""Q-systems: axioms, built-in examples, charged fields, the canonical one.

A Q-system is a triple ``(theta, w, x)`` with ``w : 1 -> theta`` and
``x : theta -> theta (x) theta`` satisfying

    unit:          (w^dag (x) 1) x = (1 (x) w^dag) x = 1
    associativity: (x (x) 1) x = (1 (x) x) x
    Frobenius:     x x^dag = (1 (x) x^dag)(x (x) 1)
    standardness:  w^dag w = x^dag x = d * 1,   d = sqrt(dim theta).

The unit property is normalized to 1 (not d * 1); standardness carries the
dimension factors.  Q-systems with ``dim Hom(1, theta) > 1`` (reducible
extensions, as produced by braided products) satisfy the same relations and
are verified by the same routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .category import CategoryData, CategoryError, modular_data, product_opposite
from .trees import Obj, tree_paths
from .morphisms import (Morphism, ConjugatePair, identity, compose, dagger,
                        tensor, braid, scalar)

__all__ = [
    "QSystem", "QSystemReport", "verify_qsystem", "is_commutative",
    "qsystem_dimension", "trivial_qsystem", "fermi_qsystem", "group_qsystem",
    "canonical_qsystem", "ChargedFieldBasis", "charged_fields",
    "qsystem_equal", "qsystem_isomorphic",
]


@dataclass
class QSystem:
    """A Q-system ``(theta, w, x)`` in a braided fusion category.

    ``chiral_dim`` records, for Q-systems produced as full centres, the
    dimension of the chiral Q-system they came from (used to normalize
    bimodule dimensions in the boundary classifier).
    """

    cat: CategoryData
    theta: Obj
    w: Morphism
    x: Morphism
    name: str = ""
    chiral_dim: float | None = None

    @property
    def dim_theta(self) -> float:
        dims = modular_data(self.cat).dims
        return self.theta.dim(dims)

    @property
    def d(self) -> float:
        """The Q-system dimension ``d = sqrt(dim theta)``."""
        return math.sqrt(self.dim_theta)

    def conjugate_pair(self) -> ConjugatePair:
        """``r = x w`` is a standard conjugate solution for theta."""
        r = compose(self.x, self.w)
        return ConjugatePair(obj=self.theta, r=r, rbar=r)

    def __repr__(self):
        return f"QSystem({self.name or self.theta!r}, d={self.d:.6g})"


@dataclass
class QSystemReport:
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL"
        body = ", ".join(f"{k}={v:.2e}" for k, v in self.residuals.items())
        return f"{status} ({body})"


def verify_qsystem(A: QSystem, tol: float = 1e-9) -> QSystemReport:
    """Residual norms of the four Q-system relations."""
    cat = A.cat
    th = A.theta
    id_th = identity(cat, (th,))
    w, x = A.w, A.x
    d = A.d

    unit_l = compose(tensor(dagger(w), id_th), x)
    unit_r = compose(tensor(id_th, dagger(w)), x)
    assoc_l = compose(tensor(x, id_th), x)
    assoc_r = compose(tensor(id_th, x), x)
    frob_l = compose(x, dagger(x))
    frob_r = compose(tensor(id_th, dagger(x)), tensor(x, id_th))
    res = {
        "unit_left": unit_l.distance(id_th),
        "unit_right": unit_r.distance(id_th),
        "associativity": assoc_l.distance(assoc_r),
        "frobenius": frob_l.distance(frob_r),
        "w_standardness": abs(scalar(compose(dagger(w), w)) - d),
        "x_standardness": compose(dagger(x), x).distance(d * id_th),
    }
    return QSystemReport(residuals=res, tol=tol)


def is_commutative(A: QSystem, tol: float = 1e-9) -> bool:
    """Whether ``eps_{theta,theta} x = x`` (the locality condition)."""
    return compose(braid(A.theta, A.theta, +1), A.x).distance(A.x) <= tol


def qsystem_dimension(A: QSystem) -> float:
    """``sqrt(dim theta)``; equals ``w^dag w`` for a verified Q-system."""
    return A.d


# -- built-in Q-systems ----------------------------------------------------


def trivial_qsystem(cat: CategoryData) -> QSystem:
    one = Obj.unit(cat)
    w = Morphism(cat, (), (one,), {0: np.array([[1.0]])})
    x = Morphism(cat, (one,), (one, one), {0: np.array([[1.0]])})
    return QSystem(cat, one, w, x, name=f"trivial[{cat.name}]", chiral_dim=1.0)


def fermi_qsystem(cat: CategoryData | None = None) -> QSystem:
    """The fermionic extension of the chiral Ising category:
    ``theta = id + tau``, dimension sqrt(2), graded-local (not commutative)."""
    from .category import build_builtin
    if cat is None:
        cat = build_builtin("ising")
    if cat.name != "ising":
        raise CategoryError("the Fermi Q-system lives in the Ising category")
    theta = Obj(cat, {0: 1, 1: 1})
    q = 2.0 ** 0.25
    w = Morphism(cat, (), (theta,), {0: np.array([[q]])})
    blocks = {}
    for c in (0, 1):
        paths = tree_paths(cat, (theta, theta), c)
        blocks[c] = np.full((len(paths), 1), 1.0 / q)
    x = Morphism(cat, (theta,), (theta, theta), blocks)
    return QSystem(cat, theta, w, x, name="fermi[ising]")


def group_qsystem(cat: CategoryData, subgroup) -> QSystem:
    """The Q-system of a fusion subgroup of a pointed category.

    ``subgroup`` is a list of labels closed under fusion and duals (e.g.
    ``[0, 3, 6]`` in pointed Z9).  The multiplication has trivial cocycle.
    """
    H = sorted(set(int(h) for h in subgroup))
    if 0 not in H:
        raise CategoryError("subgroup must contain the unit label")
    N = cat.ring.N
    for a in H:
        if cat.dual(a) not in H:
            raise CategoryError(f"subgroup not closed under duals at {a}")
        for b in H:
            outs = cat.fusion_outcomes(a, b)
            if len(outs) != 1:
                raise CategoryError("group_qsystem requires pointed fusion")
            if outs[0] not in H:
                raise CategoryError(f"subgroup not closed under fusion at ({a},{b})")
    theta = Obj(cat, {h: 1 for h in H})
    q = float(len(H)) ** 0.25
    w = Morphism(cat, (), (theta,), {0: np.array([[q]])})
    blocks = {}
    for c in cat.labels:
        paths = tree_paths(cat, (theta, theta), c)
        if paths:
            blocks[c] = np.full((len(paths), theta.mult(c)), 1.0 / q)
    x = Morphism(cat, (theta,), (theta, theta), blocks)
    name = "+".join(cat.label_name(h) for h in H)
    return QSystem(cat, theta, w, x, name=f"subgroup[{name}]")


def canonical_qsystem(cat: CategoryData, verify: bool = True,
                      tol: float = 1e-9) -> QSystem:
    """The canonical (regular) Q-system ``Theta = sum_rho rho (x) rhobar``
    in ``product_opposite(cat)``.

    The multiplication is supported on the diagonal fusion trees,

        X[(rho,rhobar), (sig,sigbar) -> (tau,taubar)]
            = d_R^{-1/2} sqrt(d_rho d_sig / d_tau),

    with ``d_R = sqrt(sum_rho d_rho^2)``.  It is always commutative.
    """
    prod = product_opposite(cat)
    base, pairs = prod.product_structure
    index = {p: i for i, p in enumerate(pairs)}
    dims = modular_data(cat).dims
    d_R = math.sqrt(float(np.sum(dims ** 2)))

    theta = Obj(prod, {index[(r, cat.dual(r))]: 1 for r in cat.labels})
    w = Morphism(prod, (), (theta,), {0: np.array([[math.sqrt(d_R)]])})
    blocks = {}
    for tau in cat.labels:
        t = index[(tau, cat.dual(tau))]
        paths = tree_paths(prod, (theta, theta), t)
        if not paths:
            continue
        col = np.zeros((len(paths), 1), dtype=complex)
        for row, path in enumerate(paths):
            (p1, _, _), (p2, _, _) = path
            rho = pairs[p1][0]
            sig = pairs[p2][0]
            col[row, 0] = math.sqrt(dims[rho] * dims[sig] / dims[tau] / d_R)
        blocks[t] = col
    x = Morphism(prod, (theta,), (theta, theta), blocks)
    A = QSystem(prod, theta, w, x, name=f"canonical[{cat.name}]", chiral_dim=1.0)
    if verify:
        report = verify_qsystem(A, tol)
        if not report.ok:
            raise CategoryError(
                f"canonical Q-system construction failed: {report.summary()}")
    return A


# -- charged fields ---------------------------------------------------------


@dataclass
class ChargedFieldBasis:
    """Isometry-normalized charged-field intertwiners of a Q-system.

    One entry per unit of multiplicity: ``W[rho, k] : rho -> theta`` with
    ``W^dag W = d_A / dim(rho)`` and completeness
    ``sum (dim rho / d_A) W W^dag = 1``.
    """

    qsystem: QSystem
    entries: list[tuple[int, int, Morphism]]

    def w_rho(self, rho: int, k: int = 0) -> Morphism:
        for r, i, W in self.entries:
            if r == rho and i == k:
                return W
        raise KeyError(f"no charged field for sector {rho}, index {k}")

    @property
    def sectors(self) -> list[tuple[int, int]]:
        return [(r, k) for r, k, _ in self.entries]


def charged_fields(A: QSystem) -> ChargedFieldBasis:
    cat = A.cat
    dims = modular_data(cat).dims
    d_A = A.d
    entries = []
    for rho, m in A.theta.sectors():
        norm = math.sqrt(d_A / dims[rho])
        for k in range(m):
            vec = np.zeros((m, 1), dtype=complex)
            vec[k, 0] = norm
            W = Morphism(cat, (Obj.simple(cat, rho),), (A.theta,), {rho: vec})
            entries.append((rho, k, W))
    return ChargedFieldBasis(qsystem=A, entries=entries)


# -- comparison up to gauge -------------------------------------------------


def qsystem_equal(A: QSystem, B: QSystem, tol: float = 1e-8) -> bool:
    """Entrywise equality of two Q-systems (same theta, w and x blocks)."""
    return (A.cat is B.cat and A.theta == B.theta
            and A.w.distance(B.w) <= tol and A.x.distance(B.x) <= tol)


def qsystem_isomorphic(A: QSystem, B: QSystem, tol: float = 1e-8) -> bool:
    """Whether two multiplicity-free Q-systems over the same category differ
    only by per-sector phases of the theta basis.

    Searches for unit phases with ``x_B[rho,sig;tau] = phi_rho phi_sig /
    phi_tau * x_A[rho,sig;tau]`` (branching over square-root signs where an
    equation determines a phase only quadratically); coefficient magnitudes
    must agree entrywise.
    """
    if A.cat is not B.cat or A.theta != B.theta:
        return False
    if qsystem_equal(A, B, tol):
        return True
    if any(m > 1 for _, m in A.theta.sectors()):
        raise CategoryError("gauge comparison implemented for multiplicity-free theta")
    cat = A.cat
    eqs = []
    for tau, _ in A.theta.sectors():
        pa = A.x.block(tau)
        pb = B.x.block(tau)
        for row, path in enumerate(tree_paths(cat, (A.theta, A.theta), tau)):
            (rho, _, _), (sig, _, _) = path
            za, zb = pa[row, 0], pb[row, 0]
            if abs(abs(za) - abs(zb)) > tol:
                return False
            if abs(za) > tol:
                eqs.append((rho, sig, tau, zb / za))
    if abs(abs(scalar(compose(dagger(A.w), B.w))) - A.d) > max(tol, 1e-8):
        return False
    sectors = [a for a, _ in A.theta.sectors()]
    check_tol = max(tol, 1e-7)

    def propagate(phases):
        phases = dict(phases)
        changed = True
        while changed:
            changed = False
            for rho, sig, tau, ratio in eqs:
                kr, ks, kt = rho in phases, sig in phases, tau in phases
                if kr and ks and kt:
                    if abs(phases[rho] * phases[sig] / phases[tau] - ratio) > check_tol:
                        return None
                elif kr and ks:
                    phases[tau] = phases[rho] * phases[sig] / ratio
                    changed = True
                elif rho != sig and kt and (kr or ks):
                    if kr:
                        phases[sig] = ratio * phases[tau] / phases[rho]
                    else:
                        phases[rho] = ratio * phases[tau] / phases[sig]
                    changed = True
        return phases

    def search(phases):
        phases = propagate(phases)
        if phases is None:
            return False
        for rho, sig, tau, ratio in eqs:
            if rho == sig and rho not in phases and tau in phases:
                root = np.sqrt(ratio * phases[tau])
                return any(search({**phases, rho: s * root}) for s in (1, -1))
        for a in sectors:
            if a not in phases:
                return search({**phases, a: 1.0 + 0.0j})
        return True

    return search({0: 1.0 + 0.0j})
