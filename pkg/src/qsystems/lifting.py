"""Lifting chiral Q-systems into the product category ``C (x) C^opp``.

A chiral label a embeds as the pair (a, 0); fusion, F and R restrict
exactly (the second slot is trivial), so objects and morphism blocks carry
over by relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass

from .category import CategoryData, CategoryError, product_opposite
from .trees import Obj
from .morphisms import Morphism
from .qsystem import QSystem

__all__ = ["LiftMap", "lift_obj", "lift_morphism", "lift_qsystem",
           "theta_components"]


@dataclass(frozen=True)
class LiftMap:
    """The embedding ``a -> (a, 0)`` of a category into its product with the
    opposite category."""

    source: CategoryData
    target: CategoryData
    label_map: tuple[int, ...]

    @classmethod
    def into_product(cls, cat: CategoryData) -> "LiftMap":
        prod = product_opposite(cat)
        _, pairs = prod.product_structure
        index = {p: i for i, p in enumerate(pairs)}
        return cls(source=cat, target=prod,
                   label_map=tuple(index[(a, 0)] for a in cat.labels))

    def __call__(self, a: int) -> int:
        return self.label_map[a]


def lift_obj(X: Obj, L: LiftMap) -> Obj:
    if X.cat is not L.source:
        raise CategoryError("object not over the lift's source category")
    return Obj(L.target, {L(a): m for a, m in X.sectors()})


def lift_morphism(f: Morphism, L: LiftMap) -> Morphism:
    """Relabel a chiral morphism into the product category.

    The tree bases over lifted legs are in canonical positional bijection
    with the chiral tree bases (prefix charges (e, 0) are ordered like e),
    so the blocks transfer unchanged.
    """
    if f.cat is not L.source:
        raise CategoryError("morphism not over the lift's source category")
    return Morphism(L.target,
                    tuple(lift_obj(X, L) for X in f.src),
                    tuple(lift_obj(X, L) for X in f.dst),
                    {L(c): m for c, m in f.blocks.items()})


def lift_qsystem(A: QSystem, L: LiftMap | None = None) -> QSystem:
    """``A -> A (x) 1`` as a Q-system over ``product_opposite(A.cat)``."""
    if L is None:
        L = LiftMap.into_product(A.cat)
    return QSystem(L.target, lift_obj(A.theta, L), lift_morphism(A.w, L),
                   lift_morphism(A.x, L), name=f"lift[{A.name}]",
                   chiral_dim=A.chiral_dim)


def theta_components(Q2d: QSystem):
    """Coupling matrix of a product-category Q-system (pipeline alias)."""
    from .products import coupling_matrix
    return coupling_matrix(Q2d)
