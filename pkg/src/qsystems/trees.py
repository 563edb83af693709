"""Objects and canonical fusion-tree bases.

An :class:`Obj` is a direct sum of simple labels with multiplicities.  A
list of objects ("legs") spans a tensor product; its Hom spaces are indexed
by left-associated fusion trees.  A tree over legs ``(X_1, ..., X_n)`` with
total charge ``c`` is stored as a tuple of steps ``(a_k, i_k, e_k)`` where
``a_k`` is the simple label chosen in ``X_k``, ``i_k < mult(X_k, a_k)`` its
multiplicity index and ``e_k`` the running charge after fusing the k-th leg
(``e_1 = a_1`` and ``e_n = c``).  Trees are ordered by (prefix charge,
prefix tree, last sector) recursively, which fixes every basis once and for
all.

:func:`split_data` computes the unitary relating the tree basis of
``legs`` to the (left trees) x (right trees) x (pair channel) basis of a
two-block grouping; all F-symbol bookkeeping of the package funnels through
this one routine.  Results are memoized per category with insert-only
caches, so sharing categories across threads is safe (a racing recompute
produces the identical value).
"""

from __future__ import annotations

import itertools

import numpy as np

from .category import CategoryData, CategoryError

__all__ = ["Obj", "tree_paths", "fuse_obj", "SplitBlock", "split_data"]


class Obj:
    """A finite direct sum of simple objects, ``⊕_a mult[a] · a``."""

    __slots__ = ("cat", "mults")

    def __init__(self, cat: CategoryData, mults):
        n = cat.n_labels
        vec = [0] * n
        if isinstance(mults, dict):
            for a, m in mults.items():
                vec[a] = int(m)
        else:
            for a, m in mults:
                vec[a] = int(m)
        if any(m < 0 for m in vec):
            raise CategoryError("negative multiplicity in object")
        self.cat = cat
        self.mults = tuple(vec)

    @classmethod
    def simple(cls, cat: CategoryData, a: int) -> "Obj":
        return cls(cat, {a: 1})

    @classmethod
    def unit(cls, cat: CategoryData) -> "Obj":
        return cls(cat, {0: 1})

    def sectors(self):
        """Nonzero (label, multiplicity) pairs in ascending label order."""
        return [(a, m) for a, m in enumerate(self.mults) if m]

    def mult(self, a: int) -> int:
        return self.mults[a]

    @property
    def is_zero(self) -> bool:
        return not any(self.mults)

    def dim(self, dims: np.ndarray | None = None) -> float:
        if dims is None:
            from .category import modular_data
            dims = modular_data(self.cat).dims
        return float(sum(m * dims[a] for a, m in self.sectors()))

    def bar(self) -> "Obj":
        """The conjugate object (duals of all labels, same multiplicities)."""
        return Obj(self.cat, {self.cat.dual(a): m for a, m in self.sectors()})

    def __eq__(self, other):
        return (isinstance(other, Obj) and other.cat is self.cat
                and other.mults == self.mults)

    def __hash__(self):
        return hash((self.cat._id, self.mults))

    def __repr__(self):
        parts = []
        for a, m in self.sectors():
            name = self.cat.label_name(a)
            parts.append(name if m == 1 else f"{m}*{name}")
        return "Obj(" + (" + ".join(parts) if parts else "0") + ")"


def _legs_key(legs) -> tuple:
    return tuple(x.mults for x in legs)


def tree_paths(cat: CategoryData, legs: tuple, c: int) -> list:
    """Ordered basis of fusion trees over `legs` with total charge `c`."""
    key = ("paths", _legs_key(legs), c)
    cached = cat._tree_cache.get(key)
    if cached is not None:
        return cached
    if len(legs) == 0:
        paths = [()] if c == 0 else []
    elif len(legs) == 1:
        paths = [((c, i, c),) for i in range(legs[0].mult(c))]
    else:
        N = cat.ring.N
        last = legs[-1]
        paths = []
        for e in cat.labels:
            prefix = tree_paths(cat, legs[:-1], e)
            if not prefix:
                continue
            for p in prefix:
                for b, m in last.sectors():
                    if N[e, b, c]:
                        paths.extend(p + ((b, j, c),) for j in range(m))
    cat._tree_cache[key] = paths
    return paths


def _path_index(cat, legs, c) -> dict:
    key = ("pidx", _legs_key(legs), c)
    cached = cat._tree_cache.get(key)
    if cached is not None:
        return cached
    idx = {p: i for i, p in enumerate(tree_paths(cat, legs, c))}
    cat._tree_cache[key] = idx
    return idx


def fuse_obj(cat: CategoryData, legs: tuple) -> Obj:
    """The tensor product of `legs` as a single object; its canonical basis
    at charge c is identified positionally with ``tree_paths(legs, c)``."""
    return Obj(cat, {c: len(tree_paths(cat, legs, c)) for c in cat.labels})


class SplitBlock:
    """Basis change at one total charge between the tree basis of n legs and
    the grouped basis (left tree a) x (right tree b) x (a b -> c).

    Attributes
    ----------
    cols : list of (a, b, ia, ib)
        Column labels: channel pair and indices into the left/right tree
        bases; ordered by (a, b) ascending, then ia-major, ib-minor.
    U : ndarray, shape (n_paths, n_cols)
        Unitary mapping grouped-basis coordinates to tree coordinates.
    """

    __slots__ = ("cols", "U", "col_index")

    def __init__(self, cols, U):
        self.cols = cols
        self.U = U
        self.col_index = {col: i for i, col in enumerate(cols)}


def split_data(cat: CategoryData, legs: tuple, k: int) -> dict:
    """Splitting unitaries of `legs` into ``legs[:k]`` and ``legs[k:]``,
    one :class:`SplitBlock` per total charge with a nonempty basis."""
    key = (_legs_key(legs), k)
    cached = cat._split_cache.get(key)
    if cached is not None:
        return cached
    n = len(legs)
    if not 0 <= k <= n:
        raise ValueError(f"split position {k} out of range for {n} legs")
    result = {}
    if k == 0 or k == n:
        for c in cat.labels:
            paths = tree_paths(cat, legs, c)
            if not paths:
                continue
            if k == 0:
                cols = [(0, c, 0, ib) for ib in range(len(paths))]
            else:
                cols = [(c, 0, ia, 0) for ia in range(len(paths))]
            result[c] = SplitBlock(cols, np.eye(len(paths), dtype=complex))
    elif n - k == 1:
        result = _split_last(cat, legs, k)
    else:
        result = _split_recursive(cat, legs, k)
    cat._split_cache[key] = result
    return result


def _channel_cols(cat, legs, k, c):
    """Canonically ordered grouped-basis columns at charge c."""
    N = cat.ring.N
    cols = []
    for a in cat.labels:
        na = len(tree_paths(cat, legs[:k], a))
        if not na:
            continue
        for b in cat.labels:
            if not N[a, b, c]:
                continue
            nb = len(tree_paths(cat, legs[k:], b))
            if not nb:
                continue
            cols.extend((a, b, ia, ib)
                        for ia in range(na) for ib in range(nb))
    return cols


def _split_last(cat, legs, k):
    """Split off a single trailing leg: a pure re-indexing of the tree basis."""
    result = {}
    last = legs[-1]
    for c in cat.labels:
        paths = tree_paths(cat, legs, c)
        if not paths:
            continue
        cols = _channel_cols(cat, legs, k, c)
        U = np.zeros((len(paths), len(cols)), dtype=complex)
        pidx = {}
        for a in cat.labels:
            for ia, p in enumerate(tree_paths(cat, legs[:k], a)):
                pidx[(a, p)] = ia
        col_index = {col: i for i, col in enumerate(cols)}
        for row, path in enumerate(paths):
            prefix, (b, j, _) = path[:-1], path[-1]
            a = prefix[-1][2] if prefix else 0
            U[row, col_index[(a, b, pidx[(a, prefix)], j)]] = 1.0
        result[c] = SplitBlock(cols, U)
    return result


def _split_recursive(cat, legs, k):
    """Split with >= 2 trailing legs, via the (n-1)-leg split and one F-move.

    <path | a, ta, b, tb> = sum_g conj(F[a, e', b_n, c, g, b])
                            * <p | a, ta, e', tb'>_{n-1 legs at charge g}
    where tb = tb' + ((b_n, j), b) and path = p + ((b_n, j), c).
    """
    N = cat.ring.N
    prev = split_data(cat, legs[:-1], k)
    right = legs[k:]
    right_prefix = right[:-1]
    result = {}
    for c in cat.labels:
        paths = tree_paths(cat, legs, c)
        if not paths:
            continue
        cols = _channel_cols(cat, legs, k, c)
        U = np.zeros((len(paths), len(cols)), dtype=complex)
        row_of = _path_index(cat, legs, c)
        for ci, (a, b, ia, ib) in enumerate(cols):
            tb = tree_paths(cat, right, b)[ib]
            tb_prefix, (bn, j, _) = tb[:-1], tb[-1]
            e1 = tb_prefix[-1][2]
            ib1 = _path_index(cat, right_prefix, e1)[tb_prefix]
            for g in cat.labels:
                if not (N[a, e1, g] and N[g, bn, c]):
                    continue
                blk = prev.get(g)
                if blk is None:
                    continue
                pci = blk.col_index.get((a, e1, ia, ib1))
                if pci is None:
                    continue
                coeff = np.conj(cat.f_symbol(a, e1, bn, c, g, b))
                if coeff == 0:
                    continue
                column = blk.U[:, pci]
                for pri in np.nonzero(column)[0]:
                    p = tree_paths(cat, legs[:-1], g)[pri]
                    U[row_of[p + ((bn, j, c),)], ci] += coeff * column[pri]
        result[c] = SplitBlock(cols, U)
    return result
