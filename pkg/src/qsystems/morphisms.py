"""Intertwiners between direct sums of simple objects, in fusion-tree bases.

A :class:`Morphism` maps the tensor product of its source legs to that of
its target legs and is stored blockwise per total charge; the block at
charge ``c`` is a matrix from source trees to target trees.  Composition is
blockwise matrix multiplication; the monoidal product, braiding and
conjugation are assembled from the category's F/R data through
:func:`qsystems.trees.split_data`.

Morphisms whose source is the empty leg tuple are vectors in
``Hom(1, target)``; :func:`scalar` extracts the number from an endomorphism
of the unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .category import CategoryData, CategoryError, modular_data
from .trees import Obj, fuse_obj, split_data, tree_paths

__all__ = [
    "Morphism", "identity", "compose", "dagger", "tensor", "braid",
    "as_single", "fuse_legs", "group_pair", "group_src_pair", "group_dst_pair",
    "ConjugatePair", "conjugate_solution", "scalar", "trace_pair",
    "random_endomorphism",
]


class Morphism:
    """An intertwiner between tensor products of objects.

    Parameters
    ----------
    cat : CategoryData
    src, dst : tuple of Obj
        Source and target legs.  ``()`` is the monoidal unit.
    blocks : dict
        Per-charge matrices of shape ``(n_target_trees, n_source_trees)``;
        absent charges are zero.
    """

    __slots__ = ("cat", "src", "dst", "blocks")

    def __init__(self, cat, src, dst, blocks):
        self.cat = cat
        self.src = tuple(src)
        self.dst = tuple(dst)
        self.blocks = {}
        for c, m in blocks.items():
            m = np.asarray(m, dtype=complex)
            shape = (len(tree_paths(cat, self.dst, c)),
                     len(tree_paths(cat, self.src, c)))
            if m.shape != shape:
                raise CategoryError(
                    f"block at charge {c} has shape {m.shape}, expected {shape}")
            if np.any(m):
                self.blocks[c] = m

    def block(self, c: int) -> np.ndarray:
        got = self.blocks.get(c)
        if got is not None:
            return got
        return np.zeros((len(tree_paths(self.cat, self.dst, c)),
                         len(tree_paths(self.cat, self.src, c))), dtype=complex)

    def __add__(self, other):
        _check_same_type(self, other)
        charges = set(self.blocks) | set(other.blocks)
        return Morphism(self.cat, self.src, self.dst,
                        {c: self.block(c) + other.block(c) for c in charges})

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, z):
        return Morphism(self.cat, self.src, self.dst,
                        {c: z * m for c, m in self.blocks.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def norm(self) -> float:
        """Frobenius norm over all blocks."""
        return math.sqrt(sum(float(np.sum(np.abs(m) ** 2))
                             for m in self.blocks.values()))

    def distance(self, other) -> float:
        return (self - other).norm()

    def __repr__(self):
        return (f"Morphism({self.src} -> {self.dst}, "
                f"charges {sorted(self.blocks)})")


def _check_same_type(f: Morphism, g: Morphism):
    if f.cat is not g.cat or f.src != g.src or f.dst != g.dst:
        raise CategoryError("morphism type mismatch")


def identity(cat: CategoryData, legs) -> Morphism:
    legs = tuple(legs)
    blocks = {}
    for c in cat.labels:
        n = len(tree_paths(cat, legs, c))
        if n:
            blocks[c] = np.eye(n, dtype=complex)
    return Morphism(cat, legs, legs, blocks)


def compose(*fs: Morphism) -> Morphism:
    """Composition ``f_1 ∘ f_2 ∘ ... ∘ f_k`` (rightmost acts first)."""
    if not fs:
        raise ValueError("compose() needs at least one morphism")
    f = fs[0]
    for g in fs[1:]:
        f = _compose2(f, g)
    return f


def _compose2(f: Morphism, g: Morphism) -> Morphism:
    if f.cat is not g.cat:
        raise CategoryError("morphisms over different categories")
    if f.src != g.dst:
        raise CategoryError(f"cannot compose: {f.src} != {g.dst}")
    blocks = {}
    for c in set(f.blocks) & set(g.blocks):
        blocks[c] = f.blocks[c] @ g.blocks[c]
    return Morphism(f.cat, g.src, f.dst, blocks)


def dagger(f: Morphism) -> Morphism:
    return Morphism(f.cat, f.dst, f.src,
                    {c: m.conj().T for c, m in f.blocks.items()})


def tensor(*fs: Morphism) -> Morphism:
    """Monoidal product of morphisms (left-associated)."""
    if not fs:
        raise ValueError("tensor() needs at least one morphism")
    f = fs[0]
    for g in fs[1:]:
        f = _tensor2(f, g)
    return f


def _tensor2(f: Morphism, g: Morphism) -> Morphism:
    if f.cat is not g.cat:
        raise CategoryError("morphisms over different categories")
    cat = f.cat
    if not f.src and not f.dst:
        # unit-to-unit scalar: plain rescaling of g
        z = f.blocks.get(0, np.zeros((1, 1)))[0, 0] if f.blocks else 0.0
        return z * g
    if not g.src and not g.dst:
        z = g.blocks.get(0, np.zeros((1, 1)))[0, 0] if g.blocks else 0.0
        return z * f
    src = f.src + g.src
    dst = f.dst + g.dst
    s_src = split_data(cat, src, len(f.src))
    s_dst = split_data(cat, dst, len(f.dst))
    blocks = {}
    for c in cat.labels:
        sb = s_src.get(c)
        db = s_dst.get(c)
        if sb is None or db is None:
            continue
        mid = np.zeros((len(db.cols), len(sb.cols)), dtype=complex)
        nonzero = False
        for (a, b) in {(a, b) for (a, b, _, _) in sb.cols}:
            fa = f.blocks.get(a)
            gb = g.blocks.get(b)
            if fa is None or gb is None:
                continue
            rows = [i for i, col in enumerate(db.cols) if col[:2] == (a, b)]
            cols = [i for i, col in enumerate(sb.cols) if col[:2] == (a, b)]
            if not rows or not cols:
                continue
            mid[np.ix_(rows, cols)] = np.kron(fa, gb)
            nonzero = True
        if nonzero:
            blocks[c] = db.U @ mid @ sb.U.conj().T
    return Morphism(cat, src, dst, blocks)


def braid(X: Obj, Y: Obj, sign: int = +1) -> Morphism:
    """The braiding ``eps^sign_{X,Y} : X (x) Y -> Y (x) X``.

    ``sign=+1`` is the braiding fixed by the category's R data, ``sign=-1``
    the opposite braiding ``dagger(eps^+_{Y,X})``.
    """
    cat = X.cat
    src = (X, Y)
    dst = (Y, X)
    blocks = {}
    for c in cat.labels:
        spaths = tree_paths(cat, src, c)
        if not spaths:
            continue
        didx = {p: i for i, p in enumerate(tree_paths(cat, dst, c))}
        U = np.zeros((len(spaths), len(spaths)), dtype=complex)
        for col, path in enumerate(spaths):
            (a, i, _), (b, j, _) = path
            if sign > 0:
                coeff = cat.r_symbol(a, b, c)
            else:
                coeff = np.conj(cat.r_symbol(b, a, c))
            U[didx[((b, j, b), (a, i, c))], col] = coeff
        blocks[c] = U
    return Morphism(cat, src, dst, blocks)


def as_single(f: Morphism) -> Morphism:
    """View `f` as a morphism between single fused objects (free relabeling:
    the fused object's basis *is* the tree basis)."""
    cat = f.cat
    src = (fuse_obj(cat, f.src),) if len(f.src) != 1 else f.src
    dst = (fuse_obj(cat, f.dst),) if len(f.dst) != 1 else f.dst
    return Morphism(cat, src, dst, f.blocks)


def fuse_legs(f: Morphism, side: str = "both") -> Morphism:
    """Fuse all source and/or target legs into one object (free relabeling)."""
    cat = f.cat
    src, dst = f.src, f.dst
    if side in ("src", "both") and len(src) != 1:
        src = (fuse_obj(cat, src),)
    if side in ("dst", "both") and len(dst) != 1:
        dst = (fuse_obj(cat, dst),)
    return Morphism(cat, src, dst, f.blocks)


def group_dst_pair(f: Morphism, k: int) -> Morphism:
    """Regroup the target legs into the two fused blocks ``dst[:k] | dst[k:]``
    (source unchanged)."""
    cat = f.cat
    dst2 = (fuse_obj(cat, f.dst[:k]), fuse_obj(cat, f.dst[k:]))
    s_dst = split_data(cat, f.dst, k)
    blocks = {}
    for c, m in f.blocks.items():
        db = s_dst.get(c)
        if db is None:
            continue
        mid = db.U.conj().T @ m
        blocks[c] = mid[_pair_permutation(db), :]
    return Morphism(cat, f.src, dst2, blocks)


def group_src_pair(f: Morphism, k: int) -> Morphism:
    """Regroup the source legs into the two fused blocks ``src[:k] | src[k:]``
    (target unchanged)."""
    cat = f.cat
    src2 = (fuse_obj(cat, f.src[:k]), fuse_obj(cat, f.src[k:]))
    s_src = split_data(cat, f.src, k)
    blocks = {}
    for c, m in f.blocks.items():
        sb = s_src.get(c)
        if sb is None:
            continue
        mid = m @ sb.U
        blocks[c] = mid[:, _pair_permutation(sb)]
    return Morphism(cat, src2, f.dst, blocks)


def group_pair(f: Morphism, k_src: int, k_dst: int) -> Morphism:
    """Regroup legs into two fused blocks on each side,
    ``src[:k_src] | src[k_src:]`` and ``dst[:k_dst] | dst[k_dst:]``."""
    return group_dst_pair(group_src_pair(f, k_src), k_dst)


def _pair_permutation(blk):
    """Row order mapping a SplitBlock's columns to the 2-leg tree order of
    the fused pair (a ascending, ia, then b, ib)."""
    return sorted(range(len(blk.cols)),
                  key=lambda i: (blk.cols[i][0], blk.cols[i][2],
                                 blk.cols[i][1], blk.cols[i][3]))


@dataclass
class ConjugatePair:
    """A standard solution of the conjugacy relations for an object.

    ``r : 1 -> Xbar (x) X`` and ``rbar : 1 -> X (x) Xbar`` satisfy the
    zig-zag identities and ``r^dag r = rbar^dag rbar = dim(X)``.
    """

    obj: Obj
    r: Morphism
    rbar: Morphism

    @property
    def dim(self) -> float:
        return float(np.real(scalar(compose(dagger(self.r), self.r))))


def _zig_scalars(cat: CategoryData, a: int):
    """Zig-zag scalars for the simple label `a` with unit-coefficient cups.

    Returns (lam, lam2): the values of both zig-zag composites built from
    the plain basis cups ``|abar a; 0>`` and ``|a abar; 0>``.
    """
    cached = cat._zig_cache.get(a)
    if cached is not None:
        return cached
    ab = cat.dual(a)
    A = Obj.simple(cat, a)
    Ab = Obj.simple(cat, ab)
    r0 = Morphism(cat, (), (Ab, A), {0: np.array([[1.0]])})
    rbar0 = Morphism(cat, (), (A, Ab), {0: np.array([[1.0]])})
    z1 = compose(tensor(dagger(rbar0), identity(cat, (A,))),
                 tensor(identity(cat, (A,)), r0))
    z2 = compose(tensor(dagger(r0), identity(cat, (Ab,))),
                 tensor(identity(cat, (Ab,)), rbar0))
    lam = z1.block(a)[0, 0]
    lam2 = z2.block(ab)[0, 0]
    cat._zig_cache[a] = (lam, lam2)
    return lam, lam2


def conjugate_solution(X: Obj, tol: float = 1e-9) -> ConjugatePair:
    """The deterministic standard conjugate pair for `X`.

    The coefficient of ``r`` on each sector is the positive real
    ``sqrt(d_a)`` (multiplicity indices paired identically); the ``rbar``
    coefficients are then fixed by the zig-zag identities.
    """
    cat = X.cat
    dims = modular_data(cat).dims
    Xb = X.bar()
    r_rows = tree_paths(cat, (Xb, X), 0)
    rb_rows = tree_paths(cat, (X, Xb), 0)
    r_vec = np.zeros((len(r_rows), 1), dtype=complex)
    rb_vec = np.zeros((len(rb_rows), 1), dtype=complex)
    r_idx = {p: i for i, p in enumerate(r_rows)}
    rb_idx = {p: i for i, p in enumerate(rb_rows)}
    for a, m in X.sectors():
        ab = cat.dual(a)
        lam, lam2 = _zig_scalars(cat, a)
        if abs(abs(lam) - 1.0 / dims[a]) > 1e-6:
            raise CategoryError(
                f"zig-zag scalar for label {a} has modulus {abs(lam)!r},"
                f" expected 1/d = {1.0 / dims[a]!r}")
        c_a = math.sqrt(dims[a])
        beta_a = 1.0 / (c_a * np.conj(lam))
        for i in range(m):
            r_vec[r_idx[((ab, i, ab), (a, i, 0))], 0] = c_a
            rb_vec[rb_idx[((a, i, a), (ab, i, 0))], 0] = beta_a
    pair = ConjugatePair(
        obj=X,
        r=Morphism(cat, (), (Xb, X), {0: r_vec}),
        rbar=Morphism(cat, (), (X, Xb), {0: rb_vec}),
    )
    _assert_conjugate(pair, tol)
    return pair


def _assert_conjugate(pair: ConjugatePair, tol: float):
    cat = pair.obj.cat
    X, Xb = pair.obj, pair.obj.bar()
    idX = identity(cat, (X,))
    idXb = identity(cat, (Xb,))
    z1 = compose(tensor(dagger(pair.rbar), idX), tensor(idX, pair.r))
    z2 = compose(tensor(dagger(pair.r), idXb), tensor(idXb, pair.rbar))
    dev = max(z1.distance(idX), z2.distance(idXb))
    if dev > tol:
        raise CategoryError(f"conjugate solution fails zig-zag by {dev:.2e}")
    d = scalar(compose(dagger(pair.r), pair.r))
    db = scalar(compose(dagger(pair.rbar), pair.rbar))
    dims = modular_data(cat).dims
    if abs(d - X.dim(dims)) > max(tol, 1e-8) or abs(db - d) > max(tol, 1e-8):
        raise CategoryError("conjugate solution is not standard")


def scalar(f: Morphism) -> complex:
    """The number a unit-to-unit morphism multiplies by."""
    if f.src or f.dst:
        raise CategoryError("scalar() needs an endomorphism of the unit")
    m = f.blocks.get(0)
    return complex(m[0, 0]) if m is not None else 0.0 + 0.0j


def trace_pair(D1: Morphism, D2: Morphism, pair: ConjugatePair) -> complex:
    """The sesquilinear pairing ``(D1, D2) = r^dag (D1^dag D2 (x) 1) r``
    for D1, D2 in the same Hom space, using the conjugate pair of the
    (self-conjugate) source object."""
    _check_same_type(D1, D2)
    if pair.obj != D1.src[0] or len(D1.src) != 1:
        raise CategoryError("trace_pair needs 1-leg morphisms out of pair.obj")
    inner = compose(dagger(D1), D2)
    return scalar(compose(dagger(pair.r),
                          tensor(inner, identity(D1.cat, (pair.obj,))),
                          pair.r))


def random_endomorphism(X: Obj, rng: np.random.Generator) -> Morphism:
    """A random label-diagonal endomorphism of `X` (for tests and demos)."""
    cat = X.cat
    blocks = {}
    for a, m in X.sectors():
        blocks[a] = (rng.standard_normal((m, m))
                     + 1j * rng.standard_normal((m, m)))
    return Morphism(cat, (X,), (X,), blocks)
