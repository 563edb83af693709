"""Skeletal data of braided fusion categories.

A category is specified by its fusion ring (labels, duals, fusion
multiplicities), F-symbols and R-symbols in a fixed gauge.  All built-in
categories are multiplicity-free at the F/R tier; general multiplicities are
supported in the :class:`FusionRing` but rejected when F/R data is attached.

Conventions
-----------
Label ``0`` is the tensor unit.  The F-symbol ``F[a,b,c,d,e,f]`` is the
coefficient in

    |((ab)_e c) -> d>  =  sum_f  F[a,b,c,d,e,f] |(a (bc)_f) -> d>

and the R-symbol ``R[a,b,c]`` acts on the fusion channel c of a x b,

    braid(a, b) |ab -> c>  =  R[a,b,c] |ba -> c>.

The gauge is normalized so that every F/R entry involving the unit equals 1
(the braiding is trivial against the unit, which fixes the sign conventions
of the built-in R data).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CategoryError",
    "FusionRing",
    "CategoryData",
    "ModularData",
    "ValidationReport",
    "build_builtin",
    "builtin_names",
    "ising_category",
    "fibonacci_category",
    "pointed_category",
    "validate",
    "modular_data",
    "product_opposite",
    "verlinde_fusion",
]

DEFAULT_TOL = 1e-9

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class CategoryError(Exception):
    """Raised for structurally invalid or inconsistent category data."""


@dataclass(frozen=True)
class FusionRing:
    """Fusion ring: labels, duals and fusion multiplicities ``N[a,b,c]``."""

    names: tuple[str, ...]
    dual: tuple[int, ...]
    N: np.ndarray  # shape (n, n, n), nonnegative integers

    @property
    def n_labels(self) -> int:
        return len(self.names)

    def check_structure(self) -> list[str]:
        """Return a list of violated ring axioms (empty if consistent)."""
        problems = []
        n = self.n_labels
        if self.N.shape != (n, n, n):
            return [f"fusion tensor has shape {self.N.shape}, expected {(n, n, n)}"]
        if np.any(self.N < 0):
            problems.append("negative fusion multiplicity")
        if self.dual[0] != 0:
            problems.append("dual(0) != 0")
        for a in range(n):
            if self.dual[self.dual[a]] != a:
                problems.append(f"dual(dual({a})) != {a}")
        for b, c in itertools.product(range(n), repeat=2):
            if self.N[0, b, c] != (1 if b == c else 0):
                problems.append(f"unit law fails at N[0,{b},{c}]")
            if self.N[b, 0, c] != (1 if b == c else 0):
                problems.append(f"unit law fails at N[{b},0,{c}]")
        for a, b in itertools.product(range(n), repeat=2):
            if self.N[a, b, 0] != (1 if b == self.dual[a] else 0):
                problems.append(f"duality law fails at N[{a},{b},0]")
        # associativity sum_e N[a,b,e] N[e,c,d] = sum_f N[b,c,f] N[a,f,d]
        lhs = np.einsum("abe,ecd->abcd", self.N, self.N)
        rhs = np.einsum("bcf,afd->abcd", self.N, self.N)
        for idx in np.argwhere(lhs != rhs):
            problems.append("fusion associativity fails at (a,b,c,d)=%s" % (tuple(int(i) for i in idx),))
        return problems


@dataclass(frozen=True)
class ModularData:
    """Quantum dimensions, twists and modular S/T matrices of a category."""

    dims: np.ndarray          # (n,) positive reals
    twists: np.ndarray        # (n,) unit-modulus complex
    global_dim: float         # D = sqrt(sum d_a^2)
    S: np.ndarray             # (n, n) complex
    T: np.ndarray             # (n, n) diagonal of twists
    is_modular: bool


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`: structural errors and numeric failures."""

    failures: list[tuple[str, tuple]] = field(default_factory=list)
    max_residual: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, kind: str, index: tuple, residual: float = 0.0):
        self.failures.append((kind, index))
        self.max_residual = max(self.max_residual, residual)

    def summary(self) -> str:
        if self.ok:
            return "valid (max residual %.2e)" % self.max_residual
        lines = ["%d failure(s):" % len(self.failures)]
        for kind, index in self.failures[:50]:
            lines.append(f"  {kind} at {index}")
        if len(self.failures) > 50:
            lines.append(f"  ... and {len(self.failures) - 50} more")
        return "\n".join(lines)


_next_cat_id = itertools.count()


class CategoryData:
    """A skeletal braided fusion category: fusion ring plus F/R symbols.

    Parameters
    ----------
    ring : FusionRing
    F : dict
        Maps admissible ``(a, b, c, d, e, f)`` to a complex scalar
        (multiplicity-free).
    R : dict
        Maps admissible ``(a, b, c)`` to a complex scalar of unit modulus.
    name, gauge_note : str
        Human-readable identification and a record of the gauge convention.

    Instances are immutable after construction and safe to share between
    threads; derived data (tree bases, splitting isometries, modular data)
    is memoized on the instance with insert-only caches.
    """

    def __init__(self, ring: FusionRing, F: dict, R: dict, name: str = "",
                 gauge_note: str = "", product_structure=None):
        if np.any(ring.N > 1):
            raise CategoryError(
                "fusion multiplicities > 1 are not supported at the F/R tier")
        self.ring = ring
        self.F = dict(F)
        self.R = dict(R)
        self.name = name
        self.gauge_note = gauge_note
        # for C (x) C^opp categories: (base category, list of label pairs)
        self.product_structure = product_structure
        self._id = next(_next_cat_id)
        self._tree_cache: dict = {}
        self._split_cache: dict = {}
        self._zig_cache: dict = {}
        self._modular: ModularData | None = None
        self._opposite_product: CategoryData | None = None

    # -- basic queries ----------------------------------------------------

    @property
    def n_labels(self) -> int:
        return self.ring.n_labels

    @property
    def labels(self) -> range:
        return range(self.ring.n_labels)

    @property
    def N(self) -> np.ndarray:
        return self.ring.N

    def dual(self, a: int) -> int:
        return self.ring.dual[a]

    def label_name(self, a: int) -> str:
        return self.ring.names[a]

    def fusion_outcomes(self, a: int, b: int):
        return [int(c) for c in np.nonzero(self.ring.N[a, b])[0]]

    def f_symbol(self, a, b, c, d, e, f) -> complex:
        try:
            return self.F[(a, b, c, d, e, f)]
        except KeyError:
            raise CategoryError(
                f"missing F entry ({a},{b},{c},{d};{e},{f}) in {self.name!r}") from None

    def r_symbol(self, a, b, c) -> complex:
        try:
            return self.R[(a, b, c)]
        except KeyError:
            raise CategoryError(
                f"missing R entry ({a},{b};{c}) in {self.name!r}") from None

    def admissible_f_keys(self, a, b, c, d):
        """All admissible ``(e, f)`` pairs of ``F^{abc}_d``."""
        N = self.ring.N
        es = [e for e in self.labels if N[a, b, e] and N[e, c, d]]
        fs = [f for f in self.labels if N[b, c, f] and N[a, f, d]]
        return es, fs

    def f_matrix(self, a, b, c, d) -> tuple[list, list, np.ndarray]:
        es, fs = self.admissible_f_keys(a, b, c, d)
        mat = np.array([[self.f_symbol(a, b, c, d, e, f) for f in fs] for e in es],
                       dtype=complex)
        return es, fs, mat

    def __repr__(self):
        return f"CategoryData({self.name!r}, {self.n_labels} labels)"

    # fusion-tree and splitting caches live in qsystems.trees


# -- built-in categories --------------------------------------------------


def _selfdual_ring(names, table) -> FusionRing:
    n = len(names)
    N = np.zeros((n, n, n), dtype=int)
    for (a, b), outs in table.items():
        for c in outs:
            N[a, b, c] = 1
    return FusionRing(names=tuple(names), dual=tuple(range(n)), N=N)


def ising_category() -> CategoryData:
    """The Ising braided fusion category (labels id, tau, sigma).

    The R data is pinned to the chiral Ising braiding with twist
    ``theta_sigma = exp(i pi/8)``: the braid eigenvalues on sigma x sigma are
    ``exp(-i pi/8)`` (unit channel) and ``exp(3 i pi/8)`` (tau channel), and
    the tau-tau braiding is -1.
    """
    ID, TAU, SIG = 0, 1, 2
    ring = _selfdual_ring(
        ["id", "tau", "sigma"],
        {
            (ID, ID): [ID], (ID, TAU): [TAU], (ID, SIG): [SIG],
            (TAU, ID): [TAU], (TAU, TAU): [ID], (TAU, SIG): [SIG],
            (SIG, ID): [SIG], (SIG, TAU): [SIG], (SIG, SIG): [ID, TAU],
        },
    )
    F = _trivial_f_entries(ring)
    s = 1.0 / math.sqrt(2.0)
    F.update({
        (SIG, SIG, SIG, SIG, ID, ID): s,
        (SIG, SIG, SIG, SIG, ID, TAU): s,
        (SIG, SIG, SIG, SIG, TAU, ID): s,
        (SIG, SIG, SIG, SIG, TAU, TAU): -s,
        (TAU, SIG, TAU, SIG, SIG, SIG): -1.0,
        (SIG, TAU, SIG, TAU, SIG, SIG): -1.0,
        # (SIG, TAU, SIG, ID, SIG, SIG) stays +1
    })
    R = _trivial_r_entries(ring)
    kappa_inv = np.exp(-1j * math.pi / 8.0)
    R.update({
        (TAU, TAU, ID): -1.0,
        (TAU, SIG, SIG): -1.0j,
        (SIG, TAU, SIG): -1.0j,
        (SIG, SIG, ID): kappa_inv,
        (SIG, SIG, TAU): 1.0j * kappa_inv,
    })
    return CategoryData(ring, F, R, name="ising",
                        gauge_note="unit-gauge; h_sigma = 1/16 chirality")


def fibonacci_category() -> CategoryData:
    """The Fibonacci category (labels id, sigma) with dim(sigma) the golden ratio."""
    ID, SIG = 0, 1
    ring = _selfdual_ring(
        ["id", "sigma"],
        {(ID, ID): [ID], (ID, SIG): [SIG], (SIG, ID): [SIG], (SIG, SIG): [ID, SIG]},
    )
    F = _trivial_f_entries(ring)
    g = _GOLDEN
    F.update({
        (SIG, SIG, SIG, SIG, ID, ID): 1.0 / g,
        (SIG, SIG, SIG, SIG, ID, SIG): 1.0 / math.sqrt(g),
        (SIG, SIG, SIG, SIG, SIG, ID): 1.0 / math.sqrt(g),
        (SIG, SIG, SIG, SIG, SIG, SIG): -1.0 / g,
    })
    R = _trivial_r_entries(ring)
    R.update({
        (SIG, SIG, ID): np.exp(-4j * math.pi / 5.0),
        (SIG, SIG, SIG): np.exp(3j * math.pi / 5.0),
    })
    return CategoryData(ring, F, R, name="fibonacci",
                        gauge_note="unit-gauge; h_sigma = 2/5 chirality")


def pointed_category(n: int, a: int = 1) -> CategoryData:
    """Pointed category on Z_n (n odd): trivial F, ``R[j,k] = exp(2 pi i a jk / n)``.

    Modular iff gcd(a, n) = 1 (and automatically gcd(2, n) = 1 since n is odd).
    Even n is rejected: it would require nontrivial F-cocycle signs.
    """
    if n % 2 == 0:
        raise CategoryError("pointed Z_n categories require odd n "
                            "(even n needs nontrivial F-symbol signs)")
    if n < 1:
        raise CategoryError("n must be positive")
    names = [f"g{j}" for j in range(n)]
    names[0] = "id"
    N = np.zeros((n, n, n), dtype=int)
    for j, k in itertools.product(range(n), repeat=2):
        N[j, k, (j + k) % n] = 1
    ring = FusionRing(names=tuple(names),
                      dual=tuple((-j) % n for j in range(n)), N=N)
    F = _trivial_f_entries(ring)
    R = {}
    for j, k in itertools.product(range(n), repeat=2):
        R[(j, k, (j + k) % n)] = np.exp(2j * math.pi * a * j * k / n)
    return CategoryData(ring, F, R, name=f"pointed({n},{a})",
                        gauge_note="trivial F; quadratic-form braiding")


def _trivial_f_entries(ring: FusionRing) -> dict:
    """All admissible F entries set to 1 (the correct value whenever a label
    is the unit; nontrivial entries are overwritten by the builders)."""
    F = {}
    n = ring.n_labels
    N = ring.N
    for a, b, c in itertools.product(range(n), repeat=3):
        for d in range(n):
            for e in range(n):
                if not (N[a, b, e] and N[e, c, d]):
                    continue
                for f in range(n):
                    if N[b, c, f] and N[a, f, d]:
                        F[(a, b, c, d, e, f)] = 1.0
    return F


def _trivial_r_entries(ring: FusionRing) -> dict:
    R = {}
    n = ring.n_labels
    for a, b in itertools.product(range(n), repeat=2):
        for c in range(n):
            if ring.N[a, b, c]:
                R[(a, b, c)] = 1.0
    return R


_BUILTINS: dict[str, CategoryData] = {}


def builtin_names() -> list[str]:
    return ["ising", "fibonacci", "z3", "z5", "z9", "pointed(N,a)"]


def build_builtin(name: str) -> CategoryData:
    """Build (and memoize) a built-in category by name.

    Accepted names: ``ising``, ``fibonacci``, ``zN`` (odd N, a=1) and
    ``pointed(N,a)`` / ``pointed:N:a``.
    """
    key = name.strip().lower()
    if key in _BUILTINS:
        return _BUILTINS[key]
    if key == "ising":
        cat = ising_category()
    elif key == "fibonacci":
        cat = fibonacci_category()
    elif key.startswith("z") and key[1:].isdigit():
        cat = pointed_category(int(key[1:]), 1)
    elif key.startswith("pointed"):
        body = key[len("pointed"):].strip("():")
        parts = [p for p in body.replace(":", ",").split(",") if p]
        if len(parts) not in (1, 2):
            raise CategoryError(f"cannot parse pointed category name {name!r}")
        n = int(parts[0])
        a = int(parts[1]) if len(parts) == 2 else 1
        cat = pointed_category(n, a)
    else:
        raise CategoryError(f"unknown builtin category {name!r}")
    _BUILTINS[key] = cat
    return cat


# -- validation -----------------------------------------------------------


def validate(cat: CategoryData, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check ring axioms, presence and unitarity of F, pentagon and hexagons.

    Every failed instance is reported with its index tuple.  Missing F/R
    entries for admissible tuples raise :class:`CategoryError` (structural
    error) instead of being counted as numeric failures.
    """
    report = ValidationReport()
    for msg in cat.ring.check_structure():
        report.add("ring: " + msg, ())
    if not report.ok:
        return report

    n = cat.n_labels
    N = cat.ring.N

    # structural completeness + unit gauge
    for a, b, c in itertools.product(range(n), repeat=3):
        if N[a, b, c]:
            r = cat.r_symbol(a, b, c)
            if abs(abs(r) - 1.0) > tol:
                report.add("R-modulus", (a, b, c), abs(abs(r) - 1.0))
            if 0 in (a, b) and abs(r - 1.0) > tol:
                report.add("R-unit-gauge", (a, b, c), abs(r - 1.0))

    for a, b, c, d in itertools.product(range(n), repeat=4):
        es, fs, mat = cat.f_matrix(a, b, c, d)
        if not es and not fs:
            continue
        if len(es) != len(fs):
            report.add("F-block-shape", (a, b, c, d))
            continue
        if len(es) == 0:
            continue
        dev = np.max(np.abs(mat @ mat.conj().T - np.eye(len(es))))
        if dev > tol:
            report.add("F-unitarity", (a, b, c, d), float(dev))
        if 0 in (a, b, c):
            dev = np.max(np.abs(mat - np.eye(len(es))))
            if dev > tol:
                report.add("F-unit-gauge", (a, b, c, d), float(dev))

    _check_pentagon(cat, report, tol)
    _check_hexagons(cat, report, tol)
    return report


def _check_pentagon(cat: CategoryData, report: ValidationReport, tol: float):
    """sum_x F[abc;q]_{px} F[axd;e]_{qy} F[bcd;y]_{xz} = F[pcd;e]_{qz} F[abz;e]_{py}."""
    n = cat.n_labels
    N = cat.ring.N
    F = cat.F
    for a, b, c, d in itertools.product(range(n), repeat=4):
        for p in cat.fusion_outcomes(a, b):
            for q in cat.fusion_outcomes(p, c):
                for e in cat.fusion_outcomes(q, d):
                    for y in range(n):
                        if not N[a, y, e]:
                            continue
                        for z in range(n):
                            if not (N[c, d, z] and N[b, z, y]):
                                continue
                            lhs = 0.0
                            for x in range(n):
                                if N[b, c, x] and N[a, x, q] and N[x, d, y]:
                                    lhs += (F[(a, b, c, q, p, x)]
                                            * F[(a, x, d, e, q, y)]
                                            * F[(b, c, d, y, x, z)])
                            if N[p, z, e]:
                                rhs = F[(p, c, d, e, q, z)] * F[(a, b, z, e, p, y)]
                            else:
                                rhs = 0.0
                            if abs(lhs - rhs) > tol:
                                report.add("pentagon", (a, b, c, d, e, p, q, y, z),
                                           abs(lhs - rhs))


def _check_hexagons(cat: CategoryData, report: ValidationReport, tol: float):
    """Both hexagon identities, as matrix identities per (a, b, c, d).

    H+:  F[abc;d]^dag D(R^{ab}) F[bac;d] D(R^{ac}) F[bca;d]^dag = D(R^{a.}_d)
    H-:  same with R replaced by the opposite braiding conj(R^{swap}).
    """
    n = cat.n_labels
    N = cat.ring.N
    for a, b, c, d in itertools.product(range(n), repeat=4):
        es1, fs1, F1 = cat.f_matrix(a, b, c, d)   # rows: ab channels, cols: bc
        if not es1 or not fs1:
            continue
        es2, fs2, F2 = cat.f_matrix(b, a, c, d)   # rows: ba = ab, cols: ac
        es3, fs3, F3 = cat.f_matrix(b, c, a, d)   # rows: bc, cols: ca = ac
        if es2 != es1 or es3 != fs1 or fs3 != fs2:
            report.add("hexagon-shape", (a, b, c, d))
            continue
        for plus in (True, False):
            if plus:
                d_ab = np.array([cat.r_symbol(a, b, e) for e in es1])
                d_ac = np.array([cat.r_symbol(a, c, f) for f in fs2])
                d_out = np.array([cat.r_symbol(a, x, d) for x in fs1])
            else:
                d_ab = np.array([np.conj(cat.r_symbol(b, a, e)) for e in es1])
                d_ac = np.array([np.conj(cat.r_symbol(c, a, f)) for f in fs2])
                d_out = np.array([np.conj(cat.r_symbol(x, a, d)) for x in fs1])
            lhs = (F1.conj().T * d_ab) @ (F2 * d_ac) @ F3.conj().T
            dev = np.max(np.abs(lhs - np.diag(d_out)))
            if dev > tol:
                report.add("hexagon+" if plus else "hexagon-",
                           (a, b, c, d), float(dev))


# -- derived modular data -------------------------------------------------


def modular_data(cat: CategoryData, tol: float = DEFAULT_TOL) -> ModularData:
    """Quantum dimensions, twists, S and T of a (valid) category.

    Dimensions are the Perron-Frobenius eigenvalues of the fusion matrices,
    cross-checked against the F-based loop values ``1/|F[a,abar,a,a,0,0]|``.
    Twists come from R-traces, S from the balancing formula

        S[a,b] = D^-1 sum_c N[a,b,c] (theta_c / theta_a theta_b) d_c .

    ``is_modular`` records unitarity of S; a degenerate braiding simply
    yields ``is_modular = False``.
    """
    if cat._modular is not None:
        return cat._modular
    n = cat.n_labels
    N = cat.ring.N
    dims = np.empty(n)
    for a in range(n):
        dims[a] = float(np.max(np.abs(np.linalg.eigvals(N[a].astype(float)))))
        d_loop = 1.0 / abs(cat.f_symbol(a, cat.dual(a), a, a, 0, 0))
        if abs(dims[a] - d_loop) > 1e-6:
            raise CategoryError(
                f"dimension mismatch for label {a}: Perron-Frobenius {dims[a]!r}"
                f" vs F-loop {d_loop!r}")
    twists = np.empty(n, dtype=complex)
    for a in range(n):
        twists[a] = sum(dims[c] / dims[a] * cat.r_symbol(a, a, c)
                        for c in cat.fusion_outcomes(a, a))
    D = math.sqrt(float(np.sum(dims ** 2)))
    S = np.zeros((n, n), dtype=complex)
    for a, b in itertools.product(range(n), repeat=2):
        S[a, b] = sum(N[a, b, c] * twists[c] / (twists[a] * twists[b]) * dims[c]
                      for c in cat.fusion_outcomes(a, b)) / D
    is_modular = bool(np.max(np.abs(S @ S.conj().T - np.eye(n))) <= max(tol, 1e-8))
    md = ModularData(dims=dims, twists=twists, global_dim=D, S=S,
                     T=np.diag(twists), is_modular=is_modular)
    cat._modular = md
    return md


def verlinde_fusion(S: np.ndarray) -> np.ndarray:
    """Fusion multiplicities via the Verlinde formula (S must be unitary)."""
    n = S.shape[0]
    N = np.zeros((n, n, n), dtype=complex)
    for c in range(n):
        N[:, :, c] = np.einsum("ax,bx,x->ab", S, S, S[c].conj() / S[0])
    return N


# -- product with the opposite category -----------------------------------


def product_opposite(cat: CategoryData) -> CategoryData:
    """The category C (x) C^opp with labels (a, b) and reversed braiding in
    the second slot: R_prod = R[a,a',c] * conj(R[b',b,c'])."""
    if cat._opposite_product is not None:
        return cat._opposite_product
    n = cat.n_labels
    pairs = list(itertools.product(range(n), repeat=2))
    index = {p: i for i, p in enumerate(pairs)}
    names = tuple(f"({cat.label_name(a)},{cat.label_name(b)})" for a, b in pairs)
    dual = tuple(index[(cat.dual(a), cat.dual(b))] for a, b in pairs)
    m = len(pairs)
    N = np.zeros((m, m, m), dtype=int)
    for (i, (a, b)), (j, (a2, b2)) in itertools.product(enumerate(pairs), repeat=2):
        for c in cat.fusion_outcomes(a, a2):
            for c2 in cat.fusion_outcomes(b, b2):
                N[i, j, index[(c, c2)]] = 1
    ring = FusionRing(names=names, dual=dual, N=N)
    F = {}
    for ka, va in cat.F.items():
        for kb, vb in cat.F.items():
            key = tuple(index[(ka[i], kb[i])] for i in range(6))
            F[key] = va * vb
    R = {}
    for (a, a2, c), va in cat.R.items():
        for (b, b2, c2) in cat.R:
            # opposite braiding on the second slot: conj(R[b2, b, c2])
            R[(index[(a, b)], index[(a2, b2)], index[(c, c2)])] = \
                va * np.conj(cat.r_symbol(b2, b, c2))
    prod = CategoryData(ring, F, R, name=f"{cat.name}(x)opp",
                        gauge_note=cat.gauge_note + "; opposite braiding in slot 2",
                        product_structure=(cat, pairs))
    cat._opposite_product = prod
    return prod
