"""Reduced words in free products of Cuntz isometry families, and their
linear combinations.

A generator is ``(slot, family, index, star)``.  Slots are tensor factors
(0 = left chiral copy, 1 = right chiral copy); factors in different slots
commute, factors in the same slot and family obey the Cuntz relations

    s_i^dag s_j = delta_ij,

and distinct families in one slot are free of each other.  Words are kept
in canonical form: stable-sorted by slot, with all ``s^dag s`` pairs
resolved.  The completeness relation ``sum_i s_i s_i^dag = 1`` is *not* a
rewrite rule; :meth:`OperatorExpr.equals` decides identities that need it
by expanding both sides to a common creation depth, where monomials of
fixed creation length are linearly independent.
"""

from __future__ import annotations

from .scalars import Ex, ONE

__all__ = ["CuntzError", "Gen", "Word", "OperatorExpr", "Endo",
           "ChannelEndo", "ComposedEndo", "IdentityEndo", "FAMILY_SIZES"]


class CuntzError(Exception):
    """Raised for malformed words, unknown generators or unsupported checks."""


Gen = tuple  # (slot: int, family: str, index: int, star: bool)
Word = tuple  # tuple of Gen

# generators per family; the chiral intertwiner family {r, t} has two
FAMILY_SIZES = {"s": 2}


def _reduce_word(factors) -> Word | None:
    """Canonical form of a word; None means the word is zero."""
    for i in range(len(factors) - 1):
        if factors[i][0] > factors[i + 1][0]:
            factors = sorted(factors, key=lambda g: g[0])  # slots commute
            break
    stack: list = []
    for g in factors:
        while True:
            if not stack:
                stack.append(g)
                break
            t = stack[-1]
            if (t[0] == g[0] and t[1] == g[1] and t[3] and not g[3]):
                # s_i^dag s_j = delta_ij
                if t[2] != g[2]:
                    return None
                stack.pop()
                # the popped pair may expose a new reducible pair; retry g? no:
                # both consumed; continue with next factor
                break
            stack.append(g)
            break
    # popping can create new adjacencies only at the stack top, which the
    # loop above already maintains
    return tuple(stack)


class OperatorExpr:
    """A finite linear combination of reduced words with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[Word, Ex] = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero:
                    self.terms[w] = c

    # -- constructors --------------------------------------------------------

    @classmethod
    def one(cls) -> "OperatorExpr":
        return cls({(): ONE})

    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls()

    @classmethod
    def scalar(cls, c) -> "OperatorExpr":
        c = c if isinstance(c, Ex) else Ex.rational(c)
        return cls({(): c})

    @classmethod
    def generator(cls, slot: int, family: str, index: int,
                  star: bool = False) -> "OperatorExpr":
        return cls({((slot, family, index, star),): ONE})

    # -- linear structure -----------------------------------------------------

    def _acc(self, out: dict, w: Word, c: Ex):
        prev = out.get(w)
        tot = c if prev is None else prev + c
        if tot.is_zero:
            out.pop(w, None)
        else:
            out[w] = tot

    def __add__(self, other):
        out = dict(self.terms)
        tmp = OperatorExpr()
        for w, c in other.terms.items():
            tmp._acc(out, w, c)
        return OperatorExpr(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            if len(self.terms) * len(other.terms) >= 4096:
                return self._mul_indexed(other)
            out: dict = {}
            acc = OperatorExpr()
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = _reduce_word(w1 + w2)
                    if w is not None:
                        acc._acc(out, w, c1 * c2)
            return OperatorExpr(out)
        return self.__rmul__(other)

    def _mul_indexed(self, other: "OperatorExpr") -> "OperatorExpr":
        """Large products: bucket the right factor by its leading creators
        per slot and skip left words whose trailing annihilators cannot
        match (the dominant cost of big products is pairs that reduce to
        zero at the seam)."""
        buckets: dict = {}
        for w2, c2 in other.terms.items():
            buckets.setdefault(_lead_creators(w2), []).append((w2, c2))
        out: dict = {}
        acc = OperatorExpr()
        for w1, c1 in self.terms.items():
            tail = _tail_annihilators(w1)
            for key, pairs in buckets.items():
                if not _seam_compatible(tail, key):
                    continue
                for w2, c2 in pairs:
                    w = _reduce_word(w1 + w2)
                    if w is not None:
                        acc._acc(out, w, c1 * c2)
        return OperatorExpr(out)

    def __rmul__(self, c):
        c = c if isinstance(c, Ex) else Ex.rational(c)
        return OperatorExpr({w: c * v for w, v in self.terms.items()})

    def dagger(self) -> "OperatorExpr":
        out: dict = {}
        acc = OperatorExpr()
        for w, c in self.terms.items():
            wd = _reduce_word(tuple((s, f, i, not st) for s, f, i, st in reversed(w)))
            if wd is not None:
                acc._acc(out, wd, c.conj())
        return OperatorExpr(out)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, OperatorExpr) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - exprs are not dict keys in practice
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"

        def fmt(w):
            if not w:
                return "1"
            return "".join(f"{fam}{idx}" + ("'" if st else "")
                           + (f"@{slot}" if slot else "")
                           for slot, fam, idx, st in w)
        return " + ".join(f"({c!r})*{fmt(w)}" for w, c in
                          sorted(self.terms.items(), key=lambda kv: kv[0]))

    # -- identity checking ----------------------------------------------------

    def creation_depths(self) -> dict:
        """Maximal creation-prefix length per (slot, family) over all terms."""
        depths: dict = {}
        for w in self.terms:
            for (slot, fam), (mu, _nu) in _segments(w).items():
                key = (slot, fam)
                depths[key] = max(depths.get(key, 0), len(mu))
        return depths

    def expanded(self, levels: dict) -> "OperatorExpr":
        """Insert ``1 = sum_i s_i s_i^dag`` at each family's star boundary
        until the creation prefix has the requested length."""
        result: dict = {}
        acc = OperatorExpr()
        for w, c in self.terms.items():
            for word in _expand_word(w, levels):
                red = _reduce_word(word)
                if red is not None:
                    acc._acc(result, red, c)
        return OperatorExpr(result)

    def equals(self, other: "OperatorExpr", depth: int = 2) -> bool:
        """Exact equality, resolving the completeness relation up to `depth`."""
        diff = (self - other).compressed()
        if diff.is_zero:
            return True
        levels = diff.creation_depths()
        for key in levels:
            levels[key] = max(levels[key], depth)
        return diff.expanded(levels).compressed().is_zero

    def compressed(self) -> "OperatorExpr":
        """Contract completeness blocks: whenever all words
        ``prefix . s_i s_i^dag . suffix`` (i over the family) occur with one
        common coefficient, replace them by ``prefix . suffix``.

        This is the inverse of the expansion used for identity checking; it
        never changes the operator, only shrinks its presentation.
        """
        terms = dict(self.terms)
        changed = True
        while changed:
            changed = False
            for word in list(terms):
                coeff = terms.get(word)
                if coeff is None:
                    continue
                hit = _contract_site(terms, word, coeff)
                if hit is not None:
                    base, c = hit
                    for b in base[0]:
                        del terms[b]
                    red = _reduce_word(base[1])
                    if red is not None:
                        acc = OperatorExpr()
                        acc._acc(terms, red, c)
                    changed = True
        return OperatorExpr(terms)


_SEAM_DEPTH = 2


def _lead_creators(w: Word) -> tuple:
    """Per (slot, family): the first few creator indices the word opens
    with; None when it opens with an annihilator (then no seam reduction
    happens and any left factor is compatible)."""
    lead: dict = {}
    for slot, fam, idx, star in w:
        key = (slot, fam)
        seq = lead.get(key, _UNSEEN)
        if seq is _UNSEEN:
            lead[key] = None if star else [idx]
        elif isinstance(seq, list) and len(seq) < _SEAM_DEPTH:
            if star:
                seq.append(-1)  # run ends early: shorter creator prefix
            else:
                seq.append(idx)
    return tuple(sorted((k, tuple(v) if v is not None else None)
                        for k, v in lead.items()))


_UNSEEN = object()


def _tail_annihilators(w: Word) -> dict:
    """Per (slot, family): the trailing annihilator indices, seam-first."""
    tail: dict = {}
    for slot, fam, idx, star in w:
        key = (slot, fam)
        if star:
            tail.setdefault(key, []).append(idx)
        else:
            tail[key] = []
    return {k: v[::-1][:_SEAM_DEPTH] for k, v in tail.items() if v}


def _seam_compatible(tail: dict, lead_key: tuple) -> bool:
    lead = dict(lead_key)
    for key, ann in tail.items():
        cre = lead.get(key)
        if cre is None:
            continue  # absent run, or one that opens with an annihilator
        for a, c in zip(ann, cre):
            if c == -1:
                break  # the creator run ended; deeper pairs reduce later
            if a != c:
                return False
    return True


def _contract_site(terms: dict, word: Word, coeff):
    """Find a completeness block in `word` whose whole family orbit carries
    the coefficient `coeff`; return ((orbit words, contracted word), coeff)."""
    for j in range(len(word) - 1):
        g1, g2 = word[j], word[j + 1]
        if not (g1[0] == g2[0] and g1[1] == g2[1] and g1[2] == g2[2]
                and not g1[3] and g2[3]):
            continue
        slot, fam = g1[0], g1[1]
        n = FAMILY_SIZES[fam]
        orbit = [word[:j]
                 + ((slot, fam, i, False), (slot, fam, i, True))
                 + word[j + 2:] for i in range(n)]
        if all(terms.get(b) == coeff for b in orbit):
            return (orbit, word[:j] + word[j + 2:]), coeff
    return None


def _segments(w: Word) -> dict:
    """Split a canonical word into per-(slot, family) runs ``s_mu s_nu^dag``.

    Raises if some (slot, family) occurs in more than one run or mixes with
    another family in its slot: completeness expansion has no canonical
    insertion point there.
    """
    segs: dict = {}
    slot_families: dict = {}
    for slot, fam, idx, star in w:
        key = (slot, fam)
        slot_families.setdefault(slot, set()).add(fam)
        if key not in segs:
            segs[key] = ([], [])
        mu, nu = segs[key]
        if star:
            nu.append(idx)
        else:
            if nu:
                raise CuntzError(
                    "word has separated same-family runs; identity resolution "
                    "is not supported across free-product factors")
            mu.append(idx)
    for slot, fams in slot_families.items():
        if len(fams) > 1:
            raise CuntzError(
                f"slot {slot} mixes families {sorted(fams)}; identity "
                "resolution is not supported across free-product factors")
    return segs


def _expand_word(w: Word, levels: dict):
    """All words obtained by padding each family segment to its level."""
    pads: list[tuple] = []   # (position, slot, family, pad_len)
    segs: dict = {}
    positions: dict = {}
    for pos, (slot, fam, idx, star) in enumerate(w):
        key = (slot, fam)
        if key not in segs:
            segs[key] = ([], [])
            positions[key] = pos
        mu, nu = segs[key]
        if star:
            nu.append(idx)
        else:
            mu.append(idx)
            positions[key] = pos + 1  # boundary sits after the last creator
    for key, level in levels.items():
        if key not in segs:
            segs[key] = ([], [])
            positions[key] = len(w)  # scalar term: insert at the end
        mu, _ = segs[key]
        if len(mu) < level:
            pads.append((positions[key], key[0], key[1], level - len(mu)))
    if not pads:
        yield w
        return
    pads.sort(key=lambda p: -p[0])  # insert right-to-left to keep positions

    def rec(word, todo):
        if not todo:
            yield word
            return
        pos, slot, fam, k = todo[0]
        n = FAMILY_SIZES[fam]
        for kappa in _tuples(n, k):
            ins = tuple((slot, fam, i, False) for i in kappa) + \
                  tuple((slot, fam, i, True) for i in reversed(kappa))
            yield from rec(word[:pos] + ins + word[pos:], todo[1:])
    yield from rec(w, pads)


def _tuples(n: int, k: int):
    if k == 0:
        yield ()
        return
    for rest in _tuples(n, k - 1):
        for i in range(n):
            yield rest + (i,)


# -- endomorphisms -----------------------------------------------------------


class IdentityEndo:
    name = "id"

    def apply(self, e: OperatorExpr) -> OperatorExpr:
        return e

    def _apply_word(self, w):
        return OperatorExpr({w: ONE})

    __call__ = apply


class _WordCached:
    """Mixin: apply an endomorphism word-by-word with a per-instance cache
    (words and subwords recur heavily across the shipped computations)."""

    def _word_img(self, w: Word) -> OperatorExpr:
        cache = self.__dict__.setdefault("_word_cache", {})
        got = cache.get(w)
        if got is None:
            got = self._apply_word(w)
            cache[w] = got
        return got

    def apply(self, e: OperatorExpr) -> OperatorExpr:
        out: dict = {}
        acc = OperatorExpr()
        for w, c in e.terms.items():
            for w2, c2 in self._word_img(w).terms.items():
                acc._acc(out, w2, c * c2)
        return OperatorExpr(out)

    __call__ = apply


class Endo(_WordCached):
    """A unital *-endomorphism given by its images on generators.

    Images are looked up per (slot, family, index); daggered generators map
    to daggered images.  Generators of other slots/families are untouched.
    Words are processed by binary splitting so that shared subwords are
    computed once.
    """

    def __init__(self, name: str, images: dict):
        self.name = name
        self.images = images   # (slot, family, index) -> OperatorExpr

    def _apply_word(self, w: Word) -> OperatorExpr:
        if len(w) == 0:
            return OperatorExpr.one()
        if len(w) == 1:
            slot, fam, idx, star = w[0]
            img = self.images.get((slot, fam, idx))
            if img is None:
                return OperatorExpr.generator(slot, fam, idx, star)
            return img.dagger() if star else img
        mid = len(w) // 2
        res = self._word_img(w[:mid]) * self._word_img(w[mid:])
        if len(w) >= 4:
            res = res.compressed()
        return res


class ComposedEndo(_WordCached):
    """Composition ``e_1 ∘ e_2 ∘ ...`` (rightmost applied first)."""

    def __init__(self, *endos, name=""):
        self.endos = endos
        self.name = name or "*".join(getattr(e, "name", "?") for e in endos)

    def _apply_word(self, w: Word) -> OperatorExpr:
        e = OperatorExpr({w: ONE})
        for endo in reversed(self.endos):
            e = endo.apply(e)
        return e.compressed()


class ChannelEndo(_WordCached):
    """A direct-sum endomorphism ``X -> sum_i T_i rho_i(X) T_i^dag`` with
    orthonormal isometries ``T_i`` (concrete operator expressions)."""

    def __init__(self, name: str, isometries, inner):
        self.name = name
        self.isometries = list(isometries)
        self.inner = list(inner)
        if len(self.isometries) != len(self.inner):
            raise CuntzError("one inner endomorphism per channel isometry")

    def _apply_word(self, w: Word) -> OperatorExpr:
        e = OperatorExpr({w: ONE})
        out = OperatorExpr.zero()
        for T, rho in zip(self.isometries, self.inner):
            out = out + T * rho.apply(e) * T.dagger()
        return out.compressed()
