"""Multilinear graded maps as exact structure constants, and the coalgebra
machinery built on them: coshuffle and Zinbiel coproducts, coderivation and
comorphism lifts truncated at a word-length bound, graded commutators, the
Balavoine bracket and the arity-shift (decalage) isomorphism.

Formal linear data is kept sparse:

* a *vector* is ``dict[int, Fraction]`` over basis indices,
* a *word sum* is ``dict[Word, Fraction]``,
* a *pair sum* (coproduct value) is ``dict[(Word, Word), Fraction]``.

Zero coefficients are never stored.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .graded import (
    GradedSpace,
    Word,
    _unshuffles,
    compositions,
    increasing_unshuffles,
    koszul_sign,
    permute,
    unshuffles,
)

Vector = dict[int, Fraction]
WordSum = dict[Word, Fraction]
PairSum = dict[tuple[Word, Word], Fraction]

SYMMETRIC = "symmetric"
PLAIN = "plain"
ZINBIEL = "zinbiel"

__all__ = [
    "MultiMap",
    "PairSum",
    "TruncatedCoderivation",
    "TruncatedComorphism",
    "Vector",
    "WordSum",
    "add_into",
    "balavoine_bracket",
    "commutator",
    "coshuffle_coproduct",
    "decalage",
    "decalage_inverse",
    "lift_comorphism",
    "lift_symmetric_coderivation",
    "lift_zinbiel_coderivation",
    "shifted_bracket",
    "symmetrize",
    "zinbiel_coproduct",
]


def add_into(acc: dict, key, coeff: Fraction) -> None:
    """Accumulate ``coeff`` at ``key``, dropping exact zeros."""
    new = acc.get(key, 0) + coeff
    if new:
        acc[key] = new
    else:
        acc.pop(key, None)


def scale_mapping(mapping: dict, c: Fraction) -> dict:
    if not c:
        return {}
    return {k: c * v for k, v in mapping.items()}


def merge_into(acc: dict, other: Mapping, c: Fraction = Fraction(1)) -> None:
    for k, v in other.items():
        add_into(acc, k, c * v)


class MultiMap:
    """A multilinear map between graded spaces given by structure constants.

    ``constants`` maps an input word of length ``arity`` to the output vector.
    Symmetric maps are stored only on canonically sorted words with no
    repeated odd-degree letter; evaluation on any other ordering picks up the
    Koszul sign of the sort.  Plain maps are looked up literally.
    """

    __slots__ = ("source", "target", "arity", "degree", "flavor", "constants")

    def __init__(
        self,
        source: GradedSpace,
        target: GradedSpace,
        arity: int,
        degree: int,
        flavor: str,
        constants: Mapping[Word, Mapping[int, Fraction]],
    ):
        if arity < 1:
            raise ValueError("arity must be positive")
        if flavor not in (SYMMETRIC, PLAIN):
            raise ValueError(f"unknown flavor {flavor!r}")
        table: dict[Word, Vector] = {}
        for word, vec in constants.items():
            word = tuple(word)
            if len(word) != arity:
                raise ValueError(f"key {word} does not have arity {arity}")
            if any(not 0 <= i < source.dim for i in word):
                raise ValueError(f"key {word} leaves the source basis")
            if flavor == SYMMETRIC:
                norm, sign = source.normalize(word)
                if sign == 0:
                    raise ValueError(f"key {word} vanishes in the symmetric algebra")
                if norm != word or sign != 1:
                    raise ValueError(f"symmetric key {word} is not canonical")
            deg_in = source.word_degree(word)
            clean: Vector = {}
            for out, c in vec.items():
                c = Fraction(c)
                if not c:
                    continue
                if not 0 <= out < target.dim:
                    raise ValueError(f"output index {out} leaves the target basis")
                if target.degrees[out] != degree + deg_in:
                    raise ValueError(
                        f"constant ({word} -> {target.symbols[out]}) breaks degree "
                        f"homogeneity for a degree {degree} map"
                    )
                clean[out] = c
            if clean:
                table[word] = clean
        self.source = source
        self.target = target
        self.arity = arity
        self.degree = degree
        self.flavor = flavor
        self.constants = table

    @classmethod
    def from_entries(
        cls,
        source: GradedSpace,
        target: GradedSpace,
        arity: int,
        degree: int,
        flavor: str,
        entries: Iterable[tuple[Word, int, Fraction]],
    ) -> "MultiMap":
        table: dict[Word, Vector] = {}
        for word, out, c in entries:
            add_into(table.setdefault(tuple(word), {}), out, Fraction(c))
        table = {w: v for w, v in table.items() if v}
        return cls(source, target, arity, degree, flavor, table)

    @classmethod
    def zero(cls, source, target, arity, degree, flavor=PLAIN) -> "MultiMap":
        return cls(source, target, arity, degree, flavor, {})

    def eval(self, word: Word) -> Vector:
        """Exact value on a basis word (a fresh dict; may be empty)."""
        if len(word) != self.arity:
            raise ValueError(f"word {word} does not match arity {self.arity}")
        dim = self.source.dim
        if any(not 0 <= i < dim for i in word):
            raise ValueError(f"word {word} does not index the source basis")
        if self.flavor == SYMMETRIC:
            norm, sign = self.source.normalize(word)
            if sign == 0:
                return {}
            row = self.constants.get(norm)
            if not row:
                return {}
            if sign == 1:
                return dict(row)
            return {k: -v for k, v in row.items()}
        row = self.constants.get(tuple(word))
        return dict(row) if row else {}

    def eval_wordsum(self, words: WordSum) -> Vector:
        acc: Vector = {}
        for w, c in words.items():
            merge_into(acc, self.eval(w), c)
        return acc

    def is_zero(self) -> bool:
        return not self.constants

    def entries(self) -> Iterator[tuple[Word, int, Fraction]]:
        for w in sorted(self.constants):
            for out in sorted(self.constants[w]):
                yield w, out, self.constants[w][out]

    def same_constants(self, other: "MultiMap") -> bool:
        return self.constants == other.constants

    def expand_plain(self) -> "MultiMap":
        """The same map with every ordering of each key stored explicitly."""
        if self.flavor == PLAIN:
            return self
        entries = []
        seen = set()
        for word in self.constants:
            for perm_word in set(_orderings(word)):
                if perm_word in seen:
                    continue
                seen.add(perm_word)
                vec = self.eval(perm_word)
                for out, c in vec.items():
                    entries.append((perm_word, out, c))
        return MultiMap.from_entries(
            self.source, self.target, self.arity, self.degree, PLAIN, entries
        )

    def __repr__(self) -> str:
        return (
            f"MultiMap({self.source.name}->{self.target.name}, arity={self.arity}, "
            f"degree={self.degree}, {self.flavor}, {len(self.constants)} keys)"
        )


def _orderings(word: Word) -> Iterator[Word]:
    return itertools.permutations(word)


def symmetrize(f: MultiMap) -> MultiMap:
    """Average of ``f`` over all slot permutations with Koszul signs.

    Idempotent; applied to a symmetric map it returns an equal map.
    """
    if f.flavor == SYMMETRIC:
        return MultiMap(f.source, f.target, f.arity, f.degree, SYMMETRIC, f.constants)
    space = f.source
    k = f.arity
    factorial = Fraction(1)
    for j in range(2, k + 1):
        factorial *= j
    candidates = set()
    for word in f.constants:
        norm, sign = space.normalize(word)
        if sign:
            candidates.add(norm)
    table: dict[Word, Vector] = {}
    for w in sorted(candidates):
        degs = space.word_degrees(w)
        acc: Vector = {}
        for sigma in _all_permutations(k):
            eps = koszul_sign(sigma, degs)
            merge_into(acc, f.eval(permute(sigma, w)), Fraction(eps, 1))
        acc = {out: c / factorial for out, c in acc.items() if c}
        if acc:
            table[w] = acc
    return MultiMap(f.source, f.target, k, f.degree, SYMMETRIC, table)


def _all_permutations(n: int) -> tuple:
    return tuple(itertools.permutations(range(n)))


# ---------------------------------------------------------------------------
# coproducts


def coshuffle_coproduct(space: GradedSpace, word: Word) -> PairSum:
    """Sum over (p, k-p)-unshuffles of the two-sided splittings of ``word``.

    Single letters are primitive: the value is empty.
    """
    k = len(word)
    out: PairSum = {}
    if k < 2:
        return out
    degs = space.word_degrees(word)
    for p in range(1, k):
        for sigma in unshuffles(p, k - p):
            eps = koszul_sign(sigma, degs)
            pw = permute(sigma, word)
            add_into(out, (pw[:p], pw[p:]), Fraction(eps))
    return out


def zinbiel_coproduct(space: GradedSpace, word: Word) -> PairSum:
    """Half-shuffle coproduct: the last letter stays anchored on the right.

    Satisfies the co-Leibniz variant
    ``(Id x D) D = (D x Id) D + (tau D x Id) D`` and symmetrises to the
    coshuffle coproduct: ``coshuffle == zinbiel + tau . zinbiel``.
    """
    k = len(word)
    out: PairSum = {}
    if k < 2:
        return out
    head = word[:-1]
    degs = space.word_degrees(head)
    for p in range(1, k):
        for sigma in _unshuffles((p, k - 1 - p)):
            eps = koszul_sign(sigma, degs)
            pw = permute(sigma, head)
            add_into(out, (pw[:p], pw[p:] + (word[-1],)), Fraction(eps))
    return out


def twist_pairsum(space: GradedSpace, pairs: PairSum) -> PairSum:
    """Apply the twist map ``a (x) b -> (-1)^{|a||b|} b (x) a``."""
    out: PairSum = {}
    for (a, b), c in pairs.items():
        sign = -1 if (space.word_degree(a) % 2 and space.word_degree(b) % 2) else 1
        add_into(out, (b, a), sign * c)
    return out


# ---------------------------------------------------------------------------
# truncated coderivations


class TruncatedCoderivation:
    """A degree-homogeneous coderivation on words of length at most ``bound``.

    ``coalgebra`` selects the ambient coalgebra: ``"symmetric"`` rows are
    indexed by canonical words and valued in canonical word sums;
    ``"zinbiel"`` rows live on the full tensor-word basis.  Rows absent from
    ``rows`` are zero.  All maps here never increase word length, so the
    truncation is closed under composition and brackets.
    """

    __slots__ = ("space", "bound", "degree", "coalgebra", "rows", "_restr")

    def __init__(self, space, bound, degree, coalgebra, rows):
        if coalgebra not in (SYMMETRIC, ZINBIEL):
            raise ValueError(f"unknown coalgebra {coalgebra!r}")
        self.space = space
        self.bound = bound
        self.degree = degree
        self.coalgebra = coalgebra
        self.rows = {w: ws for w, ws in rows.items() if ws}
        self._restr = None

    def _words(self) -> Iterator[Word]:
        if self.coalgebra == SYMMETRIC:
            return self.space.canonical_words_up_to(self.bound)
        return self.space.words_up_to(self.bound)

    def apply_word(self, word: Word) -> WordSum:
        row = self.rows.get(tuple(word))
        return dict(row) if row else {}

    def apply_sum(self, words: WordSum) -> WordSum:
        acc: WordSum = {}
        for w, c in words.items():
            row = self.rows.get(w)
            if row:
                merge_into(acc, row, c)
        return acc

    def restriction_vector(self, word: Word) -> Vector:
        """Length-one component of the image of ``word``."""
        row = self.rows.get(tuple(word))
        if not row:
            return {}
        return {w[0]: c for w, c in row.items() if len(w) == 1}

    def restrictions(self) -> dict[int, MultiMap]:
        """The defining family: projection to single letters, by arity."""
        if self._restr is not None:
            return self._restr
        flavor = SYMMETRIC if self.coalgebra == SYMMETRIC else PLAIN
        per_arity: dict[int, dict[Word, Vector]] = {}
        for w, row in self.rows.items():
            vec = {u[0]: c for u, c in row.items() if len(u) == 1}
            if vec:
                per_arity.setdefault(len(w), {})[w] = vec
        out = {
            k: MultiMap(self.space, self.space, k, self.degree, flavor, table)
            for k, table in per_arity.items()
        }
        self._restr = out
        return out

    def compose(self, other: "TruncatedCoderivation") -> "TruncatedCoderivation":
        self._check_compatible(other)
        rows: dict[Word, WordSum] = {}
        for w, row in other.rows.items():
            acc = self.apply_sum(row)
            if acc:
                rows[w] = acc
        return TruncatedCoderivation(
            self.space, self.bound, self.degree + other.degree, self.coalgebra, rows
        )

    def add(self, other: "TruncatedCoderivation", c: Fraction = Fraction(1)):
        self._check_compatible(other)
        if self.degree != other.degree:
            raise ValueError("adding coderivations of different degrees")
        rows = {w: dict(row) for w, row in self.rows.items()}
        for w, row in other.rows.items():
            merge_into(rows.setdefault(w, {}), row, c)
        rows = {w: r for w, r in rows.items() if r}
        return TruncatedCoderivation(self.space, self.bound, self.degree, self.coalgebra, rows)

    def scale(self, c: Fraction) -> "TruncatedCoderivation":
        rows = {w: scale_mapping(row, Fraction(c)) for w, row in self.rows.items()}
        rows = {w: r for w, r in rows.items() if r}
        return TruncatedCoderivation(self.space, self.bound, self.degree, self.coalgebra, rows)

    def is_zero(self) -> bool:
        return not self.rows

    def _check_compatible(self, other) -> None:
        if self.space is not other.space:
            raise ValueError("coderivations live on different spaces")
        if self.bound != other.bound:
            raise ValueError("coderivations have different truncation bounds")
        if self.coalgebra != other.coalgebra:
            raise ValueError("coderivations live on different coalgebras")

    def check_coleibniz(self) -> dict[Word, PairSum]:
        """Defect of the co-Leibniz identity against the ambient coproduct.

        Returns the nonzero rows of ``Delta Q - (Q x Id + Id x Q) Delta``
        over all words up to the bound; empty means the identity holds.
        """
        coproduct = (
            coshuffle_coproduct if self.coalgebra == SYMMETRIC else zinbiel_coproduct
        )
        defects: dict[Word, PairSum] = {}
        parity = self.degree % 2
        for w in self._words():
            lhs: PairSum = {}
            for u, c in self.apply_word(w).items():
                merge_into(lhs, coproduct(self.space, u), c)
            rhs: PairSum = {}
            for (a, b), c in coproduct(self.space, w).items():
                for u, cu in self.apply_word(a).items():
                    add_into(rhs, (u, b), c * cu)
                sign = -1 if (parity and self.space.word_degree(a) % 2) else 1
                for u, cu in self.apply_word(b).items():
                    add_into(rhs, (a, u), sign * c * cu)
            diff = dict(lhs)
            for k, v in rhs.items():
                add_into(diff, k, -v)
            if diff:
                defects[w] = diff
        return defects

    def __repr__(self) -> str:
        return (
            f"TruncatedCoderivation({self.space.name}, bound={self.bound}, "
            f"degree={self.degree}, {self.coalgebra}, {len(self.rows)} rows)"
        )


def _common_degree(restrictions: Mapping[int, MultiMap]) -> int:
    degrees = {f.degree for f in restrictions.values() if not f.is_zero()}
    if len(degrees) > 1:
        raise ValueError(f"restriction maps are not degree-homogeneous: {sorted(degrees)}")
    if degrees:
        return degrees.pop()
    degrees = {f.degree for f in restrictions.values()}
    return degrees.pop() if len(degrees) == 1 else 0


def lift_symmetric_coderivation(
    space: GradedSpace, restrictions: Mapping[int, MultiMap], bound: int
) -> TruncatedCoderivation:
    """The unique coderivation of the reduced symmetric coalgebra with the
    given restriction maps, truncated to words of length <= ``bound``.

    On a canonical word the lift sums, over (k, n-k)-unshuffles, the inner
    map applied to the first block times the remaining letters.
    """
    degree = _common_degree(restrictions)
    rows: dict[Word, WordSum] = {}
    arities = sorted(k for k, f in restrictions.items() if not f.is_zero())
    for n in range(1, bound + 1):
        for w in space.canonical_words(n):
            degs = space.word_degrees(w)
            acc: WordSum = {}
            for k in arities:
                if k > n:
                    break
                f = restrictions[k]
                for sigma in unshuffles(k, n - k) if k < n else ((tuple(range(n)),)):
                    eps = koszul_sign(sigma, degs)
                    pw = permute(sigma, w)
                    inner = f.eval(pw[:k])
                    if not inner:
                        continue
                    rest = pw[k:]
                    for b, c in inner.items():
                        norm, s2 = space.normalize((b,) + rest)
                        if s2:
                            add_into(acc, norm, eps * s2 * c)
            if acc:
                rows[w] = acc
    return TruncatedCoderivation(space, bound, degree, SYMMETRIC, rows)


def lift_zinbiel_coderivation(
    space: GradedSpace, restrictions: Mapping[int, MultiMap], bound: int
) -> TruncatedCoderivation:
    """The coderivation of the Zinbiel coalgebra with the given restrictions.

    For each inner arity ``k`` and each count ``i`` of pass-through letters in
    front, the slots ``0..i+k-2`` are unshuffled into the front block and the
    inner arguments; the inner map always absorbs the anchored letter at slot
    ``i+k-1``, and the remaining letters pass through on the right.  Moving a
    degree-``d`` map past the front block costs ``(-1)^{d * deg(front)}``.
    """
    degree = _common_degree(restrictions)
    parity = degree % 2
    rows: dict[Word, WordSum] = {}
    arities = sorted(k for k, f in restrictions.items() if not f.is_zero())
    for n in range(1, bound + 1):
        for w in space.words(n):
            acc: WordSum = {}
            for k in arities:
                if k > n:
                    break
                f = restrictions[k]
                for i in range(0, n - k + 1):
                    head = w[: i + k - 1]
                    degs = space.word_degrees(head)
                    anchored = w[i + k - 1]
                    tail = w[i + k:]
                    for sigma in _unshuffles((i, k - 1)):
                        eps = koszul_sign(sigma, degs)
                        pw = permute(sigma, head)
                        inner = f.eval(pw[i:] + (anchored,))
                        if not inner:
                            continue
                        front = pw[:i]
                        sign = eps
                        if parity and space.word_degree(front) % 2:
                            sign = -sign
                        for b, c in inner.items():
                            add_into(acc, front + (b,) + tail, sign * c)
            if acc:
                rows[w] = acc
    return TruncatedCoderivation(space, bound, degree, ZINBIEL, rows)


def commutator(q: TruncatedCoderivation, p: TruncatedCoderivation) -> TruncatedCoderivation:
    """Graded commutator ``q p - (-1)^{|q||p|} p q`` on the truncation."""
    qp = q.compose(p)
    pq = p.compose(q)
    sign = -1 if (q.degree % 2 and p.degree % 2) else 1
    return qp.add(pq, Fraction(-sign))


def shifted_bracket(q: TruncatedCoderivation, p: TruncatedCoderivation) -> TruncatedCoderivation:
    """The bracket of the shifted coderivation algebra.

    For maps of degrees ``|q|`` and ``|p|`` this is
    ``(-1)^{|q|} (q p - (-1)^{|q||p|} p q)``, the commutator rescaled by the
    sign that makes it a degree +1 symmetric bracket on the shift.
    """
    sign = -1 if q.degree % 2 else 1
    return commutator(q, p).scale(Fraction(sign))


def balavoine_bracket(
    space: GradedSpace,
    f: Mapping[int, MultiMap],
    g: Mapping[int, MultiMap],
    bound: int,
) -> dict[int, MultiMap]:
    """Restrictions of the commutator of the Zinbiel lifts of two families."""
    qf = lift_zinbiel_coderivation(space, f, bound)
    qg = lift_zinbiel_coderivation(space, g, bound)
    return commutator(qf, qg).restrictions()


# ---------------------------------------------------------------------------
# truncated comorphisms


class TruncatedComorphism:
    """A coalgebra morphism on words of length <= ``bound``.

    Determined by its degree-0 components ``F_k : k-words -> target``; the
    word-to-word action distributes the letters over blocks indexed by
    increasing unshuffles.
    """

    __slots__ = ("source", "target", "bound", "flavor", "components", "rows")

    def __init__(self, source, target, bound, flavor, components, rows):
        self.source = source
        self.target = target
        self.bound = bound
        self.flavor = flavor
        self.components = components
        self.rows = rows

    def apply_word(self, word: Word) -> WordSum:
        row = self.rows.get(tuple(word))
        return dict(row) if row else {}

    def apply_sum(self, words: WordSum) -> WordSum:
        acc: WordSum = {}
        for w, c in words.items():
            row = self.rows.get(w)
            if row:
                merge_into(acc, row, c)
        return acc

    def compose(self, inner: "TruncatedComorphism") -> "TruncatedComorphism":
        if inner.target is not self.source:
            raise ValueError("comorphisms do not compose")
        rows: dict[Word, WordSum] = {}
        for w, row in inner.rows.items():
            acc = self.apply_sum(row)
            if acc:
                rows[w] = acc
        components = _components_from_rows(self.target, rows, inner.bound)
        return TruncatedComorphism(
            inner.source, self.target, inner.bound, self.flavor, components, rows
        )

    def check_intertwines_coproduct(self) -> dict[Word, PairSum]:
        """Defect of ``Delta F - (F x F) Delta`` over all words <= bound."""
        if self.flavor == SYMMETRIC:
            cp_src = lambda w: coshuffle_coproduct(self.source, w)
            cp_tgt = lambda w: coshuffle_coproduct(self.target, w)
            words = self.source.canonical_words_up_to(self.bound)
        else:
            cp_src = lambda w: zinbiel_coproduct(self.source, w)
            cp_tgt = lambda w: zinbiel_coproduct(self.target, w)
            words = self.source.words_up_to(self.bound)
        defects: dict[Word, PairSum] = {}
        for w in words:
            lhs: PairSum = {}
            for u, c in self.apply_word(w).items():
                merge_into(lhs, cp_tgt(u), c)
            rhs: PairSum = {}
            for (a, b), c in cp_src(w).items():
                fa = self.apply_word(a)
                fb = self.apply_word(b)
                for ua, ca in fa.items():
                    for ub, cb in fb.items():
                        add_into(rhs, (ua, ub), c * ca * cb)
            diff = dict(lhs)
            for k, v in rhs.items():
                add_into(diff, k, -v)
            if diff:
                defects[w] = diff
        return defects

    def __repr__(self) -> str:
        return (
            f"TruncatedComorphism({self.source.name}->{self.target.name}, "
            f"bound={self.bound}, {self.flavor}, {len(self.rows)} rows)"
        )


def _components_from_rows(target, rows, bound) -> dict[int, dict[Word, Vector]]:
    comps: dict[int, dict[Word, Vector]] = {}
    for w, row in rows.items():
        vec = {u[0]: c for u, c in row.items() if len(u) == 1}
        if vec:
            comps.setdefault(len(w), {})[w] = vec
    return comps


def lift_comorphism(
    source: GradedSpace,
    target: GradedSpace,
    components: Mapping[int, MultiMap],
    bound: int,
    flavor: str = ZINBIEL,
) -> TruncatedComorphism:
    """The coalgebra morphism induced by degree-0 components ``F_k``.

    On an ``n``-word the image sums, over compositions ``(k_1, ..., k_j)`` of
    ``n`` and increasing unshuffles, the ``j``-letter words whose letters are
    the component values on the blocks.  Intertwines the Zinbiel coproduct
    (hence also the coshuffle one) up to the bound.
    """
    if flavor not in (SYMMETRIC, ZINBIEL):
        raise ValueError(f"unknown comorphism flavor {flavor!r}")
    for k, f in components.items():
        if f.degree != 0 and not f.is_zero():
            raise ValueError(f"component of arity {k} has nonzero degree {f.degree}")
    available = {k for k, f in components.items() if not f.is_zero()}
    rows: dict[Word, WordSum] = {}
    words = (
        source.canonical_words_up_to(bound)
        if flavor == SYMMETRIC
        else source.words_up_to(bound)
    )
    for w in words:
        n = len(w)
        degs = source.word_degrees(w)
        acc: WordSum = {}
        for comp in compositions(n):
            if any(k not in available for k in comp):
                continue
            maps = [components[k] for k in comp]
            for sigma in increasing_unshuffles(*comp):
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, w)
                pos = 0
                block_vectors = []
                dead = False
                for k, f in zip(comp, maps):
                    vec = f.eval(pw[pos : pos + k])
                    if not vec:
                        dead = True
                        break
                    block_vectors.append(vec)
                    pos += k
                if dead:
                    continue
                _expand_blocks(acc, block_vectors, Fraction(eps), target, flavor)
        if acc:
            rows[w] = acc
    comp_tables: dict[int, MultiMap] = {
        k: f for k, f in components.items() if not f.is_zero()
    }
    return TruncatedComorphism(source, target, bound, flavor, comp_tables, rows)


def _expand_blocks(acc, block_vectors, coeff, target, flavor) -> None:
    words = [((), coeff)]
    for vec in block_vectors:
        words = [(w + (b,), c * cb) for (w, c) in words for b, cb in vec.items()]
    if flavor == SYMMETRIC:
        for w, c in words:
            norm, sign = target.normalize(w)
            if sign:
                add_into(acc, norm, sign * c)
    else:
        for w, c in words:
            add_into(acc, w, c)


def identity_comorphism(space: GradedSpace, bound: int, flavor: str = ZINBIEL):
    ident = MultiMap(
        space, space, 1, 0, PLAIN, {(i,): {i: Fraction(1)} for i in range(space.dim)}
    )
    return lift_comorphism(space, space, {1: ident}, bound, flavor)


# ---------------------------------------------------------------------------
# decalage


def _decalage_sign(degrees: Iterable[int]) -> int:
    """Parity of ``sum (k - 1 - j) * d_j`` over the unshifted degrees."""
    degs = list(degrees)
    k = len(degs)
    total = sum((k - 1 - j) * d for j, d in enumerate(degs))
    return -1 if total % 2 else 1


def decalage(f: MultiMap, shifted_source: GradedSpace, shifted_target: GradedSpace) -> MultiMap:
    """Transport an arity-``k`` map to the suspension of its spaces.

    The result has degree ``f.degree + 1 - k`` and satisfies, on letters of
    unshifted degrees ``d_1..d_k``,

        g(s x_1, ..., s x_k) = (-1)^{sum (k-j) d_j, j<k} s f(x_1, ..., x_k).

    ``shifted_source``/``shifted_target`` must carry the same symbols with all
    degrees raised by one.  Symmetric inputs are expanded first, since the
    transported map is no longer graded symmetric.  Inverse of
    :func:`decalage_inverse`.
    """
    _check_shift(f.source, shifted_source, +1)
    _check_shift(f.target, shifted_target, +1)
    if f.flavor == SYMMETRIC:
        f = f.expand_plain()
    table: dict[Word, Vector] = {}
    for word, vec in f.constants.items():
        sign = _decalage_sign(f.source.word_degrees(word))
        table[word] = {out: sign * c for out, c in vec.items()}
    return MultiMap(
        shifted_source,
        shifted_target,
        f.arity,
        f.degree + 1 - f.arity,
        PLAIN,
        table,
    )


def decalage_inverse(
    g: MultiMap, desuspended_source: GradedSpace, desuspended_target: GradedSpace
) -> MultiMap:
    """Inverse transport: round-trips with :func:`decalage` to the identity."""
    _check_shift(desuspended_source, g.source, +1)
    _check_shift(desuspended_target, g.target, +1)
    table: dict[Word, Vector] = {}
    for word, vec in g.constants.items():
        sign = _decalage_sign(desuspended_source.word_degrees(word))
        table[word] = {out: sign * c for out, c in vec.items()}
    return MultiMap(
        desuspended_source,
        desuspended_target,
        g.arity,
        g.degree - 1 + g.arity,
        PLAIN,
        table,
    )


def _check_shift(low: GradedSpace, high: GradedSpace, delta: int) -> None:
    if low.symbols != high.symbols:
        raise ValueError("shifted spaces must share basis symbols")
    if any(dh != dl + delta for dl, dh in zip(low.degrees, high.degrees)):
        raise ValueError(f"spaces are not related by a degree shift of {delta}")
