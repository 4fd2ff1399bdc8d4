"""Graded vector spaces, Koszul signs and unshuffle combinatorics.

Scalars are exact rationals (:class:`fractions.Fraction`) everywhere in this
package; signs are plain ints.  A *word* over a space is a tuple of basis
indices.  A permutation of ``n`` slots is a tuple ``sigma`` of the images
``0..n-1`` acting on words by slot pull-back::

    permute(sigma, w)[j] == w[sigma[j]]

so the letter landing in output slot ``j`` comes from input slot
``sigma[j]``.  The Koszul sign of the move is the product of ``-1`` over
pairs of odd-degree letters whose relative order is inverted.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Word = tuple[int, ...]
Permutation = tuple[int, ...]

__all__ = [
    "GradedSpace",
    "Word",
    "Permutation",
    "canonical_sort",
    "compose",
    "compositions",
    "increasing_unshuffles",
    "is_permutation",
    "koszul_sign",
    "permute",
    "unshuffles",
]


def is_permutation(sigma: Sequence[int]) -> bool:
    """True when ``sigma`` is a bijection of ``0..len(sigma)-1``."""
    n = len(sigma)
    seen = [False] * n
    for v in sigma:
        if not (0 <= v < n) or seen[v]:
            return False
        seen[v] = True
    return True


def permute(sigma: Permutation, word: Sequence) -> tuple:
    """Apply ``sigma`` to a word: output slot ``j`` gets ``word[sigma[j]]``."""
    return tuple(word[s] for s in sigma)


def compose(tau: Permutation, sigma: Permutation) -> Permutation:
    """The slot map of "first tau, then sigma".

    Satisfies ``permute(sigma, permute(tau, w)) == permute(compose(tau, sigma), w)``.
    """
    return tuple(tau[s] for s in sigma)


def koszul_sign(sigma: Permutation, degrees: Sequence[int]) -> int:
    """Sign of reordering homogeneous letters of the given degrees by ``sigma``.

    With the slot convention above, the output word is
    ``(v_{sigma[0]}, ..., v_{sigma[n-1]})`` and each inverted pair of
    odd-degree letters contributes a factor of ``-1``.  Multiplicative:
    ``koszul_sign(compose(tau, sigma), d) ==
    koszul_sign(sigma, permute(tau, d)) * koszul_sign(tau, d)``.
    """
    n = len(sigma)
    if len(degrees) != n:
        raise ValueError("permutation and degree sequence have different lengths")
    if not is_permutation(sigma):
        raise ValueError(f"not a permutation: {sigma!r}")
    sign = 1
    for a in range(n):
        if degrees[sigma[a]] % 2 == 0:
            continue
        for b in range(a + 1, n):
            if sigma[a] > sigma[b] and degrees[sigma[b]] % 2:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _unshuffles(blocks: tuple[int, ...]) -> tuple[Permutation, ...]:
    """Block-increasing permutations; zero-size blocks are permitted here.

    Enumeration order is lexicographic on the block-membership mask
    ``(block of value 0, block of value 1, ...)``, which makes outputs
    reproducible.
    """
    n = sum(blocks)
    k = len(blocks)
    masks: list[tuple[int, ...]] = []
    remaining = list(blocks)
    assign: list[int] = []

    def rec(v: int) -> None:
        if v == n:
            masks.append(tuple(assign))
            return
        for b in range(k):
            if remaining[b]:
                remaining[b] -= 1
                assign.append(b)
                rec(v + 1)
                assign.pop()
                remaining[b] += 1

    rec(0)
    perms = []
    for mask in masks:
        values: list[list[int]] = [[] for _ in range(k)]
        for v, b in enumerate(mask):
            values[b].append(v)
        perms.append(tuple(itertools.chain.from_iterable(values)))
    return tuple(perms)


def unshuffles(*block_sizes: int) -> tuple[Permutation, ...]:
    """All ``(i_1, ..., i_k)``-unshuffles of ``0..sum-1``.

    A permutation is an unshuffle when it is increasing inside each
    consecutive block of slots.  The count is the multinomial coefficient.
    """
    if not block_sizes or any(b < 1 for b in block_sizes):
        raise ValueError("block sizes must be positive integers")
    return _unshuffles(tuple(block_sizes))


@lru_cache(maxsize=None)
def _increasing_unshuffles(blocks: tuple[int, ...]) -> tuple[Permutation, ...]:
    out = []
    for sigma in _unshuffles(blocks):
        pos = 0
        maxima = []
        for b in blocks:
            pos += b
            maxima.append(sigma[pos - 1])
        if all(maxima[i] < maxima[i + 1] for i in range(len(maxima) - 1)):
            out.append(sigma)
    return tuple(out)


def increasing_unshuffles(*block_sizes: int) -> tuple[Permutation, ...]:
    """Unshuffles whose block maxima increase left to right."""
    if not block_sizes or any(b < 1 for b in block_sizes):
        raise ValueError("block sizes must be positive integers")
    return _increasing_unshuffles(tuple(block_sizes))


@lru_cache(maxsize=None)
def compositions(n: int) -> tuple[tuple[int, ...], ...]:
    """Ordered tuples of positive integers summing to ``n``, lexicographic."""
    if n == 0:
        return ((),)
    out = []
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            out.append((first,) + rest)
    return tuple(out)


class GradedSpace:
    """A finite ordered basis of homogeneous elements with integer degrees.

    The stored basis order is the canonical order used to normalise words
    in symmetric contexts.  Instances are immutable and compare by identity.
    """

    __slots__ = ("name", "symbols", "degrees", "_index", "_sort_cache")

    def __init__(self, name: str, basis: Iterable[tuple[str, int]]):
        basis = list(basis)
        symbols = tuple(sym for sym, _ in basis)
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"duplicate basis symbols in space {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "degrees", tuple(int(d) for _, d in basis))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})
        object.__setattr__(self, "_sort_cache", {})

    def __setattr__(self, *_):
        raise AttributeError("GradedSpace is immutable")

    def __repr__(self) -> str:
        pairs = ", ".join(f"{s}:{d}" for s, d in zip(self.symbols, self.degrees))
        return f"GradedSpace({self.name!r}; {pairs})"

    @property
    def dim(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise KeyError(f"unknown symbol {symbol!r} in space {self.name!r}") from None

    def word_degrees(self, word: Word) -> tuple[int, ...]:
        return tuple(self.degrees[i] for i in word)

    def word_degree(self, word: Word) -> int:
        return sum(self.degrees[i] for i in word)

    def sort_word(self, word: Word) -> tuple[Word, int]:
        """Stable-sort a word into canonical order with its Koszul sign."""
        cached = self._sort_cache.get(word)
        if cached is not None:
            return cached
        order = sorted(range(len(word)), key=lambda j: (word[j], j))
        sigma = tuple(order)
        result = (permute(sigma, word), koszul_sign(sigma, self.word_degrees(word)))
        self._sort_cache[word] = result
        return result

    def normalize(self, word: Word) -> tuple[Word, int]:
        """Canonical word and sign; sign 0 when the symmetric class vanishes.

        A word containing a repeated odd-degree letter is zero in the
        symmetric algebra over a field of characteristic zero.
        """
        sorted_word, sign = self.sort_word(word)
        for a, b in zip(sorted_word, sorted_word[1:]):
            if a == b and self.degrees[a] % 2:
                return sorted_word, 0
        return sorted_word, sign

    def words(self, length: int) -> Iterator[Word]:
        """All ordered words of the given length (tensor-algebra basis)."""
        return itertools.product(range(self.dim), repeat=length)

    def canonical_words(self, length: int) -> Iterator[Word]:
        """Sorted words with no repeated odd letter (symmetric-algebra basis)."""
        for w in itertools.combinations_with_replacement(range(self.dim), length):
            if any(a == b and self.degrees[a] % 2 for a, b in zip(w, w[1:])):
                continue
            yield w

    def words_up_to(self, bound: int) -> Iterator[Word]:
        for n in range(1, bound + 1):
            yield from self.words(n)

    def canonical_words_up_to(self, bound: int) -> Iterator[Word]:
        for n in range(1, bound + 1):
            yield from self.canonical_words(n)

    def shifted(self, delta: int, name: str | None = None) -> "GradedSpace":
        """Same symbols with all degrees moved by ``delta``."""
        new = name if name is not None else f"{self.name}[{-delta}]"
        return GradedSpace(new, zip(self.symbols, (d + delta for d in self.degrees)))

    def format_word(self, word: Word) -> str:
        return ",".join(self.symbols[i] for i in word)


def canonical_sort(space: GradedSpace, word: Word) -> tuple[Word, int]:
    """Reorder ``word`` into canonical basis order; return (word, Koszul sign)."""
    if not word:
        raise ValueError("words are nonempty")
    return space.sort_word(word)
