"""Non-abelian homotopy embedding tensors and their derived machinery.

A tensor is a degree-0 comorphism from the target tensor coalgebra to the
acting one, stored through its components.  It is *verified* when the
curvature of its coderivation vanishes inside the space of target-to-acting
maps; the package evaluates that condition along two independent routes:

* the explicit componentwise equations (bracket side against the
  coderivation-expansion side), and
* the projected iterated-commutator series of the product codifferential
  with the tensor's coderivation, which terminates per output weight
  because every bracket with the tensor consumes target letters.

Verified tensors induce a plain (Loday-type) structure on the target, are
morphisms into the acting structure, and carry a deformation complex built
from the derived brackets of the same commutator calculus.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .action import ActionFamily, HemiProduct, check_coherence
from .graded import GradedSpace, Word, _unshuffles, koszul_sign, permute
from .homotopy import HomotopyStructure, check_loday_morphism, lie_to_loday
from .linalg import rank
from .multimap import (
    PLAIN,
    ZINBIEL,
    MultiMap,
    TruncatedCoderivation,
    TruncatedComorphism,
    Vector,
    WordSum,
    add_into,
    commutator,
    lift_comorphism,
    lift_zinbiel_coderivation,
    merge_into,
    zinbiel_coproduct,
)
from .report import (
    CheckReport,
    InputError,
    Residual,
    RouteDisagreement,
    format_vector,
    make_report,
)

__all__ = [
    "DeformationComplex",
    "EmbeddingTensor",
    "HomElement",
    "adjoint_strict_check",
    "centroid_check",
    "check_descendent_morphism",
    "check_embedding",
    "check_embedding_explicit",
    "check_embedding_mc",
    "cohomology_rank",
    "deformation_complex",
    "descendent",
    "extend_tensor",
    "identity_tensor",
    "restriction_lemma_check",
    "strict_algebra_compose",
]

_SERIES_SLACK = 2


class EmbeddingTensor:
    """Degree-0 component family from target words to the acting space."""

    def __init__(self, v_space: GradedSpace, e_space: GradedSpace, components):
        comps: dict[int, MultiMap] = {}
        for k, f in components.items():
            if f.is_zero():
                continue
            if f.arity != k:
                raise InputError("tensor component arity mismatch")
            if f.degree != 0:
                raise InputError(f"tensor component of arity {k} has degree {f.degree}")
            if f.source is not v_space or f.target is not e_space:
                raise InputError("tensor component spaces do not match")
            comps[k] = f
        self.v_space = v_space
        self.e_space = e_space
        self.components = dict(sorted(comps.items()))
        self._comorphism_cache: dict[int, TruncatedComorphism] = {}

    @property
    def is_strict(self) -> bool:
        return all(k == 1 for k in self.components)

    @property
    def is_symmetric(self) -> bool:
        from .multimap import symmetrize

        for f in self.components.values():
            sym = symmetrize(f)
            for w in self.v_space.words(f.arity):
                if f.eval(w) != sym.eval(w):
                    return False
        return True

    def component(self, k: int) -> MultiMap | None:
        return self.components.get(k)

    def eval(self, word: Word) -> Vector:
        f = self.components.get(len(word))
        return f.eval(word) if f is not None else {}

    def comorphism(self, bound: int) -> TruncatedComorphism:
        got = self._comorphism_cache.get(bound)
        if got is None:
            got = lift_comorphism(
                self.v_space, self.e_space, self.components, bound, ZINBIEL
            )
            self._comorphism_cache[bound] = got
        return got

    def add(self, other: "EmbeddingTensor") -> "EmbeddingTensor":
        if other.v_space is not self.v_space or other.e_space is not self.e_space:
            raise InputError("cannot add tensors on different spaces")
        comps: dict[int, MultiMap] = {}
        for k in sorted(set(self.components) | set(other.components)):
            table: dict[Word, Vector] = {}
            for f in (self.components.get(k), other.components.get(k)):
                if f is None:
                    continue
                for w, vec in f.constants.items():
                    merge_into(table.setdefault(w, {}), vec)
            table = {w: v for w, v in table.items() if v}
            if table:
                comps[k] = MultiMap(self.v_space, self.e_space, k, 0, PLAIN, table)
        return EmbeddingTensor(self.v_space, self.e_space, comps)

    def __repr__(self) -> str:
        ks = ",".join(str(k) for k in self.components)
        return f"EmbeddingTensor({self.v_space.name}->{self.e_space.name}, arities [{ks}])"


def identity_tensor(space: GradedSpace) -> EmbeddingTensor:
    ident = MultiMap(
        space, space, 1, 0, PLAIN, {(i,): {i: Fraction(1)} for i in range(space.dim)}
    )
    return EmbeddingTensor(space, space, {1: ident})


# ---------------------------------------------------------------------------
# preconditions and shared plumbing


def _ensure_coherent(action: ActionFamily, bound: int) -> HemiProduct:
    cache = getattr(action, "_coherence_verdicts", None)
    if cache is None:
        cache = {}
        action._coherence_verdicts = cache
    verdict = cache.get(bound)
    if verdict is None:
        verdict = check_coherence(action, bound).ok
        cache[bound] = verdict
    if not verdict:
        raise InputError("the action is not coherent at this bound")
    return action.hemiproduct()


def _check_tensor_spaces(tensor: EmbeddingTensor, action: ActionFamily) -> None:
    if tensor.v_space is not action.V.space or tensor.e_space is not action.E.space:
        raise InputError("tensor spaces do not match the action")


def tensor_coderivation(
    tensor: EmbeddingTensor, hemi: HemiProduct, bound: int
) -> TruncatedCoderivation:
    """The degree-0 coderivation of the product coalgebra attached to a tensor.

    Its restrictions send pure-target words to the acting line and vanish on
    every word containing an acting letter.
    """
    space = hemi.space
    restrictions: dict[int, MultiMap] = {}
    for k, f in tensor.components.items():
        if k > bound:
            continue
        table: dict[Word, Vector] = {}
        for w, vec in f.constants.items():
            table[hemi.from_v_word(w)] = dict(vec)
        if table:
            restrictions[k] = MultiMap(space, space, k, 0, PLAIN, table)
    return lift_zinbiel_coderivation(space, restrictions, bound)


def extend_tensor(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> TruncatedComorphism:
    """The comorphism ``identity + tensor`` of the product coalgebra.

    Unary component ``x + v -> x + v + T_1(v)``; higher components equal the
    tensor's on pure-target words and vanish elsewhere.  Coincides with the
    exponential of :func:`tensor_coderivation` (tested separately).
    """
    _check_tensor_spaces(tensor, action)
    hemi = action.hemiproduct()
    space = hemi.space
    table1: dict[Word, Vector] = {
        (i,): {i: Fraction(1)} for i in range(space.dim)
    }
    t1 = tensor.component(1)
    if t1 is not None:
        for w, vec in t1.constants.items():
            key = hemi.from_v_word(w)
            merge_into(table1.setdefault(key, {}), vec)
    components = {1: MultiMap(space, space, 1, 0, PLAIN, table1)}
    for k, f in tensor.components.items():
        if k == 1 or k > bound:
            continue
        table = {hemi.from_v_word(w): dict(vec) for w, vec in f.constants.items()}
        components[k] = MultiMap(space, space, k, 0, PLAIN, table)
    return lift_comorphism(space, space, components, bound, ZINBIEL)


def coderivation_exponential(
    coderivation: TruncatedCoderivation, bound: int
) -> dict[Word, WordSum]:
    """Word-by-word exponential series of a degree-0 coderivation."""
    if coderivation.degree != 0:
        raise InputError("only degree-0 coderivations exponentiate to comorphisms")
    rows: dict[Word, WordSum] = {}
    for w in coderivation.space.words_up_to(bound):
        acc: WordSum = {w: Fraction(1)}
        term: WordSum = {w: Fraction(1)}
        factorial = Fraction(1)
        step = 0
        while term:
            step += 1
            factorial *= step
            term = coderivation.apply_sum(term)
            merge_into(acc, term, Fraction(1) / factorial)
            if step > 2 * bound + _SERIES_SLACK:
                raise RouteDisagreement("coderivation exponential did not stabilize")
        rows[w] = acc
    return rows


# ---------------------------------------------------------------------------
# the explicit component equations


def check_embedding_explicit(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> CheckReport:
    """The displayed bracket-versus-expansion equations on all target words.

    For every ordered target word, the acting brackets applied to the full
    comorphism image must match the tensor applied to the coderivation
    expansion of the induced restriction maps.
    """
    _check_tensor_spaces(tensor, action)
    _ensure_coherent(action, bound)
    E, V = action.E, action.V
    vspace, espace = V.space, E.space
    com = tensor.comorphism(bound)
    items: list[Residual] = []
    for n in range(1, bound + 1):
        for w in vspace.words(n):
            lhs: Vector = {}
            for u, c in com.apply_word(w).items():
                merge_into(lhs, E.eval_bracket(len(u), u), c)
            rhs: Vector = {}
            # the target structure's own coderivation, fed to the tensor
            for u, c in _mv_rows(action, bound).get(w, {}).items():
                merge_into(rhs, tensor.eval(u), c)
            for k in range(2, n + 1):
                head = w[: k - 1]
                degs = vspace.word_degrees(head)
                anchored = w[k - 1]
                suffix = w[k:]
                for i in range(0, k - 1):
                    for sigma in _unshuffles((i, k - 1 - i)):
                        eps = koszul_sign(sigma, degs)
                        pw = permute(sigma, head)
                        front = pw[:i]
                        sign = -eps if vspace.word_degree(front) % 2 else eps
                        for j in range(i + 1, k):
                            mid = pw[i:j]
                            tail = pw[j : k - 1]
                            for ue, ce in com.apply_word(mid).items():
                                norm, s = espace.normalize(ue)
                                if not s:
                                    continue
                                phi_val = action.eval(norm, tail + (anchored,))
                                if not phi_val:
                                    continue
                                coeff = Fraction(sign * s) * ce
                                for b, cb in phi_val.items():
                                    outer = front + (b,) + suffix
                                    merge_into(
                                        rhs, tensor.eval(outer), coeff * cb
                                    )
            diff = dict(lhs)
            for b, c in rhs.items():
                add_into(diff, b, -c)
            if diff:
                items.append(
                    Residual(n, vspace.format_word(w), format_vector(espace, diff))
                )
    return make_report("embedding-explicit", bound, items)


def _mv_rows(action: ActionFamily, bound: int) -> dict[Word, WordSum]:
    cache = getattr(action, "_mv_zin_rows", None)
    if cache is None:
        cache = {}
        action._mv_zin_rows = cache
    rows = cache.get(bound)
    if rows is None:
        rows = lift_zinbiel_coderivation(action.V.space, action.V.brackets, bound).rows
        cache[bound] = rows
    return rows


# ---------------------------------------------------------------------------
# the projected commutator-series route


def _ad_series(
    start: TruncatedCoderivation, t: TruncatedCoderivation, bound: int, include_start: bool
) -> TruncatedCoderivation:
    """``sum_m [..[start, t].., t] / m!`` with stabilization asserted."""
    acc = start if include_start else start.scale(Fraction(0))
    term = start
    factorial = Fraction(1)
    step = 0
    while not term.is_zero():
        step += 1
        factorial *= step
        term = commutator(term, t)
        acc = acc.add(term.scale(Fraction(1) / factorial))
        if step > 2 * bound + _SERIES_SLACK:
            raise RouteDisagreement("commutator series did not stabilize")
        if term.is_zero():
            break
    return acc


def _project_h(cod: TruncatedCoderivation, hemi: HemiProduct) -> dict[Word, Vector]:
    """Keep exactly the components sending pure-target words to acting letters."""
    out: dict[Word, Vector] = {}
    for w in cod.rows:
        if not hemi.is_pure_v(w):
            continue
        vec = cod.restriction_vector(w)
        evec = hemi.e_part(vec)
        if evec:
            out[hemi.to_v_word(w)] = evec
    return out


def check_embedding_mc(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> CheckReport:
    """Flatness of the tensor's coderivation inside the derived-bracket frame.

    Builds the product codifferential and the tensor's coderivation, runs the
    iterated-commutator series and projects onto target-to-acting components.
    The series is finite per output weight; stabilization is asserted at run
    time rather than assumed.
    """
    _check_tensor_spaces(tensor, action)
    hemi = _ensure_coherent(action, bound)
    q = hemi.codifferential(bound)
    t = tensor_coderivation(tensor, hemi, bound)
    series = _ad_series(q, t, bound, include_start=False)
    rows = _project_h(series, hemi)
    vspace, espace = action.V.space, action.E.space
    items = [
        Residual(len(w), vspace.format_word(w), format_vector(espace, vec))
        for w, vec in rows.items()
    ]
    return make_report("embedding-mc", bound, items)


def check_embedding(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> tuple[CheckReport, CheckReport]:
    """Both routes; they must agree residual by residual."""
    explicit = check_embedding_explicit(tensor, action, bound)
    flat = check_embedding_mc(tensor, action, bound)
    if {(r.arity, r.word, r.value) for r in explicit.residuals} != {
        (r.arity, r.word, r.value) for r in flat.residuals
    }:
        raise RouteDisagreement(
            "explicit equations and projected commutator series disagree: "
            f"{explicit.residuals[:2]} vs {flat.residuals[:2]}"
        )
    return explicit, flat


# ---------------------------------------------------------------------------
# descendent structure


def descendent(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> HomotopyStructure:
    """The plain bracket family induced on the target by a tensor.

    Unary bracket is the target's own; higher brackets feed symmetrized
    comorphism images of proper prefixes into the action.
    """
    _check_tensor_spaces(tensor, action)
    _ensure_coherent(action, bound)
    V = action.V
    vspace, espace = V.space, action.E.space
    com = tensor.comorphism(bound)
    brackets: dict[int, MultiMap] = {}
    if V.bracket(1) is not None:
        brackets[1] = V.bracket(1)
    for n in range(2, bound + 1):
        table: dict[Word, Vector] = {}
        for w in vspace.words(n):
            acc = dict(V.eval_bracket(n, w)) if V.bracket(n) is not None else {}
            for k in range(1, n):
                for ue, ce in com.apply_word(w[:k]).items():
                    norm, s = espace.normalize(ue)
                    if not s:
                        continue
                    merge_into(acc, action.eval(norm, w[k:]), Fraction(s) * ce)
            if acc:
                table[w] = acc
        if table:
            brackets[n] = MultiMap(vspace, vspace, n, 1, PLAIN, table)
    max_arity = max(bound, V.max_arity)
    return HomotopyStructure(vspace, PLAIN, brackets, max_arity)


def check_descendent_morphism(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> CheckReport:
    """The tensor as a morphism from its descendent structure to the acting one."""
    explicit = check_embedding_explicit(tensor, action, bound)
    if not explicit.ok:
        raise InputError("descendent morphism check needs a verified tensor")
    source = descendent(tensor, action, bound)
    target = lie_to_loday(action.E)
    return check_loday_morphism(tensor.components, source, target, bound)


# ---------------------------------------------------------------------------
# the restriction lemma


def restriction_lemma_check(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> CheckReport:
    """Relative co-Leibniz law and restriction formula for ``p Q (id + T)``.

    The composite of the product codifferential with the extended comorphism,
    projected to pure-target words, must (a) satisfy the coderivation law
    relative to the projection comorphism and (b) restrict on target words to
    the target brackets plus prefix-fed action terms; (b) is compared against
    the independent matrix expansion of the composite.
    """
    _check_tensor_spaces(tensor, action)
    hemi = _ensure_coherent(action, bound)
    vspace, espace = action.V.space, action.E.space
    V = action.V
    q = hemi.codifferential(bound)
    ext = extend_tensor(tensor, action, bound)
    com = tensor.comorphism(bound)

    def project(words: WordSum) -> WordSum:
        out: WordSum = {}
        for u, c in words.items():
            if hemi.is_pure_v(u):
                add_into(out, hemi.to_v_word(u), c)
        return out

    def r_of(word: Word) -> WordSum:
        return project(q.apply_sum(ext.apply_word(word)))

    items: list[Residual] = []
    for w in hemi.space.words_up_to(bound):
        lhs: dict = {}
        for u, c in r_of(w).items():
            merge_into(lhs, zinbiel_coproduct(vspace, u), c)
        rhs: dict = {}
        for (a, b), c in zinbiel_coproduct(hemi.space, w).items():
            pb = project({b: Fraction(1)})
            for u, cu in r_of(a).items():
                for vb, cb in pb.items():
                    add_into(rhs, (u, vb), c * cu * cb)
            pa = project({a: Fraction(1)})
            sign = -1 if hemi.space.word_degree(a) % 2 else 1
            for va, ca in pa.items():
                for u, cu in r_of(b).items():
                    add_into(rhs, (va, u), sign * c * ca * cu)
        diff = dict(lhs)
        for key, c in rhs.items():
            add_into(diff, key, -c)
        if diff:
            items.append(
                Residual(
                    len(w),
                    hemi.space.format_word(w),
                    "co-Leibniz defect on "
                    + ", ".join(
                        f"{vspace.format_word(a)}(x){vspace.format_word(b)}"
                        for (a, b) in sorted(diff)[:3]
                    ),
                )
            )

    # restriction maps on pure-target words match the prefix formula
    for n in range(1, bound + 1):
        for w in vspace.words(n):
            got: Vector = {}
            row = r_of(hemi.from_v_word(w))
            for u, c in row.items():
                if len(u) == 1:
                    add_into(got, u[0], c)
            expected = dict(V.eval_bracket(n, w)) if V.bracket(n) is not None else {}
            for k in range(1, n):
                for ue, ce in com.apply_word(w[:k]).items():
                    norm, s = espace.normalize(ue)
                    if not s:
                        continue
                    merge_into(expected, action.eval(norm, w[k:]), Fraction(s) * ce)
            diff = dict(got)
            for b, c in expected.items():
                add_into(diff, b, -c)
            if diff:
                items.append(
                    Residual(
                        n,
                        vspace.format_word(w),
                        "restriction defect " + format_vector(vspace, diff),
                    )
                )
    return make_report("restriction-lemma", bound, items)


# ---------------------------------------------------------------------------
# strict tensors for the self-action and the centroid


def adjoint_strict_check(E: HomotopyStructure, t1: MultiMap) -> CheckReport:
    """The two strict conditions of a unary tensor against its own brackets."""
    if t1.arity != 1 or t1.degree != 0:
        raise InputError("a strict tensor is a single degree-0 unary component")
    if t1.source is not E.space or t1.target is not E.space:
        raise InputError("strict adjoint tensors are endomorphisms")
    space = E.space
    items: list[Residual] = []
    l1 = E.bracket(1)
    for i in range(space.dim):
        lhs: Vector = {}
        rhs: Vector = {}
        if l1 is not None:
            for j, c in t1.eval((i,)).items():
                merge_into(lhs, l1.eval((j,)), c)
            for j, c in l1.eval((i,)).items():
                merge_into(rhs, t1.eval((j,)), c)
        diff = dict(lhs)
        for b, c in rhs.items():
            add_into(diff, b, -c)
        if diff:
            items.append(
                Residual(1, space.format_word((i,)), format_vector(space, diff))
            )
    for n in range(2, E.max_arity + 1):
        ln = E.bracket(n)
        if ln is None:
            continue
        for w in space.words(n):
            lhs = _push_through(t1, w, n, ln)
            rhs: Vector = {}
            for u, c in _expand_choices(t1, w[:-1]):
                val = ln.eval(u + (w[-1],))
                for b, cb in val.items():
                    merge_into(rhs, t1.eval((b,)), c * cb)
            diff = dict(lhs)
            for b, c in rhs.items():
                add_into(diff, b, -c)
            if diff:
                items.append(
                    Residual(n, space.format_word(w), format_vector(space, diff))
                )
    return make_report("adjoint-strict", E.max_arity, items)


def _expand_choices(t1: MultiMap, word: Word):
    """All ways of replacing each letter by its unary image, with products."""
    out = [((), Fraction(1))]
    for letter in word:
        vec = t1.eval((letter,))
        out = [(u + (b,), c * cb) for (u, c) in out for b, cb in vec.items()]
    return out


def _push_through(t1: MultiMap, word: Word, n: int, ln: MultiMap | None) -> Vector:
    acc: Vector = {}
    if ln is None:
        return acc
    for u, c in _expand_choices(t1, word):
        merge_into(acc, ln.eval(u), c)
    return acc


def compose_unary(f: MultiMap, g: MultiMap) -> MultiMap:
    """``f`` after ``g`` for unary maps on the same space."""
    space = g.source
    table: dict[Word, Vector] = {}
    for i in range(space.dim):
        acc: Vector = {}
        for j, c in g.eval((i,)).items():
            merge_into(acc, f.eval((j,)), c)
        if acc:
            table[(i,)] = acc
    return MultiMap(space, f.target, 1, f.degree + g.degree, PLAIN, table)


def strict_algebra_compose(
    E: HomotopyStructure, t1: MultiMap, t1_other: MultiMap
) -> CheckReport:
    """Closure of the strict condition under composition of two verified tensors."""
    first = adjoint_strict_check(E, t1)
    second = adjoint_strict_check(E, t1_other)
    if not (first.ok and second.ok):
        raise InputError("composition closure needs two verified strict tensors")
    return adjoint_strict_check(E, compose_unary(t1, t1_other))


def centroid_check(E: HomotopyStructure, f1: MultiMap) -> CheckReport:
    """Chain-map and adjoint-commutation conditions for a unary endomorphism."""
    if f1.arity != 1 or f1.degree != 0:
        raise InputError("centroid members are degree-0 unary maps")
    space = E.space
    items: list[Residual] = []
    l1 = E.bracket(1)
    for i in range(space.dim):
        lhs: Vector = {}
        rhs: Vector = {}
        if l1 is not None:
            for j, c in f1.eval((i,)).items():
                merge_into(lhs, l1.eval((j,)), c)
            for j, c in l1.eval((i,)).items():
                merge_into(rhs, f1.eval((j,)), c)
        diff = dict(lhs)
        for b, c in rhs.items():
            add_into(diff, b, -c)
        if diff:
            items.append(
                Residual(1, space.format_word((i,)), format_vector(space, diff))
            )
    for k in range(1, E.max_arity):
        lk1 = E.bracket(k + 1)
        if lk1 is None:
            continue
        for xw in space.canonical_words(k):
            for e in range(space.dim):
                lhs = {}
                for j, c in f1.eval((e,)).items():
                    merge_into(lhs, lk1.eval(xw + (j,)), c)
                rhs = {}
                for b, c in lk1.eval(xw + (e,)).items():
                    merge_into(rhs, f1.eval((b,)), c)
                diff = dict(lhs)
                for b, c in rhs.items():
                    add_into(diff, b, -c)
                if diff:
                    items.append(
                        Residual(
                            k + 1,
                            f"{space.format_word(xw)} ; {space.format_word((e,))}",
                            format_vector(space, diff),
                        )
                    )
    return make_report("centroid", E.max_arity, items)


# ---------------------------------------------------------------------------
# the deformation complex


@dataclass(frozen=True)
class HomElement:
    """A homogeneous family of target-word-to-acting maps up to a bound."""

    degree: int
    rows: tuple[tuple[Word, tuple[tuple[int, Fraction], ...]], ...]

    @classmethod
    def from_rows(cls, degree: int, rows: Mapping[Word, Vector]) -> "HomElement":
        packed = tuple(
            (w, tuple(sorted(rows[w].items()))) for w in sorted(rows) if rows[w]
        )
        return cls(degree, packed)

    def as_dict(self) -> dict[Word, Vector]:
        return {w: dict(vec) for w, vec in self.rows}

    @property
    def is_zero(self) -> bool:
        return not self.rows


class DeformationComplex:
    """Derived brackets around a verified tensor, materialized on a basis.

    The basis of the truncation consists of the elementary maps sending one
    target word (length up to the bound) to one acting letter; the bigrading
    of a basis element is (map degree, input word length).  The unary twisted
    bracket is stored as an exact matrix.
    """

    def __init__(self, tensor: EmbeddingTensor, action: ActionFamily, bound: int):
        explicit = check_embedding_explicit(tensor, action, bound)
        if not explicit.ok:
            raise InputError("the deformation complex sits at a verified tensor")
        self.tensor = tensor
        self.action = action
        self.bound = bound
        self.hemi = action.hemiproduct()
        self.q = self.hemi.codifferential(bound)
        self.t = tensor_coderivation(tensor, self.hemi, bound)
        self.twisted = _ad_series(self.q, self.t, bound, include_start=True)
        vspace, espace = action.V.space, action.E.space
        self.basis: list[tuple[Word, int]] = [
            (w, b)
            for w in vspace.words_up_to(bound)
            for b in range(espace.dim)
        ]
        self.basis_index = {ub: i for i, ub in enumerate(self.basis)}
        self._d1_columns: list[dict[int, Fraction]] | None = None

    # -- elements and their coderivations -------------------------------------

    def element_degree(self, w: Word, b: int) -> int:
        return self.action.E.space.degrees[b] - self.action.V.space.word_degree(w)

    def basis_element(self, w: Word, b: int) -> HomElement:
        return HomElement.from_rows(
            self.element_degree(w, b), {w: {b: Fraction(1)}}
        )

    def lift(self, element: HomElement) -> TruncatedCoderivation:
        space = self.hemi.space
        per_arity: dict[int, dict[Word, Vector]] = {}
        for w, vec in element.rows:
            per_arity.setdefault(len(w), {})[self.hemi.from_v_word(w)] = dict(vec)
        restrictions = {
            k: MultiMap(space, space, k, element.degree, PLAIN, table)
            for k, table in per_arity.items()
        }
        return lift_zinbiel_coderivation(space, restrictions, self.bound)

    def project(self, cod: TruncatedCoderivation, degree: int) -> HomElement:
        return HomElement.from_rows(degree, _project_h(cod, self.hemi))

    # -- derived brackets ------------------------------------------------------

    def derived_bracket(self, elements: list[HomElement]) -> HomElement:
        """``P([..[[Q, a_1], a_2].., a_k])`` for elements of the truncation."""
        chain = self.q
        degree = 1
        for a in elements:
            chain = commutator(chain, self.lift(a))
            degree += a.degree
        return self.project(chain, degree)

    def twisted_bracket(self, elements: list[HomElement]) -> HomElement:
        """Same chain started from the series-twisted codifferential."""
        chain = self.twisted
        degree = 1
        for a in elements:
            chain = commutator(chain, self.lift(a))
            degree += a.degree
        return self.project(chain, degree)

    def mc_residual_of(self, element: HomElement) -> HomElement:
        """Curvature of a degree-0 candidate inside the twisted structure."""
        if element.degree != 0:
            raise InputError("deformation candidates are degree-0 elements")
        lifted = self.lift(element)
        acc: dict[Word, Vector] = {}
        term = self.twisted
        factorial = Fraction(1)
        step = 0
        while True:
            step += 1
            factorial *= step
            term = commutator(term, lifted)
            if term.is_zero():
                break
            for w, vec in _project_h(term, self.hemi).items():
                merge_into(acc.setdefault(w, {}), vec, Fraction(1) / factorial)
            if step > 2 * self.bound + _SERIES_SLACK:
                raise RouteDisagreement("deformation series did not stabilize")
        acc = {w: v for w, v in acc.items() if v}
        return HomElement.from_rows(1, acc)

    # -- the unary differential as a matrix ------------------------------------

    def d1_columns(self) -> list[dict[int, Fraction]]:
        if self._d1_columns is None:
            cols = []
            for w, b in self.basis:
                elem = self.basis_element(w, b)
                image = self.twisted_bracket([elem])
                col: dict[int, Fraction] = {}
                for u, vec in image.rows:
                    for e, c in vec:
                        col[self.basis_index[(u, e)]] = c
                cols.append(col)
            self._d1_columns = cols
        return self._d1_columns

    def d1_square_defect(self) -> list[tuple[int, int, Fraction]]:
        cols = self.d1_columns()
        defects = []
        for j, col in enumerate(cols):
            acc: dict[int, Fraction] = {}
            for i, c in col.items():
                for i2, c2 in cols[i].items():
                    add_into(acc, i2, c * c2)
            for i, c in acc.items():
                defects.append((i, j, c))
        return defects

    def check_d1_squares_to_zero(self) -> CheckReport:
        items = [
            Residual(
                len(self.basis[j][0]),
                f"{self.action.V.space.format_word(self.basis[j][0])}"
                f"->{self.action.E.space.symbols[self.basis[j][1]]}",
                f"row {i}: {c}",
            )
            for i, j, c in self.d1_square_defect()
        ]
        return make_report("deformation-d1-square", self.bound, items)


def deformation_complex(
    tensor: EmbeddingTensor, action: ActionFamily, bound: int
) -> DeformationComplex:
    return DeformationComplex(tensor, action, bound)


@dataclass(frozen=True)
class CohomologyRanks:
    degree: int
    weight: int
    piece_dim: int
    rank_out: int
    kernel_dim: int
    rank_in: int

    @property
    def image_dim(self) -> int:
        return self.rank_in


def cohomology_rank(
    complex_: DeformationComplex, degree: int, weight: int
) -> CohomologyRanks:
    """Exact ranks of the unary twisted bracket at one bigraded piece.

    ``rank_out`` is the rank of the differential restricted to the piece;
    ``rank_in`` the rank of its components landing in the piece from the full
    degree-below truncation.  Kernel dimension follows by rank-nullity.
    """
    cols = complex_.d1_columns()
    piece = [
        j
        for j, (w, b) in enumerate(complex_.basis)
        if len(w) == weight and complex_.element_degree(w, b) == degree
    ]
    below = [
        j
        for j, (w, b) in enumerate(complex_.basis)
        if complex_.element_degree(w, b) == degree - 1
    ]
    out_rows = [
        [cols[j].get(i, Fraction(0)) for i in range(len(complex_.basis))]
        for j in piece
    ]
    rank_out = rank(out_rows)
    in_rows = [[cols[j].get(i, Fraction(0)) for i in piece] for j in below]
    rank_in = rank(in_rows)
    return CohomologyRanks(
        degree=degree,
        weight=weight,
        piece_dim=len(piece),
        rank_out=rank_out,
        kernel_dim=len(piece) - rank_out,
        rank_in=rank_in,
    )
