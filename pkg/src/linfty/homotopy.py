"""Homotopy Lie and Loday structures on the shift, with their checkers.

A structure is a space with a family of degree +1 brackets.  Symmetric
families are candidates for the generalized Jacobi identity (equivalently a
square-zero coderivation of the reduced symmetric coalgebra); plain families
are checked against the anchored identity of the Zinbiel coalgebra.  Every
checker runs two independent routes, the componentwise identity and the
lifted-coderivation square, and raises :class:`RouteDisagreement` if they
ever differ.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .graded import GradedSpace, Word, _unshuffles, increasing_unshuffles, compositions, koszul_sign, permute, unshuffles
from .multimap import (
    PLAIN,
    SYMMETRIC,
    ZINBIEL,
    MultiMap,
    TruncatedCoderivation,
    Vector,
    add_into,
    commutator,
    lift_comorphism,
    lift_symmetric_coderivation,
    lift_zinbiel_coderivation,
    merge_into,
    shifted_bracket,
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
    "DglaOnCoder",
    "EndSpace",
    "HomotopyStructure",
    "McElement",
    "check_lie_infinity",
    "check_lie_morphism",
    "check_loday_infinity",
    "check_loday_morphism",
    "check_representation",
    "coder_dgla",
    "end_dgla",
    "lie_to_loday",
    "maurer_cartan",
    "mc_residual",
    "twist",
]


class HomotopyStructure:
    """A space with an arity-indexed family of degree +1 brackets.

    ``flavor`` is ``"symmetric"`` for Lie-type structures and ``"plain"`` for
    Loday-type ones.  Brackets vanish above ``max_arity``, which makes every
    Maurer-Cartan and twisting sum finite and exact.  Degree-inhomogeneous
    brackets are rejected at construction.
    """

    __slots__ = ("space", "flavor", "brackets", "max_arity")

    def __init__(self, space, flavor, brackets: Mapping[int, MultiMap], max_arity=None):
        if flavor not in (SYMMETRIC, PLAIN):
            raise InputError(f"unknown structure flavor {flavor!r}")
        brackets = {k: f for k, f in brackets.items() if not f.is_zero()}
        for k, f in brackets.items():
            if f.arity != k:
                raise InputError(f"bracket stored at arity {k} has arity {f.arity}")
            if f.degree != 1:
                raise InputError(f"bracket of arity {k} has degree {f.degree}, not +1")
            if f.source is not space or f.target is not space:
                raise InputError("brackets must be endomorphisms of the structure space")
            if flavor == SYMMETRIC and f.flavor != SYMMETRIC:
                raise InputError(f"symmetric structure holds a plain arity-{k} bracket")
        if max_arity is None:
            max_arity = max(brackets, default=1)
        if any(k > max_arity for k in brackets):
            raise InputError("bracket arity exceeds the declared maximum")
        self.space = space
        self.flavor = flavor
        self.brackets = dict(sorted(brackets.items()))
        self.max_arity = max_arity

    def bracket(self, k: int) -> MultiMap | None:
        return self.brackets.get(k)

    def eval_bracket(self, k: int, word: Word) -> Vector:
        f = self.brackets.get(k)
        return f.eval(word) if f is not None else {}

    def lift(self, bound: int) -> TruncatedCoderivation:
        if self.flavor == SYMMETRIC:
            return lift_symmetric_coderivation(self.space, self.brackets, bound)
        return lift_zinbiel_coderivation(self.space, self.brackets, bound)

    def zinbiel_lift(self, bound: int) -> TruncatedCoderivation:
        """The Zinbiel coderivation of the same family (any flavor)."""
        return lift_zinbiel_coderivation(self.space, self.brackets, bound)

    def __repr__(self) -> str:
        ks = ",".join(str(k) for k in self.brackets)
        return (
            f"HomotopyStructure({self.space.name}, {self.flavor}, arities [{ks}], "
            f"max_arity={self.max_arity})"
        )


def lie_to_loday(structure: HomotopyStructure) -> HomotopyStructure:
    """Reinterpret a symmetric family as a plain (Zinbiel) one.

    The same brackets define a coderivation of the Zinbiel coalgebra, and the
    symmetric identity implies the anchored one.
    """
    if structure.flavor != SYMMETRIC:
        raise InputError("lie_to_loday expects a symmetric structure")
    return HomotopyStructure(
        structure.space, PLAIN, structure.brackets, structure.max_arity
    )


# ---------------------------------------------------------------------------
# defining identities


def _lie_identity_value(structure: HomotopyStructure, word: Word) -> Vector:
    """The unshuffle double sum of the symmetric structure identity."""
    space = structure.space
    n = len(word)
    degs = space.word_degrees(word)
    acc: Vector = {}
    for i in range(1, n + 1):
        inner = structure.bracket(i)
        outer = structure.bracket(n - i + 1)
        if inner is None or outer is None:
            continue
        sigmas = unshuffles(i, n - i) if i < n else (tuple(range(n)),)
        for sigma in sigmas:
            eps = koszul_sign(sigma, degs)
            pw = permute(sigma, word)
            val = inner.eval(pw[:i])
            if not val:
                continue
            rest = pw[i:]
            for b, c in val.items():
                merge_into(acc, outer.eval((b,) + rest), eps * c)
    return acc


def _loday_identity_value(structure: HomotopyStructure, word: Word) -> Vector:
    """The anchored double sum of the plain (Zinbiel) structure identity."""
    space = structure.space
    n = len(word)
    acc: Vector = {}
    for k in range(1, n + 1):
        inner = structure.bracket(k)
        outer = structure.bracket(n - k + 1)
        if inner is None or outer is None:
            continue
        for i in range(0, n - k + 1):
            head = word[: i + k - 1]
            degs = space.word_degrees(head)
            anchored = word[i + k - 1]
            tail = word[i + k:]
            for sigma in _unshuffles((i, k - 1)):
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, head)
                val = inner.eval(pw[i:] + (anchored,))
                if not val:
                    continue
                front = pw[:i]
                sign = -eps if space.word_degree(front) % 2 else eps
                for b, c in val.items():
                    merge_into(acc, outer.eval(front + (b,) + tail), sign * c)
    return acc


def _square_restrictions(structure: HomotopyStructure, bound: int) -> dict[Word, Vector]:
    """Single-letter components of the squared lifted coderivation."""
    lifted = structure.lift(bound)
    out: dict[Word, Vector] = {}
    for w, row in lifted.rows.items():
        acc: Vector = {}
        for u, c in row.items():
            merge_into(acc, structure.eval_bracket(len(u), u), c)
        if acc:
            out[w] = acc
    return out


def _residual_items(space, residuals: dict[Word, Vector]):
    return [
        Residual(len(w), space.format_word(w), format_vector(space, v))
        for w, v in residuals.items()
    ]


def check_lie_infinity(structure: HomotopyStructure, bound: int) -> CheckReport:
    """Verify the symmetric structure identity on all canonical words.

    Runs the componentwise double sum and the coderivation-square route and
    insists they agree exactly.
    """
    if structure.flavor != SYMMETRIC:
        raise InputError("check_lie_infinity expects a symmetric structure")
    space = structure.space
    direct: dict[Word, Vector] = {}
    for w in space.canonical_words_up_to(bound):
        val = _lie_identity_value(structure, w)
        if val:
            direct[w] = val
    squared = _square_restrictions(structure, bound)
    if direct != squared:
        raise RouteDisagreement(
            "symmetric identity sum and coderivation square differ: "
            f"{_route_diff(space, direct, squared)}"
        )
    return make_report("lie-infinity", bound, _residual_items(space, direct))


def check_loday_infinity(structure: HomotopyStructure, bound: int) -> CheckReport:
    """Verify the anchored structure identity on all tensor words.

    Both the explicit double sum and the square of the lifted Zinbiel
    coderivation are computed and compared.
    """
    space = structure.space
    direct: dict[Word, Vector] = {}
    for w in space.words_up_to(bound):
        val = _loday_identity_value(structure, w)
        if val:
            direct[w] = val
    lifted = lift_zinbiel_coderivation(space, structure.brackets, bound)
    squared: dict[Word, Vector] = {}
    for w, row in lifted.rows.items():
        acc: Vector = {}
        for u, c in row.items():
            merge_into(acc, structure.eval_bracket(len(u), u), c)
        if acc:
            squared[w] = acc
    if direct != squared:
        raise RouteDisagreement(
            "anchored identity sum and coderivation square differ: "
            f"{_route_diff(space, direct, squared)}"
        )
    return make_report("loday-infinity", bound, _residual_items(space, direct))


def _route_diff(space, a, b) -> str:
    words = sorted(set(a) | set(b))
    bad = [w for w in words if a.get(w) != b.get(w)]
    return ", ".join(space.format_word(w) for w in bad[:5])


# ---------------------------------------------------------------------------
# morphisms


def _check_components(components: Mapping[int, MultiMap], source, target) -> None:
    for k, f in components.items():
        if f.is_zero():
            continue
        if f.degree != 0:
            raise InputError(f"morphism component of arity {k} has degree {f.degree}")
        if f.arity != k:
            raise InputError("component arity mismatch")
        if f.source is not source.space or f.target is not target.space:
            raise InputError("component spaces do not match the structures")


def check_lie_morphism(
    components: Mapping[int, MultiMap],
    source: HomotopyStructure,
    target: HomotopyStructure,
    bound: int,
) -> CheckReport:
    """Verify the morphism identity between symmetric structures.

    Componentwise: for every canonical source word, the unshuffled sum of
    components applied after source brackets equals the target brackets
    applied to block images over increasing unshuffles.  The comorphism
    route checks that the lift intertwines the lifted codifferentials; the
    two verdicts must agree.
    """
    if source.flavor != SYMMETRIC or target.flavor != SYMMETRIC:
        raise InputError("check_lie_morphism expects symmetric structures")
    _check_components(components, source, target)
    space, tspace = source.space, target.space
    residuals: dict[Word, Vector] = {}
    for w in space.canonical_words_up_to(bound):
        n = len(w)
        degs = space.word_degrees(w)
        lhs: Vector = {}
        for k in range(1, n + 1):
            lk = source.bracket(k)
            fk = components.get(n - k + 1)
            if lk is None or fk is None:
                continue
            sigmas = unshuffles(k, n - k) if k < n else (tuple(range(n)),)
            for sigma in sigmas:
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, w)
                val = lk.eval(pw[:k])
                if not val:
                    continue
                rest = pw[k:]
                for b, c in val.items():
                    merge_into(lhs, fk.eval((b,) + rest), eps * c)
        rhs = _morphism_rhs(components, target, w, degs)
        diff = dict(lhs)
        for b, c in rhs.items():
            add_into(diff, b, -c)
        if diff:
            residuals[w] = diff
    report = make_report(
        "lie-morphism",
        bound,
        [
            Residual(len(w), space.format_word(w), format_vector(tspace, v))
            for w, v in residuals.items()
        ],
    )
    # comorphism route: intertwine the lifted codifferentials
    com = lift_comorphism(space, tspace, components, bound, SYMMETRIC)
    me = source.lift(bound)
    mv = target.lift(bound)
    intertwine_ok = _intertwines(com, me, mv)
    if intertwine_ok != report.ok:
        raise RouteDisagreement(
            "componentwise morphism identity and comorphism intertwining disagree"
        )
    return report


def _morphism_rhs(components, target, w, degs) -> Vector:
    rhs: Vector = {}
    n = len(w)
    for comp in compositions(n):
        j = len(comp)
        mj = target.bracket(j)
        if mj is None:
            continue
        maps = [components.get(k) for k in comp]
        if any(m is None for m in maps):
            continue
        for sigma in increasing_unshuffles(*comp):
            eps = koszul_sign(sigma, degs)
            pw = permute(sigma, w)
            pos = 0
            blocks = []
            dead = False
            for k, f in zip(comp, maps):
                val = f.eval(pw[pos : pos + k])
                if not val:
                    dead = True
                    break
                blocks.append(val)
                pos += k
            if dead:
                continue
            words = [((), Fraction(eps))]
            for vec in blocks:
                words = [(u + (b,), c * cb) for (u, c) in words for b, cb in vec.items()]
            for u, c in words:
                merge_into(rhs, mj.eval(u), c)
    return rhs


def _intertwines(com, source_codiff, target_codiff) -> bool:
    for w, row in source_codiff.rows.items():
        lhs = com.apply_sum(row)
        rhs = target_codiff.apply_sum(com.apply_word(w))
        if lhs != rhs:
            return False
    for w, row in com.rows.items():
        if w not in source_codiff.rows:
            if target_codiff.apply_sum(row):
                return False
    return True


def check_loday_morphism(
    components: Mapping[int, MultiMap],
    source: HomotopyStructure,
    target: HomotopyStructure,
    bound: int,
) -> CheckReport:
    """Verify the anchored morphism identity between plain structures."""
    _check_components(components, source, target)
    space, tspace = source.space, target.space
    residuals: dict[Word, Vector] = {}
    for w in space.words_up_to(bound):
        n = len(w)
        lhs: Vector = {}
        for k in range(1, n + 1):
            lk = source.bracket(k)
            fk = components.get(n - k + 1)
            if lk is None or fk is None:
                continue
            for i in range(0, n - k + 1):
                head = w[: i + k - 1]
                degs = space.word_degrees(head)
                anchored = w[i + k - 1]
                tail = w[i + k:]
                for sigma in _unshuffles((i, k - 1)):
                    eps = koszul_sign(sigma, degs)
                    pw = permute(sigma, head)
                    val = lk.eval(pw[i:] + (anchored,))
                    if not val:
                        continue
                    front = pw[:i]
                    sign = -eps if space.word_degree(front) % 2 else eps
                    for b, c in val.items():
                        merge_into(lhs, fk.eval(front + (b,) + tail), sign * c)
        rhs: Vector = {}
        degs = space.word_degrees(w)
        for comp in compositions(n):
            j = len(comp)
            mj = target.bracket(j)
            if mj is None:
                continue
            maps = [components.get(k) for k in comp]
            if any(m is None for m in maps):
                continue
            for sigma in increasing_unshuffles(*comp):
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, w)
                pos = 0
                blocks = []
                dead = False
                for k, f in zip(comp, maps):
                    val = f.eval(pw[pos : pos + k])
                    if not val:
                        dead = True
                        break
                    blocks.append(val)
                    pos += k
                if dead:
                    continue
                words = [((), Fraction(eps))]
                for vec in blocks:
                    words = [
                        (u + (b,), c * cb) for (u, c) in words for b, cb in vec.items()
                    ]
                for u, c in words:
                    merge_into(rhs, mj.eval(u), c)
        diff = dict(lhs)
        for b, c in rhs.items():
            add_into(diff, b, -c)
        if diff:
            residuals[w] = diff
    report = make_report(
        "loday-morphism",
        bound,
        [
            Residual(len(w), space.format_word(w), format_vector(tspace, v))
            for w, v in residuals.items()
        ],
    )
    com = lift_comorphism(space, tspace, components, bound, ZINBIEL)
    qe = source.zinbiel_lift(bound)
    qv = target.zinbiel_lift(bound)
    if _intertwines(com, qe, qv) != report.ok:
        raise RouteDisagreement(
            "componentwise anchored morphism identity and comorphism "
            "intertwining disagree"
        )
    return report


# ---------------------------------------------------------------------------
# Maurer-Cartan elements and twisting


@dataclass(frozen=True)
class McElement:
    """A degree-0 element with the partial sums of its curvature series."""

    element: tuple[tuple[int, Fraction], ...]
    partial_sums: tuple[tuple[tuple[int, Fraction], ...], ...]

    @property
    def residual(self) -> Vector:
        return dict(self.partial_sums[-1]) if self.partial_sums else {}

    @property
    def is_flat(self) -> bool:
        return not self.residual


def _check_degree_zero(structure, element: Vector) -> None:
    for i, c in element.items():
        if c and structure.space.degrees[i] != 0:
            raise InputError(
                f"element has a component on {structure.space.symbols[i]} of "
                f"degree {structure.space.degrees[i]}; flat elements are degree 0"
            )


def _power_eval(bracket: MultiMap, element: Vector, prefix: Word, count: int) -> Vector:
    """Multilinear expansion of ``bracket(e, ..., e, prefix)`` with ``count`` e's."""
    words = [((), Fraction(1))]
    for _ in range(count):
        words = [(w + (b,), c * cb) for (w, c) in words for b, cb in element.items()]
    acc: Vector = {}
    for w, c in words:
        merge_into(acc, bracket.eval(w + prefix), c)
    return acc


def mc_residual(structure: HomotopyStructure, element: Vector) -> Vector:
    """The finite curvature sum ``sum_k l_k(e, ..., e) / k!``."""
    return maurer_cartan(structure, element).residual


def maurer_cartan(structure: HomotopyStructure, element: Vector) -> McElement:
    if structure.flavor != SYMMETRIC:
        raise InputError("Maurer-Cartan elements live in symmetric structures")
    _check_degree_zero(structure, element)
    factorial = Fraction(1)
    acc: Vector = {}
    partials = []
    for k in range(1, structure.max_arity + 1):
        factorial *= k
        f = structure.bracket(k)
        if f is not None:
            term = _power_eval(f, element, (), k)
            merge_into(acc, term, Fraction(1) / factorial)
        partials.append(tuple(sorted(acc.items())))
    return McElement(tuple(sorted(element.items())), tuple(partials))


def twist(structure: HomotopyStructure, element: Vector) -> HomotopyStructure:
    """Twist the brackets by a flat degree-0 element.

    ``l_k^e(x...) = sum_i l_{k+i}(e, ..., e, x...) / i!`` with the sum cut
    exactly at the declared maximal arity.  Rejects non-flat elements.
    """
    mc = maurer_cartan(structure, element)
    if not mc.is_flat:
        raise InputError("cannot twist by a non-flat element")
    space = structure.space
    new_brackets: dict[int, MultiMap] = {}
    for k in range(1, structure.max_arity + 1):
        table: dict[Word, Vector] = {}
        for w in space.canonical_words(k):
            acc: Vector = {}
            factorial = Fraction(1)
            for i in range(0, structure.max_arity - k + 1):
                if i:
                    factorial *= i
                f = structure.bracket(k + i)
                if f is None:
                    continue
                merge_into(acc, _power_eval(f, element, w, i), Fraction(1) / factorial)
            if acc:
                table[w] = acc
        if table:
            new_brackets[k] = MultiMap(space, space, k, 1, SYMMETRIC, table)
    return HomotopyStructure(space, SYMMETRIC, new_brackets, structure.max_arity)


# ---------------------------------------------------------------------------
# the DGLA of endomorphisms of a complex


class EndSpace:
    """Endomorphisms of a finite complex, graded by the shifted degree.

    Basis symbols ``a>b`` send basis letter ``a`` to ``b`` and carry degree
    ``deg b - deg a - 1`` (one less than the map degree, matching the shift
    on which the bracket family is symmetric).
    """

    def __init__(self, base: GradedSpace, d: MultiMap):
        if d.arity != 1 or d.degree != 1:
            raise InputError("a complex differential has arity 1 and degree +1")
        if d.source is not base or d.target is not base:
            raise InputError("differential must be an endomorphism")
        for i in range(base.dim):
            sq: Vector = {}
            for j, c in d.eval((i,)).items():
                merge_into(sq, d.eval((j,)), c)
            if sq:
                raise InputError("differential does not square to zero")
        self.base = base
        self.d = d
        pairs = [(a, b) for a in range(base.dim) for b in range(base.dim)]
        self.pairs = pairs
        self.space = GradedSpace(
            f"End({base.name})[1]",
            (
                (f"{base.symbols[a]}>{base.symbols[b]}", base.degrees[b] - base.degrees[a] - 1)
                for a, b in pairs
            ),
        )
        self._pair_index = {p: i for i, p in enumerate(pairs)}
        self._d_vec: Vector = {}
        for a in range(base.dim):
            for b, c in d.eval((a,)).items():
                self._d_vec[self._pair_index[(a, b)]] = c

    def index(self, a: int, b: int) -> int:
        return self._pair_index[(a, b)]

    def map_degree(self, idx: int) -> int:
        a, b = self.pairs[idx]
        return self.base.degrees[b] - self.base.degrees[a]

    @property
    def d_vector(self) -> Vector:
        return dict(self._d_vec)

    def compose(self, f: Vector, g: Vector) -> Vector:
        """Composite ``f . g`` of endomorphisms given as basis vectors."""
        acc: Vector = {}
        for gi, cg in g.items():
            c, d_ = self.pairs[gi]
            for fi, cf in f.items():
                a, b = self.pairs[fi]
                if d_ == a:
                    add_into(acc, self._pair_index[(c, b)], cg * cf)
        return acc

    def differential(self, f: Vector, map_degree: int) -> Vector:
        """``-d f + (-1)^{map degree of f} f d`` on a homogeneous vector."""
        acc = {k: -v for k, v in self.compose(self._d_vec, f).items()}
        sign = -1 if map_degree % 2 else 1
        merge_into(acc, self.compose(f, self._d_vec), Fraction(sign))
        return acc

    def bracket(self, f: Vector, fdeg: int, g: Vector, gdeg: int) -> Vector:
        """Shifted commutator ``(-1)^{fdeg} (f g - (-1)^{fdeg gdeg} g f)``.

        Degrees are map degrees; the result is graded symmetric in the
        shifted grading.
        """
        outer = -1 if fdeg % 2 else 1
        inner = -1 if (fdeg % 2 and gdeg % 2) else 1
        acc = self.compose(f, g)
        merge_into(acc, self.compose(g, f), Fraction(-inner))
        return {k: outer * v for k, v in acc.items()}

    def apply(self, f: Vector, vec: Vector) -> Vector:
        """Apply an endomorphism vector to a vector of the base space."""
        acc: Vector = {}
        for fi, cf in f.items():
            a, b = self.pairs[fi]
            ca = vec.get(a)
            if ca:
                add_into(acc, b, cf * ca)
        return acc


def end_dgla(base: GradedSpace, d: MultiMap) -> tuple[HomotopyStructure, EndSpace]:
    """The two-bracket symmetric structure on shifted endomorphisms.

    The unary bracket is the differential induced by ``d``; the binary one is
    the shifted commutator.  The result always passes the symmetric identity
    check (the binary bracket has the right graded symmetry by construction,
    which the constructor enforces via canonical keys).
    """
    end = EndSpace(base, d)
    space = end.space
    l1_table: dict[Word, Vector] = {}
    for i in range(space.dim):
        val = end.differential({i: Fraction(1)}, end.map_degree(i))
        if val:
            l1_table[(i,)] = val
    l2_table: dict[Word, Vector] = {}
    for w in space.canonical_words(2):
        i, j = w
        val = end.bracket(
            {i: Fraction(1)}, end.map_degree(i), {j: Fraction(1)}, end.map_degree(j)
        )
        if val:
            l2_table[w] = val
    brackets = {}
    if l1_table:
        brackets[1] = MultiMap(space, space, 1, 1, SYMMETRIC, l1_table)
    if l2_table:
        brackets[2] = MultiMap(space, space, 2, 1, SYMMETRIC, l2_table)
    return HomotopyStructure(space, SYMMETRIC, brackets, max_arity=2), end


def check_representation(
    components: Mapping[int, MultiMap],
    source: HomotopyStructure,
    end: EndSpace,
    bound: int,
) -> CheckReport:
    """Verify the representation identity of a family valued in endomorphisms.

    Components are arity-``k`` maps into the shifted endomorphism space (so
    they carry degree 0 there, i.e. degree +1 into unshifted endomorphisms).
    The check evaluates the differential and commutator sides by explicit
    endomorphism composition, independently of any lifted machinery.
    """
    space = source.space
    for k, f in components.items():
        if f.is_zero():
            continue
        if f.target is not end.space or f.degree != 0:
            raise InputError("representation components must be degree 0 into End[1]")
    residuals: dict[Word, Vector] = {}
    for w in space.canonical_words_up_to(bound):
        n = len(w)
        degs = space.word_degrees(w)
        lhs: Vector = {}
        for i in range(1, n + 1):
            li = source.bracket(i)
            fk = components.get(n - i + 1)
            if li is None or fk is None:
                continue
            sigmas = unshuffles(i, n - i) if i < n else (tuple(range(n)),)
            for sigma in sigmas:
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, w)
                val = li.eval(pw[:i])
                if not val:
                    continue
                rest = pw[i:]
                for b, c in val.items():
                    merge_into(lhs, fk.eval((b,) + rest), eps * c)
        rhs: Vector = {}
        fn = components.get(n)
        if fn is not None:
            phi = fn.eval(w)
            mdeg = space.word_degree(w) + 1
            merge_into(rhs, end.differential(phi, mdeg), Fraction(1))
        for j in range(1, n):
            fj = components.get(j)
            fnj = components.get(n - j)
            if fj is None or fnj is None:
                continue
            for sigma in increasing_unshuffles(j, n - j):
                eps = koszul_sign(sigma, degs)
                pw = permute(sigma, w)
                left = fj.eval(pw[:j])
                right = fnj.eval(pw[j:])
                if not left or not right:
                    continue
                ldeg = space.word_degree(pw[:j]) + 1
                rdeg = space.word_degree(pw[j:]) + 1
                merge_into(rhs, end.bracket(left, ldeg, right, rdeg), Fraction(eps))
        diff = dict(lhs)
        for b, c in rhs.items():
            add_into(diff, b, -c)
        if diff:
            residuals[w] = diff
    return make_report(
        "representation",
        bound,
        [
            Residual(len(w), space.format_word(w), format_vector(end.space, v))
            for w, v in residuals.items()
        ],
    )


# ---------------------------------------------------------------------------
# the DGLA on coderivations of the reduced symmetric coalgebra


class DglaOnCoder:
    """Differential and shifted bracket on truncated symmetric coderivations.

    The differential is minus the commutator with the lifted codifferential
    of the base structure; the bracket is the shifted commutator.  Both
    close on coderivations and satisfy the expected identities up to the
    bound whenever the base structure is verified.
    """

    def __init__(self, base: HomotopyStructure, bound: int):
        if base.flavor != SYMMETRIC:
            raise InputError("the coderivation algebra sits over a symmetric structure")
        self.base = base
        self.bound = bound
        self.codifferential = base.lift(bound)

    def differential(self, q: TruncatedCoderivation) -> TruncatedCoderivation:
        return commutator(self.codifferential, q).scale(Fraction(-1))

    def bracket(self, q: TruncatedCoderivation, p: TruncatedCoderivation):
        return shifted_bracket(q, p)


def coder_dgla(base: HomotopyStructure, bound: int) -> DglaOnCoder:
    return DglaOnCoder(base, bound)
