"""Actions of one symmetric structure on another, their coherence, and the
non-abelian hemisemidirect product.

An action is stored through its doubly indexed component family: degree +1
maps taking a symmetric word in the acting space and a symmetric word in the
target space to a target vector.  Fixing the acting word and lifting the
remaining slots gives a coderivation of the target's reduced symmetric
coalgebra; the action axiom is the morphism identity into the differential
graded algebra of such coderivations.  Coherence asks that these
coderivations commute with every adjoint coderivation and every mixed one,
and the main crosscheck confirms, instance by instance, that coherence is
exactly what makes the three-part brackets on the direct sum pass the
anchored (Loday) identity.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .graded import GradedSpace, Word, increasing_unshuffles, koszul_sign, permute, unshuffles
from .homotopy import HomotopyStructure, check_loday_infinity
from .multimap import (
    PLAIN,
    SYMMETRIC,
    MultiMap,
    TruncatedCoderivation,
    Vector,
    add_into,
    lift_symmetric_coderivation,
    merge_into,
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
    "ActionFamily",
    "BiMultiMap",
    "HemiProduct",
    "adjoint_action",
    "adjoint_representation",
    "check_action",
    "check_coherence",
    "hemisemidirect",
    "theorem_crosscheck",
]


class BiMultiMap:
    """A map multilinear in two blocks of slots, symmetric inside each block.

    Constants are keyed by a pair (acting word, target word), both in
    canonical order; evaluation on arbitrary orderings sorts each block with
    its own Koszul sign.  Letters never cross the block boundary.
    """

    __slots__ = ("e_space", "v_space", "e_arity", "v_arity", "degree", "constants", "_by_eword")

    def __init__(self, e_space, v_space, e_arity, v_arity, degree, constants):
        if e_arity < 1 or v_arity < 1:
            raise InputError("both blocks of a component must be nonempty")
        table: dict[tuple[Word, Word], Vector] = {}
        for (ew, vw), vec in constants.items():
            ew, vw = tuple(ew), tuple(vw)
            if len(ew) != e_arity or len(vw) != v_arity:
                raise InputError(f"key {(ew, vw)} does not match arities")
            for word, space, label in ((ew, e_space, "acting"), (vw, v_space, "target")):
                norm, sign = space.normalize(word)
                if sign == 0:
                    raise InputError(f"{label} key {word} vanishes in the symmetric algebra")
                if norm != word or sign != 1:
                    raise InputError(f"{label} key {word} is not canonical")
            deg_in = e_space.word_degree(ew) + v_space.word_degree(vw)
            clean: Vector = {}
            for out, c in vec.items():
                c = Fraction(c)
                if not c:
                    continue
                if v_space.degrees[out] != degree + deg_in:
                    raise InputError(
                        f"component constant {(ew, vw)} -> {v_space.symbols[out]} "
                        f"breaks degree homogeneity"
                    )
                clean[out] = c
            if clean:
                table[(ew, vw)] = clean
        self.e_space = e_space
        self.v_space = v_space
        self.e_arity = e_arity
        self.v_arity = v_arity
        self.degree = degree
        self.constants = table
        self._by_eword: dict[Word, dict[Word, Vector]] | None = None

    def eval(self, eword: Word, vword: Word) -> Vector:
        en, es = self.e_space.normalize(tuple(eword))
        if not es:
            return {}
        vn, vs = self.v_space.normalize(tuple(vword))
        if not vs:
            return {}
        row = self.constants.get((en, vn))
        if not row:
            return {}
        sign = es * vs
        return dict(row) if sign == 1 else {k: -v for k, v in row.items()}

    def rows_for(self, eword: Word) -> dict[Word, Vector]:
        """All stored target rows of a canonical acting word."""
        if self._by_eword is None:
            by: dict[Word, dict[Word, Vector]] = {}
            for (ew, vw), vec in self.constants.items():
                by.setdefault(ew, {})[vw] = vec
            self._by_eword = by
        return self._by_eword.get(tuple(eword), {})

    def is_zero(self) -> bool:
        return not self.constants


class ActionFamily:
    """A degree +1 component family defining a candidate action.

    ``components[(k, n)]`` maps a k-word of the acting structure and an
    n-word of the target structure to a target vector.  The family is an
    action exactly when :func:`check_action` reports no residuals.
    """

    def __init__(self, E: HomotopyStructure, V: HomotopyStructure, components):
        if E.flavor != SYMMETRIC or V.flavor != SYMMETRIC:
            raise InputError("actions happen between symmetric structures")
        comps: dict[tuple[int, int], BiMultiMap] = {}
        for (k, n), f in components.items():
            if f.is_zero():
                continue
            if f.e_space is not E.space or f.v_space is not V.space:
                raise InputError("component spaces do not match the structures")
            if (f.e_arity, f.v_arity) != (k, n):
                raise InputError("component arities do not match their index")
            if f.degree != 1:
                raise InputError(f"component {(k, n)} has degree {f.degree}, not +1")
            comps[(k, n)] = f
        self.E = E
        self.V = V
        self.components = dict(sorted(comps.items()))
        self._lift_cache: dict = {}
        self._hemi = None

    def component(self, k: int, n: int) -> BiMultiMap | None:
        return self.components.get((k, n))

    def eval(self, eword: Word, vword: Word) -> Vector:
        f = self.components.get((len(eword), len(vword)))
        return f.eval(eword, vword) if f is not None else {}

    def max_e_arity(self) -> int:
        return max((k for k, _ in self.components), default=0)

    def max_mixed_arity(self) -> int:
        return max((k + n for k, n in self.components), default=0)

    # -- coderivations attached to the action --------------------------------

    def restriction_maps(self, eword: Word, bound: int) -> dict[int, MultiMap]:
        """The family ``v-word -> value(eword; v-word)`` by target arity."""
        k = len(eword)
        degree = 1 + self.E.space.word_degree(eword)
        out: dict[int, MultiMap] = {}
        for n in range(1, bound + 1):
            f = self.components.get((k, n))
            if f is None:
                continue
            rows = f.rows_for(eword)
            if rows:
                out[n] = MultiMap(self.V.space, self.V.space, n, degree, SYMMETRIC, rows)
        return out

    def phi_of(self, eword: Word, bound: int) -> TruncatedCoderivation:
        """The coderivation of the target coalgebra attached to an acting word."""
        key = ("phi", tuple(eword), bound)
        got = self._lift_cache.get(key)
        if got is None:
            restr = self.restriction_maps(eword, bound)
            got = lift_symmetric_coderivation(self.V.space, restr, bound)
            if got.degree == 0 and got.is_zero():
                got = TruncatedCoderivation(
                    self.V.space, bound, 1 + self.E.space.word_degree(eword), SYMMETRIC, {}
                )
            self._lift_cache[key] = got
        return got

    def ad_of(self, vword: Word, bound: int) -> TruncatedCoderivation:
        """Adjoint coderivation of a target word, from the target's own brackets."""
        key = ("ad", tuple(vword), bound)
        got = self._lift_cache.get(key)
        if got is None:
            V = self.V
            degree = 1 + V.space.word_degree(vword)
            restr: dict[int, MultiMap] = {}
            for n in range(1, bound + 1):
                if V.bracket(len(vword) + n) is None:
                    continue
                table = {}
                for w in V.space.canonical_words(n):
                    vec = V.eval_bracket(len(vword) + n, tuple(vword) + w)
                    if vec:
                        table[w] = vec
                if table:
                    restr[n] = MultiMap(V.space, V.space, n, degree, SYMMETRIC, table)
            got = lift_symmetric_coderivation(V.space, restr, bound)
            if got.is_zero():
                got = TruncatedCoderivation(V.space, bound, degree, SYMMETRIC, {})
            self._lift_cache[key] = got
        return got

    def phi_mixed(self, eword: Word, vword: Word, bound: int) -> TruncatedCoderivation:
        """Coderivation absorbing a fixed target prefix: ``w -> value(x; v.w)``."""
        if not vword:
            raise InputError("the absorbed target word must be nonempty")
        key = ("mixed", tuple(eword), tuple(vword), bound)
        got = self._lift_cache.get(key)
        if got is None:
            degree = 1 + self.E.space.word_degree(eword) + self.V.space.word_degree(vword)
            restr: dict[int, MultiMap] = {}
            for n in range(1, bound + 1):
                if (len(eword), len(vword) + n) not in self.components:
                    continue
                table = {}
                for w in self.V.space.canonical_words(n):
                    vec = self.eval(eword, tuple(vword) + w)
                    if vec:
                        table[w] = vec
                if table:
                    restr[n] = MultiMap(self.V.space, self.V.space, n, degree, SYMMETRIC, table)
            got = lift_symmetric_coderivation(self.V.space, restr, bound)
            if got.is_zero():
                got = TruncatedCoderivation(self.V.space, bound, degree, SYMMETRIC, {})
            self._lift_cache[key] = got
        return got

    def restriction_of(self, eword: Word, word: Word) -> Vector:
        """Single-letter component of ``phi_of(eword)`` on a canonical word."""
        return self.eval(eword, word)

    def hemiproduct(self) -> "HemiProduct":
        if self._hemi is None:
            self._hemi = hemisemidirect(self)
        return self._hemi


# ---------------------------------------------------------------------------
# the action axiom


def _p_compose(action, outer_eword, lift_rows, vword) -> Vector:
    """Single-letter part of (phi_{outer} . C)(vword) from the rows of C."""
    acc: Vector = {}
    row = lift_rows.get(tuple(vword))
    if row:
        for u, c in row.items():
            merge_into(acc, action.eval(outer_eword, u), c)
    return acc


def check_action(action: ActionFamily, bound: int) -> CheckReport:
    """The morphism identity of the family into the coderivation algebra.

    Both sides are coderivations of the target coalgebra for every acting
    word, so they are compared through their single-letter components on all
    target words up to the bound.
    """
    E, V = action.E, action.V
    espace, vspace = E.space, V.space
    m_lift = V.lift(bound)
    items: list[Residual] = []
    for n in range(1, bound + 1):
        for xw in espace.canonical_words(n):
            degs = espace.word_degrees(xw)
            lhs: dict[Word, Vector] = {}
            for k in range(1, n + 1):
                lk = E.bracket(k)
                if lk is None:
                    continue
                sigmas = unshuffles(k, n - k) if k < n else (tuple(range(n)),)
                for sigma in sigmas:
                    eps = koszul_sign(sigma, degs)
                    pw = permute(sigma, xw)
                    val = lk.eval(pw[:k])
                    if not val:
                        continue
                    rest = pw[k:]
                    for b, c in val.items():
                        norm, s2 = espace.normalize((b,) + rest)
                        if not s2:
                            continue
                        coeff = Fraction(eps * s2) * c
                        for m in range(1, bound + 1):
                            comp = action.component(n - k + 1, m)
                            if comp is None:
                                continue
                            for vw, vec in comp.rows_for(norm).items():
                                merge_into(lhs.setdefault(vw, {}), vec, coeff)
            rhs: dict[Word, Vector] = {}
            phi_x = action.phi_of(xw, bound)
            d_phi = phi_x.degree
            sign_d = -1 if d_phi % 2 else 1
            for vw in vspace.canonical_words_up_to(bound):
                acc: Vector = {}
                # -[M, phi_x]: -(p M phi_x) + (-1)^{deg} (p phi_x M)
                row = phi_x.rows.get(vw)
                if row:
                    for u, c in row.items():
                        merge_into(acc, V.eval_bracket(len(u), u), -c)
                merge_into(acc, _p_compose(action, xw, m_lift.rows, vw), Fraction(sign_d))
                if acc:
                    rhs[vw] = acc
            for j in range(1, n):
                for sigma in increasing_unshuffles(j, n - j):
                    eps = koszul_sign(sigma, degs)
                    pw = permute(sigma, xw)
                    xa, xb = pw[:j], pw[j:]
                    lift_a = action.phi_of(xa, bound)
                    lift_b = action.phi_of(xb, bound)
                    da, db = lift_a.degree, lift_b.degree
                    outer = -1 if da % 2 else 1
                    inner = -1 if (da % 2 and db % 2) else 1
                    for vw in vspace.canonical_words_up_to(bound):
                        term = _p_compose(action, xa, lift_b.rows, vw)
                        second = _p_compose(action, xb, lift_a.rows, vw)
                        acc = rhs.setdefault(vw, {})
                        merge_into(acc, term, Fraction(eps * outer))
                        merge_into(acc, second, Fraction(-eps * outer * inner))
                        if not acc:
                            rhs.pop(vw, None)
            for vw in sorted(set(lhs) | set(rhs)):
                diff = dict(lhs.get(vw, {}))
                for b, c in rhs.get(vw, {}).items():
                    add_into(diff, b, -c)
                if diff:
                    items.append(
                        Residual(
                            n,
                            f"{espace.format_word(xw)} ; {vspace.format_word(vw)}",
                            format_vector(vspace, diff),
                        )
                    )
    return make_report("action", bound, items)


# ---------------------------------------------------------------------------
# coherence


def _commutator_restriction(action, a_restr, a_rows, b_restr, b_rows, da, db, word):
    """Single-letter part of [A, B] on ``word`` from rows and restrictions."""
    acc: Vector = {}
    row = b_rows.get(tuple(word))
    if row:
        for u, c in row.items():
            merge_into(acc, a_restr(u), c)
    sign = -1 if (da % 2 and db % 2) else 1
    row = a_rows.get(tuple(word))
    if row:
        for u, c in row.items():
            merge_into(acc, b_restr(u), Fraction(-sign) * c)
    return acc


def check_coherence(action: ActionFamily, bound: int) -> CheckReport:
    """Vanishing of the two commutator families, aligned by total weight.

    The adjoint condition is checked for all target words ``v``, acting
    words ``x`` and probe words ``w`` with ``|v|+|x|+|w| <= bound``; the
    mixed condition for all ``x, v, y, w`` with total length within the
    bound.  These are exactly the instances whose defects can appear in the
    anchored identity of the direct-sum brackets at the same bound.
    """
    E, V = action.E, action.V
    espace, vspace = E.space, V.space
    items: list[Residual] = []

    for a in range(1, bound - 1):
        for vw in vspace.canonical_words(a):
            ad_rows = action.ad_of(vw, bound).rows
            da = 1 + vspace.word_degree(vw)
            ad_restr = lambda u, _vw=vw: V.eval_bracket(len(_vw) + len(u), _vw + u)
            for b in range(1, bound - a):
                for xw in espace.canonical_words(b):
                    phi_rows = action.phi_of(xw, bound).rows
                    db = 1 + espace.word_degree(xw)
                    phi_restr = lambda u, _xw=xw: action.eval(_xw, u)
                    for c in range(1, bound - a - b + 1):
                        for ww in vspace.canonical_words(c):
                            diff = _commutator_restriction(
                                action, ad_restr, ad_rows, phi_restr, phi_rows, da, db, ww
                            )
                            if diff:
                                items.append(
                                    Residual(
                                        a + b + c,
                                        f"ad {vspace.format_word(vw)} ; "
                                        f"{espace.format_word(xw)} ; "
                                        f"{vspace.format_word(ww)}",
                                        format_vector(vspace, diff),
                                    )
                                )

    for ax in range(1, bound - 2):
        for xw in espace.canonical_words(ax):
            for av in range(1, bound - ax - 1):
                for vw in vspace.canonical_words(av):
                    mixed_rows = action.phi_mixed(xw, vw, bound).rows
                    da = 1 + espace.word_degree(xw) + vspace.word_degree(vw)
                    mixed_restr = (
                        lambda u, _xw=xw, _vw=vw: action.eval(_xw, _vw + u)
                    )
                    for ay in range(1, bound - ax - av):
                        for yw in espace.canonical_words(ay):
                            phi_rows = action.phi_of(yw, bound).rows
                            db = 1 + espace.word_degree(yw)
                            phi_restr = lambda u, _yw=yw: action.eval(_yw, u)
                            for c in range(1, bound - ax - av - ay + 1):
                                for ww in vspace.canonical_words(c):
                                    diff = _commutator_restriction(
                                        action,
                                        mixed_restr,
                                        mixed_rows,
                                        phi_restr,
                                        phi_rows,
                                        da,
                                        db,
                                        ww,
                                    )
                                    if diff:
                                        items.append(
                                            Residual(
                                                ax + av + ay + c,
                                                f"{espace.format_word(xw)} ; "
                                                f"{vspace.format_word(vw)} ; "
                                                f"{espace.format_word(yw)} ; "
                                                f"{vspace.format_word(ww)}",
                                                format_vector(vspace, diff),
                                            )
                                        )
    return make_report("coherence", bound, items)


# ---------------------------------------------------------------------------
# the hemisemidirect product


class HemiProduct:
    """The direct sum with the three-part bracket family, stored plain.

    Restricted to pure acting words the brackets are the acting structure's;
    restricted to pure target words they are the target's; the only mixed
    values occur on words with all acting letters in front, where they are
    the action components.  Every other interleaving is zero.
    """

    def __init__(self, action: ActionFamily):
        E, V = action.E, action.V
        espace, vspace = E.space, V.space
        name = f"{espace.name}+{vspace.name}"
        vname = vspace.name if vspace.name != espace.name else f"{vspace.name}'"
        basis = [(f"{espace.name}.{s}", d) for s, d in zip(espace.symbols, espace.degrees)]
        basis += [(f"{vname}.{s}", d) for s, d in zip(vspace.symbols, vspace.degrees)]
        space = GradedSpace(name, basis)
        self.action = action
        self.space = space
        self.e_offset = 0
        self.v_offset = espace.dim
        self.e_dim = espace.dim
        self.v_dim = vspace.dim
        max_arity = max(
            E.max_arity, V.max_arity, action.max_mixed_arity(), 1
        )
        brackets: dict[int, MultiMap] = {}
        for k in range(1, max_arity + 1):
            entries: list[tuple[Word, int, Fraction]] = []
            lk = E.bracket(k)
            if lk is not None:
                for w, out, c in lk.entries():
                    for u in set(itertools.permutations(w)):
                        _, sign = espace.normalize(u)
                        entries.append((tuple(i for i in u), out, sign * c))
            mk = V.bracket(k)
            if mk is not None:
                for w, out, c in mk.entries():
                    for u in set(itertools.permutations(w)):
                        _, sign = vspace.normalize(u)
                        entries.append(
                            (
                                tuple(self.v_offset + i for i in u),
                                self.v_offset + out,
                                sign * c,
                            )
                        )
            for i in range(1, k):
                comp = action.component(i, k - i)
                if comp is None:
                    continue
                for (ew, vw), vec in comp.constants.items():
                    for ue in set(itertools.permutations(ew)):
                        _, se = espace.normalize(ue)
                        for uv in set(itertools.permutations(vw)):
                            _, sv = vspace.normalize(uv)
                            word = tuple(ue) + tuple(self.v_offset + j for j in uv)
                            for out, c in vec.items():
                                entries.append(
                                    (word, self.v_offset + out, se * sv * c)
                                )
            entries = [(w, o, c) for (w, o, c) in entries if c]
            if entries:
                brackets[k] = MultiMap.from_entries(space, space, k, 1, PLAIN, entries)
        self.structure = HomotopyStructure(space, PLAIN, brackets, max_arity)
        self._codifferential_cache: dict[int, TruncatedCoderivation] = {}

    # -- index plumbing -------------------------------------------------------

    def is_e_letter(self, i: int) -> bool:
        return i < self.v_offset

    def is_pure_v(self, word: Word) -> bool:
        return all(i >= self.v_offset for i in word)

    def is_pure_e(self, word: Word) -> bool:
        return all(i < self.v_offset for i in word)

    def to_v_word(self, word: Word) -> Word:
        return tuple(i - self.v_offset for i in word)

    def from_v_word(self, word: Word) -> Word:
        return tuple(i + self.v_offset for i in word)

    def from_e_word(self, word: Word) -> Word:
        return tuple(word)

    def e_part(self, vec: Vector) -> Vector:
        return {i: c for i, c in vec.items() if i < self.v_offset}

    def v_part(self, vec: Vector) -> Vector:
        return {i - self.v_offset: c for i, c in vec.items() if i >= self.v_offset}

    def embed_e_vector(self, vec: Vector) -> Vector:
        return dict(vec)

    def embed_v_vector(self, vec: Vector) -> Vector:
        return {i + self.v_offset: c for i, c in vec.items()}

    def codifferential(self, bound: int) -> TruncatedCoderivation:
        got = self._codifferential_cache.get(bound)
        if got is None:
            got = self.structure.zinbiel_lift(bound)
            self._codifferential_cache[bound] = got
        return got


def hemisemidirect(action: ActionFamily) -> HemiProduct:
    return HemiProduct(action)


def theorem_crosscheck(action: ActionFamily, bound: int) -> tuple[CheckReport, CheckReport]:
    """Coherence verdict against the anchored identity of the product.

    The two must agree for every genuine action; disagreement is surfaced as
    an internal-consistency error carrying the first offending residuals.
    """
    axiom = check_action(action, bound)
    if not axiom.ok:
        raise InputError(
            "theorem crosscheck needs a verified action; axiom residuals: "
            + "; ".join(f"[{r.word}]" for r in axiom.residuals[:3])
        )
    coherent = check_coherence(action, bound)
    product = action.hemiproduct()
    loday = check_loday_infinity(product.structure, bound)
    if coherent.ok != loday.ok:
        raise RouteDisagreement(
            f"coherence says {coherent.verdict} but the product identity says "
            f"{loday.verdict}; first residuals: "
            f"{[r.word for r in (coherent.residuals or loday.residuals)[:3]]}"
        )
    return coherent, loday


# ---------------------------------------------------------------------------
# canonical actions


def adjoint_representation(E: HomotopyStructure) -> ActionFamily:
    """The action of a structure on its own underlying complex.

    The target keeps only the unary bracket; the components feed a fixed
    acting word and one letter into the brackets.  Always an action, always
    coherent.
    """
    space = E.space
    m1 = E.bracket(1)
    V = HomotopyStructure(space, SYMMETRIC, {1: m1} if m1 is not None else {}, E.max_arity)
    comps: dict[tuple[int, int], BiMultiMap] = {}
    for k in range(1, E.max_arity):
        lk1 = E.bracket(k + 1)
        if lk1 is None:
            continue
        table: dict[tuple[Word, Word], Vector] = {}
        for xw in space.canonical_words(k):
            for v in range(space.dim):
                vec = lk1.eval(xw + (v,))
                if vec:
                    table[(xw, (v,))] = vec
        if table:
            comps[(k, 1)] = BiMultiMap(space, space, k, 1, 1, table)
    return ActionFamily(E, V, comps)


def adjoint_action(E: HomotopyStructure) -> ActionFamily:
    """The full self-action: every component is a bracket with split slots."""
    space = E.space
    comps: dict[tuple[int, int], BiMultiMap] = {}
    for k in range(1, E.max_arity):
        for n in range(1, E.max_arity - k + 1):
            lkn = E.bracket(k + n)
            if lkn is None:
                continue
            table: dict[tuple[Word, Word], Vector] = {}
            for xw in space.canonical_words(k):
                for vw in space.canonical_words(n):
                    vec = lkn.eval(xw + vw)
                    if vec:
                        table[(xw, vw)] = vec
            if table:
                comps[(k, n)] = BiMultiMap(space, space, k, n, 1, table)
    return ActionFamily(E, E, comps)
