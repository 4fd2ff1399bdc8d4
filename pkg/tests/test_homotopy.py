import random
from fractions import Fraction

import pytest

from linfty.graded import GradedSpace
from linfty.homotopy import (
    HomotopyStructure,
    check_lie_infinity,
    check_lie_morphism,
    check_loday_infinity,
    check_loday_morphism,
    check_representation,
    coder_dgla,
    end_dgla,
    lie_to_loday,
    maurer_cartan,
    mc_residual,
    twist,
)
from linfty.multimap import (
    PLAIN,
    SYMMETRIC,
    MultiMap,
    commutator,
    lift_symmetric_coderivation,
    merge_into,
)
from linfty.report import InputError
from linfty.corpus import (
    abelian_structure,
    heisenberg,
    random_restriction_family,
    sl2,
    solvable2,
    triple_bracket_example,
    two_term_complex,
)

F = Fraction


# ---------------------------------------------------------------------------
# structure checks


def test_abelian_verified():
    L = abelian_structure("A", [-1, 0, 1])
    assert check_lie_infinity(L, 4).ok


def test_two_term_complex_verified():
    assert check_lie_infinity(two_term_complex(), 4).ok


def test_unary_square_failure_detected():
    space = GradedSpace("X", [("u", -1), ("w", 0), ("s", 1)])
    l1 = MultiMap(
        space, space, 1, 1, SYMMETRIC, {(0,): {1: F(1)}, (1,): {2: F(1)}}
    )
    L = HomotopyStructure(space, SYMMETRIC, {1: l1}, 2)
    report = check_lie_infinity(L, 3)
    assert not report.ok
    assert report.residuals[0].arity == 1


def test_catalog_lie_algebras_verified():
    for L in (heisenberg(), solvable2(), sl2(), triple_bracket_example()):
        assert check_lie_infinity(L, 4).ok


def test_degree_inhomogeneous_bracket_rejected():
    space = GradedSpace("X", [("u", -1), ("w", 0)])
    bad = MultiMap(space, space, 1, 0, SYMMETRIC, {(0,): {0: F(1)}})
    with pytest.raises(InputError):
        HomotopyStructure(space, SYMMETRIC, {1: bad}, 2)


def test_loday_zero_verified():
    L = HomotopyStructure(GradedSpace("Z", [("a", 0)]), PLAIN, {}, 2)
    assert check_loday_infinity(L, 4).ok


def test_lie_structures_pass_loday_check():
    for L in (heisenberg(), solvable2(), sl2(), triple_bracket_example()):
        assert check_loday_infinity(lie_to_loday(L), 4).ok


def test_plain_failure_at_arity_three():
    space = GradedSpace("Y", [("a", -1), ("b", -1)])
    q2 = MultiMap(space, space, 2, 1, PLAIN, {(0, 0): {0: F(1)}})
    L = HomotopyStructure(space, PLAIN, {2: q2}, 2)
    report = check_loday_infinity(L, 3)
    assert not report.ok
    assert min(r.arity for r in report.residuals) == 3


# ---------------------------------------------------------------------------
# morphisms


def test_identity_is_morphism():
    for L in (heisenberg(), sl2()):
        space = L.space
        ident = MultiMap(
            space, space, 1, 0, PLAIN, {(i,): {i: F(1)} for i in range(space.dim)}
        )
        assert check_lie_morphism({1: ident}, L, L, 4).ok


def test_zero_map_between_abelian_is_morphism():
    A = abelian_structure("A", [-1, 0])
    B = abelian_structure("B", [-1])
    assert check_lie_morphism({}, A, B, 3).ok


def test_quotient_projection_is_morphism_and_reverse_fails():
    E = solvable2()
    quot = abelian_structure("Q", [-1])
    good = MultiMap(E.space, quot.space, 1, 0, PLAIN, {(0,): {0: F(1)}})
    assert check_lie_morphism({1: good}, E, quot, 4).ok
    bad = MultiMap(E.space, quot.space, 1, 0, PLAIN, {(1,): {0: F(1)}})
    report = check_lie_morphism({1: bad}, E, quot, 4)
    assert not report.ok


def test_loday_morphism_identity_and_zero():
    L = lie_to_loday(heisenberg())
    space = L.space
    ident = MultiMap(
        space, space, 1, 0, PLAIN, {(i,): {i: F(1)} for i in range(space.dim)}
    )
    assert check_loday_morphism({1: ident}, L, L, 3).ok
    A = HomotopyStructure(GradedSpace("A", [("a", 0)]), PLAIN, {}, 2)
    B = HomotopyStructure(GradedSpace("B", [("b", 0)]), PLAIN, {}, 2)
    assert check_loday_morphism({}, A, B, 3).ok


def test_symmetric_comorphism_agrees_between_flavors():
    E = solvable2()
    quot = abelian_structure("Q", [-1])
    for table, expected in [
        ({(0,): {0: F(1)}}, True),
        ({(1,): {0: F(1)}}, False),
    ]:
        f = MultiMap(E.space, quot.space, 1, 0, PLAIN, table)
        lie_ok = check_lie_morphism({1: f}, E, quot, 4).ok
        loday_ok = check_loday_morphism(
            {1: f}, lie_to_loday(E), lie_to_loday(quot), 4
        ).ok
        assert lie_ok == loday_ok == expected


# ---------------------------------------------------------------------------
# Maurer-Cartan and twisting


def test_mc_zero_element():
    L = heisenberg()
    assert mc_residual(L, {}) == {}


def test_mc_abelian_everything_flat():
    L = abelian_structure("A", [0, 0])
    assert mc_residual(L, {0: F(2), 1: F(-3, 2)}) == {}


def test_mc_two_term_expansion_oracle():
    # three-step complex: phi with phi^2 != 0 gives a genuine quadratic term
    base = GradedSpace("W", [("u", -1), ("w", 0), ("s", 1)])
    d = MultiMap(base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}})
    dgla, end = end_dgla(base, d)
    assert check_lie_infinity(dgla, 3).ok
    # degree-0 elements of the shifted endomorphism space are map-degree +1
    e = {
        end.index(base.index("u"), base.index("w")): F(1),
        end.index(base.index("w"), base.index("s")): F(1),
    }
    got = mc_residual(dgla, e)
    l1 = dgla.bracket(1)
    l2 = dgla.bracket(2)
    expected = {}
    if l1 is not None:
        for i, c in e.items():
            merge_into(expected, l1.eval((i,)), c)
    acc = {}
    for i, ci in e.items():
        for j, cj in e.items():
            merge_into(acc, l2.eval((i, j)), ci * cj)
    merge_into(expected, acc, F(1, 2))
    assert got == expected
    mc = maurer_cartan(dgla, e)
    assert dict(mc.partial_sums[-1]) == got


def test_twist_by_zero_is_identity():
    L = heisenberg()
    tw = twist(L, {})
    for k, f in L.brackets.items():
        assert tw.bracket(k).constants == f.constants


def test_twist_abelian_unchanged():
    L = abelian_structure("A", [0, 0])
    tw = twist(L, {0: F(1)})
    assert not tw.brackets


def test_twist_of_end_dgla_verified():
    base = GradedSpace("W", [("u", -1), ("w", 0)])
    d = MultiMap(base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}})
    dgla, end = end_dgla(base, d)
    e = {end.index(0, 1): F(3, 2)}
    assert mc_residual(dgla, e) == {}
    tw = twist(dgla, e)
    assert check_lie_infinity(tw, 3).ok
    # unary twisted bracket is d + [e, -]
    l1 = dgla.bracket(1)
    l2 = dgla.bracket(2)
    for i in range(dgla.space.dim):
        expected = l1.eval((i,)) if l1 is not None else {}
        for j, c in e.items():
            merge_into(expected, l2.eval((j, i)), c)
        got = tw.eval_bracket(1, (i,))
        assert got == expected


def test_twist_rejects_non_flat():
    base = GradedSpace("W", [("u", -1), ("w", 0), ("s", 1)])
    d = MultiMap(base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}})
    dgla, end = end_dgla(base, d)
    # w->s alone: curvature -d phi - phi d is nonzero on u
    e = {end.index(1, 2): F(1)}
    if mc_residual(dgla, e):
        with pytest.raises(InputError):
            twist(dgla, e)


def test_twist_composition_of_flat_elements():
    base = GradedSpace("W", [("u", -1), ("w", 0)])
    d = MultiMap(base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}})
    dgla, _ = end_dgla(base, d)
    e1 = {0 if dgla.space.symbols[0] else 0: F(0)}
    # pick the unique map-degree-one direction
    idx = next(
        i for i in range(dgla.space.dim) if dgla.space.degrees[i] == 0
    )
    e1 = {idx: F(1, 2)}
    e2 = {idx: F(1, 3)}
    t1 = twist(dgla, e1)
    assert mc_residual(t1, e2) == {}
    t12 = twist(t1, e2)
    total = twist(dgla, {idx: F(5, 6)})
    for k in range(1, 3):
        a = t12.bracket(k)
        b = total.bracket(k)
        assert (a.constants if a else {}) == (b.constants if b else {})


# ---------------------------------------------------------------------------
# the endomorphism algebra of a complex


def test_end_dgla_zero_differential_pure_bracket():
    base = GradedSpace("W", [("u", 0), ("w", 1)])
    d = MultiMap.zero(base, base, 1, 1, SYMMETRIC)
    dgla, _ = end_dgla(base, d)
    assert dgla.bracket(1) is None
    assert dgla.bracket(2) is not None
    assert check_lie_infinity(dgla, 3).ok


def test_end_dgla_two_term_complex():
    base = GradedSpace("W", [("u", -1), ("w", 0)])
    d = MultiMap(base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}})
    dgla, _ = end_dgla(base, d)
    assert dgla.space.dim == 4
    assert check_lie_infinity(dgla, 3).ok


def test_end_dgla_rejects_non_square_zero():
    base = GradedSpace("W", [("u", -1), ("w", 0), ("s", 1)])
    bad = MultiMap(
        base, base, 1, 1, SYMMETRIC, {(0,): {1: F(1)}, (1,): {2: F(1)}}
    )
    with pytest.raises(InputError):
        end_dgla(base, bad)


# ---------------------------------------------------------------------------
# the coderivation algebra of a verified structure


def test_coder_dgla_zero_base_has_zero_differential():
    L = abelian_structure("A", [-1, 0])
    dgla = coder_dgla(L, 3)
    rng = random.Random(21)
    fam = random_restriction_family(L.space, [1, 2], 1, rng, flavor=SYMMETRIC)
    q = lift_symmetric_coderivation(L.space, fam, 3)
    assert dgla.differential(q).is_zero()


def test_coder_dgla_differential_squares_to_zero_and_leibniz():
    # the arity-2 identity of the shifted convention:
    # d(br(q,p)) + br(dq, p) + (-1)^{(|q|-1)(|p|-1)} br(dp, q) == 0
    for L in (heisenberg(), two_term_complex(), sl2()):
        dgla = coder_dgla(L, 3)
        rng = random.Random(22)
        for degree in (0, 1):
            fam_q = random_restriction_family(
                L.space, [1, 2], degree, rng, flavor=SYMMETRIC
            )
            fam_p = random_restriction_family(
                L.space, [1, 2], 1, rng, flavor=SYMMETRIC
            )
            q = lift_symmetric_coderivation(L.space, fam_q, 3)
            p = lift_symmetric_coderivation(L.space, fam_p, 3)
            assert dgla.differential(dgla.differential(q)).is_zero()
            total = dgla.differential(dgla.bracket(q, p))
            total = total.add(dgla.bracket(dgla.differential(q), p))
            eps = -1 if ((q.degree - 1) % 2 and (p.degree - 1) % 2) else 1
            total = total.add(dgla.bracket(dgla.differential(p), q), F(eps))
            assert total.is_zero()


def test_coder_dgla_differential_kills_own_codifferential():
    for L in (heisenberg(), sl2(), triple_bracket_example()):
        dgla = coder_dgla(L, 4)
        m = L.lift(4)
        assert commutator(m, m).is_zero()
        assert dgla.differential(m).is_zero()


def test_unary_base_differential_is_block_commutator():
    L = two_term_complex()
    dgla = coder_dgla(L, 2)
    rng = random.Random(23)
    f = random_restriction_family(L.space, [1], 0, rng, flavor=SYMMETRIC)
    q = lift_symmetric_coderivation(L.space, f, 2)
    got = dgla.differential(q)
    m = L.lift(2)
    expected = commutator(m, q).scale(F(-1))
    assert got.rows == expected.rows


# ---------------------------------------------------------------------------
# representations on complexes


def _adjoint_rep_components(L, end):
    """Degree-0 components into the shifted endomorphism space."""
    space = L.space
    comps = {}
    for k in range(1, L.max_arity):
        lk1 = L.bracket(k + 1)
        if lk1 is None:
            continue
        table = {}
        for xw in space.canonical_words(k):
            vec = {}
            for v in range(space.dim):
                for out, c in lk1.eval(xw + (v,)).items():
                    vec[end.index(v, out)] = c
            if vec:
                table[xw] = vec
        if table:
            comps[k] = MultiMap(space, end.space, k, 0, SYMMETRIC, table)
    return comps


def test_zero_representation_on_abelian():
    L = abelian_structure("A", [-1, 0])
    d = MultiMap.zero(L.space, L.space, 1, 1, SYMMETRIC)
    _, end = end_dgla(L.space, d)
    assert check_representation({}, L, end, 3).ok


def test_adjoint_representation_of_lie_algebras():
    for L in (heisenberg(), solvable2(), sl2()):
        d = MultiMap.zero(L.space, L.space, 1, 1, SYMMETRIC)
        _, end = end_dgla(L.space, d)
        comps = _adjoint_rep_components(L, end)
        assert check_representation(comps, L, end, 4).ok


def test_broken_chain_map_fails_at_arity_one():
    L = two_term_complex()
    d = L.bracket(1)
    _, end = end_dgla(L.space, d)
    # u |-> (u -> u) has the right degree but is not a chain-map family
    table = {(0,): {end.index(0, 0): F(1)}}
    phi1 = MultiMap(L.space, end.space, 1, 0, SYMMETRIC, table)
    report = check_representation({1: phi1}, L, end, 2)
    assert not report.ok
    assert report.residuals[0].arity == 1


def test_verified_symmetric_structures_pass_anchored_check():
    # the symmetric-to-plain implication over a randomized corpus
    from linfty.corpus import conjugate_structure, random_basis_change

    rng = random.Random(77)
    bases = [heisenberg(), solvable2(), sl2(), two_term_complex(), triple_bracket_example()]
    checked = 0
    for base in bases:
        for _ in range(3):
            p, pinv = random_basis_change(base.space, rng)
            conj = conjugate_structure(base, p, pinv)
            assert check_lie_infinity(conj, 4).ok
            assert check_loday_infinity(lie_to_loday(conj), 4).ok
            checked += 1
    assert checked == 15
