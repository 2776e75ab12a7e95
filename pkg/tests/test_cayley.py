"""Group models, balls, lex-min spanning trees, growth, surround, probes.

Claims covered:
    - normal forms: generator then inverse is the identity map; products
      associate with word evaluation
    - ball layers match the closed-form sphere sizes (Z, Z^2, free rank 2,
      infinite dihedral, C2*C3)
    - propagated lex-min words equal the minimum over exhaustively
      enumerated geodesic words
    - the lex-min tree is spanning, geodesic, uses only Cayley edges, and
      equals the ball on free groups
    - construction is canonical (vertex order independent of exploration
      accidents)
    - growth estimates expose both the ball-root and sphere-ratio readings
    - wait-and-surround triggers by the budget-vs-sphere rule, simulates to
      containment, and reports cap exhaustion with a trace
    - polynomial probes are infeasible on exponential-growth trees and the
      budget-vs-sphere table matches the cumulative sums
"""

import random
from fractions import Fraction

import pytest

from firebreak import (
    BudgetSequence,
    FreeAbelian,
    FreeGroup,
    FreeProductCyclic,
    SpecError,
    SurroundCapError,
    cayley_ball,
    enumerate_geodesic_words,
    expand,
    feasibility_check,
    group_from_name,
    growth_rate_estimate,
    infinite_dihedral,
    lex_min_tree,
    polynomial_probe,
    wait_and_surround,
)

ALL_MODELS = [
    FreeGroup(1),
    FreeGroup(2),
    FreeAbelian(1),
    FreeAbelian(2),
    FreeAbelian(3),
    infinite_dihedral(),
    FreeProductCyclic((2, 3)),
    FreeProductCyclic((3, 3)),
]


class TestGroupModels:
    @pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.name)
    def test_generator_inverse_cancels(self, model):
        rng = random.Random(5)
        elems = [model.identity]
        for _ in range(30):
            e = elems[rng.randrange(len(elems))]
            g = rng.randrange(len(model.generators))
            elems.append(model.multiply(e, g))
        for e in elems:
            for g in range(len(model.generators)):
                inv = model.inverse_index(g)
                assert model.multiply(model.multiply(e, g), inv) == e

    def test_names(self):
        assert group_from_name("free:2").generators == ("a", "A", "b", "B")
        assert group_from_name("zd:2").generators == ("a", "A", "b", "B")
        assert group_from_name("dinf").generators == ("a", "b")
        assert group_from_name("freeprod:2,3").generators == ("a", "b", "B")

    def test_bad_names_rejected(self):
        for name in ("free:x", "zd:", "so3", "freeprod:1,2", "freeprod:4"):
            with pytest.raises(SpecError):
                group_from_name(name)


class TestBalls:
    def test_z_spheres(self):
        b = cayley_ball(FreeAbelian(1), 3)
        assert b.sphere_sizes() == [1, 2, 2, 2]
        assert b.n_vertices == 7

    def test_z2_spheres(self):
        b = cayley_ball(FreeAbelian(2), 3)
        assert b.sphere_sizes() == [1, 4, 8, 12]
        assert b.n_vertices == 25  # 2R^2 + 2R + 1

    def test_free2_spheres(self):
        b = cayley_ball(FreeGroup(2), 3)
        assert b.sphere_sizes() == [1, 4, 12, 36]
        assert b.n_vertices == 53

    def test_dinf_linear(self):
        b = cayley_ball(infinite_dihedral(), 8)
        assert b.sphere_sizes() == [1] + [2] * 8

    def test_c2_c3_spheres(self):
        # syllable count recurrence: ends-in-a and ends-in-b counts give
        # 3, 4, 6, 8, 12 for radii 1..5
        b = cayley_ball(FreeProductCyclic((2, 3)), 5)
        assert b.sphere_sizes() == [1, 3, 4, 6, 8, 12]

    def test_adjacency_is_symmetric(self):
        b = cayley_ball(FreeAbelian(2), 4)
        for v in range(b.n_vertices):
            for w in b.neighbors(v):
                assert v in b.neighbors(w)

    def test_distances_via_neighbors(self):
        b = cayley_ball(FreeGroup(2), 4)
        for v in range(1, b.n_vertices):
            assert min(b.level[w] for w in b.neighbors(v)) == b.level[v] - 1

    def test_cap(self):
        from firebreak import ResourceLimitError
        with pytest.raises(ResourceLimitError):
            cayley_ball(FreeGroup(2), 8, cap=1000)


class TestLexMinWords:
    @pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.name)
    def test_words_evaluate_to_their_element(self, model):
        b = cayley_ball(model, 4)
        for v in range(b.n_vertices):
            e = model.identity
            for g in b.words[v]:
                e = model.multiply(e, g)
            assert e == b.elements[v]
            assert len(b.words[v]) == b.level[v]

    def test_z2_words_minimal_by_enumeration(self):
        b = cayley_ball(FreeAbelian(2), 5)
        for v in range(b.n_vertices):
            assert b.words[v] == min(enumerate_geodesic_words(b, v))

    def test_dinf_words_minimal_by_enumeration(self):
        b = cayley_ball(infinite_dihedral(), 6)
        for v in range(b.n_vertices):
            assert b.words[v] == min(enumerate_geodesic_words(b, v))

    def test_z_gen_before_inverse(self):
        b = cayley_ball(FreeAbelian(1), 2)
        v = b.index_of((2,))
        assert b.word_str(v) == "aa"
        w = b.index_of((-2,))
        assert b.word_str(w) == "AA"


class TestLexMinTree:
    @pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.name)
    def test_spanning_geodesic_cayley_edges(self, model):
        tree = lex_min_tree(model, 5)
        b = tree.ball
        trunc = expand(tree.spec, 5)
        assert trunc.n_vertices == b.n_vertices
        # tree levels equal Cayley distances
        assert trunc.level == b.level
        # every tree edge is a ball edge
        for v in range(1, b.n_vertices):
            assert b.tree_parent[v] in b.neighbors(v)

    def test_z_two_rays(self):
        tree = lex_min_tree(FreeAbelian(1), 4)
        trunc = expand(tree.spec, 4)
        assert all(len(trunc.children[v]) <= 2 for v in range(trunc.n_vertices))
        assert len(trunc.children[0]) == 2

    def test_z2_level_counts_are_sphere_sizes(self):
        tree = lex_min_tree(FreeAbelian(2), 4)
        assert tree.level_counts() == [1, 4, 8, 12, 16]

    def test_free_tree_equals_ball(self):
        tree = lex_min_tree(FreeGroup(2), 4)
        b = tree.ball
        ball_edges = sum(len(b.neighbors(v)) for v in range(b.n_vertices)) // 2
        assert ball_edges == b.n_vertices - 1

    def test_parent_word_is_prefix(self):
        tree = lex_min_tree(FreeProductCyclic((2, 3)), 5)
        b = tree.ball
        for v in range(1, b.n_vertices):
            assert b.words[b.tree_parent[v]] == b.words[v][:-1]


class TestGrowth:
    def test_free2_ratio_exact(self):
        est = growth_rate_estimate(FreeGroup(2), 10)
        assert est.sphere_ratio == 3.0
        assert all(r == 3.0 for r in est.sphere_ratio_sequence[1:])

    def test_z2_ball_root_trends_down(self):
        est = growth_rate_estimate(FreeAbelian(2), 10)
        assert est.ball_sizes[-1] == 221
        assert est.ball_root == pytest.approx(221 ** 0.1)
        seq = est.ball_root_sequence
        assert all(seq[i + 1] <= seq[i] for i in range(2, len(seq) - 1))

    def test_dinf_ratio_one(self):
        est = growth_rate_estimate(infinite_dihedral(), 10)
        assert est.sphere_ratio == 1.0

    def test_radius_too_small(self):
        with pytest.raises(SpecError):
            growth_rate_estimate(FreeAbelian(1), 1)


class TestWaitAndSurround:
    def test_z_triggers_at_two(self):
        res = wait_and_surround(FreeAbelian(1), 1, Fraction(3, 2), 6)
        assert res.trigger_round == 2
        assert res.sphere_index == 4 and len(res.strategy.sphere) == 2
        assert res.verdict.contained and res.verdict.round_no == 3

    def test_z2_triggers_at_ten(self):
        res = wait_and_surround(FreeAbelian(2), 1, Fraction(3, 2), 12)
        # least n with floor(1.5**n) >= 4(n+2)
        assert res.trigger_round == 10
        assert len(res.strategy.sphere) == 48
        assert res.verdict.contained
        # one guard band: fire stops exactly at the sphere below
        assert res.verdict.burnt == 2 * 11 * 11 + 2 * 11 + 1

    def test_trigger_rule_is_least_round(self):
        res = wait_and_surround(FreeAbelian(2), 1, Fraction(3, 2), 12)
        budget = BudgetSequence.exponential(Fraction(3, 2))
        for n, f_n, size in res.budget_trace[:-1]:
            assert f_n < size
        n, f_n, size = res.budget_trace[-1]
        assert n == res.trigger_round and f_n >= size
        assert budget(res.trigger_round) >= len(res.strategy.sphere)

    def test_free2_rate_below_growth_exhausts(self):
        with pytest.raises(SurroundCapError) as err:
            wait_and_surround(FreeGroup(2), 1, Fraction(5, 2), 8)
        assert err.value.trace
        for _n, f_n, size in err.value.trace:
            assert f_n < size

    def test_no_fault_on_trigger_round(self):
        # the protected sphere is two steps ahead of the fire at play time
        res = wait_and_surround(FreeAbelian(1), 0, 2, 8)
        played = res.verdict.trace[res.trigger_round - 1]
        assert played.protected == res.strategy.sphere


class TestPolynomialProbe:
    def test_free2_quadratic_infeasible(self):
        rep = polynomial_probe(FreeGroup(2), 1, 2, 2, 8)
        assert not rep.feasibility.feasible
        budget = BudgetSequence.polynomial(1, 2)
        spheres = rep.budget_vs_sphere
        for n, cum, sphere in spheres:
            assert cum == budget.cumulative(n)
            assert sphere == 4 * 3 ** n
            assert cum < sphere
        assert "evidence" in rep.note

    def test_z2_affine_budget_feasible(self):
        tree = lex_min_tree(FreeAbelian(2), 6)
        budget = BudgetSequence.explicit([4 * n + 8 for n in range(1, 7)])
        result = feasibility_check(tree.spec, 1, budget, 6)
        assert result.feasible

    def test_z_constant_budget_feasible(self):
        rep = polynomial_probe(FreeGroup(1), 1, 0, 5, 8)
        assert rep.feasibility.feasible


class TestGrowthConsistency:
    def test_free_tree_periodic_readoff_brackets_growth(self):
        # the rank-r free tree is the periodic tree "root spawns 2r copies
        # of a state that spawns 2r-1 of itself"; its branching bracket
        # must contain 2r-1
        from firebreak import PeriodicSpec, br_bracket
        for rank in (1, 2, 3):
            spec = PeriodicSpec(
                states={"R": ("A",) * (2 * rank), "A": ("A",) * (2 * rank - 1)},
                root="R",
            )
            tree = lex_min_tree(FreeGroup(rank), 6)
            assert tree.level_counts() == [
                1 if n == 0 else 2 * rank * (2 * rank - 1) ** (n - 1)
                for n in range(7)
            ]
            bracket = br_bracket(spec, tol=0.01)
            assert bracket.determinate and bracket.contains(2 * rank - 1)

    def test_sphere_sizes_nondecreasing_in_generators(self):
        for small, large in [(FreeGroup(1), FreeGroup(2)),
                             (FreeAbelian(1), FreeAbelian(2)),
                             (FreeAbelian(2), FreeAbelian(3))]:
            a = cayley_ball(small, 6).sphere_sizes()
            b = cayley_ball(large, 6).sphere_sizes()
            assert all(x <= y for x, y in zip(a, b))


class TestDeterminism:
    def test_ball_reconstruction_identical(self):
        a = cayley_ball(FreeProductCyclic((2, 3)), 5)
        b = cayley_ball(FreeProductCyclic((2, 3)), 5)
        assert a.elements == b.elements
        assert a.words == b.words
        assert a.adjacency == b.adjacency

    def test_layers_sorted_by_word(self):
        b = cayley_ball(FreeAbelian(2), 4)
        for layer in b.layers:
            words = [b.words[v] for v in layer]
            assert words == sorted(words)
