"""Tree specs, truncations, balls and the spec file format.

Claims covered:
    - expand reproduces hand-expanded level counts (binary, the two-state
      automaton tree, symmetric star)
    - level counts agree with the state-count recurrence up to depth 12
    - truncations are prefix-stable in the depth
    - balls are level-prefixes of the right size; radius > depth rejected
    - edge levels make level-n weight sums equal M_n * rate**-n
    - the parser round-trips, rejects unknown fields and bad documents
    - the expansion cap raises ResourceLimitError
"""

import random

import pytest

from firebreak import (
    ExplicitSpec,
    PeriodicSpec,
    ResourceLimitError,
    SpecError,
    SymmetricSpec,
    ball,
    expand,
    format_tree_spec,
    level_counts,
    parse_tree_spec,
)
from conftest import (
    binary_spec,
    fibonacci_spec,
    random_periodic_spec,
    star_spec,
)


def counts_of(trunc):
    out = [0] * (trunc.depth + 1)
    for lv in trunc.level:
        out[lv] += 1
    return out


class TestExpand:
    def test_binary_depth3(self):
        t = expand(binary_spec(), 3)
        assert t.n_vertices == 15
        assert counts_of(t) == [1, 2, 4, 8]

    def test_fibonacci_depth4(self):
        # hand expansion: A->AB, level populations follow the two-state
        # recurrence 1, 2, 3, 5, 8
        t = expand(fibonacci_spec(), 4)
        assert counts_of(t) == [1, 2, 3, 5, 8]

    def test_symmetric_star(self):
        t = expand(star_spec(), 2)
        assert counts_of(t) == [1, 3, 3]

    def test_explicit_truncates(self):
        spec = ExplicitSpec(parents=(0, 1, 2, 3))  # a path of length 4
        t = expand(spec, 2)
        assert t.n_vertices == 3
        assert t.boundary == (2,)

    def test_levels_and_parents_consistent(self):
        t = expand(fibonacci_spec(), 5)
        for v in range(1, t.n_vertices):
            assert t.level[v] == t.level[t.parent[v]] + 1
            assert v in t.children[t.parent[v]]
        assert all(lv <= 5 for lv in t.level)

    @pytest.mark.parametrize("seed", range(8))
    def test_level_counts_match_expansion(self, seed):
        rng = random.Random(seed)
        spec = random_periodic_spec(rng, allow_dead=True)
        depth = 12 if sum(level_counts(spec, 12)) < 20000 else 6
        t = expand(spec, depth)
        assert counts_of(t) == level_counts(spec, depth)

    def test_prefix_stability(self):
        t_deep = expand(fibonacci_spec(), 6)
        t_shallow = expand(fibonacci_spec(), 4)
        n = t_shallow.n_vertices
        assert t_deep.parent[:n] == t_shallow.parent
        assert t_deep.level[:n] == t_shallow.level
        assert t_deep.states[:n] == t_shallow.states

    def test_vertex_cap(self):
        with pytest.raises(ResourceLimitError):
            expand(binary_spec(), 10, cap=100)

    def test_vertex_cap_env_var(self, monkeypatch):
        monkeypatch.setenv("FIREBREAK_VERTEX_CAP", "50")
        with pytest.raises(ResourceLimitError):
            expand(binary_spec(), 8)
        expand(binary_spec(), 4)  # 31 vertices, under the cap
        monkeypatch.setenv("FIREBREAK_VERTEX_CAP", "lots")
        with pytest.raises(SpecError):
            expand(binary_spec(), 2)

    def test_paths_roundtrip(self):
        t = expand(fibonacci_spec(), 5)
        for v in range(t.n_vertices):
            assert t.index_of_path(t.path_of(v)) == v


class TestBall:
    def test_root_only(self):
        t = expand(binary_spec(), 3)
        assert ball(t, 0) == (0,)

    def test_binary_radius2(self):
        t = expand(binary_spec(), 3)
        assert len(ball(t, 2)) == 7

    def test_fibonacci_radius3(self):
        t = expand(fibonacci_spec(), 4)
        assert len(ball(t, 3)) == 11  # 1 + 2 + 3 + 5

    def test_radius_beyond_depth_rejected(self):
        t = expand(binary_spec(), 3)
        with pytest.raises(SpecError):
            ball(t, 4)


class TestEdgeLevels:
    def test_symmetric_level_weight_sum(self):
        spec = SymmetricSpec(preperiod=(2,), period=(3, 1))
        t = expand(spec, 4)
        counts = counts_of(t)
        lam = 2.0
        for n in range(1, 5):
            total = sum(lam ** -t.level[v] for v in range(1, t.n_vertices)
                        if t.level[v] == n)
            assert total == pytest.approx(counts[n] * lam ** -n)


class TestBoundary:
    def test_periodic_dead_state_not_boundary(self):
        spec = PeriodicSpec(states={"A": ("A", "B"), "B": ()}, root="A")
        t = expand(spec, 3)
        for v in t.boundary:
            assert t.states[v] == "A"

    def test_symmetric_all_deepest_are_boundary(self):
        t = expand(star_spec(), 3)
        assert len(t.boundary) == 3


class TestSpecFormat:
    def test_periodic_roundtrip(self):
        spec = fibonacci_spec()
        again = parse_tree_spec(format_tree_spec(spec))
        assert again == spec

    def test_symmetric_roundtrip(self):
        spec = SymmetricSpec(preperiod=(3, 2), period=(1, 2))
        assert parse_tree_spec(format_tree_spec(spec)) == spec

    def test_symmetric_empty_preperiod(self):
        spec = SymmetricSpec(preperiod=(), period=(2,))
        assert parse_tree_spec(format_tree_spec(spec)) == spec

    def test_explicit_roundtrip(self):
        spec = ExplicitSpec(parents=(0, 0, 1, 1, 2, 2))
        assert parse_tree_spec(format_tree_spec(spec)) == spec

    def test_multiline_states(self):
        spec = parse_tree_spec(
            "variant: periodic\nroot: A\nstates: A -> A B\nstates: B -> A\n"
        )
        assert spec == fibonacci_spec()

    def test_comments_and_blanks(self):
        text = "# a tree\n\nvariant: periodic\nroot: A  # root state\nstates: A -> A\n"
        assert parse_tree_spec(text) == PeriodicSpec(states={"A": ("A",)}, root="A")

    @pytest.mark.parametrize("text", [
        "variant: periodic\nroot: A\nstates: A -> A\ncolour: blue\n",
        "variant: hexagonal\n",
        "variant: periodic\nstates: A -> A\n",              # missing root
        "variant: periodic\nroot: A\nstates: A -> Z\n",     # unknown child
        "variant: symmetric\nlevels: 1 2\n",                # missing separator
        "variant: symmetric\nlevels: 0 | 1\n",              # zero count
        "variant: explicit\nparents: 5\n",                  # parent after child
        "just some text\n",
        "variant: periodic\nroot: A\nroot: B\nstates: A -> A\n",
    ])
    def test_rejects_bad_documents(self, text):
        with pytest.raises(SpecError):
            parse_tree_spec(text)

    def test_rejects_fields_of_other_variants(self):
        with pytest.raises(SpecError):
            parse_tree_spec("variant: explicit\nparents: 0\nroot: A\n")


class TestDegenerate:
    def test_finite_periodic_detected(self):
        spec = PeriodicSpec(states={"A": ("B", "B"), "B": ()}, root="A")
        assert spec.is_finite()
        assert not fibonacci_spec().is_finite()

    def test_zero_child_state_allowed(self):
        # one live branch, one dead leaf per level
        spec = PeriodicSpec(states={"A": ("A", "B"), "B": ()}, root="A")
        t = expand(spec, 4)
        assert counts_of(t) == [1, 2, 2, 2, 2]
