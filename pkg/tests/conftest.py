"""Shared specs, budget catalogues and random instance generators."""

import random

import pytest

from firebreak import (
    BudgetSequence,
    ExplicitSpec,
    PeriodicSpec,
    SymmetricSpec,
    expand,
    level_counts,
)


def binary_spec() -> PeriodicSpec:
    return PeriodicSpec(states={"A": ("A", "A")}, root="A")


def ternary_spec() -> PeriodicSpec:
    return PeriodicSpec(states={"A": ("A", "A", "A")}, root="A")


def fibonacci_spec() -> PeriodicSpec:
    return PeriodicSpec(states={"A": ("A", "B"), "B": ("A",)}, root="A")


def sqrt2_spec() -> PeriodicSpec:
    return PeriodicSpec(states={"A": ("B", "B"), "B": ("A",)}, root="A")


def ray_spec() -> PeriodicSpec:
    return PeriodicSpec(states={"A": ("A",)}, root="A")


def star_spec() -> SymmetricSpec:
    return SymmetricSpec(preperiod=(3,), period=(1,))


@pytest.fixture
def binary():
    return binary_spec()


@pytest.fixture
def ternary():
    return ternary_spec()


@pytest.fixture
def fibonacci():
    return fibonacci_spec()


@pytest.fixture
def ray():
    return ray_spec()


def budget_catalogue() -> list[BudgetSequence]:
    return [
        BudgetSequence.constant(1),
        BudgetSequence.constant(2),
        BudgetSequence.exponential("3/2"),
        BudgetSequence.exponential(2),
        BudgetSequence.explicit([2, 0]),
        BudgetSequence.explicit([0, 2, 1]),
        BudgetSequence.explicit([1]),
    ]


def random_explicit_tree(rng: random.Random, max_vertices: int = 16,
                         max_children: int = 3) -> ExplicitSpec:
    """Random rooted tree grown breadth-first with random child counts."""
    parents = []
    frontier = [0]
    n = 1
    while frontier and n < max_vertices:
        v = frontier.pop(0)
        for _ in range(rng.randint(0, max_children)):
            if n >= max_vertices:
                break
            parents.append(v)
            frontier.append(n)
            n += 1
    if not parents:
        parents = [0]
    return ExplicitSpec(parents=tuple(parents))


def random_periodic_spec(rng: random.Random, max_states: int = 3,
                         max_children: int = 3, allow_dead: bool = False) -> PeriodicSpec:
    names = ["A", "B", "C"][: rng.randint(1, max_states)]
    lo = 0 if allow_dead else 1
    states = {
        s: tuple(rng.choice(names) for _ in range(rng.randint(lo, max_children)))
        for s in names
    }
    if not allow_dead and not states[names[0]]:
        states[names[0]] = (names[0],)
    return PeriodicSpec(states=states, root=names[0])


def random_symmetric_spec(rng: random.Random) -> SymmetricSpec:
    pre = tuple(rng.randint(1, 3) for _ in range(rng.randint(0, 2)))
    per = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 2)))
    return SymmetricSpec(preperiod=pre, period=per)


def random_truncation(rng: random.Random, max_depth: int = 10,
                      size_limit: int = 4000):
    """A random truncation of a random spec, size-capped by redrawing."""
    for _ in range(200):
        kind = rng.randrange(3)
        depth = rng.randint(1, max_depth)
        if kind == 0:
            spec = random_periodic_spec(rng, allow_dead=rng.random() < 0.3)
        elif kind == 1:
            spec = random_symmetric_spec(rng)
        else:
            spec = random_explicit_tree(rng, max_vertices=24)
            depth = min(depth, spec.height()) or 1
        if sum(level_counts(spec, depth)) <= size_limit:
            return expand(spec, depth)
    raise AssertionError("could not draw a truncation within the size limit")
