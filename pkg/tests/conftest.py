import random

import pytest

from procsem.terms import canonicalize, enumerate_terms, parse_term


def c(text: str):
    return canonicalize(parse_term(text))


@pytest.fixture(scope="session")
def pool1():
    """Exhaustive canonical terms of depth <= 1 over {a, b}."""
    return tuple(enumerate_terms({"a", "b"}, 1, 2))


@pytest.fixture(scope="session")
def pool2():
    """Exhaustive canonical terms of depth <= 2 over {a, b} (256 terms)."""
    return tuple(enumerate_terms({"a", "b"}, 2, 8))


def random_term(rng: random.Random, depth: int, alphabet=("a", "b", "c"), width: int = 3):
    """Random canonical term of the given depth bound."""
    from procsem.terms import NIL, prefix, sum_terms

    if depth == 0 or rng.random() < 0.15:
        return NIL
    parts = []
    for _ in range(rng.randint(1, width)):
        parts.append(prefix(rng.choice(alphabet), random_term(rng, depth - 1, alphabet, width)))
    return sum_terms(*parts)


@pytest.fixture(scope="session")
def random3():
    """Seeded random depth-3 terms over {a, b, c}."""
    rng = random.Random(20240817)
    return tuple(random_term(rng, 3) for _ in range(120))
