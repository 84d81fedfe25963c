import itertools

import pytest

from tedwalk.tree import Tree, enumerate_trees, parse


def brute_force_isomorphic(t1: Tree, t2: Tree) -> bool:
    """Recursive backtracking isomorphism check, independent of canonical
    codes: children must match under some bijection."""

    def match(v1: int, v2: int) -> bool:
        c1 = sorted(t1.children[v1])
        c2 = sorted(t2.children[v2])
        if len(c1) != len(c2):
            return False
        if not c1:
            return True
        for perm in itertools.permutations(c2):
            if all(match(a, b) for a, b in zip(c1, perm)):
                return True
        return False

    return match(t1.root, t2.root)


@pytest.fixture(scope="session")
def trees_up_to_5():
    return [parse(code) for n in range(1, 6) for code in enumerate_trees(n)]


@pytest.fixture(scope="session")
def codes_up_to_7():
    return [code for n in range(1, 8) for code in enumerate_trees(n)]
