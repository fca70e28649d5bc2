import random

from popquiz.treedist import LTree, edit_mapping, tree_distance

from oracles import brute_force_tree_distance


def random_ltree(rng, max_nodes=5, labels="abc"):
    budget = rng.randint(1, max_nodes)

    def gen():
        nonlocal budget
        budget -= 1
        children = []
        while budget > 0 and rng.random() < 0.5:
            children.append(gen())
        return LTree(rng.choice(labels), tuple(children))

    return gen()


def test_known_distances():
    a = LTree("Run", (LTree("move"),))
    b = LTree("Run", (LTree("move"), LTree("turnLeft")))
    assert tree_distance(a, a) == 0
    assert tree_distance(a, b) == 1
    assert tree_distance(b, a) == 1
    c = LTree("Run", (LTree("turnLeft"),))
    assert tree_distance(a, c) == 1  # relabel


def test_relabel_vs_delete_insert():
    a = LTree("r", (LTree("x", (LTree("a"), LTree("b"))),))
    b = LTree("r", (LTree("y", (LTree("a"), LTree("b"))),))
    assert tree_distance(a, b) == 1


def test_matches_brute_force():
    rng = random.Random(3)
    for _ in range(150):
        a = random_ltree(rng)
        b = random_ltree(rng)
        assert tree_distance(a, b) == brute_force_tree_distance(a, b)


def test_edit_mapping_cost_equals_distance():
    rng = random.Random(5)
    for _ in range(80):
        a = random_ltree(rng, max_nodes=7)
        b = random_ltree(rng, max_nodes=7)
        mapping = edit_mapping(a, b)
        assert mapping.cost == tree_distance(a, b)
        # mapping covers every node exactly once on each side
        a_nodes = {p for p, _ in _paths(a)}
        b_nodes = {p for p, _ in _paths(b)}
        assert {pa for pa, _ in mapping.matched} | set(mapping.deleted) == a_nodes
        assert {pb for _, pb in mapping.matched} | set(mapping.inserted) == b_nodes


def _paths(tree, prefix=()):
    yield prefix, tree
    for i, child in enumerate(tree.children):
        yield from _paths(child, prefix + (i,))
