"""Unit-cost edit distance and edit mappings over ordered labeled trees.

Distances use the keyroot dynamic program of Zhang and Shasha. Edit
mappings (needed when one concrete edit has to be applied to a tree, and
as an internal cross-check of the distance values) are recovered with a
separate memoized forest recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

Path = tuple[int, ...]


@dataclass(frozen=True)
class LTree:
    """An ordered tree with a string label at every node."""

    label: str
    children: tuple["LTree", ...] = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def node_at(tree: LTree, path: Path) -> LTree:
    node = tree
    for i in path:
        node = node.children[i]
    return node


def _annotate(root: LTree) -> tuple[list[str], list[int], list[int]]:
    """Postorder labels, leftmost-leaf-descendant indices and keyroots."""
    labels: list[str] = []
    lmld: list[int] = []

    def walk(node: LTree) -> int:
        first = -1
        for child in node.children:
            f = walk(child)
            if first < 0:
                first = f
        idx = len(labels)
        labels.append(node.label)
        lmld.append(first if first >= 0 else idx)
        return lmld[idx]

    walk(root)
    n = len(labels)
    keyroots = [i for i in range(n) if not any(lmld[j] == lmld[i] for j in range(i + 1, n))]
    return labels, lmld, keyroots


def tree_distance(a: LTree, b: LTree) -> int:
    """Minimum number of node insertions, deletions and relabelings."""
    la, lma, kra = _annotate(a)
    lb, lmb, krb = _annotate(b)
    na, nb = len(la), len(lb)
    td = [[0] * nb for _ in range(na)]

    for i in kra:
        ioff = lma[i] - 1
        m = i - ioff + 1
        for j in krb:
            joff = lmb[j] - 1
            n = j - joff + 1
            fd = [[0] * n for _ in range(m)]
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + 1
            first = fd[0]
            for y in range(1, n):
                first[y] = first[y - 1] + 1
            for x in range(1, m):
                row = fd[x]
                prev = fd[x - 1]
                xi = x + ioff
                anchored_x = lma[xi] == lma[i]
                for y in range(1, n):
                    yj = y + joff
                    if anchored_x and lmb[yj] == lmb[j]:
                        cost = 0 if la[xi] == lb[yj] else 1
                        best = prev[y - 1] + cost
                        if prev[y] + 1 < best:
                            best = prev[y] + 1
                        if row[y - 1] + 1 < best:
                            best = row[y - 1] + 1
                        row[y] = best
                        td[xi][yj] = best
                    else:
                        p = lma[xi] - 1 - ioff
                        q = lmb[yj] - 1 - joff
                        best = fd[p][q] + td[xi][yj]
                        if prev[y] + 1 < best:
                            best = prev[y] + 1
                        if row[y - 1] + 1 < best:
                            best = row[y - 1] + 1
                        row[y] = best
    return td[na - 1][nb - 1]


@dataclass(frozen=True)
class EditMapping:
    """An optimal edit mapping between two trees.

    ``matched`` pairs nodes of the source with nodes of the target; a pair
    whose labels differ is a relabel (cost 1). ``deleted`` are source paths
    with no partner, ``inserted`` are target paths with no partner. The
    total cost equals ``tree_distance`` of the two trees.
    """

    cost: int
    matched: tuple[tuple[Path, Path], ...]
    deleted: tuple[Path, ...]
    inserted: tuple[Path, ...]


def edit_mapping(a: LTree, b: LTree) -> EditMapping:
    """Compute one minimum-cost edit mapping from ``a`` to ``b``."""
    memo: dict[tuple[tuple[Path, ...], tuple[Path, ...]], tuple[int, tuple]] = {}

    def subtree_paths(node: LTree, path: Path) -> list[Path]:
        out = [path]
        for i, child in enumerate(node.children):
            out.extend(subtree_paths(child, path + (i,)))
        return out

    def expand(item: tuple[LTree, Path]) -> tuple[tuple[LTree, Path], ...]:
        node, path = item
        return tuple((c, path + (i,)) for i, c in enumerate(node.children))

    def solve(fa: tuple, fb: tuple) -> tuple[int, tuple]:
        key = (tuple(p for _, p in fa), tuple(p for _, p in fb))
        hit = memo.get(key)
        if hit is not None:
            return hit
        if not fa and not fb:
            res: tuple[int, tuple] = (0, ())
        elif not fb:
            ops = tuple(("del", p) for n, p0 in fa for p in subtree_paths(n, p0))
            res = (len(ops), ops)
        elif not fa:
            ops = tuple(("ins", p) for n, p0 in fb for p in subtree_paths(n, p0))
            res = (len(ops), ops)
        else:
            va, pa = fa[-1]
            vb, pb = fb[-1]
            # delete the root of the rightmost source tree
            c1, o1 = solve(fa[:-1] + expand(fa[-1]), fb)
            best = (c1 + 1, o1 + (("del", pa),))
            # insert the root of the rightmost target tree
            c2, o2 = solve(fa, fb[:-1] + expand(fb[-1]))
            if c2 + 1 < best[0]:
                best = (c2 + 1, o2 + (("ins", pb),))
            # match the two rightmost roots
            c3a, o3a = solve(fa[:-1], fb[:-1])
            c3b, o3b = solve(expand(fa[-1]), expand(fb[-1]))
            relabel = 0 if va.label == vb.label else 1
            if c3a + c3b + relabel < best[0]:
                best = (c3a + c3b + relabel, o3a + o3b + (("match", pa, pb),))
            res = best
        memo[key] = res
        return res

    cost, ops = solve(((a, ()),), ((b, ()),))
    matched = tuple((op[1], op[2]) for op in ops if op[0] == "match")
    deleted = tuple(op[1] for op in ops if op[0] == "del")
    inserted = tuple(op[1] for op in ops if op[0] == "ins")
    return EditMapping(cost=cost, matched=matched, deleted=deleted, inserted=inserted)
