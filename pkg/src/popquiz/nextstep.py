"""Next-step hints: apply one edit of the optimal edit script.

The hint moves the student's attempt one tree edit closer to the
solution, preferring edits that touch a programming construct over edits
that only touch action leaves. Candidate edits come from a minimum-cost
edit mapping between the two ASTs and are applied directly to the
attempt's AST; an edit is only offered if the result is grammar-valid
and strictly closer to the solution.
"""

from __future__ import annotations

from .code_dsl import (
    Action,
    CONSTRUCTS,
    GrammarError,
    If,
    IfElse,
    Program,
    Repeat,
    RepeatUntil,
    Stmt,
    While,
    code_distance,
    serialize,
    to_ltree,
    validate,
)
from .treedist import LTree, edit_mapping, node_at

_BodyKey = tuple  # (owner program path, "body" | "then" | "else")


def _is_construct_label(label: str) -> bool:
    return label.split("(")[0] in CONSTRUCTS


def _children_of(stmt: Stmt) -> tuple[Stmt, ...]:
    if isinstance(stmt, IfElse):
        return stmt.then_body + stmt.else_body
    if isinstance(stmt, (Repeat, RepeatUntil, While, If)):
        return stmt.body
    return ()


def _first_action(tree: LTree) -> str:
    if not tree.children and not _is_construct_label(tree.label) and tree.label != "Run":
        return tree.label
    for child in tree.children:
        found = _first_action(child)
        if found:
            return found
    return ""


class _Index:
    """Correspondence between a program's AST and its distance tree."""

    def __init__(self, program: Program):
        self.bodies: dict[_BodyKey, tuple[Stmt, ...]] = {}
        self.node_body: dict[tuple[int, ...], tuple[_BodyKey, int]] = {}
        self.ltree_to_prog: dict[tuple[int, ...], tuple[int, ...]] = {(): ()}
        self.nodes: dict[tuple[int, ...], Stmt] = {}
        self._walk(program.body, ((), "body"), ())

    def _walk(self, body: tuple[Stmt, ...], key: _BodyKey, lpath: tuple[int, ...]) -> None:
        # ``lpath`` is the distance-tree path of the body's owner; IfElse
        # else-branch children continue the owner's child numbering after
        # the then branch, which ``offset`` accounts for.
        self.bodies[key] = body
        owner_path, branch = key
        offset = 0
        if branch == "else":
            offset = len(self.bodies[(owner_path, "then")])
        for i, stmt in enumerate(body):
            if branch == "body":
                ppath = owner_path + (i,)
            else:
                ppath = owner_path + ((0,) if branch == "then" else (1,)) + (i,)
            child_lpath = lpath + (offset + i,)
            self.ltree_to_prog[child_lpath] = ppath
            self.nodes[ppath] = stmt
            self.node_body[ppath] = (key, i)
            if isinstance(stmt, IfElse):
                self._walk(stmt.then_body, (ppath, "then"), child_lpath)
                self._walk(stmt.else_body, (ppath, "else"), child_lpath)
            elif isinstance(stmt, (Repeat, RepeatUntil, While, If)):
                self._walk(stmt.body, (ppath, "body"), child_lpath)


def _rebuild_with_body(program: Program, key: _BodyKey, new_body: tuple[Stmt, ...]) -> Program:
    owner_path, branch = key

    def rebuild(body: tuple[Stmt, ...], prefix: tuple[int, ...]) -> tuple[Stmt, ...]:
        if prefix == owner_path and branch == "body" and owner_path == ():
            return new_body
        out = []
        for i, stmt in enumerate(body):
            here = prefix + (i,)
            if here == owner_path:
                if isinstance(stmt, Repeat) and branch == "body":
                    out.append(Repeat(stmt.count, new_body))
                elif isinstance(stmt, RepeatUntil) and branch == "body":
                    out.append(RepeatUntil(new_body))
                elif isinstance(stmt, While) and branch == "body":
                    out.append(While(stmt.cond, new_body))
                elif isinstance(stmt, If) and branch == "body":
                    out.append(If(stmt.cond, new_body))
                elif isinstance(stmt, IfElse) and branch == "then":
                    out.append(IfElse(stmt.cond, new_body, stmt.else_body))
                elif isinstance(stmt, IfElse) and branch == "else":
                    out.append(IfElse(stmt.cond, stmt.then_body, new_body))
                else:
                    raise AssertionError("body key does not fit its owner")
                continue
            if isinstance(stmt, Repeat):
                out.append(Repeat(stmt.count, rebuild(stmt.body, here)))
            elif isinstance(stmt, RepeatUntil):
                out.append(RepeatUntil(rebuild(stmt.body, here)))
            elif isinstance(stmt, While):
                out.append(While(stmt.cond, rebuild(stmt.body, here)))
            elif isinstance(stmt, If):
                out.append(If(stmt.cond, rebuild(stmt.body, here)))
            elif isinstance(stmt, IfElse):
                out.append(
                    IfElse(
                        stmt.cond,
                        rebuild(stmt.then_body, here + (0,)),
                        rebuild(stmt.else_body, here + (1,)),
                    )
                )
            else:
                out.append(stmt)
        return tuple(out)

    if owner_path == () and branch == "body":
        return Program(new_body)
    return Program(rebuild(program.body, ()))


def _make_stmt(label: str, stmt: Stmt | None, filler: str) -> Stmt | None:
    """A statement with the given distance-tree label.

    When ``stmt`` is given its children are preserved (a relabel);
    otherwise the new construct is seeded with a filler action.
    """
    head, _, rest = label.partition("(")
    arg = rest.rstrip(")")
    children = _children_of(stmt) if stmt is not None else ()
    fallback = children if children else (Action(filler),)
    if head == "Repeat":
        return Repeat(int(arg), fallback)
    if head == "RepeatUntil":
        return RepeatUntil(fallback)
    if head == "While":
        return While(arg, fallback)
    if head == "If":
        return If(arg, fallback)
    if head == "IfElse":
        if isinstance(stmt, IfElse):
            return IfElse(arg, stmt.then_body, stmt.else_body)
        return IfElse(arg, fallback, (Action(filler),))
    if children:
        return None  # a construct cannot collapse to an action in one edit
    return Action(label)


def next_step_edit(attempt: Program, solution: Program) -> Program:
    """The attempt with one edit applied toward the solution.

    Falls back to the solution itself in the degenerate case where no
    single edit yields a valid, strictly closer code.
    """
    src = to_ltree(attempt)
    dst = to_ltree(solution)
    mapping = edit_mapping(src, dst)
    index = _Index(attempt)
    partner_of_b = {pb: pa for pa, pb in mapping.matched}
    baseline = code_distance(attempt, solution)

    candidates: list[tuple[int, int, str, Program]] = []

    def offer(program: Program, construct_edit: bool) -> None:
        try:
            validate(program)
        except GrammarError:
            return
        distance = code_distance(program, solution)
        if distance >= baseline:
            return
        candidates.append((0 if construct_edit else 1, distance, serialize(program), program))

    # relabels
    for pa, pb in mapping.matched:
        if pa == ():
            continue
        a_label = node_at(src, pa).label
        b_label = node_at(dst, pb).label
        if a_label == b_label:
            continue
        ppath = index.ltree_to_prog[pa]
        stmt = index.nodes[ppath]
        filler = _first_action(node_at(dst, pb)) or "move"
        new_stmt = _make_stmt(b_label, stmt, filler)
        if new_stmt is None:
            continue
        key, i = index.node_body[ppath]
        body = index.bodies[key]
        edited = _rebuild_with_body(attempt, key, body[:i] + (new_stmt,) + body[i + 1:])
        offer(edited, _is_construct_label(a_label) or _is_construct_label(b_label))

    # deletions: splice the node's children into its body
    for pa in mapping.deleted:
        if pa == ():
            continue
        ppath = index.ltree_to_prog[pa]
        stmt = index.nodes[ppath]
        key, i = index.node_body[ppath]
        body = index.bodies[key]
        edited = _rebuild_with_body(attempt, key, body[:i] + _children_of(stmt) + body[i + 1:])
        offer(edited, _is_construct_label(node_at(src, pa).label))

    # insertions: under a matched parent, wrapping the span of source
    # siblings whose partners live inside the inserted target node
    def within(path: tuple[int, ...], ancestor: tuple[int, ...]) -> bool:
        return path[: len(ancestor)] == ancestor

    for pb in mapping.inserted:
        if pb == ():
            continue
        parent_b = pb[:-1]
        if parent_b != () and parent_b not in partner_of_b:
            continue
        parent_a = partner_of_b.get(parent_b, ())
        parent_node = node_at(src, parent_a)
        new_node = node_at(dst, pb)

        member_slots: list[tuple[_BodyKey, int]] = []
        for i in range(len(parent_node.children)):
            child_l = parent_a + (i,)
            if any(within(pa2, child_l) and within(pb2, pb) for pa2, pb2 in mapping.matched):
                ppath = index.ltree_to_prog[child_l]
                member_slots.append(index.node_body[ppath])

        filler = _first_action(new_node) or "move"
        if member_slots:
            keys = {key for key, _ in member_slots}
            if len(keys) != 1:
                continue  # the span straddles an IfElse branch boundary
            key = keys.pop()
            indices = [i for _, i in member_slots]
            lo, hi = min(indices), max(indices) + 1
        else:
            # nothing of the new subtree exists yet: append at the end of
            # the parent's (last) body
            if parent_a == ():
                key = ((), "body")
            else:
                ppath = index.ltree_to_prog[parent_a]
                stmt = index.nodes[ppath]
                key = (ppath, "else" if isinstance(stmt, IfElse) else "body")
            lo = hi = len(index.bodies[key])
        body = index.bodies[key]
        wrapped = body[lo:hi]
        new_stmt = _make_stmt(new_node.label, None, filler)
        if new_stmt is None:
            continue
        if wrapped:
            if isinstance(new_stmt, Repeat):
                new_stmt = Repeat(new_stmt.count, wrapped)
            elif isinstance(new_stmt, RepeatUntil):
                new_stmt = RepeatUntil(wrapped)
            elif isinstance(new_stmt, While):
                new_stmt = While(new_stmt.cond, wrapped)
            elif isinstance(new_stmt, If):
                new_stmt = If(new_stmt.cond, wrapped)
            elif isinstance(new_stmt, IfElse):
                new_stmt = IfElse(new_stmt.cond, wrapped, new_stmt.else_body)
        edited = _rebuild_with_body(attempt, key, body[:lo] + (new_stmt,) + body[hi:])
        offer(edited, _is_construct_label(new_node.label))

    if not candidates:
        return solution
    candidates.sort(key=lambda item: (item[0], item[1], item[2]))
    return candidates[0][3]
