"""Nested column indices into tensor powers.

A column of ``A^k`` is an element of ``[n]^((m-1)^k)``, but it splits
naturally into ``m-1`` blocks that are columns of ``A^(k-1)``.  We keep that
block structure as a tree: a depth-0 tree is a leaf (an int in ``1..n``), a
depth-``d`` tree is a tuple of ``m-1`` trees of depth ``d-1``.

Trees may share subtrees; witnesses built by the engine do so heavily, which
keeps a depth-20 all-equal index at 21 distinct objects instead of 2^20
leaves.
"""

from __future__ import annotations

from typing import Any, Union

NestedIndex = Union[int, tuple]


def tree_depth(tree: NestedIndex, arity: int, dim: int) -> int:
    """Depth of a uniform tree; raises ``ValueError`` if malformed."""
    memo: dict[int, int] = {}

    def depth(node) -> int:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, bool):
            raise ValueError("leaves must be integers, not booleans")
        if isinstance(node, int):
            if not 1 <= node <= dim:
                raise ValueError(f"leaf {node} out of range 1..{dim}")
            d = 0
        elif isinstance(node, (tuple, list)):
            if len(node) != arity:
                raise ValueError(f"node has {len(node)} children, expected {arity}")
            depths = {depth(child) for child in node}
            if len(depths) != 1:
                raise ValueError("tree depth is not uniform")
            d = depths.pop() + 1
        else:
            raise ValueError(f"unexpected node {node!r}")
        memo[key] = d
        return d

    return depth(tree)


def freeze(tree: Any) -> NestedIndex:
    """Convert nested lists to nested tuples."""
    if isinstance(tree, list):
        return tuple(freeze(x) for x in tree)
    return tree


def all_equal_tree(leaf: int, arity: int, depth: int) -> NestedIndex:
    node: NestedIndex = leaf
    for _ in range(depth):
        node = (node,) * arity
    return node


def flatten(tree: NestedIndex) -> list[int]:
    out: list[int] = []
    stack = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, int):
            out.append(node)
        else:
            stack.extend(reversed(node))
    return out


def nested_to_json(tree: NestedIndex) -> Any:
    if isinstance(tree, int):
        return tree
    return [nested_to_json(x) for x in tree]


def nested_from_json(obj: Any) -> NestedIndex:
    return freeze(obj)
