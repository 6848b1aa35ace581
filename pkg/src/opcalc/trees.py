"""Planar rooted trees with numbered leaves, and injections of finite sets.

Trees are immutable. A tree with n leaves carries a bijective numbering of
its leaves by 1..n; the numbering need not agree with the planar
left-to-right order. Every vertex has at least one child. The tree that is
a single bare leaf is allowed and acts as the identity for grafting.

Injections between the sets {1..m} and {1..n} are first-class values here
because every symmetric or cosimplicial structure downstream is phrased in
terms of them: restriction of labels, block substitution of slots, and the
two standard factorizations (permutation followed by an order-preserving
map, and inclusion followed by a permutation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterator, Mapping, Union


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


@dataclass(frozen=True)
class Leaf:
    number: int

    def __post_init__(self) -> None:
        if not isinstance(self.number, int) or self.number < 1:
            raise DomainError(f"leaf number must be a positive integer, got {self.number!r}")

    def __repr__(self) -> str:
        return f"Leaf({self.number})"


@dataclass(frozen=True)
class Vertex:
    children: tuple["Node", ...]

    def __post_init__(self) -> None:
        if not isinstance(self.children, tuple) or not self.children:
            raise DomainError("a vertex needs a nonempty tuple of children")
        for child in self.children:
            if not isinstance(child, (Leaf, Vertex)):
                raise DomainError(f"bad child node {child!r}")

    @property
    def arity(self) -> int:
        return len(self.children)


Node = Union[Leaf, Vertex]

# A vertex is addressed by the sequence of 0-based child indices leading to
# it from the root; () is the root itself.
VertexId = tuple[int, ...]


def _collect_leaf_numbers(node: Node, out: list[int]) -> None:
    if isinstance(node, Leaf):
        out.append(node.number)
    else:
        for child in node.children:
            _collect_leaf_numbers(child, out)


@dataclass(frozen=True)
class Tree:
    """A planar rooted tree whose n leaves are numbered bijectively by 1..n."""

    root: Node

    def __post_init__(self) -> None:
        word = []
        _collect_leaf_numbers(self.root, word)
        if sorted(word) != list(range(1, len(word) + 1)):
            raise DomainError(f"leaf numbers {word} are not a bijection onto 1..{len(word)}")

    @property
    def arity(self) -> int:
        return len(self.leaf_word)

    @property
    def leaf_word(self) -> tuple[int, ...]:
        """Leaf numbers in planar left-to-right order."""
        word: list[int] = []
        _collect_leaf_numbers(self.root, word)
        return tuple(word)

    @property
    def is_trivial(self) -> bool:
        return isinstance(self.root, Leaf)

    def vertex_ids(self) -> tuple[VertexId, ...]:
        """All vertex addresses in depth-first preorder."""
        found: list[VertexId] = []

        def walk(node: Node, path: VertexId) -> None:
            if isinstance(node, Vertex):
                found.append(path)
                for idx, child in enumerate(node.children):
                    walk(child, path + (idx,))

        walk(self.root, ())
        return tuple(found)

    def node_at(self, path: VertexId) -> Node:
        node: Node = self.root
        for idx in path:
            if isinstance(node, Leaf) or not 0 <= idx < len(node.children):
                raise DomainError(f"no node at path {path}")
            node = node.children[idx]
        return node


def trivial_tree() -> Tree:
    return Tree(Leaf(1))


def corolla(n: int) -> Tree:
    """One vertex with n leaves numbered 1..n in planar order."""
    if n < 1:
        raise DomainError("a corolla needs at least one leaf")
    return Tree(Vertex(tuple(Leaf(k) for k in range(1, n + 1))))


def map_leaves(node: Node, replace: Callable[[int], Node]) -> Node:
    """Rebuild a subtree, substituting replace(number) for each leaf."""
    if isinstance(node, Leaf):
        return replace(node.number)
    return Vertex(tuple(map_leaves(child, replace) for child in node.children))


def renumber_leaves(t: Tree, new_number: Mapping[int, int]) -> Tree:
    return Tree(map_leaves(t.root, lambda k: Leaf(new_number[k])))


def graft(host: Tree, i: int, guest: Tree) -> Tree:
    """Replace leaf number i of host by guest, with the standard renumbering.

    Host leaves below i keep their numbers, leaves above i are shifted up by
    guest.arity - 1, and guest leaf k becomes i + k - 1.
    """
    n, m = host.arity, guest.arity
    if not 1 <= i <= n:
        raise DomainError(f"graft slot {i} out of range 1..{n}")
    shifted = map_leaves(guest.root, lambda k: Leaf(i + k - 1))

    def place(number: int) -> Node:
        if number == i:
            return shifted
        return Leaf(number if number < i else number + m - 1)

    return Tree(map_leaves(host.root, place))


@dataclass(frozen=True)
class DeletionEntry:
    """What happened at one surviving vertex during a leaf deletion.

    kept_slots lists the 1-based child positions that still have a
    descendant leaf afterwards, in increasing order.
    """

    kept_slots: tuple[int, ...]
    original_arity: int


@dataclass(frozen=True)
class DeletionLedger:
    kept: Mapping[VertexId, DeletionEntry]
    removed: frozenset[VertexId]


def delete_leaves(t: Tree, u: "InjectiveMap") -> tuple[Tree, DeletionLedger]:
    """Restrict t to the leaves in the image of an injection u: [m] -> [n].

    Leaves outside the image vanish and leaf u(j) is renumbered j. A vertex
    that loses every child vanishes too, and its slot in the parent
    disappears; this cascades upward. At least one leaf must survive.

    Returns the surviving tree and a ledger keyed by addresses in the
    ORIGINAL tree: for each surviving vertex, which of its slots survived;
    plus the set of removed vertex addresses.
    """
    if u.n != t.arity:
        raise DomainError(f"injection lands in [{u.n}] but the tree has arity {t.arity}")
    if u.m == 0:
        raise DomainError("cannot delete every leaf")
    renumber = {u(j): j for j in range(1, u.m + 1)}
    kept: dict[VertexId, DeletionEntry] = {}
    removed: set[VertexId] = set()

    def walk(node: Node, path: VertexId) -> Node | None:
        if isinstance(node, Leaf):
            j = renumber.get(node.number)
            return None if j is None else Leaf(j)
        survivors: list[Node] = []
        slots: list[int] = []
        for idx, child in enumerate(node.children):
            kept_child = walk(child, path + (idx,))
            if kept_child is not None:
                survivors.append(kept_child)
                slots.append(idx + 1)
        if not survivors:
            removed.add(path)
            return None
        kept[path] = DeletionEntry(tuple(slots), len(node.children))
        return Vertex(tuple(survivors))

    new_root = walk(t.root, ())
    assert new_root is not None  # m >= 1 guarantees a survivor
    return Tree(new_root), DeletionLedger(kept, frozenset(removed))


@dataclass(frozen=True)
class InjectiveMap:
    """An injection u: {1..m} -> {1..n}, stored by its tuple of values."""

    m: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0 or len(self.values) != self.m:
            raise DomainError(f"expected {self.m} values, got {self.values!r}")
        seen: set[int] = set()
        for v in self.values:
            if not isinstance(v, int) or not 1 <= v <= self.n or v in seen:
                raise DomainError(f"values {self.values!r} are not an injection into 1..{self.n}")
            seen.add(v)

    def __call__(self, j: int) -> int:
        if not 1 <= j <= self.m:
            raise DomainError(f"argument {j} outside 1..{self.m}")
        return self.values[j - 1]

    def __repr__(self) -> str:
        return f"InjectiveMap({self.m}->{self.n}: {list(self.values)})"

    @property
    def is_order_preserving(self) -> bool:
        return all(a < b for a, b in zip(self.values, self.values[1:]))

    @property
    def is_permutation(self) -> bool:
        return self.m == self.n

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.values)

    @classmethod
    def identity(cls, n: int) -> "InjectiveMap":
        return cls(n, n, tuple(range(1, n + 1)))

    @classmethod
    def inclusion(cls, m: int, n: int) -> "InjectiveMap":
        """The order-preserving map j -> j."""
        if m > n:
            raise DomainError(f"no inclusion of [{m}] into [{n}]")
        return cls(m, n, tuple(range(1, m + 1)))

    def after(self, other: "InjectiveMap") -> "InjectiveMap":
        """Composite self . other, i.e. j -> self(other(j))."""
        if other.n != self.m:
            raise DomainError(f"cannot compose [{other.m}]->[{other.n}] with [{self.m}]->[{self.n}]")
        return InjectiveMap(other.m, self.n, tuple(self(other(j)) for j in range(1, other.m + 1)))

    def inverse(self) -> "InjectiveMap":
        if not self.is_permutation:
            raise DomainError("only permutations invert")
        inv = [0] * self.m
        for j, v in enumerate(self.values, start=1):
            inv[v - 1] = j
        return InjectiveMap(self.m, self.n, tuple(inv))

    def factor(self) -> tuple["InjectiveMap", "InjectiveMap"]:
        """Write self = w . sigma with sigma a permutation of [m] and w order-preserving.

        w enumerates the image in increasing order and sigma(j) is the rank
        of self(j) within the image.
        """
        ordered = sorted(self.values)
        rank = {v: r for r, v in enumerate(ordered, start=1)}
        w = InjectiveMap(self.m, self.n, tuple(ordered))
        sigma = InjectiveMap(self.m, self.m, tuple(rank[v] for v in self.values))
        return w, sigma

    def padded_permutation(self) -> "InjectiveMap":
        """The permutation of [n] that agrees with self on 1..m and lists the
        complement of the image in increasing order afterwards, so that
        self = padded . inclusion."""
        complement = sorted(set(range(1, self.n + 1)) - set(self.values))
        return InjectiveMap(self.n, self.n, self.values + tuple(complement))

    @staticmethod
    def all_order_preserving(m: int, n: int) -> Iterator["InjectiveMap"]:
        for combo in itertools.combinations(range(1, n + 1), m):
            yield InjectiveMap(m, n, combo)

    @staticmethod
    def all_maps(m: int, n: int) -> Iterator["InjectiveMap"]:
        for perm in itertools.permutations(range(1, n + 1), m):
            yield InjectiveMap(m, n, perm)

    @staticmethod
    def count_order_preserving(m: int, n: int) -> int:
        return comb(n, m)


def block_injection(u: InjectiveMap, i: int, v: InjectiveMap) -> InjectiveMap:
    """The injection induced on composites when slot i of the outer factor
    is filled.

    For u: [n'] -> [n], v: [m'] -> [m] and 1 <= i <= n', this is the map
    [n' + m' - 1] -> [n + m - 1] that sends the block i..i+m'-1 into the
    block u(i)..u(i)+m-1 via v, and follows u off the block with values
    shifted past the inserted block.
    """
    if not 1 <= i <= u.m:
        raise DomainError(f"slot {i} out of range 1..{u.m}")
    ui = u(i)

    def off_block(x: int) -> int:
        return x if x < ui else x + v.n - 1

    out: list[int] = []
    for j in range(1, u.m + v.m):
        if j < i:
            out.append(off_block(u(j)))
        elif j <= i + v.m - 1:
            out.append(ui + v(j - i + 1) - 1)
        else:
            out.append(off_block(u(j - v.m + 1)))
    return InjectiveMap(u.m + v.m - 1, u.n + v.n - 1, tuple(out))


def drop_block(w: InjectiveMap, i: int, m: int) -> InjectiveMap:
    """Collapse an untouched block i..i+m-1 of the codomain to the single
    value i.

    w must be an injection into [n + m - 1] whose image avoids the block
    entirely; the result lands in [n] where n = w.n - m + 1.
    """
    if m < 1 or not 1 <= i <= w.n - m + 1:
        raise DomainError(f"block {i}..{i + m - 1} does not fit inside [{w.n}]")
    for x in w.values:
        if i <= x <= i + m - 1:
            raise DomainError(f"image value {x} lies in the block {i}..{i + m - 1}")
    return InjectiveMap(w.m, w.n - m + 1, tuple(x if x < i else x - m + 1 for x in w.values))


def tree_text(t: Tree) -> str:
    """Compact one-line rendering: leaves as numbers, vertices as (...)."""

    def fmt(node: Node) -> str:
        if isinstance(node, Leaf):
            return str(node.number)
        return "(" + " ".join(fmt(c) for c in node.children) + ")"

    return fmt(t.root)
