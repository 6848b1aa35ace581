"""Decorated trees with edge lengths: the cofibrant resolution of an operad.

A point is a planar rooted tree whose vertices are labelled by operad
elements (one input per child), whose inner edges carry exact lengths in
[0,1], and whose leaves carry the input labels 1..n of the point. Children
of a vertex are stored as either a bare leaf number or an inner edge; leaf
numbers therefore live directly at the slots they decorate and composition
of labels during edge contraction never renumbers anything.

Normal form, computed by `wpoint`:

  * an inner edge of length 0 is contracted, composing the two vertex
    labels at the slot given by the child's position;
  * a unary vertex labelled by the operad unit is spliced out; the two
    adjacent edges merge into one whose length is the maximum of the two,
    and an adjacent external edge (root side or a bare leaf) absorbs the
    inner length entirely;
  * each vertex is rotated to the lexicographically least presentation
    among its symmetric-group twists, so equality of points is structural
    equality of normal forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Optional, Union

from .operads import EffectiveOperad, format_fraction
from .trees import DomainError, InjectiveMap, Leaf, Tree, Vertex


@dataclass(frozen=True)
class WNode:
    label: Hashable
    children: tuple["WEntry", ...]


@dataclass(frozen=True)
class WEdge:
    length: Fraction
    node: WNode


WEntry = Union[int, WEdge]   # a bare leaf number, or an inner edge


@dataclass(frozen=True)
class WPoint:
    """A normal-form point. Build these with wpoint / w_unit / w_corolla."""

    operad: EffectiveOperad
    root: Union[int, WNode]

    @property
    def is_trivial(self) -> bool:
        return isinstance(self.root, int)

    @property
    def arity(self) -> int:
        return len(self.leaf_word)

    @property
    def leaf_word(self) -> tuple[int, ...]:
        out: list[int] = []
        _collect_leaves(self.root, out)
        return tuple(out)

    def __repr__(self) -> str:
        return f"WPoint({self.operad.name}: {entry_text(self.operad, self.root)})"


def _collect_leaves(entry: Union[WEntry, WNode], out: list[int]) -> None:
    if isinstance(entry, int):
        out.append(entry)
    elif isinstance(entry, WEdge):
        _collect_leaves(entry.node, out)
    else:
        for child in entry.children:
            _collect_leaves(child, out)


def entry_text(op: EffectiveOperad, entry: Union[WEntry, WNode]) -> str:
    """Deterministic one-line rendering; doubles as the canonical sort key."""
    if isinstance(entry, int):
        return f"l{entry}"
    if isinstance(entry, WEdge):
        return f"(e {format_fraction(entry.length)} {entry_text(op, entry.node)})"
    label = op.format_element(entry.label).replace("\\", "\\\\").replace('"', '\\"')
    parts = [f'(v "{label}"']
    parts.extend(entry_text(op, child) for child in entry.children)
    return " ".join(parts) + ")"


def w_text(a: WPoint) -> str:
    return entry_text(a.operad, a.root)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _validate_raw(op: EffectiveOperad, entry: Union[WEntry, WNode]) -> Union[WEntry, WNode]:
    """Check shapes, coerce lengths to Fraction, validate labels."""
    if isinstance(entry, bool) or (isinstance(entry, int) and entry < 1):
        raise DomainError(f"bad leaf number {entry!r}")
    if isinstance(entry, int):
        return entry
    if isinstance(entry, WEdge):
        length = Fraction(entry.length)
        if not 0 <= length <= 1:
            raise DomainError(f"edge length {entry.length} outside [0,1]")
        node = _validate_raw(op, entry.node)
        return WEdge(length, node)
    if isinstance(entry, WNode):
        op.validate(entry.label)
        if op.arity_of(entry.label) != len(entry.children):
            raise DomainError(
                f"label arity {op.arity_of(entry.label)} against {len(entry.children)} children")
        return WNode(entry.label, tuple(_validate_raw(op, c) for c in entry.children))
    raise DomainError(f"bad tree entry {entry!r}")


def _reduce_vertex(op: EffectiveOperad, node: WNode) -> Union[int, WNode]:
    """Apply contractions and unit splices below and at this vertex.

    Returns a bare leaf number when the whole subtree collapses to one
    (a chain of unit vertices over a leaf).
    """
    entries: list[WEntry] = []
    for child in node.children:
        if isinstance(child, int):
            entries.append(child)
            continue
        reduced = _reduce_vertex(op, child.node)
        if isinstance(reduced, int):
            # the subtree collapsed onto a leaf; leaf side is external, so
            # the inner length is absorbed
            entries.append(reduced)
            continue
        length = child.length
        while len(reduced.children) == 1 and op.is_unit(reduced.label):
            only = reduced.children[0]
            if isinstance(only, int):
                length = None
                break
            length = max(length, only.length)
            reduced = only.node
        if length is None:
            entries.append(reduced_leaf_number(reduced))
        else:
            entries.append(WEdge(length, reduced))

    label = node.label
    # contract length-0 edges; positions shift as blocks are spliced in
    p = 0
    while p < len(entries):
        entry = entries[p]
        if isinstance(entry, WEdge) and entry.length == 0:
            label = op.compose(label, p + 1, entry.node.label)
            entries[p: p + 1] = list(entry.node.children)
        else:
            p += 1

    if len(entries) == 1 and op.is_unit(label) and isinstance(entries[0], int):
        return entries[0]
    return WNode(label, tuple(entries))


def reduced_leaf_number(node: WNode) -> int:
    # only reachable when a unit chain ends directly on a leaf
    child = node.children[0]
    assert isinstance(child, int)
    return child


def _canonical_node(op: EffectiveOperad, node: WNode) -> WNode:
    entries = tuple(
        child if isinstance(child, int) else WEdge(child.length, _canonical_node(op, child.node))
        for child in node.children)
    k = len(entries)
    if k == 1:
        return WNode(node.label, entries)
    texts = [entry_text(op, e) for e in entries]
    best: Optional[WNode] = None
    best_key = None
    for values in itertools.permutations(range(1, k + 1)):
        sigma = InjectiveMap(k, k, values)
        label = op.restrict(sigma, node.label)
        key = (op.format_element(label), tuple(texts[values[j] - 1] for j in range(k)))
        if best_key is None or key < best_key:
            best = WNode(label, tuple(entries[values[j] - 1] for j in range(k)))
            best_key = key
    assert best is not None
    return best


def _normalize_root(op: EffectiveOperad, root: Union[int, WNode]) -> Union[int, WNode]:
    root = _validate_raw(op, root)
    if isinstance(root, int):
        if root != 1:
            raise DomainError("a bare leaf point must be numbered 1")
        return 1
    word: list[int] = []
    _collect_leaves(root, word)
    if sorted(word) != list(range(1, len(word) + 1)):
        raise DomainError(f"leaf numbers {word} are not a bijection onto 1..{len(word)}")
    reduced = _reduce_vertex(op, root)
    if isinstance(reduced, int):
        return 1
    # root side is external: a unit chain at the root absorbs its edge
    while len(reduced.children) == 1 and op.is_unit(reduced.label):
        only = reduced.children[0]
        if isinstance(only, int):
            return 1
        reduced = only.node
    return _canonical_node(op, reduced)


def wpoint(op: EffectiveOperad, root: Union[int, WNode]) -> WPoint:
    """Validate, reduce and canonicalize; the only sanctioned constructor."""
    return WPoint(op, _normalize_root(op, root))


def w_unit(op: EffectiveOperad) -> WPoint:
    return WPoint(op, 1)


def w_corolla(op: EffectiveOperad, label) -> WPoint:
    op.validate(label)
    return wpoint(op, WNode(label, tuple(range(1, op.arity_of(label) + 1))))


# ---------------------------------------------------------------------------
# an independent reducer, used to check that normal forms do not depend on
# the order reductions are applied in
# ---------------------------------------------------------------------------

def _node_at_path(node: WNode, path: tuple[int, ...]) -> WNode:
    for index in path:
        child = node.children[index]
        assert isinstance(child, WEdge)
        node = child.node
    return node


def _with_node(node: WNode, path: tuple[int, ...], new: WNode) -> WNode:
    if not path:
        return new
    index = path[0]
    edge = node.children[index]
    assert isinstance(edge, WEdge)
    replaced = WEdge(edge.length, _with_node(edge.node, path[1:], new))
    return WNode(node.label, node.children[:index] + (replaced,) + node.children[index + 1:])


def _applicable_steps(op: EffectiveOperad, root: WNode) -> list[tuple]:
    steps: list[tuple] = []

    def walk(node: WNode, path: tuple[int, ...]) -> None:
        if len(node.children) == 1 and op.is_unit(node.label):
            steps.append(("splice", path))
        for position, child in enumerate(node.children):
            if isinstance(child, WEdge):
                if child.length == 0:
                    steps.append(("contract", path, position))
                walk(child.node, path + (position,))

    walk(root, ())
    return steps


def _apply_step(op: EffectiveOperad, root: WNode, step: tuple) -> Union[int, WNode]:
    if step[0] == "contract":
        _, path, position = step
        node = _node_at_path(root, path)
        edge = node.children[position]
        assert isinstance(edge, WEdge)
        merged = WNode(
            op.compose(node.label, position + 1, edge.node.label),
            node.children[:position] + edge.node.children + node.children[position + 1:])
        return _with_node(root, path, merged)
    _, path = step
    node = _node_at_path(root, path)
    only = node.children[0]
    if not path:
        if isinstance(only, int):
            return 1
        return only.node
    parent = _node_at_path(root, path[:-1])
    position = path[-1]
    edge = parent.children[position]
    assert isinstance(edge, WEdge)
    if isinstance(only, int):
        new_entry: WEntry = only
    else:
        new_entry = WEdge(max(edge.length, only.length), only.node)
    rebuilt = WNode(parent.label,
                    parent.children[:position] + (new_entry,) + parent.children[position + 1:])
    return _with_node(root, path[:-1], rebuilt)


def normalize_random_order(rng, op: EffectiveOperad, root: Union[int, WNode]) -> Union[int, WNode]:
    """Reduce by repeatedly applying a uniformly chosen applicable step.

    Same contract as the deterministic pass inside wpoint; agreement across
    many draws is what the confluence suite checks.
    """
    root = _validate_raw(op, root)
    if isinstance(root, int):
        return 1
    while True:
        steps = _applicable_steps(op, root)
        if not steps:
            break
        root = _apply_step(op, root, rng.choice(steps))
        if isinstance(root, int):
            return 1
    return _canonical_node(op, root)


# ---------------------------------------------------------------------------
# structure maps
# ---------------------------------------------------------------------------

def _shift_leaves(entry: Union[WEntry, WNode], move: Callable[[int], int]):
    if isinstance(entry, int):
        return move(entry)
    if isinstance(entry, WEdge):
        return WEdge(entry.length, _shift_leaves(entry.node, move))
    return WNode(entry.label, tuple(_shift_leaves(c, move) for c in entry.children))


def w_compose(a: WPoint, i: int, b: WPoint) -> WPoint:
    """Graft b onto leaf i of a along a fresh inner edge of length 1."""
    if a.operad != b.operad:
        raise DomainError("points live over different operads")
    n, m = a.arity, b.arity
    if not 1 <= i <= n:
        raise DomainError(f"slot {i} out of range 1..{n}")
    if a.is_trivial:
        return b
    if b.is_trivial:
        return a
    guest = _shift_leaves(b.root, lambda k: i + k - 1)

    def place(entry: Union[WEntry, WNode]):
        if isinstance(entry, int):
            if entry == i:
                return WEdge(Fraction(1), guest)
            return entry if entry < i else entry + m - 1
        if isinstance(entry, WEdge):
            return WEdge(entry.length, place(entry.node))
        return WNode(entry.label, tuple(place(c) for c in entry.children))

    return wpoint(a.operad, place(a.root))


def w_lambda(u: InjectiveMap, a: WPoint) -> WPoint:
    """Restriction along an injection u: [m] -> [n], m >= 1.

    Leaves outside the image vanish, leaf u(j) becomes j, a vertex losing
    all children vanishes with its slot, and surviving labels are
    restricted along their kept slots.
    """
    if u.n != a.arity:
        raise DomainError(f"injection into [{u.n}] against arity {a.arity}")
    if u.m == 0:
        raise DomainError("a restriction must keep at least one input")
    if a.is_trivial:
        return a
    op = a.operad
    renumber = {u(j): j for j in range(1, u.m + 1)}

    def walk(node: WNode) -> Optional[WNode]:
        entries: list[WEntry] = []
        slots: list[int] = []
        for position, child in enumerate(node.children, start=1):
            if isinstance(child, int):
                j = renumber.get(child)
                if j is not None:
                    entries.append(j)
                    slots.append(position)
            else:
                sub = walk(child.node)
                if sub is not None:
                    entries.append(WEdge(child.length, sub))
                    slots.append(position)
        if not entries:
            return None
        kept = InjectiveMap(len(slots), len(node.children), tuple(slots))
        return WNode(op.restrict(kept, node.label), tuple(entries))

    new_root = walk(a.root)
    assert new_root is not None
    return wpoint(op, new_root)


def mu(a: WPoint):
    """Collapse every inner edge to length 0 and compose down to the operad."""
    op = a.operad
    if a.is_trivial:
        return op.unit()

    def fold(node: WNode) -> tuple[Hashable, tuple[int, ...]]:
        value = node.label
        parts: list[tuple[int, ...]] = []
        for position in range(len(node.children), 0, -1):
            child = node.children[position - 1]
            if isinstance(child, WEdge):
                sub_value, sub_word = fold(child.node)
                value = op.compose(value, position, sub_value)
                parts.append(sub_word)
            else:
                parts.append((child,))
        word: list[int] = []
        for part in reversed(parts):
            word.extend(part)
        return value, tuple(word)

    value, word = fold(a.root)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word), tuple(position_of[j] for j in range(1, len(word) + 1)))
    return op.restrict(sigma, value)


# ---------------------------------------------------------------------------
# prime decomposition along length-1 edges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WDecomposition:
    """Components obtained by cutting every inner edge of length 1.

    components are listed in depth-first preorder of the skeleton's
    vertices; component slots are numbered 1..k in planar order, and slot j
    of a component corresponds to child j of its skeleton vertex. The
    skeleton keeps the original leaf numbers. The trivial point has no
    components and sits at filtration level 0.
    """

    components: tuple[WPoint, ...]
    skeleton: Tree
    filtration_level: int


def w_prime_decompose(a: WPoint) -> WDecomposition:
    op = a.operad
    if a.is_trivial:
        return WDecomposition((), Tree(Leaf(1)), 0)
    components: list[WPoint] = []

    def carve(node: WNode):
        """Return (skeleton node, reserving components[index] for this piece)."""
        index = len(components)
        components.append(None)  # type: ignore[arg-type]
        exits: list = []

        def local(entry: WEntry) -> WEntry:
            if isinstance(entry, int):
                exits.append(Leaf(entry))
                return len(exits)
            if entry.length == 1:
                exits.append(carve(entry.node))
                return len(exits)
            return WEdge(entry.length, WNode(entry.node.label,
                                             tuple(local(c) for c in entry.node.children)))

        piece_root = WNode(node.label, tuple(local(c) for c in node.children))
        components[index] = wpoint(op, piece_root)
        return Vertex(tuple(exits))

    skeleton_root = carve(a.root)
    skeleton = Tree(skeleton_root)
    level = max(piece.arity for piece in components)
    return WDecomposition(tuple(components), skeleton, level)


def reassemble(op: EffectiveOperad, dec: WDecomposition) -> WPoint:
    if not dec.components:
        return w_unit(op)
    index_of = {path: k for k, path in enumerate(dec.skeleton.vertex_ids())}

    def assemble(path) -> tuple[WPoint, tuple[int, ...]]:
        vertex = dec.skeleton.node_at(path)
        assert isinstance(vertex, Vertex)
        value = dec.components[index_of[path]]
        parts: list[tuple[int, ...]] = []
        for position in range(len(vertex.children), 0, -1):
            child = vertex.children[position - 1]
            if isinstance(child, Leaf):
                parts.append((child.number,))
            else:
                sub_value, sub_word = assemble(path + (position - 1,))
                value = w_compose(value, position, sub_value)
                parts.append(sub_word)
        word: list[int] = []
        for part in reversed(parts):
            word.extend(part)
        return value, tuple(word)

    value, word = assemble(())
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word), tuple(position_of[j] for j in range(1, len(word) + 1)))
    return w_lambda(sigma, value)


def eval_truncated_operad_map(
    assign: Callable[[WPoint], Hashable],
    level: int,
    a: WPoint,
    target: EffectiveOperad,
    order: Optional[list[int]] = None,
):
    """Evaluate a map defined on pieces of at most `level` inputs.

    assign sends each prime component to a target element of the same
    arity. The composite is assembled by contracting the skeleton's inner
    edges one at a time; `order` (a permutation of range(#edges)) picks the
    contraction order, and the result must not depend on it.
    """
    dec = w_prime_decompose(a)
    if dec.filtration_level > level:
        raise DomainError(
            f"point at filtration level {dec.filtration_level} exceeds {level}")
    if not dec.components:
        return target.unit()

    paths = dec.skeleton.vertex_ids()
    index_of = {path: k for k, path in enumerate(paths)}
    values: list = []
    exits: list[list] = []
    for path in paths:
        piece = dec.components[index_of[path]]
        value = assign(piece)
        if target.arity_of(value) != piece.arity:
            raise DomainError("assigned value has the wrong arity")
        values.append(value)
        vertex = dec.skeleton.node_at(path)
        assert isinstance(vertex, Vertex)
        row: list = []
        for position, child in enumerate(vertex.children):
            if isinstance(child, Leaf):
                row.append(("leaf", child.number))
            else:
                row.append(("piece", index_of[path + (position,)]))
        exits.append(row)

    edges = [(index_of[path[:-1]], index_of[path]) for path in paths if path]
    if order is None:
        order = list(range(len(edges)))
    if sorted(order) != list(range(len(edges))):
        raise DomainError("order must be a permutation of the edge indices")

    owner = list(range(len(paths)))

    def find(k: int) -> int:
        while owner[k] != k:
            owner[k] = owner[owner[k]]
            k = owner[k]
        return k

    for edge_index in order:
        parent, child = edges[edge_index]
        parent = find(parent)
        position = exits[parent].index(("piece", child)) + 1
        values[parent] = target.compose(values[parent], position, values[child])
        exits[parent][position - 1: position] = exits[child]
        owner[child] = parent

    root = find(0)
    word = tuple(number for kind, number in exits[root])
    assert all(kind == "leaf" for kind, _ in exits[root])
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word), tuple(position_of[j] for j in range(1, len(word) + 1)))
    return target.restrict(sigma, values[root])


# ---------------------------------------------------------------------------
# the resolution as an operad in its own right
# ---------------------------------------------------------------------------

class WOperad(EffectiveOperad):
    """Points of the resolution over a base operad, as an operad."""

    def __init__(self, base: EffectiveOperad) -> None:
        self.base = base
        self.name = f"w({base.name})"

    def arity_of(self, x: WPoint) -> int:
        return x.arity

    def validate(self, x) -> None:
        if not isinstance(x, WPoint) or x.operad != self.base:
            raise DomainError(f"expected a point over {self.base.name}")
        renormalized = wpoint(self.base, x.root)
        if renormalized.root != x.root:
            raise DomainError("point is not in normal form")

    def unit(self) -> WPoint:
        return w_unit(self.base)

    def compose(self, x: WPoint, i: int, y: WPoint) -> WPoint:
        return w_compose(x, i, y)

    def restrict(self, u: InjectiveMap, x: WPoint) -> WPoint:
        return w_lambda(u, x)

    def key(self, x: WPoint) -> Hashable:
        return (self.name, x.root)

    def format_element(self, x: WPoint) -> str:
        return w_text(x)

    def parse_element(self, text: str) -> WPoint:
        from .serialize import parse_w_text
        return parse_w_text(self.base, text)

    def sample(self, rng, n: int) -> WPoint:
        from .sampling import random_wpoint
        return random_wpoint(rng, self.base, n)
