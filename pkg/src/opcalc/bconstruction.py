"""Trees of resolution points with heights: the bimodule resolution.

A point here is a planar rooted tree whose vertices carry a resolution
point (a WPoint over the base operad) and an exact height in [0,1], with
heights weakly increasing away from the root on raw input. Children sit in
the slots of the vertex label: a label of arity k has leaf numbers 1..k and
leaf j of the label corresponds to child position j.

Normal form, computed by `bpoint`:

  * two adjacent vertices of equal height are contracted, composing their
    labels in the resolution (which inserts the usual inner edge of length
    one between them);
  * a unary vertex labelled by the trivial resolution point is spliced out;
  * every vertex is rotated to its least symmetric-group twist.

Consequently heights strictly increase along edges, at most one vertex has
height 0 (the root), and every vertex of height 1 has only leaves below it.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Optional, Union

from .operads import EffectiveOperad, format_fraction
from .trees import DomainError, InjectiveMap
from .wconstruction import (
    WOperad,
    WPoint,
    w_compose,
    w_lambda,
    w_text,
    w_unit,
    wpoint,
)


@dataclass(frozen=True)
class BNode:
    label: WPoint
    height: Fraction
    children: tuple["BEntry", ...]


BEntry = Union[int, BNode]


@dataclass(frozen=True)
class BPoint:
    """A normal-form point. Build these with bpoint / b_unit / b_corolla."""

    operad: EffectiveOperad
    root: Union[int, BNode]

    @property
    def is_trivial(self) -> bool:
        return isinstance(self.root, int)

    @property
    def arity(self) -> int:
        return len(self.leaf_word)

    @property
    def leaf_word(self) -> tuple[int, ...]:
        out: list[int] = []
        _collect_b_leaves(self.root, out)
        return tuple(out)

    def __repr__(self) -> str:
        return f"BPoint({self.operad.name}: {b_entry_text(self.operad, self.root)})"


def _collect_b_leaves(entry: BEntry, out: list[int]) -> None:
    if isinstance(entry, int):
        out.append(entry)
    else:
        for child in entry.children:
            _collect_b_leaves(child, out)


def b_entry_text(op: EffectiveOperad, entry: BEntry) -> str:
    if isinstance(entry, int):
        return f"l{entry}"
    label = w_text(entry.label).replace("\\", "\\\\").replace('"', '\\"')
    parts = [f'(v :h={format_fraction(entry.height)} "{label}"']
    parts.extend(b_entry_text(op, child) for child in entry.children)
    return " ".join(parts) + ")"


def b_text(b: BPoint) -> str:
    return b_entry_text(b.operad, b.root)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _validate_b_raw(op: EffectiveOperad, entry: BEntry, floor: Fraction) -> BEntry:
    if isinstance(entry, bool) or (isinstance(entry, int) and entry < 1):
        raise DomainError(f"bad leaf number {entry!r}")
    if isinstance(entry, int):
        return entry
    if not isinstance(entry, BNode):
        raise DomainError(f"bad tree entry {entry!r}")
    height = Fraction(entry.height)
    if not 0 <= height <= 1:
        raise DomainError(f"height {entry.height} outside [0,1]")
    if height < floor:
        raise DomainError(f"height {height} below the parent height {floor}")
    if not isinstance(entry.label, WPoint) or entry.label.operad != op:
        raise DomainError(f"label must be a resolution point over {op.name}")
    label = wpoint(op, entry.label.root)
    if label.arity != len(entry.children):
        raise DomainError(
            f"label arity {label.arity} against {len(entry.children)} children")
    return BNode(label, height,
                 tuple(_validate_b_raw(op, c, height) for c in entry.children))


def _reduce_b(op: EffectiveOperad, node: BNode) -> BEntry:
    entries: list[BEntry] = []
    for child in node.children:
        entries.append(child if isinstance(child, int) else _reduce_b(op, child))
    # contract children sharing this vertex's height
    position = 0
    label = node.label
    while position < len(entries):
        entry = entries[position]
        if isinstance(entry, BNode) and entry.height == node.height:
            label = w_compose(label, position + 1, entry.label)
            entries[position: position + 1] = list(entry.children)
        else:
            position += 1
    if len(entries) == 1 and label.is_trivial:
        return entries[0]
    return BNode(label, node.height, tuple(entries))


def _canonical_b(op: EffectiveOperad, node: BNode) -> BNode:
    """Least twist of a vertex: children sorted by their text, ties broken
    by the twisted label's text. Only tie-respecting permutations need the
    label restriction, which keeps the search cheap for distinct children."""
    entries = tuple(
        child if isinstance(child, int) else _canonical_b(op, child)
        for child in node.children)
    k = len(entries)
    if k == 1:
        return BNode(node.label, node.height, entries)
    texts = [b_entry_text(op, e) for e in entries]
    order = sorted(range(k), key=lambda index: texts[index])
    groups: list[list[int]] = []
    for index in order:
        if groups and texts[groups[-1][0]] == texts[index]:
            groups[-1].append(index)
        else:
            groups.append([index])
    best_label: Optional[WPoint] = None
    best_values = None
    best_text = None
    for arrangement in itertools.product(*(itertools.permutations(g) for g in groups)):
        values = tuple(index + 1 for group in arrangement for index in group)
        label = w_lambda(InjectiveMap(k, k, values), node.label)
        text = w_text(label)
        if best_text is None or text < best_text:
            best_label, best_values, best_text = label, values, text
    assert best_label is not None and best_values is not None
    return BNode(best_label, node.height,
                 tuple(entries[v - 1] for v in best_values))


def bpoint(op: EffectiveOperad, root: Union[int, BNode]) -> BPoint:
    """Validate, reduce and canonicalize; the only sanctioned constructor."""
    root = _validate_b_raw(op, root, Fraction(0))
    if isinstance(root, int):
        if root != 1:
            raise DomainError("a bare strand must be numbered 1")
        return BPoint(op, 1)
    word: list[int] = []
    _collect_b_leaves(root, word)
    if sorted(word) != list(range(1, len(word) + 1)):
        raise DomainError(f"leaf numbers {word} are not a bijection onto 1..{len(word)}")
    reduced = _reduce_b(op, root)
    if isinstance(reduced, int):
        return BPoint(op, 1)
    return BPoint(op, _canonical_b(op, reduced))


def b_unit(op: EffectiveOperad) -> BPoint:
    return BPoint(op, 1)


def b_corolla(op: EffectiveOperad, label: WPoint, height) -> BPoint:
    return bpoint(op, BNode(label, Fraction(height), tuple(range(1, label.arity + 1))))


# ---------------------------------------------------------------------------
# structure maps
# ---------------------------------------------------------------------------

def _shift_b_leaves(entry: BEntry, move: Callable[[int], int]) -> BEntry:
    if isinstance(entry, int):
        return move(entry)
    return BNode(entry.label, entry.height,
                 tuple(_shift_b_leaves(c, move) for c in entry.children))


def b_left_act(p: WPoint, bs: tuple[BPoint, ...]) -> BPoint:
    """Put a resolution point at a fresh root of height 0, feeding each of
    its slots one of the given points; leaves are numbered through in
    order."""
    op = p.operad
    if len(bs) != p.arity:
        raise DomainError(f"need {p.arity} points, got {len(bs)}")
    children: list[BEntry] = []
    offset = 0
    for b in bs:
        if b.operad != op:
            raise DomainError("points live over different operads")
        if b.is_trivial:
            children.append(offset + 1)
        else:
            shift = offset
            children.append(_shift_b_leaves(b.root, lambda k, s=shift: k + s))
        offset += b.arity
    return bpoint(op, BNode(p, Fraction(0), tuple(children)))


def b_right_act(b: BPoint, i: int, p: WPoint) -> BPoint:
    """Graft a resolution point as a new vertex of height 1 at leaf i."""
    op = b.operad
    if p.operad != op:
        raise DomainError("points live over different operads")
    n, m = b.arity, p.arity
    if not 1 <= i <= n:
        raise DomainError(f"slot {i} out of range 1..{n}")
    if p.is_trivial:
        return b
    if b.is_trivial:
        return b_corolla(op, p, Fraction(1))
    new_vertex = BNode(p, Fraction(1), tuple(range(i, i + m)))

    def place(entry: BEntry) -> BEntry:
        if isinstance(entry, int):
            if entry == i:
                return new_vertex
            return entry if entry < i else entry + m - 1
        return BNode(entry.label, entry.height, tuple(place(c) for c in entry.children))

    return bpoint(op, place(b.root))


def b_lambda(u: InjectiveMap, b: BPoint) -> BPoint:
    """Restriction along an injection; mirrors the resolution's own rule."""
    if u.n != b.arity:
        raise DomainError(f"injection into [{u.n}] against arity {b.arity}")
    if u.m == 0:
        raise DomainError("a restriction must keep at least one input")
    if b.is_trivial:
        return b
    op = b.operad
    renumber = {u(j): j for j in range(1, u.m + 1)}

    def walk(node: BNode) -> Optional[BNode]:
        entries: list[BEntry] = []
        slots: list[int] = []
        for position, child in enumerate(node.children, start=1):
            if isinstance(child, int):
                j = renumber.get(child)
                if j is not None:
                    entries.append(j)
                    slots.append(position)
            else:
                sub = walk(child)
                if sub is not None:
                    entries.append(sub)
                    slots.append(position)
        if not entries:
            return None
        kept = InjectiveMap(len(slots), len(node.children), tuple(slots))
        return BNode(w_lambda(kept, node.label), node.height, tuple(entries))

    new_root = walk(b.root)
    assert new_root is not None
    return bpoint(op, new_root)


def mu_prime(b: BPoint) -> WPoint:
    """Forget heights and compose every label in the resolution."""
    op = b.operad
    if b.is_trivial:
        return w_unit(op)

    def fold(node: BNode) -> tuple[WPoint, tuple[int, ...]]:
        value = node.label
        parts: list[tuple[int, ...]] = []
        for position in range(len(node.children), 0, -1):
            child = node.children[position - 1]
            if isinstance(child, BNode):
                sub_value, sub_word = fold(child)
                value = w_compose(value, position, sub_value)
                parts.append(sub_word)
            else:
                parts.append((child,))
        word: list[int] = []
        for part in reversed(parts):
            word.extend(part)
        return value, tuple(word)

    value, word = fold(b.root)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word),
                         tuple(position_of[j] for j in range(1, len(word) + 1)))
    return w_lambda(sigma, value)


def b_map_heights(b: BPoint, fn: Callable[[Fraction], Fraction]) -> BPoint:
    """Apply a monotone height transformation and renormalize."""
    if b.is_trivial:
        return b

    def walk(entry: BEntry) -> BEntry:
        if isinstance(entry, int):
            return entry
        return BNode(entry.label, fn(entry.height), tuple(walk(c) for c in entry.children))

    return bpoint(b.operad, walk(b.root))


# ---------------------------------------------------------------------------
# random-order reduction, kept separate as an oracle for confluence tests
# ---------------------------------------------------------------------------

def _b_node_at(root: BNode, path: tuple[int, ...]) -> BNode:
    node = root
    for index in path:
        child = node.children[index]
        assert isinstance(child, BNode)
        node = child
    return node


def _b_with_node(root: BNode, path: tuple[int, ...], new: BEntry) -> BEntry:
    if not path:
        return new
    index = path[0]
    child = root.children[index]
    assert isinstance(child, BNode)
    replaced = _b_with_node(child, path[1:], new)
    children = root.children[:index] + (replaced,) + root.children[index + 1:]
    return BNode(root.label, root.height, children)


def _b_applicable_steps(root: BNode) -> list[tuple]:
    steps: list[tuple] = []

    def walk(node: BNode, path: tuple[int, ...]) -> None:
        if len(node.children) == 1 and node.label.is_trivial:
            steps.append(("splice", path))
        for index, child in enumerate(node.children):
            if isinstance(child, BNode):
                if child.height == node.height:
                    steps.append(("contract", path, index))
                walk(child, path + (index,))

    walk(root, ())
    return steps


def _b_apply_step(root: BNode, step: tuple) -> BEntry:
    if step[0] == "splice":
        _, path = step
        node = _b_node_at(root, path)
        return _b_with_node(root, path, node.children[0])
    _, path, index = step
    node = _b_node_at(root, path)
    child = node.children[index]
    assert isinstance(child, BNode)
    label = w_compose(node.label, index + 1, child.label)
    children = node.children[:index] + child.children + node.children[index + 1:]
    return _b_with_node(root, path, BNode(label, node.height, children))


def b_normalize_random_order(rng, op: EffectiveOperad, root: Union[int, BNode]) -> BPoint:
    """Reduce by applying steps in a random order; agreement with bpoint
    across many draws is the confluence check."""
    root = _validate_b_raw(op, root, Fraction(0))
    while isinstance(root, BNode):
        steps = _b_applicable_steps(root)
        if not steps:
            break
        root = _b_apply_step(root, steps[rng.randrange(len(steps))])
    if isinstance(root, int):
        return BPoint(op, 1)
    return BPoint(op, _canonical_b(op, root))


# ---------------------------------------------------------------------------
# slicing by horizontal cuts
# ---------------------------------------------------------------------------

Cut = tuple[Fraction, bool]   # (height, lower side wins ties)


def layer_of(height: Fraction, cuts: tuple[Cut, ...]) -> int:
    layer = 0
    for cut_height, lower_gets_equal in cuts:
        if height > cut_height or (height == cut_height and not lower_gets_equal):
            layer += 1
    return layer


@dataclass(frozen=True)
class SlicePiece:
    """One layer-homogeneous piece of a sliced point.

    exits has one entry per input of the piece: the original external leaf
    number, or the piece sitting one (or more) layers up."""

    point: BPoint
    layer: int
    exits: tuple


def slice_point(b: BPoint, cuts: tuple[Cut, ...], trivial_chains: bool = True) -> SlicePiece:
    """Slice a point into layers between the given cuts.

    With trivial_chains, every strand crossing a layer without a vertex
    contributes a trivial piece there, so exits always step exactly one
    layer up and external numbers appear only past the top layer. Without
    it, exits jump straight to the next actual piece or external number.
    """
    op = b.operad
    layers = len(cuts) + 1
    for (a, _), (c, _) in zip(cuts, cuts[1:]):
        if a > c:
            raise DomainError("cuts must be listed in increasing order")

    def chain(entry, from_layer: int, to_layer: int):
        """Wrap entry in trivial pieces filling layers from_layer..to_layer-1,
        from the top down."""
        if not trivial_chains:
            return entry
        for layer in range(to_layer - 1, from_layer - 1, -1):
            entry = SlicePiece(b_unit(op), layer, (entry,))
        return entry

    def build(node: BNode) -> SlicePiece:
        layer = layer_of(node.height, cuts)
        exits: list = []

        def local(entry: BEntry) -> BEntry:
            if isinstance(entry, int):
                exits.append(chain(entry, layer + 1, layers))
                return len(exits)
            child_layer = layer_of(entry.height, cuts)
            if child_layer == layer:
                return BNode(entry.label, entry.height,
                             tuple(local(c) for c in entry.children))
            exits.append(chain(build(entry), layer + 1, child_layer))
            return len(exits)

        piece_root = BNode(node.label, node.height,
                           tuple(local(c) for c in node.children))
        return SlicePiece(bpoint(op, piece_root), layer, tuple(exits))

    if b.is_trivial:
        return SlicePiece(b_unit(op), 0, (chain(1, 1, layers),))
    top = build(b.root)
    if top.layer == 0:
        return top
    return SlicePiece(b_unit(op), 0, (chain(top, 1, top.layer),))


# ---------------------------------------------------------------------------
# two-sided prime decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BDecomposition:
    """The canonical two-sided splitting of a point.

    root_label is the label of the height-0 vertex when there is one.
    pieces lists the middle parts in planar order, each with exit records
    ("ext", number) for a bare strand or ("cap", label, numbers) for a
    height-1 vertex; crossing strands appear as trivial pieces. filtration
    is (max piece arity, max vertex count among pieces of that arity)."""

    root_label: Optional[WPoint]
    pieces: tuple[tuple[BPoint, tuple], ...]
    filtration: tuple[int, int]


def _vertex_count(entry: BEntry) -> int:
    if isinstance(entry, int):
        return 0
    return 1 + sum(_vertex_count(c) for c in entry.children)


def b_prime_decompose(b: BPoint) -> BDecomposition:
    cuts = ((Fraction(0), True), (Fraction(1), False))
    bottom = slice_point(b, cuts, trivial_chains=True)

    if bottom.point.is_trivial:
        root_label = None
        middles = bottom.exits
    else:
        node = bottom.point.root
        assert isinstance(node, BNode) and node.height == 0
        assert all(isinstance(c, int) for c in node.children)
        root_label = node.label
        middles = bottom.exits

    pieces: list[tuple[BPoint, tuple]] = []
    for middle in middles:
        assert isinstance(middle, SlicePiece) and middle.layer == 1
        records: list = []
        for exit_entry in middle.exits:
            assert isinstance(exit_entry, SlicePiece) and exit_entry.layer == 2
            if exit_entry.point.is_trivial:
                records.append(("ext", exit_entry.exits[0]))
            else:
                cap = exit_entry.point.root
                assert isinstance(cap, BNode) and cap.height == 1
                assert all(isinstance(c, int) for c in cap.children)
                records.append(("cap", cap.label, tuple(exit_entry.exits)))
        pieces.append((middle.point, tuple(records)))

    level = max(piece.arity for piece, _ in pieces)
    aux = max(_vertex_count(piece.root) for piece, _ in pieces if piece.arity == level)
    return BDecomposition(root_label, tuple(pieces), (level, aux))


# ---------------------------------------------------------------------------
# bimodules over the resolution
# ---------------------------------------------------------------------------

class Bimodule(ABC):
    """A two-sided module over a resolution operad, with restrictions."""

    name: str
    over: EffectiveOperad

    @abstractmethod
    def arity_of(self, x) -> int: ...

    @abstractmethod
    def validate(self, x) -> None: ...

    @abstractmethod
    def unit(self):
        """The distinguished arity-1 element (image of the bare strand)."""

    @abstractmethod
    def left_act(self, p, xs: tuple): ...

    @abstractmethod
    def right_act(self, x, i: int, p): ...

    @abstractmethod
    def restrict(self, u: InjectiveMap, x): ...

    @abstractmethod
    def key(self, x) -> Hashable: ...

    @abstractmethod
    def sample(self, rng, n: int): ...

    def eq(self, x, y) -> bool:
        return self.key(x) == self.key(y)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.name == getattr(other, "name", None)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.name))

    def __repr__(self) -> str:
        return f"<bimodule {self.name}>"


class BBimodule(Bimodule):
    """The height-tree resolution as a bimodule over the resolution operad."""

    def __init__(self, base: EffectiveOperad) -> None:
        self.base = base
        self.over = WOperad(base)
        self.name = f"b({base.name})"

    def arity_of(self, x: BPoint) -> int:
        return x.arity

    def validate(self, x) -> None:
        if not isinstance(x, BPoint) or x.operad != self.base:
            raise DomainError(f"expected a point over {self.base.name}")
        if bpoint(self.base, x.root).root != x.root:
            raise DomainError("point is not in normal form")

    def unit(self) -> BPoint:
        return b_unit(self.base)

    def left_act(self, p: WPoint, xs: tuple) -> BPoint:
        return b_left_act(p, tuple(xs))

    def right_act(self, x: BPoint, i: int, p: WPoint) -> BPoint:
        return b_right_act(x, i, p)

    def restrict(self, u: InjectiveMap, x: BPoint) -> BPoint:
        return b_lambda(u, x)

    def key(self, x: BPoint) -> Hashable:
        return (self.name, x.root)

    def sample(self, rng, n: int) -> BPoint:
        from .sampling import random_bpoint
        return random_bpoint(rng, self.base, n)


class WSelfBimodule(Bimodule):
    """The resolution operad seen as a bimodule over itself."""

    def __init__(self, base: EffectiveOperad) -> None:
        self.base = base
        self.over = WOperad(base)
        self.name = f"wself({base.name})"

    def arity_of(self, x: WPoint) -> int:
        return x.arity

    def validate(self, x) -> None:
        self.over.validate(x)

    def unit(self) -> WPoint:
        return w_unit(self.base)

    def left_act(self, p: WPoint, xs: tuple) -> WPoint:
        if len(xs) != p.arity:
            raise DomainError(f"need {p.arity} points, got {len(xs)}")
        value = p
        for position in range(p.arity, 0, -1):
            value = w_compose(value, position, xs[position - 1])
        return value

    def right_act(self, x: WPoint, i: int, p: WPoint) -> WPoint:
        return w_compose(x, i, p)

    def restrict(self, u: InjectiveMap, x: WPoint) -> WPoint:
        return w_lambda(u, x)

    def key(self, x: WPoint) -> Hashable:
        return (self.name, x.root)

    def sample(self, rng, n: int) -> WPoint:
        from .sampling import random_wpoint
        return random_wpoint(rng, self.base, n)


def eval_truncated_bimodule_map(
    assign: Callable[[BPoint], Hashable],
    level: int,
    b: BPoint,
    target: Bimodule,
    order: Optional[list[int]] = None,
):
    """Evaluate a bimodule map defined on pieces of at most `level` inputs.

    assign sends each middle piece of the two-sided decomposition to a
    target element of the same arity; boundary labels act through the
    target's own actions. `order` permutes the sequence in which the
    height-1 caps are applied, and the result must not depend on it.
    """
    dec = b_prime_decompose(b)
    if dec.filtration[0] > level:
        raise DomainError(
            f"point at filtration level {dec.filtration[0]} exceeds {level}")

    values = []
    rows = []
    caps = []
    for piece_index, (piece, records) in enumerate(dec.pieces):
        value = assign(piece)
        if target.arity_of(value) != piece.arity:
            raise DomainError("assigned value has the wrong arity")
        values.append(value)
        row: list = []
        for record in records:
            if record[0] == "ext":
                row.append(("ext", record[1]))
            else:
                caps.append((piece_index, len(row)))
                row.append(("cap", record[1], record[2], len(caps) - 1))
        rows.append(row)

    if order is None:
        order = list(range(len(caps)))
    if sorted(order) != list(range(len(caps))):
        raise DomainError("order must be a permutation of the cap indices")

    for cap_id in order:
        piece_index, _ = caps[cap_id]
        row = rows[piece_index]
        at = next(k for k, entry in enumerate(row) if entry[0] == "cap" and entry[3] == cap_id)
        _, label, numbers, _ = row[at]
        values[piece_index] = target.right_act(values[piece_index], at + 1, label)
        row[at: at + 1] = [("ext", number) for number in numbers]

    if dec.root_label is not None:
        value = target.left_act(dec.root_label, tuple(values))
    else:
        assert len(values) == 1
        value = values[0]
    word = tuple(number for row in rows for _, number in row)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word),
                         tuple(position_of[j] for j in range(1, len(word) + 1)))
    return target.restrict(sigma, value)
