"""Text, JSON and DOT renderings of resolution points.

The text grammar mirrors what entry_text produces:

    point  := "l1" | node
    node   := "(v" QUOTED-LABEL child* ")"
    child  := "l" INT | "(e" FRACTION node ")"

Labels are the base operad's own element format, quoted with backslash
escapes. Parsing always goes through the normalizing constructors, so a
parsed point compares equal to the point that produced the text.
"""

from __future__ import annotations

from typing import Union

from .bconstruction import BNode, BPoint, bpoint
from .operads import EffectiveOperad, format_fraction, parse_fraction
from .trees import DomainError
from .wconstruction import WEdge, WNode, WPoint, w_text, wpoint

Token = tuple[str, str]


def _tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(("lp" if ch == "(" else "rp", ch))
            i += 1
        elif ch == '"':
            buf = []
            i += 1
            while i < len(text) and text[i] != '"':
                if text[i] == "\\" and i + 1 < len(text):
                    buf.append(text[i + 1])
                    i += 2
                else:
                    buf.append(text[i])
                    i += 1
            if i >= len(text):
                raise DomainError("unterminated quote")
            out.append(("quote", "".join(buf)))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                j += 1
            out.append(("atom", text[i:j]))
            i = j
    return out


class _Reader:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        if self.pos >= len(self.tokens):
            raise DomainError("unexpected end of input")
        return self.tokens[self.pos]

    def take(self, kind: Union[str, None] = None) -> Token:
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise DomainError(f"expected {kind}, got {tok!r}")
        self.pos += 1
        return tok

    def done(self) -> bool:
        return self.pos == len(self.tokens)


def _read_w_node(op: EffectiveOperad, r: _Reader) -> WNode:
    r.take("lp")
    head = r.take("atom")
    if head[1] != "v":
        raise DomainError(f"expected a vertex, got {head[1]!r}")
    label = op.parse_element(r.take("quote")[1])
    children: list = []
    while r.peek()[0] != "rp":
        children.append(_read_w_entry(op, r))
    r.take("rp")
    return WNode(label, tuple(children))


def _read_w_entry(op: EffectiveOperad, r: _Reader):
    tok = r.peek()
    if tok[0] == "atom" and tok[1].startswith("l"):
        r.take()
        try:
            return int(tok[1][1:])
        except ValueError as exc:
            raise DomainError(f"bad leaf token {tok[1]!r}") from exc
    if tok[0] == "lp":
        mark = r.pos
        r.take("lp")
        head = r.take("atom")
        if head[1] == "e":
            length = parse_fraction(r.take("atom")[1])
            node = _read_w_node(op, r)
            r.take("rp")
            return WEdge(length, node)
        r.pos = mark
        return _read_w_node(op, r)
    raise DomainError(f"unexpected token {tok!r}")


def parse_w_text(op: EffectiveOperad, text: str) -> WPoint:
    r = _Reader(_tokenize(text))
    first = r.peek()
    if first[0] == "atom" and first[1] == "l1":
        r.take()
        if not r.done():
            raise DomainError("trailing input after trivial point")
        return wpoint(op, 1)
    entry = _read_w_node(op, r)
    if not r.done():
        raise DomainError("trailing input after point")
    return wpoint(op, entry)


# ----------------------------------------------------------------- JSON

def w_to_jsonable(a: WPoint) -> dict:
    op = a.operad

    def enc(entry):
        if isinstance(entry, int):
            return {"leaf": entry}
        if isinstance(entry, WEdge):
            return {"length": format_fraction(entry.length), "node": enc(entry.node)}
        return {"label": op.to_jsonable(entry.label),
                "children": [enc(c) for c in entry.children]}

    return {"kind": "w", "operad": op.name, "root": enc(a.root)}


def w_from_jsonable(op: EffectiveOperad, data: dict) -> WPoint:
    if not isinstance(data, dict) or data.get("kind") != "w":
        raise DomainError("expected a w point record")
    if data.get("operad") != op.name:
        raise DomainError(f"point is over {data.get('operad')!r}, not {op.name!r}")

    def dec(blob):
        if "leaf" in blob:
            return blob["leaf"]
        if "length" in blob:
            return WEdge(parse_fraction(blob["length"]), dec(blob["node"]))
        return WNode(op.from_jsonable(blob["label"]),
                     tuple(dec(c) for c in blob["children"]))

    return wpoint(op, dec(data["root"]))


# ------------------------------------------------------------------ DOT

def w_dot(a: WPoint) -> str:
    """A graphviz rendering; vertices show their labels, edges their lengths."""
    op = a.operad
    lines = ["digraph point {", '  rankdir=BT;', '  node [fontsize=10];']
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    def emit(entry, parent) -> None:
        if isinstance(entry, int):
            name = fresh("leaf")
            lines.append(f'  {name} [shape=box label="{entry}"];')
            lines.append(f'  {name} -> {parent};')
            return
        node = entry.node if isinstance(entry, WEdge) else entry
        edge_len = entry.length if isinstance(entry, WEdge) else None
        name = fresh("v")
        label = op.format_element(node.label).replace('"', '\\"')
        lines.append(f'  {name} [shape=ellipse label="{label}"];')
        if parent is not None:
            text = "" if edge_len is None else f' [label="{format_fraction(edge_len)}"]'
            lines.append(f'  {name} -> {parent}{text};')
        for child in node.children:
            emit(child, name)

    if isinstance(a.root, int):
        lines.append('  leaf1 [shape=box label="1"];')
    else:
        emit(a.root, None)
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------- height trees (text)
#
#     point  := "l1" | node
#     node   := "(v" ":h=" FRACTION QUOTED-RESOLUTION-POINT child* ")"
#     child  := "l" INT | node
#
# The quoted payload is the resolution point's own text form.

def _read_b_node(op: EffectiveOperad, r: _Reader) -> BNode:
    r.take("lp")
    head = r.take("atom")
    if head[1] != "v":
        raise DomainError(f"expected a vertex, got {head[1]!r}")
    height_tok = r.take("atom")[1]
    if not height_tok.startswith(":h="):
        raise DomainError(f"expected a height, got {height_tok!r}")
    height = parse_fraction(height_tok[3:])
    label = parse_w_text(op, r.take("quote")[1])
    children: list = []
    while r.peek()[0] != "rp":
        tok = r.peek()
        if tok[0] == "atom" and tok[1].startswith("l"):
            r.take()
            try:
                children.append(int(tok[1][1:]))
            except ValueError as exc:
                raise DomainError(f"bad leaf token {tok[1]!r}") from exc
        else:
            children.append(_read_b_node(op, r))
    r.take("rp")
    return BNode(label, height, tuple(children))


def parse_b_text(op: EffectiveOperad, text: str) -> BPoint:
    r = _Reader(_tokenize(text))
    first = r.peek()
    if first[0] == "atom" and first[1] == "l1":
        r.take()
        if not r.done():
            raise DomainError("trailing input after trivial point")
        return bpoint(op, 1)
    entry = _read_b_node(op, r)
    if not r.done():
        raise DomainError("trailing input after point")
    return bpoint(op, entry)


def b_to_jsonable(b: BPoint) -> dict:
    def enc(entry):
        if isinstance(entry, int):
            return {"leaf": entry}
        return {"height": format_fraction(entry.height),
                "label": w_to_jsonable(entry.label),
                "children": [enc(c) for c in entry.children]}

    return {"kind": "b", "operad": b.operad.name, "root": enc(b.root)}


def b_from_jsonable(op: EffectiveOperad, data: dict) -> BPoint:
    if not isinstance(data, dict) or data.get("kind") != "b":
        raise DomainError("expected a height-tree point record")
    if data.get("operad") != op.name:
        raise DomainError(f"point is over {data.get('operad')!r}, not {op.name!r}")

    def dec(blob):
        if "leaf" in blob:
            return blob["leaf"]
        return BNode(w_from_jsonable(op, blob["label"]),
                     parse_fraction(blob["height"]),
                     tuple(dec(c) for c in blob["children"]))

    return bpoint(op, dec(data["root"]))


def b_dot(b: BPoint) -> str:
    """A graphviz rendering; vertices show height over label text."""
    op = b.operad
    lines = ["digraph point {", '  rankdir=BT;', '  node [fontsize=10];']
    counter = [0]

    def fresh(prefix: str) -> str:
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    def emit(entry, parent) -> None:
        if isinstance(entry, int):
            name = fresh("leaf")
            lines.append(f'  {name} [shape=box label="{entry}"];')
            if parent is not None:
                lines.append(f'  {name} -> {parent};')
            return
        name = fresh("v")
        label = w_text(entry.label).replace("\\", "\\\\").replace('"', '\\"')
        height = format_fraction(entry.height)
        lines.append(f'  {name} [shape=ellipse label="h={height}\\n{label}"];')
        if parent is not None:
            lines.append(f'  {name} -> {parent};')
        for child in entry.children:
            emit(child, name)

    emit(b.root, None)
    lines.append("}")
    return "\n".join(lines)
