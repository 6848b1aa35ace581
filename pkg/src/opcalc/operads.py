"""Reduced operads with exact elements: the interface and concrete instances.

Elements are immutable values built from integers, strings and
fractions.Fraction, so every operation here is exact; nothing is sampled
from the reals and nothing is compared with a tolerance.

An operad in this module is a symmetric sequence with restrictions along
arbitrary injections of finite sets (relabelling for bijections, forgetting
inputs for the rest), slotwise composition, and a unit of arity one.
Conventions shared by every instance:

  * restrict(u, x) for u: [m] -> [n] satisfies (u* x)_j = x_{u(j)} whenever
    elements are families indexed by labels; permutations therefore act on
    the right.
  * compose(x, i, y) renumbers labels the standard way: labels of x below i
    are kept, labels of y move to the block i..i+m-1, labels of x above i
    shift up by m - 1.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Union

from .trees import DomainError, InjectiveMap


def format_fraction(q: Fraction) -> str:
    """Always with an explicit denominator, e.g. 0/1, 3/1, -1/2."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    if "/" not in text:
        raise DomainError(f"expected p/q, got {text!r}")
    num, _, den = text.partition("/")
    try:
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad fraction {text!r}") from exc


class EffectiveOperad(ABC):
    """A reduced operad whose elements can be computed with exactly."""

    name: str

    # -- structure ----------------------------------------------------------

    @abstractmethod
    def arity_of(self, x) -> int: ...

    @abstractmethod
    def validate(self, x) -> None:
        """Raise DomainError if x is not an element."""

    @abstractmethod
    def unit(self): ...

    @abstractmethod
    def compose(self, x, i: int, y): ...

    @abstractmethod
    def restrict(self, u: InjectiveMap, x):
        """Pull back along an injection u: [m] -> [n], arity_of(x) == n."""

    # -- identity of elements -----------------------------------------------

    @abstractmethod
    def key(self, x) -> Hashable:
        """A hashable canonical form; two elements are equal iff keys agree."""

    def eq(self, x, y) -> bool:
        return self.key(x) == self.key(y)

    def is_unit(self, x) -> bool:
        return self.arity_of(x) == 1 and self.eq(x, self.unit())

    # -- io -------------------------------------------------------------------

    @abstractmethod
    def format_element(self, x) -> str: ...

    @abstractmethod
    def parse_element(self, text: str): ...

    def to_jsonable(self, x):
        return self.format_element(x)

    def from_jsonable(self, data):
        if not isinstance(data, str):
            raise DomainError(f"expected a formatted element string, got {data!r}")
        return self.parse_element(data)

    # -- sampling -------------------------------------------------------------

    @abstractmethod
    def sample(self, rng, n: int):
        """A pseudorandom element of arity n, exact and deterministic in rng."""

    # -- plumbing ---------------------------------------------------------------

    def _check_slot(self, x, i: int) -> None:
        n = self.arity_of(x)
        if not 1 <= i <= n:
            raise DomainError(f"slot {i} out of range 1..{n}")

    def _check_restrict(self, u: InjectiveMap, x) -> None:
        if u.n != self.arity_of(x):
            raise DomainError(f"injection into [{u.n}] against arity {self.arity_of(x)}")
        if u.m == 0:
            raise DomainError("a restriction must keep at least one input")

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.name == getattr(other, "name", None)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.name))

    def __repr__(self) -> str:
        return f"<operad {self.name}>"


# ---------------------------------------------------------------------------
# Little intervals
# ---------------------------------------------------------------------------

Interval = tuple[Fraction, Fraction]


class LittleIntervals(EffectiveOperad):
    """Configurations of labelled subintervals of [0,1] with disjoint
    interiors; touching endpoints are allowed. Element: tuple of (a, b)
    pairs, entry j being the interval labelled j+1."""

    def __init__(self) -> None:
        self.name = "intervals"

    def arity_of(self, x) -> int:
        return len(x)

    def validate(self, x) -> None:
        if not isinstance(x, tuple) or not x:
            raise DomainError(f"expected a nonempty tuple of intervals, got {x!r}")
        for pair in x:
            if not (isinstance(pair, tuple) and len(pair) == 2):
                raise DomainError(f"bad interval {pair!r}")
            a, b = pair
            if not (isinstance(a, Fraction) and isinstance(b, Fraction)):
                raise DomainError(f"interval endpoints must be Fractions, got {pair!r}")
            if not (0 <= a < b <= 1):
                raise DomainError(f"interval {pair!r} not inside [0,1]")
        by_left = sorted(x)
        for (a0, b0), (a1, b1) in zip(by_left, by_left[1:]):
            if b0 > a1:
                raise DomainError(f"intervals {(a0, b0)} and {(a1, b1)} overlap")

    def unit(self):
        return ((Fraction(0), Fraction(1)),)

    def compose(self, x, i: int, y):
        self._check_slot(x, i)
        a, b = x[i - 1]
        w = b - a
        block = tuple((a + w * c, a + w * d) for (c, d) in y)
        return x[: i - 1] + block + x[i:]

    def restrict(self, u: InjectiveMap, x):
        self._check_restrict(u, x)
        return tuple(x[u(j) - 1] for j in range(1, u.m + 1))

    def key(self, x) -> Hashable:
        return x

    def format_element(self, x) -> str:
        return "<" + " ".join(f"[{format_fraction(a)},{format_fraction(b)}]" for a, b in x) + ">"

    def parse_element(self, text: str):
        body = text.strip()
        if not (body.startswith("<") and body.endswith(">")):
            raise DomainError(f"expected <...>, got {text!r}")
        out = []
        for chunk in body[1:-1].split():
            if not (chunk.startswith("[") and chunk.endswith("]")):
                raise DomainError(f"bad interval token {chunk!r}")
            a, _, b = chunk[1:-1].partition(",")
            out.append((parse_fraction(a), parse_fraction(b)))
        x = tuple(out)
        self.validate(x)
        return x

    def sample(self, rng, n: int):
        if n < 1:
            raise DomainError("arity must be at least 1")
        lengths = [rng.randint(1, 6) for _ in range(n)]
        gaps = [rng.randint(0, 4) for _ in range(n + 1)]
        total = sum(lengths) + sum(gaps)
        pos = Fraction(gaps[0], total)
        placed = []
        for k in range(n):
            a = pos
            b = a + Fraction(lengths[k], total)
            placed.append((a, b))
            pos = b + Fraction(gaps[k + 1], total)
        order = list(range(n))
        rng.shuffle(order)
        return tuple(placed[order[j]] for j in range(n))


# ---------------------------------------------------------------------------
# Little balls in dimension m
# ---------------------------------------------------------------------------

Ball = tuple[tuple[Fraction, ...], Fraction]


def _vsub(c: tuple[Fraction, ...], d: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    return tuple(a - b for a, b in zip(c, d))


def _norm2(c: tuple[Fraction, ...]) -> Fraction:
    return sum((t * t for t in c), Fraction(0))


class LittleDiscs(EffectiveOperad):
    """Labelled round balls inside the unit ball of R^m, with disjoint
    interiors (touching allowed). Element: tuple of (center, radius)."""

    def __init__(self, dim: int) -> None:
        if dim < 1:
            raise DomainError("dimension must be at least 1")
        self.dim = dim
        self.name = f"discs{dim}"

    def arity_of(self, x) -> int:
        return len(x)

    def validate(self, x) -> None:
        if not isinstance(x, tuple) or not x:
            raise DomainError(f"expected a nonempty tuple of balls, got {x!r}")
        for ball in x:
            if not (isinstance(ball, tuple) and len(ball) == 2):
                raise DomainError(f"bad ball {ball!r}")
            c, r = ball
            if not (isinstance(c, tuple) and len(c) == self.dim
                    and all(isinstance(t, Fraction) for t in c)
                    and isinstance(r, Fraction)):
                raise DomainError(f"bad ball {ball!r}")
            if r <= 0:
                raise DomainError(f"radius must be positive, got {r}")
            if _norm2(c) > (1 - r) * (1 - r):
                raise DomainError(f"ball {ball!r} leaves the unit ball")
        for (c0, r0), (c1, r1) in itertools.combinations(x, 2):
            if _norm2(_vsub(c0, c1)) < (r0 + r1) * (r0 + r1):
                raise DomainError(f"balls {(c0, r0)} and {(c1, r1)} overlap")

    def unit(self):
        return ((tuple(Fraction(0) for _ in range(self.dim)), Fraction(1)),)

    def compose(self, x, i: int, y):
        self._check_slot(x, i)
        c, r = x[i - 1]
        block = tuple(
            (tuple(ck + r * dk for ck, dk in zip(c, d)), r * s) for (d, s) in y)
        return x[: i - 1] + block + x[i:]

    def restrict(self, u: InjectiveMap, x):
        self._check_restrict(u, x)
        return tuple(x[u(j) - 1] for j in range(1, u.m + 1))

    def key(self, x) -> Hashable:
        return x

    def format_element(self, x) -> str:
        parts = []
        for c, r in x:
            center = ",".join(format_fraction(t) for t in c)
            parts.append(f"ball(({center});{format_fraction(r)})")
        return "<" + " ".join(parts) + ">"

    def parse_element(self, text: str):
        body = text.strip()
        if not (body.startswith("<") and body.endswith(">")):
            raise DomainError(f"expected <...>, got {text!r}")
        out = []
        for chunk in body[1:-1].split():
            if not (chunk.startswith("ball((") and chunk.endswith(")")):
                raise DomainError(f"bad ball token {chunk!r}")
            inner = chunk[len("ball(("):-1]
            center_text, _, radius_text = inner.partition(");")
            center = tuple(parse_fraction(t) for t in center_text.split(","))
            out.append((center, parse_fraction(radius_text)))
        x = tuple(out)
        self.validate(x)
        return x

    def sample(self, rng, n: int):
        if n < 1:
            raise DomainError("arity must be at least 1")
        # distinct grid points scaled to sit well inside the unit ball;
        # separation on the grid then dominates the tiny radii
        scale = Fraction(7, 10) if self.dim <= 2 else Fraction(1, 2)
        grid = rng.randint(3, 6)
        points: set[tuple[int, ...]] = set()
        while len(points) < n:
            points.add(tuple(rng.randint(-grid, grid) for _ in range(self.dim)))
        radius_pool = (Fraction(1, 100), Fraction(1, 128), Fraction(1, 200))
        placed = [
            (tuple(scale * Fraction(t, grid) for t in p), rng.choice(radius_pool))
            for p in sorted(points)
        ]
        rng.shuffle(placed)
        x = tuple(placed)
        self.validate(x)
        return x


# ---------------------------------------------------------------------------
# The associative operad, as labelled words
# ---------------------------------------------------------------------------

class Associative(EffectiveOperad):
    """Arity n is the set of words listing 1..n once each; composition is
    block substitution and restriction deletes letters."""

    def __init__(self) -> None:
        self.name = "assoc"

    def arity_of(self, x) -> int:
        return len(x)

    def validate(self, x) -> None:
        if not isinstance(x, tuple) or sorted(x) != list(range(1, len(x) + 1)) or not x:
            raise DomainError(f"expected a word listing 1..n, got {x!r}")

    def unit(self):
        return (1,)

    def compose(self, x, i: int, y):
        self._check_slot(x, i)
        m = len(y)
        out: list[int] = []
        for letter in x:
            if letter == i:
                out.extend(i + g - 1 for g in y)
            elif letter < i:
                out.append(letter)
            else:
                out.append(letter + m - 1)
        return tuple(out)

    def restrict(self, u: InjectiveMap, x):
        self._check_restrict(u, x)
        relabel = {u(j): j for j in range(1, u.m + 1)}
        return tuple(relabel[letter] for letter in x if letter in relabel)

    def key(self, x) -> Hashable:
        return x

    def format_element(self, x) -> str:
        return "word(" + " ".join(str(t) for t in x) + ")"

    def parse_element(self, text: str):
        body = text.strip()
        if not (body.startswith("word(") and body.endswith(")")):
            raise DomainError(f"expected word(...), got {text!r}")
        x = tuple(int(t) for t in body[len("word("):-1].split())
        self.validate(x)
        return x

    def sample(self, rng, n: int):
        word = list(range(1, n + 1))
        rng.shuffle(word)
        return tuple(word)


# ---------------------------------------------------------------------------
# Framed variants: a finite group twisting each input
# ---------------------------------------------------------------------------

class FiniteGroup:
    """A small group given by its elements and multiplication rule; the
    identity and inverses are found by search and the axioms are checked."""

    def __init__(self, name: str, elements: Iterable[Hashable], mul: Callable) -> None:
        self.name = name
        self.elements = tuple(elements)
        self._mul = mul
        table = {(g, h): mul(g, h) for g in self.elements for h in self.elements}
        if any(v not in self.elements for v in table.values()):
            raise DomainError("multiplication leaves the element set")
        ident = [e for e in self.elements
                 if all(table[(e, g)] == g and table[(g, e)] == g for g in self.elements)]
        if len(ident) != 1:
            raise DomainError("no unique identity")
        self.identity = ident[0]
        self._inv = {}
        for g in self.elements:
            invs = [h for h in self.elements if table[(g, h)] == self.identity]
            if len(invs) != 1 or table[(invs[0], g)] != self.identity:
                raise DomainError(f"element {g!r} has no unique inverse")
            self._inv[g] = invs[0]
        for a in self.elements:
            for b in self.elements:
                for c in self.elements:
                    if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
                        raise DomainError("multiplication is not associative")

    def mul(self, g, h):
        return self._mul(g, h)

    def inverse(self, g):
        return self._inv[g]

    def __repr__(self) -> str:
        return f"<group {self.name}>"


def z2() -> FiniteGroup:
    return FiniteGroup("Z2", ("e", "r"), lambda g, h: "e" if g == h else "r")


def reflect_intervals(x):
    """The ambient reflection t -> 1 - t applied to every interval."""
    return tuple((1 - b, 1 - a) for (a, b) in x)


def z2_interval_action(g, x):
    return x if g == "e" else reflect_intervals(x)


@dataclass(frozen=True)
class FramedElement:
    point: Hashable
    frames: tuple


class FramedOperad(EffectiveOperad):
    """Attach a group element to each input of a base operad.

    The group must act on base elements aritywise, compatibly with
    composition, restriction and the unit; composition twists the grafted
    factor by the frame sitting at the slot and multiplies frames through.
    """

    def __init__(self, base: EffectiveOperad, group: FiniteGroup, act: Callable) -> None:
        self.base = base
        self.group = group
        self.act = act
        self.name = f"framed({base.name},{group.name})"

    def arity_of(self, x) -> int:
        return self.base.arity_of(x.point)

    def validate(self, x) -> None:
        if not isinstance(x, FramedElement):
            raise DomainError(f"expected a FramedElement, got {x!r}")
        self.base.validate(x.point)
        if len(x.frames) != self.base.arity_of(x.point):
            raise DomainError("one frame per input is required")
        for g in x.frames:
            if g not in self.group.elements:
                raise DomainError(f"frame {g!r} is not in {self.group.name}")

    def unit(self):
        return FramedElement(self.base.unit(), (self.group.identity,))

    def compose(self, x, i: int, y):
        self._check_slot(x, i)
        gi = x.frames[i - 1]
        point = self.base.compose(x.point, i, self.act(gi, y.point))
        frames = (x.frames[: i - 1]
                  + tuple(self.group.mul(gi, h) for h in y.frames)
                  + x.frames[i:])
        return FramedElement(point, frames)

    def restrict(self, u: InjectiveMap, x):
        self._check_restrict(u, x)
        return FramedElement(
            self.base.restrict(u, x.point),
            tuple(x.frames[u(j) - 1] for j in range(1, u.m + 1)))

    def key(self, x) -> Hashable:
        return (self.base.key(x.point), x.frames)

    def format_element(self, x) -> str:
        frames = " ".join(str(g) for g in x.frames)
        return f"({self.base.format_element(x.point)} ; {frames})"

    def parse_element(self, text: str):
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise DomainError(f"expected (... ; frames), got {text!r}")
        point_text, sep, frame_text = body[1:-1].rpartition(";")
        if not sep:
            raise DomainError(f"expected (... ; frames), got {text!r}")
        point = self.base.parse_element(point_text.strip())
        frames = tuple(frame_text.split())
        x = FramedElement(point, frames)
        self.validate(x)
        return x

    def sample(self, rng, n: int):
        return FramedElement(
            self.base.sample(rng, n),
            tuple(rng.choice(self.group.elements) for _ in range(n)))


def framed_intervals() -> FramedOperad:
    return FramedOperad(LittleIntervals(), z2(), z2_interval_action)


# ---------------------------------------------------------------------------
# A free recording operad on named atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FLeaf:
    number: int

    def __repr__(self) -> str:
        return f"FLeaf({self.number})"


@dataclass(frozen=True)
class FNode:
    name: str
    payload: Hashable
    children: tuple


FExpr = Union[FLeaf, FNode]


def _fexpr_leaves(e: FExpr, out: list[int]) -> None:
    if isinstance(e, FLeaf):
        out.append(e.number)
    else:
        for c in e.children:
            _fexpr_leaves(c, out)


def _fexpr_map_leaves(e: FExpr, f: Callable[[int], FExpr]) -> FExpr:
    if isinstance(e, FLeaf):
        return f(e.number)
    return FNode(e.name, e.payload, tuple(_fexpr_map_leaves(c, f) for c in e.children))


class FormalOperad(EffectiveOperad):
    """The free operad on named atoms, used as a recording target.

    Elements are expression trees whose leaves are numbered bijectively;
    composition grafts, the bare leaf is the unit, and bijections act by
    renumbering leaves. Restriction along a non-bijective injection deletes
    leaves and tags the surviving atoms with the slots they kept. The
    tagging makes deletions land in fresh atoms, so this instance is a
    recording device rather than a lawful symmetric sequence: it is kept
    out of the randomized law suites on purpose.
    """

    def __init__(self, name: str = "formal") -> None:
        self.name = name

    def atom(self, name: str, arity: int, payload: Hashable = None) -> FExpr:
        if arity < 1:
            raise DomainError("atoms need arity at least 1")
        return FNode(name, payload, tuple(FLeaf(k) for k in range(1, arity + 1)))

    def arity_of(self, x) -> int:
        out: list[int] = []
        _fexpr_leaves(x, out)
        return len(out)

    def validate(self, x) -> None:
        if not isinstance(x, (FLeaf, FNode)):
            raise DomainError(f"expected an expression, got {x!r}")
        out: list[int] = []
        _fexpr_leaves(x, out)
        if sorted(out) != list(range(1, len(out) + 1)):
            raise DomainError(f"leaf numbers {out} are not a bijection onto 1..{len(out)}")

        def walk(e: FExpr) -> None:
            if isinstance(e, FNode):
                if not e.children:
                    raise DomainError("expression nodes need children")
                for c in e.children:
                    walk(c)

        walk(x)

    def unit(self):
        return FLeaf(1)

    def compose(self, x, i: int, y):
        self._check_slot(x, i)
        m = self.arity_of(y)
        shifted = _fexpr_map_leaves(y, lambda k: FLeaf(i + k - 1))

        def place(number: int) -> FExpr:
            if number == i:
                return shifted
            return FLeaf(number if number < i else number + m - 1)

        return _fexpr_map_leaves(x, place)

    def restrict(self, u: InjectiveMap, x):
        self._check_restrict(u, x)
        if u.is_permutation:
            inv = u.inverse()
            return _fexpr_map_leaves(x, lambda k: FLeaf(inv(k)))
        if u.m == 0:
            raise DomainError("cannot delete every leaf")
        renumber = {u(j): j for j in range(1, u.m + 1)}

        def walk(e: FExpr) -> FExpr | None:
            if isinstance(e, FLeaf):
                j = renumber.get(e.number)
                return None if j is None else FLeaf(j)
            survivors = []
            slots = []
            for idx, c in enumerate(e.children):
                kept = walk(c)
                if kept is not None:
                    survivors.append(kept)
                    slots.append(idx + 1)
            if not survivors:
                return None
            if len(slots) == len(e.children):
                return FNode(e.name, e.payload, tuple(survivors))
            return FNode(e.name, ("restricted", tuple(slots), e.payload), tuple(survivors))

        out = walk(x)
        assert out is not None
        return out

    def key(self, x) -> Hashable:
        return x

    def format_element(self, x) -> str:
        def fmt(e: FExpr) -> str:
            if isinstance(e, FLeaf):
                return f"L{e.number}"
            head = e.name
            if e.payload is not None:
                text = e.payload if isinstance(e.payload, str) else repr(e.payload)
                quoted = text.replace("\\", "\\\\").replace('"', '\\"')
                head = f'{e.name}#"{quoted}"'
            return "(" + " ".join([head] + [fmt(c) for c in e.children]) + ")"

        return fmt(x)

    def parse_element(self, text: str):
        tokens = self._tokenize(text)
        expr, rest = self._parse_expr(tokens)
        if rest:
            raise DomainError(f"trailing tokens {rest!r}")
        self.validate(expr)
        return expr

    @staticmethod
    def _tokenize(text: str) -> list[str]:
        out: list[str] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "()":
                out.append(ch)
                i += 1
            else:
                j = i
                buf = []
                in_quote = False
                while j < len(text):
                    c = text[j]
                    if in_quote:
                        if c == "\\":
                            buf.append(text[j + 1])
                            j += 2
                            continue
                        buf.append(c)
                        if c == '"':
                            in_quote = False
                        j += 1
                    elif c == '"':
                        in_quote = True
                        buf.append(c)
                        j += 1
                    elif c.isspace() or c in "()":
                        break
                    else:
                        buf.append(c)
                        j += 1
                out.append("".join(buf))
                i = j
        return out

    def _parse_expr(self, tokens: list[str]):
        if not tokens:
            raise DomainError("unexpected end of expression")
        tok, rest = tokens[0], tokens[1:]
        if tok == "(":
            if not rest:
                raise DomainError("unexpected end of expression")
            head, rest = rest[0], rest[1:]
            if "#" in head:
                name, _, quoted = head.partition("#")
                if not (quoted.startswith('"') and quoted.endswith('"')):
                    raise DomainError(f"bad payload in {head!r}")
                payload: Hashable = quoted[1:-1]
            else:
                name, payload = head, None
            children = []
            while rest and rest[0] != ")":
                child, rest = self._parse_expr(rest)
                children.append(child)
            if not rest:
                raise DomainError("missing )")
            return FNode(name, payload, tuple(children)), rest[1:]
        if tok.startswith("L"):
            return FLeaf(int(tok[1:])), rest
        raise DomainError(f"bad token {tok!r}")

    def sample(self, rng, n: int):
        raise DomainError("the recording operad has no sampler")


def eval_formal(expr: FExpr, target: EffectiveOperad, atom_eval: Callable) -> Hashable:
    """Evaluate an expression in a target operad.

    atom_eval(name, payload, arity) supplies the value of each atom. The
    composite is assembled positionally (descending slot order keeps the
    earlier positions stable) and relabelled once at the end so that leaf
    numbers become input labels.
    """
    def positional(e: FExpr) -> tuple[Hashable, tuple[int, ...]]:
        if isinstance(e, FLeaf):
            return target.unit(), (e.number,)
        k = len(e.children)
        value = atom_eval(e.name, e.payload, k)
        if target.arity_of(value) != k:
            raise DomainError(f"atom {e.name!r} evaluated to the wrong arity")
        parts = [positional(c) for c in e.children]
        for s in range(k, 0, -1):
            value = target.compose(value, s, parts[s - 1][0])
        word: list[int] = []
        for _, child_word in parts:
            word.extend(child_word)
        return value, tuple(word)

    value, word = positional(expr)
    n = len(word)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(n, n, tuple(position_of[j] for j in range(1, n + 1)))
    return target.restrict(sigma, value)


# ---------------------------------------------------------------------------
# Finite pointed sets, power sequences, matching families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointedSet:
    name: str
    elements: tuple
    basepoint: Hashable

    def __post_init__(self) -> None:
        if self.basepoint not in self.elements:
            raise DomainError("basepoint must be an element")
        if len(set(self.elements)) != len(self.elements):
            raise DomainError("elements must be distinct")


class PowerSequence:
    """Levels X^n, restriction along u picking out coordinates u(1)..u(m)."""

    def __init__(self, space: PointedSet) -> None:
        self.space = space
        self.name = f"power({space.name})"

    def elements(self, n: int) -> Iterator[tuple]:
        return itertools.product(self.space.elements, repeat=n)

    def restrict(self, u: InjectiveMap, xs: tuple) -> tuple:
        if u.n != len(xs):
            raise DomainError(f"injection into [{u.n}] against a tuple of length {len(xs)}")
        return tuple(xs[u(j) - 1] for j in range(1, u.m + 1))


class ProductSequence:
    """Levels Y(n) x X^n for an operad Y, restricted componentwise."""

    def __init__(self, base: EffectiveOperad, space: PointedSet) -> None:
        self.base = base
        self.space = space
        self.name = f"product({base.name},{space.name})"

    def restrict(self, u: InjectiveMap, pair):
        y, xs = pair
        return (self.base.restrict(u, y),
                tuple(xs[u(j) - 1] for j in range(1, u.m + 1)))


def proper_face_maps(n: int) -> list[InjectiveMap]:
    """All order-preserving injections [m] -> [n] with m < n."""
    out = []
    for m in range(n - 1, -1, -1):
        out.extend(InjectiveMap.all_order_preserving(m, n))
    return out


@dataclass(frozen=True)
class MatchingFamily:
    """A compatible choice of an element below every proper face of level n.

    Keys are the value tuples of proper order-preserving injections into
    [n]; compatibility means the assignment intertwines restriction."""

    n: int
    assignments: Mapping[tuple[int, ...], Hashable]


def induced_matching_family(seq, n: int, z) -> MatchingFamily:
    return MatchingFamily(
        n, {u.values: seq.restrict(u, z) for u in proper_face_maps(n)})


def _factor_through(u: InjectiveMap, w: InjectiveMap) -> InjectiveMap | None:
    """The order-preserving v with u = w . v, if the image of u sits inside
    the image of w."""
    position = {w(j): j for j in range(1, w.m + 1)}
    values = []
    for j in range(1, u.m + 1):
        p = position.get(u(j))
        if p is None:
            return None
        values.append(p)
    return InjectiveMap(u.m, w.m, tuple(values))


def is_matching_compatible(seq, fam: MatchingFamily) -> bool:
    faces = proper_face_maps(fam.n)
    if set(fam.assignments) != {u.values for u in faces}:
        return False
    for u in faces:
        for v in proper_face_maps(u.m):
            if fam.assignments[u.after(v).values] != seq.restrict(v, fam.assignments[u.values]):
                return False
    return True


def enumerate_matching_families(seq, n: int) -> list[MatchingFamily]:
    """All matching families at level n, by backtracking over the top faces.

    The codimension-one faces determine everything below by factorization,
    so the search assigns those first, pruning on pairwise overlaps, and
    then checks that the forced lower values are consistent.
    """
    top = list(InjectiveMap.all_order_preserving(n - 1, n))
    lower = [u for u in proper_face_maps(n) if u.m < n - 1]
    families: list[MatchingFamily] = []

    def overlaps_ok(chosen: dict) -> bool:
        picked = [u for u in top if u.values in chosen]
        for a, b in itertools.combinations(picked, 2):
            common = sorted(set(a.values) & set(b.values))
            u = InjectiveMap(len(common), n, tuple(common))
            va = _factor_through(u, a)
            vb = _factor_through(u, b)
            if seq.restrict(va, chosen[a.values]) != seq.restrict(vb, chosen[b.values]):
                return False
        return True

    def extend(idx: int, chosen: dict) -> None:
        if idx == len(top):
            assignments = dict(chosen)
            for u in lower:
                forced = None
                for w in top:
                    v = _factor_through(u, w)
                    if v is None:
                        continue
                    value = seq.restrict(v, chosen[w.values])
                    if forced is None:
                        forced = value
                    elif forced != value:
                        return
                assert forced is not None
                assignments[u.values] = forced
            families.append(MatchingFamily(n, assignments))
            return
        u = top[idx]
        for candidate in seq.elements(u.m):
            chosen[u.values] = candidate
            if overlaps_ok(chosen):
                extend(idx + 1, chosen)
            del chosen[u.values]

    if n == 1:
        # only the empty face exists; its level has exactly one element
        only = list(seq.elements(0))
        return [MatchingFamily(1, {(): only[0]})]
    extend(0, {})
    return families
