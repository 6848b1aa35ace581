"""Evaluable operad maps, exact paths of maps, tagged-target bimodules,
and the explicit evaluation and lifting recipes between them.

Everything is exact: maps are evaluators between effective operads, paths
are piecewise descriptions with rational breakpoints evaluated at rational
times, and the finite pointed set of tags is a plain lookup table. The
checking helpers never throw on a failed law; they return a report whose
entries carry a serialized witness for each failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .bconstruction import (
    Bimodule,
    BPoint,
    b_map_heights,
    slice_point,
)
from .operads import EffectiveOperad, LittleDiscs, LittleIntervals, PointedSet, format_fraction
from .sampling import random_fraction, random_injection
from .trees import DomainError, InjectiveMap
from .wconstruction import WOperad, WPoint, mu


class OperadMap:
    """An evaluator between two operads, compared by declaration."""

    def __init__(self, name: str, source: EffectiveOperad, target: EffectiveOperad,
                 fn: Callable) -> None:
        self.name = name
        self.source = source
        self.target = target
        self.fn = fn

    def __call__(self, y):
        return self.fn(y)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OperadMap)
                and (self.name, self.source, self.target)
                == (other.name, other.source, other.target))

    def __hash__(self) -> int:
        return hash((self.name, self.source.name, self.target.name))

    def __repr__(self) -> str:
        return f"<map {self.name}: {self.source.name} -> {self.target.name}>"


def compose_operad_maps(outer: OperadMap, inner: OperadMap) -> OperadMap:
    if inner.target != outer.source:
        raise DomainError(f"cannot compose {outer.name} after {inner.name}")
    return OperadMap(f"{outer.name}.{inner.name}", inner.source, outer.target,
                     lambda y: outer(inner(y)))


class BimoduleMap:
    """An evaluator between two bimodules over the same operad."""

    def __init__(self, name: str, source: Bimodule, target: Bimodule,
                 fn: Callable) -> None:
        if source.over != target.over:
            raise DomainError("bimodules live over different operads")
        self.name = name
        self.source = source
        self.target = target
        self.fn = fn

    def __call__(self, b):
        return self.fn(b)

    def __repr__(self) -> str:
        return f"<bimodule map {self.name}: {self.source.name} -> {self.target.name}>"


# ---------------------------------------------------------------------------
# concrete maps between the interval and disc instances
# ---------------------------------------------------------------------------

def eta_map(d1: LittleIntervals, d2: LittleDiscs) -> OperadMap:
    """Include interval configurations as collinear disc configurations.

    The segment [0,1] sits in the plane disc as the horizontal diameter via
    x -> 2x-1, so [a,b] becomes the ball at (a+b-1, 0) of radius b-a. The
    identification conjugates affine maps, so composition is preserved on
    the nose."""
    if d2.dim != 2:
        raise DomainError("the inclusion lands in the two-dimensional instance")

    def fn(x):
        return tuple(((a + b - 1, Fraction(0)), b - a) for a, b in x)

    return OperadMap("eta", d1, d2, fn)


def rotation_map(d2: LittleDiscs, u: Fraction) -> OperadMap:
    """Rotate every disc center by the exact rotation with half-angle
    parameter u: cos = (1-u^2)/(1+u^2), sin = 2u/(1+u^2)."""
    u = Fraction(u)
    den = 1 + u * u
    cos, sin = (1 - u * u) / den, 2 * u / den

    def fn(x):
        return tuple((((cos * c[0] - sin * c[1]), (sin * c[0] + cos * c[1])), r)
                     for c, r in x)

    return OperadMap(f"rot({format_fraction(u)})", d2, d2, fn)


def mu_map(d1: LittleIntervals) -> OperadMap:
    return OperadMap("mu", WOperad(d1), d1, mu)


def eta_mu_map(d1: LittleIntervals, d2: LittleDiscs) -> OperadMap:
    composite = compose_operad_maps(eta_map(d1, d2), mu_map(d1))
    return OperadMap("eta-mu", composite.source, composite.target, composite.fn)


# ---------------------------------------------------------------------------
# paths of operad maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSegment:
    t0: Fraction
    t1: Fraction
    fn: Callable   # (element, local time in [0,1]) -> target element


class PathOfMaps:
    """A piecewise family of maps over exact time in [0,1].

    Segments cover [0,1] with rational breakpoints; evaluation at a
    breakpoint uses the segment starting there (the last segment owns 1).
    The declared endpoint maps are what the checking suite verifies the
    path against."""

    def __init__(self, name: str, source: EffectiveOperad, target: EffectiveOperad,
                 start: OperadMap, end: OperadMap,
                 segments: Sequence[PathSegment]) -> None:
        self.name = name
        self.source = source
        self.target = target
        self.start = start
        self.end = end
        self.segments = tuple(segments)
        if not self.segments or self.segments[0].t0 != 0 or self.segments[-1].t1 != 1:
            raise DomainError("segments must cover [0,1]")
        for left, right in zip(self.segments, self.segments[1:]):
            if left.t1 != right.t0:
                raise DomainError("segments must be contiguous")
        if any(seg.t0 >= seg.t1 for seg in self.segments):
            raise DomainError("zero-length segments are not allowed")

    def at(self, y, t: Fraction):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise DomainError(f"time {t} outside [0,1]")
        for seg in self.segments:
            if seg.t0 <= t < seg.t1 or (t == 1 and seg.t1 == 1):
                return seg.fn(y, (t - seg.t0) / (seg.t1 - seg.t0))
        raise AssertionError("uncovered time")

    def __repr__(self) -> str:
        return f"<path {self.name}: {self.source.name} -> {self.target.name}>"


def constant_path(f: OperadMap) -> PathOfMaps:
    return PathOfMaps(f"const({f.name})", f.source, f.target, f, f,
                      [PathSegment(Fraction(0), Fraction(1), lambda y, s: f(y))])


def concat_paths(first: PathOfMaps, second: PathOfMaps) -> PathOfMaps:
    if first.source != second.source or first.target != second.target:
        raise DomainError("paths live between different operads")
    segments = [PathSegment(seg.t0 / 2, seg.t1 / 2, seg.fn) for seg in first.segments]
    segments += [PathSegment(Fraction(1, 2) + seg.t0 / 2, Fraction(1, 2) + seg.t1 / 2, seg.fn)
                 for seg in second.segments]
    return PathOfMaps(f"{first.name}*{second.name}", first.source, first.target,
                      first.start, second.end, segments)


def reverse_path(path: PathOfMaps) -> PathOfMaps:
    segments = [PathSegment(1 - seg.t1, 1 - seg.t0,
                            lambda y, s, fn=seg.fn: fn(y, 1 - s))
                for seg in reversed(path.segments)]
    return PathOfMaps(f"rev({path.name})", path.source, path.target,
                      path.end, path.start, segments)


def pl_reparam(path: PathOfMaps, pairs: Sequence[tuple[Fraction, Fraction]]) -> PathOfMaps:
    """Precompose the time coordinate with the piecewise-linear map through
    the given (t, value) pairs; endpoints must be fixed."""
    pairs = [(Fraction(a), Fraction(b)) for a, b in pairs]
    if pairs[0] != (0, 0) or pairs[-1] != (1, 1):
        raise DomainError("a reparametrization must fix the endpoints")
    for (a, _), (c, _) in zip(pairs, pairs[1:]):
        if a >= c:
            raise DomainError("reparametrization times must increase")
    if any(not 0 <= v <= 1 for _, v in pairs):
        raise DomainError("reparametrization values must stay in [0,1]")

    def phi(t: Fraction) -> Fraction:
        for (a, va), (c, vc) in zip(pairs, pairs[1:]):
            if a <= t <= c:
                return va + (t - a) * (vc - va) / (c - a)
        raise AssertionError("uncovered time")

    return PathOfMaps(f"reparam({path.name})", path.source, path.target,
                      path.start, path.end,
                      [PathSegment(Fraction(0), Fraction(1),
                                   lambda y, s: path.at(y, phi(s)))])


# ---------------------------------------------------------------------------
# the pointed tag set and its family of maps
# ---------------------------------------------------------------------------

class PointedMapFamily:
    """A finite pointed set of tags, each naming an operad map; the
    basepoint must name the untwisted inclusion.

    When built from rotation parameters the family also knows a straight
    sweep path from the basepoint map to each tag's map."""

    def __init__(self, space: PointedSet, maps: Mapping, reference: OperadMap,
                 rotations: Optional[Mapping] = None) -> None:
        self.space = space
        self.maps = dict(maps)
        if set(self.maps) != set(space.elements):
            raise DomainError("the family must assign a map to every tag")
        base = self.maps[space.basepoint]
        if base.source != reference.source or base.target != reference.target:
            raise DomainError("the basepoint map has the wrong signature")
        rng = random.Random(20260822)
        for n in (1, 2, 3):
            y = base.source.sample(rng, n)
            if not base.target.eq(base(y), reference(y)):
                raise DomainError("the basepoint must act as the untwisted inclusion")
        self.base_map = base
        self.rotations = dict(rotations) if rotations is not None else None

    def __getitem__(self, x) -> OperadMap:
        if x not in self.maps:
            raise DomainError(f"unknown tag {x!r}")
        return self.maps[x]

    def path_to(self, x) -> PathOfMaps:
        """The straight path from the basepoint map to the tag's map,
        sweeping the rotation parameter linearly."""
        if self.rotations is None:
            raise DomainError("this family carries no rotation parameters")
        u = self.rotations[x]
        base = self.base_map
        d2 = base.target

        def fn(y, s: Fraction):
            return rotation_map(d2, u * s)(base(y))

        return PathOfMaps(f"sweep({x})", base.source, base.target,
                          base, self.maps[x],
                          [PathSegment(Fraction(0), Fraction(1), fn)])


def delta_family(d1: LittleIntervals, d2: LittleDiscs, space: PointedSet,
                 rotations: Mapping) -> PointedMapFamily:
    """Tag each element of the pointed set with the inclusion twisted by an
    exact rotation; the basepoint's parameter must be zero."""
    rotations = {x: Fraction(u) for x, u in rotations.items()}
    if set(rotations) != set(space.elements):
        raise DomainError("need one rotation parameter per tag")
    if rotations[space.basepoint] != 0:
        raise DomainError("the basepoint rotation must be zero")
    base = eta_mu_map(d1, d2)
    maps = {}
    for x, u in rotations.items():
        if u == 0:
            maps[x] = base if x == space.basepoint else OperadMap(
                f"delta[{x}]", base.source, base.target, base.fn)
        else:
            composite = compose_operad_maps(rotation_map(d2, u), base)
            maps[x] = OperadMap(f"delta[{x}]", composite.source, composite.target,
                                composite.fn)
    return PointedMapFamily(space, maps, base, rotations=rotations)


@dataclass(frozen=True)
class HofiberPoint:
    """A tag together with a path from the untwisted inclusion to its map."""
    x: object
    g: PathOfMaps


def sample_hofiber(rng, family: PointedMapFamily) -> HofiberPoint:
    x = rng.choice(family.space.elements)
    path = family.path_to(x)
    if rng.random() < 0.5:
        mid = random_fraction(rng)
        value = random_fraction(rng)
        path = pl_reparam(path, [(Fraction(0), Fraction(0)), (mid, value),
                                 (Fraction(1), Fraction(1))])
    return HofiberPoint(x, path)


def sample_loop(rng, family: PointedMapFamily) -> PathOfMaps:
    """A loop at the untwisted inclusion: out along a tag's sweep, back
    along its reverse, optionally reparametrized."""
    x = rng.choice(family.space.elements)
    out = family.path_to(x)
    loop = concat_paths(out, reverse_path(out))
    if rng.random() < 0.5:
        mid = random_fraction(rng)
        value = random_fraction(rng)
        loop = pl_reparam(loop, [(Fraction(0), Fraction(0)), (mid, value),
                                 (Fraction(1), Fraction(1))])
    return loop


# ---------------------------------------------------------------------------
# piecewise-constant paths in the tag set
# ---------------------------------------------------------------------------

class XPath:
    """A left-closed piecewise-constant path in a finite set: the value on
    [t_i, t_{i+1}) is x_i, and the last segment owns 1."""

    def __init__(self, space: PointedSet, segments: Sequence[tuple[Fraction, object]]) -> None:
        self.space = space
        self.segments = tuple((Fraction(t), x) for t, x in segments)
        if not self.segments or self.segments[0][0] != 0:
            raise DomainError("the first segment must start at 0")
        for (a, _), (c, _) in zip(self.segments, self.segments[1:]):
            if a >= c:
                raise DomainError("segment starts must increase")
        if any(x not in space.elements for _, x in self.segments):
            raise DomainError("segment values must lie in the tag set")
        if self.segments[-1][0] > 1:
            raise DomainError("segments must start within [0,1]")

    def value(self, t: Fraction):
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise DomainError(f"time {t} outside [0,1]")
        current = self.segments[0][1]
        for start, x in self.segments:
            if start <= t:
                current = x
            else:
                break
        return current


def constant_xpath(space: PointedSet, x) -> XPath:
    return XPath(space, [(Fraction(0), x)])


def sample_xpath(rng, space: PointedSet, start) -> XPath:
    segments = [(Fraction(0), start)]
    t = Fraction(0)
    for _ in range(rng.randint(0, 3)):
        t = t + (1 - t) * random_fraction(rng)
        if t >= 1 or t == segments[-1][0]:
            break
        segments.append((t, rng.choice(space.elements)))
    return XPath(space, segments)


# ---------------------------------------------------------------------------
# tagged-target bimodules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QXElem:
    """A target element with one tag per input."""
    q: object
    tags: tuple


class QxBimodule(Bimodule):
    """The target operad as a bimodule over the interval resolution: the
    left action goes through the untwisted inclusion, the right action
    through the fixed tag's map."""

    def __init__(self, family: PointedMapFamily, x) -> None:
        if x not in family.space.elements:
            raise DomainError(f"unknown tag {x!r}")
        self.family = family
        self.x = x
        self.delta = family[x]
        self.base_map = family.base_map
        self.q_operad = family.base_map.target
        self.over = family.base_map.source
        self.name = f"q[{x}]"

    def arity_of(self, q) -> int:
        return self.q_operad.arity_of(q)

    def validate(self, q) -> None:
        self.q_operad.validate(q)

    def unit(self):
        return self.q_operad.unit()

    def left_act(self, p: WPoint, qs: tuple):
        value = self.base_map(p)
        for position in range(len(qs), 0, -1):
            value = self.q_operad.compose(value, position, qs[position - 1])
        return value

    def right_act(self, q, i: int, p: WPoint):
        return self.q_operad.compose(q, i, self.delta(p))

    def restrict(self, u: InjectiveMap, q):
        return self.q_operad.restrict(u, q)

    def key(self, q):
        return (self.name, self.q_operad.key(q))

    def sample(self, rng, n: int):
        return self.q_operad.sample(rng, n)


class QXProductBimodule(Bimodule):
    """Tagged target elements: arity-wise product of the target with powers
    of the tag set; the right action twists through the tag at the slot."""

    def __init__(self, family: PointedMapFamily) -> None:
        self.family = family
        self.space = family.space
        self.q_operad = family.base_map.target
        self.over = family.base_map.source
        self.name = f"q*{family.space.name}"

    def arity_of(self, elem: QXElem) -> int:
        return self.q_operad.arity_of(elem.q)

    def validate(self, elem) -> None:
        if not isinstance(elem, QXElem):
            raise DomainError("expected a tagged element")
        self.q_operad.validate(elem.q)
        if len(elem.tags) != self.q_operad.arity_of(elem.q):
            raise DomainError("need one tag per input")
        if any(x not in self.space.elements for x in elem.tags):
            raise DomainError("tags must lie in the tag set")

    def unit(self) -> QXElem:
        return QXElem(self.q_operad.unit(), (self.space.basepoint,))

    def left_act(self, p: WPoint, elems: tuple) -> QXElem:
        value = self.family.base_map(p)
        for position in range(len(elems), 0, -1):
            value = self.q_operad.compose(value, position, elems[position - 1].q)
        tags = tuple(x for elem in elems for x in elem.tags)
        return QXElem(value, tags)

    def right_act(self, elem: QXElem, i: int, p: WPoint) -> QXElem:
        m = p.arity
        q = self.q_operad.compose(elem.q, i, self.family[elem.tags[i - 1]](p))
        tags = elem.tags[: i - 1] + (elem.tags[i - 1],) * m + elem.tags[i:]
        return QXElem(q, tags)

    def compose_plain(self, elem: QXElem, i: int, q) -> QXElem:
        """Compose a bare target element at a slot; the slot's tag repeats."""
        m = self.q_operad.arity_of(q)
        tags = elem.tags[: i - 1] + (elem.tags[i - 1],) * m + elem.tags[i:]
        return QXElem(self.q_operad.compose(elem.q, i, q), tags)

    def restrict(self, u: InjectiveMap, elem: QXElem) -> QXElem:
        return QXElem(self.q_operad.restrict(u, elem.q),
                      tuple(elem.tags[u(j) - 1] for j in range(1, u.m + 1)))

    def key(self, elem: QXElem):
        return (self.name, self.q_operad.key(elem.q), elem.tags)

    def sample(self, rng, n: int) -> QXElem:
        return QXElem(self.q_operad.sample(rng, n),
                      tuple(rng.choice(self.space.elements) for _ in range(n)))


def qx_right_act(elem: QXElem, i: int, p: WPoint, qx: QXProductBimodule) -> QXElem:
    return qx.right_act(elem, i, p)


def qx_left_act(p: WPoint, elems: tuple, qx: QXProductBimodule) -> QXElem:
    return qx.left_act(p, tuple(elems))


# ---------------------------------------------------------------------------
# law checking with reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class CheckReport:
    name: str
    seed: int
    samples: int
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "samples": self.samples,
            "ok": self.ok,
            "checks": [
                {"check": r.check, "pass": r.passed,
                 **({"witness": r.witness} if r.witness is not None else {})}
                for r in self.results
            ],
        }


def check_operad_map(f: OperadMap, samples: int = 100, seed: int = 0) -> CheckReport:
    rng = random.Random(seed)
    source, target = f.source, f.target
    results: dict[str, CheckResult] = {}

    def record(check: str, passed: bool, witness: str = "") -> None:
        if check not in results:
            results[check] = CheckResult(check, True)
        if not passed and results[check].passed:
            results[check] = CheckResult(check, False, witness)

    record("unit", target.eq(f(source.unit()), target.unit()),
           "image of the unit is not the unit")
    for _ in range(samples):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        x = source.sample(rng, n)
        y = source.sample(rng, m)
        i = rng.randint(1, n)
        record("composition",
               target.eq(f(source.compose(x, i, y)),
                         target.compose(f(x), i, f(y))),
               f"x={source.format_element(x)} i={i} y={source.format_element(y)}")
        u = random_injection(rng, rng.randint(1, n), n)
        record("restriction",
               target.eq(f(source.restrict(u, x)), target.restrict(u, f(x))),
               f"u={u.values} x={source.format_element(x)}")
    order = ["unit", "composition", "restriction"]
    return CheckReport(f"operad-map:{f.name}", seed, samples,
                       tuple(results[k] for k in order if k in results))


def check_path(g: PathOfMaps, samples: int = 100, seed: int = 0) -> CheckReport:
    rng = random.Random(seed)
    source, target = g.source, g.target
    results: dict[str, CheckResult] = {}

    def record(check: str, passed: bool, witness: str = "") -> None:
        if check not in results:
            results[check] = CheckResult(check, True)
        if not passed and results[check].passed:
            results[check] = CheckResult(check, False, witness)

    for _ in range(samples):
        t = random_fraction(rng, include_ends=True)
        n = rng.randint(1, 3)
        x = source.sample(rng, n)
        record("unit", target.eq(g.at(source.unit(), t), target.unit()),
               f"t={t}")
        m = rng.randint(1, 3)
        y = source.sample(rng, m)
        i = rng.randint(1, n)
        record("composition",
               target.eq(g.at(source.compose(x, i, y), t),
                         target.compose(g.at(x, t), i, g.at(y, t))),
               f"t={t} x={source.format_element(x)} i={i} y={source.format_element(y)}")
        record("start", target.eq(g.at(x, Fraction(0)), g.start(x)),
               f"x={source.format_element(x)}")
        record("end", target.eq(g.at(x, Fraction(1)), g.end(x)),
               f"x={source.format_element(x)}")
        u = random_injection(rng, rng.randint(1, n), n)
        record("restriction",
               target.eq(g.at(source.restrict(u, x), t),
                         target.restrict(u, g.at(x, t))),
               f"t={t} u={u.values} x={source.format_element(x)}")
    order = ["unit", "composition", "start", "end", "restriction"]
    return CheckReport(f"path:{g.name}", seed, samples,
                       tuple(results[k] for k in order if k in results))


def check_bimodule_map(f: BimoduleMap, samples: int = 60, seed: int = 0) -> CheckReport:
    rng = random.Random(seed)
    source, target = f.source, f.target
    over = source.over
    results: dict[str, CheckResult] = {}

    def record(check: str, passed: bool, witness: str = "") -> None:
        if check not in results:
            results[check] = CheckResult(check, True)
        if not passed and results[check].passed:
            results[check] = CheckResult(check, False, witness)

    for _ in range(samples):
        k = rng.randint(1, 3)
        p = over.sample(rng, k)
        xs = tuple(source.sample(rng, rng.randint(1, 3)) for _ in range(k))
        record("left-action",
               target.eq(f(source.left_act(p, xs)),
                         target.left_act(p, tuple(f(x) for x in xs))),
               f"p={over.format_element(p)}")
        b = source.sample(rng, rng.randint(1, 4))
        i = rng.randint(1, source.arity_of(b))
        q = over.sample(rng, rng.randint(1, 3))
        record("right-action",
               target.eq(f(source.right_act(b, i, q)),
                         target.right_act(f(b), i, q)),
               f"i={i} p={over.format_element(q)}")
        n = source.arity_of(b)
        u = random_injection(rng, rng.randint(1, n), n)
        record("restriction",
               target.eq(f(source.restrict(u, b)), target.restrict(u, f(b))),
               f"u={u.values}")
    order = ["left-action", "right-action", "restriction"]
    return CheckReport(f"bimodule-map:{f.name}", seed, samples,
                       tuple(results[k] for k in order if k in results))


# ---------------------------------------------------------------------------
# evaluation of height trees through a path of maps
# ---------------------------------------------------------------------------

def fold_point_through(b: BPoint, target: EffectiveOperad, vertex_value: Callable) -> object:
    """Replace each vertex label by vertex_value(label, height) and compose
    the values along the tree in the target, inputs renumbered to match the
    point's own leaf numbers."""
    if b.is_trivial:
        return target.unit()

    def fold(node):
        value = vertex_value(node.label, node.height)
        if target.arity_of(value) != len(node.children):
            raise DomainError("vertex value has the wrong arity")
        parts = []
        for position in range(len(node.children), 0, -1):
            child = node.children[position - 1]
            if isinstance(child, int):
                parts.append((child,))
            else:
                sub_value, sub_word = fold(child)
                value = target.compose(value, position, sub_value)
                parts.append(sub_word)
        word: list[int] = []
        for part in reversed(parts):
            word.extend(part)
        return value, tuple(word)

    value, word = fold(b.root)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word),
                         tuple(position_of[j] for j in range(1, len(word) + 1)))
    return target.restrict(sigma, value)


def xi_eval(g: PathOfMaps, b: BPoint):
    """Evaluate a loop of maps on a height tree: each vertex contributes
    the path's value on its label at its height."""
    if g.start != g.end:
        raise DomainError("the path must be a loop (equal declared endpoints)")
    return fold_point_through(b, g.target, lambda label, h: g.at(label, h))


def xi_as_map(g: PathOfMaps, source: Bimodule, target: Bimodule) -> BimoduleMap:
    return BimoduleMap(f"xi({g.name})", source, target, lambda b: xi_eval(g, b))


def psi_prime_eval(h: HofiberPoint, b: BPoint):
    """Evaluate a hofiber point: the same vertexwise recipe along its path,
    paired with the tag it ends at."""
    value = fold_point_through(b, h.g.target, lambda label, t: h.g.at(label, t))
    return (h.x, value)


def psi_prime_as_map(h: HofiberPoint, source: Bimodule, family: PointedMapFamily) -> BimoduleMap:
    target = QxBimodule(family, h.x)
    return BimoduleMap(f"psi'({h.x})", source, target,
                       lambda b: psi_prime_eval(h, b)[1])


def psi_double_prime(f: BimoduleMap, qxprod: QXProductBimodule,
                     samples: int = 40, seed: int = 0) -> BimoduleMap:
    """Extend a map into a fixed-tag target by tagging every input with
    that tag. The input must actually be a bimodule map; on failure the
    offending law and witness are raised."""
    if not isinstance(f.target, QxBimodule):
        raise DomainError("expected a map into a fixed-tag target")
    report = check_bimodule_map(f, samples=samples, seed=seed)
    if not report.ok:
        bad = next(r for r in report.results if not r.passed)
        raise DomainError(
            f"not a bimodule map: {bad.check} fails at {bad.witness}")
    x = f.target.x

    def fn(b: BPoint) -> QXElem:
        q = f(b)
        return QXElem(q, (x,) * qxprod.q_operad.arity_of(q))

    return BimoduleMap(f"psi''({f.name})", f.source, qxprod, fn)


# ---------------------------------------------------------------------------
# path lifting
# ---------------------------------------------------------------------------

def lift_path(f0: BimoduleMap, g: XPath, x, t: Fraction, b: BPoint,
              qxprod: QXProductBimodule) -> QXElem:
    """Evaluate the lifted path at time t on a point b.

    The tree is cut at height 1 - t/2, vertices exactly at the cut going
    to the lower part. The lower part, rescaled by h -> h/(1-t/2), goes
    through f0. Each upper vertex at height s contributes the map of the
    tag g(2s + t - 2) applied to its label; upper subtrees are composed in
    the target and grafted onto the lower value at their cut slots, each
    slot's tag repeating across the graft."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise DomainError(f"time {t} outside [0,1]")
    if g.value(Fraction(0)) != x:
        raise DomainError("the tag path must start at the map's tag")
    family = qxprod.family
    q_operad = qxprod.q_operad
    cut = 1 - t / 2
    bottom = slice_point(b, ((cut, True),), trivial_chains=False)
    lower = b_map_heights(bottom.point, lambda h: h / cut)
    value = f0(lower)
    parts = []
    for position in range(len(bottom.exits), 0, -1):
        entry = bottom.exits[position - 1]
        if isinstance(entry, int):
            parts.append((entry,))
            continue
        piece = entry.point

        def vertex_value(label, s):
            tag = g.value(2 * s + t - 2)
            return family[tag](label)

        upper = fold_point_through(piece, q_operad, vertex_value)
        value = qxprod.compose_plain(value, position, upper)
        parts.append(tuple(entry.exits))
    word: list[int] = []
    for part in reversed(parts):
        word.extend(part)
    position_of = {number: p for p, number in enumerate(word, start=1)}
    sigma = InjectiveMap(len(word), len(word),
                         tuple(position_of[j] for j in range(1, len(word) + 1)))
    return qxprod.restrict(sigma, value)
