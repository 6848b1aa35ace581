"""Randomized law suites packaged as named check reports.

Each suite draws seeded samples, evaluates a fixed list of named checks,
and returns the same CheckReport the map checks in mapping produce: one
entry per law, first failing witness kept. Running a suite with zero
samples yields a vacuous report; the CLI flags those so silence is not
mistaken for evidence.
"""

from __future__ import annotations

import random
from typing import Sequence

from .bconstruction import Bimodule, b_normalize_random_order, b_text, bpoint
from .mapping import CheckReport, CheckResult
from .operads import (
    EffectiveOperad,
    PointedSet,
    PowerSequence,
    enumerate_matching_families,
    induced_matching_family,
    is_matching_compatible,
)
from .sampling import (
    random_b_twists,
    random_injection,
    random_raw_bnode,
    random_raw_wnode,
    random_vertex_twists,
)
from .trees import InjectiveMap, block_injection, drop_block
from .wconstruction import normalize_random_order, w_text, wpoint


class _Recorder:
    """First-failure bookkeeping shared by every suite."""

    def __init__(self) -> None:
        self.results: dict[str, CheckResult] = {}

    def __call__(self, check: str, passed: bool, witness: str = "") -> None:
        if check not in self.results:
            self.results[check] = CheckResult(check, True)
        if not passed and self.results[check].passed:
            self.results[check] = CheckResult(check, False, witness)

    def report(self, name: str, seed: int, samples: int,
               order: Sequence[str]) -> CheckReport:
        return CheckReport(name, seed, samples,
                           tuple(self.results[k] for k in order if k in self.results))


def suite_operad_axioms(op: EffectiveOperad, samples: int = 500,
                        seed: int = 0) -> CheckReport:
    """Unit, associativity and restriction laws on seeded random elements."""
    rng = random.Random(seed)
    rec = _Recorder()
    for _ in range(samples):
        n = rng.randint(1, 4)
        x = op.sample(rng, n)
        wx = op.format_element(x)
        rec("unit-left", op.eq(op.compose(op.unit(), 1, x), x), wx)
        i = rng.randint(1, n)
        rec("unit-right", op.eq(op.compose(x, i, op.unit()), x), f"i={i} x={wx}")
        m = rng.randint(1, 3)
        y = op.sample(rng, m)
        j = rng.randint(1, m)
        z = op.sample(rng, rng.randint(1, 3))
        rec("assoc-nested",
            op.eq(op.compose(op.compose(x, i, y), i + j - 1, z),
                  op.compose(x, i, op.compose(y, j, z))),
            f"i={i} j={j} x={wx} y={op.format_element(y)} z={op.format_element(z)}")
        if n >= 2:
            i2, k2 = sorted(rng.sample(range(1, n + 1), 2))
            rec("assoc-disjoint",
                op.eq(op.compose(op.compose(x, k2, z), i2, y),
                      op.compose(op.compose(x, i2, y), k2 + m - 1, z)),
                f"i={i2} k={k2} x={wx}")
        rec("restrict-identity", op.eq(op.restrict(InjectiveMap.identity(n), x), x), wx)
        u = random_injection(rng, rng.randint(1, n), n)
        v = random_injection(rng, rng.randint(1, u.m), u.m)
        rec("restrict-functorial",
            op.eq(op.restrict(u.after(v), x), op.restrict(v, op.restrict(u, x))),
            f"u={u.values} v={v.values} x={wx}")
        iu = rng.randint(1, u.m)
        vy = random_injection(rng, rng.randint(1, m), m)
        rec("restrict-compose",
            op.eq(op.compose(op.restrict(u, x), iu, op.restrict(vy, y)),
                  op.restrict(block_injection(u, iu, vy), op.compose(x, u(iu), y))),
            f"u={u.values} i={iu} v={vy.values} x={wx}")
        if n >= 2:
            # an injection into the composite that misses block i..i+m-1
            outside = [p for p in range(1, n + m) if not i <= p <= i + m - 1]
            size = rng.randint(1, len(outside))
            w = InjectiveMap(size, n + m - 1, tuple(rng.sample(outside, size)))
            rec("restrict-dropped",
                op.eq(op.restrict(w, op.compose(x, i, y)),
                      op.restrict(drop_block(w, i, m), x)),
                f"w={w.values} i={i} m={m} x={wx}")
    order = ("unit-left", "unit-right", "assoc-nested", "assoc-disjoint",
             "restrict-identity", "restrict-functorial", "restrict-compose",
             "restrict-dropped")
    return rec.report(f"operad-axioms:{op.name}", seed, samples, order)


def suite_w_confluence(op: EffectiveOperad, samples: int = 100, seed: int = 0,
                       orders: int = 10) -> CheckReport:
    """Random reduction orders and vertex twists reach one normal form."""
    rng = random.Random(seed)
    rec = _Recorder()
    for _ in range(samples):
        raw = random_raw_wnode(rng, op, rng.randint(1, 5))
        base = wpoint(op, raw)
        for _ in range(orders):
            other = normalize_random_order(random.Random(rng.randrange(10 ** 9)), op, raw)
            rec("confluence", other == base.root, w_text(base))
        twisted = random_vertex_twists(rng, op, raw)
        rec("twist-invariance", wpoint(op, twisted) == base, w_text(base))
    return rec.report(f"w-confluence:{op.name}", seed, samples,
                      ("confluence", "twist-invariance"))


def suite_b_confluence(op: EffectiveOperad, samples: int = 100, seed: int = 0,
                       orders: int = 10) -> CheckReport:
    """Same confluence story one level up, for height trees."""
    rng = random.Random(seed)
    rec = _Recorder()
    for _ in range(samples):
        raw = random_raw_bnode(rng, op, rng.randint(1, 5))
        base = bpoint(op, raw)
        for _ in range(orders):
            other = b_normalize_random_order(random.Random(rng.randrange(10 ** 9)), op, raw)
            rec("confluence", other == base, b_text(base))
        twisted = random_b_twists(rng, op, raw)
        rec("twist-invariance", bpoint(op, twisted) == base, b_text(base))
    return rec.report(f"b-confluence:{op.name}", seed, samples,
                      ("confluence", "twist-invariance"))


def suite_bimodule_axioms(bim: Bimodule, samples: int = 100,
                          seed: int = 0) -> CheckReport:
    """Two-sided action, interchange and restriction laws for a bimodule."""
    rng = random.Random(seed)
    over = bim.over
    rec = _Recorder()
    for _ in range(samples):
        b = bim.sample(rng, rng.randint(1, 4))
        n = bim.arity_of(b)
        rec("left-unit", bim.eq(bim.left_act(over.unit(), (b,)), b), "")
        i = rng.randint(1, n)
        rec("right-unit", bim.eq(bim.right_act(b, i, over.unit()), b), f"i={i}")

        k = rng.randint(1, 3)
        p = over.sample(rng, k)
        wp = over.format_element(p)
        ik = rng.randint(1, k)
        m = rng.randint(1, 3)
        q = over.sample(rng, m)
        ys = tuple(bim.sample(rng, rng.randint(1, 3)) for _ in range(k + m - 1))
        inner = bim.left_act(q, ys[ik - 1: ik + m - 1])
        rec("left-compose",
            bim.eq(bim.left_act(over.compose(p, ik, q), ys),
                   bim.left_act(p, ys[: ik - 1] + (inner,) + ys[ik + m - 1:])),
            f"p={wp} i={ik} q={over.format_element(q)}")

        j = rng.randint(1, m)
        r = over.sample(rng, rng.randint(1, 3))
        rec("right-nested",
            bim.eq(bim.right_act(bim.right_act(b, i, q), i + j - 1, r),
                   bim.right_act(b, i, over.compose(q, j, r))),
            f"i={i} j={j} q={over.format_element(q)}")
        i2 = rng.randint(1, n)
        if i2 != i:
            lo, hi = sorted((i, i2))
            plo = q if lo == i else r
            phi = q if hi == i else r
            rec("right-disjoint",
                bim.eq(bim.right_act(bim.right_act(b, lo, plo),
                                     hi + over.arity_of(plo) - 1, phi),
                       bim.right_act(bim.right_act(b, hi, phi), lo, plo)),
                f"lo={lo} hi={hi}")

        xs = tuple(bim.sample(rng, rng.randint(1, 3)) for _ in range(k))
        jj = rng.randint(1, k)
        local = rng.randint(1, bim.arity_of(xs[jj - 1]))
        offset = sum(bim.arity_of(x) for x in xs[: jj - 1])
        replaced = xs[: jj - 1] + (bim.right_act(xs[jj - 1], local, q),) + xs[jj:]
        rec("interchange",
            bim.eq(bim.right_act(bim.left_act(p, xs), offset + local, q),
                   bim.left_act(p, replaced)),
            f"p={wp} block={jj} slot={local}")

        # blockwise restriction against the left action: keep some blocks
        # (in any order), restrict inside each kept block, and compare with
        # restricting the assembled composite by the matching injection
        kept = random_injection(rng, rng.randint(1, k), k)
        vs = tuple(
            random_injection(rng, rng.randint(1, bim.arity_of(xs[kept(j) - 1])),
                             bim.arity_of(xs[kept(j) - 1]))
            for j in range(1, kept.m + 1))
        offsets = [0]
        for x in xs:
            offsets.append(offsets[-1] + bim.arity_of(x))
        values: list[int] = []
        for j in range(1, kept.m + 1):
            base_off = offsets[kept(j) - 1]
            values.extend(base_off + vs[j - 1](l) for l in range(1, vs[j - 1].m + 1))
        big = InjectiveMap(len(values), offsets[-1], tuple(values))
        rec("restrict-left",
            bim.eq(bim.restrict(big, bim.left_act(p, xs)),
                   bim.left_act(over.restrict(kept, p),
                                tuple(bim.restrict(vs[j - 1], xs[kept(j) - 1])
                                      for j in range(1, kept.m + 1)))),
            f"kept={kept.values} p={wp}")

        u = random_injection(rng, rng.randint(1, n), n)
        vq = random_injection(rng, rng.randint(1, m), m)
        iu = rng.randint(1, u.m)
        rec("restrict-right",
            bim.eq(bim.right_act(bim.restrict(u, b), iu, over.restrict(vq, q)),
                   bim.restrict(block_injection(u, iu, vq),
                                bim.right_act(b, u(iu), q))),
            f"u={u.values} i={iu} v={vq.values}")
        vv = random_injection(rng, rng.randint(1, u.m), u.m)
        rec("restrict-functorial",
            bim.eq(bim.restrict(vv, bim.restrict(u, b)),
                   bim.restrict(u.after(vv), b)),
            f"u={u.values} v={vv.values}")
    order = ("left-unit", "right-unit", "left-compose", "right-nested",
             "right-disjoint", "interchange", "restrict-left",
             "restrict-right", "restrict-functorial")
    return rec.report(f"bimodule-axioms:{bim.name}", seed, samples, order)


def suite_matching(space: PointedSet, max_n: int = 4) -> CheckReport:
    """Exhaustive matching-family enumeration against power-level counts.

    Level 1 must be a single family; at level n the families must biject
    with the n-th power of the space through the induced-family map.
    """
    seq = PowerSequence(space)
    size = len(space.elements)
    rec = _Recorder()

    def key(fam):
        return tuple(sorted(fam.assignments.items()))

    for n in range(1, max_n + 1):
        families = enumerate_matching_families(seq, n)
        found = {key(fam) for fam in families}
        rec("compatible",
            all(is_matching_compatible(seq, fam) for fam in families), f"n={n}")
        induced = {key(induced_matching_family(seq, n, z)) for z in seq.elements(n)}
        rec("induced-live", induced <= found, f"n={n}")
        if n == 1:
            rec("level-one-single", len(families) == 1, f"got {len(families)}")
        else:
            rec("level-count", len(families) == size ** n,
                f"n={n} got {len(families)} want {size ** n}")
            rec("induced-bijection", induced == found and len(induced) == size ** n,
                f"n={n}")
    order = ("level-one-single", "level-count", "compatible",
             "induced-live", "induced-bijection")
    return rec.report(f"matching:{space.name}", 0, max_n, order)
