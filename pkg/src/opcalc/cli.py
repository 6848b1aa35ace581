"""Command line front end.

Every command resolves names against a small built-in workspace: the
interval, disc, associative and framed-interval operads, a pointed tag
set {*, a, b} whose tags name exact rotation twists of the standard
inclusion, and loops and sweeps assembled from those. All sampling is
seeded, so identical invocations print identical bytes.

Exit codes: 0 on success, 1 when a check suite reports a failure, 2 on
usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bconstruction import (
    BBimodule,
    WSelfBimodule,
    b_prime_decompose,
    b_text,
    eval_truncated_bimodule_map,
    mu_prime,
)
from .mapping import (
    BimoduleMap,
    HofiberPoint,
    QXElem,
    QXProductBimodule,
    QxBimodule,
    XPath,
    check_bimodule_map,
    check_operad_map,
    check_path,
    concat_paths,
    constant_path,
    delta_family,
    eta_map,
    eta_mu_map,
    lift_path,
    mu_map,
    psi_double_prime,
    psi_prime_as_map,
    psi_prime_eval,
    reverse_path,
    xi_as_map,
    xi_eval,
)
from .operads import (
    Associative,
    LittleDiscs,
    LittleIntervals,
    PointedSet,
    format_fraction,
    framed_intervals,
    parse_fraction,
)
from .serialize import (
    b_dot,
    b_from_jsonable,
    b_to_jsonable,
    parse_b_text,
    parse_w_text,
    w_dot,
    w_from_jsonable,
    w_to_jsonable,
)
from .suites import (
    suite_b_confluence,
    suite_bimodule_axioms,
    suite_matching,
    suite_operad_axioms,
    suite_w_confluence,
)
from .swisscheese import alpha_eval, parse_sc
from .trees import DomainError, tree_text
from .wconstruction import (
    WOperad,
    eval_truncated_operad_map,
    mu,
    w_prime_decompose,
    w_text,
)

PATH_NAMES = ("const", "loop-a", "loop-b")
SUITE_NAMES = (
    "operad-axioms", "w-operad-axioms", "w-confluence", "b-confluence",
    "b-bimodule-axioms", "wself-bimodule-axioms", "qx-bimodule-axioms",
    "qx-product-bimodule-axioms", "mu", "mu-prime", "eta", "eta-mu",
    "path", "xi", "psi-prime", "psi-double-prime", "matching",
)


class Workspace:
    """The named instances commands resolve against."""

    def __init__(self) -> None:
        self.d1 = LittleIntervals()
        self.d2 = LittleDiscs(2)
        self.operads = {
            "d1": self.d1,
            "d2": self.d2,
            "assoc": Associative(),
            "d1_z2": framed_intervals(),
        }
        self.space = PointedSet("X", ("*", "a", "b"), "*")
        self.family = delta_family(
            self.d1, self.d2, self.space,
            {"*": Fraction(0), "a": Fraction(1, 2), "b": Fraction(-1, 3)})
        self.qxprod = QXProductBimodule(self.family)

    def operad(self, name: str):
        try:
            return self.operads[name]
        except KeyError:
            raise DomainError(
                f"unknown operad {name!r}; have {', '.join(sorted(self.operads))}")

    def tag(self, x: str):
        if x not in self.space.elements:
            raise DomainError(
                f"unknown tag {x!r}; have {', '.join(map(str, self.space.elements))}")
        return x

    def path(self, name: str):
        if name == "const":
            return constant_path(self.family.base_map)
        if name.startswith("loop-"):
            sweep = self.family.path_to(self.tag(name[len("loop-"):]))
            return concat_paths(sweep, reverse_path(sweep))
        raise DomainError(f"unknown path {name!r}; have {', '.join(PATH_NAMES)}")

    def hofiber(self, x: str) -> HofiberPoint:
        return HofiberPoint(self.tag(x), self.family.path_to(self.tag(x)))

    def section_map(self, x: str) -> BimoduleMap:
        """The tagged bimodule map the lift and alpha commands start from."""
        f = psi_prime_as_map(self.hofiber(x), BBimodule(self.d1), self.family)
        return psi_double_prime(f, self.qxprod, samples=20, seed=0)


# ------------------------------------------------------------------ io helpers

def read_point(op, kind: str, text: str):
    text = text.strip()
    if text == "-":
        text = sys.stdin.read().strip()
    if text.startswith("{"):
        data = json.loads(text)
        return b_from_jsonable(op, data) if kind == "b" else w_from_jsonable(op, data)
    return parse_b_text(op, text) if kind == "b" else parse_w_text(op, text)


def point_payload(point, kind: str):
    if kind == "b":
        return b_text(point), b_to_jsonable(point)
    return w_text(point), w_to_jsonable(point)


def qx_payload(ws: Workspace, elem: QXElem):
    text = f"{ws.d2.format_element(elem.q)} ; tags=({','.join(map(str, elem.tags))})"
    return text, {"q": ws.d2.to_jsonable(elem.q), "tags": list(elem.tags)}


def emit(args, text: str, payload) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# ------------------------------------------------------------------- commands

def cmd_normalize(ws: Workspace, args) -> int:
    op = ws.operad(args.operad)
    point = read_point(op, args.kind, args.point)
    emit(args, *point_payload(point, args.kind))
    return 0


def cmd_compose(ws: Workspace, args) -> int:
    op = ws.operad(args.operad)
    if args.kind == "base":
        value = op.compose(op.parse_element(args.left), args.slot,
                           op.parse_element(args.right))
        emit(args, op.format_element(value), op.to_jsonable(value))
        return 0
    wop = WOperad(op)
    value = wop.compose(read_point(op, "w", args.left), args.slot,
                        read_point(op, "w", args.right))
    emit(args, *point_payload(value, "w"))
    return 0


def cmd_mu(ws: Workspace, args) -> int:
    op = ws.operad(args.operad)
    point = read_point(op, args.kind, args.point)
    if args.kind == "w":
        if args.truncate is not None:
            value = eval_truncated_operad_map(mu, args.truncate, point, op)
        else:
            value = mu(point)
        emit(args, op.format_element(value), op.to_jsonable(value))
        return 0
    if args.truncate is not None:
        value = eval_truncated_bimodule_map(mu_prime, args.truncate, point,
                                            WSelfBimodule(op))
    else:
        value = mu_prime(point)
    emit(args, *point_payload(value, "w"))
    return 0


def cmd_decompose(ws: Workspace, args) -> int:
    op = ws.operad(args.operad)
    point = read_point(op, args.kind, args.point)
    if args.kind == "w":
        dec = w_prime_decompose(point)
        data = {
            "filtration": dec.filtration_level,
            "skeleton": tree_text(dec.skeleton),
            "components": [w_to_jsonable(c) for c in dec.components],
        }
        lines = [f"filtration {dec.filtration_level}",
                 f"skeleton {tree_text(dec.skeleton)}"]
        lines += [f"component {k}: {w_text(c)}"
                  for k, c in enumerate(dec.components, start=1)]
        emit(args, "\n".join(lines), data)
        return 0
    dec = b_prime_decompose(point)

    def exit_json(record):
        if record[0] == "ext":
            return {"kind": "ext", "leaf": record[1]}
        return {"kind": "cap", "label": w_text(record[1]),
                "leaves": list(record[2])}

    def exit_text(record):
        if record[0] == "ext":
            return f"l{record[1]}"
        return f"cap({w_text(record[1])}; {','.join(map(str, record[2]))})"

    data = {
        "filtration": list(dec.filtration),
        "root": None if dec.root_label is None else w_text(dec.root_label),
        "pieces": [{"point": b_to_jsonable(piece),
                    "exits": [exit_json(r) for r in exits]}
                   for piece, exits in dec.pieces],
    }
    lines = [f"filtration {dec.filtration[0]},{dec.filtration[1]}",
             "root " + ("-" if dec.root_label is None else w_text(dec.root_label))]
    for k, (piece, exits) in enumerate(dec.pieces, start=1):
        lines.append(f"piece {k}: {b_text(piece)}")
        lines.append(f"  exits: {' '.join(exit_text(r) for r in exits)}")
    emit(args, "\n".join(lines), data)
    return 0


def cmd_eval_xi(ws: Workspace, args) -> int:
    loop = ws.path(args.path)
    point = read_point(ws.d1, "b", args.point)
    value = xi_eval(loop, point)
    emit(args, ws.d2.format_element(value), ws.d2.to_jsonable(value))
    return 0


def cmd_eval_psi(ws: Workspace, args) -> int:
    h = ws.hofiber(args.x)
    point = read_point(ws.d1, "b", args.point)
    if args.truncate is not None:
        target = QxBimodule(ws.family, h.x)
        value = eval_truncated_bimodule_map(
            lambda piece: psi_prime_eval(h, piece)[1],
            args.truncate, point, target)
    else:
        value = psi_prime_eval(h, point)[1]
    emit(args, f"{h.x} ; {ws.d2.format_element(value)}",
         {"x": h.x, "value": ws.d2.to_jsonable(value)})
    return 0


def cmd_lift(ws: Workspace, args) -> int:
    x = ws.tag(args.x)
    f0 = ws.section_map(x)
    if args.to is None:
        g = XPath(ws.space, ((Fraction(0), x),))
    else:
        g = XPath(ws.space, ((Fraction(0), x),
                             (parse_fraction(args.switch), ws.tag(args.to))))
    point = read_point(ws.d1, "b", args.point)
    value = lift_path(f0, g, x, parse_fraction(args.t), point, ws.qxprod)
    emit(args, *qx_payload(ws, value))
    return 0


def cmd_alpha(ws: Workspace, args) -> int:
    c = parse_sc(args.config)
    if c.color != "o":
        raise DomainError("alpha acts through open configurations; "
                          "closed ones only concatenate loops")
    loop_names = args.loops.split(",") if args.loops else []
    if len(loop_names) > c.n:
        raise DomainError(f"at most {c.n} loops fit this configuration")
    fs: list = []
    for k in range(c.n):
        name = loop_names[k] if k < len(loop_names) else "loop-a"
        loop = ws.path(name)
        fs.append(lambda b, g=loop: xi_eval(g, b))
    fs.append(ws.section_map(args.x))
    point = read_point(ws.d1, "b", args.point)
    value = alpha_eval(c, fs, point, ws.family.base_map)
    emit(args, *qx_payload(ws, value))
    return 0


def run_suite(ws: Workspace, args):
    name, samples, seed = args.suite, args.samples, args.seed
    if name == "operad-axioms":
        return suite_operad_axioms(ws.operad(args.operad), samples, seed)
    if name == "w-operad-axioms":
        return suite_operad_axioms(WOperad(ws.operad(args.operad)), samples, seed)
    if name == "w-confluence":
        return suite_w_confluence(ws.operad(args.operad), samples, seed)
    if name == "b-confluence":
        return suite_b_confluence(ws.operad(args.operad), samples, seed)
    if name == "b-bimodule-axioms":
        return suite_bimodule_axioms(BBimodule(ws.operad(args.operad)), samples, seed)
    if name == "wself-bimodule-axioms":
        return suite_bimodule_axioms(WSelfBimodule(ws.operad(args.operad)), samples, seed)
    if name == "qx-bimodule-axioms":
        return suite_bimodule_axioms(QxBimodule(ws.family, ws.tag(args.x)), samples, seed)
    if name == "qx-product-bimodule-axioms":
        return suite_bimodule_axioms(ws.qxprod, samples, seed)
    if name == "mu":
        return check_operad_map(mu_map(ws.operad(args.operad)), samples, seed)
    if name == "mu-prime":
        op = ws.operad(args.operad)
        f = BimoduleMap("mu'", BBimodule(op), WSelfBimodule(op), mu_prime)
        return check_bimodule_map(f, samples, seed)
    if name == "eta":
        return check_operad_map(eta_map(ws.d1, ws.d2), samples, seed)
    if name == "eta-mu":
        return check_operad_map(eta_mu_map(ws.d1, ws.d2), samples, seed)
    if name == "path":
        return check_path(ws.path(args.path), samples, seed)
    if name == "xi":
        f = xi_as_map(ws.path(args.path), BBimodule(ws.d1),
                      QxBimodule(ws.family, ws.space.basepoint))
        return check_bimodule_map(f, samples, seed)
    if name == "psi-prime":
        f = psi_prime_as_map(ws.hofiber(args.x), BBimodule(ws.d1), ws.family)
        return check_bimodule_map(f, samples, seed)
    if name == "psi-double-prime":
        return check_bimodule_map(ws.section_map(args.x), samples, seed)
    if name == "matching":
        return suite_matching(ws.space, max_n=4)
    raise DomainError(f"unknown suite {name!r}; have {', '.join(SUITE_NAMES)}")


def cmd_check(ws: Workspace, args) -> int:
    report = run_suite(ws, args)
    data = report.to_jsonable()
    if args.samples == 0:
        data["flag"] = "no-samples"
    if args.format == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        status = "ok" if report.ok else "FAIL"
        flag = " [no-samples]" if args.samples == 0 else ""
        print(f"{status} {report.name} (samples={report.samples} "
              f"seed={report.seed}){flag}")
        for r in report.results:
            if r.passed:
                print(f"  pass {r.check}")
            else:
                print(f"  FAIL {r.check}: {r.witness}")
    return 0 if report.ok else 1


def cmd_dot(ws: Workspace, args) -> int:
    op = ws.operad(args.operad)
    point = read_point(op, args.kind, args.point)
    print(b_dot(point) if args.kind == "b" else w_dot(point))
    return 0


# -------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opcalc",
        description="Exact calculus on decorated-tree resolutions of operads.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, point=True, kind=None):
        p.add_argument("--operad", default="d1",
                       help="workspace operad name (default d1)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        if kind is not None:
            p.add_argument("--kind", choices=kind, default=kind[0])
        if point:
            p.add_argument("point", help="point text, JSON, or - for stdin")

    p = sub.add_parser("normalize", help="parse and print the canonical form")
    common(p, kind=("w", "b"))

    p = sub.add_parser("compose", help="operadic composition at a slot")
    common(p, point=False, kind=("w", "base"))
    p.add_argument("-i", "--slot", type=int, required=True)
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("mu", help="compose a resolution point down a level")
    common(p, kind=("w", "b"))
    p.add_argument("--truncate", type=int, default=None,
                   help="evaluate through the level-k truncation")

    p = sub.add_parser("decompose", help="split into prime components")
    common(p, kind=("w", "b"))

    p = sub.add_parser("eval-xi", help="evaluate a height tree through a loop")
    common(p)
    p.add_argument("--path", default="loop-a", help=f"one of {', '.join(PATH_NAMES)}")

    p = sub.add_parser("eval-psi", help="evaluate a height tree at a tag's sweep")
    common(p)
    p.add_argument("--x", default="a", help="tag (default a)")
    p.add_argument("--truncate", type=int, default=None)

    p = sub.add_parser("lift", help="evaluate the lifted path at a time")
    common(p)
    p.add_argument("--x", default="a", help="starting tag (default a)")
    p.add_argument("--to", default=None, help="tag switched to along the way")
    p.add_argument("--switch", default="1/2", help="switch time (default 1/2)")
    p.add_argument("--t", required=True, help="evaluation time, a fraction")

    p = sub.add_parser("alpha", help="act by an open interval configuration")
    common(p)
    p.add_argument("--config", required=True, help='e.g. "o<[1/8,3/8] [5/8,1/1]>"')
    p.add_argument("--x", default="a", help="tag for the open disc (default a)")
    p.add_argument("--loops", default=None,
                   help="comma-separated loop names for the closed discs")

    p = sub.add_parser("check", help="run a named randomized law suite")
    common(p, point=False)
    p.add_argument("suite", help=f"one of {', '.join(SUITE_NAMES)}")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--x", default="a")
    p.add_argument("--path", default="loop-a")

    p = sub.add_parser("dot", help="render a point as DOT")
    common(p, kind=("w", "b"))

    return parser


HANDLERS = {
    "normalize": cmd_normalize,
    "compose": cmd_compose,
    "mu": cmd_mu,
    "decompose": cmd_decompose,
    "eval-xi": cmd_eval_xi,
    "eval-psi": cmd_eval_psi,
    "lift": cmd_lift,
    "alpha": cmd_alpha,
    "check": cmd_check,
    "dot": cmd_dot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ws = Workspace()
    try:
        return HANDLERS[args.command](ws, args)
    except (DomainError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
