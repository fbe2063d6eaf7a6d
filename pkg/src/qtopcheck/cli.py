"""Command-line surface: define objects in workspace files, run every check.

Each invocation runs one command and prints its report(s) human-readably,
machine-readably (one JSON object per check, stable key order), or both.
Exit status: 0 pass, 1 fail, 2 error or budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    FiniteAlgebra,
    FnTable,
    Subset,
    fn_from_token,
    fn_token,
    generate_subalgebra,
    homomorphism_witness,
    power_algebra,
    product_algebra,
)
from .enumeration import (
    DEFAULT_BUDGET,
    EnumerationBudget,
    STRATEGIES,
    all_q_topologies,
    all_subalgebras,
)
from .errors import BudgetExceeded, EmptyGeneratorsNoConstants
from .qtop import (
    QSpace,
    check_membership_continuity,
    check_sierpinski_smallest,
    generate_topology,
    noncontinuity_witness,
    optimal_lift,
    product_space,
    sierpinski_space,
)
from .report import FAIL, PASS, Report
from .structcat import (
    ADAPTER_KINDS,
    StructuredCategory,
    check_axiom_a1,
    check_axiom_a2,
    check_condition_1,
    check_condition_2,
    is_sierpinski_object,
    make_adapter,
    verify_characterization,
)
from .workspace import (
    AdapterRef,
    ParseError,
    Workspace,
    WorkspaceError,
    builtin_workspace,
    parse_workspace,
)

FORMATS = ("text", "machine", "both")

VERIFY_TARGETS = (
    "theorem-3.1",
    "theorem-3.2",
    "axiom-a1",
    "axiom-a2",
    "condition-1",
    "condition-2",
    "theorem-4.1",
)


@dataclass
class Outcome:
    """One check's report plus its presentation payload."""

    report: Report
    result: object = None
    lines: list[str] = field(default_factory=list)


class CommandError(ValueError):
    """Bad arguments or unresolvable references at command level."""


# ---------------------------------------------------------------------------
# name resolution


_POWER_RE = re.compile(r"^(?P<base>.+?)pow(?P<exp>\d+)$")


def resolve_algebra(ws: Workspace, name: str, budget: EnumerationBudget) -> FiniteAlgebra:
    """A named algebra, or BASEpowK for the K-th power of a named algebra."""
    if name in ws.algebras:
        return ws.algebras[name]
    match = _POWER_RE.match(name)
    if match and match.group("base") in ws.algebras:
        return power_algebra(
            ws.algebras[match.group("base")],
            int(match.group("exp")),
            max_carrier=budget.max_carrier,
        )
    raise CommandError(f"unknown algebra {name!r}")


def resolve_space(ws: Workspace, name: str) -> QSpace:
    if name not in ws.spaces:
        raise CommandError(f"unknown space {name!r}")
    return ws.spaces[name]


def resolve_map(ws: Workspace, token: str, dom_size: int, cod_size: int) -> FnTable:
    """A named map, or an inline value string over codomain indices."""
    if token in ws.maps:
        fn = ws.maps[token]
        if fn.dom_size != dom_size or fn.cod_size != cod_size:
            raise CommandError(
                f"map {token!r} has sizes {fn.dom_size}->{fn.cod_size}, "
                f"expected {dom_size}->{cod_size}"
            )
        return fn
    try:
        return fn_from_token(token, dom_size, cod_size)
    except ValueError as exc:
        raise CommandError(f"cannot read map {token!r}: {exc}") from exc


def resolve_adapter(
    ws: Workspace, spec: str, budget: EnumerationBudget
) -> StructuredCategory:
    """An adapter: workspace name, or inline KIND[:ALGEBRA[:SEED]]."""
    if spec in ws.adapters:
        ref = ws.adapters[spec]
    else:
        parts = spec.split(":")
        if parts[0] not in ADAPTER_KINDS:
            raise CommandError(
                f"unknown adapter {spec!r}; workspace names: {sorted(ws.adapters)}; "
                f"inline kinds: {', '.join(ADAPTER_KINDS)}"
            )
        seed = 0
        if len(parts) == 3:
            try:
                seed = int(parts[2])
            except ValueError:
                raise CommandError(f"adapter seed must be an integer: {spec!r}") from None
        elif len(parts) > 3:
            raise CommandError(f"adapter spec {spec!r} has too many parts")
        ref = AdapterRef(parts[0], parts[1] if len(parts) > 1 else None, seed)
    q = None
    if ref.algebra is not None:
        q = resolve_algebra(ws, ref.algebra, budget)
    try:
        return make_adapter(ref.kind, q, ref.seed, budget)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def _cmd_closure(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    algebra = resolve_algebra(ws, args.algebra, budget)
    members = [algebra.label_index(tok) for tok in args.set]
    closed = generate_subalgebra(algebra, Subset.of(algebra.size, members))
    labels = [algebra.label(i) for i in closed.members]
    report = Report(
        "closure", PASS, stats={"generators": len(args.set), "closure_size": len(labels)}
    )
    return [Outcome(report, {"members": labels}, ["members: " + " ".join(labels)])]


def _cmd_hom_check(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    dom = resolve_algebra(ws, getattr(args, "from"), budget)
    cod = resolve_algebra(ws, args.to, budget)
    fn = resolve_map(ws, args.map, dom.size, cod.size)
    witness = homomorphism_witness(fn, dom, cod)
    if witness is None:
        report = Report("hom-check", PASS, stats={"map": 1})
        return [Outcome(report, {"homomorphism": True}, ["homomorphism: yes"])]
    report = Report("hom-check", FAIL, witness=witness, stats={"map": 1})
    return [
        Outcome(
            report,
            {"homomorphism": False},
            [f"homomorphism: no (fails at {witness['symbol']}{tuple(witness['args'])})"],
        )
    ]


def _algebra_payload(algebra: FiniteAlgebra) -> tuple[object, list[str]]:
    labels = list(algebra.all_labels())
    lines = [f"size: {algebra.size}", "elements: " + " ".join(labels)]
    return {"size": algebra.size, "elements": labels}, lines


def _cmd_power(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    base = resolve_algebra(ws, args.algebra, budget)
    powered = power_algebra(base, args.exponent, max_carrier=budget.max_carrier)
    result, lines = _algebra_payload(powered)
    return [Outcome(Report("power", PASS, stats={"size": powered.size}), result, lines)]


def _cmd_product(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    factors = [resolve_algebra(ws, name, budget) for name in args.algebras]
    prod = product_algebra(factors, max_carrier=budget.max_carrier)
    result, lines = _algebra_payload(prod)
    return [Outcome(Report("product", PASS, stats={"size": prod.size}), result, lines)]


def _topology_outcome(check_name: str, space: QSpace) -> Outcome:
    tokens = list(space.topology.tokens())
    report = Report(
        check_name, PASS, stats={"ground": space.ground_size, "opens": len(tokens)}
    )
    lines = [f"ground: {space.ground_size}", "opens: " + " ".join(tokens)]
    return Outcome(report, {"ground": space.ground_size, "opens": tokens}, lines)


def _cmd_topology_generate(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    q = resolve_algebra(ws, args.algebra, budget)
    generators = [
        resolve_map(ws, tok, args.ground, q.size) for tok in (args.generators or [])
    ]
    topology = generate_topology(q, args.ground, generators, max_carrier=budget.max_carrier)
    return [_topology_outcome("topology-generate", topology.space())]


def _cmd_continuity(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    dom = resolve_space(ws, args.dom)
    cod = resolve_space(ws, args.cod)
    fn = resolve_map(ws, args.map, dom.ground_size, cod.ground_size)
    witness = noncontinuity_witness(fn, dom, cod)
    if witness is None:
        report = Report("continuity", PASS, stats={"opens_checked": len(cod.topology)})
        return [Outcome(report, {"continuous": True}, ["continuous: yes"])]
    report = Report(
        "continuity", FAIL, witness=witness, stats={"opens_checked": len(cod.topology)}
    )
    lines = [
        "continuous: no "
        f"(open {witness['open']} pulls back to {witness['preimage']}, not an open)"
    ]
    return [Outcome(report, {"continuous": False}, lines)]


def _cmd_lift(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    q = resolve_algebra(ws, args.algebra, budget)
    family = []
    for item in args.via or []:
        if ":" not in item:
            raise CommandError(f"--via needs MAP:SPACE, got {item!r}")
        map_tok, space_name = item.split(":", 1)
        target = resolve_space(ws, space_name)
        if target.q != q:
            raise CommandError(f"space {space_name!r} is not over algebra {args.algebra!r}")
        fn = resolve_map(ws, map_tok, args.ground, target.ground_size)
        family.append((fn, target))
    topology = optimal_lift(q, args.ground, family, max_carrier=budget.max_carrier)
    return [_topology_outcome("lift", topology.space())]


def _cmd_product_space(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    factors = [resolve_space(ws, name) for name in args.spaces]
    prod = product_space(factors, max_carrier=budget.max_carrier)
    return [_topology_outcome("product-space", prod)]


def _cmd_sierpinski(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    q = resolve_algebra(ws, args.algebra, budget)
    space = sierpinski_space(q, max_carrier=budget.max_carrier)
    return [_topology_outcome("sierpinski", space)]


def _cmd_enumerate_subalgebras(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    algebra = resolve_algebra(ws, args.algebra, budget)
    found = all_subalgebras(algebra, budget)
    rendered = [[algebra.label(i) for i in sub.members] for sub in found]
    report = Report("enumerate-subalgebras", PASS, stats={"count": len(found)})
    lines = [f"count: {len(found)}"] + ["{" + " ".join(mem) + "}" for mem in rendered]
    return [Outcome(report, {"subalgebras": rendered}, lines)]


def _cmd_enumerate_topologies(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    q = resolve_algebra(ws, args.algebra, budget)
    found = all_q_topologies(q, args.ground, budget, strategy=args.strategy)
    rendered = [list(t.tokens()) for t in found]
    report = Report(
        "enumerate-topologies",
        PASS,
        stats={"count": len(found), "ground": args.ground},
    )
    lines = [f"count: {len(found)}"] + ["{" + " ".join(toks) + "}" for toks in rendered]
    return [Outcome(report, {"topologies": rendered}, lines)]


def _space_suite(
    ws: Workspace, args, budget: EnumerationBudget, checker
) -> list[Outcome]:
    outcomes = []
    if args.space is not None:
        space = resolve_space(ws, args.space)
        report = checker(space, budget)
        report.stats["space"] = args.space
        outcomes.append(Outcome(report))
        return outcomes
    if args.algebra is None:
        raise CommandError("needs --space NAME or --algebra NAME with --max-ground")
    q = resolve_algebra(ws, args.algebra, budget)
    for ground in range(1, args.max_ground + 1):
        for index, topology in enumerate(all_q_topologies(q, ground, budget)):
            report = checker(topology.space(), budget)
            report.stats["ground"] = ground
            report.stats["space_index"] = index
            outcomes.append(Outcome(report))
    return outcomes


def _cmd_verify(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    target = args.target
    if target == "theorem-3.1":
        return _space_suite(ws, args, budget, check_membership_continuity)
    if target == "theorem-3.2":
        if args.adapter is not None:
            cat = resolve_adapter(ws, args.adapter, budget)
            return [Outcome(is_sierpinski_object(cat, args.max_ground, budget))]
        return _space_suite(ws, args, budget, check_sierpinski_smallest)
    if args.adapter is None:
        raise CommandError(f"verify {target} needs --adapter")
    cat = resolve_adapter(ws, args.adapter, budget)
    if target == "axiom-a1":
        return [Outcome(check_axiom_a1(cat, args.max_ground, budget))]
    if target == "axiom-a2":
        return [Outcome(check_axiom_a2(cat, args.max_ground, budget))]
    if target == "condition-1":
        return [Outcome(check_condition_1(cat, args.max_ground, budget))]
    if target == "condition-2":
        return [Outcome(check_condition_2(cat, budget))]
    if target == "theorem-4.1":
        return [Outcome(verify_characterization(cat, args.max_ground, budget))]
    raise CommandError(f"unknown verify target {target!r}")


def _cmd_report(ws: Workspace, args, budget: EnumerationBudget) -> list[Outcome]:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    outcomes = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            report = Report(
                obj["check_name"], obj["verdict"], obj.get("witness"), obj.get("stats", {})
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CommandError(f"bad report line {lineno}: {exc}") from exc
        outcomes.append(Outcome(report, obj.get("result")))
    return outcomes


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtopcheck",
        description="Topologies valued in a finite algebra: constructions and exhaustive checks.",
    )
    parser.add_argument("--workspace", "-w", help="workspace file (.qt or JSON)")
    parser.add_argument(
        "--format", choices=FORMATS, default="both", help="report form (default: both)"
    )
    parser.add_argument("--max-subset-space", type=int, help="override budget")
    parser.add_argument("--max-carrier", type=int, help="override budget")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("closure", help="least closed superset of carrier elements")
    p.add_argument("--algebra", required=True)
    p.add_argument("--set", nargs="*", default=[], help="carrier element labels")
    p.set_defaults(handler=_cmd_closure)

    p = sub.add_parser("hom-check", help="does a map commute with all operations")
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--map", required=True, help="map name or value string")
    p.set_defaults(handler=_cmd_hom_check)

    p = sub.add_parser("power", help="pointwise power algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--exponent", type=int, required=True)
    p.set_defaults(handler=_cmd_power)

    p = sub.add_parser("product", help="componentwise product algebra")
    p.add_argument("--algebras", nargs="+", required=True)
    p.set_defaults(handler=_cmd_product)

    p = sub.add_parser("topology", help="topology constructions")
    tsub = p.add_subparsers(dest="subcommand", required=True)
    tp = tsub.add_parser("generate", help="smallest topology containing generators")
    tp.add_argument("--algebra", required=True)
    tp.add_argument("--ground", type=int, required=True)
    tp.add_argument("--generators", nargs="*", default=[])
    tp.set_defaults(handler=_cmd_topology_generate)

    p = sub.add_parser("continuity", help="pullback check between two spaces")
    p.add_argument("--map", required=True)
    p.add_argument("--dom", required=True)
    p.add_argument("--cod", required=True)
    p.set_defaults(handler=_cmd_continuity)

    p = sub.add_parser("lift", help="smallest topology making a family continuous")
    p.add_argument("--algebra", required=True)
    p.add_argument("--ground", type=int, required=True)
    p.add_argument("--via", action="append", default=[], metavar="MAP:SPACE")
    p.set_defaults(handler=_cmd_lift)

    p = sub.add_parser("product-space", help="product of spaces (lift of projections)")
    p.add_argument("--spaces", nargs="+", required=True)
    p.set_defaults(handler=_cmd_product_space)

    p = sub.add_parser("sierpinski", help="ground Q, topology generated by the identity")
    p.add_argument("--algebra", required=True)
    p.set_defaults(handler=_cmd_sierpinski)

    p = sub.add_parser("enumerate", help="exhaustive censuses")
    esub = p.add_subparsers(dest="subcommand", required=True)
    ep = esub.add_parser("subalgebras", help="all non-empty closed subsets")
    ep.add_argument("--algebra", required=True)
    ep.set_defaults(handler=_cmd_enumerate_subalgebras)
    ep = esub.add_parser("topologies", help="all topologies on a ground set")
    ep.add_argument("--algebra", required=True)
    ep.add_argument("--ground", type=int, required=True)
    ep.add_argument("--strategy", choices=STRATEGIES, default="both")
    ep.set_defaults(handler=_cmd_enumerate_topologies)

    p = sub.add_parser("verify", help="run one of the named checks")
    p.add_argument("target", choices=VERIFY_TARGETS)
    p.add_argument("--adapter", help="adapter name or KIND[:ALGEBRA[:SEED]]")
    p.add_argument("--algebra", help="for space suites: enumerate spaces over this algebra")
    p.add_argument("--space", help="for space suites: a single named space")
    p.add_argument("--max-ground", type=int, default=2)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("report", help="re-render saved machine reports")
    p.add_argument("--input", default="-", help="JSONL file or - for stdin")
    p.set_defaults(handler=_cmd_report)

    return parser


def _load_workspace(path: str | None) -> Workspace:
    ws = builtin_workspace()
    if path is None:
        return ws
    with open(path, "r", encoding="utf-8") as handle:
        parsed = parse_workspace(handle.read())
    ws.algebras.update(parsed.algebras)
    ws.spaces.update(parsed.spaces)
    ws.maps.update(parsed.maps)
    ws.adapters.update(parsed.adapters)
    ws.budget = parsed.budget
    return ws


def _print_outcomes(outcomes: Sequence[Outcome], fmt: str) -> None:
    if fmt in ("text", "both"):
        for outcome in outcomes:
            rep = outcome.report
            for line in outcome.lines:
                print(line)
            stats = " ".join(f"{k}={v}" for k, v in rep.stats.items())
            suffix = f" ({stats})" if stats else ""
            print(f"{rep.check_name}: {rep.verdict}{suffix}")
            if rep.witness is not None:
                print(f"  witness: {json.dumps(rep.witness)}")
    if fmt in ("machine", "both"):
        for outcome in outcomes:
            obj = outcome.report.to_dict()
            if outcome.result is not None:
                obj["result"] = outcome.result
            print(json.dumps(obj))


def run_command(
    ws: Workspace, argv: Sequence[str], budget: EnumerationBudget | None = None
) -> tuple[list[Outcome], int]:
    """Run one command against a workspace; returns outcomes and exit status.

    The same dispatch the CLI uses, exposed for embedding and tests, with
    errors propagating as exceptions instead of exit codes. `argv` holds
    the command tokens, e.g. ["sierpinski", "--algebra", "BOOL2"].
    """
    parser = build_parser()
    args = parser.parse_args(list(argv))
    if budget is None:
        budget = ws.budget
    outcomes = args.handler(ws, args, budget)
    status = 1 if any(o.report.verdict == FAIL for o in outcomes) else 0
    return outcomes, status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = _load_workspace(args.workspace)
        budget = ws.budget
        overrides = {}
        if args.max_subset_space is not None:
            overrides["max_subset_space"] = args.max_subset_space
        if args.max_carrier is not None:
            overrides["max_carrier"] = args.max_carrier
        if overrides:
            budget = EnumerationBudget(
                max_subset_space=overrides.get("max_subset_space", budget.max_subset_space),
                max_carrier=overrides.get("max_carrier", budget.max_carrier),
            )
        outcomes = args.handler(ws, args, budget)
    except (ParseError, WorkspaceError, CommandError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return 2
    _print_outcomes(outcomes, args.format)
    return 1 if any(o.report.verdict == FAIL for o in outcomes) else 0


def entry() -> None:
    raise SystemExit(main())
