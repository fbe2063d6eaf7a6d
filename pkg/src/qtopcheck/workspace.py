"""Workspace files: named algebras, spaces, maps, adapters, and budgets.

Two front-ends parse to the same validated Workspace: a line-oriented block
format (diff-friendly, the canonical serialization) and a JSON object tree.
Operation tables are flat value lists in row-major argument order; opens
and other carrier-valued functions are written as value strings over the
carrier labels ("01", or comma-joined for multi-character labels).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .algebra import FiniteAlgebra, FnTable, Signature, fn_from_token, fn_token, make_algebra
from .enumeration import DEFAULT_BUDGET, EnumerationBudget
from .qtop import QSpace, QTopology
from .structcat import ADAPTER_KINDS

BLOCK_KINDS = ("algebra", "space", "map", "adapter", "budget")


class WorkspaceError(ValueError):
    """A workspace failed validation (bad invariant, dangling reference)."""


class ParseError(WorkspaceError):
    """Syntax error, with 1-based line and column."""

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class AdapterRef:
    """A named reference to a registry adapter."""

    kind: str
    algebra: str | None = None
    seed: int = 0


@dataclass
class Workspace:
    algebras: dict[str, FiniteAlgebra] = field(default_factory=dict)
    spaces: dict[str, QSpace] = field(default_factory=dict)
    maps: dict[str, FnTable] = field(default_factory=dict)
    adapters: dict[str, AdapterRef] = field(default_factory=dict)
    budget: EnumerationBudget = DEFAULT_BUDGET


def builtin_workspace() -> Workspace:
    """The algebras every CLI invocation can rely on."""
    from .algebra import BOOL2, CHAIN3

    return Workspace(algebras={"BOOL2": BOOL2, "CHAIN3": CHAIN3})


# ---------------------------------------------------------------------------
# line format


def _tokenize(line: str) -> list[tuple[int, str]]:
    """(column, token) pairs; '#' starts a comment."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


@dataclass
class _Block:
    kind: str
    name: str | None
    line: int
    directives: list[tuple[int, list[tuple[int, str]]]] = field(default_factory=list)


def _collect_blocks(text: str) -> list[_Block]:
    blocks: list[_Block] = []
    current: _Block | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        tokens = _tokenize(raw)
        if not tokens:
            continue
        col, head = tokens[0]
        if current is None:
            if head not in BLOCK_KINDS:
                raise ParseError(lineno, col, f"expected a block header, got {head!r}")
            if head == "budget":
                if len(tokens) != 1:
                    raise ParseError(lineno, tokens[1][0], "budget block takes no name")
                current = _Block(head, None, lineno)
            else:
                if len(tokens) != 2:
                    raise ParseError(lineno, col, f"{head} header needs exactly one name")
                current = _Block(head, tokens[1][1], lineno)
        elif head == "end":
            if len(tokens) != 1:
                raise ParseError(lineno, tokens[1][0], "'end' takes no arguments")
            blocks.append(current)
            current = None
        else:
            current.directives.append((lineno, tokens))
    if current is not None:
        raise ParseError(current.line, 1, f"unterminated {current.kind} block")
    return blocks


def _directive_map(block: _Block, allowed: set[str]) -> dict[str, tuple[int, list[str]]]:
    out: dict[str, tuple[int, list[str]]] = {}
    for lineno, tokens in block.directives:
        col, key = tokens[0]
        if key not in allowed:
            raise ParseError(lineno, col, f"unknown directive {key!r} in {block.kind} block")
        if key in out:
            raise ParseError(lineno, col, f"duplicate directive {key!r}")
        out[key] = (lineno, [t for _, t in tokens[1:]])
    return out


def _int_arg(block: _Block, entry: tuple[int, list[str]], what: str) -> int:
    lineno, args = entry
    if len(args) != 1 or not re.fullmatch(r"-?\d+", args[0]):
        raise ParseError(lineno, 1, f"{what} needs a single integer argument")
    return int(args[0])


def _build_algebra(block: _Block) -> FiniteAlgebra:
    size: int | None = None
    labels: list[str] | None = None
    ops: list[tuple[str, int]] = []
    tables: dict[str, list[int]] = {}
    for lineno, tokens in block.directives:
        col, key = tokens[0]
        args = [t for _, t in tokens[1:]]
        if key == "size":
            size = _int_arg(block, (lineno, args), "size")
        elif key == "labels":
            labels = args
        elif key == "op":
            if len(args) < 3 or args[2] != "=":
                raise ParseError(lineno, col, "op directive is: op SYMBOL ARITY = VALUES...")
            sym = args[0]
            if not re.fullmatch(r"\d+", args[1]):
                raise ParseError(lineno, col, f"arity of {sym!r} must be an integer")
            try:
                values = [int(v) for v in args[3:]]
            except ValueError:
                raise ParseError(lineno, col, f"table for {sym!r} must be integers") from None
            ops.append((sym, int(args[1])))
            tables[sym] = values
        else:
            raise ParseError(lineno, col, f"unknown directive {key!r} in algebra block")
    if size is None:
        raise WorkspaceError(f"algebra {block.name!r}: missing size")
    try:
        return make_algebra(Signature(tuple(ops)), size, tables, labels)
    except ValueError as exc:
        raise WorkspaceError(f"algebra {block.name!r}: {exc}") from exc


def _build_map(block: _Block) -> FnTable:
    entries = _directive_map(block, {"dom", "cod", "values"})
    for needed in ("dom", "cod"):
        if needed not in entries:
            raise WorkspaceError(f"map {block.name!r}: missing {needed}")
    dom = _int_arg(block, entries["dom"], "dom")
    cod = _int_arg(block, entries["cod"], "cod")
    raw = entries.get("values", (block.line, []))[1]
    try:
        values = tuple(int(v) for v in raw)
    except ValueError:
        raise WorkspaceError(f"map {block.name!r}: values must be integers") from None
    try:
        return FnTable(dom, cod, values)
    except ValueError as exc:
        raise WorkspaceError(f"map {block.name!r}: {exc}") from exc


def _build_space(block: _Block, algebras: dict[str, FiniteAlgebra]) -> QSpace:
    entries = _directive_map(block, {"over", "ground", "opens"})
    for needed in ("over", "ground"):
        if needed not in entries:
            raise WorkspaceError(f"space {block.name!r}: missing {needed}")
    over = entries["over"][1]
    if len(over) != 1:
        raise WorkspaceError(f"space {block.name!r}: 'over' needs one algebra name")
    if over[0] not in algebras:
        raise WorkspaceError(f"space {block.name!r}: unknown algebra {over[0]!r}")
    q = algebras[over[0]]
    ground = _int_arg(block, entries["ground"], "ground")
    tokens = entries.get("opens", (block.line, []))[1]
    try:
        opens = tuple(fn_from_token(tok, ground, q.all_labels()) for tok in tokens)
        topology = QTopology(q, ground, opens)
    except ValueError as exc:
        raise WorkspaceError(f"space {block.name!r}: {exc}") from exc
    return QSpace(ground, topology)


def _build_adapter(block: _Block) -> AdapterRef:
    entries = _directive_map(block, {"kind", "over", "seed"})
    if "kind" not in entries:
        raise WorkspaceError(f"adapter {block.name!r}: missing kind")
    kind = entries["kind"][1]
    if len(kind) != 1 or kind[0] not in ADAPTER_KINDS:
        raise WorkspaceError(
            f"adapter {block.name!r}: kind must be one of {', '.join(ADAPTER_KINDS)}"
        )
    algebra = None
    if "over" in entries:
        over = entries["over"][1]
        if len(over) != 1:
            raise WorkspaceError(f"adapter {block.name!r}: 'over' needs one algebra name")
        algebra = over[0]
    seed = _int_arg(block, entries["seed"], "seed") if "seed" in entries else 0
    return AdapterRef(kind[0], algebra, seed)


def _build_budget(block: _Block) -> EnumerationBudget:
    entries = _directive_map(block, {"max-subset-space", "max-carrier"})
    kwargs = {}
    if "max-subset-space" in entries:
        kwargs["max_subset_space"] = _int_arg(block, entries["max-subset-space"], "max-subset-space")
    if "max-carrier" in entries:
        kwargs["max_carrier"] = _int_arg(block, entries["max-carrier"], "max-carrier")
    try:
        return EnumerationBudget(**kwargs)
    except ValueError as exc:
        raise WorkspaceError(f"budget: {exc}") from exc


def _assemble(blocks: list[_Block]) -> Workspace:
    ws = Workspace()
    if sum(1 for b in blocks if b.kind == "budget") > 1:
        raise WorkspaceError("multiple budget blocks")
    for kind in ("algebra", "map", "space", "adapter", "budget"):
        for block in blocks:
            if block.kind != kind:
                continue
            if block.name is not None:
                store = {
                    "algebra": ws.algebras,
                    "map": ws.maps,
                    "space": ws.spaces,
                    "adapter": ws.adapters,
                }[kind]
                if block.name in store:
                    raise WorkspaceError(f"duplicate {kind} name {block.name!r}")
            if kind == "algebra":
                ws.algebras[block.name] = _build_algebra(block)
            elif kind == "map":
                ws.maps[block.name] = _build_map(block)
            elif kind == "space":
                ws.spaces[block.name] = _build_space(block, ws.algebras)
            elif kind == "adapter":
                ref = _build_adapter(block)
                if ref.algebra is not None and ref.algebra not in ws.algebras:
                    raise WorkspaceError(
                        f"adapter {block.name!r}: unknown algebra {ref.algebra!r}"
                    )
                ws.adapters[block.name] = ref
            else:
                ws.budget = _build_budget(block)
    return ws


# ---------------------------------------------------------------------------
# JSON front-end


def _from_json(obj: dict) -> Workspace:
    if not isinstance(obj, dict):
        raise WorkspaceError("JSON workspace must be an object")
    known = {"algebras", "spaces", "maps", "adapters", "budget"}
    extra = set(obj) - known
    if extra:
        raise WorkspaceError(f"unknown workspace keys: {sorted(extra)}")
    ws = Workspace()
    for name, spec in (obj.get("algebras") or {}).items():
        sig = Signature(tuple((op["symbol"], op["arity"]) for op in spec["ops"]))
        tables = {op["symbol"]: op["table"] for op in spec["ops"]}
        try:
            ws.algebras[name] = make_algebra(sig, spec["size"], tables, spec.get("labels"))
        except ValueError as exc:
            raise WorkspaceError(f"algebra {name!r}: {exc}") from exc
    for name, spec in (obj.get("maps") or {}).items():
        try:
            ws.maps[name] = FnTable(spec["dom"], spec["cod"], tuple(spec["values"]))
        except ValueError as exc:
            raise WorkspaceError(f"map {name!r}: {exc}") from exc
    for name, spec in (obj.get("spaces") or {}).items():
        over = spec["over"]
        if over not in ws.algebras:
            raise WorkspaceError(f"space {name!r}: unknown algebra {over!r}")
        q = ws.algebras[over]
        ground = spec["ground"]
        try:
            opens = tuple(
                fn_from_token(tok, ground, q.all_labels()) for tok in spec.get("opens", [])
            )
            ws.spaces[name] = QSpace(ground, QTopology(q, ground, opens))
        except ValueError as exc:
            raise WorkspaceError(f"space {name!r}: {exc}") from exc
    for name, spec in (obj.get("adapters") or {}).items():
        kind = spec["kind"]
        if kind not in ADAPTER_KINDS:
            raise WorkspaceError(
                f"adapter {name!r}: kind must be one of {', '.join(ADAPTER_KINDS)}"
            )
        algebra = spec.get("over")
        if algebra is not None and algebra not in ws.algebras:
            raise WorkspaceError(f"adapter {name!r}: unknown algebra {algebra!r}")
        ws.adapters[name] = AdapterRef(kind, algebra, spec.get("seed", 0))
    if "budget" in obj and obj["budget"] is not None:
        spec = obj["budget"]
        try:
            ws.budget = EnumerationBudget(
                max_subset_space=spec.get("max_subset_space", DEFAULT_BUDGET.max_subset_space),
                max_carrier=spec.get("max_carrier", DEFAULT_BUDGET.max_carrier),
            )
        except ValueError as exc:
            raise WorkspaceError(f"budget: {exc}") from exc
    return ws


def parse_workspace(text: str) -> Workspace:
    """Parse either front-end; empty input is an empty workspace."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.colno, exc.msg) from exc
        return _from_json(obj)
    return _assemble(_collect_blocks(text))


# ---------------------------------------------------------------------------
# serialization


def _algebra_name(ws: Workspace, algebra: FiniteAlgebra, context: str) -> str:
    for name, candidate in ws.algebras.items():
        if candidate == algebra:
            return name
    raise WorkspaceError(f"{context}: its algebra is not registered in the workspace")


def serialize_workspace(ws: Workspace) -> str:
    """Canonical text form; parsing it back yields an equal workspace."""
    lines: list[str] = []
    for name in sorted(ws.algebras):
        a = ws.algebras[name]
        lines.append(f"algebra {name}")
        lines.append(f"  size {a.size}")
        if a.labels is not None:
            lines.append("  labels " + " ".join(a.labels))
        for (sym, arity), table in zip(a.sig.ops, a.tables):
            lines.append(f"  op {sym} {arity} = " + " ".join(str(v) for v in table))
        lines.append("end")
        lines.append("")
    for name in sorted(ws.maps):
        fn = ws.maps[name]
        lines.append(f"map {name}")
        lines.append(f"  dom {fn.dom_size}")
        lines.append(f"  cod {fn.cod_size}")
        lines.append("  values " + " ".join(str(v) for v in fn.values))
        lines.append("end")
        lines.append("")
    for name in sorted(ws.spaces):
        space = ws.spaces[name]
        over = _algebra_name(ws, space.q, f"space {name!r}")
        lines.append(f"space {name}")
        lines.append(f"  over {over}")
        lines.append(f"  ground {space.ground_size}")
        lines.append("  opens " + " ".join(space.topology.tokens()))
        lines.append("end")
        lines.append("")
    for name in sorted(ws.adapters):
        ref = ws.adapters[name]
        lines.append(f"adapter {name}")
        lines.append(f"  kind {ref.kind}")
        if ref.algebra is not None:
            lines.append(f"  over {ref.algebra}")
        if ref.seed:
            lines.append(f"  seed {ref.seed}")
        lines.append("end")
        lines.append("")
    if ws.budget != DEFAULT_BUDGET:
        lines.append("budget")
        lines.append(f"  max-subset-space {ws.budget.max_subset_space}")
        lines.append(f"  max-carrier {ws.budget.max_carrier}")
        lines.append("end")
        lines.append("")
    return "\n".join(lines)
