"""Finite algebras over integer carriers.

Carrier elements are the indices 0..size-1, optionally decorated with
display labels. Operation tables are flat tuples in row-major argument
order (first argument most significant), which keeps equality, hashing and
serialization canonical. Everything here is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import BudgetExceeded, EmptyGeneratorsNoConstants

# Power and product carriers are materialized eagerly; this cap keeps an
# accidental `power_algebra(Q, 20)` from eating the machine.
DEFAULT_CARRIER_CAP = 4096


def _check_token(token: str, what: str) -> None:
    if not token or any(ch.isspace() for ch in token):
        raise ValueError(f"{what} must be a non-empty token without whitespace: {token!r}")


@dataclass(frozen=True, order=True)
class FnTable:
    """A total function between finite index sets, stored by its value list.

    Doubles as: a point of a power carrier, a map between ground sets, a
    preimage, and a projection. Ordering is lexicographic on
    (dom_size, cod_size, values); within one function space that is
    lexicographic on values, the canonical order used everywhere.
    """

    dom_size: int
    cod_size: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.dom_size < 0:
            raise ValueError("dom_size must be >= 0")
        if self.cod_size < 1:
            raise ValueError("cod_size must be >= 1")
        values = tuple(self.values)
        if values is not self.values:
            object.__setattr__(self, "values", values)
        if len(values) != self.dom_size:
            raise ValueError(f"expected {self.dom_size} values, got {len(values)}")
        for v in values:
            if not (0 <= v < self.cod_size):
                raise ValueError(f"value {v} out of range for codomain of size {self.cod_size}")

    def __call__(self, x: int) -> int:
        return self.values[x]

    @staticmethod
    def identity(n: int) -> "FnTable":
        return FnTable(n, n, tuple(range(n)))

    @staticmethod
    def constant(dom_size: int, cod_size: int, value: int) -> "FnTable":
        return FnTable(dom_size, cod_size, (value,) * dom_size)


def compose(outer: FnTable, inner: FnTable) -> FnTable:
    """outer after inner."""
    if inner.cod_size != outer.dom_size:
        raise ValueError(
            f"cannot compose: inner codomain {inner.cod_size} != outer domain {outer.dom_size}"
        )
    return FnTable(inner.dom_size, outer.cod_size, tuple(outer.values[v] for v in inner.values))


def fn_index(fn: FnTable) -> int:
    """Position of `fn` in the lexicographic enumeration of its function space."""
    idx = 0
    for v in fn.values:
        idx = idx * fn.cod_size + v
    return idx


def fn_at(index: int, dom_size: int, cod_size: int) -> FnTable:
    """Inverse of fn_index."""
    if not (0 <= index < cod_size**dom_size):
        raise ValueError(f"index {index} out of range for {cod_size}^{dom_size} functions")
    values = [0] * dom_size
    for pos in range(dom_size - 1, -1, -1):
        index, values[pos] = divmod(index, cod_size)
    return FnTable(dom_size, cod_size, tuple(values))


def fn_token(fn: FnTable, labels: Sequence[str] | None = None) -> str:
    """Render a function as a value string over codomain labels.

    Single-character labels concatenate ("0110"); anything longer joins with
    commas. The empty function renders as "()".
    """
    if labels is None:
        labels = [str(i) for i in range(fn.cod_size)]
    if not fn.values:
        return "()"
    parts = [labels[v] for v in fn.values]
    if all(len(p) == 1 for p in parts):
        return "".join(parts)
    return ",".join(parts)


def fn_from_token(token: str, dom_size: int, labels_or_cod: Sequence[str] | int) -> FnTable:
    """Parse the output of fn_token back into a FnTable."""
    if isinstance(labels_or_cod, int):
        labels = [str(i) for i in range(labels_or_cod)]
    else:
        labels = list(labels_or_cod)
    cod_size = len(labels)
    if token == "()":
        return FnTable(0, cod_size, ())
    parts = token.split(",") if "," in token else list(token)
    index = {lab: i for i, lab in enumerate(labels)}
    try:
        values = tuple(index[p] for p in parts)
    except KeyError as exc:
        raise ValueError(f"unknown carrier label {exc.args[0]!r} in {token!r}") from None
    if len(values) != dom_size:
        raise ValueError(f"{token!r} has {len(values)} values, expected {dom_size}")
    return FnTable(dom_size, cod_size, values)


@dataclass(frozen=True, order=True)
class Subset:
    """A canonically ordered subset of a carrier 0..of_size-1."""

    of_size: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.of_size < 0:
            raise ValueError("of_size must be >= 0")
        members = tuple(self.members)
        if members is not self.members:
            object.__setattr__(self, "members", members)
        for prev, cur in zip(members, members[1:]):
            if prev >= cur:
                raise ValueError("members must be strictly increasing")
        if members and not (members[0] >= 0 and members[-1] < self.of_size):
            raise ValueError("member out of carrier range")

    @classmethod
    def of(cls, of_size: int, items: Iterable[int]) -> "Subset":
        return cls(of_size, tuple(sorted(set(items))))

    def __contains__(self, item: int) -> bool:
        return item in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Signature:
    """An ordered list of operation symbols with finite arities."""

    ops: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        ops = tuple((str(sym), int(ar)) for sym, ar in self.ops)
        if ops is not self.ops:
            object.__setattr__(self, "ops", ops)
        seen = set()
        for sym, ar in ops:
            _check_token(sym, "operation symbol")
            if ar < 0:
                raise ValueError(f"arity of {sym!r} must be >= 0")
            if sym in seen:
                raise ValueError(f"duplicate operation symbol {sym!r}")
            seen.add(sym)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "Signature":
        return cls(tuple(pairs))

    def __contains__(self, symbol: str) -> bool:
        return any(sym == symbol for sym, _ in self.ops)

    def arity(self, symbol: str) -> int:
        for sym, ar in self.ops:
            if sym == symbol:
                return ar
        raise ValueError(f"unknown operation symbol {symbol!r}")

    def nullaries(self) -> tuple[str, ...]:
        return tuple(sym for sym, ar in self.ops if ar == 0)

    def symbols(self) -> tuple[str, ...]:
        return tuple(sym for sym, _ in self.ops)


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite carrier with one total operation table per signature symbol.

    `tables` is parallel to `sig.ops`; each table is flat, row-major in the
    arguments, so `tables[i][a0 * size**(k-1) + ... + a(k-1)]` is the value
    at (a0, ..., a(k-1)).
    """

    sig: Signature
    size: int
    tables: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("carrier size must be >= 1")
        tables = tuple(tuple(t) for t in self.tables)
        if tables is not self.tables:
            object.__setattr__(self, "tables", tables)
        if len(tables) != len(self.sig.ops):
            raise ValueError(
                f"expected {len(self.sig.ops)} tables, got {len(tables)}"
            )
        for (sym, ar), table in zip(self.sig.ops, tables):
            want = self.size**ar
            if len(table) != want:
                raise ValueError(
                    f"table for {sym!r} is not total: has {len(table)} entries, needs {want}"
                )
            for out in table:
                if not (0 <= out < self.size):
                    raise ValueError(
                        f"table for {sym!r} has output {out} outside carrier of size {self.size}"
                    )
        if self.labels is not None:
            labels = tuple(str(l) for l in self.labels)
            if labels is not self.labels:
                object.__setattr__(self, "labels", labels)
            if len(labels) != self.size:
                raise ValueError("labels must match carrier size")
            for lab in labels:
                _check_token(lab, "carrier label")
            if len(set(labels)) != len(labels):
                raise ValueError("carrier labels must be distinct")

    def table(self, symbol: str) -> tuple[int, ...]:
        for (sym, _), tab in zip(self.sig.ops, self.tables):
            if sym == symbol:
                return tab
        raise ValueError(f"unknown operation symbol {symbol!r}")

    def apply(self, symbol: str, args: Sequence[int]) -> int:
        return apply_op(self, symbol, args)

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return str(i)

    def all_labels(self) -> tuple[str, ...]:
        return tuple(self.label(i) for i in range(self.size))

    def label_index(self, token: str) -> int:
        for i in range(self.size):
            if self.label(i) == token:
                return i
        raise ValueError(f"unknown carrier label {token!r}")

    def constants(self) -> tuple[int, ...]:
        """Sorted values of all nullary operations."""
        return tuple(sorted({self.table(sym)[0] for sym in self.sig.nullaries()}))


def _flatten_table(raw: object, size: int, arity: int, symbol: str) -> tuple[int, ...]:
    if arity == 0:
        if isinstance(raw, int):
            return (raw,)
        seq = list(raw)  # type: ignore[arg-type]
        if len(seq) != 1 or not isinstance(seq[0], int):
            raise ValueError(f"nullary table for {symbol!r} must be a single carrier index")
        return (seq[0],)
    seq = list(raw)  # type: ignore[arg-type]
    if all(isinstance(x, int) for x in seq):
        if len(seq) != size**arity:
            raise ValueError(
                f"table for {symbol!r} is not total: has {len(seq)} entries, needs {size**arity}"
            )
        return tuple(seq)
    # nested form: one level of nesting per argument
    if len(seq) != size:
        raise ValueError(f"nested table for {symbol!r} must have {size} rows per level")
    out: list[int] = []
    for row in seq:
        out.extend(_flatten_table(row, size, arity - 1, symbol))
    return tuple(out)


def make_algebra(
    sig: Signature | Iterable[tuple[str, int]],
    size: int,
    tables: Mapping[str, object] | Sequence[object],
    labels: Sequence[str] | None = None,
) -> FiniteAlgebra:
    """Build and validate a finite algebra from raw operation tables.

    `tables` is either a mapping symbol -> table or a sequence aligned with
    the signature. A table is a flat row-major list, a nested list, or for
    nullary symbols a bare carrier index.
    """
    if not isinstance(sig, Signature):
        sig = Signature(tuple(sig))
    if size < 1:
        raise ValueError("carrier size must be >= 1")
    raw_tables: list[object] = []
    if isinstance(tables, Mapping):
        extra = set(tables) - set(sig.symbols())
        if extra:
            raise ValueError(f"tables given for unknown symbols: {sorted(extra)}")
        for sym, _ in sig.ops:
            if sym not in tables:
                raise ValueError(f"missing table for symbol {sym!r}")
            raw_tables.append(tables[sym])
    else:
        seq = list(tables)
        if len(seq) != len(sig.ops):
            raise ValueError(f"expected {len(sig.ops)} tables, got {len(seq)}")
        raw_tables = seq
    flat = tuple(
        _flatten_table(raw, size, ar, sym)
        for (sym, ar), raw in zip(sig.ops, raw_tables)
    )
    return FiniteAlgebra(sig, size, flat, tuple(labels) if labels is not None else None)


def apply_op(algebra: FiniteAlgebra, symbol: str, args: Sequence[int]) -> int:
    """Look up one operation application."""
    arity = algebra.sig.arity(symbol)
    if len(args) != arity:
        raise ValueError(f"{symbol!r} takes {arity} arguments, got {len(args)}")
    idx = 0
    for a in args:
        if not (0 <= a < algebra.size):
            raise ValueError(f"argument {a} outside carrier of size {algebra.size}")
        idx = idx * algebra.size + a
    return algebra.table(symbol)[idx]


def is_closed_subset(algebra: FiniteAlgebra, subset: Subset) -> bool:
    """True iff `subset` is non-empty and closed under every operation."""
    if subset.of_size != algebra.size:
        raise ValueError("subset is not over this algebra's carrier")
    if not subset.members:
        return False
    members = frozenset(subset.members)
    for sym, arity in algebra.sig.ops:
        table = algebra.table(sym)
        for args in product(subset.members, repeat=arity):
            idx = 0
            for a in args:
                idx = idx * algebra.size + a
            if table[idx] not in members:
                return False
    return True


def generate_subalgebra(algebra: FiniteAlgebra, seed: Subset) -> Subset:
    """Least closed superset of `seed`, by worklist fixpoint.

    Nullary constants always enter the closure, so the empty seed is fine as
    long as the signature has at least one nullary symbol.
    """
    if seed.of_size != algebra.size:
        raise ValueError("seed is not over this algebra's carrier")
    members = set(seed.members)
    for sym in algebra.sig.nullaries():
        members.add(algebra.table(sym)[0])
    if not members:
        raise EmptyGeneratorsNoConstants(
            "cannot close the empty set: signature has no nullary symbols"
        )
    frontier = set(members)
    positive = [(sym, ar) for sym, ar in algebra.sig.ops if ar > 0]
    while frontier:
        added: set[int] = set()
        snapshot = sorted(members)
        for sym, arity in positive:
            table = algebra.table(sym)
            for args in product(snapshot, repeat=arity):
                if frontier.isdisjoint(args):
                    continue
                idx = 0
                for a in args:
                    idx = idx * algebra.size + a
                out = table[idx]
                if out not in members:
                    added.add(out)
        members |= added
        frontier = added
    return Subset.of(algebra.size, members)


def homomorphism_witness(
    f: FnTable, dom: FiniteAlgebra, cod: FiniteAlgebra
) -> dict | None:
    """None if f commutes with every operation, else the first violation."""
    if dom.sig != cod.sig:
        raise ValueError("algebras do not share a signature")
    if f.dom_size != dom.size or f.cod_size != cod.size:
        raise ValueError("map sizes do not match the algebras")
    for sym, arity in dom.sig.ops:
        for args in product(range(dom.size), repeat=arity):
            lhs = f.values[apply_op(dom, sym, args)]
            rhs = apply_op(cod, sym, tuple(f.values[a] for a in args))
            if lhs != rhs:
                return {"symbol": sym, "args": list(args), "mapped_then_applied": rhs, "applied_then_mapped": lhs}
    return None


def is_homomorphism(f: FnTable, dom: FiniteAlgebra, cod: FiniteAlgebra) -> bool:
    return homomorphism_witness(f, dom, cod) is None


def power_elements(algebra: FiniteAlgebra, exponent_size: int) -> tuple[FnTable, ...]:
    """All functions exponent -> carrier, in canonical lexicographic order."""
    return tuple(
        FnTable(exponent_size, algebra.size, values)
        for values in product(range(algebra.size), repeat=exponent_size)
    )


def power_algebra(
    algebra: FiniteAlgebra, exponent_size: int, max_carrier: int = DEFAULT_CARRIER_CAP
) -> FiniteAlgebra:
    """The pointwise power: carrier = functions exponent -> carrier.

    Carrier index i corresponds to fn_at(i, exponent_size, |algebra|); the
    element labels are the fn_token strings, so carrier members print as
    value strings like "01".
    """
    if exponent_size < 0:
        raise ValueError("exponent must be >= 0")
    carrier = algebra.size**exponent_size
    if carrier > max_carrier:
        raise BudgetExceeded(
            f"power carrier {algebra.size}^{exponent_size} = {carrier} exceeds cap {max_carrier}"
        )
    points = list(product(range(algebra.size), repeat=exponent_size))
    labels = tuple(
        fn_token(FnTable(exponent_size, algebra.size, vt), algebra.all_labels())
        for vt in points
    )
    index_of = {vt: i for i, vt in enumerate(points)}
    tables = []
    for sym, arity in algebra.sig.ops:
        flat = []
        for args in product(range(carrier), repeat=arity):
            vt = tuple(
                apply_op(algebra, sym, tuple(points[a][x] for a in args))
                for x in range(exponent_size)
            )
            flat.append(index_of[vt])
        tables.append(tuple(flat))
    return FiniteAlgebra(algebra.sig, carrier, tuple(tables), labels)


def product_algebra(
    factors: Sequence[FiniteAlgebra], max_carrier: int = DEFAULT_CARRIER_CAP
) -> FiniteAlgebra:
    """Componentwise product; carrier = tuples, row-major, last factor fastest."""
    if not factors:
        raise ValueError("product needs at least one factor")
    sig = factors[0].sig
    for other in factors[1:]:
        if other.sig != sig:
            raise ValueError("product factors do not share a signature")
    sizes = [a.size for a in factors]
    carrier = 1
    for n in sizes:
        carrier *= n
    if carrier > max_carrier:
        raise BudgetExceeded(f"product carrier {carrier} exceeds cap {max_carrier}")

    def decode(idx: int) -> tuple[int, ...]:
        out = [0] * len(sizes)
        for pos in range(len(sizes) - 1, -1, -1):
            idx, out[pos] = divmod(idx, sizes[pos])
        return tuple(out)

    def encode(tup: Sequence[int]) -> int:
        idx = 0
        for x, n in zip(tup, sizes):
            idx = idx * n + x
        return idx

    points = [decode(i) for i in range(carrier)]
    labels = tuple(
        "(" + ",".join(a.label(x) for a, x in zip(factors, tup)) + ")" for tup in points
    )
    tables = []
    for sym, arity in sig.ops:
        flat = []
        for args in product(range(carrier), repeat=arity):
            tup = tuple(
                apply_op(factors[pos], sym, tuple(points[a][pos] for a in args))
                for pos in range(len(factors))
            )
            flat.append(encode(tup))
        tables.append(tuple(flat))
    return FiniteAlgebra(sig, carrier, tuple(tables), labels)


# The two stock algebras used throughout the test fixtures and the CLI
# builtins: the two-element bounded lattice and the three-element chain.
BOOL2 = make_algebra(
    Signature.of(("meet", 2), ("join", 2), ("bot", 0), ("top", 0)),
    2,
    {"meet": [0, 0, 0, 1], "join": [0, 1, 1, 1], "bot": 0, "top": 1},
)

CHAIN3 = make_algebra(
    Signature.of(("min", 2), ("max", 2), ("bot", 0), ("top", 0)),
    3,
    {
        "min": [0, 0, 0, 0, 1, 1, 0, 1, 2],
        "max": [0, 1, 2, 1, 1, 2, 2, 2, 2],
        "bot": 0,
        "top": 2,
    },
)
