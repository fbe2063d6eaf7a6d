"""Topologies on finite ground sets, valued in a finite algebra Q.

A topology here is a set of "opens": functions ground -> Q closed under the
pointwise operations of Q, i.e. a subalgebra of the power carrier Q^ground.
Continuity of f is the pullback condition: every open of the codomain
composes with f into an open of the domain.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from itertools import product
from typing import Iterable, Sequence

from .algebra import (
    DEFAULT_CARRIER_CAP,
    FiniteAlgebra,
    FnTable,
    Subset,
    apply_op,
    compose,
    fn_at,
    fn_index,
    fn_token,
    generate_subalgebra,
    power_algebra,
)
from .enumeration import DEFAULT_BUDGET, EnumerationBudget, all_functions, all_q_topologies
from .report import FAIL, PASS, Report


def pointwise_apply(
    q: FiniteAlgebra, symbol: str, fns: Sequence[FnTable], ground_size: int
) -> FnTable:
    """Apply one Q-operation pointwise to functions ground -> Q."""
    for fn in fns:
        if fn.dom_size != ground_size or fn.cod_size != q.size:
            raise ValueError("function does not live in Q^ground")
    values = tuple(
        apply_op(q, symbol, tuple(fn.values[x] for fn in fns)) for x in range(ground_size)
    )
    return FnTable(ground_size, q.size, values)


def closure_witness(
    q: FiniteAlgebra, ground_size: int, opens: Sequence[FnTable]
) -> dict | None:
    """First pointwise combination that escapes `opens`, or None if closed.

    An empty family is reported as a violation: topologies are non-empty.
    """
    if not opens:
        return {"reason": "empty", "detail": "a topology must be non-empty"}
    members = frozenset(opens)
    ordered = sorted(opens)
    for sym, arity in q.sig.ops:
        for args in product(ordered, repeat=arity):
            combined = pointwise_apply(q, sym, args, ground_size)
            if combined not in members:
                return {
                    "symbol": sym,
                    "args": [fn_token(fn, q.all_labels()) for fn in args],
                    "result": fn_token(combined, q.all_labels()),
                }
    return None


def is_q_topology(
    q: FiniteAlgebra, ground_size: int, opens: Iterable[FnTable]
) -> bool:
    """True iff `opens` is a non-empty pointwise-closed subset of Q^ground."""
    opens = list(opens)
    for fn in opens:
        if fn.dom_size != ground_size or fn.cod_size != q.size:
            raise ValueError("open has wrong sizes for Q^ground")
    return closure_witness(q, ground_size, opens) is None


@dataclass(frozen=True)
class QTopology:
    """A set of opens, canonically ordered, closed under pointwise operations.

    Construction validates closure by default; pass validate=False to build
    a deliberately unchecked value (enumeration internals, negative-control
    tests).
    """

    q: FiniteAlgebra
    ground_size: int
    opens: tuple[FnTable, ...]
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        if self.ground_size < 0:
            raise ValueError("ground_size must be >= 0")
        opens = tuple(sorted(set(self.opens)))
        if opens is not self.opens:
            object.__setattr__(self, "opens", opens)
        for fn in opens:
            if fn.dom_size != self.ground_size or fn.cod_size != self.q.size:
                raise ValueError("open has wrong sizes for Q^ground")
        if validate:
            witness = closure_witness(self.q, self.ground_size, opens)
            if witness is not None:
                raise ValueError(f"opens are not a topology: {witness}")

    def __contains__(self, fn: FnTable) -> bool:
        return fn in self.opens

    def __len__(self) -> int:
        return len(self.opens)

    def member_set(self) -> frozenset[FnTable]:
        return frozenset(self.opens)

    def tokens(self) -> tuple[str, ...]:
        return tuple(fn_token(fn, self.q.all_labels()) for fn in self.opens)

    def space(self) -> "QSpace":
        return QSpace(self.ground_size, self)


@dataclass(frozen=True)
class QSpace:
    """A ground set together with a topology on it."""

    ground_size: int
    topology: QTopology

    def __post_init__(self) -> None:
        if self.topology.ground_size != self.ground_size:
            raise ValueError("topology ground size does not match the space")

    @property
    def q(self) -> FiniteAlgebra:
        return self.topology.q


def generate_topology(
    q: FiniteAlgebra,
    ground_size: int,
    generators: Iterable[FnTable],
    max_carrier: int = DEFAULT_CARRIER_CAP,
) -> QTopology:
    """Smallest topology containing the generators.

    Computed as the generated subalgebra inside the power algebra; the
    result is re-validated through the independent pointwise route on
    construction.
    """
    gens = list(generators)
    for fn in gens:
        if fn.dom_size != ground_size or fn.cod_size != q.size:
            raise ValueError("generator has wrong sizes for Q^ground")
    power = power_algebra(q, ground_size, max_carrier=max_carrier)
    seed = Subset.of(power.size, (fn_index(fn) for fn in gens))
    closed = generate_subalgebra(power, seed)
    opens = tuple(fn_at(i, ground_size, q.size) for i in closed.members)
    return QTopology(q, ground_size, opens)


def preimage(f: FnTable, alpha: FnTable) -> FnTable:
    """Pullback of alpha along f: the composite alpha after f."""
    if f.cod_size != alpha.dom_size:
        raise ValueError("preimage: map codomain does not match open's domain")
    return compose(alpha, f)


def noncontinuity_witness(f: FnTable, dom: QSpace, cod: QSpace) -> dict | None:
    """First codomain open whose pullback escapes the domain topology."""
    if dom.q != cod.q:
        raise ValueError("spaces are over different algebras")
    if f.dom_size != dom.ground_size or f.cod_size != cod.ground_size:
        raise ValueError("map sizes do not match the spaces")
    members = dom.topology.member_set()
    labels = dom.q.all_labels()
    for alpha in cod.topology.opens:
        pulled = preimage(f, alpha)
        if pulled not in members:
            return {
                "open": fn_token(alpha, labels),
                "preimage": fn_token(pulled, labels),
            }
    return None


def is_continuous(f: FnTable, dom: QSpace, cod: QSpace) -> bool:
    """True iff every open of cod pulls back into dom's topology."""
    return noncontinuity_witness(f, dom, cod) is None


def optimal_lift(
    q: FiniteAlgebra,
    ground_size: int,
    family: Sequence[tuple[FnTable, QSpace]],
    max_carrier: int = DEFAULT_CARRIER_CAP,
) -> QTopology:
    """Smallest topology on the ground set making every family map continuous.

    Generated by all pullbacks of target opens. An empty family yields the
    constants-only topology when Q has nullary symbols, and raises
    EmptyGeneratorsNoConstants otherwise.
    """
    generators: list[FnTable] = []
    for f, target in family:
        if target.q != q:
            raise ValueError("lift target is over a different algebra")
        if f.dom_size != ground_size or f.cod_size != target.ground_size:
            raise ValueError("family map sizes do not match")
        for alpha in target.topology.opens:
            generators.append(preimage(f, alpha))
    return generate_topology(q, ground_size, generators, max_carrier=max_carrier)


def product_space(
    factors: Sequence[QSpace], max_carrier: int = DEFAULT_CARRIER_CAP
) -> QSpace:
    """Categorical product: tuple ground set, lift of all projections.

    Ground tuples are encoded row-major with the last factor varying
    fastest, which pins the projection tables.
    """
    if not factors:
        raise ValueError("product needs at least one factor")
    q = factors[0].q
    for space in factors[1:]:
        if space.q != q:
            raise ValueError("product factors are over different algebras")
    sizes = [space.ground_size for space in factors]
    projections = projection_maps(sizes)
    ground = projections[0].dom_size
    topology = optimal_lift(
        q, ground, list(zip(projections, factors)), max_carrier=max_carrier
    )
    return QSpace(ground, topology)


def projection_maps(factor_sizes: Sequence[int]) -> list[FnTable]:
    """Projection tables out of the row-major tuple encoding."""
    ground = 1
    for n in factor_sizes:
        ground *= n
    out = []
    for pos in range(len(factor_sizes)):
        stride = 1
        for n in factor_sizes[pos + 1 :]:
            stride *= n
        values = tuple(idx // stride % factor_sizes[pos] for idx in range(ground))
        out.append(FnTable(ground, factor_sizes[pos], values))
    return out


def sierpinski_space(
    q: FiniteAlgebra, max_carrier: int = DEFAULT_CARRIER_CAP
) -> QSpace:
    """Ground set Q itself, topology generated by the identity function."""
    identity = FnTable.identity(q.size)
    topology = generate_topology(q, q.size, [identity], max_carrier=max_carrier)
    return QSpace(q.size, topology)


def check_membership_continuity(
    space: QSpace, budget: EnumerationBudget = DEFAULT_BUDGET
) -> Report:
    """Membership in the topology must coincide with continuity into the
    Sierpinski space, for every candidate function ground -> Q."""
    q = space.q
    sierpinski = sierpinski_space(q, max_carrier=budget.max_carrier)
    members = space.topology.member_set()
    examined = 0
    for p in all_functions(space.ground_size, q.size, budget):
        examined += 1
        in_topology = p in members
        continuous = is_continuous(p, space, sierpinski)
        if in_topology != continuous:
            direction = (
                "open but not continuous" if in_topology else "continuous but not open"
            )
            return Report(
                "theorem-3.1",
                FAIL,
                witness={
                    "map": fn_token(p, q.all_labels()),
                    "in_topology": in_topology,
                    "continuous": continuous,
                    "direction": direction,
                },
                stats={"candidates": examined},
            )
    return Report("theorem-3.1", PASS, stats={"candidates": examined})


def check_sierpinski_smallest(
    space: QSpace, budget: EnumerationBudget = DEFAULT_BUDGET
) -> Report:
    """The topology must be the smallest one making all its continuous maps
    into the Sierpinski space continuous.

    Runs two formulations and requires both: the topology equals the
    optimal lift of that family, and by exhaustion no enumerated topology
    that keeps the family continuous is strictly smaller.
    """
    q = space.q
    labels = q.all_labels()
    sierpinski = sierpinski_space(q, max_carrier=budget.max_carrier)
    family = [
        f
        for f in all_functions(space.ground_size, q.size, budget)
        if is_continuous(f, space, sierpinski)
    ]
    lifted = optimal_lift(
        q,
        space.ground_size,
        [(f, sierpinski) for f in family],
        max_carrier=budget.max_carrier,
    )
    lift_equal = lifted.opens == space.topology.opens

    own = space.topology.member_set()
    comparable = 0
    minimal = True
    minimality_witness: dict | None = None
    candidates = all_q_topologies(q, space.ground_size, budget)
    for other in candidates:
        other_space = other.space()
        if not all(is_continuous(f, other_space, sierpinski) for f in family):
            continue
        comparable += 1
        if not own <= other.member_set():
            minimal = False
            minimality_witness = {
                "smaller_topology": list(other.tokens()),
                "missing": sorted(
                    fn_token(fn, labels) for fn in own - other.member_set()
                ),
            }
            break

    stats = {
        "continuous_maps": len(family),
        "topologies_enumerated": len(candidates),
        "topologies_keeping_family_continuous": comparable,
        "lift_equality": int(lift_equal),
        "exhaustive_minimality": int(minimal),
    }
    if lift_equal != minimal:
        return Report(
            "theorem-3.2",
            FAIL,
            witness={
                "disagreement": "lift equality and exhaustive minimality differ",
                "lift_equality": lift_equal,
                "exhaustive_minimality": minimal,
            },
            stats=stats,
        )
    if not lift_equal:
        witness = minimality_witness or {
            "lift": list(lifted.tokens()),
            "topology": list(space.topology.tokens()),
        }
        return Report("theorem-3.2", FAIL, witness=witness, stats=stats)
    return Report("theorem-3.2", PASS, stats=stats)
