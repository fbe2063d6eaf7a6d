"""Brute-force oracles: exhaustive streams of functions, subalgebras, topologies.

Every exhaustive checker leans on this module as ground truth, so the
topology census runs two independent strategies (closedness scan of all
subsets, closure of all generator subsets) and insists they agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .algebra import (
    FiniteAlgebra,
    FnTable,
    Subset,
    generate_subalgebra,
    is_closed_subset,
    power_algebra,
    power_elements,
)
from .errors import BudgetExceeded


@dataclass(frozen=True)
class EnumerationBudget:
    """Hard limits for exhaustive scans; exceeding one raises, never truncates."""

    max_subset_space: int = 1 << 20
    max_carrier: int = 4096

    def __post_init__(self) -> None:
        if self.max_subset_space < 1 or self.max_carrier < 1:
            raise ValueError("budget limits must be positive")


DEFAULT_BUDGET = EnumerationBudget()

STRATEGIES = ("scan", "closure", "both")


def all_functions(
    dom_size: int, cod_size: int, budget: EnumerationBudget = DEFAULT_BUDGET
) -> Iterator[FnTable]:
    """All cod_size^dom_size functions, lexicographic on value tuples."""
    if dom_size < 0:
        raise ValueError("dom_size must be >= 0")
    if cod_size < 1:
        raise ValueError("cod_size must be >= 1")
    count = cod_size**dom_size
    if count > budget.max_carrier:
        raise BudgetExceeded(
            f"{cod_size}^{dom_size} = {count} functions exceeds budget {budget.max_carrier}"
        )

    def stream() -> Iterator[FnTable]:
        for values in product(range(cod_size), repeat=dom_size):
            yield FnTable(dom_size, cod_size, values)

    return stream()


def all_subalgebras(
    algebra: FiniteAlgebra, budget: EnumerationBudget = DEFAULT_BUDGET
) -> list[Subset]:
    """All non-empty closed subsets, by direct closedness test per subset.

    Deliberately independent of generate_subalgebra so it can serve as that
    function's oracle. Output is sorted by (cardinality, members).
    """
    space = 2**algebra.size
    if space > budget.max_subset_space:
        raise BudgetExceeded(
            f"2^{algebra.size} = {space} subsets exceeds budget {budget.max_subset_space}"
        )
    found = []
    for mask in range(1, space):
        members = tuple(i for i in range(algebra.size) if mask >> i & 1)
        candidate = Subset(algebra.size, members)
        if is_closed_subset(algebra, candidate):
            found.append(candidate)
    found.sort(key=lambda s: (len(s.members), s.members))
    return found


def _topologies_by_scan(power: FiniteAlgebra, budget: EnumerationBudget) -> set[tuple[int, ...]]:
    return {s.members for s in all_subalgebras(power, budget)}


def _topologies_by_closure(
    power: FiniteAlgebra, has_constants: bool, budget: EnumerationBudget
) -> set[tuple[int, ...]]:
    space = 2**power.size
    if space > budget.max_subset_space:
        raise BudgetExceeded(
            f"2^{power.size} = {space} generator sets exceeds budget {budget.max_subset_space}"
        )
    start = 0 if has_constants else 1
    out: set[tuple[int, ...]] = set()
    for mask in range(start, space):
        members = tuple(i for i in range(power.size) if mask >> i & 1)
        out.add(generate_subalgebra(power, Subset(power.size, members)).members)
    return out


def all_q_topologies(
    q: FiniteAlgebra,
    ground_size: int,
    budget: EnumerationBudget = DEFAULT_BUDGET,
    strategy: str = "both",
):
    """Every topology on the ground set: every subalgebra of the power carrier.

    strategy "scan" tests all subsets for closedness, "closure" closes all
    generator subsets and deduplicates, "both" runs the two and raises if
    they ever disagree. Returns validated QTopology values in canonical
    (cardinality, members) order.
    """
    from .qtop import QTopology  # imported here: qtop builds on this module

    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    power = power_algebra(q, ground_size, max_carrier=budget.max_carrier)
    elements = power_elements(q, ground_size)
    scanned = closed = None
    if strategy in ("scan", "both"):
        scanned = _topologies_by_scan(power, budget)
    if strategy in ("closure", "both"):
        closed = _topologies_by_closure(power, bool(q.sig.nullaries()), budget)
    if scanned is not None and closed is not None and scanned != closed:
        raise RuntimeError(
            "enumeration strategies disagree: "
            f"scan found {len(scanned)}, closure found {len(closed)}"
        )
    chosen = scanned if scanned is not None else closed
    assert chosen is not None
    ordered = sorted(chosen, key=lambda mem: (len(mem), mem))
    return [
        QTopology(q, ground_size, tuple(elements[i] for i in members))
        for members in ordered
    ]
