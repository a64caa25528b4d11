"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written by a different route than the library:
plain permutation filters, dictionary-based profile lookups, and full
brute-force scans.  Slow but obviously correct, and only run at tiny scale.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from spdom import PreferenceDomain, ProductDomain, Ranking, Rule


# ---------------------------------------------------------------------------
# Domain families


def prefix_interval_orders(axis: Sequence[int]) -> list[tuple[int, ...]]:
    """Single-peaked orders via the prefix characterization: a ranking is
    single-peaked on the axis exactly when each of its top-k sets occupies
    consecutive axis positions."""
    m = len(axis)
    pos = {alt: i for i, alt in enumerate(axis)}
    out = []
    for order in itertools.permutations(range(m)):
        ok = True
        for k in range(1, m + 1):
            spots = sorted(pos[alt] for alt in order[:k])
            if spots[-1] - spots[0] != k - 1:
                ok = False
                break
        if ok:
            out.append(order)
    return out


def reversed_prefix_interval_orders(axis: Sequence[int]) -> list[tuple[int, ...]]:
    """Single-dipped orders: exactly the reverses of single-peaked orders."""
    return sorted(tuple(reversed(order)) for order in prefix_interval_orders(axis))


def orders_satisfying_pairs(m: int, pairs: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """All orders (best first) placing ``a`` before ``b`` for each pair (a, b)."""
    pairs = list(pairs)
    out = []
    for order in itertools.permutations(range(m)):
        position = {alt: i for i, alt in enumerate(order)}
        if all(position[a] < position[b] for a, b in pairs):
            out.append(order)
    return out


def count_strict_partial_orders(m: int) -> int:
    """Number of strict partial orders on m labeled points, by scanning every
    subset of the off-diagonal pairs for irreflexivity + transitivity."""
    cells = [(a, b) for a in range(m) for b in range(m) if a != b]
    count = 0
    for bits in itertools.product((False, True), repeat=len(cells)):
        rel = {cell for cell, bit in zip(cells, bits) if bit}
        if all(
            ((a, c) in rel)
            for (a, b) in rel
            for (b2, c) in rel
            if b == b2 and a != c
        ) and not any((a, b) in rel and (b, a) in rel for (a, b) in rel):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Restriction-map semantics


def keeps_ranking(
    order: Sequence[int],
    base: Iterable[tuple[int, int]],
    conditionals: Iterable[tuple[Iterable[tuple[int, int]], Iterable[tuple[int, int]]]],
) -> bool:
    """Plain-loop membership test for a restriction map."""
    position = {alt: i for i, alt in enumerate(order)}

    def holds(pair: tuple[int, int]) -> bool:
        a, b = pair
        return position[a] < position[b]

    if not all(holds(p) for p in base):
        return False
    for antecedent, conclusions in conditionals:
        if all(holds(p) for p in antecedent) and not all(holds(c) for c in conclusions):
            return False
    return True


# ---------------------------------------------------------------------------
# Strategy-proofness by dictionary lookup


def outcome_map(rule: Rule) -> dict[tuple[int, ...], int]:
    """Profile-tuple -> outcome, built from the canonical product order."""
    pd = rule.domain
    coords = itertools.product(*(range(len(d)) for d in pd.agents))
    return dict(zip(coords, rule.table))


def sp_violations(rule: Rule) -> list[tuple[int, tuple[int, ...], int]]:
    """Every (agent, profile, deviation) manipulation, by triple loop."""
    pd = rule.domain
    table = outcome_map(rule)
    out = []
    for agent in range(pd.n):
        rankings = pd.agents[agent].rankings
        for profile, sincere in table.items():
            truthful = rankings[profile[agent]]
            for deviation in range(len(rankings)):
                if deviation == profile[agent]:
                    continue
                shifted = list(profile)
                shifted[agent] = deviation
                other = table[tuple(shifted)]
                if truthful.prefers(other, sincere):
                    out.append((agent, profile, deviation))
    return out


def is_sp(rule: Rule) -> bool:
    return not sp_violations(rule)


def all_sp_tables(
    pd: ProductDomain, outcomes: Optional[Sequence[int]] = None
) -> list[tuple[int, ...]]:
    """Brute force every outcome table; keep the strategy-proof ones.
    Only usable when ``len(outcomes) ** profile_count`` is tiny."""
    if outcomes is None:
        outcomes = range(pd.m)
    found = []
    for table in itertools.product(outcomes, repeat=pd.profile_count):
        if is_sp(Rule(pd, table)):
            found.append(table)
    return found


def dictatorial_tables(pd: ProductDomain, k: int) -> set[tuple[int, ...]]:
    """Tables of dictatorships steered to a k-alternative range, directly:
    for each agent and each k-set attaining all k outcomes."""
    out: set[tuple[int, ...]] = set()
    for agent in range(pd.n):
        for combo in itertools.combinations(range(pd.m), k):
            table = []
            for coords in itertools.product(*(range(len(d)) for d in pd.agents)):
                ranking = pd.agents[agent].rankings[coords[agent]]
                table.append(min(combo, key=lambda alt: ranking.position[alt]))
            if len(set(table)) == k:
                out.add(tuple(table))
    return out


def monotone_boolean_function_count(n: int) -> int:
    """Dedekind numbers by scanning all 2**(2**n) boolean functions (n <= 4)."""
    points = 1 << n
    count = 0
    for bits in range(1 << points):
        ok = True
        for x in range(points):
            for y in range(points):
                if (x & y) == x and ((bits >> x) & 1) > ((bits >> y) & 1):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def exactly_pair_sp_count(pd: ProductDomain, pair: tuple[int, int]) -> int:
    """Strategy-proof rules whose attained range is exactly {a, b}, counted by
    brute force over the two-outcome tables."""
    a, b = pair
    both = {a, b}
    return sum(1 for table in all_sp_tables(pd, outcomes=(a, b)) if set(table) == both)
