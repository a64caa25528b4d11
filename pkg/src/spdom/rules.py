"""Social choice rules on product domains and their strategy-proofness.

A rule is a dense outcome table over the canonical profile order of a product
domain.  This module checks manipulability (one agent misreporting to obtain
an outcome they sincerely prefer), identifies dictators, restricts rules to
sub-products, audits the structural facts that characterize strategy-proof
rules (outcome maximality over option sets; pairwise freeness of option-set
members), and reads/writes the ``.rule`` text format.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .domfile import ParseError
from .prefcore import (
    PROFILE_ENUMERATION_LIMIT,
    TABLE_CELL_LIMIT,
    DomainError,
    PreferenceDomain,
    ProductDomain,
    SizeLimitError,
    pair_sets,
)


@dataclass(frozen=True)
class Rule:
    """A social choice rule: one outcome per profile, in canonical profile order."""

    domain: ProductDomain
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        count = self.domain.profile_count
        if count > TABLE_CELL_LIMIT:
            raise SizeLimitError(
                f"outcome table would need {count} cells, over the cap of {TABLE_CELL_LIMIT}"
            )
        if len(self.table) != count:
            raise DomainError(f"outcome table needs {count} cells, got {len(self.table)}")
        m = self.domain.m
        for value in self.table:
            if not 0 <= value < m:
                raise DomainError(f"outcome {value!r} is outside 0..{m - 1}")

    def outcome_at(self, index: int) -> int:
        return self.table[index]

    def outcome(self, profile: Sequence[int]) -> int:
        return self.table[self.domain.profile_index(profile)]


def constant_rule(pd: ProductDomain, outcome: int) -> Rule:
    if not 0 <= outcome < pd.m:
        raise DomainError(f"outcome {outcome!r} is outside 0..{pd.m - 1}")
    return Rule(pd, (outcome,) * pd.profile_count)


def dictatorship(pd: ProductDomain, agent: int) -> Rule:
    """The rule that always picks ``agent``'s top alternative."""
    if not 0 <= agent < pd.n:
        raise DomainError(f"agent index {agent} is outside 0..{pd.n - 1}")
    tops = [r.top for r in pd.agents[agent].rankings]
    stride = pd.strides[agent]
    size = len(pd.agents[agent])
    table = [0] * pd.profile_count
    for index in range(pd.profile_count):
        table[index] = tops[(index // stride) % size]
    return Rule(pd, tuple(table))


def range_of(rule: Rule) -> frozenset[int]:
    """The set of outcomes the rule actually attains."""
    return frozenset(rule.table)


@dataclass(frozen=True)
class ManipulationWitness:
    """One profitable misreport: at ``profile``, ``agent`` deviating to ranking
    index ``deviation`` turns ``sincere_outcome`` into the strictly better
    ``deviating_outcome`` (better under the agent's sincere ranking)."""

    agent: int
    profile: tuple[int, ...]
    deviation: int
    sincere_outcome: int
    deviating_outcome: int


def _check_profile_guard(pd: ProductDomain, max_profiles: int) -> None:
    if pd.profile_count > max_profiles:
        raise SizeLimitError(
            f"{pd.profile_count} profiles exceeds the enumeration guard of {max_profiles}"
        )


def iter_manipulations(
    rule: Rule, max_profiles: int = PROFILE_ENUMERATION_LIMIT
) -> Iterator[ManipulationWitness]:
    """Every manipulation, scanned agent-ascending, then profile-index, then
    deviation — so the first yielded witness is the canonical one."""
    pd = rule.domain
    _check_profile_guard(pd, max_profiles)
    table = rule.table
    strides = pd.strides
    sizes = pd.sizes
    positions = [[r.position for r in d.rankings] for d in pd.agents]
    count = pd.profile_count
    for agent in range(pd.n):
        stride = strides[agent]
        size = sizes[agent]
        pos_list = positions[agent]
        for index in range(count):
            digit = (index // stride) % size
            base = index - digit * stride
            pos = pos_list[digit]
            sincere = table[index]
            sincere_rank = pos[sincere]
            for deviation in range(size):
                if deviation == digit:
                    continue
                other = table[base + deviation * stride]
                if pos[other] < sincere_rank:
                    yield ManipulationWitness(
                        agent=agent,
                        profile=pd.profile_at(index),
                        deviation=deviation,
                        sincere_outcome=sincere,
                        deviating_outcome=other,
                    )


def find_manipulation(
    rule: Rule, max_profiles: int = PROFILE_ENUMERATION_LIMIT
) -> Optional[ManipulationWitness]:
    """The canonical first manipulation, or None when the rule is strategy-proof."""
    return next(iter_manipulations(rule, max_profiles), None)


def is_strategy_proof(rule: Rule, max_profiles: int = PROFILE_ENUMERATION_LIMIT) -> bool:
    return find_manipulation(rule, max_profiles) is None


def find_manipulation_within(
    rule: Rule, index_subsets: Sequence[Sequence[int]]
) -> Optional[ManipulationWitness]:
    """First manipulation when every agent (sincerely and in deviation) is
    confined to the given per-agent ranking-index subsets.  Equivalent to
    ``find_manipulation(restrict_rule(...))`` but without rebuilding tables;
    witness coordinates refer to the parent domain."""
    pd = rule.domain
    if len(index_subsets) != pd.n:
        raise DomainError(f"need {pd.n} index subsets, got {len(index_subsets)}")
    subsets: list[tuple[int, ...]] = []
    for agent, subset in enumerate(index_subsets):
        checked = tuple(subset)
        size = pd.sizes[agent]
        for i in checked:
            if not 0 <= i < size:
                raise DomainError(f"index {i} out of range for agent {agent}")
        if not checked:
            raise DomainError(f"empty index subset for agent {agent}")
        subsets.append(checked)
    table = rule.table
    strides = pd.strides
    positions = [[r.position for r in d.rankings] for d in pd.agents]
    for agent in range(pd.n):
        stride = strides[agent]
        pos_list = positions[agent]
        others = [subsets[i] for i in range(pd.n) if i != agent]
        for rest in itertools.product(*others):
            base = 0
            it = iter(rest)
            for i in range(pd.n):
                if i != agent:
                    base += next(it) * strides[i]
            for digit in subsets[agent]:
                index = base + digit * stride
                pos = pos_list[digit]
                sincere = table[index]
                sincere_rank = pos[sincere]
                for deviation in subsets[agent]:
                    if deviation == digit:
                        continue
                    other = table[base + deviation * stride]
                    if pos[other] < sincere_rank:
                        return ManipulationWitness(
                            agent=agent,
                            profile=pd.profile_at(index),
                            deviation=deviation,
                            sincere_outcome=sincere,
                            deviating_outcome=other,
                        )
    return None


def option_set(rule: Rule, agent: int, others: Sequence[int]) -> frozenset[int]:
    """Outcomes ``agent`` can reach by varying their report while the other
    agents' reports stay at ``others`` (ranking indices, agent-ascending)."""
    pd = rule.domain
    if not 0 <= agent < pd.n:
        raise DomainError(f"agent index {agent} is outside 0..{pd.n - 1}")
    if len(others) != pd.n - 1:
        raise DomainError(f"need {pd.n - 1} other-agent coordinates, got {len(others)}")
    strides = pd.strides
    base = 0
    it = iter(others)
    for i in range(pd.n):
        if i == agent:
            continue
        digit = next(it)
        if not 0 <= digit < pd.sizes[i]:
            raise DomainError(f"coordinate {digit} out of range for agent {i}")
        base += digit * strides[i]
    stride = strides[agent]
    return frozenset(rule.table[base + r * stride] for r in range(pd.sizes[agent]))


def dictators_of(rule: Rule) -> frozenset[int]:
    """Agents whose sincere report always gets their range-best outcome.

    An agent counts as a dictator when, at every profile, the chosen outcome
    is their most preferred alternative within the rule's attained range, so
    constant rules make every agent a (degenerate) dictator.
    """
    pd = rule.domain
    attained = sorted(range_of(rule))
    table = rule.table
    out: set[int] = set()
    for agent in range(pd.n):
        stride = pd.strides[agent]
        size = pd.sizes[agent]
        best = [
            min(attained, key=lambda alt: r.position[alt]) for r in pd.agents[agent].rankings
        ]
        if all(
            table[index] == best[(index // stride) % size] for index in range(pd.profile_count)
        ):
            out.add(agent)
    return frozenset(out)


def restrict_rule(rule: Rule, subdomains: Sequence[PreferenceDomain]) -> Rule:
    """The same rule on a sub-product (each agent's domain shrunk to a subset)."""
    pd = rule.domain
    if len(subdomains) != pd.n:
        raise DomainError(f"need {pd.n} subdomains, got {len(subdomains)}")
    index_maps: list[list[int]] = []
    for agent, sub in enumerate(subdomains):
        parent = pd.agents[agent]
        if not sub.is_subdomain_of(parent):
            raise DomainError(f"agent {agent}: not a subdomain of the rule's domain")
        index_maps.append([parent.index(r) for r in sub.rankings])
    new_pd = pd.with_agents(subdomains)
    strides = pd.strides
    table = []
    for profile in itertools.product(*index_maps):
        table.append(rule.table[sum(d * s for d, s in zip(profile, strides))])
    return Rule(new_pd, tuple(table))


@dataclass(frozen=True)
class OptionMaximalityFault:
    """At ``others``, ``agent`` reporting ranking index ``own`` received
    ``outcome`` although ``better`` was in their option set."""

    agent: int
    others: tuple[int, ...]
    own: int
    outcome: int
    better: int


@dataclass(frozen=True)
class OptionFreenessFault:
    """Option set at ``others`` for ``agent`` contains alternatives ``a, b``
    that the agent's domain does not leave free."""

    agent: int
    others: tuple[int, ...]
    a: int
    b: int


@dataclass(frozen=True)
class SpAuditReport:
    """Structural audit of a rule against the facts that characterize
    strategy-proofness: every realized outcome is the reporter's best
    option-set member, and option-set members are pairwise free."""

    strategy_proof: bool
    witness: Optional[ManipulationWitness]
    maximality_faults: tuple[OptionMaximalityFault, ...]
    freeness_faults: tuple[OptionFreenessFault, ...]

    @property
    def clean(self) -> bool:
        return self.strategy_proof and not self.maximality_faults and not self.freeness_faults


def audit_sp_lemmas(
    rule: Rule, max_profiles: int = PROFILE_ENUMERATION_LIMIT
) -> SpAuditReport:
    """Audit option-set maximality and option-set freeness on every subprofile.

    For strategy-proof rules both fault lists are empty; for manipulable rules
    the report pinpoints where the structure breaks.
    """
    pd = rule.domain
    _check_profile_guard(pd, max_profiles)
    witness = find_manipulation(rule, max_profiles)
    maximality: list[OptionMaximalityFault] = []
    freeness: list[OptionFreenessFault] = []
    free_pairs = [pair_sets(d).free for d in pd.agents]
    strides = pd.strides
    table = rule.table
    for agent in range(pd.n):
        stride = strides[agent]
        size = pd.sizes[agent]
        rankings = pd.agents[agent].rankings
        other_ranges = [range(pd.sizes[i]) for i in range(pd.n) if i != agent]
        for rest in itertools.product(*other_ranges):
            base = 0
            it = iter(rest)
            for i in range(pd.n):
                if i != agent:
                    base += next(it) * strides[i]
            options = sorted({table[base + r * stride] for r in range(size)})
            for ai in range(len(options)):
                for bi in range(ai + 1, len(options)):
                    a, b = options[ai], options[bi]
                    if (a, b) not in free_pairs[agent]:
                        freeness.append(OptionFreenessFault(agent, rest, a, b))
            for own in range(size):
                outcome = table[base + own * stride]
                pos = rankings[own].position
                best = min(options, key=lambda alt: pos[alt])
                if outcome != best:
                    maximality.append(
                        OptionMaximalityFault(agent, rest, own, outcome, best)
                    )
    return SpAuditReport(
        strategy_proof=witness is None,
        witness=witness,
        maximality_faults=tuple(maximality),
        freeness_faults=tuple(freeness),
    )


def _render_ranking(order: Sequence[int], labels: Sequence[str]) -> str:
    return "".join(labels[alt] for alt in order)


def serialize_rule(rule: Rule) -> str:
    """Render a rule as the ``.rule`` text format (canonical profile order)."""
    pd = rule.domain
    lines = ["alternatives: " + " ".join(pd.labels)]
    for index, profile in enumerate(pd.iter_profiles()):
        parts = ",".join(
            _render_ranking(d.rankings[digit].order, pd.labels)
            for digit, d in zip(profile, pd.agents)
        )
        lines.append(f"{parts} -> {pd.labels[rule.table[index]]}")
    return "\n".join(lines) + "\n"


def parse_rule_file(text: str, pd: ProductDomain) -> Rule:
    """Parse a ``.rule`` document against its product domain.

    The profile column is redundant; every line must carry the canonical
    rendering of the profile at its position, which the parser verifies.
    """
    label_to_id = {label: i for i, label in enumerate(pd.labels)}
    expected = pd.profile_count
    table: list[int] = []
    header_seen = False
    data_line = 0
    profiles = pd.iter_profiles()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if not line.startswith("alternatives:"):
                raise ParseError("a rule file starts with 'alternatives:'", lineno, 1)
            declared = tuple(line[len("alternatives:") :].split())
            if declared != pd.labels:
                raise ParseError(
                    f"alternatives {declared!r} do not match the domain's {pd.labels!r}",
                    lineno,
                    1,
                )
            header_seen = True
            continue
        if "->" not in line:
            raise ParseError("expected 'profile -> outcome'", lineno, 1)
        left, _, right = line.partition("->")
        left = left.strip()
        right = right.strip()
        if data_line >= expected:
            raise ParseError(f"more than {expected} profile lines", lineno, 1)
        profile = next(profiles)
        canonical = ",".join(
            _render_ranking(d.rankings[digit].order, pd.labels)
            for digit, d in zip(profile, pd.agents)
        )
        if left != canonical:
            raise ParseError(
                f"profile out of canonical order: expected {canonical!r}, found {left!r}",
                lineno,
                1,
            )
        if right not in label_to_id:
            raise ParseError(f"unknown outcome label {right!r}", lineno, 1)
        table.append(label_to_id[right])
        data_line += 1
    if not header_seen:
        raise ParseError("empty rule file", 1, 1)
    if data_line != expected:
        raise ParseError(f"expected {expected} profile lines, found {data_line}", 1, 1)
    return Rule(pd, tuple(table))
