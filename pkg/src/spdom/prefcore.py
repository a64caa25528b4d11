"""Strict preference rankings, preference domains, and product domains.

Alternatives are integers ``0..m-1``; human-readable labels are attached at the
file-format and CLI layer, never here.  A ranking is a strict total order whose
pairwise comparison matrix is the authoritative representation; the best-first
order sequence and the position array are derived caches.  Domains are
immutable, canonically sorted, and hashable, so they can key caches and be
compared structurally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

MAX_ALTERNATIVES = 8
PROFILE_ENUMERATION_LIMIT = 10_000
TABLE_CELL_LIMIT = 10_000_000


class SpdomError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpdomError, ValueError):
    """Semantically invalid ranking, domain, pair, rule, or file content."""


class UnsatisfiableRestrictionError(DomainError):
    """A restriction set admits no ranking at all."""


class SizeLimitError(SpdomError):
    """An operation exceeded one of the documented size guards."""


class OrderedPair(NamedTuple):
    """An oriented pair: ``top`` is ranked strictly above ``bottom``."""

    top: int
    bottom: int

    def swapped(self) -> "OrderedPair":
        return OrderedPair(self.bottom, self.top)


def _check_alternative_count(m: int) -> None:
    if m < 1:
        raise DomainError(f"need at least one alternative, got m={m}")
    if m > MAX_ALTERNATIVES:
        raise SizeLimitError(
            f"m={m} alternatives exceeds the supported maximum of {MAX_ALTERNATIVES}"
        )


def _check_pair(pair: Sequence[int], m: int) -> OrderedPair:
    if len(pair) != 2:
        raise DomainError(f"a pair has exactly two alternatives, got {pair!r}")
    a, b = pair
    if not (0 <= a < m and 0 <= b < m):
        raise DomainError(f"pair {pair!r} mentions an alternative outside 0..{m - 1}")
    if a == b:
        raise DomainError(f"pair {pair!r} compares an alternative with itself")
    return OrderedPair(a, b)


@dataclass(frozen=True)
class Ranking:
    """A strict total order over alternatives ``0..m-1``.

    ``matrix[a][b]`` is True iff ``a`` is strictly preferred to ``b``.  The
    matrix is the authoritative representation; ``order`` (best first) and
    ``position`` (rank of each alternative, 0 = best) are derived caches and
    excluded from equality.
    """

    matrix: tuple[tuple[bool, ...], ...]
    order: tuple[int, ...] = field(init=False, compare=False, repr=False)
    position: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        m = len(self.matrix)
        _check_alternative_count(m)
        if any(len(row) != m for row in self.matrix):
            raise DomainError("pairwise matrix must be square")
        wins = [sum(row) for row in self.matrix]
        if sorted(wins) != list(range(m)):
            raise DomainError("pairwise matrix is not a strict total order")
        for a in range(m):
            for b in range(m):
                expected = wins[a] > wins[b]
                if bool(self.matrix[a][b]) != expected:
                    raise DomainError("pairwise matrix is not a strict total order")
        order = tuple(sorted(range(m), key=lambda alt: -wins[alt]))
        position = [0] * m
        for rank, alt in enumerate(order):
            position[alt] = rank
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "position", tuple(position))

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Ranking":
        """Build a ranking from a best-first sequence of alternative ids."""
        m = len(order)
        _check_alternative_count(m)
        if sorted(order) != list(range(m)):
            raise DomainError(f"order {tuple(order)!r} is not a permutation of 0..{m - 1}")
        position = {alt: rank for rank, alt in enumerate(order)}
        matrix = tuple(
            tuple(position[a] < position[b] and a != b for b in range(m)) for a in range(m)
        )
        return cls(matrix)

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def top(self) -> int:
        return self.order[0]

    @property
    def bottom(self) -> int:
        return self.order[-1]

    def prefers(self, a: int, b: int) -> bool:
        """True iff ``a`` is strictly preferred to ``b``."""
        return self.matrix[a][b]

    def satisfies(self, pairs: Iterable[Sequence[int]]) -> bool:
        """True iff every oriented pair in ``pairs`` holds (top above bottom)."""
        return all(self.matrix[p[0]][p[1]] for p in pairs)

    def ordered_pairs(self) -> tuple[OrderedPair, ...]:
        """All m(m-1)/2 oriented pairs realized by this ranking, sorted."""
        m = self.m
        return tuple(
            sorted(OrderedPair(a, b) for a in range(m) for b in range(m) if self.matrix[a][b])
        )

    def relabeled(self, perm: Sequence[int]) -> "Ranking":
        """Rename alternative ``i`` to ``perm[i]`` keeping relative order."""
        return Ranking.from_order(tuple(perm[a] for a in self.order))


@lru_cache(maxsize=None)
def all_rankings(m: int) -> tuple[Ranking, ...]:
    """Every ranking of ``0..m-1``, in canonical (lexicographic order-sequence) order."""
    _check_alternative_count(m)
    return tuple(Ranking.from_order(p) for p in itertools.permutations(range(m)))


class PairSets(NamedTuple):
    """Split of the m(m-1)/2 unordered pairs of a domain.

    ``fixed`` holds oriented pairs ranked the same way by every member;
    ``free`` holds unordered pairs ``(a, b)`` with ``a < b`` on which members
    disagree.
    """

    fixed: frozenset[OrderedPair]
    free: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class PreferenceDomain:
    """A nonempty set of rankings over a common alternative set, canonically sorted."""

    m: int
    rankings: tuple[Ranking, ...]

    def __post_init__(self) -> None:
        _check_alternative_count(self.m)
        if not self.rankings:
            raise DomainError("a preference domain must contain at least one ranking")
        seen: set[tuple[int, ...]] = set()
        for r in self.rankings:
            if r.m != self.m:
                raise DomainError("all rankings in a domain must share the alternative set")
            if r.order in seen:
                raise DomainError(f"duplicate ranking {r.order!r} in domain")
            seen.add(r.order)
        if tuple(sorted(r.order for r in self.rankings)) != tuple(r.order for r in self.rankings):
            raise DomainError("internal: domain rankings not canonically sorted; use .of()")

    @classmethod
    def of(cls, rankings: Iterable[Ranking]) -> "PreferenceDomain":
        """Normalize: sort canonically and reject duplicates / mixed sizes."""
        rs = sorted(rankings, key=lambda r: r.order)
        if not rs:
            raise DomainError("a preference domain must contain at least one ranking")
        return cls(rs[0].m, tuple(rs))

    @classmethod
    def from_orders(cls, orders: Iterable[Sequence[int]]) -> "PreferenceDomain":
        return cls.of(Ranking.from_order(o) for o in orders)

    def __len__(self) -> int:
        return len(self.rankings)

    def __iter__(self) -> Iterator[Ranking]:
        return iter(self.rankings)

    def __contains__(self, r: object) -> bool:
        return isinstance(r, Ranking) and r in _member_index(self)

    def index(self, r: Ranking) -> int:
        try:
            return _member_index(self)[r]
        except KeyError:
            raise DomainError(f"ranking {r.order!r} is not a member of this domain") from None

    def is_subdomain_of(self, other: "PreferenceDomain") -> bool:
        if self.m != other.m:
            return False
        members = _member_index(other)
        return all(r in members for r in self.rankings)


@lru_cache(maxsize=None)
def _member_index(d: PreferenceDomain) -> dict[Ranking, int]:
    return {r: i for i, r in enumerate(d.rankings)}


@lru_cache(maxsize=None)
def pair_sets(d: PreferenceDomain) -> PairSets:
    """Partition the unordered pairs of ``d`` into fixed and free pairs.

    Always: ``len(fixed) + len(free) == m*(m-1)/2``.
    """
    fixed: set[OrderedPair] = set()
    free: set[tuple[int, int]] = set()
    for a in range(d.m):
        for b in range(a + 1, d.m):
            saw_ab = any(r.matrix[a][b] for r in d.rankings)
            saw_ba = any(r.matrix[b][a] for r in d.rankings)
            if saw_ab and saw_ba:
                free.add((a, b))
            elif saw_ab:
                fixed.add(OrderedPair(a, b))
            else:
                fixed.add(OrderedPair(b, a))
    return PairSets(frozenset(fixed), frozenset(free))


def consistent_rankings(pairs: Iterable[Sequence[int]], m: int) -> tuple[Ranking, ...]:
    """All rankings satisfying every oriented pair (possibly none), canonical order."""
    _check_alternative_count(m)
    checked = [_check_pair(p, m) for p in pairs]
    forced: set[OrderedPair] = set(checked)
    for p in forced:
        if p.swapped() in forced:
            return ()
    return tuple(r for r in all_rankings(m) if r.satisfies(forced))


def nonconditional_closure(pairs: Iterable[Sequence[int]], m: int) -> PreferenceDomain:
    """The domain of every ranking consistent with the given oriented pairs.

    Raises :class:`UnsatisfiableRestrictionError` when the pairs are
    contradictory or cyclic (no ranking survives).
    """
    pairs = list(pairs)
    survivors = consistent_rankings(pairs, m)
    if not survivors:
        raise UnsatisfiableRestrictionError(
            f"no ranking satisfies the fixed pairs {sorted(tuple(p) for p in pairs)!r}"
        )
    return PreferenceDomain(m, survivors)


def is_non_conditional(d: PreferenceDomain) -> bool:
    """True iff ``d`` equals the closure of its own fixed pairs."""
    fixed = pair_sets(d).fixed
    survivors = consistent_rankings(fixed, d.m)
    return len(survivors) == len(d)


def _is_single_peaked(r: Ranking, axis_pos: Sequence[int]) -> bool:
    peak = r.top
    m = r.m
    for t in range(m):
        for u in range(m):
            if t == u:
                continue
            between_left = axis_pos[peak] >= axis_pos[t] > axis_pos[u]
            between_right = axis_pos[u] > axis_pos[t] >= axis_pos[peak]
            if (between_left or between_right) and not r.matrix[t][u]:
                return False
    return True


def _is_single_dipped(r: Ranking, axis_pos: Sequence[int]) -> bool:
    dip = r.bottom
    m = r.m
    for t in range(m):
        for u in range(m):
            if t == u:
                continue
            between_left = axis_pos[dip] >= axis_pos[t] > axis_pos[u]
            between_right = axis_pos[u] > axis_pos[t] >= axis_pos[dip]
            if (between_left or between_right) and not r.matrix[u][t]:
                return False
    return True


def _axis_positions(axis: Sequence[int], m: int) -> tuple[int, ...]:
    if sorted(axis) != list(range(m)):
        raise DomainError(f"axis {tuple(axis)!r} is not a permutation of 0..{m - 1}")
    pos = [0] * m
    for i, alt in enumerate(axis):
        pos[alt] = i
    return tuple(pos)


def generate_domain(kind: str, **params) -> PreferenceDomain:
    """Construct one of the built-in domain families.

    Supported kinds (with their keyword parameters):

    - ``universal`` (``m``): every ranking.
    - ``single_peaked`` (``axis``): rankings single-peaked along the given
      left-to-right sequence of alternative ids.
    - ``single_dipped`` (``axis``): rankings single-dipped along the axis.
    - ``fixed_pairs`` (``m``, ``pairs``): the closure of a set of oriented pairs.
    - ``self_preferring`` (``m``, ``owner``): rankings placing ``owner`` first.
    - ``juror_bias`` (``m``, ``high``, ``low``): rankings placing every
      alternative in ``high`` above every alternative in ``low``.
    - ``explicit`` (``rankings``): exactly the given rankings (or order tuples).
    """

    def _take(*names: str) -> list:
        missing = [n for n in names if n not in params]
        if missing:
            raise DomainError(f"domain kind {kind!r} requires parameter(s) {missing}")
        extra = set(params) - set(names)
        if extra:
            raise DomainError(f"domain kind {kind!r} got unexpected parameter(s) {sorted(extra)}")
        return [params[n] for n in names]

    if kind == "universal":
        (m,) = _take("m")
        _check_alternative_count(m)
        return PreferenceDomain(m, all_rankings(m))
    if kind == "single_peaked":
        (axis,) = _take("axis")
        m = len(axis)
        _check_alternative_count(m)
        pos = _axis_positions(axis, m)
        return PreferenceDomain.of(r for r in all_rankings(m) if _is_single_peaked(r, pos))
    if kind == "single_dipped":
        (axis,) = _take("axis")
        m = len(axis)
        _check_alternative_count(m)
        pos = _axis_positions(axis, m)
        return PreferenceDomain.of(r for r in all_rankings(m) if _is_single_dipped(r, pos))
    if kind == "fixed_pairs":
        m, pairs = _take("m", "pairs")
        return nonconditional_closure(pairs, m)
    if kind == "self_preferring":
        m, owner = _take("m", "owner")
        _check_alternative_count(m)
        if not 0 <= owner < m:
            raise DomainError(f"owner {owner!r} is outside 0..{m - 1}")
        pairs = [OrderedPair(owner, b) for b in range(m) if b != owner]
        return nonconditional_closure(pairs, m)
    if kind == "juror_bias":
        m, high, low = _take("m", "high", "low")
        _check_alternative_count(m)
        high = list(high)
        low = list(low)
        if not high or not low:
            raise DomainError("juror_bias needs nonempty high and low groups")
        if set(high) & set(low):
            raise DomainError("juror_bias groups must be disjoint")
        pairs = [OrderedPair(a, b) for a in high for b in low]
        return nonconditional_closure(pairs, m)
    if kind == "explicit":
        (rankings,) = _take("rankings")
        rs = [r if isinstance(r, Ranking) else Ranking.from_order(r) for r in rankings]
        return PreferenceDomain.of(rs)
    raise DomainError(f"unknown domain kind {kind!r}")


def default_labels(m: int) -> tuple[str, ...]:
    _check_alternative_count(m)
    return tuple("abcdefgh"[:m])


@dataclass(frozen=True)
class ProductDomain:
    """Per-agent preference domains over one shared alternative set.

    Profile indices are mixed-radix with agent 0 most significant: the profile
    at index ``k`` assigns agent ``i`` the ranking ``d_i.rankings[digit_i]``
    where the digits are the base-``len(d_i)`` expansion of ``k``.
    """

    labels: tuple[str, ...]
    agent_names: tuple[str, ...]
    agents: tuple[PreferenceDomain, ...]

    def __post_init__(self) -> None:
        if not self.agents:
            raise DomainError("a product domain needs at least one agent")
        m = self.agents[0].m
        if any(d.m != m for d in self.agents):
            raise DomainError("all agents must rank the same alternative set")
        if len(self.labels) != m:
            raise DomainError(f"expected {m} alternative labels, got {len(self.labels)}")
        if len(set(self.labels)) != m:
            raise DomainError("alternative labels must be distinct")
        if len(self.agent_names) != len(self.agents):
            raise DomainError("one name per agent required")
        if len(set(self.agent_names)) != len(self.agent_names):
            raise DomainError("agent names must be distinct")

    @classmethod
    def of(
        cls,
        agents: Sequence[PreferenceDomain],
        labels: Optional[Sequence[str]] = None,
        agent_names: Optional[Sequence[str]] = None,
    ) -> "ProductDomain":
        agents = tuple(agents)
        if not agents:
            raise DomainError("a product domain needs at least one agent")
        if labels is None:
            labels = default_labels(agents[0].m)
        if agent_names is None:
            agent_names = tuple(str(i + 1) for i in range(len(agents)))
        return cls(tuple(labels), tuple(agent_names), agents)

    @property
    def m(self) -> int:
        return self.agents[0].m

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.agents)

    @property
    def strides(self) -> tuple[int, ...]:
        strides = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            strides[i] = strides[i + 1] * len(self.agents[i + 1])
        return tuple(strides)

    @property
    def profile_count(self) -> int:
        count = 1
        for d in self.agents:
            count *= len(d)
        return count

    def profile_index(self, profile: Sequence[int]) -> int:
        if len(profile) != self.n:
            raise DomainError(f"profile needs {self.n} coordinates, got {len(profile)}")
        index = 0
        for digit, d in zip(profile, self.agents):
            if not 0 <= digit < len(d):
                raise DomainError(f"profile coordinate {digit} out of range 0..{len(d) - 1}")
            index = index * len(d) + digit
        return index

    def profile_at(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.profile_count:
            raise DomainError(f"profile index {index} out of range 0..{self.profile_count - 1}")
        digits = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            index, digits[i] = divmod(index, len(self.agents[i]))
        return tuple(digits)

    def iter_profiles(self) -> Iterator[tuple[int, ...]]:
        """All profiles in canonical (index-ascending) order."""
        return itertools.product(*(range(len(d)) for d in self.agents))

    def rankings_at(self, profile: Sequence[int]) -> tuple[Ranking, ...]:
        return tuple(d.rankings[digit] for digit, d in zip(profile, self.agents))

    def with_agents(self, agents: Sequence[PreferenceDomain]) -> "ProductDomain":
        """Same labels and agent names, different per-agent domains."""
        return ProductDomain(self.labels, self.agent_names, tuple(agents))
