"""Two-step structure of rules: answer elicitation, then block subrules.

Each agent is asked how they rank every condition pair of their restriction
map; the resulting per-agent answer sets form a *response profile*, which
selects one non-conditional block per agent.  A rule then decomposes into one
subrule per response profile, and conversely an assignment of subrules to
response profiles assembles into a full rule.  ``search_sp_combinations``
walks assignments whose subrules come from the closed-form catalog (constants,
two-outcome monotone vote rules, steerable dictatorships) and keeps the
strategy-proof assemblies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .classify import (
    AnswerSet,
    RestrictionMap,
    partition_by_answers,
    rebuild,
    satisfied_antecedents,
)
from .counting import second_step_catalog
from .prefcore import (
    PROFILE_ENUMERATION_LIMIT,
    DomainError,
    PreferenceDomain,
    ProductDomain,
)
from .rules import (
    ManipulationWitness,
    Rule,
    dictators_of,
    find_manipulation,
    iter_manipulations,
    range_of,
    restrict_rule,
)


@dataclass(frozen=True)
class ResponseProfile:
    """One answer set per agent (each a subset of that agent's map conditions)."""

    answers: tuple[AnswerSet, ...]


def _check_maps(pd: ProductDomain, maps: Sequence[RestrictionMap]) -> None:
    if len(maps) != pd.n:
        raise DomainError(f"need {pd.n} restriction maps, got {len(maps)}")
    for i, (d, map_) in enumerate(zip(pd.agents, maps)):
        if map_.m != pd.m:
            raise DomainError(f"map for agent {i} is over a different alternative set")
        if rebuild(map_) != d:
            raise DomainError(f"map for agent {i} does not rebuild that agent's domain")


def response_profiles(pd: ProductDomain, maps: Sequence[RestrictionMap]) -> tuple[ResponseProfile, ...]:
    """All realizable response profiles, canonical order (per-agent answer
    sets by size then pair list, agent 0 most significant)."""
    _check_maps(pd, maps)
    per_agent = [
        [answers for answers, _ in partition_by_answers(d, map_)]
        for d, map_ in zip(pd.agents, maps)
    ]
    return tuple(ResponseProfile(combo) for combo in itertools.product(*per_agent))


def blocks_for(
    pd: ProductDomain, maps: Sequence[RestrictionMap], response: ResponseProfile
) -> ProductDomain:
    """The block product a response profile selects."""
    _check_maps(pd, maps)
    blocks = []
    for i, (d, map_, answers) in enumerate(zip(pd.agents, maps, response.answers)):
        matching = [r for r in d.rankings if satisfied_antecedents(r, map_) == answers]
        if not matching:
            raise DomainError(f"agent {i}: answer set {sorted(answers)!r} is not realizable")
        blocks.append(PreferenceDomain(d.m, tuple(matching)))
    return pd.with_agents(blocks)


@dataclass(frozen=True)
class TwoStepAssignment:
    """One subrule per realizable response profile, in canonical order."""

    product: ProductDomain
    maps: tuple[RestrictionMap, ...]
    subrules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        profiles = response_profiles(self.product, self.maps)
        if len(self.subrules) != len(profiles):
            raise DomainError(
                f"need {len(profiles)} subrules (one per response profile), "
                f"got {len(self.subrules)}"
            )
        for response, subrule in zip(profiles, self.subrules):
            expected = blocks_for(self.product, self.maps, response)
            if subrule.domain.agents != expected.agents:
                raise DomainError(
                    f"subrule for response profile {response.answers!r} is not over its block"
                )

    @property
    def responses(self) -> tuple[ResponseProfile, ...]:
        return response_profiles(self.product, self.maps)


def assemble(
    pd: ProductDomain,
    maps: Sequence[RestrictionMap],
    assignment: TwoStepAssignment | Sequence[Rule],
) -> Rule:
    """Glue block subrules into one full rule: each profile is answered by the
    subrule of its response profile."""
    _check_maps(pd, maps)
    if isinstance(assignment, TwoStepAssignment):
        if assignment.product != pd or tuple(assignment.maps) != tuple(maps):
            raise DomainError("assignment was built for a different product or maps")
        subrules: Sequence[Rule] = assignment.subrules
    else:
        subrules = tuple(assignment)
        assignment = TwoStepAssignment(pd, tuple(maps), subrules)

    responses = response_profiles(pd, maps)
    response_index = {r.answers: i for i, r in enumerate(responses)}
    # Per agent: each ranking's answer set, and its index within its block.
    agent_answers: list[list[AnswerSet]] = []
    agent_block_index: list[list[int]] = []
    for d, map_ in zip(pd.agents, maps):
        answers_per_ranking = [satisfied_antecedents(r, map_) for r in d.rankings]
        counters: dict[AnswerSet, int] = {}
        block_index = []
        for answers in answers_per_ranking:
            block_index.append(counters.get(answers, 0))
            counters[answers] = block_index[-1] + 1
        agent_answers.append(answers_per_ranking)
        agent_block_index.append(block_index)

    table = []
    for profile in pd.iter_profiles():
        key = tuple(agent_answers[i][digit] for i, digit in enumerate(profile))
        subrule = subrules[response_index[key]]
        sub_profile = tuple(agent_block_index[i][digit] for i, digit in enumerate(profile))
        table.append(subrule.outcome(sub_profile))
    return Rule(pd, tuple(table))


DECOMPOSITION_DICTATORIAL = "dictatorial"
DECOMPOSITION_TWO_OUTCOME = "sp_range_le_2"
DECOMPOSITION_VIOLATION = "violation"


@dataclass(frozen=True)
class BlockDecomposition:
    """One response profile's subrule and what kind of rule it is."""

    response: ResponseProfile
    subrule: Rule
    classification: str
    dictators: frozenset[int]
    range_size: int


@dataclass(frozen=True)
class DecompositionReport:
    blocks: tuple[BlockDecomposition, ...]

    @property
    def violations(self) -> tuple[BlockDecomposition, ...]:
        return tuple(b for b in self.blocks if b.classification == DECOMPOSITION_VIOLATION)

    @property
    def clean(self) -> bool:
        return not self.violations


def decompose(rule: Rule, maps: Sequence[RestrictionMap]) -> DecompositionReport:
    """Split a rule into its response-profile subrules and classify each as
    dictatorial, strategy-proof with at most two outcomes, or a violation."""
    pd = rule.domain
    _check_maps(pd, maps)
    blocks: list[BlockDecomposition] = []
    for response in response_profiles(pd, maps):
        block_pd = blocks_for(pd, maps, response)
        subrule = restrict_rule(rule, block_pd.agents)
        dictators = dictators_of(subrule)
        attained = range_of(subrule)
        if dictators:
            kind = DECOMPOSITION_DICTATORIAL
        elif len(attained) <= 2 and find_manipulation(subrule) is None:
            kind = DECOMPOSITION_TWO_OUTCOME
        else:
            kind = DECOMPOSITION_VIOLATION
        blocks.append(
            BlockDecomposition(
                response=response,
                subrule=subrule,
                classification=kind,
                dictators=dictators,
                range_size=len(attained),
            )
        )
    return DecompositionReport(tuple(blocks))


@dataclass(frozen=True)
class FirstStepWitness:
    """A manipulation annotated with whether the misreport changed the
    manipulator's elicited answers (their response-profile coordinate)."""

    witness: ManipulationWitness
    answer_changing: bool


def first_step_witnesses(
    rule: Rule,
    maps: Sequence[RestrictionMap],
    max_profiles: int = PROFILE_ENUMERATION_LIMIT,
) -> tuple[FirstStepWitness, ...]:
    """Every manipulation of ``rule``, each annotated by whether the deviation
    crosses answer-set blocks.  When all block subrules are strategy-proof,
    every witness is answer-changing (a within-block deviation would manipulate
    a strategy-proof subrule)."""
    pd = rule.domain
    _check_maps(pd, maps)
    agent_answers = [
        [satisfied_antecedents(r, map_) for r in d.rankings]
        for d, map_ in zip(pd.agents, maps)
    ]
    out = []
    for witness in iter_manipulations(rule, max_profiles):
        answers = agent_answers[witness.agent]
        sincere = answers[witness.profile[witness.agent]]
        deviating = answers[witness.deviation]
        out.append(FirstStepWitness(witness, answer_changing=sincere != deviating))
    return tuple(out)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a catalog-driven search over two-step assignments."""

    rules: tuple[Rule, ...]
    assignments: tuple[tuple[int, ...], ...]  # catalog indices per found rule
    candidates_total: int
    candidates_tried: int
    complete: bool


def search_sp_combinations(
    pd: ProductDomain,
    maps: Sequence[RestrictionMap],
    budget: int = 1_000_000,
    threads: int = 1,
) -> SearchResult:
    """Try every assignment of catalog subrules to response profiles (up to
    ``budget`` candidates, canonical order) and keep the assemblies that are
    strategy-proof.

    Every strategy-proof rule arises this way: its block subrules are
    strategy-proof rules on non-conditional products, hence constants,
    two-outcome vote rules, or steerable dictatorships — all in the catalog.
    So when the search completes within budget, the result is exhaustive.
    """
    _check_maps(pd, maps)
    if budget < 1:
        raise DomainError(f"budget must be positive, got {budget}")
    responses = response_profiles(pd, maps)
    catalogs = [
        second_step_catalog(blocks_for(pd, maps, response)) for response in responses
    ]
    total = 1
    for catalog in catalogs:
        total *= len(catalog)

    index_ranges = [range(len(c)) for c in catalogs]
    candidates = itertools.islice(itertools.product(*index_ranges), budget)

    def check(indices: tuple[int, ...]) -> Optional[tuple[tuple[int, ...], Rule]]:
        subrules = [catalogs[i][j] for i, j in enumerate(indices)]
        rule = assemble(pd, maps, subrules)
        if find_manipulation(rule) is None:
            return indices, rule
        return None

    found: list[tuple[tuple[int, ...], Rule]] = []
    tried = 0
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(check, candidates, chunksize=64):
                tried += 1
                if result is not None:
                    found.append(result)
    else:
        for indices in candidates:
            tried += 1
            result = check(indices)
            if result is not None:
                found.append(result)

    return SearchResult(
        rules=tuple(rule for _, rule in found),
        assignments=tuple(indices for indices, _ in found),
        candidates_total=total,
        candidates_tried=tried,
        complete=tried == total,
    )


# ---------------------------------------------------------------------------
# Assignment file format


def _format_answer_set(answers: AnswerSet, labels: Sequence[str]) -> str:
    inner = ",".join(f"{labels[p.top]}>{labels[p.bottom]}" for p in sorted(answers))
    return "{" + inner + "}"


def serialize_assignment(assignment: TwoStepAssignment) -> str:
    """Render an assignment as text, referencing subrules by catalog index."""
    pd = assignment.product
    lines = ["alternatives: " + " ".join(pd.labels)]
    lines.append("agents: " + " ".join(pd.agent_names))
    for response, subrule in zip(assignment.responses, assignment.subrules):
        catalog = second_step_catalog(subrule.domain)
        try:
            idx = next(i for i, entry in enumerate(catalog) if entry.table == subrule.table)
        except StopIteration:
            raise DomainError(
                "subrule is not in its block catalog; only catalog subrules serialize"
            ) from None
        left = "|".join(_format_answer_set(a, pd.labels) for a in response.answers)
        lines.append(f"{left} -> catalog:{idx}")
    return "\n".join(lines) + "\n"


def _parse_answer_set(token: str, labels: dict[str, int], lineno: int) -> AnswerSet:
    from .domfile import ParseError
    from .prefcore import OrderedPair

    token = token.strip()
    if not (token.startswith("{") and token.endswith("}")):
        raise ParseError(f"expected an answer set in braces, found {token!r}", lineno, 1)
    inner = token[1:-1].strip()
    if not inner:
        return frozenset()
    pairs = []
    for part in inner.split(","):
        part = part.strip()
        if ">" not in part:
            raise ParseError(f"expected 'a>b' inside answer set, found {part!r}", lineno, 1)
        top, _, bottom = part.partition(">")
        top, bottom = top.strip(), bottom.strip()
        if top not in labels or bottom not in labels:
            raise ParseError(f"unknown alternative in answer pair {part!r}", lineno, 1)
        pairs.append(OrderedPair(labels[top], labels[bottom]))
    return frozenset(pairs)


def parse_assignment_file(
    text: str,
    pd: ProductDomain,
    maps: Sequence[RestrictionMap],
    base_dir: Optional[str] = None,
) -> TwoStepAssignment:
    """Parse an assignment document: one line per realizable response profile,
    in canonical order, referencing subrules as ``catalog:N`` or
    ``file:relative/path.rule`` (resolved against ``base_dir``)."""
    from pathlib import Path

    from .domfile import ParseError
    from .rules import parse_rule_file

    _check_maps(pd, maps)
    labels = {label: i for i, label in enumerate(pd.labels)}
    responses = response_profiles(pd, maps)
    expected_iter = iter(responses)
    subrules: list[Rule] = []
    header = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header == 0:
            if not line.startswith("alternatives:"):
                raise ParseError("an assignment file starts with 'alternatives:'", lineno, 1)
            declared = tuple(line[len("alternatives:") :].split())
            if declared != pd.labels:
                raise ParseError(
                    f"alternatives {declared!r} do not match the domain's {pd.labels!r}",
                    lineno,
                    1,
                )
            header = 1
            continue
        if header == 1:
            if not line.startswith("agents:"):
                raise ParseError("expected 'agents:' after the alternatives line", lineno, 1)
            declared_agents = tuple(line[len("agents:") :].split())
            if declared_agents != pd.agent_names:
                raise ParseError(
                    f"agents {declared_agents!r} do not match the domain's "
                    f"{pd.agent_names!r}",
                    lineno,
                    1,
                )
            header = 2
            continue
        if "->" not in line:
            raise ParseError("expected 'answer sets -> subrule reference'", lineno, 1)
        left, _, right = line.partition("->")
        response = next(expected_iter, None)
        if response is None:
            raise ParseError(f"more than {len(responses)} assignment lines", lineno, 1)
        declared_answers = tuple(
            _parse_answer_set(part, labels, lineno) for part in left.strip().split("|")
        )
        if declared_answers != response.answers:
            expected_text = "|".join(
                _format_answer_set(a, pd.labels) for a in response.answers
            )
            raise ParseError(
                f"response profile out of canonical order: expected {expected_text!r}",
                lineno,
                1,
            )
        block_pd = blocks_for(pd, maps, response)
        ref = right.strip()
        if ref.startswith("catalog:"):
            catalog = second_step_catalog(block_pd)
            try:
                idx = int(ref[len("catalog:") :])
            except ValueError:
                raise ParseError(f"bad catalog index in {ref!r}", lineno, 1) from None
            if not 0 <= idx < len(catalog):
                raise ParseError(
                    f"catalog index {idx} out of range 0..{len(catalog) - 1}", lineno, 1
                )
            subrules.append(catalog[idx])
        elif ref.startswith("file:"):
            rel = ref[len("file:") :].strip()
            path = Path(base_dir) / rel if base_dir else Path(rel)
            try:
                content = path.read_text()
            except OSError as err:
                raise DomainError(f"cannot read subrule file {path}: {err}") from err
            subrules.append(parse_rule_file(content, block_pd))
        else:
            raise ParseError(
                f"subrule reference must be 'catalog:N' or 'file:PATH', found {ref!r}",
                lineno,
                1,
            )
    if header < 2:
        raise ParseError("incomplete assignment file header", 1, 1)
    missing = next(expected_iter, None)
    if missing is not None:
        raise DomainError(
            f"assignment file covers only {len(subrules)} of {len(responses)} response profiles"
        )
    return TwoStepAssignment(pd, tuple(maps), tuple(subrules))
