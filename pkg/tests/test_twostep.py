from __future__ import annotations

import itertools

import pytest

from spdom import (
    DECOMPOSITION_DICTATORIAL,
    DECOMPOSITION_TWO_OUTCOME,
    DECOMPOSITION_VIOLATION,
    DomainError,
    OrderedPair,
    ParseError,
    ProductDomain,
    ResponseProfile,
    Rule,
    TwoStepAssignment,
    assemble,
    blocks_for,
    classify,
    constant_rule,
    decompose,
    dictators_of,
    enumerate_sp_rules,
    find_manipulation,
    first_step_witnesses,
    generate_domain,
    is_strategy_proof,
    parse_assignment_file,
    range_of,
    response_profiles,
    satisfied_antecedents,
    search_sp_combinations,
    second_step_catalog,
    serialize_assignment,
    serialize_rule,
)

SP3 = generate_domain("single_peaked", axis=[0, 1, 2])
XY = frozenset({OrderedPair(0, 1)})


def _sp3_product() -> tuple[ProductDomain, tuple]:
    pd = ProductDomain.of([SP3, SP3], labels=["x", "y", "z"])
    maps = (classify(SP3), classify(SP3))
    return pd, maps


def _leftmost_top_rule(pd: ProductDomain) -> Rule:
    table = []
    for profile in pd.iter_profiles():
        tops = [d.rankings[digit].top for digit, d in zip(profile, pd.agents)]
        table.append(min(tops))
    return Rule(pd, tuple(table))


# ---------------------------------------------------------------------------
# Response profiles and blocks


def test_response_profiles_canonical():
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    assert [r.answers for r in responses] == [
        (frozenset(), frozenset()),
        (frozenset(), XY),
        (XY, frozenset()),
        (XY, XY),
    ]


def test_response_profiles_chain(ex2_spec):
    pd = ex2_spec.product
    responses = response_profiles(pd, ex2_spec.map_hints)
    assert len(responses) == 16
    assert responses[0].answers == (frozenset(), frozenset())
    full = frozenset({OrderedPair(0, 1), OrderedPair(1, 2), OrderedPair(2, 3)})
    assert responses[-1].answers == (full, full)


def test_blocks_for():
    pd, maps = _sp3_product()
    sizes = [blocks_for(pd, maps, r).sizes for r in response_profiles(pd, maps)]
    assert sizes == [(3, 3), (3, 1), (1, 3), (1, 1)]
    block = blocks_for(pd, maps, ResponseProfile((XY, XY)))
    assert block.labels == pd.labels and block.agent_names == pd.agent_names
    assert [r.order for r in block.agents[0].rankings] == [(0, 1, 2)]


def test_blocks_for_unrealizable(ex2_spec):
    pd = ex2_spec.product
    vw_only = frozenset({OrderedPair(0, 1)})
    with pytest.raises(DomainError, match="not realizable"):
        blocks_for(pd, ex2_spec.map_hints, ResponseProfile((vw_only, vw_only)))


def test_map_validation():
    pd, maps = _sp3_product()
    with pytest.raises(DomainError):
        response_profiles(pd, maps[:1])
    wrong = classify(generate_domain("universal", m=3))
    with pytest.raises(DomainError, match="does not rebuild"):
        response_profiles(pd, (wrong, wrong))


# ---------------------------------------------------------------------------
# Assembling


def test_assemble_routes_agree():
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    subrules = tuple(
        constant_rule(blocks_for(pd, maps, r), outcome)
        for r, outcome in zip(responses, (0, 1, 2, 0))
    )
    via_sequence = assemble(pd, maps, subrules)
    via_assignment = assemble(pd, maps, TwoStepAssignment(pd, maps, subrules))
    assert via_sequence == via_assignment
    # Independent check: each profile gets its response profile's outcome.
    expected_outcome = {r.answers: o for r, o in zip(responses, (0, 1, 2, 0))}
    for profile in pd.iter_profiles():
        answers = tuple(
            satisfied_antecedents(d.rankings[digit], map_)
            for digit, d, map_ in zip(profile, pd.agents, maps)
        )
        assert via_sequence.outcome(profile) == expected_outcome[answers]


def test_assemble_non_constant_subrule():
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    blocks = [blocks_for(pd, maps, r) for r in responses]
    # On the (no-answer, no-answer) block, pick the monotone vote rule between
    # the two free-for-both outcomes y and z; constants elsewhere.
    vote = next(
        r
        for r in second_step_catalog(blocks[0])
        if range_of(r) == frozenset({1, 2})
    )
    subrules = (vote, constant_rule(blocks[1], 1), constant_rule(blocks[2], 1), constant_rule(blocks[3], 1))
    rule = assemble(pd, maps, subrules)
    for profile in pd.iter_profiles():
        rankings = pd.rankings_at(profile)
        if all(r.prefers(1, 0) for r in rankings):  # both in the no-answer block
            sub_profile = tuple(
                blocks[0].agents[i].index(rankings[i]) for i in range(2)
            )
            assert rule.outcome(profile) == vote.outcome(sub_profile)
        else:
            assert rule.outcome(profile) == 1


def test_assignment_validation():
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    blocks = [blocks_for(pd, maps, r) for r in responses]
    good = tuple(constant_rule(b, 0) for b in blocks)
    with pytest.raises(DomainError, match="one per response profile"):
        TwoStepAssignment(pd, maps, good[:3])
    bad = (constant_rule(pd, 0),) + good[1:]
    with pytest.raises(DomainError, match="not over its block"):
        TwoStepAssignment(pd, maps, bad)
    other_pd = ProductDomain.of([SP3, SP3])  # default labels a, b, c
    with pytest.raises(DomainError, match="different product"):
        assemble(other_pd, maps, TwoStepAssignment(pd, maps, good))


# ---------------------------------------------------------------------------
# Decomposition


def test_decompose_leftmost_top_rule():
    pd, maps = _sp3_product()
    rule = _leftmost_top_rule(pd)
    assert is_strategy_proof(rule)
    assert dictators_of(rule) == frozenset()
    assert range_of(rule) == frozenset({0, 1, 2})
    report = decompose(rule, maps)
    kinds = [b.classification for b in report.blocks]
    assert kinds == [
        DECOMPOSITION_TWO_OUTCOME,
        DECOMPOSITION_DICTATORIAL,
        DECOMPOSITION_DICTATORIAL,
        DECOMPOSITION_DICTATORIAL,
    ]
    assert report.blocks[0].range_size == 2
    assert report.blocks[0].dictators == frozenset()
    assert all(b.range_size == 1 for b in report.blocks[1:])
    assert report.violations == () and report.clean


def test_decompose_flags_manipulable_subrule():
    pd, maps = _sp3_product()
    table = []
    for profile in pd.iter_profiles():
        table.append(pd.agents[0].rankings[profile[0]].bottom)
    rule = Rule(pd, tuple(table))
    report = decompose(rule, maps)
    assert not report.clean
    assert any(b.classification == DECOMPOSITION_VIOLATION for b in report.blocks)


def test_decompose_subrules_restrict_the_rule():
    pd, maps = _sp3_product()
    rule = _leftmost_top_rule(pd)
    for block in decompose(rule, maps).blocks:
        sub_pd = block.subrule.domain
        for profile in sub_pd.iter_profiles():
            parent_profile = tuple(
                pd.agents[i].index(sub_pd.agents[i].rankings[digit])
                for i, digit in enumerate(profile)
            )
            assert block.subrule.outcome(profile) == rule.outcome(parent_profile)


# ---------------------------------------------------------------------------
# First-step witnesses


def test_first_step_witnesses_empty_for_sp():
    pd, maps = _sp3_product()
    assert first_step_witnesses(_leftmost_top_rule(pd), maps) == ()


def test_first_step_witnesses_all_answer_changing(ex1_spec):
    # Constant subrules everywhere except the both-answered block: within-block
    # deviations never change the outcome, so every manipulation must cross
    # blocks by changing the manipulator's own answers.
    pd = ex1_spec.product
    maps = ex1_spec.map_hints
    responses = response_profiles(pd, maps)
    xy = frozenset({OrderedPair(2, 3)})
    subrules = tuple(
        constant_rule(blocks_for(pd, maps, r), 4 if r.answers == (xy, xy) else 1)
        for r in responses
    )
    rule = assemble(pd, maps, subrules)
    assert find_manipulation(rule) is not None
    witnesses = first_step_witnesses(rule, maps)
    assert witnesses
    assert all(w.answer_changing for w in witnesses)
    # Every block subrule is (trivially) strategy-proof even though the
    # assembled rule is manipulable.
    assert decompose(rule, maps).clean


def test_first_step_witnesses_within_block():
    pd, maps = _sp3_product()
    table = tuple(pd.agents[0].rankings[p[0]].bottom for p in pd.iter_profiles())
    witnesses = first_step_witnesses(Rule(pd, table), maps)
    assert any(not w.answer_changing for w in witnesses)


# ---------------------------------------------------------------------------
# Catalog-driven search


def test_search_single_peaked_product_is_exhaustive():
    pd, maps = _sp3_product()
    result = search_sp_combinations(pd, maps)
    assert result.candidates_total == 11 * 5 * 5 * 3 == 825
    assert result.candidates_tried == 825
    assert result.complete
    assert len(result.rules) == 24
    assert {r.table for r in result.rules} == {
        r.table for r in enumerate_sp_rules(pd)
    }
    # Each reported assignment reassembles into its rule.
    responses = response_profiles(pd, maps)
    catalogs = [second_step_catalog(blocks_for(pd, maps, r)) for r in responses]
    for indices, rule in zip(result.assignments, result.rules):
        subrules = [catalogs[i][j] for i, j in enumerate(indices)]
        assert assemble(pd, maps, subrules) == rule


def test_search_budget_truncation():
    pd, maps = _sp3_product()
    result = search_sp_combinations(pd, maps, budget=100)
    assert result.candidates_tried == 100
    assert not result.complete
    assert result.candidates_total == 825
    full = search_sp_combinations(pd, maps)
    assert {r.table for r in result.rules} <= {r.table for r in full.rules}
    with pytest.raises(DomainError):
        search_sp_combinations(pd, maps, budget=0)


def test_search_threads_match():
    pd, maps = _sp3_product()
    assert search_sp_combinations(pd, maps, threads=2) == search_sp_combinations(pd, maps)


# ---------------------------------------------------------------------------
# Assignment file format


def test_assignment_roundtrip():
    pd, maps = _sp3_product()
    result = search_sp_combinations(pd, maps)
    responses = response_profiles(pd, maps)
    catalogs = [second_step_catalog(blocks_for(pd, maps, r)) for r in responses]
    indices = result.assignments[5]
    assignment = TwoStepAssignment(
        pd, maps, tuple(catalogs[i][j] for i, j in enumerate(indices))
    )
    text = serialize_assignment(assignment)
    lines = text.splitlines()
    assert lines[0] == "alternatives: x y z"
    assert lines[1] == "agents: 1 2"
    assert lines[2].startswith("{}|{} -> catalog:")
    again = parse_assignment_file(text, pd, maps)
    assert again == assignment
    assert assemble(pd, maps, again) == result.rules[5]


def test_assignment_file_reference(tmp_path):
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    blocks = [blocks_for(pd, maps, r) for r in responses]
    special = second_step_catalog(blocks[0])[4]
    (tmp_path / "sub.rule").write_text(serialize_rule(special))
    text = (
        "alternatives: x y z\n"
        "agents: 1 2\n"
        "{}|{} -> file:sub.rule\n"
        "{}|{x>y} -> catalog:1\n"
        "{x>y}|{} -> catalog:1\n"
        "{x>y}|{x>y} -> catalog:1\n"
    )
    assignment = parse_assignment_file(text, pd, maps, base_dir=str(tmp_path))
    assert assignment.subrules[0] == special
    assert assignment.subrules[1] == second_step_catalog(blocks[1])[1]


def test_assignment_parse_errors(tmp_path):
    pd, maps = _sp3_product()

    def parse(text: str):
        return parse_assignment_file(text, pd, maps, base_dir=str(tmp_path))

    good = (
        "alternatives: x y z\n"
        "agents: 1 2\n"
        "{}|{} -> catalog:0\n"
        "{}|{x>y} -> catalog:0\n"
        "{x>y}|{} -> catalog:0\n"
        "{x>y}|{x>y} -> catalog:0\n"
    )
    assert len(parse(good).subrules) == 4

    with pytest.raises(ParseError, match="starts with 'alternatives:'"):
        parse("agents: 1 2\n")
    with pytest.raises(ParseError, match="do not match"):
        parse("alternatives: x y q\n" + good.split("\n", 1)[1])
    with pytest.raises(ParseError, match="expected 'agents:'"):
        parse("alternatives: x y z\n{}|{} -> catalog:0\n")
    with pytest.raises(ParseError, match="agents .* do not match"):
        parse(good.replace("agents: 1 2", "agents: a b"))
    with pytest.raises(ParseError, match="canonical order"):
        parse(good.replace("{}|{x>y} -> catalog:0", "{x>y}|{} -> catalog:0", 1))
    with pytest.raises(ParseError, match="out of range"):
        parse(good.replace("{}|{} -> catalog:0", "{}|{} -> catalog:99"))
    with pytest.raises(ParseError, match="bad catalog index"):
        parse(good.replace("{}|{} -> catalog:0", "{}|{} -> catalog:x"))
    with pytest.raises(ParseError, match="'catalog:N' or 'file:PATH'"):
        parse(good.replace("{}|{} -> catalog:0", "{}|{} -> magic:3"))
    with pytest.raises(ParseError, match="more than 4"):
        parse(good + "{x>y}|{x>y} -> catalog:0\n")
    with pytest.raises(DomainError, match="covers only 3 of 4"):
        parse(good.rsplit("{x>y}|{x>y}", 1)[0])
    with pytest.raises(ParseError, match="answer set in braces"):
        parse(good.replace("{}|{}", "()|{}"))
    with pytest.raises(ParseError, match="unknown alternative"):
        parse(good.replace("{}|{x>y} ", "{}|{q>y} "))
    with pytest.raises(DomainError, match="cannot read"):
        parse(good.replace("{}|{} -> catalog:0", "{}|{} -> file:missing.rule"))
    with pytest.raises(ParseError, match="incomplete assignment file header"):
        parse("alternatives: x y z\n")


def test_serialize_rejects_non_catalog_subrule():
    pd, maps = _sp3_product()
    responses = response_profiles(pd, maps)
    blocks = [blocks_for(pd, maps, r) for r in responses]
    # A manipulable subrule on the first block is not in any catalog.
    weird = Rule(blocks[0], tuple(r.bottom for r in blocks[0].agents[0].rankings for _ in range(3)))
    subrules = (weird,) + tuple(constant_rule(b, 0) for b in blocks[1:])
    assignment = TwoStepAssignment(pd, maps, subrules)
    with pytest.raises(DomainError, match="not in its block catalog"):
        serialize_assignment(assignment)


# ---------------------------------------------------------------------------
# Decompose/assemble identity


@pytest.mark.parametrize("setup", ["single_peaked_pair", "universal_pair"])
def test_assemble_inverts_decompose_on_every_sp_rule(setup):
    # Splitting any strategy-proof rule into its response-profile subrules and
    # gluing those subrules back together must reproduce the rule exactly; and
    # the decomposition of a strategy-proof rule never contains a violation.
    if setup == "single_peaked_pair":
        pd, maps = _sp3_product()
        expected_rules = 24
    else:
        uni = generate_domain("universal", m=3)
        pd = ProductDomain.of([uni, uni], labels=["x", "y", "z"])
        maps = (classify(uni), classify(uni))
        expected_rules = 17
    rules = list(enumerate_sp_rules(pd))
    assert len(rules) == expected_rules
    for rule in rules:
        report = decompose(rule, maps)
        assert report.clean
        reassembled = assemble(pd, maps, tuple(b.subrule for b in report.blocks))
        assert reassembled == rule
