"""spdom: strategy-proofness analysis on restricted strict-preference domains.

The package models domains of strict rankings, derives their conditional or
non-conditional restriction-map form, partitions them by answers to the
derived conditions, audits and enumerates strategy-proof social choice rules,
counts two-step rule combinations in closed form, and verifies at small scale
that strategy-proof rules without dictators attain exactly two outcomes.
"""

from .classify import (
    AnswerSet,
    DomainRestriction,
    RestrictionMap,
    SCAN_MODES,
    answer_block_by_formula,
    answer_closure_pairs,
    apply_restriction,
    classify,
    partition_by_answers,
    realizable_answer_sets,
    rebuild,
    relabel_domain,
    relabel_map,
    restrict_by_answers,
    satisfied_antecedents,
)
from .counting import (
    BlockCount,
    ImpossibilityReport,
    PairVoteCount,
    SubruleCountReport,
    TheoremViolation,
    count_dictatorial,
    count_second_step,
    count_sp_range2,
    decimal_digit_count,
    dedekind,
    dictatorial_rules,
    enumerate_sp_rules,
    nonconditional_domains,
    pair_vote_rules,
    power_digit_count,
    second_step_catalog,
    verify_impossibility,
)
from .domfile import (
    AgentSpec,
    DomainSpec,
    ParseError,
    format_pair,
    map_statement_lines,
    parse_domain_file,
    serialize_domain,
    serialize_product_domain,
)
from .prefcore import (
    MAX_ALTERNATIVES,
    PROFILE_ENUMERATION_LIMIT,
    TABLE_CELL_LIMIT,
    DomainError,
    OrderedPair,
    PairSets,
    PreferenceDomain,
    ProductDomain,
    Ranking,
    SizeLimitError,
    SpdomError,
    UnsatisfiableRestrictionError,
    all_rankings,
    consistent_rankings,
    default_labels,
    generate_domain,
    is_non_conditional,
    nonconditional_closure,
    pair_sets,
)
from .rules import (
    ManipulationWitness,
    Rule,
    SpAuditReport,
    audit_sp_lemmas,
    constant_rule,
    dictators_of,
    dictatorship,
    find_manipulation,
    find_manipulation_within,
    is_strategy_proof,
    iter_manipulations,
    option_set,
    parse_rule_file,
    range_of,
    restrict_rule,
    serialize_rule,
)
from .twostep import (
    BlockDecomposition,
    DECOMPOSITION_DICTATORIAL,
    DECOMPOSITION_TWO_OUTCOME,
    DECOMPOSITION_VIOLATION,
    DecompositionReport,
    FirstStepWitness,
    ResponseProfile,
    SearchResult,
    TwoStepAssignment,
    assemble,
    blocks_for,
    decompose,
    first_step_witnesses,
    parse_assignment_file,
    response_profiles,
    search_sp_combinations,
    serialize_assignment,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "AgentSpec",
    "BlockCount",
    "BlockDecomposition",
    "DECOMPOSITION_DICTATORIAL",
    "DECOMPOSITION_TWO_OUTCOME",
    "DECOMPOSITION_VIOLATION",
    "DecompositionReport",
    "DomainError",
    "DomainRestriction",
    "DomainSpec",
    "FirstStepWitness",
    "ImpossibilityReport",
    "MAX_ALTERNATIVES",
    "ManipulationWitness",
    "OrderedPair",
    "PROFILE_ENUMERATION_LIMIT",
    "PairSets",
    "PairVoteCount",
    "ParseError",
    "PreferenceDomain",
    "ProductDomain",
    "Ranking",
    "ResponseProfile",
    "RestrictionMap",
    "Rule",
    "SCAN_MODES",
    "SearchResult",
    "SizeLimitError",
    "SpAuditReport",
    "SpdomError",
    "SubruleCountReport",
    "TABLE_CELL_LIMIT",
    "TheoremViolation",
    "TwoStepAssignment",
    "UnsatisfiableRestrictionError",
    "all_rankings",
    "answer_block_by_formula",
    "answer_closure_pairs",
    "apply_restriction",
    "assemble",
    "audit_sp_lemmas",
    "blocks_for",
    "classify",
    "consistent_rankings",
    "constant_rule",
    "count_dictatorial",
    "count_second_step",
    "count_sp_range2",
    "decimal_digit_count",
    "decompose",
    "dedekind",
    "default_labels",
    "dictatorial_rules",
    "dictators_of",
    "dictatorship",
    "enumerate_sp_rules",
    "find_manipulation",
    "find_manipulation_within",
    "first_step_witnesses",
    "format_pair",
    "generate_domain",
    "is_non_conditional",
    "is_strategy_proof",
    "iter_manipulations",
    "map_statement_lines",
    "nonconditional_closure",
    "nonconditional_domains",
    "option_set",
    "pair_sets",
    "pair_vote_rules",
    "parse_assignment_file",
    "parse_domain_file",
    "parse_rule_file",
    "partition_by_answers",
    "power_digit_count",
    "range_of",
    "realizable_answer_sets",
    "rebuild",
    "relabel_domain",
    "relabel_map",
    "response_profiles",
    "restrict_by_answers",
    "restrict_rule",
    "satisfied_antecedents",
    "search_sp_combinations",
    "second_step_catalog",
    "serialize_assignment",
    "serialize_domain",
    "serialize_product_domain",
    "serialize_rule",
    "verify_impossibility",
    "__version__",
]
