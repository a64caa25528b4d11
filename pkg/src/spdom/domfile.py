"""The ``.spdom`` domain-description format: parser and serializers.

A domain file names the shared alternatives and then gives one block per
agent.  An agent body is exactly one of:

- restriction *statements* — ``fix a > b`` lines and
  ``when a > b, c > d => e > f, g > h`` lines, read as conjunctive removal
  predicates applied to the universal domain (order-independent);
- a *generator* — ``universal``, ``single-peaked <axis labels>``,
  ``single-dipped <axis labels>``, ``self-preferring <label>``, or
  ``juror-bias <labels> over <labels>``;
- an explicit ``rankings { ... }`` block listing every member, best first.

``#`` starts a comment; ``;`` separates statements exactly like a newline.
Statement bodies double as declared restriction maps: the parser returns them
as per-agent map hints so downstream commands can honor the file's own
decomposition instead of re-deriving one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .classify import RestrictionMap, classify, rebuild
from .prefcore import (
    MAX_ALTERNATIVES,
    DomainError,
    OrderedPair,
    PreferenceDomain,
    ProductDomain,
    Ranking,
    SizeLimitError,
    generate_domain,
)


class ParseError(DomainError):
    """Syntax or reference error in a text format, with 1-based location."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"=>|[{},>;]|[A-Za-z0-9_][A-Za-z0-9_-]*|\S")

_NEWLINE = "\n"
_SYMBOLS = ("{", "}", ",", ">", "=>")
_GENERATOR_KEYWORDS = (
    "universal",
    "single-peaked",
    "single-dipped",
    "self-preferring",
    "juror-bias",
)


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for match in _TOKEN_RE.finditer(line):
            tok = match.group(0)
            if tok == ";":
                tokens.append(_Token(_NEWLINE, lineno, match.start() + 1))
            else:
                tokens.append(_Token(tok, lineno, match.start() + 1))
        tokens.append(_Token(_NEWLINE, lineno, len(raw) + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._i = 0

    def _eof_location(self) -> tuple[int, int]:
        if self._tokens:
            last = self._tokens[-1]
            return last.line, last.col
        return 1, 1

    def peek(self) -> Optional[_Token]:
        return self._tokens[self._i] if self._i < len(self._tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            line, col = self._eof_location()
            raise ParseError("unexpected end of file", line, col)
        self._i += 1
        return tok

    def at_end(self) -> bool:
        return self._i >= len(self._tokens)

    def skip_newlines(self) -> None:
        while (tok := self.peek()) is not None and tok.text == _NEWLINE:
            self._i += 1

    def expect(self, text: str, what: Optional[str] = None) -> _Token:
        tok = self.next()
        if tok.text != text:
            shown = "end of line" if tok.text == _NEWLINE else repr(tok.text)
            raise ParseError(f"expected {what or repr(text)}, found {shown}", tok.line, tok.col)
        return tok

    def expect_word(self, what: str) -> _Token:
        tok = self.next()
        if tok.text == _NEWLINE or tok.text in _SYMBOLS:
            shown = "end of line" if tok.text == _NEWLINE else repr(tok.text)
            raise ParseError(f"expected {what}, found {shown}", tok.line, tok.col)
        return tok


@dataclass(frozen=True)
class AgentSpec:
    """One parsed agent: its domain plus the map its body declared, if any."""

    name: str
    domain: PreferenceDomain
    map_hint: Optional[RestrictionMap]
    body_kind: str  # "statements" | "generator" | "rankings"


@dataclass(frozen=True)
class DomainSpec:
    """A parsed ``.spdom`` file."""

    labels: tuple[str, ...]
    agents: tuple[AgentSpec, ...]

    @property
    def product(self) -> ProductDomain:
        return ProductDomain.of(
            [a.domain for a in self.agents],
            labels=self.labels,
            agent_names=[a.name for a in self.agents],
        )

    @property
    def map_hints(self) -> tuple[Optional[RestrictionMap], ...]:
        return tuple(a.map_hint for a in self.agents)

    def resolved_maps(self, scan: str = "default") -> tuple[RestrictionMap, ...]:
        """Per-agent maps: the declared hint where present, else classify."""
        return tuple(
            a.map_hint if a.map_hint is not None else classify(a.domain, scan=scan)
            for a in self.agents
        )


def _parse_label(cursor: _Cursor, labels: dict[str, int], what: str = "alternative label") -> int:
    tok = cursor.expect_word(what)
    if tok.text not in labels:
        raise ParseError(f"unknown alternative {tok.text!r}", tok.line, tok.col)
    return labels[tok.text]


def _parse_pair(cursor: _Cursor, labels: dict[str, int]) -> OrderedPair:
    top_tok = cursor.expect_word("alternative label")
    if top_tok.text not in labels:
        raise ParseError(f"unknown alternative {top_tok.text!r}", top_tok.line, top_tok.col)
    cursor.expect(">")
    bottom_tok = cursor.expect_word("alternative label")
    if bottom_tok.text not in labels:
        raise ParseError(
            f"unknown alternative {bottom_tok.text!r}", bottom_tok.line, bottom_tok.col
        )
    if top_tok.text == bottom_tok.text:
        raise ParseError(f"pair compares {top_tok.text!r} with itself", top_tok.line, top_tok.col)
    return OrderedPair(labels[top_tok.text], labels[bottom_tok.text])


def _parse_pair_list(cursor: _Cursor, labels: dict[str, int]) -> list[OrderedPair]:
    pairs = [_parse_pair(cursor, labels)]
    while (tok := cursor.peek()) is not None and tok.text == ",":
        cursor.next()
        pairs.append(_parse_pair(cursor, labels))
    return pairs


def _end_statement(cursor: _Cursor) -> None:
    tok = cursor.peek()
    if tok is None or tok.text == "}":
        return
    if tok.text == _NEWLINE:
        cursor.skip_newlines()
        return
    raise ParseError(f"unexpected {tok.text!r} after statement", tok.line, tok.col)


def _parse_generator(cursor: _Cursor, keyword: _Token, labels: dict[str, int]) -> PreferenceDomain:
    m = len(labels)
    if keyword.text == "universal":
        return generate_domain("universal", m=m)
    if keyword.text in ("single-peaked", "single-dipped"):
        axis: list[int] = []
        while (tok := cursor.peek()) is not None and tok.text not in (_NEWLINE, "}"):
            axis.append(_parse_label(cursor, labels, "axis label"))
        if len(axis) != m or sorted(axis) != list(range(m)):
            raise ParseError(
                f"{keyword.text} needs every alternative exactly once as its axis",
                keyword.line,
                keyword.col,
            )
        kind = "single_peaked" if keyword.text == "single-peaked" else "single_dipped"
        return generate_domain(kind, axis=axis)
    if keyword.text == "self-preferring":
        owner = _parse_label(cursor, labels, "owner label")
        return generate_domain("self_preferring", m=m, owner=owner)
    if keyword.text == "juror-bias":
        high: list[int] = []
        while (tok := cursor.peek()) is not None and tok.text not in (_NEWLINE, "}"):
            if tok.text == "over":
                break
            high.append(_parse_label(cursor, labels, "label"))
        cursor.expect("over", "'over'")
        low: list[int] = []
        while (tok := cursor.peek()) is not None and tok.text not in (_NEWLINE, "}"):
            low.append(_parse_label(cursor, labels, "label"))
        if not high or not low:
            raise ParseError(
                "juror-bias needs labels on both sides of 'over'", keyword.line, keyword.col
            )
        return generate_domain("juror_bias", m=m, high=high, low=low)
    raise AssertionError(keyword.text)


def _parse_rankings_block(cursor: _Cursor, labels: dict[str, int]) -> PreferenceDomain:
    label_list = list(labels)
    cursor.expect("{")
    cursor.skip_newlines()
    orders: list[tuple[int, ...]] = []
    while True:
        tok = cursor.peek()
        if tok is None:
            line, col = cursor._eof_location()
            raise ParseError("unterminated rankings block", line, col)
        if tok.text == "}":
            cursor.next()
            break
        start = tok
        row: list[int] = []
        while (tok := cursor.peek()) is not None and tok.text not in (_NEWLINE, "}"):
            row.append(_parse_label(cursor, labels, "alternative label"))
        if sorted(row) != list(range(len(labels))):
            raise ParseError(
                f"a ranking line must list all of {' '.join(label_list)} exactly once",
                start.line,
                start.col,
            )
        order = tuple(row)
        if order in orders:
            raise ParseError("duplicate ranking line", start.line, start.col)
        orders.append(order)
        cursor.skip_newlines()
    if not orders:
        line, col = cursor._eof_location()
        raise ParseError("rankings block must list at least one ranking", line, col)
    return PreferenceDomain.of(Ranking.from_order(o) for o in orders)


def _parse_agent(cursor: _Cursor, labels: dict[str, int], agent_kw: _Token) -> AgentSpec:
    name_tok = cursor.expect_word("agent name")
    name = name_tok.text
    cursor.expect("{")
    cursor.skip_newlines()

    fixes: list[OrderedPair] = []
    whens: list[tuple[list[OrderedPair], list[OrderedPair]]] = []
    generator_domain: Optional[PreferenceDomain] = None
    rankings_domain: Optional[PreferenceDomain] = None
    statement_count = 0

    while True:
        tok = cursor.peek()
        if tok is None:
            line, col = cursor._eof_location()
            raise ParseError(f"unterminated body for agent {name!r}", line, col)
        if tok.text == "}":
            cursor.next()
            break
        statement_count += 1
        if tok.text == "fix":
            cursor.next()
            fixes.append(_parse_pair(cursor, labels))
        elif tok.text == "when":
            cursor.next()
            antecedent = _parse_pair_list(cursor, labels)
            cursor.expect("=>")
            conclusions = _parse_pair_list(cursor, labels)
            whens.append((antecedent, conclusions))
        elif tok.text in _GENERATOR_KEYWORDS:
            cursor.next()
            if statement_count > 1:
                raise ParseError(
                    "a generator must be the only statement in an agent body",
                    tok.line,
                    tok.col,
                )
            generator_domain = _parse_generator(cursor, tok, labels)
        elif tok.text == "rankings":
            cursor.next()
            if statement_count > 1:
                raise ParseError(
                    "a rankings block must be the only statement in an agent body",
                    tok.line,
                    tok.col,
                )
            rankings_domain = _parse_rankings_block(cursor, labels)
        else:
            raise ParseError(
                f"expected 'fix', 'when', a generator, or 'rankings', found {tok.text!r}",
                tok.line,
                tok.col,
            )
        _end_statement(cursor)
        cursor.skip_newlines()

    if (fixes or whens) and (generator_domain is not None or rankings_domain is not None):
        raise ParseError(
            f"agent {name!r} mixes statement and non-statement body kinds",
            agent_kw.line,
            agent_kw.col,
        )
    if (generator_domain is not None or rankings_domain is not None) and statement_count > 1:
        raise ParseError(
            f"agent {name!r} has more than one body statement", agent_kw.line, agent_kw.col
        )

    if generator_domain is not None:
        return AgentSpec(name, generator_domain, None, "generator")
    if rankings_domain is not None:
        return AgentSpec(name, rankings_domain, None, "rankings")

    # Statement body (possibly empty, meaning the universal domain).
    try:
        hint = RestrictionMap.of(len(labels), fixes, whens)
        domain = rebuild(hint)
    except DomainError as err:
        raise DomainError(f"agent {name!r}: {err}") from err
    return AgentSpec(name, domain, hint, "statements")


def parse_domain_file(text: str) -> DomainSpec:
    """Parse a ``.spdom`` document into its product domain and map hints."""
    cursor = _Cursor(_tokenize(text))
    cursor.skip_newlines()
    kw = cursor.expect_word("'alternatives'")
    if kw.text != "alternatives":
        raise ParseError(
            f"a domain file starts with 'alternatives', found {kw.text!r}", kw.line, kw.col
        )
    labels: dict[str, int] = {}
    while (tok := cursor.peek()) is not None and tok.text != _NEWLINE:
        word = cursor.expect_word("alternative label")
        if word.text in labels:
            raise ParseError(f"duplicate alternative {word.text!r}", word.line, word.col)
        labels[word.text] = len(labels)
    if not labels:
        raise ParseError("'alternatives' needs at least one label", kw.line, kw.col)
    if len(labels) > MAX_ALTERNATIVES:
        raise SizeLimitError(
            f"line {kw.line}: {len(labels)} alternatives exceeds the supported "
            f"maximum of {MAX_ALTERNATIVES}"
        )

    agents: list[AgentSpec] = []
    names: set[str] = set()
    cursor.skip_newlines()
    while not cursor.at_end():
        tok = cursor.next()
        if tok.text != "agent":
            raise ParseError(f"expected 'agent', found {tok.text!r}", tok.line, tok.col)
        agent = _parse_agent(cursor, labels, tok)
        if agent.name in names:
            raise ParseError(f"duplicate agent name {agent.name!r}", tok.line, tok.col)
        names.add(agent.name)
        agents.append(agent)
        cursor.skip_newlines()
    if not agents:
        raise ParseError("a domain file needs at least one agent", 1, 1)
    return DomainSpec(tuple(labels), tuple(agents))


def format_pair(p: OrderedPair, labels: Sequence[str]) -> str:
    return f"{labels[p.top]} > {labels[p.bottom]}"


def map_statement_lines(map_: RestrictionMap, labels: Sequence[str]) -> list[str]:
    """Render a restriction map as ``fix``/``when`` statement lines."""
    lines = [f"fix {format_pair(p, labels)}" for p in sorted(map_.base)]
    for antecedent, conclusions in map_.conditionals:
        left = ", ".join(format_pair(p, labels) for p in sorted(antecedent))
        right = ", ".join(format_pair(c, labels) for c in sorted(conclusions))
        lines.append(f"when {left} => {right}")
    return lines


def _ranking_line(r: Ranking, labels: Sequence[str]) -> str:
    return " ".join(labels[alt] for alt in r.order)


def serialize_product_domain(
    pd: ProductDomain,
    maps: Optional[Sequence[Optional[RestrictionMap]]] = None,
) -> str:
    """Render a product domain as a ``.spdom`` document.

    Agents with a map in ``maps`` are written as statement bodies (which
    re-parse to the same domain with the same hint); the rest are written as
    explicit rankings blocks.
    """
    if maps is None:
        maps = [None] * pd.n
    if len(maps) != pd.n:
        raise DomainError("need one (possibly None) map per agent")
    out = ["alternatives " + " ".join(pd.labels)]
    for name, domain, map_ in zip(pd.agent_names, pd.agents, maps):
        out.append("")
        out.append(f"agent {name} {{")
        if map_ is not None:
            if rebuild(map_) != domain:
                raise DomainError(f"map for agent {name!r} does not rebuild its domain")
            for line in map_statement_lines(map_, pd.labels):
                out.append(f"  {line}")
        else:
            out.append("  rankings {")
            for r in domain.rankings:
                out.append(f"    {_ranking_line(r, pd.labels)}")
            out.append("  }")
        out.append("}")
    return "\n".join(out) + "\n"


def serialize_domain(
    d: PreferenceDomain,
    labels: Optional[Sequence[str]] = None,
    name: str = "1",
    map_: Optional[RestrictionMap] = None,
) -> str:
    """Render a single preference domain as a one-agent ``.spdom`` document."""
    pd = ProductDomain.of([d], labels=labels, agent_names=[name])
    return serialize_product_domain(pd, [map_])
