"""Boolean keyword protocol: parsing, rendering and matching.

Grammar::

    query  := clause ('OR' clause)*
    clause := term+                  # adjacency is AND, binds tighter than OR
    term   := '-'? (WORD | QUOTED)

``OR`` is an operator only in exact uppercase.  A quoted term opens with
``'`` or ``"`` and closes at the first matching quote that is followed by
whitespace or the end of input, so ``':'('`` reads as the literal ``:'(``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "QueryParseError",
    "Term",
    "Query",
    "HEALTH_PROTOCOL",
    "parse_query",
    "render",
    "matches",
    "default_protocol",
    "text_tokens",
]

HEALTH_PROTOCOL = (
    "rumah OR sakit OR rawat OR inap OR demam OR panas -cuaca OR berdarah "
    "OR pendarahan OR trombosit OR badan OR muntah OR badan OR tua OR ':'('"
)

_QUOTES = ("'", '"')
_TOKEN_RE = re.compile(r"[^\W_]+")


class QueryParseError(ValueError):
    """Parse failure; ``offset`` is a UTF-8 byte offset into the input."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


@dataclass(frozen=True)
class Term:
    text: str
    negated: bool = False
    quoted: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("term text must be non-empty")
        if not self.quoted:
            if any(c.isspace() for c in self.text):
                raise ValueError(f"unquoted term contains whitespace: {self.text!r}")
            if self.text == "OR" and not self.negated:
                raise ValueError("unquoted term cannot be the OR operator")
            if self.text[0] in _QUOTES:
                raise ValueError(f"unquoted term starts with a quote: {self.text!r}")
            if self.text == "-" or (self.text[0] == "-" and not self.negated):
                raise ValueError(f"unquoted term cannot start with '-': {self.text!r}")
        elif _quote_char(self.text) is None:
            raise ValueError(f"quoted term cannot be rendered: {self.text!r}")


@dataclass(frozen=True)
class Query:
    clauses: tuple[tuple[Term, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        if not clauses:
            raise ValueError("query needs at least one clause")
        for c in clauses:
            if not c:
                raise ValueError("empty clause")
            if all(t.negated for t in c):
                raise ValueError("clause has no positive term")
        object.__setattr__(self, "clauses", clauses)

    def __str__(self):
        return render(self)


def _quote_char(content: str) -> str | None:
    # a quote char q is usable if q never appears followed by whitespace
    # inside the content and the content does not end with q
    for q in ('"', "'"):
        if content.endswith(q):
            continue
        if re.search(re.escape(q) + r"\s", content):
            continue
        return q
    return None


def _byte_offset(s: str, i: int) -> int:
    return len(s[:i].encode("utf-8"))


def _tokens(s: str):
    """Yield (kind, value, char_offset) with kind in {'OR', 'TERM'}."""
    i, n = 0, len(s)
    while i < n:
        if s[i].isspace():
            i += 1
            continue
        start = i
        negated = False
        if s[i] == "-" and i + 1 < n and not s[i + 1].isspace():
            negated = True
            i += 1
        if s[i] in _QUOTES:
            q = s[i]
            j = i + 1
            close = -1
            while j < n:
                if s[j] == q and (j + 1 == n or s[j + 1].isspace()):
                    close = j
                    break
                j += 1
            if close < 0:
                raise QueryParseError("unbalanced quote", _byte_offset(s, i))
            content = s[i + 1 : close]
            if not content:
                raise QueryParseError("empty quoted term", _byte_offset(s, i))
            yield "TERM", Term(content, negated, True), start
            i = close + 1
            continue
        j = i
        while j < n and not s[j].isspace():
            j += 1
        word = s[i:j]
        if word == "OR" and not negated:
            yield "OR", None, start
            i = j
            continue
        try:
            term = Term(word, negated, False)
        except ValueError as exc:
            raise QueryParseError(str(exc), _byte_offset(s, start)) from None
        yield "TERM", term, start
        i = j


def parse_query(text: str) -> Query:
    if not text or not text.strip():
        raise QueryParseError("empty query", 0)
    clauses = []
    current: list[Term] = []
    current_start = 0
    last_or = None
    for kind, value, pos in _tokens(text):
        if kind == "OR":
            if not current:
                what = "leading OR" if not clauses else "double OR"
                raise QueryParseError(what, _byte_offset(text, pos))
            clauses.append((current, current_start))
            current = []
            last_or = pos
        else:
            if not current:
                current_start = pos
            current.append(value)
    if not current:
        raise QueryParseError("trailing OR", _byte_offset(text, last_or or 0))
    clauses.append((current, current_start))
    for terms, pos in clauses:
        if all(t.negated for t in terms):
            raise QueryParseError("clause has only negated terms", _byte_offset(text, pos))
    return Query(tuple(tuple(terms) for terms, _ in clauses))


def _render_term(t: Term) -> str:
    body = t.text
    if t.quoted:
        q = _quote_char(body)
        body = f"{q}{body}{q}"
    return ("-" if t.negated else "") + body


def render(query: Query) -> str:
    """Inverse of :func:`parse_query` up to whitespace."""
    return " OR ".join(" ".join(_render_term(t) for t in c) for c in query.clauses)


def text_tokens(text: str) -> set[str]:
    """Case-folded maximal runs of letters or digits."""
    return {m.casefold() for m in _TOKEN_RE.findall(text)}


def _term_hit(term: Term, tokens: set[str], folded: str) -> bool:
    if term.quoted:
        return term.text.casefold() in folded
    return term.text.casefold() in tokens


def matches(query: Query, text: str) -> bool:
    """True iff at least one clause matches ``text`` (raw, un-normalized)."""
    tokens = text_tokens(text)
    folded = text.casefold()
    for clause in query.clauses:
        if all(_term_hit(t, tokens, folded) != t.negated for t in clause):
            return True
    return False


@lru_cache(maxsize=1)
def default_protocol() -> Query:
    """The 2016 Indonesian health keyword protocol, parsed."""
    return parse_query(HEALTH_PROTOCOL)
