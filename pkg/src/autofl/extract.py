"""Identifier extraction and normalization into per-file term bags.

Files are scanned with a small language-aware lexer that skips comments and
string literals and drops language keywords, yielding every remaining
identifier token in source order (declared and referenced names alike).
When lexing fails (unterminated string or comment), extraction degrades to a
plain lexical scan over the raw content and the file is flagged `fallback`.
"""
from __future__ import annotations

import keyword as _py_keyword
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import AbstractSet, Iterable, Sequence

LANGUAGES = ("java", "python", "c", "cpp", "csharp")

_JAVA_KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized this
throw throws transient try void volatile while var record sealed permits
yield true false null
""".split())

_C_KEYWORDS = frozenset("""
auto break case char const continue default do double else enum extern float
for goto if inline int long register restrict return short signed sizeof
static struct switch typedef union unsigned void volatile while
include define ifdef ifndef endif elif undef pragma error
""".split())

_CPP_KEYWORDS = _C_KEYWORDS | frozenset("""
alignas alignof and and_eq asm bitand bitor bool catch char8_t char16_t
char32_t class compl concept consteval constexpr constinit const_cast
co_await co_return co_yield decltype delete dynamic_cast explicit export
false friend mutable namespace new noexcept not not_eq nullptr operator or
or_eq private protected public reinterpret_cast requires static_assert
static_cast template this thread_local throw true try typeid typename using
virtual wchar_t xor xor_eq
""".split())

_CSHARP_KEYWORDS = frozenset("""
abstract as base bool break byte case catch char checked class const continue
decimal default delegate do double else enum event explicit extern false
finally fixed float for foreach goto if implicit in int interface internal is
lock long namespace new null object operator out override params private
protected public readonly ref return sbyte sealed short sizeof stackalloc
static string struct switch this throw true try typeof uint ulong unchecked
unsafe ushort using virtual void volatile while var async await record
""".split())

_PYTHON_KEYWORDS = frozenset(_py_keyword.kwlist)

LANGUAGE_KEYWORDS = {
    "java": _JAVA_KEYWORDS,
    "python": _PYTHON_KEYWORDS,
    "c": _C_KEYWORDS,
    "cpp": _CPP_KEYWORDS,
    "csharp": _CSHARP_KEYWORDS,
}

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]+|[a-z]+")
_NON_ALPHA_RE = re.compile(r"[^A-Za-z]+")
_PY_STRING_PREFIX_RE = re.compile(r"^[rRbBuUfF]{1,3}$")


class LexError(ValueError):
    """Raised internally when a file cannot be lexed cleanly."""


def load_stopwords(path: str | None = None) -> frozenset[str]:
    """Read a stopword list: one term per line, '#' comments, UTF-8."""
    if path is None:
        text = resources.files("autofl").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    terms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(line.lower())
    return frozenset(terms)


_DEFAULT_STOPWORDS: frozenset[str] | None = None


def default_stopwords() -> frozenset[str]:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


@dataclass(frozen=True)
class TermBag:
    """Multiset of normalized identifier terms for one file."""

    counts: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __bool__(self) -> bool:
        return bool(self.counts)


@dataclass(frozen=True)
class ExtractionOutcome:
    bag: TermBag
    fallback: bool


def _check_language(language: str) -> None:
    if language not in LANGUAGES:
        raise ValueError(f"unsupported language: {language!r} (expected one of {LANGUAGES})")


def _lex_c_family(content: str, language: str) -> list[str]:
    """Identifier tokens for Java/C/C++/C#; raises LexError on open constructs."""
    out: list[str] = []
    keywords = LANGUAGE_KEYWORDS[language]
    i, n = 0, len(content)
    while i < n:
        c = content[i]
        if c == "/" and i + 1 < n and content[i + 1] == "/":
            nl = content.find("\n", i)
            i = n if nl == -1 else nl + 1
        elif c == "/" and i + 1 < n and content[i + 1] == "*":
            end = content.find("*/", i + 2)
            if end == -1:
                raise LexError("unterminated block comment")
            i = end + 2
        elif c == "@" and language == "csharp" and i + 1 < n and content[i + 1] == '"':
            # verbatim string: "" is the only escape
            i += 2
            while True:
                q = content.find('"', i)
                if q == -1:
                    raise LexError("unterminated verbatim string")
                if q + 1 < n and content[q + 1] == '"':
                    i = q + 2
                    continue
                i = q + 1
                break
        elif c == '"' and language == "java" and content.startswith('"""', i):
            end = content.find('"""', i + 3)
            if end == -1:
                raise LexError("unterminated text block")
            i = end + 3
        elif c in "\"'":
            quote = c
            i += 1
            while True:
                if i >= n:
                    raise LexError("unterminated string literal")
                if content[i] == "\\":
                    i += 2
                elif content[i] == quote:
                    i += 1
                    break
                elif content[i] == "\n":
                    raise LexError("unterminated string literal")
                else:
                    i += 1
        elif c.isalpha() or c == "_":
            m = _IDENTIFIER_RE.match(content, i)
            assert m is not None
            token = m.group(0)
            if token not in keywords:
                out.append(token)
            i = m.end()
        elif c.isdigit():
            # numeric literal: consume so suffixes like 0xFF or 1e9f stay out
            j = i + 1
            while j < n and (content[j].isalnum() or content[j] in "._"):
                j += 1
            i = j
        else:
            i += 1
    return out


def _lex_python(content: str) -> list[str]:
    out: list[str] = []
    keywords = LANGUAGE_KEYWORDS["python"]
    i, n = 0, len(content)
    while i < n:
        c = content[i]
        if c == "#":
            nl = content.find("\n", i)
            i = n if nl == -1 else nl + 1
        elif c in "\"'":
            i = _skip_python_string(content, i)
        elif c.isalpha() or c == "_":
            m = _IDENTIFIER_RE.match(content, i)
            assert m is not None
            token = m.group(0)
            end = m.end()
            if end < n and content[end] in "\"'" and _PY_STRING_PREFIX_RE.match(token):
                i = _skip_python_string(content, end)
                continue
            if token not in keywords:
                out.append(token)
            i = end
        elif c.isdigit():
            j = i + 1
            while j < n and (content[j].isalnum() or content[j] in "._"):
                j += 1
            i = j
        else:
            i += 1
    return out


def _skip_python_string(content: str, i: int) -> int:
    n = len(content)
    quote = content[i]
    if content.startswith(quote * 3, i):
        end = content.find(quote * 3, i + 3)
        if end == -1:
            raise LexError("unterminated triple-quoted string")
        return end + 3
    i += 1
    while True:
        if i >= n:
            raise LexError("unterminated string literal")
        if content[i] == "\\":
            i += 2
        elif content[i] == quote:
            return i + 1
        elif content[i] == "\n":
            raise LexError("unterminated string literal")
        else:
            i += 1


def lexical_fallback_scan(content: str, language: str) -> list[str]:
    """Degraded extraction: identifier-shaped tokens minus language keywords."""
    _check_language(language)
    keywords = LANGUAGE_KEYWORDS[language]
    return [t for t in _IDENTIFIER_RE.findall(content) if t not in keywords]


def parse_identifiers(content: str, language: str) -> list[str]:
    """Extract identifier tokens in source order, comments and strings excluded.

    Falls back silently to :func:`lexical_fallback_scan` when the file cannot
    be lexed; use :func:`scan_content` when the fallback flag is needed.
    """
    identifiers, _ = scan_identifiers(content, language)
    return identifiers


def scan_identifiers(content: str, language: str) -> tuple[list[str], bool]:
    """Like parse_identifiers but reports whether the fallback path was taken."""
    _check_language(language)
    try:
        if language == "python":
            return _lex_python(content), False
        return _lex_c_family(content, language), False
    except LexError:
        return lexical_fallback_scan(content, language), True


def tokenize(identifier: str, stopwords: AbstractSet[str] | None = None) -> list[str]:
    """Split an identifier into normalized terms.

    Splits on underscores, digits, and camel-case boundaries (acronym runs
    included), lowercases, then drops terms shorter than 2 characters and
    stopword terms.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    terms = []
    for chunk in _NON_ALPHA_RE.split(identifier):
        for m in _CAMEL_RE.finditer(chunk):
            term = m.group(0).lower()
            if len(term) >= 2 and term not in stopwords:
                terms.append(term)
    return terms


def bag_from_terms(terms: Iterable[str]) -> TermBag:
    counts: dict[str, int] = {}
    for t in terms:
        counts[t] = counts.get(t, 0) + 1
    return TermBag(counts=counts)


def term_bag(
    content: str, language: str, stopwords: AbstractSet[str] | None = None
) -> TermBag:
    """Multiset of normalized terms over all identifiers in the file."""
    return scan_content(content, language, stopwords).bag


def scan_content(
    content: str, language: str, stopwords: AbstractSet[str] | None = None
) -> ExtractionOutcome:
    """Full extraction for one file: term bag plus the fallback flag."""
    identifiers, fallback = scan_identifiers(content, language)
    terms: list[str] = []
    for ident in identifiers:
        terms.extend(tokenize(ident, stopwords))
    return ExtractionOutcome(bag=bag_from_terms(terms), fallback=fallback)


def decode_source(raw: bytes) -> str:
    """UTF-8 decode with lossy replacement, per the extraction contract."""
    return raw.decode("utf-8", errors="replace")
