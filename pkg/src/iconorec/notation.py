"""Iconclass notation parsing and hierarchy traversal.

A notation is a compact alphanumeric path into the Iconclass taxonomy,
for example ``25F23(LION)(+12)``.  Digits and capital letters refine the
subject one step at a time, a parenthesised text embeds a species name,
proper name or number as a single step, and a trailing ``(+...)`` key
appends contextual qualifier characters, again one step each.  Doubled
letters (``25FF``, ``43CC``) are ordinary consecutive letter steps.

Everything hierarchy-aware in this package (parent chains, ancestor
posting lists, proximity scoring) is built on the atom sequence produced
here.  Notations are immutable and all functions in this module are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import MalformedNotation

DIGIT = "digit"
LETTER = "letter"
BRACKET_TEXT = "bracket-text"
KEY_CHAR = "key-char"

_DIGITS = frozenset("0123456789")
_LETTERS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ")
_KEY_CHARS = frozenset(
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
)


@dataclass(frozen=True)
class Atom:
    """One refinement step: a digit, a capital letter, a bracketed text,
    or a single key character."""

    kind: str
    value: str

    def canonical(self) -> str:
        # Bracket text compares with outer whitespace trimmed (case kept:
        # proper names are case-significant); other kinds compare verbatim.
        if self.kind == BRACKET_TEXT:
            return self.value.strip()
        return self.value


@dataclass(frozen=True, eq=False)
class Notation:
    """A parsed Iconclass code: the raw string plus its atom sequence.

    ``atoms`` holds the digit/letter/bracket steps and ``key`` the
    characters of the optional ``(+...)`` suffix.  Equality and hashing
    use the canonical atom sequence, so bracket texts differing only in
    outer whitespace compare equal while ``raw`` stays verbatim.
    """

    raw: str
    atoms: tuple[Atom, ...]
    key: tuple[Atom, ...] = ()

    @cached_property
    def sequence(self) -> tuple[Atom, ...]:
        """Main atoms followed by key characters: one entry per hierarchy step."""
        return self.atoms + self.key

    @cached_property
    def canonical_key(self) -> tuple[tuple[str, str], ...]:
        return tuple((a.kind, a.canonical()) for a in self.sequence)

    @property
    def depth(self) -> int:
        return len(self.atoms) + len(self.key)

    def render(self) -> str:
        return _render(self.atoms, self.key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Notation):
            return NotImplemented
        return self.canonical_key == other.canonical_key

    def __hash__(self) -> int:
        return hash(self.canonical_key)

    def __str__(self) -> str:
        return self.raw

    def __repr__(self) -> str:
        return f"Notation({self.raw!r})"


def _render(atoms: tuple[Atom, ...], key: tuple[Atom, ...]) -> str:
    out = []
    for atom in atoms:
        out.append(f"({atom.value})" if atom.kind == BRACKET_TEXT else atom.value)
    if key:
        out.append("(+" + "".join(a.value for a in key) + ")")
    return "".join(out)


def parse(s: str) -> Notation:
    """Parse ``s`` into a :class:`Notation`.

    Grammar: a leading digit (the top division 0-9), then any mix of
    digits, capital letters and ``(text)`` groups, optionally terminated
    by a single ``(+chars)`` key.  ``parse`` round-trips:
    ``parse(s).render() == s`` for every accepted string.

    Raises :class:`MalformedNotation` on empty input, surrounding
    whitespace, characters outside the grammar, unbalanced brackets,
    empty bracket text, an empty key, or a key that is not the final
    segment.
    """
    if not s:
        raise MalformedNotation("empty notation")
    if s != s.strip():
        raise MalformedNotation(f"notation has surrounding whitespace: {s!r}")
    if s[0] not in _DIGITS:
        raise MalformedNotation(f"notation must start with a digit 0-9: {s!r}")

    atoms: list[Atom] = []
    key: tuple[Atom, ...] = ()
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c in _DIGITS:
            atoms.append(Atom(DIGIT, c))
            i += 1
        elif c in _LETTERS:
            atoms.append(Atom(LETTER, c))
            i += 1
        elif c == "(":
            j = s.find(")", i)
            if j < 0:
                raise MalformedNotation(f"unbalanced bracket in {s!r}")
            inner = s[i + 1 : j]
            if inner.startswith("+"):
                chars = inner[1:]
                if not chars:
                    raise MalformedNotation(f"empty key in {s!r}")
                for ch in chars:
                    if ch not in _KEY_CHARS:
                        raise MalformedNotation(
                            f"non-alphanumeric key character {ch!r} in {s!r}"
                        )
                if j != n - 1:
                    raise MalformedNotation(f"key is not the final segment in {s!r}")
                key = tuple(Atom(KEY_CHAR, ch) for ch in chars)
                i = j + 1
            else:
                if "(" in inner:
                    raise MalformedNotation(f"unbalanced bracket in {s!r}")
                if not inner.strip():
                    raise MalformedNotation(f"empty bracket text in {s!r}")
                atoms.append(Atom(BRACKET_TEXT, inner))
                i = j + 1
        else:
            raise MalformedNotation(f"unexpected character {c!r} in {s!r}")
    return Notation(raw=s, atoms=tuple(atoms), key=key)


# Parsing is pure and Notation is immutable, so hot paths (index builds,
# candidate scoring) share parses through this cache.
parse_cached = lru_cache(maxsize=None)(parse)


def _make(atoms: tuple[Atom, ...], key: tuple[Atom, ...]) -> Notation:
    return Notation(raw=_render(atoms, key), atoms=atoms, key=key)


def parent(n: Notation) -> Notation | None:
    """The notation one refinement step up, or None at a division root.

    The last key character is removed first; a key emptied down to
    ``(+)`` disappears entirely.  After the key, main atoms are removed
    one at a time until only the top-division digit remains.
    """
    if n.key:
        return _make(n.atoms, n.key[:-1])
    if len(n.atoms) <= 1:
        return None
    return _make(n.atoms[:-1], ())


def ancestors(n: Notation, max_depth: int) -> list[Notation]:
    """``[parent, grandparent, ...]`` capped at ``max_depth`` entries,
    ending at the division root."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    chain: list[Notation] = []
    cur = parent(n)
    while cur is not None and len(chain) < max_depth:
        chain.append(cur)
        cur = parent(cur)
    return chain


def hierarchy_relation(a: Notation, b: Notation) -> float:
    """Tree proximity of two codes: 1.0, 0.5, 0.25 or 0.0.

    1.0 for identical codes; otherwise the nearest common ancestor is the
    longest shared atom prefix, and with ``d`` = the larger number of
    up-steps from either code to it: 0.5 when d == 1 (parent/child or
    siblings), 0.25 when d == 2 (grandparent, two-step chains, cousins),
    0.0 beyond that or across top divisions.
    """
    ka = a.canonical_key
    kb = b.canonical_key
    common = 0
    for x, y in zip(ka, kb):
        if x != y:
            break
        common += 1
    d_a = len(ka) - common
    d_b = len(kb) - common
    if d_a == 0 and d_b == 0:
        return 1.0
    if common == 0:
        return 0.0
    worst = max(d_a, d_b)
    if worst == 1:
        return 0.5
    if worst == 2:
        return 0.25
    return 0.0
