"""Pairwise similarity between Iconclass code sets.

Three complementary measures: Jaccard overlap (tight thematic match,
robust against code-heavy candidates), IDF-weighted overlap (rare codes
carry more weight, optionally sharpened by an impact exponent), and
hierarchy proximity (codes need not match exactly, nearby branches still
count).  All scoring functions are pure; the IDF table is immutable.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Set
from dataclasses import dataclass

from .errors import UnknownCode
from .notation import hierarchy_relation, parse_cached

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdfTable:
    """Document frequencies over a corpus of ``n_docs`` documents.

    ``doc_freq[c]`` is the number of documents carrying code ``c``; it is
    always between 1 and ``n_docs``, so idf(c) = ln(n_docs / doc_freq[c])
    is non-negative.
    """

    n_docs: int
    doc_freq: dict[str, int]

    def __post_init__(self):
        for code, n_c in self.doc_freq.items():
            if not 1 <= n_c <= self.n_docs:
                raise ValueError(
                    f"doc_freq[{code!r}] = {n_c} outside 1..{self.n_docs}"
                )


def jaccard(a: Set[str], b: Set[str]) -> float:
    """|a ∩ b| / |a ∪ b|, defined as 0.0 when both sets are empty."""
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def idf(table: IdfTable, code: str) -> float:
    """ln(N / n_c) for a code present in the table."""
    try:
        n_c = table.doc_freq[code]
    except KeyError:
        raise UnknownCode(code) from None
    return math.log(table.n_docs / n_c)


def idf_overlap(
    q: Set[str], d: Set[str], table: IdfTable, impact: float = 1.0
) -> float:
    """Sum of idf(c) ** impact over the codes shared by ``q`` and ``d``.

    impact = 1 is the plain IDF sum; impact = 0 degrades to the shared
    count; impact > 1 lets rare, diagnostic codes dominate common object
    codes.  Shared codes missing from the table contribute 0 with a
    warning (they can only appear when ``d`` is not corpus-backed).
    """
    if impact < 0:
        raise ValueError("impact must be >= 0")
    total = 0.0
    # Sorted iteration keeps float accumulation reproducible.
    for code in sorted(q & d):
        if code not in table.doc_freq:
            log.warning("code %r missing from IDF table, contributes 0", code)
            continue
        total += idf(table, code) ** impact
    return total


def hierarchy_score(q: Set[str], d: Set[str]) -> float:
    """Sum of :func:`hierarchy_relation` over all (query, document) code
    pairs, so several nearby codes each add their share.  Relations are
    exact binary fractions, so the sum does not depend on pair order.

    The relation comparison is expanded inline: this runs once per
    candidate document during recommendation and the per-pair call
    overhead dominates otherwise.  Equality with hierarchy_relation is
    pinned by tests.
    """
    qk = [parse_cached(c).canonical_key for c in q]
    dk = [parse_cached(c).canonical_key for c in d]
    total = 0.0
    for x in qk:
        len_x = len(x)
        for y in dk:
            common = 0
            for a, b in zip(x, y):
                if a != b:
                    break
                common += 1
            d_x = len_x - common
            d_y = len(y) - common
            if d_x == 0 and d_y == 0:
                total += 1.0
            elif common:
                worst = d_x if d_x > d_y else d_y
                if worst == 1:
                    total += 0.5
                elif worst == 2:
                    total += 0.25
    return total
