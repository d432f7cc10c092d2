"""Growth counts for circle graphs: path totals, loop weights, torus systems.

Two weight matrices drive everything.  The covering matrix totals the
covering degrees p(e) between vertex pairs; the winding matrix totals the
(signed) winding numbers q(e).  Row sums of covering-matrix powers count
forward path lifts; column sums of powers of the entrywise-absolute
winding matrix count backward lifts.

A closed edge word contributes a finite family of periodic circle loops.
Its size is |prod p(e_i) - prod q(e_i)|, the absolute determinant of the
word's cyclic exponent system; when the two products are equal the system
is singular and the word carries a continuum of loops instead of a finite
count, which every summary here must surface rather than absorb.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceededError, DegenerateLoopError
from .exact_matrix import ExactMatrix, determinant
from .graph_core import (
    DEFAULT_WORD_CAP,
    CircleGraph,
    DiscreteWord,
    SymbolGraph,
    iter_word_products,
)


def covering_matrix(g: CircleGraph) -> ExactMatrix:
    """Entry (v, w) totals p(e) over edges from v to w."""
    return _vertex_matrix(g, lambda e: e.p)


def winding_matrix(g: CircleGraph) -> ExactMatrix:
    """Entry (v, w) totals the signed q(e) over edges from v to w."""
    return _vertex_matrix(g, lambda e: e.q)


def winding_matrix_abs(g: CircleGraph) -> ExactMatrix:
    """Entry (v, w) totals |q(e)| over edges from v to w."""
    return _vertex_matrix(g, lambda e: abs(e.q))


def edge_count_matrix(g: CircleGraph) -> ExactMatrix:
    """Plain edge-count adjacency between vertex pairs."""
    return _vertex_matrix(g, lambda e: 1)


def _vertex_matrix(g: CircleGraph, weight) -> ExactMatrix:
    idx = {v: i for i, v in enumerate(g.vertices)}
    n = len(g.vertices)
    rows = [[0] * n for _ in range(n)]
    for e in g.edges:
        rows[idx[e.source]][idx[e.range]] += weight(e)
    return ExactMatrix.from_rows(rows, labels=g.vertices)


def mat_Lambda(sg: SymbolGraph) -> ExactMatrix:
    """0/1 adjacency of sheet symbols: (e, k) may precede (f, l) iff s(e) = r(f)."""
    labels = tuple(f"{s.edge}:{s.k}" for s in sg.symbols)
    return ExactMatrix.from_rows([list(r) for r in sg.adjacency], labels=labels)


def symbol_matrix(g: CircleGraph) -> ExactMatrix:
    """Symbol adjacency of a base graph; shorthand for mat_Lambda(g.symbol_graph())."""
    return mat_Lambda(g.symbol_graph())


# Compact matrix names, matching the report vocabulary of the other modules.
mat_P = covering_matrix
mat_Q = winding_matrix
mat_Q_abs = winding_matrix_abs


def count_source_paths(g: CircleGraph, k: int, vertex: str) -> int:
    """Lifts through the source covers of length-k paths out of a vertex.

    Equals the vertex row sum of the k-th power of the covering matrix.
    """
    if k < 0:
        raise ValueError("length must be nonnegative")
    m = covering_matrix(g).power(k)
    return m.row_sum(m.label_index(vertex))


def count_range_paths(g: CircleGraph, k: int, vertex: str) -> int:
    """Lifts through the range windings of length-k paths into a vertex.

    Equals the vertex column sum of the k-th power of the absolute
    winding matrix.
    """
    if k < 0:
        raise ValueError("length must be nonnegative")
    m = winding_matrix_abs(g).power(k)
    return m.col_sum(m.label_index(vertex))


def cyclic_exponent_matrix(g: CircleGraph, word: DiscreteWord) -> ExactMatrix:
    """Exponent system of a closed word's loop equations.

    Row i says: p(e_i) copies of angle i minus q(e_{i+1}) copies of angle
    i+1 (cyclically) must vanish.  For a length-1 word both terms land in
    the single cell, giving p - q.
    """
    word.check_valid(g)
    if not word.is_closed(g):
        raise ValueError("cyclic exponent matrix needs a closed word")
    k = len(word.edges)
    rows = [[0] * k for _ in range(k)]
    for i, name in enumerate(word.edges):
        e = g.edge_named(name)
        rows[i][i] += e.p
        rows[i][(i + 1) % k] -= g.edge_named(word.edges[(i + 1) % k]).q
    return ExactMatrix.from_rows(rows)


@dataclass(frozen=True)
class WordWeight:
    """Loop statistics of one closed word.

    loop_count is |prod p - prod q| with signed windings, or None when the
    products coincide (degenerate word: a continuum of loops).
    formula_count is the unsigned variant |prod p - prod |q||; the two
    agree unless some winding is negative.
    """

    word: tuple[str, ...]
    p_product: int
    q_product: int
    loop_count: int | None
    formula_count: int

    @property
    def degenerate(self) -> bool:
        return self.loop_count is None

    @property
    def discrepancy(self) -> bool:
        return self.loop_count is not None and self.loop_count != self.formula_count


def word_weight(g: CircleGraph, word: DiscreteWord) -> WordWeight:
    word.check_valid(g)
    if not word.is_closed(g):
        raise ValueError("loop weights are defined for closed words only")
    pp = 1
    qq = 1
    aq = 1
    for name in word.edges:
        e = g.edge_named(name)
        pp *= e.p
        qq *= e.q
        aq *= abs(e.q)
    det = pp - qq
    return WordWeight(
        word=word.edges,
        p_product=pp,
        q_product=qq,
        loop_count=abs(det) if det else None,
        formula_count=abs(pp - aq),
    )


def loop_weight(g: CircleGraph, word: DiscreteWord) -> int | None:
    """|prod p - prod q| for a closed word, None when degenerate."""
    return word_weight(g, word).loop_count


@dataclass(frozen=True)
class LoopCountEntry:
    """Loop totals for one word length."""

    k: int
    loop_count: int | None
    formula_count: int
    degenerate_words: tuple[tuple[str, ...], ...]
    trace_p: int
    trace_q_abs: int

    @property
    def sandwich_lower(self) -> int:
        return abs(self.trace_p - self.trace_q_abs)

    @property
    def sandwich_upper(self) -> int:
        return self.trace_p + self.trace_q_abs

    @property
    def sandwich_ok(self) -> bool | None:
        if self.loop_count is None:
            return None
        return self.sandwich_lower <= self.loop_count <= self.sandwich_upper


@dataclass(frozen=True)
class LoopCountTable:
    """Loop totals for k = 1 .. k_max.

    The per-length total is reported as loop_count; the identical number
    doubles as the periodic-point count of the induced circle dynamics, so
    serializations expose it under both names.
    """

    entries: tuple[LoopCountEntry, ...]
    has_negative_winding: bool

    def entry(self, k: int) -> LoopCountEntry:
        return self.entries[k - 1]

    def counts(self) -> list[int | None]:
        return [e.loop_count for e in self.entries]

    @property
    def any_degenerate(self) -> bool:
        return any(e.degenerate_words for e in self.entries)

    @property
    def any_discrepancy(self) -> bool:
        return any(
            e.loop_count is not None and e.loop_count != e.formula_count
            for e in self.entries
        )


def loop_count(g: CircleGraph, k: int, cap: int = DEFAULT_WORD_CAP) -> int:
    """Total loops over all closed words of length k.

    Raises DegenerateLoopError on the first word whose loop family is a
    continuum, naming the word: a finite count would be a lie.
    """
    if k < 1:
        raise ValueError("length must be positive")
    total = 0
    for word, pp, qq in iter_word_products(g, k, closed=True, cap=cap):
        if pp == qq:
            raise DegenerateLoopError(
                word,
                f"closed word {'.'.join(word)} has equal degree and winding "
                f"products ({pp}); its loops form a continuum",
            )
        total += abs(pp - qq)
    return total


# The loop total of length k is also the number of k-periodic points of the
# induced shift dynamics; report the one computed value under both names.
periodic_point_count = loop_count


def word_weights(g: CircleGraph, k: int, cap: int = DEFAULT_WORD_CAP) -> list[WordWeight]:
    """Per-word loop statistics for all closed words of length k."""
    out = []
    for word, pp, qq in iter_word_products(g, k, closed=True, cap=cap):
        det = pp - qq
        aq = 1
        for name in word:
            aq *= abs(g.edge_named(name).q)
        out.append(
            WordWeight(word, pp, qq, abs(det) if det else None, abs(pp - aq))
        )
    return out


def loop_table(g: CircleGraph, k_max: int, cap: int = DEFAULT_WORD_CAP) -> LoopCountTable:
    """Tabulate loop totals, degenerate words and trace bounds up to k_max.

    Degenerate words are recorded rather than raised so the table can
    still report the lengths that remain meaningful; the affected lengths
    carry loop_count None.
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    g.require_valid()
    p_mat = covering_matrix(g)
    qa_mat = winding_matrix_abs(g)
    p_pow = p_mat
    qa_pow = qa_mat
    entries = []
    for k in range(1, k_max + 1):
        total: int | None = 0
        formula = 0
        bad: list[tuple[str, ...]] = []
        for word, pp, qq in iter_word_products(g, k, closed=True, cap=cap):
            aq = 1
            for name in word:
                aq *= abs(g.edge_named(name).q)
            formula += abs(pp - aq)
            if pp == qq:
                bad.append(word)
                total = None
            elif total is not None:
                total += abs(pp - qq)
        entries.append(
            LoopCountEntry(
                k=k,
                loop_count=total,
                formula_count=formula,
                degenerate_words=tuple(bad),
                trace_p=p_pow.trace(),
                trace_q_abs=qa_pow.trace(),
            )
        )
        if k < k_max:
            p_pow = p_pow @ p_mat
            qa_pow = qa_pow @ qa_mat
    return LoopCountTable(
        entries=tuple(entries),
        has_negative_winding=any(e.q < 0 for e in g.edges),
    )


def torus_solutions_bruteforce(m: ExactMatrix, cap: int = 10**7) -> int:
    """Count solutions of M a = 0 over Z_N, N = |det M|, by exhaustion.

    Deliberately dumb: enumerates candidate tuples coordinate by
    coordinate and checks each congruence as soon as its last variable is
    set.  Exists as an independent check on determinant-based loop counts
    (the solution count of a nonsingular integer system over Z_N^n with
    N = |det| equals |det|).
    """
    n = m.n
    det = determinant(m)
    if det == 0:
        raise ValueError("singular system: solution set over the torus is infinite")
    big_n = abs(det)
    if big_n**n > cap:
        raise CapExceededError(
            f"{big_n}^{n} candidate tuples exceed the cap of {cap}"
        )
    rows = [[x % big_n for x in row] for row in m.entries]
    check_at: list[list[int]] = [[] for _ in range(n)]
    for i, row in enumerate(rows):
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            check_at[nz[-1]].append(i)
    partial = [0] * n
    count = 0

    def assign(j: int) -> None:
        nonlocal count
        for a in range(big_n):
            saved = []
            for i in range(n):
                if rows[i][j]:
                    saved.append((i, partial[i]))
                    partial[i] = (partial[i] + rows[i][j] * a) % big_n
            if all(partial[i] == 0 for i in check_at[j]):
                if j + 1 == n:
                    count += 1
                else:
                    assign(j + 1)
            for i, val in reversed(saved):
                partial[i] = val

    assign(0)
    return count
