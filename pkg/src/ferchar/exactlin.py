"""Exact sparse linear algebra over the rationals and over prime fields.

Scalars are `fractions.Fraction` when field is None and plain ints in
[0, p) when field is an odd prime p.  Everything here is deterministic:
Gauss-Jordan always produces the canonical reduced row echelon form, so
the pivot selection rule (sparsest row first) only affects fill-in, never
the result.

The two-prime protocol lives here as well: ranks of integer matrices are
computed modulo two independently chosen 31-bit primes and only reported
when they agree; on disagreement the computation is redone over the
rationals and the offending prime is recorded.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction

log = logging.getLogger("ferchar.exactlin")

# ---------------------------------------------------------------------------
# scalar helpers


def _coerce(value, field):
    if field is None:
        return value if isinstance(value, Fraction) else Fraction(value)
    return value % field


def _invert(value, field):
    if field is None:
        return Fraction(1) / value
    return pow(value, -1, field)


# ---------------------------------------------------------------------------
# row reduction

Row = dict


def reduce_rows(rows: list[dict], field: int | None = None) -> list[tuple[int, dict]]:
    """Full Gauss-Jordan on a list of sparse rows (col -> scalar).

    Returns the nonzero rows of the reduced row echelon form as
    (pivot column, row dict) pairs sorted by pivot column.  Input rows are
    not modified.  Pivot rule: sparsest pending row, ties broken by lowest
    leading column, then input order.
    """
    pending: list[dict] = []
    for row in rows:
        r = {}
        for c, v in row.items():
            v = _coerce(v, field)
            if v:
                r[c] = v
        if r:
            pending.append(r)

    done: list[tuple[int, dict]] = []
    while pending:
        idx = min(range(len(pending)), key=lambda t: (len(pending[t]), min(pending[t])))
        row = pending.pop(idx)
        piv = min(row)
        inv = _invert(row[piv], field)
        if field is None:
            row = {c: v * inv for c, v in row.items()}
        else:
            row = {c: v * inv % field for c, v in row.items()}
        survivors = []
        for other in pending:
            other = _eliminate(other, piv, row, field)
            if other:
                survivors.append(other)
        pending = survivors
        done = [(p, _eliminate(r, piv, row, field)) for p, r in done]
        done.append((piv, row))
    done.sort(key=lambda pr: pr[0])
    return done


def _eliminate(target: dict, piv: int, pivot_row: dict, field: int | None) -> dict:
    coef = target.get(piv)
    if not coef:
        return target
    out = dict(target)
    for c, v in pivot_row.items():
        w = out.get(c, 0) - coef * v
        if field is not None:
            w %= field
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return out


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable sparse matrix; entries maps (row, col) -> nonzero scalar."""

    nrows: int
    ncols: int
    entries: dict
    field: int | None = None

    @staticmethod
    def make(nrows, ncols, entries, field=None) -> SparseMatrix:
        clean = {}
        for (r, c), v in entries.items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ValueError(f"entry ({r},{c}) outside {nrows}x{ncols}")
            v = _coerce(v, field)
            if v:
                clean[(r, c)] = v
        return SparseMatrix(nrows, ncols, clean, field)

    @staticmethod
    def from_rows(rows, field=None) -> SparseMatrix:
        entries = {}
        ncols = 0
        for r, row in enumerate(rows):
            ncols = max(ncols, len(row))
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = v
        return SparseMatrix.make(len(rows), ncols, entries, field)

    def row_dicts(self) -> list[dict]:
        rows: list[dict] = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows


def rank(m: SparseMatrix) -> int:
    return len(reduce_rows(m.row_dicts(), m.field))


def row_reduce(m: SparseMatrix) -> tuple[SparseMatrix, tuple[int, ...]]:
    """Canonical RREF of m plus the tuple of pivot columns."""
    reduced = reduce_rows(m.row_dicts(), m.field)
    entries = {}
    for i, (_, row) in enumerate(reduced):
        for c, v in row.items():
            entries[(i, c)] = v
    rref = SparseMatrix(len(reduced), m.ncols, entries, m.field)
    return rref, tuple(p for p, _ in reduced)


# ---------------------------------------------------------------------------
# primes and field modes

_MR_BASES = (2, 3, 5, 7)  # deterministic Miller-Rabin below 3_215_031_751


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime_31(rng: random.Random) -> int:
    """A random prime strictly between 2^30 and 2^31."""
    while True:
        c = rng.randrange(2**30 + 1, 2**31) | 1
        if _is_prime(c):
            return c


@dataclass(frozen=True)
class FieldMode:
    """Where ranks are computed: exact rationals, or two random prime fields."""

    kind: str  # "exact" | "two-prime"
    seed: int | None = None
    primes: tuple[int, int] | None = None

    @staticmethod
    def exact() -> FieldMode:
        return FieldMode("exact")

    @staticmethod
    def two_prime(seed: int = 0) -> FieldMode:
        rng = random.Random(seed)
        p1 = random_prime_31(rng)
        p2 = random_prime_31(rng)
        while p2 == p1:
            p2 = random_prime_31(rng)
        return FieldMode("two-prime", seed, (p1, p2))


@dataclass(frozen=True)
class RankResult:
    rank: int
    escalated: bool = False
    dropped_primes: tuple[int, ...] = ()


def int_rank(rows: list[dict], mode: FieldMode) -> RankResult:
    """Rank of a matrix with integer entries, given as sparse rows.

    In two-prime mode the rank is accepted only if both primes agree;
    otherwise the exact rational rank is computed and any prime that
    reported a smaller rank is flagged.
    """
    if mode.kind == "exact":
        return RankResult(len(reduce_rows(rows, None)))
    if mode.kind != "two-prime" or not mode.primes:
        raise ValueError(f"bad field mode {mode!r}")
    by_prime = [len(reduce_rows(rows, p)) for p in mode.primes]
    if by_prime[0] == by_prime[1]:
        return RankResult(by_prime[0])
    exact = len(reduce_rows(rows, None))
    dropped = tuple(p for p, r in zip(mode.primes, by_prime) if r < exact)
    log.warning("prime rank disagreement %s; exact rank %d, dropped by %s",
                dict(zip(mode.primes, by_prime)), exact, dropped)
    return RankResult(exact, escalated=True, dropped_primes=dropped)
