from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies

from ferchar.exactlin import (FieldMode, RankResult, SparseMatrix, int_rank,
                              random_prime_31, rank, reduce_rows, row_reduce)


def dense(reduced, ncols):
    out = []
    for _, row in reduced:
        out.append([row.get(c, 0) for c in range(ncols)])
    return out


def test_reduce_rows_canonical_rref():
    rows = [{0: 1, 1: 2, 2: 3}, {0: 2, 1: 4, 2: 7}, {1: 1, 2: 1}]
    reduced = reduce_rows(rows)
    assert [p for p, _ in reduced] == [0, 1, 2]
    assert dense(reduced, 3) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_reduce_rows_dependent_rows_drop_out():
    rows = [{0: 1, 1: 2}, {0: 2, 1: 4}, {0: 3, 1: 6}]
    reduced = reduce_rows(rows)
    assert len(reduced) == 1
    assert reduced[0] == (0, {0: Fraction(1), 1: Fraction(2)})


def test_reduce_rows_does_not_modify_input():
    rows = [{0: 2, 1: 4}, {0: 1}]
    snapshot = [dict(r) for r in rows]
    reduce_rows(rows)
    assert rows == snapshot


def test_reduce_rows_mod_p():
    # 5 vanishes mod 5, so the rank drops
    rows = [{0: 5, 1: 1}, {1: 5}]
    assert len(reduce_rows(rows, 5)) == 1
    assert len(reduce_rows(rows, 7)) == 2
    reduced = reduce_rows([{0: 3}], 7)
    assert reduced == [(0, {0: 1})]


def test_rank_and_row_reduce():
    m = SparseMatrix.from_rows([[1, 2, 0], [2, 4, 1], [0, 0, 3]])
    assert rank(m) == 2
    rref, pivots = row_reduce(m)
    assert pivots == (0, 2)
    assert rref.nrows == 2 and rref.ncols == 3
    again, pivots2 = row_reduce(rref)
    assert pivots2 == pivots
    assert again.entries == rref.entries


def test_sparse_matrix_rejects_out_of_range():
    with pytest.raises(ValueError):
        SparseMatrix.make(1, 1, {(0, 1): 1})


def test_random_prime_31_deterministic():
    import random
    p = random_prime_31(random.Random(7))
    q = random_prime_31(random.Random(7))
    assert p == q
    assert 2**30 < p < 2**31


def test_two_prime_mode_is_reproducible():
    a, b = FieldMode.two_prime(3), FieldMode.two_prime(3)
    assert a.primes == b.primes
    assert a.primes[0] != a.primes[1]
    assert FieldMode.two_prime(4).primes != a.primes


def test_int_rank_exact():
    rows = [{0: 1, 1: 1}, {0: 1, 1: -1}, {0: 2}]
    assert int_rank(rows, FieldMode.exact()) == RankResult(2)


def test_int_rank_two_prime_agreement():
    rows = [{0: 1, 1: 1}, {1: 3}]
    res = int_rank(rows, FieldMode.two_prime(0))
    assert res == RankResult(2)


def test_int_rank_escalates_on_prime_disagreement():
    # entry 5 vanishes mod the first forced prime only
    bad = FieldMode("two-prime", None, (5, 7))
    res = int_rank([{0: 5}], bad)
    assert res.rank == 1
    assert res.escalated
    assert res.dropped_primes == (5,)


def test_int_rank_rejects_bad_mode():
    with pytest.raises(ValueError):
        int_rank([{0: 1}], FieldMode("two-prime"))


small_matrices = strategies.lists(
    strategies.lists(strategies.integers(-50, 50), min_size=3, max_size=3),
    min_size=1, max_size=4)


@given(strategies.data())
def test_rank_invariant_under_row_permutation(data):
    rows = data.draw(small_matrices)
    shuffled = data.draw(strategies.permutations(rows))
    a = SparseMatrix.from_rows(rows)
    b = SparseMatrix.from_rows(shuffled)
    assert rank(a) == rank(b)


@given(small_matrices, strategies.integers(0, 2**16))
def test_two_prime_rank_matches_exact(rows, seed):
    dict_rows = [{c: v for c, v in enumerate(r) if v} for r in rows]
    exact = int_rank(dict_rows, FieldMode.exact()).rank
    assert int_rank(dict_rows, FieldMode.two_prime(seed)).rank == exact
