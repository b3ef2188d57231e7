import numpy as np
import pytest

from floerkit.algebra import (
    BitMatrix,
    GradedHomology,
    brute_force_homology,
    chain_homology,
    f2_rank,
    graded_homology,
    homology_basis,
    kernel_basis,
    solve,
)
from floerkit.errors import CompositionNonzero


def test_identity_has_full_rank():
    assert f2_rank(BitMatrix.identity(70)) == 70


def test_zero_matrix_has_rank_zero():
    assert f2_rank(BitMatrix.zeros(4, 3)) == 0
    assert BitMatrix.zeros(4, 3).is_zero()


def test_dense_round_trip_across_word_boundary():
    rng = np.random.default_rng(7)
    dense = rng.integers(0, 2, size=(5, 130), dtype=np.uint8)
    assert np.array_equal(BitMatrix.from_dense(dense).to_dense(), dense)


def test_repeated_entries_cancel():
    m = BitMatrix.from_entries(2, 2, [(0, 1), (0, 1), (1, 0)])
    assert m.get(0, 1) == 0
    assert m.get(1, 0) == 1


def test_kernel_of_all_ones_row():
    basis = kernel_basis(BitMatrix.from_dense([[1, 1, 1]])).to_dense()
    assert basis.shape == (2, 3)
    assert not ((basis @ np.array([1, 1, 1])) % 2).any()


def test_solve_finds_solution_or_reports_none():
    a = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    x = solve(a, [1, 0])
    assert x is not None
    assert np.array_equal((a.to_dense() @ x) % 2, [1, 0])
    assert solve(BitMatrix.from_dense([[1, 1], [1, 1]]), [1, 0]) is None


def test_chain_homology_of_single_arrow():
    assert chain_homology(None, BitMatrix.from_dense([[1, 1]])) == 1


def test_chain_homology_rejects_nonzero_composite():
    d_out = BitMatrix.from_dense([[1, 1]])
    d_in = BitMatrix.from_dense([[1], [0]])
    with pytest.raises(CompositionNonzero):
        chain_homology(d_in, d_out)


def _random_pair(rng, n):
    """Composable (d_in, d_out) with d_out . d_in = 0 around a group of dimension n"""
    k = int(rng.integers(0, 5))
    d_in = rng.integers(0, 2, size=(n, k), dtype=np.uint8)
    left_kernel = kernel_basis(BitMatrix.from_dense(d_in.T)).to_dense() if k else np.eye(n, dtype=np.uint8)
    rows = int(rng.integers(0, 5))
    if left_kernel.shape[0]:
        mix = rng.integers(0, 2, size=(rows, left_kernel.shape[0]), dtype=np.int64)
        d_out = (mix @ left_kernel.astype(np.int64)) % 2
    else:
        d_out = np.zeros((rows, n), dtype=np.int64)
    return BitMatrix.from_dense(d_in), BitMatrix.from_dense(d_out.reshape(rows, n))


def test_chain_homology_matches_brute_force():
    rng = np.random.default_rng(20230517)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        d_in, d_out = _random_pair(rng, n)
        assert chain_homology(d_in, d_out) == brute_force_homology(d_in, d_out)


def test_homology_basis_coordinates():
    # 0 -> F^2 -> F, both generators mapping to the target
    basis = homology_basis(None, BitMatrix.from_dense([[1, 1]]))
    assert basis.rank == 1
    assert list(basis.coordinates([1, 1])) == [1]


def test_graded_homology_of_two_term_complex():
    # a (degree 1) -> b (degree 0), plus a lone c in degree 0
    differential = BitMatrix.from_entries(3, 3, [(1, 0)])
    assert graded_homology([1, 0, 0], differential) == GradedHomology({0: 1})


def test_graded_homology_formatting():
    h = GradedHomology({0: 1, -1: 2, 3: 0})
    assert str(h) == "F_0 + F_-1^2"
    assert h.total == 3
    assert h.shifted(2).ranks == {1: 2, 2: 1}
    assert GradedHomology.from_dict(h.to_dict()) == h
    assert str(GradedHomology()) == "0"



def test_rank_ignores_transpose():
    rng = np.random.default_rng(11)
    for _ in range(200):
        rows, cols = (int(v) for v in rng.integers(1, 90, size=2))
        m = BitMatrix.from_dense(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))
        assert f2_rank(m) == f2_rank(m.transpose())


def _random_invertible(rng, n):
    while True:
        m = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if f2_rank(BitMatrix.from_dense(m)) == n:
            return m.astype(np.int64)


def _inverse(m):
    n = m.shape[0]
    columns = [solve(BitMatrix.from_dense(m), [int(k == i) for k in range(n)]) for i in range(n)]
    return np.array(columns, dtype=np.int64).T.reshape(n, n)


def test_homology_survives_basis_changes():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        d_in, d_out = _random_pair(rng, n)
        a = _random_invertible(rng, d_in.cols)
        b = _random_invertible(rng, n)
        c = _random_invertible(rng, d_out.rows)
        new_in = (b @ d_in.to_dense().astype(np.int64) @ a) % 2
        new_out = (c @ d_out.to_dense().astype(np.int64) @ _inverse(b)) % 2
        expected = chain_homology(d_in, d_out)
        assert chain_homology(BitMatrix.from_dense(new_in), BitMatrix.from_dense(new_out)) == expected
