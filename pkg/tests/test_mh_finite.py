import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbchain.errors import BadScaleError, NonPositiveTargetError, RowSumExceedsOneError
from vbchain.kernel import build_example9, example9_weights, is_irreducible, lazy_mixture
from vbchain.mh_finite import ProposalTable, build_sub_mh, random_sub_mh_pair, scale_proposal
from vbchain.peskun import dominates_off_diagonal
from vbchain.spectral import eigendecompose


def test_uniform_target_takes_min():
    M = build_sub_mh([1.0, 1.0], [[0.0, 0.4], [0.2, 0.0]])
    assert M.P[0, 1] == pytest.approx(0.2) and M.P[1, 0] == pytest.approx(0.2)
    assert M.P[0, 0] == pytest.approx(0.8)


def test_symmetric_proposal_is_metropolis(rng):
    t = rng.random(5) + 0.1
    q = rng.random((5, 5))
    q = (q + q.T) / (q + q.T).sum(axis=1).max()
    np.fill_diagonal(q, 0.0)
    M = build_sub_mh(t, q)
    off = ~np.eye(5, dtype=bool)
    expected = q * np.minimum(1.0, t[None, :] / t[:, None])
    np.testing.assert_allclose(M.P[off], expected[off], rtol=1e-14)
    assert M.db_residual <= 1e-12


def test_rebuilds_example9_p2():
    N = 10
    P2 = build_example9(N)[1]
    n = 2 * N + 1
    q = np.zeros((n, n))
    idx = np.arange(n - 1)
    q[idx, idx + 1] = 0.5
    q[idx + 1, idx] = 0.5
    M = build_sub_mh(example9_weights(np.arange(-N, N + 1)), q)
    np.testing.assert_array_equal(M.P[1:-1], P2.P[1:-1])
    np.testing.assert_allclose(M.P, P2.P, atol=1e-15)


def test_validation():
    with pytest.raises(NonPositiveTargetError):
        build_sub_mh([1.0, 0.0], [[0.0, 0.5], [0.5, 0.0]])
    with pytest.raises(RowSumExceedsOneError):
        ProposalTable([[0.0, 0.8], [0.7, 0.5]])
    with pytest.raises(BadScaleError):
        scale_proposal([[0.0, 0.5], [0.5, 0.0]], 0.0)
    with pytest.raises(BadScaleError):
        scale_proposal([[0.0, 0.5], [0.5, 0.0]], 1.5)


def test_scale_identity():
    q = [[0.0, 0.4], [0.2, 0.0]]
    assert np.array_equal(scale_proposal(q, 1.0).q, np.asarray(q))
    M = build_sub_mh([1.0, 1.0], q)
    Mc = build_sub_mh([1.0, 1.0], scale_proposal(q, 0.3))
    np.testing.assert_allclose(Mc.P, lazy_mixture(M, 0.7).P, atol=1e-12)
    assert Mc.P[0, 1] == pytest.approx(0.06)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_proposition_10_and_scaling(n, seed, c):
    t, q1, q2 = random_sub_mh_pair(n, np.random.default_rng(seed))
    M1, M2 = build_sub_mh(t, q1), build_sub_mh(t, q2)
    assert M1.db_residual <= 1e-12 and M2.db_residual <= 1e-12
    assert is_irreducible(M2.P)
    assert dominates_off_diagonal(M1, M2).dominates
    Mc = build_sub_mh(t, scale_proposal(q2, c))
    np.testing.assert_allclose(Mc.P, c * M2.P + (1 - c) * np.eye(n), atol=1e-12)
    L2 = eigendecompose(M2).eigenvalues.max()
    Lc = eigendecompose(Mc).eigenvalues.max()
    assert Lc == pytest.approx(1 - c * (1 - L2), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_scaled_proposal_chain_bound(n, seed):
    g = np.random.default_rng(seed)
    t, q1, q2 = random_sub_mh_pair(n, g)
    c = 0.4
    # q1 >= q2 >= c q2, so M_q1 beats M_{c q2}
    L1 = eigendecompose(build_sub_mh(t, q1)).eigenvalues.max()
    L2 = eigendecompose(build_sub_mh(t, q2)).eigenvalues.max()
    assert L1 <= 1 - c * (1 - L2) + 1e-9
