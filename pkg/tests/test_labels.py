import itertools

import numpy as np
import pytest

from labelqm.errors import DimensionMismatch
from labelqm.hilbert import Observable, QuantumState, computational_basis, hadamard_basis, random_observable, random_state
from labelqm.labels import consistent_set, weight_table


def oracle_tuples(obs, thr=1e-12):
    n = obs[0].dim
    out = set()
    for t in itertools.product(range(n), repeat=len(obs)):
        ok = all(abs(np.vdot(obs[a].vector(t[a]), obs[b].vector(t[b]))) >= thr
                 for a, b in itertools.combinations(range(len(obs)), 2))
        if ok:
            out.add(t)
    return out


def test_same_observable_diagonal():
    A = computational_basis(3)
    s = QuantumState([1, 1, 1], normalize=True)
    assert set(consistent_set(s, [A, A]).tuples) == {(0, 0), (1, 1), (2, 2)}


def test_qubit_all_four():
    s = QuantumState.basis_state(2, 0)
    ls = consistent_set(s, [computational_basis(2), hadamard_basis(2)])
    assert len(ls) == 4
    # a=1 has zero amplitude in |0>: retained but flagged
    assert ls.zero_weight == {(1, 0), (1, 1)}
    assert ls.projection(0) == {0, 1}


def test_qutrit_shared_eigenvector():
    s = QuantumState([1, 1, 1], normalize=True)
    A = computational_basis(3)
    c = 1 / np.sqrt(2)
    B = Observable.from_basis(np.array([[1, 0, 0], [0, c, c], [0, c, -c]]))
    ls = consistent_set(s, [A, B])
    missing = {(0, 1), (0, 2), (1, 0), (2, 0)}
    assert set(ls.tuples) == set(itertools.product(range(3), repeat=2)) - missing
    assert set(ls.tuples) == oracle_tuples([A, B])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_oracle_equivalence(n, rng):
    for trial in range(10):
        obs = [random_observable(n, rng) for _ in range(2 + trial % 2)]
        s = random_state(n, rng)
        assert set(consistent_set(s, obs).tuples) == oracle_tuples(obs)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        consistent_set(QuantumState.basis_state(2, 0), [computational_basis(2), computational_basis(3)])


def test_weight_examples():
    s = QuantumState.basis_state(2, 0)
    W = weight_table(s, computational_basis(2), hadamard_basis(2))
    assert np.allclose(W.values, [[0.5, 0.5], [0, 0]], atol=1e-15)
    A = computational_basis(3)
    s3 = QuantumState([1, 2j, -1], normalize=True)
    assert np.allclose(weight_table(s3, A, A).values, np.diag(np.abs(s3.amplitudes) ** 2), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_weight_marginals_random(n, rng):
    neg = 0
    for _ in range(100):
        s, A, B = random_state(n, rng), random_observable(n, rng), random_observable(n, rng)
        W = weight_table(s, A, B)
        assert W.marginal_error() < 1e-10
        assert abs(W.values.sum() - 1) < 1e-10
        neg += W.values.min() < 0
    assert neg > 0   # quasi-probabilities do go negative
