import itertools

import numpy as np
import pytest

from labelqm.errors import SolverDidNotConverge
from labelqm.hilbert import (
    QuantumState, amplitudes, computational_basis, hadamard_basis, overlaps, random_observable, random_state,
)
from labelqm.ztable import SolverParams, marginal_residual, postulate_moduli, z_table


def test_qubit_example():
    s = QuantumState.basis_state(2, 0)
    Z = z_table(s, computational_basis(2), hadamard_basis(2))
    assert Z.converged and Z.residual < 1e-8
    assert np.allclose(Z.moduli, 0.5)
    # row 1 must cancel: its two phases are pi apart
    d = np.angle(Z.values[1, 0] / Z.values[1, 1])
    assert abs(abs(d) - np.pi) < 1e-6


def test_hand_solution_is_feasible():
    s = QuantumState.basis_state(2, 0)
    A, B = computational_basis(2), hadamard_basis(2)
    Z = 0.5 * np.exp(1j * np.array([[0, 0], [np.pi / 2, -np.pi / 2]]))
    assert marginal_residual(Z, amplitudes(s, A), amplitudes(s, B)) < 1e-15


def test_same_observable():
    A = computational_basis(3)
    uniform = QuantumState([1, 1, 1], normalize=True)
    Z = z_table(uniform, A, A)
    assert Z.converged and np.allclose(np.abs(Z.values), np.eye(3) / np.sqrt(3))
    skewed = QuantumState([1, 0.5, 0.2], normalize=True)
    Z = z_table(skewed, A, A)
    assert not Z.converged and Z.residual > 0.1
    with pytest.raises(SolverDidNotConverge) as e:
        z_table(skewed, A, A, strict=True)
    assert e.value.residual == pytest.approx(Z.residual)


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_table_invariants(n, rng):
    for _ in range(5):
        s, A, B = random_state(n, rng), random_observable(n, rng), random_observable(n, rng)
        Z = z_table(s, A, B, SolverParams(restarts=2))
        V = Z.values
        assert np.allclose(np.sum(np.abs(V) ** 2, axis=1), 1 / n, atol=1e-10)
        assert np.allclose(np.sum(np.abs(V) ** 2, axis=0), 1 / n, atol=1e-10)
        cond = np.abs(V) ** 2 / np.sum(np.abs(V) ** 2, axis=1, keepdims=True)
        assert np.max(np.abs(cond - np.abs(overlaps(A, B)) ** 2)) < 1e-12
        assert Z.residual == pytest.approx(marginal_residual(V, Z.zA, Z.zB), abs=1e-14)


def test_zero_overlap_entries_stay_zero():
    c = 1 / np.sqrt(2)
    from labelqm.hilbert import Observable
    B = Observable.from_basis(np.array([[1, 0, 0], [0, c, c], [0, c, -c]]))
    s = QuantumState([1, 1, 1], normalize=True)
    Z = z_table(s, computational_basis(3), B)
    assert np.all(Z.values[postulate_moduli(computational_basis(3), B) == 0] == 0)


def test_determinism(rng):
    s, A, B = random_state(4, rng), random_observable(4, rng), random_observable(4, rng)
    p = SolverParams(seed=11, initial_phases=np.zeros((4, 4)))
    a, b = z_table(s, A, B, p), z_table(s, A, B, p)
    assert np.array_equal(a.phases, b.phases) and a.residual == b.residual


def qubit_feasible(M, tA, tB):
    """Exact feasibility of the 2x2 modulus problem.

    Relative phases a = phi01 - phi00, b = phi10 - phi00, c = phi11 - phi10,
    d = phi11 - phi01 are fixed up to sign by the four law-of-cosines constraints;
    the table closes iff s_b b + s_c c = s_a a + s_d d (mod 2 pi) for some signs.
    Returns (feasible, margin) where margin measures distance from the boundary.
    """
    def angle(p, q, t):
        return (t * t - p * p - q * q) / (2 * p * q)

    cs = [angle(M[0, 0], M[0, 1], tA[0]), angle(M[0, 0], M[1, 0], tB[0]),
          angle(M[1, 0], M[1, 1], tA[1]), angle(M[0, 1], M[1, 1], tB[1])]
    if any(abs(c) > 1 for c in cs):
        return False, min(abs(abs(c) - 1) for c in cs)
    a, b, c, d = np.arccos(cs)
    best = min(abs(np.angle(np.exp(1j * (sb * b + sc * c - sa * a - sd * d))))
               for sa, sb, sc, sd in itertools.product((1, -1), repeat=4))
    edge = min(abs(abs(x) - 1) for x in cs)
    if best < 1e-9:
        return True, edge
    return False, min(best, edge)


def test_qubit_feasibility_oracle():
    """Solver convergence agrees with the exact feasibility test on random qubits."""
    rng = np.random.default_rng(5)
    checked = infeasible = 0
    for _ in range(60):
        s, A, B = random_state(2, rng), random_observable(2, rng), random_observable(2, rng)
        M = postulate_moduli(A, B)
        feas, margin = qubit_feasible(M, np.abs(amplitudes(s, A)), np.abs(amplitudes(s, B)))
        if margin < 1e-3:
            continue
        Z = z_table(s, A, B)
        assert Z.converged == feas
        checked += 1
        infeasible += not feas
    assert checked > 40 and infeasible > 0


def test_phase_space_reinjection():
    from labelqm import phasespace as ps
    g = ps.gaussian(32, center=0.5, momentum=0.3)
    explicit = ps.phase_space_label_state(g, 16, 16)
    st, X, P = ps.grid_state(g), ps.position_basis(g), ps.momentum_basis(g)
    Z = z_table(st, X, P, SolverParams(initial_phases=explicit.phases))
    assert Z.residual < 1e-6
    Z0 = z_table(st, X, P)
    assert Z0.residual < 1e-6
