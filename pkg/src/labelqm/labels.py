"""Consistent joint-value label space and the two-observable weight table."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyLabelSpace, LabelQMError
from .hilbert import Observable, QuantumState, amplitudes, overlaps

ZERO_OVERLAP = 1e-12
STATE_ZERO = 1e-12


@dataclass(frozen=True, eq=False)
class LabelSpace:
    """Index tuples (i, j, k, ...) whose eigenvectors overlap pairwise.

    ``zero_weight`` holds the subset of tuples where at least one index has zero
    amplitude in the state; those labels carry probability 0.
    """

    observables: tuple[Observable, ...]
    tuples: frozenset[tuple[int, ...]]
    zero_weight: frozenset[tuple[int, ...]]
    zero_overlap_threshold: float = ZERO_OVERLAP

    def projection(self, k: int) -> set[int]:
        """Indices of observable ``k`` that appear in some label."""
        return {t[k] for t in self.tuples}

    def weighted(self) -> frozenset[tuple[int, ...]]:
        return self.tuples - self.zero_weight

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)


def consistent_set(state: QuantumState, observables, zero_overlap_threshold: float = ZERO_OVERLAP) -> LabelSpace:
    obs = tuple(observables)
    if len(obs) < 2:
        raise ValueError("need at least two observables")
    for o in obs:
        if o.dim != state.dim:
            raise DimensionMismatch(f"observable {o.name or '?'} has dim {o.dim}, state has dim {state.dim}")

    n = state.dim
    allowed = {}
    for a, b in itertools.combinations(range(len(obs)), 2):
        allowed[a, b] = np.abs(overlaps(obs[a], obs[b])) >= zero_overlap_threshold
    amp_zero = [np.abs(amplitudes(state, o)) < STATE_ZERO for o in obs]

    # depth-first extension keeps the search linear in the number of survivors
    tuples = []
    def extend(prefix):
        k = len(prefix)
        if k == len(obs):
            tuples.append(tuple(prefix))
            return
        for idx in range(n):
            if all(allowed[m, k][prefix[m], idx] for m in range(k)):
                extend(prefix + [idx])
    extend([])

    if not tuples:
        raise EmptyLabelSpace("no consistent joint values: the observables are mutually exclusive on this space")
    zero = [t for t in tuples if any(amp_zero[k][t[k]] for k in range(len(obs)))]
    return LabelSpace(obs, frozenset(tuples), frozenset(zero), zero_overlap_threshold)


@dataclass(frozen=True, eq=False)
class WeightTable:
    values: np.ndarray
    basisA: Observable
    basisB: Observable
    zA: np.ndarray
    zB: np.ndarray

    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def marginal_error(self) -> float:
        """Largest deviation of row/column sums from the Born probabilities."""
        return float(max(
            np.max(np.abs(self.row_sums() - np.abs(self.zA) ** 2)),
            np.max(np.abs(self.col_sums() - np.abs(self.zB) ** 2)),
        ))


IMAG_TOL = 1e-12


def weight_table(state: QuantumState, basisA: Observable, basisB: Observable) -> WeightTable:
    """Real quasi-probability W(a_i, b_j) with the Born marginals on both axes.

    W_ij = (conj(zA_i) zB_j <a_i|b_j> + conj(zB_j) zA_i <b_j|a_i>) / 2. The two terms
    are complex conjugates of each other, so the imaginary part cancels; it is checked
    rather than assumed.
    """
    zA = amplitudes(state, basisA)
    zB = amplitudes(state, basisB)
    O = overlaps(basisA, basisB)
    first = np.conj(zA)[:, None] * zB[None, :] * O
    second = np.conj(zB)[None, :] * zA[:, None] * np.conj(O)
    W = 0.5 * (first + second)
    imag = float(np.max(np.abs(W.imag)))
    if imag > IMAG_TOL:
        raise LabelQMError(f"weight table has imaginary residue {imag:.3e}")
    vals = W.real.copy()
    vals.setflags(write=False)
    return WeightTable(vals, basisA, basisB, zA, zB)
