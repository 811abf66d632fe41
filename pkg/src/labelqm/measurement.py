"""
Orthodox measurement statistics: direct vs. sequential distributions, Monte Carlo
protocols with projection between steps, and the order-of-measurement comparison.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch
from .hilbert import Observable, QuantumState, amplitudes, born_probabilities, overlaps


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Outcome counts of ``n_samples`` runs of a measurement protocol.

    ``outcomes`` holds the per-shot eigenvalue indices, one column per protocol step,
    when shots were kept; ``counts`` maps outcome tuples to their multiplicity.
    """

    protocol: tuple[str, ...]
    seed: int
    n_samples: int
    counts: dict[tuple[int, ...], int]
    outcomes: np.ndarray | None = field(default=None, repr=False)
    ranges: tuple[int, ...] = ()

    def __post_init__(self):
        if sum(self.counts.values()) != self.n_samples:
            raise ValueError("counts do not add up to n_samples")
        for key in self.counts:
            if self.ranges and any(not 0 <= k < r for k, r in zip(key, self.ranges)):
                raise ValueError(f"outcome {key} outside the observable ranges {self.ranges}")

    def frequencies(self, step: int | None = None) -> np.ndarray:
        """Empirical marginal of one step, or the full joint table when ``step`` is None."""
        table = np.zeros(self.ranges)
        for key, c in self.counts.items():
            table[key] += c
        table /= self.n_samples
        if step is None:
            return table
        axes = tuple(a for a in range(len(self.ranges)) if a != step)
        return table.sum(axis=axes)

    def same_counts(self, other: "MeasurementRecord") -> bool:
        return self.counts == other.counts


def _dims(state: QuantumState, *obs: Observable) -> None:
    for o in obs:
        if o.dim != state.dim:
            raise DimensionMismatch(f"state has dim {state.dim}, observable {o.name or '?'} has dim {o.dim}")


def direct_distribution(state: QuantumState, A: Observable, via: Observable | None = None) -> np.ndarray:
    """P(a_i) = |sum_j zB_j <a_i|b_j>|^2, the Born rule written through an intermediate basis.

    ``via`` defaults to A itself. Whatever the intermediate basis, the result equals
    the plain Born probabilities; that equality is checked to 1e-12.
    """
    _dims(state, A)
    B = A if via is None else via
    _dims(state, B)
    zB = amplitudes(state, B)
    P = np.abs(overlaps(A, B) @ zB) ** 2
    born = born_probabilities(state, A)
    if np.max(np.abs(P - born)) > 1e-12:
        raise ArithmeticError("basis-expanded Born rule disagrees with direct evaluation")
    return P


def sequential_distribution(state: QuantumState, B_first: Observable, A_second: Observable) -> np.ndarray:
    """P'(a_i) = sum_j |zB_j <a_i|b_j>|^2: measure B, project, then measure A."""
    _dims(state, B_first, A_second)
    zB = amplitudes(state, B_first)
    return np.abs(overlaps(A_second, B_first)) ** 2 @ (np.abs(zB) ** 2)


def transition_matrix(prev: Observable, nxt: Observable) -> np.ndarray:
    """T[k, i] = |<next_i|prev_k>|^2: outcome distribution after projecting onto prev_k."""
    return np.abs(overlaps(prev, nxt).T) ** 2


def chain_distribution(state: QuantumState, protocol) -> np.ndarray:
    """Joint probability of every outcome tuple of a projective protocol."""
    protocol = list(protocol)
    _dims(state, *protocol)
    joint = born_probabilities(state, protocol[0])
    for prev, nxt in zip(protocol, protocol[1:]):
        T = transition_matrix(prev, nxt)
        joint = joint[..., None] * T[(None,) * (joint.ndim - 1) + (slice(None), slice(None))]
    return joint


def _counts_from_shots(shots: np.ndarray) -> dict[tuple[int, ...], int]:
    c = Counter(map(tuple, shots.tolist()))
    return {k: c[k] for k in sorted(c)}


def sample_protocol(
    state: QuantumState,
    protocol,
    n_samples: int,
    seed: int,
    workers: int = 1,
    keep_shots: bool = True,
) -> MeasurementRecord:
    """Monte Carlo of a sequence of projective measurements.

    Each step draws from the Born distribution of the current state; the state is then
    replaced by the eigenvector of the outcome, so from step 2 on the draw depends only
    on the previous outcome.
    """
    protocol = list(protocol)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not protocol:
        raise ValueError("protocol needs at least one observable")
    _dims(state, *protocol)
    first = born_probabilities(state, protocol[0])
    transitions = [transition_matrix(p, q) for p, q in zip(protocol, protocol[1:])]

    def work(gen: np.random.Generator, _chunk: int, size: int) -> np.ndarray:
        out = np.empty((size, len(protocol)), dtype=np.int64)
        out[:, 0] = rngmod.categorical(gen, first, size)
        for s, T in enumerate(transitions, start=1):
            u = gen.random(size)
            cdf = np.cumsum(T, axis=1)
            rows = cdf[out[:, s - 1]]
            idx = np.sum(rows <= (u * rows[:, -1])[:, None], axis=1)
            out[:, s] = np.minimum(idx, T.shape[1] - 1)
        return out

    shots = np.concatenate(rngmod.run_chunks(n_samples, seed, rngmod.PROTOCOL, work, workers))
    names = tuple(o.name or f"obs{k}" for k, o in enumerate(protocol))
    return MeasurementRecord(names, seed, n_samples, _counts_from_shots(shots),
                             shots if keep_shots else None, tuple(o.dim for o in protocol))


@dataclass(frozen=True, eq=False)
class OrderReport:
    a_first: np.ndarray
    b_first: np.ndarray
    tv_distance: float
    order_sensitive: bool


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def order_comparison(state: QuantumState, A: Observable, B: Observable) -> OrderReport:
    """Joint outcome tables for the two measurement orders (rows a_i, columns b_j)."""
    _dims(state, A, B)
    O2 = np.abs(overlaps(A, B)) ** 2
    a_first = born_probabilities(state, A)[:, None] * O2
    b_first = O2 * born_probabilities(state, B)[None, :]
    tv = total_variation(a_first, b_first)
    return OrderReport(a_first, b_first, tv, tv > 1e-10)
