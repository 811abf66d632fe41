"""
Label-correlated pairs of systems (S_a, S_b) in place of an entangled state.

The pair shares coefficients zB_j on the bases |b^a_j> (system a) and |b^b_j> (system
b); the b-side eigenvalue paired with j is -b^a_j. System a alone is in the pure state
sum_j zB_j |b^a_j>.

Joint tables are indexed [i, j] with i the A-outcome on S_a (ascending eigenvalue)
and j the index of the shared coefficient, i.e. the B_a eigenvalue b^a_j ascending;
the S_b outcome that goes with column j is -b^a_j.

Three semantics for "B measured on S_b, A measured on S_a":
  orthodox_b_first  projection chain B then A:  |zB_j|^2 |<a_i|b_j>|^2
  orthodox_a_first  projection chain A then B:  P(a_i) |<b_j|a_i>|^2
  label_theory      no projection of S_a; the S_b result is only information about
                    the label of S_a:           P(a_i) |<b_j|a_i>|^2
The last two coincide formula for formula; both names are kept because they answer
different questions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch, NotNormalized
from .hilbert import NORM_TOL, Observable, QuantumState, overlaps
from .measurement import MeasurementRecord, _counts_from_shots, total_variation
from .ztable import postulate_moduli

SEMANTICS = ("orthodox_b_first", "orthodox_a_first", "label_theory")
CONDITIONALS = ("overlap", "ztable")


@dataclass(frozen=True, eq=False)
class CorrelatedPairEnsemble:
    zB: np.ndarray
    basis_a: Observable
    basis_b: Observable
    pairing: np.ndarray  # pairing[j] = index in basis_b of the partner of b^a_j

    @property
    def dim(self) -> int:
        return self.zB.size

    def state_a(self) -> QuantumState:
        """sum_j zB_j |b^a_j>, the individual state of S_a."""
        return QuantumState(self.basis_a.eigenbasis @ self.zB)

    def state_b(self) -> QuantumState:
        return QuantumState(self.basis_b.eigenbasis[:, self.pairing] @ self.zB)


def make_pair(zB, eigenvalues_a=None, basis_a_vectors=None, basis_b_vectors=None) -> CorrelatedPairEnsemble:
    """Build a pair whose B outcomes are perfectly anti-correlated.

    ``basis_a_vectors``/``basis_b_vectors`` are eigenvectors as columns, ordered like
    ``eigenvalues_a`` (default: computational basis, eigenvalues 0..N-1). Column j of
    the b basis gets eigenvalue -eigenvalues_a[j].
    """
    z = np.asarray(zB, dtype=complex).reshape(-1)
    n = z.size
    norm = float(np.sqrt(np.sum(np.abs(z) ** 2)))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(norm, "zB")
    ev = np.arange(n, dtype=float) if eigenvalues_a is None else np.asarray(eigenvalues_a, dtype=float)
    if ev.shape != (n,):
        raise DimensionMismatch(f"need {n} eigenvalues, got shape {ev.shape}")
    Va = np.eye(n) if basis_a_vectors is None else np.asarray(basis_a_vectors, dtype=complex)
    Vb = np.eye(n) if basis_b_vectors is None else np.asarray(basis_b_vectors, dtype=complex)
    if Va.shape != (n, n) or Vb.shape != (n, n):
        raise DimensionMismatch("basis vectors must be N x N")

    order = np.argsort(ev, kind="stable")
    ev, Va, Vb, z = ev[order], Va[:, order], Vb[:, order], z[order]
    basis_a = Observable.from_basis(Va, ev, name="B_a")       # raises DegenerateEigenvalues
    basis_b = Observable.from_basis(Vb[:, ::-1], -ev[::-1], name="B_b")
    pairing = np.arange(n)[::-1].copy()
    pair = CorrelatedPairEnsemble(z, basis_a, basis_b, pairing)
    if np.max(np.abs(basis_b.eigenvalues[pairing] + basis_a.eigenvalues)) > 1e-10:
        raise ArithmeticError("pairing does not anti-correlate the eigenvalues")
    return pair


def bb_joint(pair: CorrelatedPairEnsemble) -> np.ndarray:
    """Joint table of B on S_a (rows) and B on S_b (columns, ascending eigenvalue)."""
    n = pair.dim
    T = np.zeros((n, n))
    T[np.arange(n), pair.pairing] = np.abs(pair.zB) ** 2
    return T


def _check(pair: CorrelatedPairEnsemble, A: Observable) -> None:
    if A.dim != pair.dim:
        raise DimensionMismatch(f"observable has dim {A.dim}, pair has dim {pair.dim}")


def unmeasured_companion_distribution(pair: CorrelatedPairEnsemble, A_on_a: Observable) -> np.ndarray:
    """P(a_i) = |sum_j zB_j <a_i|b^a_j>|^2, the same in both theories."""
    _check(pair, A_on_a)
    return np.abs(overlaps(A_on_a, pair.basis_a) @ pair.zB) ** 2


@dataclass(frozen=True, eq=False)
class JointDistribution:
    semantics: str
    table: np.ndarray
    conditional: str = "overlap"

    def a_marginal(self) -> np.ndarray:
        return self.table.sum(axis=1)

    def b_marginal(self) -> np.ndarray:
        return self.table.sum(axis=0)


def _conditional_b_given_a(pair, A, conditional):
    O2 = np.abs(overlaps(A, pair.basis_a)) ** 2
    if conditional == "overlap":
        return O2
    if conditional == "ztable":
        M2 = postulate_moduli(A, pair.basis_a) ** 2
        tot = M2.sum(axis=1, keepdims=True)
        return np.divide(M2, tot, out=np.zeros_like(M2), where=tot > 0)
    raise ValueError(f"unknown conditional {conditional!r}; choose from {CONDITIONALS}")


def joint_distribution(pair: CorrelatedPairEnsemble, A_on_a: Observable, semantics: str,
                       conditional: str = "overlap") -> JointDistribution:
    _check(pair, A_on_a)
    if semantics == "orthodox_b_first":
        table = np.abs(pair.zB[None, :]) ** 2 * np.abs(overlaps(A_on_a, pair.basis_a)) ** 2
    elif semantics in ("orthodox_a_first", "label_theory"):
        P = unmeasured_companion_distribution(pair, A_on_a)
        cond = _conditional_b_given_a(pair, A_on_a, "overlap" if semantics == "orthodox_a_first" else conditional)
        table = P[:, None] * cond
    else:
        raise ValueError(f"unknown semantics {semantics!r}; choose from {SEMANTICS}")
    return JointDistribution(semantics, table, conditional)


@dataclass(frozen=True, eq=False)
class AmbiguityReport:
    tables: dict[str, np.ndarray]
    tv_distance: float                  # orthodox_b_first vs orthodox_a_first
    label_vs_b_first: float
    marginal_deviation: np.ndarray      # label-theory S_b frequencies minus |zB_j|^2
    a_marginal_deviation: np.ndarray    # P(a_i) minus P'(a_i)
    conditional_difference: float       # max |ztable - overlap| conditional
    ambiguous: bool
    divergent_from_orthodox: bool


def ambiguity_report(pair: CorrelatedPairEnsemble, A_on_a: Observable) -> AmbiguityReport:
    tables = {s: joint_distribution(pair, A_on_a, s).table for s in SEMANTICS}
    a_first, b_first, label = tables["orthodox_a_first"], tables["orthodox_b_first"], tables["label_theory"]
    if np.max(np.abs(a_first - label)) > 1e-12:
        raise ArithmeticError("label-theory table differs from the A-first projection chain")
    tv = total_variation(b_first, a_first)
    tv_label = total_variation(label, b_first)
    dev_b = label.sum(axis=0) - np.abs(pair.zB) ** 2
    dev_a = label.sum(axis=1) - b_first.sum(axis=1)
    zt = joint_distribution(pair, A_on_a, "label_theory", conditional="ztable").table
    cond_diff = float(np.max(np.abs(zt - label)))
    divergent = tv_label > 1e-10 or float(np.max(np.abs(dev_b))) > 1e-10
    return AmbiguityReport(tables, tv, tv_label, dev_b, dev_a, cond_diff, tv > 1e-10, divergent)


def sample_pair(pair: CorrelatedPairEnsemble, A_on_a: Observable, semantics: str, n: int, seed: int,
                workers: int = 1) -> MeasurementRecord:
    """Draw (a_i, j) outcome pairs from the chosen semantics' joint table."""
    if n < 1:
        raise ValueError("n must be >= 1")
    table = joint_distribution(pair, A_on_a, semantics).table
    flat = table.reshape(-1)
    cols = table.shape[1]

    def work(gen, _chunk, size):
        k = rngmod.categorical(gen, flat, size)
        return np.stack([k // cols, k % cols], axis=1)

    shots = np.concatenate(rngmod.run_chunks(n, seed, rngmod.PAIR, work, workers))
    return MeasurementRecord((A_on_a.name or "A", "B_b"), seed, n, _counts_from_shots(shots), shots, table.shape)
