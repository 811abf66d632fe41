"""
Finite-dimensional Hilbert space: states, non-degenerate observables, Born rule.

Matrices are complex128 numpy arrays. An observable keeps its eigenvectors as the
columns of ``eigenbasis``; eigenvalues are strictly increasing, so outcome index k
always means "k-th smallest eigenvalue".

The eigensolver is a cyclic complex Jacobi iteration. It is slow compared to LAPACK
but exact enough (off-diagonal norm < 1e-12) and fully deterministic for the
dimensions this package cares about (<= 64).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    NonHermitian,
    NotNormalized,
    NotOrthonormal,
    ZeroProbabilityOutcome,
)

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
DEGENERACY_GAP = 1e-8
JACOBI_TOL = 1e-12
MAX_DIM = 64
_MAX_SWEEPS = 100
_PHASE_ZERO = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its first component with modulus > 1e-10 is real positive."""
    v = np.asarray(v, dtype=complex)
    nz = np.flatnonzero(np.abs(v) > _PHASE_ZERO)
    if nz.size == 0:
        return v.copy()
    lead = v[nz[0]]
    out = v * (abs(lead) / lead)
    out[nz[0]] = abs(lead)   # exactly real, no rounding residue in the imaginary part
    return out


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray
    dim: int = field(init=False)

    def __init__(self, amplitudes, normalize: bool = False):
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if a.size < 2:
            raise DimensionMismatch(f"state dimension must be >= 2, got {a.size}")
        norm = float(np.sqrt(np.sum(np.abs(a) ** 2)))
        if normalize:
            if norm == 0.0:
                raise NotNormalized(norm)
            a = a / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(norm)
        object.__setattr__(self, "amplitudes", _readonly(a))
        object.__setattr__(self, "dim", a.size)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "QuantumState":
        a = np.zeros(dim, dtype=complex)
        a[index] = 1.0
        return cls(a)

    def __len__(self):
        return self.dim


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator with a non-degenerate spectrum.

    Build it with :meth:`from_matrix` (runs the Jacobi solver) or :meth:`from_basis`
    (trusts the given orthonormal columns and attaches eigenvalues).
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    name: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def vector(self, k: int) -> np.ndarray:
        return self.eigenbasis[:, k]

    @classmethod
    def from_matrix(cls, matrix, name: str = "") -> "Observable":
        evals, evecs = eigendecompose(matrix)
        return cls(_readonly(matrix), _ro_real(evals), _readonly(evecs), name)

    @classmethod
    def from_basis(cls, vectors, eigenvalues=None, name: str = "") -> "Observable":
        """``vectors`` holds the eigenvectors as columns. Eigenvalues default to 0..N-1.

        Columns are reordered if needed so that eigenvalues increase; their phases
        are kept as given (phases carry meaning once amplitudes are expressed in
        this basis).
        """
        V = np.asarray(vectors, dtype=complex)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise DimensionMismatch(f"basis must be a square matrix of column vectors, got shape {V.shape}")
        n = V.shape[0]
        gram_err = np.max(np.abs(V.conj().T @ V - np.eye(n)))
        if gram_err > NORM_TOL:
            raise NotOrthonormal(f"basis vectors are not orthonormal (max Gram error {gram_err:.3e})")
        ev = np.arange(n, dtype=float) if eigenvalues is None else np.asarray(eigenvalues, dtype=float)
        if ev.shape != (n,):
            raise DimensionMismatch(f"need {n} eigenvalues, got {ev.shape}")
        order = np.argsort(ev, kind="stable")
        ev, V = ev[order], V[:, order]
        _check_gaps(ev)
        H = (V * ev) @ V.conj().T
        H = (H + H.conj().T) / 2
        return cls(_readonly(H), _ro_real(ev), _readonly(V), name)


def _ro_real(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_gaps(ev: np.ndarray) -> None:
    gaps = np.diff(ev)
    if gaps.size and np.min(gaps) < DEGENERACY_GAP:
        k = int(np.argmin(gaps))
        raise DegenerateSpectrum(float(gaps[k]), k)


def check_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    asym = float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0
    if asym > tol:
        raise NonHermitian(asym)


def eigendecompose(H) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues ascending and eigenvectors as the
    columns of ``V``; each column is phase-fixed so its first nonzero component is
    real positive.
    """
    A = np.array(H, dtype=complex, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > MAX_DIM:
        raise DimensionMismatch(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    check_hermitian(A)
    A = (A + A.conj().T) / 2
    V = np.eye(n, dtype=complex)
    # threshold scales with the matrix so large-norm inputs still converge
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(A)))

    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(A[offdiag]) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                e = apq / r
                tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                U = np.array([[c, s], [-s * e.conjugate(), c * e.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ U

    evals = np.diag(A).real.copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    V = V[:, order]
    _check_gaps(evals)
    for k in range(n):
        V[:, k] = fix_phase(V[:, k])
    return evals, V


# --- named bases -------------------------------------------------------------

def computational_basis(dim: int) -> Observable:
    return Observable.from_basis(np.eye(dim), name="computational")


def hadamard_basis(dim: int = 2) -> Observable:
    """Sylvester-Hadamard basis; ``dim`` must be a power of two.

    Column 0 is the uniform vector (1, 1, ...)/sqrt(dim).
    """
    if dim < 2 or dim & (dim - 1):
        raise DimensionMismatch(f"hadamard basis needs a power-of-two dimension, got {dim}")
    H = np.array([[1.0]])
    while H.shape[0] < dim:
        H = np.block([[H, H], [H, -H]])
    return Observable.from_basis(H / np.sqrt(dim), name="hadamard")


def fourier_basis(dim: int) -> Observable:
    j = np.arange(dim)
    F = np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)
    return Observable.from_basis(F, name="fourier")


def y_basis() -> Observable:
    """Qubit sigma_y eigenbasis, (1, i)/sqrt2 then (1, -i)/sqrt2."""
    V = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
    return Observable.from_basis(V, name="y")


NAMED_BASES = {
    "computational": computational_basis,
    "hadamard": hadamard_basis,
    "fourier": fourier_basis,
}


def named_basis(name: str, dim: int) -> Observable:
    if name == "y":
        if dim != 2:
            raise DimensionMismatch("the y basis is defined for dim 2 only")
        return y_basis()
    try:
        return NAMED_BASES[name](dim)
    except KeyError:
        raise KeyError(f"unknown basis {name!r}; choose from {sorted([*NAMED_BASES, 'y'])}") from None


# --- Born rule ---------------------------------------------------------------

def _check_dims(state: QuantumState, basis: Observable) -> None:
    if state.dim != basis.dim:
        raise DimensionMismatch(f"state has dim {state.dim}, observable has dim {basis.dim}")


def amplitudes(state: QuantumState, basis: Observable) -> np.ndarray:
    """Expansion coefficients <b_k|S> of ``state`` in ``basis``."""
    _check_dims(state, basis)
    return basis.eigenbasis.conj().T @ state.amplitudes


def born_probabilities(state: QuantumState, basis: Observable) -> np.ndarray:
    return np.abs(amplitudes(state, basis)) ** 2


def project(state: QuantumState, basis: Observable, outcome_index: int) -> QuantumState:
    p = born_probabilities(state, basis)[outcome_index]
    if p <= 1e-12:
        raise ZeroProbabilityOutcome(f"outcome {outcome_index} has probability {p:.3e}")
    return QuantumState(fix_phase(basis.vector(outcome_index)), normalize=True)


def overlaps(basis_a: Observable, basis_b: Observable) -> np.ndarray:
    """Matrix O[i, j] = <a_i|b_j>."""
    if basis_a.dim != basis_b.dim:
        raise DimensionMismatch(f"observables have dims {basis_a.dim} and {basis_b.dim}")
    return basis_a.eigenbasis.conj().T @ basis_b.eigenbasis


def random_state(dim: int, rng: np.random.Generator) -> QuantumState:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return QuantumState(v, normalize=True)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with the diagonal phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_observable(dim: int, rng: np.random.Generator, name: str = "") -> Observable:
    ev = np.sort(rng.normal(size=dim))
    while np.min(np.diff(ev)) < 1e-3:
        ev = np.sort(rng.normal(size=dim))
    return Observable.from_basis(random_unitary(dim, rng), ev, name=name)
