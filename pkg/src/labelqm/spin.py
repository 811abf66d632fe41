"""
Spin labels on a finite set of sphere directions.

A label is a sign function f on the sphere with f(-n) = -f(n). Directions come in
antipodal pairs; only one representative per pair is stored, with f on the antipode
given by negation, so skewness cannot be violated by data. The amplitude of a label
is the pure quaternion Psi(f) = sum_k w_k f(n_k) N(n_k), N(n) = n_x I + n_y J + n_z K;
|Psi(f)|^2 weights the labels of a conditional ensemble.

Quadrature weights are uniform (1/K) and the label measure is plain enumeration over
{+1, -1}^K; this is a finite stand-in for the continuum construction, not a limit of it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch, TooManyDirections
from .quaternion import Quaternion

MAX_ENUM = 16
SCHEMES = ("fibonacci_hemisphere", "random_hemisphere")


@dataclass(frozen=True, eq=False)
class DirectionSet:
    directions: np.ndarray  # (K, 3) unit vectors, one per antipodal pair
    weights: np.ndarray     # (K,), sums to 1

    @property
    def K(self) -> int:
        return self.directions.shape[0]

    @classmethod
    def from_vectors(cls, vectors, weights=None) -> "DirectionSet":
        d = np.asarray(vectors, dtype=float).reshape(-1, 3)
        d = d / np.linalg.norm(d, axis=1, keepdims=True)
        w = np.full(d.shape[0], 1.0 / d.shape[0]) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (d.shape[0],) or np.any(w <= 0):
            raise ValueError("weights must be positive, one per direction")
        w = w / w.sum()
        G = np.abs(d @ d.T)
        np.fill_diagonal(G, 0.0)
        if d.shape[0] > 1 and np.max(G) > 1 - 1e-9:
            raise ValueError("two representatives are parallel or antiparallel")
        d.setflags(write=False)
        w.setflags(write=False)
        return cls(d, w)

    def angle_deg(self, i: int, j: int, antipode_j: bool = False) -> float:
        c = float(self.directions[i] @ self.directions[j]) * (-1 if antipode_j else 1)
        return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


@dataclass(frozen=True, eq=False)
class SpinLabel:
    signs: np.ndarray  # values of f on the representatives, each +1 or -1

    def value(self, k: int, antipode: bool = False) -> int:
        s = int(self.signs[k])
        return -s if antipode else s

    def __neg__(self) -> "SpinLabel":
        return SpinLabel(-self.signs)


def sphere_directions(K: int, scheme: str = "fibonacci_hemisphere", seed: int = 0,
                      enumerate_labels: bool = True) -> DirectionSet:
    if K < 1:
        raise ValueError("K must be >= 1")
    if enumerate_labels and K > MAX_ENUM:
        raise TooManyDirections(f"K = {K} would need 2^{K} labels; the limit is K <= {MAX_ENUM}")
    if scheme == "fibonacci_hemisphere":
        i = np.arange(K)
        z = 1.0 - (i + 0.5) / K          # upper hemisphere, pole side first
        r = np.sqrt(1.0 - z * z)
        phi = i * np.pi * (3.0 - np.sqrt(5.0))
        d = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    elif scheme == "random_hemisphere":
        g = rngmod.stream(seed, rngmod.DIRECTIONS).normal(size=(K, 3))
        g[:, 2] = np.abs(g[:, 2])
        d = g
    else:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    return DirectionSet.from_vectors(d)


def spin_amplitude(f: SpinLabel, dirs: DirectionSet) -> Quaternion:
    if f.signs.shape != (dirs.K,):
        raise DimensionMismatch(f"label has {f.signs.size} signs, direction set has {dirs.K}")
    v = _signed_sums(f.signs[None, :], dirs)[0]
    return Quaternion(0.0, float(v[0]), float(v[1]), float(v[2]))


def _signed_sums(signs: np.ndarray, dirs: DirectionSet) -> np.ndarray:
    """Vector parts sum_k w_k s_k n_k for a batch of sign rows.

    Sequential accumulation in a fixed order: negating every sign negates every
    partial sum exactly, so Psi(-f) = -Psi(f) holds bit for bit.
    """
    terms = signs[:, :, None] * (dirs.weights[:, None] * dirs.directions)[None, :, :]
    out = np.zeros((signs.shape[0], 3))
    for k in range(dirs.K):
        out = out + terms[:, k, :]
    return out


def _all_signs(K: int, fixed: int | None = None) -> np.ndarray:
    """Every sign vector of length K (with ``signs[fixed] = +1`` when given), in binary order."""
    free = K if fixed is None else K - 1
    bits = (np.arange(2**free)[:, None] >> np.arange(free)[None, :]) & 1
    s = 1 - 2 * bits
    if fixed is not None:
        s = np.insert(s, fixed, 1, axis=1)
    return s.astype(float)


def all_labels(dirs: DirectionSet) -> list[SpinLabel]:
    if dirs.K > MAX_ENUM:
        raise TooManyDirections(f"K = {dirs.K} exceeds the enumeration limit {MAX_ENUM}")
    return [SpinLabel(s) for s in _all_signs(dirs.K)]


def _ensemble(n0_index: int, dirs: DirectionSet) -> tuple[np.ndarray, np.ndarray]:
    """Sign rows with f(n0) = +1 and their unnormalized weights |Psi(f)|^2."""
    if dirs.K > MAX_ENUM:
        raise TooManyDirections(f"K = {dirs.K} exceeds the enumeration limit {MAX_ENUM}")
    if not 0 <= n0_index < dirs.K:
        raise IndexError("n0_index outside the direction set")
    signs = _all_signs(dirs.K, fixed=n0_index)
    return signs, np.sum(_signed_sums(signs, dirs) ** 2, axis=1)


def conditional_ensemble(n0_index: int, dirs: DirectionSet) -> list[tuple[SpinLabel, float]]:
    """Labels with f(n0) = +1 and their normalized weights |Psi(f)|^2."""
    signs, w = _ensemble(n0_index, dirs)
    w = w / w.sum()
    return [(SpinLabel(s), float(x)) for s, x in zip(signs, w)]


@dataclass(frozen=True)
class DirectionConditional:
    theta_deg: float
    label_conditional: float
    quantum_conditional: float

    @property
    def deviation(self) -> float:
        return self.label_conditional - self.quantum_conditional


def direction_conditional(n0_index: int, m_index: int, dirs: DirectionSet,
                          m_antipode: bool = False) -> DirectionConditional:
    """P(f(m) = +1 | f(n0) = +1) under |Psi|^2 weights, next to cos^2(theta/2).

    ``m_antipode`` selects -n_m instead of the stored representative.
    """
    signs, w = _ensemble(n0_index, dirs)
    sign = -1 if m_antipode else 1
    # ratio of raw sums, so m = n0 gives exactly 1 and its antipode exactly 0
    p = np.sum(w[sign * signs[:, m_index] > 0]) / np.sum(w)
    theta = dirs.angle_deg(n0_index, m_index, m_antipode)
    return DirectionConditional(theta, float(p), float(np.cos(np.radians(theta) / 2) ** 2))


def conditional_sweep(K: int, scheme: str = "fibonacci_hemisphere", seed: int = 0,
                      n0_index: int = 0) -> list[DirectionConditional]:
    """Label vs. quantum conditional for every direction (and antipode) relative to n0."""
    dirs = sphere_directions(K, scheme, seed)
    rows = []
    for m in range(dirs.K):
        for anti in (False, True):
            rows.append(direction_conditional(n0_index, m, dirs, anti))
    rows.sort(key=lambda r: r.theta_deg)
    return rows


@dataclass(frozen=True)
class SingletResult:
    theta_deg: float
    empirical_E: float
    analytic_E: float
    mean_a: float
    mean_b: float
    n_samples: int


def singlet_sample(n_direction, m_direction, n_samples: int, seed: int, workers: int = 1) -> SingletResult:
    """Sample anti-correlated spin outcomes along n (side a) and m (side b).

    s = +-1 with probability 1/2, then t = +-1 with P(t | s) = (1 - s t n.m) / 2. No
    state is projected; the b-side rule is the conditional distribution of the pair.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = np.asarray(n_direction, dtype=float)
    m = np.asarray(m_direction, dtype=float)
    for v in (n, m):
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-9:
            raise ValueError("directions must be unit 3-vectors")
    c = float(np.clip(n @ m, -1.0, 1.0))
    p_same = (1.0 - c) / 2.0

    def work(gen, _chunk, size):
        s = np.where(gen.random(size) < 0.5, 1, -1)
        t = np.where(gen.random(size) < p_same, s, -s)
        return np.array([np.sum(s * t), np.sum(s), np.sum(t)], dtype=np.int64)

    tot = np.sum(rngmod.run_chunks(n_samples, seed, rngmod.SINGLET, work, workers), axis=0)
    theta = float(np.degrees(np.arccos(c)))
    return SingletResult(theta, tot[0] / n_samples, -c, tot[1] / n_samples, tot[2] / n_samples, n_samples)


def direction_at(theta_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """(z axis, direction at angle theta in the x-z plane)."""
    t = np.radians(theta_deg)
    return np.array([0.0, 0.0, 1.0]), np.array([np.sin(t), 0.0, np.cos(t)])
