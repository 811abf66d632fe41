"""
Joint amplitude table Z_ij over (a_i, b_j) labels.

Moduli are fixed by the conditional-distribution rule: |Z_ij| = |<a_i|b_j>| / sqrt(N),
which makes every row and column carry squared weight 1/N and makes the conditional
|Z_ij|^2 / sum_j' |Z_ij'|^2 equal |<b_j|a_i>|^2 identically. Only the phases are free.
They are fitted so that the row and column sums reproduce the moduli of the state's
amplitudes in each basis; the leftover phase of each marginal is a gauge phase and is
recorded, not penalized.

The fit is a damped Gauss-Newton (Levenberg-Marquardt) iteration on the N^2 phases.
The residual vector has only 4N real entries, so each step solves the small system
(J J^T + mu I) y = r and moves the phases by -J^T y. J J^T has a closed block form
(same-row blocks, same-column blocks, a row/column coupling block), so J itself is
never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .errors import SolverDidNotConverge
from .hilbert import Observable, QuantumState, amplitudes, overlaps
from .labels import ZERO_OVERLAP

_TINY = 1e-300


@dataclass(frozen=True)
class SolverParams:
    max_iterations: int = 5000
    tolerance: float = 1e-8
    restarts: int = 8
    seed: int = 0
    initial_phases: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        rngmod.check_seed(self.seed)


@dataclass(frozen=True, eq=False)
class ZTable:
    moduli: np.ndarray
    phases: np.ndarray
    gaugeA: np.ndarray
    gaugeB: np.ndarray
    residual: float
    zA: np.ndarray
    zB: np.ndarray
    converged: bool = True
    kind: str = "solved"
    restart: int = -1
    iterations: int = 0

    @property
    def values(self) -> np.ndarray:
        return self.moduli * np.exp(1j * self.phases)

    @property
    def dim(self) -> int:
        return self.moduli.shape[0]

    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def conditional_given_a(self) -> np.ndarray:
        """P(b_j | a_i) = |Z_ij|^2 / sum_j' |Z_ij'|^2; rows with zero weight give 0."""
        sq = self.moduli ** 2
        tot = sq.sum(axis=1, keepdims=True)
        return np.divide(sq, tot, out=np.zeros_like(sq), where=tot > 0)


def postulate_moduli(basisA: Observable, basisB: Observable, threshold: float = ZERO_OVERLAP) -> np.ndarray:
    O = np.abs(overlaps(basisA, basisB))
    O[O < threshold] = 0.0
    return O / np.sqrt(basisA.dim)


def marginal_residual(Z: np.ndarray, zA: np.ndarray, zB: np.ndarray) -> float:
    r = np.concatenate([np.abs(Z.sum(axis=1)) - np.abs(zA), np.abs(Z.sum(axis=0)) - np.abs(zB)])
    return float(np.sqrt(np.sum(r * r)))


def gauge_phases(Z: np.ndarray, zA: np.ndarray, zB: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """arg(row sum) - arg(zA_i) and the column analogue, wrapped to (-pi, pi].

    Entries where either side vanishes have no defined phase and are reported as 0.
    """
    def rel(s, z):
        g = np.angle(s) - np.angle(z)
        g = np.angle(np.exp(1j * g))
        g[(np.abs(s) < 1e-12) | (np.abs(z) < 1e-12)] = 0.0
        return g
    return rel(Z.sum(axis=1), zA), rel(Z.sum(axis=0), zB)


def _wrap(phi: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * phi))


def _residuals(Z, tA, tB):
    """Marginal residuals r_i = R_i - t_i R_i/|R_i| in the local (radial, tangential) frame.

    The radial component is |R_i| - t_i and the tangential one is identically zero, so
    the squared norm is the reported residual squared. Keeping the tangential row (with
    its exact derivative, weighted by 1 - t_i/|R_i|) makes the Jacobian smooth where
    R_i passes near zero; at a solution the weight vanishes and the step reduces to
    plain Gauss-Newton on the moduli.
    Returns (res, row_grad, col_grad): components of row i sit at 2i, 2i+1 and their
    gradients run along row i (over j); same layout for columns.
    """
    n = Z.shape[0]

    def side(S, t, Zs):
        aS = np.abs(S)
        u = np.where(aS > _TINY, S / np.maximum(aS, _TINY), 1.0)
        w = np.maximum(1.0 - t / np.maximum(aS, _TINY), -1.0)
        rot = np.conj(u)[:, None] * Zs          # d S / d phi = i Z, seen in the u frame
        grad = np.empty((2 * n, n))
        grad[0::2] = -rot.imag
        grad[1::2] = w[:, None] * rot.real
        res = np.zeros(2 * n)
        res[0::2] = aS - t
        return res, grad

    rres, row_grad = side(Z.sum(axis=1), tA, Z)
    cres, col_grad = side(Z.sum(axis=0), tB, Z.T)
    return np.concatenate([rres, cres]), row_grad, col_grad


def _lm_fit(M, phi, tA, tB, mask, tol, max_iter):
    """Levenberg-Marquardt on the phases; returns (phases, residual, iterations)."""
    n = M.shape[0]
    owner = np.repeat(np.arange(n), 2)
    same = owner[:, None] == owner[None, :]
    onehot = (owner[:, None] == np.arange(n)[None, :]).astype(float)

    def evaluate(phi):
        Z = M * np.exp(1j * phi)
        return Z, _residuals(Z, tA, tB)

    Z, (res, rg, cg) = evaluate(phi)
    cost = float(res @ res)
    mu = 1e-3
    it = 0
    eye = np.eye(4 * n)
    for it in range(1, max_iter + 1):
        if np.sqrt(cost) < tol:
            break
        # J J^T in closed form: same-row (same-column) blocks plus the row/column coupling
        JJt = np.empty((4 * n, 4 * n))
        JJt[:2 * n, :2 * n] = (rg @ rg.T) * same
        JJt[2 * n:, 2 * n:] = (cg @ cg.T) * same
        cross = rg[:, owner] * cg[:, owner].T
        JJt[:2 * n, 2 * n:] = cross
        JJt[2 * n:, :2 * n] = cross.T
        scale = max(float(np.max(np.diag(JJt))), 1e-12)

        improved = False
        while mu < 1e12:
            y = np.linalg.solve(JJt + mu * scale * eye, res)
            step = -(onehot.T @ (rg * y[:2 * n, None]) + (cg * y[2 * n:, None]).T @ onehot)
            trial = _wrap(phi + step)
            trial[mask] = 0.0
            tZ, tr = evaluate(trial)
            tcost = float(tr[0] @ tr[0])
            if tcost < cost:
                phi, Z, (res, rg, cg), cost = trial, tZ, tr, tcost
                mu = max(mu / 3.0, 1e-15)
                improved = True
                break
            mu *= 4.0
        if not improved:
            break
    return phi, marginal_residual(Z, tA, tB), it


def z_table(
    state: QuantumState,
    basisA: Observable,
    basisB: Observable,
    params: SolverParams | None = None,
    strict: bool = False,
) -> ZTable:
    """Fit the phases of the joint amplitude table.

    Restart 0 starts from the phases of zA_i zB_j <a_i|b_j> (or from
    ``params.initial_phases`` when given); the other restarts start from uniform
    random phases drawn from per-restart streams of ``params.seed``. Restarts run in
    order and stop at the first one that converges; otherwise the lowest residual
    wins, ties going to the lower restart index. A residual above
    ``params.tolerance`` is reported through ``converged=False``; with
    ``strict=True`` it raises :class:`SolverDidNotConverge` instead.
    """
    params = params or SolverParams()
    zA = amplitudes(state, basisA)
    zB = amplitudes(state, basisB)
    M = postulate_moduli(basisA, basisB)
    mask = M == 0.0
    n = M.shape[0]
    tA, tB = np.abs(zA), np.abs(zB)

    if params.initial_phases is not None:
        start = np.asarray(params.initial_phases, dtype=float).reshape(n, n)
    else:
        start = np.angle(zA[:, None] * zB[None, :] * overlaps(basisA, basisB))

    best = None
    for r in range(params.restarts):
        if r == 0:
            phi0 = start.copy()
        else:
            phi0 = rngmod.stream(params.seed, rngmod.RESTART, r).uniform(-np.pi, np.pi, size=(n, n))
        phi0 = _wrap(phi0)
        phi0[mask] = 0.0
        phi, res, its = _lm_fit(M, phi0, tA, tB, mask, params.tolerance, params.max_iterations)
        if best is None or res < best[1]:
            best = (phi, res, its, r)
        if res < params.tolerance:
            # later restarts cannot beat a converged one by more than noise; stop here
            break

    phi, res, its, r = best
    Z = M * np.exp(1j * phi)
    gA, gB = gauge_phases(Z, zA, zB)
    table = ZTable(M, phi, gA, gB, res, zA, zB, converged=res < params.tolerance,
                   kind="solved", restart=r, iterations=its)
    if strict and not table.converged:
        raise SolverDidNotConverge(res, table)
    return table
