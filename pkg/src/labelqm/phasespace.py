"""
Discrete phase space: position/momentum grids, Wigner function, labelled state.

Grids are centered: x_k = (k - N/2) dx and p_m = (m - N/2) dp with dx dp = 2 pi hbar / N,
so p_m x_k / hbar = 2 pi (m - N/2)(k - N/2) / N and the momentum wavefunction is an
exactly unitary DFT of the position wavefunction.

The Wigner kernel needs psi at x +- s/2. With s on the dx grid that means half-grid
points, which are filled in by band-limited (trigonometric) interpolation from the
momentum coefficients. The shift sum runs over n = -N/2 .. N/2 with half weight at both
ends, which keeps the table exactly real and gives exact marginals in both directions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall, LabelQMError, ZeroReferenceAmplitude
from .hilbert import Observable, QuantumState
from .ztable import ZTable, gauge_phases

MIN_POINTS = 16


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    n_points: int
    dx: float
    hbar: float
    psi_x: np.ndarray
    xi_p: np.ndarray

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.hbar / (self.n_points * self.dx)

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dx

    @property
    def p(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dp

    def center_index(self) -> int:
        return self.n_points // 2


def make_grid(psi, dx: float | None = None, hbar: float = 1.0, normalize: bool = True) -> PhaseSpaceGrid:
    """Wrap position samples ``psi`` on a centered grid.

    ``dx`` defaults to sqrt(2 pi hbar / N), which gives x and p grids of the same extent.
    ``psi`` is rescaled so that sum |psi|^2 dx = 1 unless ``normalize`` is False.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = psi.size
    if n < MIN_POINTS:
        raise GridTooSmall(f"need at least {MIN_POINTS} grid points, got {n}")
    if n & (n - 1):
        raise GridTooSmall(f"number of grid points must be a power of two, got {n}")
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    dx = float(np.sqrt(2 * np.pi * hbar / n)) if dx is None else float(dx)
    if dx <= 0:
        raise ValueError("dx must be positive")
    norm = np.sqrt(np.sum(np.abs(psi) ** 2) * dx)
    if normalize:
        psi = psi / norm
    elif abs(norm - 1) > 1e-8:
        raise LabelQMError(f"psi is not normalized on the grid (norm {norm:.6g})")
    xi = momentum_wavefunction(psi, dx, hbar)
    return PhaseSpaceGrid(n, dx, hbar, psi, xi)


def momentum_wavefunction(psi: np.ndarray, dx: float, hbar: float) -> np.ndarray:
    """xi(p_m) = dx / sqrt(2 pi hbar) * sum_k psi(x_k) exp(-i p_m x_k / hbar)."""
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi))) * dx / np.sqrt(2 * np.pi * hbar)


def position_wavefunction(xi: np.ndarray, dx: float, hbar: float) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(xi))) * np.sqrt(2 * np.pi * hbar) / dx


def gaussian(n_points: int, center: float = 0.0, sigma: float | None = None, momentum: float = 0.0,
             dx: float | None = None, hbar: float = 1.0) -> PhaseSpaceGrid:
    """Gaussian packet; ``sigma`` is the position width of |psi| (ground state: sqrt(hbar))."""
    dx = float(np.sqrt(2 * np.pi * hbar / n_points)) if dx is None else dx
    sigma = np.sqrt(hbar) if sigma is None else sigma
    x = (np.arange(n_points) - n_points // 2) * dx
    psi = np.exp(-((x - center) ** 2) / (2 * sigma**2) + 1j * momentum * x / hbar)
    return make_grid(psi, dx, hbar)


def cat_state(n_points: int, separation: float, sigma: float | None = None, dx: float | None = None,
              hbar: float = 1.0, relative_phase: float = 0.0) -> PhaseSpaceGrid:
    """Superposition of two Gaussians at +-separation/2."""
    dx = float(np.sqrt(2 * np.pi * hbar / n_points)) if dx is None else dx
    sigma = np.sqrt(hbar) if sigma is None else sigma
    x = (np.arange(n_points) - n_points // 2) * dx
    g = lambda c: np.exp(-((x - c) ** 2) / (2 * sigma**2))
    psi = g(-separation / 2) + np.exp(1j * relative_phase) * g(separation / 2)
    return make_grid(psi, dx, hbar)


def plane_wave(n_points: int, momentum_index: int, dx: float | None = None, hbar: float = 1.0) -> PhaseSpaceGrid:
    dx = float(np.sqrt(2 * np.pi * hbar / n_points)) if dx is None else dx
    k = np.arange(n_points) - n_points // 2
    m = momentum_index - n_points // 2
    psi = np.exp(2j * np.pi * m * k / n_points)
    return make_grid(psi, dx, hbar)


def _half_grid(grid: PhaseSpaceGrid) -> np.ndarray:
    """psi at x_0 + h dx/2, h = 0 .. 2N-1 (periodic), from the momentum expansion."""
    n = grid.n_points
    h = np.arange(2 * n)
    xh = (h / 2 - n // 2) * grid.dx
    E = np.exp(1j * np.outer(xh, grid.p) / grid.hbar)
    psi_h = E @ grid.xi_p * grid.dp / np.sqrt(2 * np.pi * grid.hbar)
    return psi_h


IMAG_TOL = 1e-9


def discrete_wigner(grid: PhaseSpaceGrid) -> np.ndarray:
    """W[k, m] ~ W(x_k, p_m), normalized so that sum_m W dp = |psi(x_k)|^2.

    Includes the 1/(2 pi hbar) factor, so sum W dx dp = 1.
    """
    n = grid.n_points
    if n < MIN_POINTS:
        raise GridTooSmall(f"need at least {MIN_POINTS} grid points, got {n}")
    psi_h = _half_grid(grid)
    shifts = np.arange(-(n // 2), n // 2 + 1)
    weights = np.ones(shifts.size)
    weights[0] = weights[-1] = 0.5
    k = np.arange(n)
    # half-grid index of x_k is 2k; x_k +- n dx / 2 is 2k +- n
    plus = psi_h[(2 * k[:, None] + shifts[None, :]) % (2 * n)]
    minus = psi_h[(2 * k[:, None] - shifts[None, :]) % (2 * n)]
    A = np.conj(plus) * minus * weights[None, :]
    phase = np.exp(1j * np.outer(shifts, grid.p) * grid.dx / grid.hbar)
    W = (A @ phase) * grid.dx / (2 * np.pi * grid.hbar)
    imag = float(np.max(np.abs(W.imag)))
    if imag > IMAG_TOL:
        raise LabelQMError(f"Wigner table has imaginary residue {imag:.3e}")
    return W.real


def phase_space_label_state(grid: PhaseSpaceGrid, x0_index: int, p0_index: int) -> ZTable:
    """Explicit joint amplitude table Z(x, p) = psi(x) xi(p) exp(i (p x0 - x p0) / hbar).

    Entries are expressed as unit-vector amplitudes (psi sqrt(dx), xi sqrt(dp)), so the
    squared moduli sum to 1. The phase factor is the re-phasing of the two bases around
    the reference point (x0, p0). Summing over momentum and undoing the position
    re-phasing returns a vector proportional to psi; ``residual`` is the worse of the
    two proportionality residuals (position trace vs psi, momentum trace vs xi).
    """
    n = grid.n_points
    if not (0 <= x0_index < n and 0 <= p0_index < n):
        raise IndexError("reference indices outside the grid")
    a = grid.psi_x * np.sqrt(grid.dx)
    b = grid.xi_p * np.sqrt(grid.dp)
    if abs(a[x0_index]) <= 1e-10 or abs(b[p0_index]) <= 1e-10:
        raise ZeroReferenceAmplitude(
            f"reference amplitudes |psi(x0)|={abs(a[x0_index]):.3e}, |xi(p0)|={abs(b[p0_index]):.3e} must exceed 1e-10")
    x0, p0 = grid.x[x0_index], grid.p[p0_index]
    gx = -grid.x * p0 / grid.hbar          # phase of |x>' relative to |x>, with sign as used in Z
    gp = grid.p * x0 / grid.hbar
    Z = a[:, None] * b[None, :] * np.exp(1j * (gp[None, :] + gx[:, None]))

    res_x = ray_residual(trace_momentum(Z, grid, x0_index, p0_index), a)
    res_p = ray_residual(trace_position(Z, grid, x0_index, p0_index), b)
    residual = max(res_x, res_p)
    if residual > 1e-8:
        raise LabelQMError(f"labelled state does not reproduce the state ray (residual {residual:.3e})")
    gA, gB = gauge_phases(Z, a, b)
    moduli = np.abs(Z)
    phases = np.where(moduli > 0, np.angle(Z), 0.0)
    return ZTable(moduli, phases, gA, gB, residual, a, b, converged=True, kind="explicit")


def trace_momentum(Z: np.ndarray, grid: PhaseSpaceGrid, x0_index: int, p0_index: int) -> np.ndarray:
    """Sum over the momentum label, back in the plain position basis."""
    p0 = grid.p[p0_index]
    return Z.sum(axis=1) * np.exp(1j * grid.x * p0 / grid.hbar)


def trace_position(Z: np.ndarray, grid: PhaseSpaceGrid, x0_index: int, p0_index: int) -> np.ndarray:
    x0 = grid.x[x0_index]
    return Z.sum(axis=0) * np.exp(-1j * grid.p * x0 / grid.hbar)


def ray_residual(v: np.ndarray, ref: np.ndarray) -> float:
    """Relative distance of ``v`` from the complex line through ``ref``."""
    c = np.vdot(ref, v) / np.vdot(ref, ref)
    nv = np.linalg.norm(v)
    if nv == 0:
        return float("inf")
    return float(np.linalg.norm(v - c * ref) / nv)


def proportionality_factor(v: np.ndarray, ref: np.ndarray) -> complex:
    return complex(np.vdot(ref, v) / np.vdot(ref, ref))


def grid_state(grid: PhaseSpaceGrid) -> QuantumState:
    """psi as a unit vector in the position basis (amplitudes psi(x_k) sqrt(dx))."""
    return QuantumState(grid.psi_x * np.sqrt(grid.dx), normalize=True)


def position_basis(grid: PhaseSpaceGrid) -> Observable:
    return Observable.from_basis(np.eye(grid.n_points), grid.x, name="position")


def momentum_basis(grid: PhaseSpaceGrid) -> Observable:
    """Columns <x_k|p_m> = exp(i p_m x_k / hbar) / sqrt(N); eigenvalues p_m."""
    F = np.exp(1j * np.outer(grid.x, grid.p) / grid.hbar) / np.sqrt(grid.n_points)
    return Observable.from_basis(F, grid.p, name="momentum")
