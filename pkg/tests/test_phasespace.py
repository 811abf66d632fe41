import numpy as np
import pytest

from labelqm import phasespace as ps
from labelqm.errors import GridTooSmall, ZeroReferenceAmplitude


def brute_wigner(grid):
    """Continuum Wigner integral of the band-limited interpolant, by plain quadrature.

    W(x, p) = 1/(2 pi hbar) * int ds psi*(x + s/2) psi(x - s/2) exp(i p s / hbar), with psi
    evaluated from its momentum expansion. The s range is |s| <= L/2 (L the box length),
    integrated with the trapezoid rule on a grid 8x finer than dx.
    """
    n, h = grid.n_points, grid.hbar
    L = n * grid.dx
    s = np.linspace(-L / 2, L / 2, 8 * n + 1)
    ds = s[1] - s[0]
    tw = np.full(s.size, ds)
    tw[[0, -1]] = ds / 2

    def psi(x):
        E = np.exp(1j * np.outer(x, grid.p) / h)
        return E @ grid.xi_p * grid.dp / np.sqrt(2 * np.pi * h)

    W = np.empty((n, n))
    for i, x in enumerate(grid.x):
        f = np.conj(psi(x + s / 2)) * psi(x - s / 2)
        W[i] = (np.exp(1j * np.outer(grid.p, s) / h) @ (f * tw)).real / (2 * np.pi * h)
    return W


def test_grid_invariants():
    g = ps.gaussian(64, center=1.0, momentum=0.5)
    assert abs(np.sum(np.abs(g.psi_x) ** 2) * g.dx - 1) < 1e-8
    assert abs(np.sum(np.abs(g.xi_p) ** 2) * g.dp - 1) < 1e-8
    assert abs(g.dx * g.dp - 2 * np.pi * g.hbar / g.n_points) < 1e-14
    back = ps.position_wavefunction(g.xi_p, g.dx, g.hbar)
    assert np.max(np.abs(back - g.psi_x)) < 1e-10


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        ps.make_grid(np.ones(8))
    with pytest.raises(GridTooSmall):
        ps.make_grid(np.ones(24))


@pytest.mark.parametrize("grid", [ps.gaussian(128), ps.gaussian(64, 0.7, 1.2, 0.4),
                                  ps.cat_state(128, 6.0), ps.cat_state(64, 4.0, relative_phase=1.0)])
def test_marginals_and_total(grid):
    W = ps.discrete_wigner(grid)
    assert np.max(np.abs(W.sum(axis=1) * grid.dp - np.abs(grid.psi_x) ** 2)) < 1e-6
    assert np.max(np.abs(W.sum(axis=0) * grid.dx - np.abs(grid.xi_p) ** 2)) < 1e-6
    assert abs(W.sum() * grid.dx * grid.dp - 1) < 1e-6


def test_gaussian_positive_and_brute_force_oracle():
    g = ps.gaussian(64)
    W = ps.discrete_wigner(g)
    assert W.min() > -1e-9
    assert np.max(np.abs(W - brute_wigner(g))) < 1e-6


def test_cat_negative_and_oracle():
    g = ps.cat_state(64, 4.0)
    W = ps.discrete_wigner(g)
    assert W.min() < -1e-3
    assert np.max(np.abs(W - brute_wigner(g))) < 1e-6


def test_continuum_gaussian():
    g = ps.gaussian(128)
    W = ps.discrete_wigner(g)
    X, P = np.meshgrid(g.x, g.p, indexing="ij")
    assert np.max(np.abs(W - np.exp(-X**2 - P**2) / np.pi)) < 1e-9


def test_label_state_gaussian_center():
    g = ps.gaussian(64)
    c = g.center_index()
    Z = ps.phase_space_label_state(g, c, c)
    assert Z.residual < 1e-8
    t = ps.trace_momentum(Z.values, g, c, c)
    assert ps.ray_residual(t, g.psi_x) < 1e-8


def test_label_state_shifted_reference():
    g = ps.gaussian(64, center=0.4, momentum=-0.3)
    Za = ps.phase_space_label_state(g, 32, 32)
    Zb = ps.phase_space_label_state(g, 30, 34)
    assert Zb.residual < 1e-8
    assert not np.allclose(Za.phases, Zb.phases)
    assert np.allclose(Za.moduli, Zb.moduli)


def test_plane_wave_single_column():
    g = ps.plane_wave(32, 20)
    nz = np.flatnonzero(np.abs(g.xi_p) > 1e-9)
    assert nz.tolist() == [20]
    Z = ps.phase_space_label_state(g, 16, 20)
    cols = np.flatnonzero(np.abs(Z.values).sum(axis=0) > 1e-9)
    assert cols.tolist() == [20]
    with pytest.raises(ZeroReferenceAmplitude):
        ps.phase_space_label_state(g, 16, 16)
