"""
Two-slit experiment with an ancilla correlated to the slit variable.

Propagation is two point sources with spherical-wave phase and 1/d falloff onto a
one-dimensional screen at distance D. Two screen patterns are compared:

  label_theory            the ancilla reading is information only; the particle
                          keeps both wave components:  |Psi_L + Psi_R|^2
  orthodox_early_ancilla  early ancilla measurement projects the slit variable:
                          |Psi_L|^2 + |Psi_R|^2

``correlation_fidelity`` (default 1) is an extension, not part of the original
gedanken setup: with fidelity F < 1 the ancilla states for L and R overlap by 1 - F and
the orthodox pattern keeps that fraction of the interference term.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from . import rng as rngmod
from .errors import AllZeroAmplitudes, DegenerateGeometry

SEMANTICS = ("label_theory", "orthodox_early_ancilla")
UNDEFINED_BELOW = 1e-15


@dataclass(frozen=True)
class SlitGeometry:
    wavelength: float = 500e-9
    slit_separation: float = 50e-6
    screen_distance: float = 1.0
    screen_points: int = 201
    screen_halfwidth: float = 0.05
    amplitude_L: complex = 1 / np.sqrt(2)
    amplitude_R: complex = 1 / np.sqrt(2)
    correlation_fidelity: float = 1.0

    def __post_init__(self):
        for name in ("wavelength", "slit_separation", "screen_distance", "screen_halfwidth"):
            if not getattr(self, name) > 0:
                raise DegenerateGeometry(f"{name} must be positive")
        if self.screen_points < 3:
            raise DegenerateGeometry("screen_points must be >= 3")
        norm = abs(self.amplitude_L) ** 2 + abs(self.amplitude_R) ** 2
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"|amplitude_L|^2 + |amplitude_R|^2 = {norm:.17g}, expected 1")
        if not 0 <= self.correlation_fidelity <= 1:
            raise ValueError("correlation_fidelity must lie in [0, 1]")

    @property
    def positions(self) -> np.ndarray:
        return np.linspace(-self.screen_halfwidth, self.screen_halfwidth, self.screen_points)

    @property
    def fringe_spacing(self) -> float:
        return self.wavelength * self.screen_distance / self.slit_separation

    def path_lengths(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.positions
        h = self.slit_separation / 2
        dL = np.hypot(self.screen_distance, x + h)
        dR = np.hypot(self.screen_distance, x - h)
        return dL, dR

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("amplitude_L", "amplitude_R"):
            z = complex(d[k])
            d[k] = [z.real, z.imag]
        return d


def slit_amplitudes(geometry: SlitGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Psi_s(r) = a_s exp(2 pi i d_s / lambda) / d_s, jointly normalized on the screen."""
    dL, dR = geometry.path_lengths()
    if np.min(dL) <= 0 or np.min(dR) <= 0:
        raise DegenerateGeometry("zero distance between a slit and a screen point")
    k = 2 * np.pi / geometry.wavelength
    # phases relative to the on-axis distance keep the exponent small
    D = geometry.screen_distance
    L = geometry.amplitude_L * np.exp(1j * k * (dL - D)) / dL
    R = geometry.amplitude_R * np.exp(1j * k * (dR - D)) / dR
    total = np.sum(np.abs(L) ** 2 + np.abs(R) ** 2)
    if total == 0:
        return L, R
    s = np.sqrt(total)
    return L / s, R / s


@dataclass(frozen=True, eq=False)
class ScreenPattern:
    positions: np.ndarray
    intensity: np.ndarray
    semantics: str
    visibility: float
    pixel_visibility: float
    p_left: np.ndarray | None = None
    p_right: np.ndarray | None = None
    defined: np.ndarray | None = None


def _coherence(semantics: str, fidelity: float) -> float:
    if semantics == "label_theory":
        return 1.0
    if semantics == "orthodox_early_ancilla":
        return 1.0 - fidelity
    raise ValueError(f"unknown semantics {semantics!r}; choose from {SEMANTICS}")


def pattern(psi_L, psi_R, semantics: str, positions=None, fidelity: float = 1.0,
            central_fraction: float = 0.2) -> ScreenPattern:
    """Screen distribution for one semantics, normalized to sum 1.

    ``visibility`` uses the fringe extrema at the central pixel: with local moduli
    |L|, |R| and coherence c, I_max/min = |L|^2 + |R|^2 +- 2c|L||R|. ``pixel_visibility``
    is the raw (max - min)/(max + min) over the central ``central_fraction`` of the
    screen, which also picks up the 1/d envelope and pixel sampling.
    """
    L = np.asarray(psi_L, dtype=complex)
    R = np.asarray(psi_R, dtype=complex)
    if L.shape != R.shape:
        raise ValueError("amplitude vectors differ in length")
    c = _coherence(semantics, fidelity)
    raw = np.abs(L) ** 2 + np.abs(R) ** 2 + 2 * c * np.real(np.conj(L) * R)
    raw = np.maximum(raw, 0.0)
    tot = raw.sum()
    if tot <= 0:
        raise AllZeroAmplitudes("both slit amplitudes vanish on the whole screen")
    intensity = raw / tot

    n = L.size
    mid = n // 2
    aL, aR = abs(L[mid]), abs(R[mid])
    env = aL**2 + aR**2
    vis = 2 * c * aL * aR / env if env > 0 else 0.0
    half = max(1, int(round(central_fraction * n / 2)))
    win = intensity[max(0, mid - half): mid + half + 1]
    pix = float((win.max() - win.min()) / (win.max() + win.min())) if win.max() > 0 else 0.0

    pl, pr, ok = slit_conditionals(L, R)
    pos = np.arange(n, dtype=float) if positions is None else np.asarray(positions, dtype=float)
    return ScreenPattern(pos, intensity, semantics, float(vis), pix, pl, pr, ok)


def slit_conditionals(psi_L, psi_R) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P(L|r_i), P(R|r_i) and a mask of pixels where they are defined.

    Undefined pixels (|Psi_L|^2 + |Psi_R|^2 < 1e-15) hold NaN.
    """
    l2 = np.abs(np.asarray(psi_L)) ** 2
    r2 = np.abs(np.asarray(psi_R)) ** 2
    tot = l2 + r2
    ok = tot >= UNDEFINED_BELOW
    pl = np.full(tot.shape, np.nan)
    pr = np.full(tot.shape, np.nan)
    pl[ok] = l2[ok] / tot[ok]
    pr[ok] = r2[ok] / tot[ok]
    return pl, pr, ok


@dataclass(frozen=True, eq=False)
class TwoSlitSample:
    semantics: str
    seed: int
    n_samples: int
    pixel_counts: np.ndarray           # hits per pixel
    left_counts: np.ndarray | None     # hits per pixel tagged L (None when tags are not recorded)

    @property
    def tag_fraction_left(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.left_counts / self.pixel_counts


def sample_twoslit(geometry: SlitGeometry, semantics: str, n: int, seed: int,
                   record_tags: bool = True, workers: int = 1) -> TwoSlitSample:
    """Monte Carlo screen hits with ancilla slit tags.

    label_theory: the pixel is drawn from |Psi_L + Psi_R|^2, then the tag from
    P(L | pixel). orthodox_early_ancilla: the tag is drawn first, with the slit weights
    sum_r |Psi_s(r)|^2 captured by the screen (these equal |amplitude_s|^2 on a screen
    symmetric about the axis), then the pixel from that slit's own pattern.
    Pixel and tag draws use separate streams, so label-theory pixel counts do not
    depend on ``record_tags``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    L, R = slit_amplitudes(geometry)
    npx = L.size

    if semantics == "label_theory":
        I = pattern(L, R, semantics).intensity
        pl, _, ok = slit_conditionals(L, R)
        pl = np.where(ok, pl, 0.0)

        def pixels(gen, _c, size):
            return np.bincount(rngmod.categorical(gen, I, size), minlength=npx)

        counts = np.sum(rngmod.run_chunks(n, seed, rngmod.TWOSLIT_PIXEL, pixels, workers), axis=0)
        left = None
        if record_tags:
            # one binomial per pixel has the same law as one Bernoulli tag per hit
            gen = rngmod.stream(seed, rngmod.TWOSLIT_TAG)
            left = gen.binomial(counts, pl)
        return TwoSlitSample(semantics, seed, n, counts, left)

    if semantics == "orthodox_early_ancilla":
        if geometry.correlation_fidelity != 1.0:
            raise NotImplementedError("sampling with imperfect ancilla correlation is not modeled")
        wL, wR = np.sum(np.abs(L) ** 2), np.sum(np.abs(R) ** 2)
        IL = np.abs(L) ** 2 / wL if wL > 0 else np.zeros(npx)
        IR = np.abs(R) ** 2 / wR if wR > 0 else np.zeros(npx)

        def hits(gen, _c, size):
            tag_left = gen.random(size) < wL / (wL + wR)
            nl = int(np.sum(tag_left))
            cl = np.bincount(rngmod.categorical(gen, IL, nl), minlength=npx) if nl else np.zeros(npx, np.int64)
            cr = np.bincount(rngmod.categorical(gen, IR, size - nl), minlength=npx) if size - nl else np.zeros(npx, np.int64)
            return np.stack([cl, cr])

        parts = np.sum(rngmod.run_chunks(n, seed, rngmod.TWOSLIT_SLIT, hits, workers), axis=0)
        counts = parts[0] + parts[1]
        return TwoSlitSample(semantics, seed, n, counts, parts[0] if record_tags else None)

    raise ValueError(f"unknown semantics {semantics!r}; choose from {SEMANTICS}")
