"""
Experiment configs: JSON text in, validated ``ExperimentConfig`` out.

Validation collects every problem with its field path instead of stopping at the
first one. Complex numbers are written either as a plain number or as ``[re, im]``;
the canonical form always uses the pair. Canonical text is sorted-key JSON with the
defaults filled in, so parse -> canonicalize -> parse is a fixed point.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigSyntaxError, ConfigValidationError
from .hilbert import MAX_DIM, NAMED_BASES, NORM_TOL

BASIS_NAMES = tuple(sorted([*NAMED_BASES, "y"]))

EXPERIMENTS = ("weights", "ztable", "wigner", "sequence", "order", "pair", "ambiguity",
               "spin", "singlet", "twoslit")
SAMPLING = ("sequence", "pair", "singlet", "twoslit")
FORMATS = ("csv", "json", "both")
MAX_SAMPLES = 10**9

DESCRIPTIONS = {
    "weights": "quasi-probability table W(a_i, b_j) with marginal checks",
    "ztable": "joint amplitude table Z fitted to the marginal amplitudes",
    "wigner": "discrete Wigner function and the explicit phase-space labelled state",
    "sequence": "direct vs. sequential distributions and a Monte Carlo protocol",
    "order": "joint tables for the two measurement orders and their distance",
    "pair": "correlated-pair joint tables per semantics with Monte Carlo samples",
    "ambiguity": "orthodox order ambiguity and label-theory divergence for a pair",
    "spin": "spin-label structure checks and conditional deviation sweep",
    "singlet": "anti-correlated spin sampling over a set of angles",
    "twoslit": "two-slit patterns with an ancilla slit tag",
}

_HILBERT = ("dim", "state", "normalize", "observables")
_PAIR = ("dim", "zB", "normalize", "observables")
ALLOWED = {
    "weights": _HILBERT,
    "ztable": _HILBERT + ("solver",),
    "wigner": ("grid",),
    "sequence": _HILBERT + ("protocol",),
    "order": _HILBERT,
    "pair": _PAIR + ("semantics",),
    "ambiguity": _PAIR,
    "spin": ("spin",),
    "singlet": ("singlet",),
    "twoslit": ("geometry",),
}
COMMON = ("experiment", "output", "sampling")

PAIR_SEMANTICS = ("orthodox_b_first", "orthodox_a_first", "label_theory")
GRID_STATES = ("gaussian", "cat", "plane_wave")
SPIN_SCHEMES = ("fibonacci_hemisphere", "random_hemisphere")
TWOSLIT_SEMANTICS = ("label_theory", "orthodox_early_ancilla")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """A validated config. ``data`` is the canonical dict (defaults filled in)."""

    data: dict

    @property
    def experiment(self) -> str:
        return self.data["experiment"]

    @property
    def seed(self) -> int | None:
        s = self.data.get("sampling")
        return None if s is None else s["seed"]

    def section(self, key: str):
        return self.data.get(key)

    def state_vector(self, key: str = "state") -> np.ndarray:
        v = np.array([complex(a, b) for a, b in self.data[key]])
        if self.data.get("normalize"):
            v = v / np.linalg.norm(v)
        return v

    def canonical_text(self) -> str:
        return canonical_text(self)

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentConfig) and self.canonical_text() == other.canonical_text()


def canonical_text(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSyntaxError(e.msg, e.lineno, e.colno) from None
    v = _Validator()
    data = v.top(raw)
    if v.problems:
        raise ConfigValidationError(v.problems)
    return ExperimentConfig(data)


# --- validation ---------------------------------------------------------------------


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


class _Validator:
    def __init__(self):
        self.problems: list[tuple[str, str]] = []

    def err(self, path: str, msg: str) -> None:
        self.problems.append((path, msg))

    # primitives

    def keys(self, obj: dict, path: str, allowed, required=()) -> None:
        for k in obj:
            if k not in allowed:
                self.err(f"{path}.{k}" if path else k, f"unknown key {k!r}")
        for k in required:
            if k not in obj:
                self.err(f"{path}.{k}" if path else k, "required key missing")

    def obj(self, x, path: str) -> dict | None:
        if not isinstance(x, dict):
            self.err(path, "expected an object")
            return None
        return x

    def int_(self, x, path, lo=None, hi=None, default=None):
        if x is None:
            return default
        if not _is_int(x):
            self.err(path, f"expected an integer, got {x!r}")
            return default
        if (lo is not None and x < lo) or (hi is not None and x > hi):
            self.err(path, f"{x} outside [{lo}, {hi}]")
        return x

    def num(self, x, path, lo=None, hi=None, default=None, open_lo=False):
        if x is None:
            return default
        if not _is_num(x):
            self.err(path, f"expected a finite number, got {x!r}")
            return default
        x = float(x)
        if lo is not None and (x < lo or (open_lo and x == lo)):
            self.err(path, f"{x!r} must be {'>' if open_lo else '>='} {lo}")
        if hi is not None and x > hi:
            self.err(path, f"{x!r} must be <= {hi}")
        return x

    def bool_(self, x, path, default=False):
        if x is None:
            return default
        if not isinstance(x, bool):
            self.err(path, f"expected true or false, got {x!r}")
            return default
        return x

    def choice(self, x, path, options, default=None):
        if x is None:
            return default
        if x not in options:
            self.err(path, f"{x!r} is not one of {list(options)}")
            return default
        return x

    def complex_(self, x, path):
        if _is_num(x):
            return [float(x), 0.0]
        if isinstance(x, list) and len(x) == 2 and all(_is_num(t) for t in x):
            return [float(x[0]), float(x[1])]
        self.err(path, f"expected a number or [re, im], got {x!r}")
        return None

    def cvector(self, x, path, dim, normalize):
        if not isinstance(x, list) or not x:
            self.err(path, "expected a non-empty list of complex numbers")
            return None
        out = [self.complex_(e, f"{path}[{k}]") for k, e in enumerate(x)]
        if any(e is None for e in out):
            return None
        if dim is not None and len(out) != dim:
            self.err(path, f"has {len(out)} entries, dim is {dim}")
        norm = float(np.sqrt(sum(a * a + b * b for a, b in out)))
        if norm == 0:
            self.err(path, "all amplitudes are zero")
        elif not normalize and abs(norm - 1) > NORM_TOL:
            self.err(path, f"norm is {norm:.17g}, not 1 (set \"normalize\": true to rescale)")
        return out

    def seed(self, x, path):
        if x is None:
            self.err(path, "required key missing (seeds are mandatory for sampling)")
            return None
        return self.int_(x, path, 0, 2**64 - 1)

    # sections

    def top(self, raw) -> dict:
        if not isinstance(raw, dict):
            self.err("", "top level must be an object")
            return {}
        exp = raw.get("experiment")
        if exp is None:
            self.err("experiment", "required key missing")
        elif exp not in EXPERIMENTS:
            self.err("experiment", f"{exp!r} is not one of {list(EXPERIMENTS)}")
            exp = None
        allowed = COMMON + (ALLOWED[exp] if exp else tuple(k for ks in ALLOWED.values() for k in ks))
        self.keys(raw, "", allowed)
        out: dict = {"experiment": exp}
        out["output"] = self.output(raw.get("output"))
        samp = raw.get("sampling")
        if exp in SAMPLING or samp is not None:
            out["sampling"] = self.sampling(samp, required=exp in SAMPLING)
        if exp is None:
            return out

        if exp in ("weights", "ztable", "sequence", "order", "pair", "ambiguity"):
            self.hilbert(raw, out, "zB" if exp in ("pair", "ambiguity") else "state")
        if exp == "ztable":
            out["solver"] = self.solver(raw.get("solver"))
        elif exp == "sequence":
            out["protocol"] = self.protocol(raw.get("protocol"), out.get("observables") or {})
        elif exp == "pair":
            out["semantics"] = self.semantics(raw.get("semantics"))
        elif exp == "wigner":
            out["grid"] = self.grid(raw.get("grid"))
        elif exp == "spin":
            out["spin"] = self.spin(raw.get("spin"))
        elif exp == "singlet":
            out["singlet"] = self.singlet(raw.get("singlet"))
        elif exp == "twoslit":
            out["geometry"] = self.geometry(raw.get("geometry"))
        return out

    def output(self, x) -> dict:
        d = {} if x is None else self.obj(x, "output") or {}
        self.keys(d, "output", ("directory", "formats"))
        directory = d.get("directory", "out")
        if not isinstance(directory, str) or not directory:
            self.err("output.directory", "expected a non-empty string")
            directory = "out"
        fmt = self.choice(d.get("formats"), "output.formats", FORMATS, "both")
        return {"directory": directory, "formats": fmt}

    def sampling(self, x, required: bool) -> dict:
        if x is None:
            if required:
                self.err("sampling", "required for this experiment (n_samples and seed)")
            return {"n_samples": 1, "seed": 0, "workers": 1}
        d = self.obj(x, "sampling") or {}
        self.keys(d, "sampling", ("n_samples", "seed", "workers"), ("n_samples",))
        n = self.int_(d.get("n_samples"), "sampling.n_samples", 1, MAX_SAMPLES, 1)
        seed = self.seed(d.get("seed"), "sampling.seed")
        w = self.int_(d.get("workers"), "sampling.workers", 1, 256, 1)
        return {"n_samples": n, "seed": seed, "workers": w}

    def hilbert(self, raw, out, state_key) -> None:
        dim = self.int_(raw.get("dim"), "dim", 2, MAX_DIM)
        if "dim" not in raw:
            self.err("dim", "required key missing")
        out["dim"] = dim
        normalize = self.bool_(raw.get("normalize"), "normalize", False)
        out["normalize"] = normalize
        if state_key not in raw:
            self.err(state_key, "required key missing")
            out[state_key] = None
        else:
            out[state_key] = self.cvector(raw[state_key], state_key, dim, normalize)
        out["observables"] = self.observables(raw.get("observables"), dim, state_key == "zB")

    def observables(self, x, dim, pair: bool) -> dict:
        if x is None:
            self.err("observables", "required key missing")
            return {}
        d = self.obj(x, "observables") or {}
        if "A" not in d:
            self.err("observables.A", "required key missing")
        if not pair and "B" not in d and len(d) < 2:
            self.err("observables.B", "required key missing")
        out = {}
        for name, spec in d.items():
            path = f"observables.{name}"
            if isinstance(spec, str):
                if spec not in BASIS_NAMES:
                    self.err(path, f"unknown basis {spec!r}; named bases are {list(BASIS_NAMES)}")
                elif spec == "y" and dim not in (None, 2):
                    self.err(path, "the y basis exists only for dim 2")
                elif spec == "hadamard" and dim is not None and dim & (dim - 1):
                    self.err(path, f"hadamard basis needs a power-of-two dim, got {dim}")
                out[name] = spec
            elif isinstance(spec, list):
                out[name] = self.matrix(spec, path, dim)
            else:
                self.err(path, "expected a basis name or a matrix (rows of complex numbers)")
        return out

    def matrix(self, rows, path, dim):
        if dim is not None and len(rows) != dim:
            self.err(path, f"has {len(rows)} rows, dim is {dim}")
            return None
        out = []
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != len(rows):
                self.err(f"{path}[{r}]", f"expected a row of {len(rows)} entries")
                return None
            out.append([self.complex_(e, f"{path}[{r}][{c}]") for c, e in enumerate(row)])
        if any(e is None for row in out for e in row):
            return None
        H = np.array([[complex(a, b) for a, b in row] for row in out])
        asym = float(np.max(np.abs(H - H.conj().T)))
        if asym > 1e-10:
            self.err(path, f"matrix is not Hermitian (max |H - H^dagger| = {asym:.3e})")
        return out

    def solver(self, x) -> dict:
        d = {} if x is None else self.obj(x, "solver") or {}
        self.keys(d, "solver", ("max_iterations", "tolerance", "restarts", "seed"))
        return {
            "max_iterations": self.int_(d.get("max_iterations"), "solver.max_iterations", 1, 10**6, 5000),
            "tolerance": self.num(d.get("tolerance"), "solver.tolerance", 0, 1, 1e-8, open_lo=True),
            "restarts": self.int_(d.get("restarts"), "solver.restarts", 1, 1000, 8),
            "seed": self.int_(d.get("seed"), "solver.seed", 0, 2**64 - 1, 0),
        }

    def protocol(self, x, observables) -> list:
        if x is None:
            x = ["B", "A"]
        if not isinstance(x, list) or not x or not all(isinstance(s, str) for s in x):
            self.err("protocol", "expected a non-empty list of observable names")
            return ["B", "A"]
        for k, name in enumerate(x):
            if observables and name not in observables:
                self.err(f"protocol[{k}]", f"{name!r} does not name an entry of observables")
        return list(x)

    def semantics(self, x) -> list:
        if x is None:
            return list(PAIR_SEMANTICS)
        if not isinstance(x, list) or not x:
            self.err("semantics", "expected a non-empty list")
            return list(PAIR_SEMANTICS)
        for k, s in enumerate(x):
            self.choice(s, f"semantics[{k}]", PAIR_SEMANTICS)
        return list(x)

    def grid(self, x) -> dict:
        d = {} if x is None else self.obj(x, "grid") or {}
        self.keys(d, "grid", ("n_points", "state", "center", "sigma", "momentum", "separation",
                              "relative_phase", "momentum_index", "hbar", "x0_index", "p0_index"))
        n = self.int_(d.get("n_points"), "grid.n_points", 16, 4096, 128)
        if _is_int(n) and n & (n - 1):
            self.err("grid.n_points", f"must be a power of two, got {n}")
        g = {
            "n_points": n,
            "state": self.choice(d.get("state"), "grid.state", GRID_STATES, "gaussian"),
            "hbar": self.num(d.get("hbar"), "grid.hbar", 0, None, 1.0, open_lo=True),
            "center": self.num(d.get("center"), "grid.center", default=0.0),
            "momentum": self.num(d.get("momentum"), "grid.momentum", default=0.0),
            "sigma": self.num(d.get("sigma"), "grid.sigma", 0, None, None, open_lo=True),
            "separation": self.num(d.get("separation"), "grid.separation", 0, None, 6.0),
            "relative_phase": self.num(d.get("relative_phase"), "grid.relative_phase", default=0.0),
        }
        nn = n if _is_int(n) else 128
        g["momentum_index"] = self.int_(d.get("momentum_index"), "grid.momentum_index", 0, nn - 1, nn // 2 + 1)
        # reference point of the labelled state; null picks the largest |psi| / |xi| sample
        g["x0_index"] = self.int_(d.get("x0_index"), "grid.x0_index", 0, nn - 1, None)
        g["p0_index"] = self.int_(d.get("p0_index"), "grid.p0_index", 0, nn - 1, None)
        return g

    def spin(self, x) -> dict:
        d = {} if x is None else self.obj(x, "spin") or {}
        self.keys(d, "spin", ("K", "scheme", "seed", "n0_index", "check_max_K"))
        K = d.get("K", [4, 6, 8, 10, 12])
        if _is_int(K):
            K = [K]
        if not isinstance(K, list) or not K:
            self.err("spin.K", "expected an integer or a non-empty list of integers")
            K = []
        K = [self.int_(k, f"spin.K[{i}]", 1, 16) for i, k in enumerate(K)]
        scheme = self.choice(d.get("scheme"), "spin.scheme", SPIN_SCHEMES, "fibonacci_hemisphere")
        if scheme == "random_hemisphere" and "seed" not in d:
            self.err("spin.seed", "required for the random_hemisphere scheme")
        seed = self.int_(d.get("seed"), "spin.seed", 0, 2**64 - 1, 0)
        n0 = self.int_(d.get("n0_index"), "spin.n0_index", 0, None, 0)
        for i, k in enumerate(K):
            if _is_int(k) and _is_int(n0) and n0 >= k:
                self.err("spin.n0_index", f"{n0} is not a direction index for K = {k}")
        cmax = self.int_(d.get("check_max_K"), "spin.check_max_K", 1, 16, 10)
        return {"K": K, "scheme": scheme, "seed": seed, "n0_index": n0, "check_max_K": cmax}

    def singlet(self, x) -> dict:
        d = {} if x is None else self.obj(x, "singlet") or {}
        self.keys(d, "singlet", ("angles_deg",))
        a = d.get("angles_deg", [0, 30, 60, 90, 120, 180])
        if not isinstance(a, list) or not a:
            self.err("singlet.angles_deg", "expected a non-empty list of angles")
            a = []
        return {"angles_deg": [self.num(t, f"singlet.angles_deg[{i}]", 0, 180) for i, t in enumerate(a)]}

    def geometry(self, x) -> dict:
        d = {} if x is None else self.obj(x, "geometry") or {}
        keys = ("wavelength", "slit_separation", "screen_distance", "screen_points", "screen_halfwidth",
                "amplitude_L", "amplitude_R", "correlation_fidelity", "semantics")
        self.keys(d, "geometry", keys)
        g = {
            "wavelength": self.num(d.get("wavelength"), "geometry.wavelength", 0, None, 500e-9, open_lo=True),
            "slit_separation": self.num(d.get("slit_separation"), "geometry.slit_separation", 0, None, 50e-6, open_lo=True),
            "screen_distance": self.num(d.get("screen_distance"), "geometry.screen_distance", 0, None, 1.0, open_lo=True),
            "screen_points": self.int_(d.get("screen_points"), "geometry.screen_points", 3, 10**6, 201),
            "screen_halfwidth": self.num(d.get("screen_halfwidth"), "geometry.screen_halfwidth", 0, None, 0.05, open_lo=True),
            "correlation_fidelity": self.num(d.get("correlation_fidelity"), "geometry.correlation_fidelity", 0, 1, 1.0),
        }
        h = float(np.sqrt(0.5))
        amps = []
        for side in ("L", "R"):
            key = f"amplitude_{side}"
            a = d.get(key)
            amps.append([h, 0.0] if a is None else self.complex_(a, f"geometry.{key}"))
        g["amplitude_L"], g["amplitude_R"] = amps
        if all(a is not None for a in amps):
            norm = sum(a * a + b * b for a, b in amps)
            if abs(norm - 1) > 1e-10:
                self.err("geometry.amplitude_L", f"|a_L|^2 + |a_R|^2 is {norm:.17g}, not 1")
        sem = d.get("semantics", list(TWOSLIT_SEMANTICS))
        if not isinstance(sem, list) or not sem:
            self.err("geometry.semantics", "expected a non-empty list")
            sem = list(TWOSLIT_SEMANTICS)
        for i, s in enumerate(sem):
            self.choice(s, f"geometry.semantics[{i}]", TWOSLIT_SEMANTICS)
        g["semantics"] = list(sem)
        return g


def with_overrides(cfg: ExperimentConfig, **sections) -> ExperimentConfig:
    """Copy of ``cfg`` with top-level sections replaced, re-validated."""
    data = copy.deepcopy(cfg.data)
    data.update(sections)
    return parse_config(json.dumps(data))
