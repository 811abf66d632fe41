"""
Experiment orchestration: config -> module calls -> result -> files.

``run_experiment`` does the computation and returns an :class:`ExperimentResult`
holding CSV tables, one JSON document and summary rows. ``emit_report`` writes the
requested formats. Module errors come out as :class:`ExperimentError` with the
experiment name attached.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import export, hilbert, labels, measurement, pairs, phasespace, spin, twoslit, ztable
from .config import ExperimentConfig
from .errors import ExperimentError, LabelQMError


@dataclass
class CsvTable:
    filename: str
    header: tuple[str, ...]
    rows: list
    extra_provenance: dict = field(default_factory=dict)


@dataclass
class ExperimentResult:
    experiment: str
    config_sha256: str
    seed: int | None
    summary: list[tuple[str, object]]
    document: dict
    tables: list[CsvTable]
    sidecars: dict[str, dict] = field(default_factory=dict)   # filename -> JSON doc, written with CSV

    def provenance(self) -> dict:
        return {"experiment": self.experiment, "config_sha256": self.config_sha256, "seed": self.seed}

    def value(self, key: str):
        return dict(self.summary)[key]


# --- helpers ------------------------------------------------------------------------


def _observable(cfg: ExperimentConfig, name: str) -> hilbert.Observable:
    spec = cfg.data["observables"][name]
    if isinstance(spec, str):
        return hilbert.named_basis(spec, cfg.data["dim"])
    H = np.array([[complex(a, b) for a, b in row] for row in spec])
    return hilbert.Observable.from_matrix(H, name=name)


def _state(cfg: ExperimentConfig) -> hilbert.QuantumState:
    return hilbert.QuantumState(cfg.state_vector("state"), normalize=cfg.data["normalize"])


def _counts_doc(counts: dict) -> dict:
    return {",".join(map(str, k)): v for k, v in counts.items()}


def _seed_of(cfg: ExperimentConfig):
    exp = cfg.experiment
    if cfg.seed is not None:
        return cfg.seed
    if exp == "ztable":
        return cfg.data["solver"]["seed"]
    if exp == "spin" and cfg.data["spin"]["scheme"] == "random_hemisphere":
        return cfg.data["spin"]["seed"]
    return None


# --- experiments --------------------------------------------------------------------


def _weights(cfg):
    A, B = _observable(cfg, "A"), _observable(cfg, "B")
    W = labels.weight_table(_state(cfg), A, B)
    pA, pB = np.abs(W.zA) ** 2, np.abs(W.zB) ** 2
    rows = list(export.table_rows(W.values))
    rows += [(i, "*", s) for i, s in enumerate(W.row_sums())]
    rows += [("*", j, s) for j, s in enumerate(W.col_sums())]
    rows += [("*", "*", float(W.values.sum()))]
    doc = {"W": W.values, "row_sums": W.row_sums(), "born_A": pA, "col_sums": W.col_sums(),
           "born_B": pB, "marginal_error": W.marginal_error(), "min_entry": float(W.values.min())}
    summary = [("marginal_error", W.marginal_error()), ("min_entry", float(W.values.min())),
               ("total", float(W.values.sum()))]
    return summary, doc, [CsvTable("weights.csv", ("i", "j", "w"), rows)]


def _ztable(cfg):
    A, B = _observable(cfg, "A"), _observable(cfg, "B")
    s = cfg.data["solver"]
    params = ztable.SolverParams(s["max_iterations"], s["tolerance"], s["restarts"], s["seed"])
    Z = ztable.z_table(_state(cfg), A, B, params)
    V = Z.values
    rows = [(i, j, V[i, j].real, V[i, j].imag) for i, j, _ in export.table_rows(Z.moduli)]
    doc = {"moduli": Z.moduli, "phases": Z.phases, "gaugeA": Z.gaugeA, "gaugeB": Z.gaugeB,
           "residual": Z.residual, "converged": Z.converged, "restart": Z.restart,
           "iterations": Z.iterations, "solver": s}
    summary = [("residual", Z.residual), ("converged", Z.converged), ("restart", Z.restart),
               ("iterations", Z.iterations)]
    return summary, doc, [CsvTable("ztable.csv", ("i", "j", "re", "im"), rows)]


REINJECT_MAX_POINTS = 256


def _wigner(cfg):
    g = cfg.data["grid"]
    n, hbar = g["n_points"], g["hbar"]
    if g["state"] == "gaussian":
        grid = phasespace.gaussian(n, g["center"], g["sigma"], g["momentum"], hbar=hbar)
    elif g["state"] == "cat":
        grid = phasespace.cat_state(n, g["separation"], g["sigma"], hbar=hbar, relative_phase=g["relative_phase"])
    else:
        grid = phasespace.plane_wave(n, g["momentum_index"], hbar=hbar)
    W = phasespace.discrete_wigner(grid)
    px = W.sum(axis=1) * grid.dp
    pp = W.sum(axis=0) * grid.dx
    err_x = float(np.max(np.abs(px - np.abs(grid.psi_x) ** 2)))
    err_p = float(np.max(np.abs(pp - np.abs(grid.xi_p) ** 2)))
    total = float(W.sum() * grid.dx * grid.dp)

    x0 = g["x0_index"] if g["x0_index"] is not None else int(np.argmax(np.abs(grid.psi_x)))
    p0 = g["p0_index"] if g["p0_index"] is not None else int(np.argmax(np.abs(grid.xi_p)))
    explicit = phasespace.phase_space_label_state(grid, x0, p0)
    reinject = None
    if n <= REINJECT_MAX_POINTS:
        solved = ztable.z_table(phasespace.grid_state(grid), phasespace.position_basis(grid),
                                phasespace.momentum_basis(grid),
                                ztable.SolverParams(initial_phases=explicit.phases))
        reinject = solved.residual

    meta = {"n_points": n, "dx": grid.dx, "dp": grid.dp, "hbar": hbar, "state": g["state"],
            "grid": g, "x0_index": x0, "p0_index": p0,
            "position_marginal_error": err_x, "momentum_marginal_error": err_p,
            "total": total, "min": float(W.min()),
            "label_state_ray_residual": explicit.residual, "reinjected_residual": reinject}
    rows = [(grid.x[i], grid.p[j], W[i, j]) for i in range(n) for j in range(n)]
    doc = dict(meta, x=grid.x, p=grid.p, W=W)
    summary = [("min", float(W.min())), ("total", total), ("position_marginal_error", err_x),
               ("momentum_marginal_error", err_p), ("label_state_ray_residual", explicit.residual),
               ("reinjected_residual", "skipped" if reinject is None else reinject)]
    return summary, doc, [CsvTable("wigner.csv", ("x", "p", "w"), rows)], {"wigner.meta.json": meta}


def _sequence(cfg):
    state = _state(cfg)
    names = cfg.data["protocol"]
    proto = [_observable(cfg, k) for k in names]
    proto = [hilbert.Observable(o.matrix, o.eigenvalues, o.eigenbasis, k) for o, k in zip(proto, names)]
    samp = cfg.data["sampling"]
    rec = measurement.sample_protocol(state, proto, samp["n_samples"], samp["seed"], samp["workers"])
    last = proto[-1]
    direct = measurement.direct_distribution(state, last)
    joint = measurement.chain_distribution(state, proto)
    chain_last = joint.sum(axis=tuple(range(joint.ndim - 1)))
    emp = rec.frequencies(len(proto) - 1)
    rows = [(i, direct[i], chain_last[i], emp[i]) for i in range(last.dim)]
    shots = [tuple(r) for r in rec.outcomes.tolist()]
    doc = {"protocol": list(names), "seed": rec.seed, "n_samples": rec.n_samples,
           "counts": _counts_doc(rec.counts), "direct": direct, "sequential": chain_last,
           "empirical": emp, "max_direct_vs_sequential": float(np.max(np.abs(direct - chain_last)))}
    summary = [("protocol", " -> ".join(names))]
    summary += [(f"P({names[-1]}={i}) direct", direct[i]) for i in range(last.dim)]
    summary += [(f"P'({names[-1]}={i}) sequential", chain_last[i]) for i in range(last.dim)]
    summary += [(f"P'({names[-1]}={i}) empirical", emp[i]) for i in range(last.dim)]
    tables = [CsvTable("sequence.csv", ("i", "direct", "sequential", "empirical"), rows),
              CsvTable("sequence_shots.csv", tuple(names), shots)]
    return summary, doc, tables


def _order(cfg):
    A, B = _observable(cfg, "A"), _observable(cfg, "B")
    rep = measurement.order_comparison(_state(cfg), A, B)
    rows = [(i, j, rep.a_first[i, j], rep.b_first[i, j]) for i, j, _ in export.table_rows(rep.a_first)]
    doc = {"a_first": rep.a_first, "b_first": rep.b_first, "tv_distance": rep.tv_distance,
           "order_sensitive": rep.order_sensitive}
    summary = [("tv_distance", rep.tv_distance), ("order_sensitive", rep.order_sensitive)]
    return summary, doc, [CsvTable("order.csv", ("i", "j", "a_first", "b_first"), rows)]


def _pair_of(cfg):
    zB = cfg.state_vector("zB")
    Bvec = None
    if "B" in cfg.data["observables"]:
        Bvec = _observable(cfg, "B").eigenbasis
    return pairs.make_pair(zB, basis_a_vectors=Bvec, basis_b_vectors=Bvec), _observable(cfg, "A")


def _report_doc(rep: pairs.AmbiguityReport) -> dict:
    return {"tables": rep.tables, "tv_distance": rep.tv_distance, "label_vs_b_first": rep.label_vs_b_first,
            "marginal_deviation": rep.marginal_deviation, "a_marginal_deviation": rep.a_marginal_deviation,
            "conditional_difference": rep.conditional_difference,
            "flags": {"ambiguous": rep.ambiguous, "divergent_from_orthodox": rep.divergent_from_orthodox}}


def _pair_summary(pair, rep):
    label = rep.tables["label_theory"]
    return [("tv_distance", rep.tv_distance),
            ("B marginal label_theory", label.sum(axis=0)),
            ("B marginal |zB|^2", np.abs(pair.zB) ** 2),
            ("ambiguous", rep.ambiguous), ("divergent_from_orthodox", rep.divergent_from_orthodox)]


def _pair(cfg):
    pair, A = _pair_of(cfg)
    rep = pairs.ambiguity_report(pair, A)
    samp = cfg.data["sampling"]
    doc = _report_doc(rep)
    doc["samples"] = {}
    tables = []
    for sem in cfg.data["semantics"]:
        T = rep.tables[sem]
        rec = pairs.sample_pair(pair, A, sem, samp["n_samples"], samp["seed"], samp["workers"])
        emp = rec.frequencies()
        doc["samples"][sem] = {"n_samples": rec.n_samples, "counts": _counts_doc(rec.counts), "empirical": emp}
        rows = [(i, j, T[i, j], emp[i, j]) for i, j, _ in export.table_rows(T)]
        tables.append(CsvTable(f"pair_{sem}.csv", ("i", "j", "p", "empirical"), rows, {"semantics": sem}))
    return _pair_summary(pair, rep), doc, tables


def _ambiguity(cfg):
    pair, A = _pair_of(cfg)
    rep = pairs.ambiguity_report(pair, A)
    tables = [CsvTable(f"ambiguity_{sem}.csv", ("i", "j", "p"), list(export.table_rows(T)), {"semantics": sem})
              for sem, T in rep.tables.items()]
    return _pair_summary(pair, rep), _report_doc(rep), tables


def spin_structure_checks(max_K: int, scheme: str = "fibonacci_hemisphere", seed: int = 0) -> list[dict]:
    """Exhaustive label checks for K = 1..max_K: skewness, zero real part, weight normalization."""
    out = []
    for K in range(1, max_K + 1):
        dirs = spin.sphere_directions(K, scheme, seed)
        signs = spin._all_signs(K)
        v = spin._signed_sums(signs, dirs)
        vneg = spin._signed_sums(-signs, dirs)
        skew = bool(np.array_equal(vneg, -v))
        real_zero = all(spin.spin_amplitude(spin.SpinLabel(s), dirs).w == 0.0 for s in signs)
        sums = [sum(w for _, w in spin.conditional_ensemble(k, dirs)) for k in range(K)]
        err = float(max(abs(s - 1) for s in sums))
        out.append({"K": K, "antisymmetric_exact": skew, "real_part_zero": real_zero, "weight_sum_error": err})
    return out


def _spin(cfg):
    s = cfg.data["spin"]
    checks = spin_structure_checks(s["check_max_K"], s["scheme"], s["seed"])
    tables, sweeps = [], {}
    for K in s["K"]:
        rows = spin.conditional_sweep(K, s["scheme"], s["seed"], s["n0_index"])
        sweeps[str(K)] = [{"theta_deg": r.theta_deg, "label_conditional": r.label_conditional,
                           "quantum_conditional": r.quantum_conditional, "deviation": r.deviation} for r in rows]
        tables.append(CsvTable(f"spin_K{K}.csv", ("theta_deg", "label_conditional", "quantum_conditional", "deviation"),
                               [(r.theta_deg, r.label_conditional, r.quantum_conditional, r.deviation) for r in rows],
                               {"K": K}))
    doc = {"structure_checks": checks, "sweeps": sweeps, "spin": s}
    summary = [("structure checks K<=%d" % s["check_max_K"],
                all(c["antisymmetric_exact"] and c["real_part_zero"] and c["weight_sum_error"] < 1e-12 for c in checks))]
    for K, rows in sweeps.items():
        summary.append((f"max |deviation| K={K}", max(abs(r["deviation"]) for r in rows)))
    return summary, doc, tables


def _singlet(cfg):
    samp = cfg.data["sampling"]
    results = []
    for t in cfg.data["singlet"]["angles_deg"]:
        n, m = spin.direction_at(t)
        r = spin.singlet_sample(n, m, samp["n_samples"], samp["seed"], samp["workers"])
        results.append((t, r))
    rows = [(t, r.empirical_E, r.analytic_E, r.n_samples) for t, r in results]
    doc = {"results": [{"theta_deg": t, "empirical_E": r.empirical_E, "analytic_E": r.analytic_E,
                        "mean_a": r.mean_a, "mean_b": r.mean_b, "n_samples": r.n_samples} for t, r in results]}
    summary = [(f"E({t:g} deg)", f"{r.empirical_E:.5f} (analytic {r.analytic_E:.5f})") for t, r in results]
    return summary, doc, [CsvTable("singlet.csv", ("theta_deg", "empirical_E", "analytic_E", "n_samples"), rows)]


def geometry_of(cfg) -> twoslit.SlitGeometry:
    g = cfg.data["geometry"]
    return twoslit.SlitGeometry(
        g["wavelength"], g["slit_separation"], g["screen_distance"], g["screen_points"], g["screen_halfwidth"],
        complex(*g["amplitude_L"]), complex(*g["amplitude_R"]), g["correlation_fidelity"])


def _twoslit(cfg):
    geo = geometry_of(cfg)
    L, R = twoslit.slit_amplitudes(geo)
    x = geo.positions
    lab = twoslit.pattern(L, R, "label_theory", x, geo.correlation_fidelity)
    orth = twoslit.pattern(L, R, "orthodox_early_ancilla", x, geo.correlation_fidelity)
    rows = [(x[i], lab.intensity[i], orth.intensity[i], lab.p_left[i], lab.p_right[i], int(lab.defined[i]))
            for i in range(x.size)]
    samp = cfg.data["sampling"]
    doc = {"geometry": geo.to_dict(), "visibility_label": lab.visibility, "visibility_orthodox": orth.visibility,
           "pixel_visibility_label": lab.pixel_visibility, "pixel_visibility_orthodox": orth.pixel_visibility,
           "x": x, "intensity_label": lab.intensity, "intensity_orthodox": orth.intensity,
           "p_l": lab.p_left, "p_r": lab.p_right, "defined": lab.defined, "samples": {}}
    header, cols = ["x"], [x]
    for sem in cfg.data["geometry"]["semantics"]:
        smp = twoslit.sample_twoslit(geo, sem, samp["n_samples"], samp["seed"], workers=samp["workers"])
        doc["samples"][sem] = {"n_samples": smp.n_samples, "pixel_counts": smp.pixel_counts,
                               "left_counts": smp.left_counts}
        header += [f"hits_{sem}", f"left_{sem}"]
        cols += [smp.pixel_counts, smp.left_counts]
    sample_rows = [tuple(c[i] for c in cols) for i in range(x.size)]
    summary = [("visibility label_theory", lab.visibility), ("visibility orthodox_early_ancilla", orth.visibility),
               ("pixel visibility label_theory", lab.pixel_visibility),
               ("pixel visibility orthodox_early_ancilla", orth.pixel_visibility),
               ("fringe spacing", geo.fringe_spacing)]
    tables = [CsvTable("twoslit.csv", ("x", "intensity_label", "intensity_orthodox", "p_l", "p_r", "defined"), rows,
                       {"geometry": geo.to_dict()}),
              CsvTable("twoslit_samples.csv", tuple(header), sample_rows)]
    return summary, doc, tables


_DISPATCH = {
    "weights": _weights, "ztable": _ztable, "wigner": _wigner, "sequence": _sequence, "order": _order,
    "pair": _pair, "ambiguity": _ambiguity, "spin": _spin, "singlet": _singlet, "twoslit": _twoslit,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    exp = cfg.experiment
    try:
        out = _DISPATCH[exp](cfg)
    except (LabelQMError, ValueError, ArithmeticError, KeyError, IndexError, NotImplementedError) as e:
        raise ExperimentError(exp, e) from e
    summary, doc, tables = out[:3]
    sidecars = out[3] if len(out) > 3 else {}
    res = ExperimentResult(exp, cfg.sha256(), _seed_of(cfg), summary, doc, tables, sidecars)
    res.document = {"provenance": dict(res.provenance(), config=cfg.data), **doc}
    return res


def emit_report(result: ExperimentResult, out_dir, fmt: str = "both") -> list[Path]:
    """Write CSV tables (plus sidecars) and/or the JSON document; returns the paths written."""
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"format must be csv, json or both, got {fmt!r}")
    out_dir = Path(out_dir)
    written = []
    if fmt in ("csv", "both"):
        for t in result.tables:
            prov = dict(result.provenance(), **t.extra_provenance)
            written.append(export.write_csv(out_dir / t.filename, t.header, t.rows, prov))
        for name, doc in result.sidecars.items():
            written.append(export.write_json(out_dir / name, {"provenance": result.provenance(), **doc}))
    if fmt in ("json", "both"):
        written.append(export.write_json(out_dir / f"{result.experiment}.json", result.document))
    return written


def format_summary(result: ExperimentResult) -> str:
    def show(v):
        if isinstance(v, (float, np.floating)):
            return f"{v:.6g}"
        if isinstance(v, np.ndarray):
            return "[" + ", ".join(f"{x:.6g}" for x in v.tolist()) + "]"
        return str(v)

    rows = [("experiment", result.experiment), ("config_sha256", result.config_sha256[:16]),
            ("seed", result.seed)] + list(result.summary)
    w = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(w)}  {show(v)}" for k, v in rows)
