"""Task handlers behind the command line: each turns resolved parameters into a TaskResult."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import center as ctr
from .arith import frequency_profile, parse_alpha
from .cache import Cache
from .cocycle import complexify, lyapunov_spectrum
from .config import ConfigError, grid
from .dual import (
    domination_check,
    dual_cocycle,
    dual_lyapunov_spectrum,
    haro_puig_check,
    jensen_profile,
    pairing_defect,
)
from .output import TaskResult, check
from .potential import AnalyticPotential, TrigPotential, from_spec
from .schrodinger import (
    acceleration,
    classify,
    edge_scales,
    energy_at_ids,
    gap_label_values,
    holder_exponent,
    ids_rotation_check,
    ids_sweep,
    labelled_gap,
    localization_probe,
    lyapunov_profile,
    schrodinger_cocycle,
    t_acceleration,
)
from .schrodinger.ids import ids

TWO_PI = 2.0 * math.pi


@dataclass
class Context:
    potential: object
    potential_spec: dict
    alpha: float
    alpha_expr: object
    alpha_depth: int
    params: dict
    cache: Cache

    @classmethod
    def build(cls, cfg, cache: Cache) -> "Context":
        v = from_spec(cfg.potential)
        try:
            a = float(parse_alpha(cfg.alpha, cfg.alpha_depth))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"alpha: cannot parse {cfg.alpha!r} ({exc})") from exc
        return cls(v, cfg.potential, a, cfg.alpha, cfg.alpha_depth, cfg.resolved_params(), cache)

    def trig(self) -> TrigPotential:
        if not isinstance(self.potential, TrigPotential):
            raise ConfigError("potential: this task needs a trigonometric polynomial (type trig, amo or named)")
        return self.potential

    def energies(self, key: str = "E") -> np.ndarray:
        p = self.params
        if p.get(key) is not None:
            return grid(p[key], f"params.{key}")
        target = p.get("ids_target")
        if target is None:
            raise ConfigError(f"params.{key}: give an energy grid or params.ids_target")
        return np.array([
            energy_at_ids(self.potential, self.alpha, float(t), size=int(p["ids_size"]))
            for t in grid(target, "params.ids_target")
        ])

    def frame(self, E: float, grid_size: int, horizon=None):
        key = {"potential": self.potential_spec, "alpha": repr(self.alpha), "E": repr(float(E)),
               "eps": 0.0, "grid": int(grid_size), "horizon": horizon}
        return self.cache.memo("frame", key, lambda: ctr.center_frame(
            self.trig(), float(E), self.alpha, grid_size=int(grid_size), horizon=horizon))


def task_freq(ctx: Context) -> TaskResult:
    prof = frequency_profile(ctx.alpha_expr, int(ctx.params["depth"]))
    rows = [[k + 1, a, q] for k, (a, q) in enumerate(zip(prof.partial_quotients, prof.convergent_denominators))]
    lnq = [math.log(q) for q in prof.convergent_denominators]
    summary = {"alpha": prof.alpha, "beta_estimate": prof.beta_estimate, "depth": prof.depth}
    return TaskResult(["k", "a_k", "q_k"], rows, summary, ("k", "ln q_k", list(range(1, prof.depth + 1)), lnq))


def task_lyap(ctx: Context) -> TaskResult:
    p = ctx.params
    eps = float(p["eps"])
    rows = []
    for E in ctx.energies():
        c = schrodinger_cocycle(ctx.potential, float(E), ctx.alpha, eps_max=abs(eps))
        s = lyapunov_spectrum(complexify(c, eps) if eps else c, int(p["N"]), int(p["segments"]), k=1)
        rows.append([float(E), eps, float(s.exponents[0]), float(s.stderr[0])])
    Es = [r[0] for r in rows]
    Ls = [r[2] for r in rows]
    summary = {"max_L": max(Ls), "min_L": min(Ls), "max_stderr": max(r[3] for r in rows)}
    return TaskResult(["E", "eps", "L", "stderr"], rows, summary, ("E", "L", Es, Ls))


def task_accel(ctx: Context) -> TaskResult:
    p = ctx.params
    rows = []
    for E in ctx.energies():
        prof = lyapunov_profile(ctx.potential, float(E), eps_max=p["eps_max"], n_eps=int(p["n_eps"]),
                                tol=float(p["tol"]), alpha=ctx.alpha, N=int(p["N"]), strict=False)
        w = acceleration(prof)
        tw = t_acceleration(prof)
        bp = float(prof.breakpoints[0]) if prof.breakpoints.size else float("nan")
        rows.append([float(E), prof.L0, w, tw, prof.snap_deviation, float(prof.raw_slopes[0]), bp])
    dev = max(r[4] for r in rows)
    summary = {"max_snap_deviation": dev}
    checks = [check("snap_deviation", dev, float(p["tol"]))]
    Es = [r[0] for r in rows]
    return TaskResult(["E", "L", "omega", "t_omega", "snap_deviation", "raw_slope", "first_breakpoint"],
                      rows, summary, ("E", "omega", Es, [r[2] for r in rows]), checks)


def task_classify(ctx: Context) -> TaskResult:
    p = ctx.params
    rows = []
    for E in ctx.energies():
        lab = classify(ctx.potential, ctx.alpha, float(E), eps_max=p["eps_max"], N=int(p["N"]))
        rows.append([float(E), lab.label, lab.L, lab.threshold, lab.omega, lab.t_omega, lab.type_one])
    counts = {}
    for r in rows:
        counts[r[1]] = counts.get(r[1], 0) + 1
    return TaskResult(["E", "label", "L", "threshold", "omega", "t_omega", "type_one"], rows,
                      {"labels": counts}, ("E", "L", [r[0] for r in rows], [r[2] for r in rows]))


def task_ids(ctx: Context) -> TaskResult:
    p = ctx.params
    Es = ctx.energies()
    sw = ids_sweep(ctx.potential, ctx.alpha, Es, int(p["size"]), int(p["theta_samples"]))
    cols = ["E", "N"]
    rows = [[float(E), float(N)] for E, N in zip(Es, sw.N)]
    summary = {"stderr": sw.stderr, "size": sw.size, "theta_samples": sw.theta_samples}
    checks = []
    if p["rotation_check"]:
        cols.append("rotation_residual")
        for r in rows:
            r.append(ids_rotation_check(ctx.potential, ctx.alpha, r[0], int(p["size"]), int(p["theta_samples"]),
                                        int(p["N_rot"])))
        worst = max(r[2] for r in rows)
        summary["max_rotation_residual"] = worst
        checks.append(check("rotation_residual", worst, float(p["tol"])))
    return TaskResult(cols, rows, summary, ("E", "N", list(Es), list(sw.N)), checks)


def task_holder(ctx: Context) -> TaskResult:
    p = ctx.params
    lo, hi = (float(x) for x in p["E_range"])
    res = float(p["resolution"])
    Es = np.arange(lo, hi, res)
    sw = ids_sweep(ctx.potential, ctx.alpha, Es, int(p["size"]), int(p["theta_samples"]))
    labels = [int(k) for k in p["labels"]]
    values = gap_label_values(ctx.alpha, max(abs(k) for k in labels))
    rows = []
    for k in labels:
        a, b = labelled_gap(sw, values[k])
        scales = edge_scales(b - a, float(p["scale_min"]), float(p["scale_max"]))
        for side, E0 in (("lower", a), ("upper", b)):
            fit = holder_exponent(sw, E0, scales)
            rows.append([k, values[k], side, E0, b - a, fit.exponent, fit.r_squared, scales.size])
    ex = [r[5] for r in rows]
    r2 = [r[6] for r in rows]
    lo_ex, hi_ex = (float(x) for x in p["exponent_range"])
    summary = {"mean_exponent": float(np.mean(ex)), "sweep_points": int(Es.size), "stderr": sw.stderr}
    checks = [check(f"exponent[{r[0]},{r[2]}]", r[5], [lo_ex, hi_ex], "in") for r in rows]
    checks += [check(f"r_squared[{r[0]},{r[2]}]", r[6], float(p["min_r2"]), ">") for r in rows]
    step = max(1, Es.size // 2000)
    return TaskResult(["label", "ids_value", "side", "E0", "gap_width", "exponent", "r_squared", "scales"],
                      rows, summary, ("E", "N", list(Es[::step]), list(sw.N[::step])), checks)


def task_localize(ctx: Context) -> TaskResult:
    p = ctx.params
    rows, per_size = [], {}
    for size in p["sizes"]:
        rep = localization_probe(ctx.potential, ctx.alpha, float(p["theta"]), tuple(p["E_window"]), int(size))
        for j in range(rep.energies.size):
            rows.append([int(size), float(rep.energies[j]), float(rep.rates[j]), float(rep.ipr[j]),
                         int(rep.centers[j]), bool(rep.boundary[j])])
        bulk = rep.bulk_rates
        per_size[str(int(size))] = {
            "eigenvectors": int(rep.energies.size),
            "median_rate": rep.median_rate,
            "max_bulk_rate": float(np.max(bulk)) if bulk.size else float("nan"),
            "mean_ipr": float(np.mean(rep.ipr)) if rep.ipr.size else float("nan"),
        }
    sizes = [str(int(s)) for s in p["sizes"]]
    iprs = [per_size[s]["mean_ipr"] for s in sizes]
    summary = {"sizes": per_size, "ipr_growing": bool(np.all(np.diff(iprs) > 0)) if len(iprs) > 1 else None}
    last = [r for r in rows if r[0] == int(p["sizes"][-1])]
    return TaskResult(["size", "E", "decay_rate", "ipr", "center", "boundary"], rows, summary,
                      ("E", "decay rate", [r[1] for r in last], [r[2] for r in last]))


def task_dual_spectrum(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    rows, worst, summary = [], [], {}
    for E in ctx.energies():
        dc = dual_cocycle(v, float(E), float(p["eps"]), ctx.alpha)
        s = dual_lyapunov_spectrum(dc, int(p["N"]), int(p["segments"]), check=False)
        defect, tol = pairing_defect(s)
        for i in range(s.dim):
            rows.append([float(E), i + 1, float(s.exponents[i]), float(s.stderr[i])])
        worst.append(float(np.max(defect - tol)))
        summary[fmt_key(E)] = {"pairing_defect": defect.tolist(), "pairing_tolerance": tol.tolist(),
                               "max_stderr": float(np.max(s.stderr))}
    checks = [check("pairing_excess", max(worst), 0.0)]
    return TaskResult(["E", "i", "L_i", "stderr"], rows, summary, None, checks)


def fmt_key(E) -> str:
    return format(float(E), ".17g")


def task_jensen(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    eps = grid(p["eps"], "params.eps")
    rows, summary, curve = [], {}, None
    for E in ctx.energies():
        jp = jensen_profile(v, float(E), eps, ctx.alpha, int(p["N"]), int(p["segments"]))
        for e, L, s in zip(jp.eps_grid, jp.L_hat_d, jp.stderr):
            rows.append([float(E), float(e), float(L), float(s)])
        summary[fmt_key(E)] = {
            "flat_value": jp.flat_value,
            "flat_radius": jp.flat_radius_fit,
            "post_slope_over_2pi": jp.post_slope_fit / TWO_PI,
            "asymptote_offset": jp.asymptote_offset,
            "ln_abs_vd": math.log(abs(v.coeff(v.degree))),
            "breakpoints": jp.breakpoints.tolist(),
            "slopes_over_2pi": (jp.slopes / TWO_PI).tolist(),
        }
        if curve is None:
            curve = ("eps", "L^d", list(jp.eps_grid), list(jp.L_hat_d))
    return TaskResult(["E", "eps", "L_hat_d", "stderr"], rows, summary, curve)


def task_haro_puig(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    rows = [[float(E), haro_puig_check(v, float(E), ctx.alpha, int(p["N"]), int(p["segments"]))]
            for E in ctx.energies()]
    worst = max(r[1] for r in rows)
    return TaskResult(["E", "residual"], rows, {"max_residual": worst},
                      ("E", "residual", [r[0] for r in rows], [r[1] for r in rows]),
                      [check("haro_puig_residual", worst, float(p["tol"]))])


def task_dominated(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    rows = []
    for E in ctx.energies():
        dc = dual_cocycle(v, float(E), 0.0, ctx.alpha)
        ks = range(1, dc.cocycle.dim) if p["k"] is None else [int(k) for k in np.atleast_1d(p["k"])]
        for k in ks:
            r = domination_check(dc, k, int(p["horizon"]), int(p["theta_samples"]), float(p["margin"]))
            rows.append([float(E), k, r.dominated, r.margin, r.worst_theta, r.horizon])
    summary = {"dominated": sum(bool(r[2]) for r in rows), "tested": len(rows)}
    return TaskResult(["E", "k", "dominated", "margin", "worst_theta", "horizon"], rows, summary)


def task_center(ctx: Context) -> TaskResult:
    p = ctx.params
    Es = ctx.energies()
    if Es.size != 1:
        raise ConfigError("params.E: the center task takes a single energy")
    E = float(Es[0])
    fr = ctx.frame(E, int(p["grid_size"]), p["horizon"])
    rows = [[float(t), float(ph), *(float(x) for x in C.real.ravel())]
            for t, ph, C in zip(fr.theta_grid, fr.phi, fr.C_values)]
    summary = {
        "E": E,
        "frame_residual": fr.frame_residual,
        "omega_defect": fr.omega_defect,
        "realness": fr.realness,
        "det_defect": fr.det_defect,
        "winding": fr.winding,
        "mean_phi": fr.mean_phi,
        "strip_radius": fr.strip_radius,
        "domination_margin": fr.domination_margin,
        "horizon": fr.horizon,
    }
    checks = [
        check("frame_residual", fr.frame_residual, 1e-6),
        check("realness", fr.realness, 1e-6),
        check("det_defect", fr.det_defect, 1e-8),
    ]
    eps = [float(e) for e in p["eps"]]
    if eps:
        dev = ctr.center_invariance_check(fr, eps, int(p["N_inv"]))
        summary["invariance_deviation"] = dev
        checks.append(check("invariance_deviation", dev, 2e-2))
    return TaskResult(["theta", "phi", "C11", "C12", "C21", "C22"], rows, summary,
                      ("theta", "phi", list(fr.theta_grid), list(fr.phi)), checks)


def _rotation_rows(recs):
    rows = []
    for r in recs:
        s = (r.rho2 - r.rho1 - r.N) % 1.0
        rows.append([r.E, r.rho_hat, r.rho1, r.rho2, r.mean_phi, r.N, s])
    return rows


ROT_COLUMNS = ["E", "rho_hat", "rho1", "rho2", "mean_phi", "N", "s"]


def task_rotation(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    recs = []
    for E in ctx.energies():
        fr = ctx.frame(float(E), int(p["grid_size"]))
        Nv = ids(v, ctx.alpha, float(E), int(p["ids_size"]), int(p["theta_samples"])).N
        recs.append(ctr.center_rotation(fr, int(p["rot_N"]), N_ids=Nv))
    rows = _rotation_rows(recs)
    summary = {"winding_corrections": [r.winding_correction for r in recs]}
    return TaskResult(ROT_COLUMNS, rows, summary, ("E", "rho_hat", [r[0] for r in rows], [r[1] for r in rows]))


def task_duality_check(ctx: Context) -> TaskResult:
    p = ctx.params
    sw = ctr.duality_ids_sweep(ctx.trig(), ctx.alpha, ctx.energies(), grid_size=int(p["grid_size"]),
                               ids_size=int(p["ids_size"]), theta_samples=int(p["theta_samples"]),
                               rot_N=int(p["rot_N"]), classify_N=int(p["classify_N"]))
    rows = _rotation_rows(sw.records)
    step = float(p["step_tol"])
    summary = {
        "k": sw.k,
        "residual": sw.residual,
        "max_rho1_step": float(np.max(sw.drho1)) if sw.drho1.size else float("nan"),
        "min_rho2_step": float(np.min(sw.drho2)) if sw.drho2.size else float("nan"),
        "rho1_plus_rho2": [float((r.rho1 + r.rho2 + 0.5) % 1.0 - 0.5) for r in sw.records],
    }
    checks = [check("circular_stddev", sw.residual, float(p["tol"]))]
    if sw.drho1.size:
        checks += [check("rho1_non_increasing", summary["max_rho1_step"], step, "<="),
                   check("rho2_non_decreasing", summary["min_rho2_step"], -step, ">=")]
    return TaskResult(ROT_COLUMNS, rows, summary, ("E", "s", [r[0] for r in rows], [r[6] for r in rows]), checks)


def task_truncation_study(ctx: Context) -> TaskResult:
    p = ctx.params
    if not isinstance(ctx.potential, AnalyticPotential):
        raise ConfigError("potential: truncation-study needs an analytic potential")
    Es = ctx.energies()
    if Es.size != 1:
        raise ConfigError("params.E: truncation-study takes a single energy")
    a, b = (int(x) for x in p["n_range"])
    st = ctr.truncation_convergence(ctx.potential, ctx.alpha, float(Es[0]), range(a, b + 1),
                                    grid_size=int(p["grid_size"]), classify_N=int(p["classify_N"]))
    rows = [[int(n), float(d), math.log(d) if d > 0 else float("nan")] for n, d in zip(st.n, st.distances)]
    summary = {"E": float(Es[0]), "slope": st.slope, "r_squared": st.r_squared,
               "skipped": [[n, msg] for n, msg in st.skipped]}
    checks = [check("slope", st.slope, 0.0), check("r_squared", st.r_squared, float(p["min_r2"]), ">")]
    return TaskResult(["n", "distance", "ln_distance"], rows, summary,
                      ("n", "ln d_n", [r[0] for r in rows], [r[2] for r in rows]), checks)


def task_bloch(ctx: Context) -> TaskResult:
    p = ctx.params
    v = ctx.trig()
    Es = ctx.energies()
    if Es.size != 1:
        raise ConfigError("params.E: the bloch task takes a single energy")
    E = float(Es[0])
    fr = ctx.frame(E, int(p["grid_size"]))
    window = ctr.DiophantineWindow(float(p["tau"]), float(p["gamma"]))
    pair = ctr.bloch_reconstruct(fr, window=window, conjugation_budget=int(p["budget"]), strict=bool(p["strict"]))
    Ed, idx, vec = ctr.direct_eigenvector(v, ctx.alpha, pair.u.phase, E, int(p["half"]))
    cos = ctr.cosine_similarity(pair.u, idx, vec)
    u = pair.u
    rows = [[int(n), float(abs(a)), float(a.real), float(a.imag)] for n, a in zip(u.indices, u.amplitudes)]
    margin, k = window.margin(pair.rho_hat, ctx.alpha)
    summary = {
        "E": E,
        "rho_hat": pair.rho_hat,
        "window_margin": margin,
        "window_k": k,
        "phase_u": u.phase,
        "phase_v": pair.v.phase,
        "residual_u": u.residual,
        "residual_v": pair.v.residual,
        "conjugation_residual": pair.conjugation_residual,
        "cohomology_residual": pair.cohomology_residual,
        "stalled": pair.stalled,
        "L1_center": pair.L1,
        "decay_rate": u.decay_rate,
        "direct_eigenvalue": Ed,
        "cosine_similarity": cos,
        "reflection_defect": ctr.reflection_defect(pair.u, pair.v),
    }
    checks = [check("residual_u", u.residual, 1e-2), check("cosine_similarity", cos, 0.9, ">")]
    mags = [r[1] for r in rows]
    return TaskResult(["n", "abs_u", "re_u", "im_u"], rows, summary,
                      ("n", "ln|u(n)|", [r[0] for r in rows], [math.log(m) if m > 0 else float("nan") for m in mags]),
                      checks)


HANDLERS = {
    "freq": task_freq,
    "lyap": task_lyap,
    "accel": task_accel,
    "classify": task_classify,
    "ids": task_ids,
    "holder": task_holder,
    "localize": task_localize,
    "dual-spectrum": task_dual_spectrum,
    "jensen": task_jensen,
    "haro-puig": task_haro_puig,
    "dominated": task_dominated,
    "center": task_center,
    "rotation": task_rotation,
    "duality-check": task_duality_check,
    "truncation-study": task_truncation_study,
    "bloch": task_bloch,
}
