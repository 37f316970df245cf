"""Reproducible experiment runners returning JSON-ready dictionaries.

Each runner corresponds to one CLI command and takes a validated config
dictionary.  Numbers are returned raw; pass/fail judgement is left to the
caller.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import (
    CoeffPolynomial,
    duality_matrix,
    kirillov_action_on_P,
    kirillov_field,
    l0_field,
    l0_from_pi,
    lie_bracket,
    omega_forms,
    omega_forms_closed,
    p_polynomials,
)
from .evolution import (
    DrivingFunction,
    EvolutionState,
    bracket_cross_check,
    build_L_nonpositive,
    closed_form_linear,
    conserved_virasoro,
    function_level_action,
    integrate,
    loewner_limit,
    parse_complex,
)
from .geodesics import (
    CotangentState,
    constant_u_geodesic,
    constant_u_numeric,
    geodesic_polynomials,
    integrate_geodesic,
    integrate_u_flow,
    state_from_momenta,
    substitute_geodesic,
)
from .series import TruncatedTaylor, reciprocal
from .sle import (
    Observable,
    SleParams,
    capacity_fit,
    charge_weight,
    deterministic_check,
    martingale_test,
    simulate_chordal,
)


def _poly_size(p: CoeffPolynomial) -> float:
    """Largest coefficient magnitude; 0 for the zero polynomial."""
    return max((abs(complex(c)) for c in p.terms.values()), default=0.0)


def complex_vector(values, n: int, name: str) -> np.ndarray:
    vals = [parse_complex(v) for v in values]
    if len(vals) != n:
        raise ValueError(f"{name} must have {n} entries, got {len(vals)}")
    return np.array(vals, dtype=complex)


def random_complex(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Standard complex normal entries (unit mean square modulus) times ``scale``."""
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)


# --------------------------------------------------------------------------
# algebra


def witt_report(n: int) -> dict:
    """Residuals of ``{L_m, L_k} - (k-m) L_{m+k}`` on trusted slots for ``m < k, m+k <= n``."""
    fields = [None] + [kirillov_field(j, n) for j in range(1, n + 1)]
    matrix = [[None] * n for _ in range(n)]
    pairs = []
    worst = 0.0
    for m in range(1, n + 1):
        for k in range(m + 1, n + 1 - m):
            br = lie_bracket(fields[m], fields[k])
            diff = br - fields[m + k].scale(k - m)
            upto = br.trusted
            res = max((_poly_size(c) for c in diff.components[:upto]), default=0.0)
            matrix[m - 1][k - 1] = res
            pairs.append({"m": m, "k": k, "trusted": upto, "residual": res})
            worst = max(worst, res)
    return {"n": n, "pairs": pairs, "matrix": matrix, "max_residual": worst,
            "n_pairs": len(pairs)}


def duality_report(n_p: int = 12, n_action: int = 10, n_omega: int = 10, n_l0: int = 8) -> dict:
    # P_k against an independent reciprocal of the symbolic f'
    P = p_polynomials(n_p)
    c = [CoeffPolynomial.variable(k, n_p) for k in range(1, n_p + 1)]
    fp = TruncatedTaylor([CoeffPolynomial.constant(1, n_p)] + [c[j - 1] * (j + 1) for j in range(1, n_p + 1)])
    R = reciprocal(fp)
    p_bad = [k for k in range(n_p + 1) if R[k] != P[k]]

    # L_k P_m = (m - 2k - 1) P_{m-k}
    Pa = p_polynomials(n_action)
    act_bad = []
    n_act = 0
    for k in range(1, n_action + 1):
        for m in range(k, n_action + 1):
            n_act += 1
            if kirillov_action_on_P(k, m, n_action) != Pa[m - k] * (m - 2 * k - 1):
                act_bad.append([k, m])

    om = omega_forms(n_omega)
    closed = omega_forms_closed(n_omega)
    M = duality_matrix(n_omega, om)
    dual_bad = [[i + 1, j + 1] for i in range(n_omega) for j in range(n_omega)
                if M[i][j] != (1 if i == j else 0)]
    routes_agree = all(a == b for a, b in zip(om, closed))

    expanded = l0_from_pi(n_l0)
    direct = l0_field(n_l0)
    cs = [CoeffPolynomial.variable(k, n_l0) for k in range(1, n_l0 + 1)]
    f = TruncatedTaylor([CoeffPolynomial.zero(n_l0), CoeffPolynomial.constant(1, n_l0)] + cs)
    zf = function_level_action(0, f)
    trusted = min(expanded.trusted, direct.trusted)
    l0_bad = [k for k in range(1, trusted + 1)
              if expanded[k] != direct[k] or expanded[k] != zf[k + 1]]
    return {
        "p_oracle": {"n": n_p, "mismatches": p_bad},
        "lk_action_on_p": {"n": n_action, "checked": n_act, "mismatches": act_bad},
        "omega": {"n": n_omega, "off_identity": dual_bad, "routes_agree": routes_agree},
        "l0_expansion": {"n": n_l0, "trusted": trusted, "mismatches": l0_bad},
    }


LEADING_TERMS = {
    0: {1: "c1", 2: "2*c2"},
    -1: {1: "-2*c1^2 + 3*c2"},
    -2: {1: "2*c1^3 - 6*c1*c2 + 5*c3"},
}


def lneg_report(n: int = 10, depth: int = 5, cross_k: int = 5) -> dict:
    """Generators ``L_0..L_{-depth}`` in canonical text, leading-term and cross-route checks."""
    Ls = build_L_nonpositive(n, depth)
    gens = {}
    for i, L in enumerate(Ls):
        gens[f"L_{-i}"] = {
            "trusted": L.trusted,
            "entries": {str(j): str(L.entry(j)) for j in range(1, L.trusted + 1)},
        }
    leading = {}
    for k, want in LEADING_TERMS.items():
        if -k <= depth:
            got = {j: str(Ls[-k].entry(j)) for j in want}
            leading[f"L_{k}"] = {"expected": want, "got": got, "match": got == want}
    cross = bracket_cross_check(n, cross_k) if cross_k <= n - 1 and cross_k >= 5 else None
    return {"n": n, "depth": depth, "generators": gens, "leading_terms": leading,
            "cross_route": {"k": cross_k, "agree": cross}}


# --------------------------------------------------------------------------
# Löwner-Kufarev flow


def _driver(cfg: dict) -> DrivingFunction:
    return DrivingFunction.from_json(cfg["driver"], order=cfg["n"])


def _initial_state(cfg: dict, with_momenta: bool) -> EvolutionState:
    n = cfg["n"]
    c0 = complex_vector(cfg["c0"], n, "c0") if cfg.get("c0") is not None else np.zeros(n, dtype=complex)
    if not with_momenta:
        return EvolutionState(0.0, c0)
    if cfg.get("psibar") is not None:
        psi = complex_vector(cfg["psibar"], n, "psibar")
    else:
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
    p0 = cfg.get("psibar0")
    return EvolutionState(0.0, c0, psi, parse_complex(p0) if p0 is not None else None)


def evolve_run(cfg: dict):
    """Integrate the flow; compare with the closed form when the driver is ``1 + p_1 z``."""
    p = _driver(cfg)
    n = cfg["n"]
    traj = integrate(_initial_state(cfg, True), p, cfg["t_end"], cfg["dt"], cfg["record_every"])
    out: dict = {"n": n, "t_end": cfg["t_end"], "dt": cfg["dt"], "c_final": traj.final.c}
    coeffs = p.coefficients(0.0)
    linear = p.kind == "constant" and np.all(coeffs[2:] == 0) and coeffs[0] == 1
    c0_zero = not np.any(traj.states[0].c)
    if linear and c0_zero:
        exact_c = closed_form_linear(coeffs[1], cfg["t_end"], n)
        out["closed_form"] = {"p1": coeffs[1], "max_abs_error": float(np.max(np.abs(traj.final.c - exact_c)))}
    if cfg.get("limit_T") is not None:
        cT, tail = loewner_limit(p, cfg["limit_T"], n, cfg.get("limit_dt") or cfg["dt"] * 10)
        lim: dict = {"T": cfg["limit_T"], "c": cT, "tail_estimate": tail}
        if linear:
            target = np.array([(-coeffs[1]) ** k for k in range(1, n + 1)])
            lim["max_abs_error_vs_limit"] = float(np.max(np.abs(cT - target)))
        out["limit"] = lim
    return out, traj


def conserve_run(cfg: dict) -> dict:
    """Conserved-quantity drifts at ``dt`` and at ``compare_dt`` plus their ratios."""
    p = _driver(cfg)
    state = _initial_state(cfg, True)
    runs = {}
    reports = {}
    for label, dt in (("fine", cfg["dt"]), ("coarse", cfg["compare_dt"])):
        traj = integrate(state, p, cfg["t_end"], dt, cfg["record_every"])
        rep = conserved_virasoro(traj)
        reports[label] = rep
        runs[label] = {"dt": dt, "quantities": rep.to_json()}
    ratios = {}
    for e in reports["fine"].entries:
        a = reports["coarse"][e.k].max_abs_drift
        b = e.max_abs_drift
        ratios[e.name] = a / b if b > 0 else (math.nan if a == 0 else math.inf)
    fine = reports["fine"]
    return {
        "n": state.n,
        "t_end": cfg["t_end"],
        "runs": runs,
        "drift_ratio": ratios,
        "max_rel_drift": max(e.max_rel_drift for e in fine.entries),
        "max_abs_drift": max(e.max_abs_drift for e in fine.entries),
    }


# --------------------------------------------------------------------------
# geodesics


def _geodesic_initial(cfg: dict) -> tuple[np.ndarray, np.ndarray]:
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    u0 = complex_vector(cfg["u0"], n, "u0") if cfg.get("u0") is not None else random_complex(rng, n)
    if cfg.get("c0") is not None:
        c0 = complex_vector(cfg["c0"], n, "c0")
    elif cfg.get("random_c0"):
        c0 = random_complex(rng, n, cfg["c0_scale"])
    else:
        c0 = np.zeros(n, dtype=complex)
    return u0, c0


def geodesic_run(cfg: dict):
    u0, c0 = _geodesic_initial(cfg)
    if cfg["system"] == "u-flow":
        ts, us = integrate_u_flow(u0, cfg["t_end"], cfg["dt"], cfg["record_every"])
        header = ["t"] + [f"{p}_u{k}" for k in range(1, len(u0) + 1) for p in ("re", "im")]
        rows = [[t] + [x for v in u for x in (v.real, v.imag)] for t, u in zip(ts, us)]
        E = np.sum(np.abs(us) ** 2, axis=1)
        extra: dict = {}
    else:
        s0 = state_from_momenta(np.conj(u0), c0)
        tr = integrate_geodesic(CotangentState(c0, s0.psibar), cfg["t_end"], cfg["dt"],
                                cfg["variant"], cfg["record_every"])
        header, rows = tr.csv_header(), tr.csv_rows()
        E = tr.energies()
        extra = {"c_final": tr.c[-1]}
    E0 = float(np.sum(np.abs(u0) ** 2))
    drift = float(np.max(np.abs(E - E0)))
    out = {"n": len(u0), "system": cfg["system"], "u0": u0, "energy0": E0,
           "max_abs_energy_drift": drift, "max_rel_energy_drift": drift / E0 if E0 else 0.0, **extra}
    return out, (header, rows)


def geodesic_const_run(cfg: dict) -> dict:
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    u0 = complex_vector(cfg["u0"], n, "u0") if cfg.get("u0") is not None else random_complex(rng, n)
    c0 = (complex_vector(cfg["c0"], n, "c0") if cfg.get("c0") is not None
          else random_complex(rng, n, cfg["c0_scale"]))
    polys = geodesic_polynomials(n)
    sym = constant_u_geodesic(c0, u0, cfg["s"], polys)
    num = constant_u_numeric(c0, u0, cfg["s"], cfg["ds"])
    zero = substitute_geodesic(polys, c0=[0] * n)
    return {
        "n": n,
        "s": cfg["s"],
        "u0": u0,
        "c0": c0,
        "symbolic": sym,
        "numeric": num,
        "max_abs_error": float(np.max(np.abs(sym - num))),
        "polynomials": [str(p) for p in polys],
        "polynomials_c0_zero": [str(p) for p in zero],
        "degrees_in_s": [p.degree(1) for p in polys],
    }


# --------------------------------------------------------------------------
# SLE


def sle_sim_run(cfg: dict, threads: int = 1):
    out: dict = {}
    csv_part = None
    if cfg.get("charge_table") is not None:
        table = []
        for k in cfg["charge_table"]:
            cw = charge_weight(k)
            table.append({"kappa": str(k), "c": str(cw.c), "h": str(cw.h)})
        out["charge_table"] = table
    if cfg.get("deterministic_check") is not None:
        d = cfg["deterministic_check"]
        chk = deterministic_check(parse_complex(d.get("z", [0.0, 2.0])), float(d.get("t_end", 1.0)),
                                  float(d.get("dt", 1e-3)))
        out["deterministic_check"] = chk.to_json()
    if cfg.get("capacity_t") is not None:
        t = float(cfg["capacity_t"])
        a = capacity_fit(t)
        out["capacity"] = {"t": t, "coefficient": a, "expected": 2 * t,
                           "rel_error": abs(a - 2 * t) / (2 * t) if t else abs(a)}
    if cfg.get("kappa") is not None:
        params = SleParams(cfg["kappa"], cfg["dt"], cfg["T"], cfg["n_paths"], cfg["seed"],
                           cfg["eps"], cfg["noise_scale"])
        z0 = parse_complex(cfg["z0"])
        ens = simulate_chordal(params, z0, cfg["record_every"], threads)
        cw = charge_weight(params.kappa)
        out["ensemble"] = {
            "kappa": str(params.kappa), "c": str(cw.c), "h": str(cw.h),
            "n_paths": params.n_paths, "swallowed_fraction": ens.swallowed_fraction,
            "max_im_increase": float(np.max(ens.max_im_increase)),
            "xi_final_mean": float(np.mean(ens.xi[:, -1])),
            "xi_final_stderr": float(np.std(ens.xi[:, -1], ddof=1) / math.sqrt(params.n_paths))
            if params.n_paths > 1 else math.inf,
        }
        header = ["path", "t", "re_k", "im_k", "xi", "alive"]
        rows = []
        for i in range(params.n_paths):
            for j, t in enumerate(ens.times):
                rows.append([i, t, ens.k[i, j].real, ens.k[i, j].imag, ens.xi[i, j],
                             1.0 if ens.swallowed_at[i] > t else 0.0])
        csv_part = (header, rows)
    return out, csv_part


def sle_martingale_run(cfg: dict, threads: int = 1) -> dict:
    params = SleParams(cfg["kappa"], cfg["dt"], cfg["T"], cfg["n_paths"], cfg["seed"], cfg["eps"])
    F = Observable.from_json(cfg["observable"])
    rep = martingale_test(F, params, parse_complex(cfg["z0"]), cfg["checkpoints"], threads)
    out = rep.to_json()
    out["observable"] = F.to_json()
    return out
