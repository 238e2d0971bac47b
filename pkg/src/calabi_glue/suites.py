"""Verification suites: each returns a :class:`Report` of named checks.

Tolerances live in ``DEFAULT_TOLERANCES``; callers override them by check name.
"""
from dataclasses import replace
from fractions import Fraction

import numpy as np

from . import gluing, indicial
from .calabi import (CalabiParams, ale_decay_fit, calabi_cartesian_chart,
                     monge_ampere_residual)
from .deform_ops import divergence, lichnerowicz_parts, o_closed, o_field, verify_omega_harmonic
from .obstruction import (assemble_sphere_integral, builtin, classify_wall, com8_coefficients,
                          contraction_ledger, gauge_tensor_H, lambda_normalized,
                          ledger_coefficients, obstruction_lambda_bruteforce,
                          obstruction_lambda_closed)
from .report import Check, Report
from .tensor_core import curvature

DEFAULT_TOLERANCES = {
    # calabi
    "monge_ampere": 1e-10,
    "ricci_flat": 1e-5,
    "ale_decay": 0.2,
    "o_trace": 1e-12,
    "o_divergence": 1e-5,
    "o_lichnerowicz": 1e-4,
    "omega_closed": 1e-6,
    "omega_coclosed": 1e-6,
    "omega_decay": 0.2,
    "omega_corrupted": 1e-2,
    # obstruction
    "gauge_bianchi": 1e-12,
    "gauge_trace": 1e-12,
    "ledger": 1e-10,
    "com8_assembly": 0.0,
    "oracle_agreement": 5e-3,
    # indicial
    "root_sum": 1e-12,
    "root_residual": 1e-12,
    "off_root_control": 1e-3,
    "coincidences": 0.0,
    # gluing
    "sweep_slope": 0.25,
    "counterterm_control": 0.0,
    "flat_rate": 0.25,
}


def tolerance(name, overrides=None):
    if overrides and name in overrides:
        return float(overrides[name])
    return DEFAULT_TOLERANCES[name]


def sample_ale_points(n, count, seed=0, r_range=(0.5, 5.0)):
    """Log-uniform radii in ``r_range`` along random unit directions of ``R^{2n}``."""
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(np.log(r_range[0]), np.log(r_range[1]), count))
    d = rng.standard_normal((count, 2 * n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return r[:, None] * d


# ---------------------------------------------------------------- calabi + deformation

def calabi_suite(n, points=30, seed=0, tolerances=None, report=None):
    params = CalabiParams(n)
    tol = lambda k: tolerance(k, tolerances)  # noqa: E731
    rep = report or Report("verify-calabi", {"n": n, "points": points, "seed": seed})
    sfx = "" if report is None else f"_n{n}"

    u = np.logspace(-3, 3, 1000)
    rep.add(Check("monge_ampere" + sfx, float(monge_ampere_residual(u, params).max()), tol("monge_ampere"),
                  detail="max |F'^(n-1)(F'+uF'')-1| over 1000 log-spaced u in [1e-3, 1e3]"))

    chart = calabi_cartesian_chart(params)
    pts = sample_ale_points(n, points, seed)
    ratios = []
    for x in pts:
        b = curvature(chart, x)
        ratios.append(b.norm_ricci() / b.norm_riemann())
    rep.add(Check("ricci_flat" + sfx, float(max(ratios)), tol("ricci_flat"),
                  detail=f"max |Ric|/|Rm| over {points} points, r in [0.5, 5]"))

    fit = ale_decay_fit(params, np.geomspace(2.0, 64.0, 12))
    rep.add(Check("ale_decay" + sfx, abs(fit.slope + 2 * n), tol("ale_decay"),
                  detail=f"fitted slope {fit.slope:.4f}, expected {-2 * n}"))

    of = o_field(params, chart)
    trs, divs, prel = [], [], []
    for x in pts:
        gi = np.linalg.inv(chart(x))
        trs.append(abs(np.einsum("ij,ij->", gi, o_closed(x, params))))
        dv = divergence(of, x)
        divs.append(float(np.sqrt(abs(dv @ gi @ dv))))
        lap, ring = lichnerowicz_parts(of, x)
        prel.append(np.abs(lap - ring).max() / max(np.abs(lap).max(), np.abs(ring).max()))
    rep.add(Check("o_trace" + sfx, float(max(trs)), tol("o_trace"), detail="max |tr_g o|"))
    rep.add(Check("o_divergence" + sfx, float(max(divs)), tol("o_divergence"), detail="max |δo|_g"))
    rep.add(Check("o_lichnerowicz" + sfx, float(max(prel)), tol("o_lichnerowicz"),
                  detail="max |P o| relative to its two terms"))

    om = verify_omega_harmonic(params, pts)
    rep.add(Check("omega_closed" + sfx, om["max_d"], tol("omega_closed"), detail="max |dΩ| / max |∂Ω|"))
    rep.add(Check("omega_coclosed" + sfx, om["max_delta"], tol("omega_coclosed"), detail="max |δΩ| / max |∇Ω|"))
    rep.add(Check("omega_decay" + sfx, abs(om["decay_slope"] - om["expected_slope"]), tol("omega_decay"),
                  detail=f"fitted slope {om['decay_slope']:.4f}, expected {om['expected_slope']:.0f}"))
    bad = verify_omega_harmonic(params, pts[: max(1, points // 5)], radial_coeff=n)
    rep.add(Check("omega_corrupted" + sfx, bad["max_d"], tol("omega_corrupted"), ">=",
                  detail="negative control: radial coefficient 1-n replaced by n must break dΩ = 0"))
    return rep


# ---------------------------------------------------------------- obstruction

def gauge_checks(data):
    """``(max |B_euc(H)|, max |H_iikl + Λ δ_kl|)``, both relative to ``max(1, max|H|)``."""
    h = gauge_tensor_H(data)
    scale = max(1.0, float(np.abs(h.coeffs).max()))
    b = float(np.abs(h.bianchi_euc()).max()) / scale
    tr = float(np.abs(h.trace_position() + data.lam * np.eye(data.m)).max()) / scale
    return b, tr


def ledger_error(data):
    """Largest ``|measured − closed|`` over the six contractions, relative to ``|Λ| + |⟨Rω,ω⟩| + max|closed|``."""
    led = contraction_ledger(data)
    scale = abs(data.lam) + abs(data.kahler_pairing())
    return max(abs(a - b) / max(scale, abs(b), 1e-300) for a, b in led.values())


def com8_mismatch(n):
    """0 when the exact assembly of the ledger coefficients gives ``((2−n)/2, −1/8)``."""
    got = assemble_sphere_integral(ledger_coefficients(n), n)
    return 0.0 if tuple(Fraction(v) for v in got) == com8_coefficients(n) else 1.0


def obstruction_suite(data, nodes=1_000_000, seed=0, tolerances=None, command="obstruction", config=None):
    tol = lambda k: tolerance(k, tolerances)  # noqa: E731
    rep = Report(command, config or {"label": data.label, "n": data.n, "nodes": nodes, "seed": seed})
    b, tr = gauge_checks(data)
    rep.add(Check("gauge_bianchi", b, tol("gauge_bianchi"), detail="max |B_euc(H)|"))
    rep.add(Check("gauge_trace", tr, tol("gauge_trace"), detail="max |H_iikl + Λ δ_kl|"))
    rep.add(Check("ledger", ledger_error(data), tol("ledger"), detail="tm1..tm6 against closed forms"))
    rep.add(Check("com8_assembly", com8_mismatch(data.n), tol("com8_assembly"),
                  detail="exact rational assembly of the ledger"))
    verdict = classify_wall(data)
    lam_closed = obstruction_lambda_closed(data)
    rep.results.update({
        "lambda": data.lam, "kahler_pairing": data.kahler_pairing(), "scalar": data.scalar,
        "wall_value": verdict.value, "classification": verdict.classification,
        "surface_integral_closed": lam_closed, "lambda_normalized": lambda_normalized(data),
    })
    if nodes:
        q = obstruction_lambda_bruteforce(data, nodes=nodes, seed=seed)
        rep.results.update({"surface_integral_bruteforce": q.value, "bruteforce_stderr": q.stderr})
        z = abs(q.value - lam_closed) / q.stderr if q.stderr > 0 else 0.0
        rep.add(Check("oracle_agreement", q.relative_error(lam_closed), tol("oracle_agreement"),
                      detail=f"|brute - closed| / integrand rms, z = {z:.2f}"))
    return rep


# ---------------------------------------------------------------- indicial

COINCIDENCES = ((("P0", "scalar"), ("P1", "normal"), ("P", "V2")),
                (("P1", "tangential"), ("P2", "mixed"), ("P", "V1")))


def indicial_suite(m, kinds=None, tolerances=None):
    tol = lambda k: tolerance(k, tolerances)  # noqa: E731
    kinds = tuple(kinds) if kinds else tuple(indicial.BRANCHES)
    rep = Report("indicial", {"m": m, "operators": list(kinds)})
    rows = indicial.root_table(m, kinds)
    rep.results["roots"] = rows
    sums, res, ctrl = [], [], []
    for row in rows:
        k, b = row["operator"], row["branch"]
        sums.append(abs(row["delta_plus"] + row["delta_minus"] - (m - 1)))
        for d in (row["delta_plus"], row["delta_minus"]):
            res.append(abs(indicial.model_ode_residual(k, b, d, 20.0, m)) / max(1.0, d * d))
        for d in (row["delta_plus"] + 0.5, row["delta_minus"] - 0.5):
            ctrl.append(abs(indicial.model_ode_residual(k, b, d, 20.0, m)))
    if "P" in kinds:
        ctrl.append(abs(indicial.model_ode_residual("P", "V2", m - 2, 20.0, m)))
    rep.add(Check("root_sum", max(sums), tol("root_sum"), detail="max |δ+ + δ- - (m-1)|"))
    rep.add(Check("root_residual", max(res), tol("root_residual"), detail="limiting ODE residual of e^{-δr} at roots"))
    rep.add(Check("off_root_control", min(ctrl), tol("off_root_control"), ">=",
                  detail="negative control: residual away from roots must be nonzero"))
    violated, notes = 0, []
    for group in COINCIDENCES:
        present = [g for g in group if g[0] in kinds]
        consts = {indicial.quadratic_constant(k, b, m) for k, b in present}
        if len(consts) > 1:
            violated += 1
        if len(present) > 1:
            notes.append(" = ".join(f"{k}-{b}" for k, b in present) + f" (constant {sorted(consts)[0]})")
    rep.results["coincidences"] = notes
    rep.add(Check("coincidences", float(violated), tol("coincidences"),
                  detail="exact equality of quadratic constants across operators"))
    return rep


# ---------------------------------------------------------------- gluing

GLUE_T = tuple(np.logspace(-4, -2.5, 5))


def glue_template(model, n, value=None, positions=(1.0,), directions=4, seed=0):
    data = builtin(model, n, value)
    return gluing.config_from_data(data, 1e-4, positions=tuple(positions), directions=directions, seed=seed)


def glue_suite(model, n, t_values=GLUE_T, positions=(1.0,), directions=4, seed=0,
               tolerances=None, value=None):
    tol = lambda k: tolerance(k, tolerances)  # noqa: E731
    template = glue_template(model, n, value, positions, directions, seed)
    rep = Report("glue-sweep", {"model": model, "n": n, "value": value, "t": [float(t) for t in t_values],
                                "positions": list(positions), "directions": directions, "seed": seed})
    sweep = gluing.residual_sweep(template, t_values)
    rep.results.update({"table": sweep.rows, "slope": sweep.slope, "slope_per_rho2": sweep.slope_per_rho2,
                        "c0": sweep.constant, "predicted_slope": sweep.predicted})
    rep.notes.extend(sweep.notes)
    if sweep.degenerate:
        rep.notes.append(f"degenerate: {sweep.degenerate}")
        rate = (n + 1) / 2
        rep.add(Check("flat_rate", abs(sweep.slope - rate), tol("flat_rate"),
                      detail=f"flat model residual decays like the ALE tail, t^{rate:g} (fitted {sweep.slope:.4f})"))
        return rep
    rep.add(Check("sweep_slope", abs(sweep.slope - sweep.predicted), tol("sweep_slope"),
                  detail=f"fitted {sweep.slope:.4f}, predicted {sweep.predicted}"))
    if template.lambda_obstruction:
        cfg = replace(template, t=float(t_values[len(t_values) // 2]))
        with_ct, without = gluing.counterterm_control(cfg)
        rep.results.update({"max_residual_with_counterterm": with_ct, "max_residual_without": without})
        rep.add(Check("counterterm_control", without - with_ct, tol("counterterm_control"), ">",
                      detail="negative control: dropping t λ χ_t o must increase the max core residual"))
    return rep
