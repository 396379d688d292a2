"""Command-line scenario runner.

Subcommands: run, list, describe, rates, certify.  Exit codes: 0 all checks
passed, 1 any check failed, 2 an Inconclusive outcome is present, 3 input or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chart import round_sphere_chart
from .curvature import FDConfig, SamplingPlan, curvature_at, min_ric_k_at_point, sc_k_at_point
from .errors import GluecertError
from .gluing import (
    assemble_glued,
    boundary_condition_check,
    c0_glued_chart,
    spline_family,
)
from .scenarios import (
    KNOWN_CHECKS,
    Scenario,
    list_shipped,
    load_scenario,
    resolve_scenario_path,
)
from .smoothing import smooth_glued
from .verifier import (
    almost_nonneg_check,
    certify,
    diameter_estimate,
    epsilon_nu_search,
    eta_frame_report,
    gauss_check,
    interpolation_bound_check,
    rate_suite,
    totally_geodesic_check,
)

SCHEMA_VERSION = 1

CHECK_DESCRIPTIONS = {
    "boundary": (
        "Strict positivity of h1'(0) - h2'(0), the sum of the two boundary "
        "second fundamental forms up to a factor of 2.  For RicK the smallest "
        "eigenvalue must be positive; for ScK the sum of the k' smallest "
        "eigenvalues in a boundary-orthonormal basis, where k' = k for "
        "k <= n-2 and k' = k-1 otherwise."
    ),
    "certify_c1": (
        "Grid certification of Ric_k > kappa (or Sc_k > kappa) for the C^1 "
        "spline-glued metric, reporting the sampled minimum, its witness and "
        "per-region minima."
    ),
    "smooth_certify": (
        "The same certification after the two C^1 interfaces are mollified "
        "into C-infinity bands within the stated C^1 budget."
    ),
    "search": (
        "Halving search over the spline half-width epsilon, then over the "
        "smoothing band nu, for parameters whose certificates clear kappa.  "
        "Reaching a floor yields Inconclusive, which refutes nothing: the "
        "underlying statements are existential in epsilon."
    ),
    "rates": (
        "Empirical rate suite for the interpolation asymptotics: the spline "
        "deviates from the boundary metric at order epsilon, its first "
        "derivative follows the linear interpolation of the collar "
        "derivatives at order epsilon, its second derivative stays within "
        "O(1) of -(h1'(0)-h2'(0))/(2 eps), the mixed Ricci term Ric(u, dt) "
        "stays bounded, and the spectrum of 2 eps Ric approaches half the "
        "h(0)-eigenvalues of h1'(0) - h2'(0) together with half their sum."
    ),
    "gauss": (
        "Consistency of ambient sectional curvature on tangential planes "
        "with the Gauss relation: intrinsic slice curvature minus "
        "(II(u,u)II(v,v) - II(u,v)^2) / area^2, where II = -g_t'/2."
    ),
    "interpolation_bound": (
        "Convex-combination lower bound: tangential curvature sums of the "
        "spline dominate the t-weighted average of the two boundary sums up "
        "to a violation vanishing at order epsilon."
    ),
    "eta": (
        "Frames orthonormal for the spline metric are nearly orthonormal for "
        "the boundary metric; the Gram deviation eta(eps) must vanish at "
        "order at least 0.8."
    ),
    "totally_geodesic": (
        "For mirror pairs the glued and smoothed metric is even in t and the "
        "central hypersurface t=0 is totally geodesic (II vanishes)."
    ),
    "almost_nonneg": (
        "Almost-nonnegativity at budget delta: certify curvature above "
        "kappa = -delta / (2 d^2) with d the graph diameter of the raw C^0 "
        "union, then check min curvature x d^2 >= -delta."
    ),
    "diameter": (
        "Graph-geodesic diameter estimate of a chart: k-nearest-neighbor "
        "graph with metric edge lengths plus long-range straight-chord "
        "edges; always an overestimate of the true diameter."
    ),
}


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    return obj


def _output_dir(scenario: Scenario) -> Path:
    root = Path(os.environ.get("GLUECERT_OUTPUT_ROOT", "reports"))
    out = root / scenario.output
    out.mkdir(parents=True, exist_ok=True)
    return out


def _status(passed: bool) -> str:
    return "pass" if passed else "fail"


def _run_check(spec, scenario: Scenario, h1, h2, state: dict):
    """Execute one check; returns (status, detail)."""
    name, opts = spec.check, spec.options
    mode, k, kappa = scenario.mode, scenario.k, scenario.kappa
    plan, fd = scenario.plan, scenario.fd

    if name == "boundary":
        detail = boundary_condition_check(h1, h2, mode, k)
        return _status(detail["satisfied"]), detail

    if name == "certify_c1":
        if scenario.params is None:
            raise GluecertError("certify_c1 needs explicit params in the scenario")
        gm = assemble_glued(h1, h2, scenario.params)
        state["glued"] = gm
        cert = certify(gm.chart, mode, k, kappa, plan, fd)
        state["chart"] = gm.chart
        return _status(cert.passed), cert.to_dict()

    if name == "smooth_certify":
        if scenario.params is None:
            raise GluecertError("smooth_certify needs explicit params in the scenario")
        gm = state.get("glued") or assemble_glued(h1, h2, scenario.params)
        sg = smooth_glued(gm, scenario.params.nu, scenario.params.mu)
        cert = certify(sg.chart, mode, k, kappa, plan, fd)
        state["chart"] = sg.chart
        detail = cert.to_dict()
        detail["rho_left"], detail["rho_right"] = sg.rho_left, sg.rho_right
        return _status(cert.passed), detail

    if name == "search":
        result = epsilon_nu_search(
            h1,
            h2,
            mode,
            k,
            kappa=kappa,
            eps_max=opts.get("eps_max"),
            eps_min=opts.get("eps_min", 1e-3),
            mu=opts.get("mu", 1e-3),
            plan=plan,
            cfg=fd,
        )
        return result.status if result.status == "pass" else "inconclusive", result.to_dict()

    if name == "rates":
        reports = rate_suite(h1, h2, scenario.eps_list, cfg=fd)
        state["rates"] = reports
        return _status(all(r.passed for r in reports)), [r.to_dict() for r in reports]

    if name == "gauss":
        eps = opts.get("eps", scenario.params.eps if scenario.params else scenario.eps_list[0])
        fam = spline_family(h1, h2, float(eps))
        detail = gauss_check(fam, n_planes=int(opts.get("planes", 100)), cfg=fd)
        tol = float(opts.get("tol", 1e-6))
        ok = detail["max_residual"] <= tol and (
            detail["fitted_order"] >= 1.9 or min(detail["order_residuals"]) < 1e-8
        )
        return _status(ok), detail

    if name == "interpolation_bound":
        detail = interpolation_bound_check(h1, h2, scenario.eps_list, cfg=fd)
        return _status(detail["passed"]), detail

    if name == "eta":
        detail = eta_frame_report(h1, h2, scenario.eps_list)
        return _status(detail["passed"]), detail

    if name == "totally_geodesic":
        if scenario.params is None:
            raise GluecertError("totally_geodesic needs explicit params in the scenario")
        detail = totally_geodesic_check(h1, h2, scenario.params)
        return _status(detail["passed"]), detail

    if name == "almost_nonneg":
        delta = float(
            opts.get("delta", scenario.params.delta if scenario.params else 0.1)
        )
        detail = almost_nonneg_check(
            h1,
            h2,
            mode,
            k,
            delta,
            resolution=int(opts.get("resolution", 6)),
            plan=plan,
            cfg=fd,
        )
        if detail.get("inconclusive"):
            return "inconclusive", detail
        return _status(detail["passed"]), detail

    if name == "diameter":
        which = opts.get("chart", "c0_glued")
        if which == "round_sphere":
            chart = round_sphere_chart(int(opts.get("n", 4)))
        elif which == "c0_glued":
            chart = c0_glued_chart(h1, h2, min(h1.depth, h2.depth))
        else:
            raise GluecertError(f"unknown diameter chart {which!r}")
        d = diameter_estimate(chart, resolution=int(opts.get("resolution", 6)))
        detail = {"diameter": d, "chart": which, "resolution": int(opts.get("resolution", 6))}
        if "target" in opts:
            target = float(opts["target"])
            tol = float(opts.get("rel_tol", 0.1))
            detail.update({"target": target, "rel_tol": tol})
            return _status(abs(d - target) <= tol * target), detail
        return "pass", detail

    raise GluecertError(f"unknown check {name!r}")


def _write_rates_csv(out: Path, reports):
    with open(out / "rates.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "eps", "deviation"])
        for r in reports:
            for e, d in zip(r.eps_list, r.deviations):
                w.writerow([r.name, f"{e:.10g}", f"{d:.10g}"])


def _write_profile_csv(out: Path, chart, scenario: Scenario):
    plan = SamplingPlan(
        x_per_axis=2, t_per_region=5, directions=64, refine_rounds=0
    )
    from .gluing import default_x_samples

    xs = default_x_samples(chart.section, per_axis=2)
    rows = []
    for region in chart.regions:
        width = region.t_hi - region.t_lo
        for t in np.linspace(region.t_lo + 0.05 * width, region.t_hi - 0.05 * width, 5):
            vals = []
            for x in xs:
                z = np.concatenate([x, [t]])
                cp = curvature_at(chart, z, scenario.fd)
                if scenario.mode == "RicK":
                    val, _ = min_ric_k_at_point(cp, scenario.k, plan)
                else:
                    val = sc_k_at_point(cp, scenario.k)
                vals.append(val)
            rows.append([region.name, f"{t:.10g}", f"{min(vals):.10g}"])
    with open(out / "curvature_profile.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["region", "t", "min_value"])
        w.writerows(rows)


def run_scenario(path, only_checks=None) -> int:
    scenario = load_scenario(path)
    h1, h2 = scenario.build_collars()
    out = _output_dir(scenario)

    checks = scenario.checks
    if only_checks is not None:
        checks = tuple(c for c in checks if c.check in only_checks)
        if not checks:
            raise GluecertError(
                f"scenario {scenario.name!r} declares none of the checks {sorted(only_checks)}"
            )

    state: dict = {}
    results = []
    for spec in checks:
        status, detail = _run_check(spec, scenario, h1, h2, state)
        results.append(
            {
                "check": spec.check,
                "expect": spec.expect,
                "status": status,
                "expectation_met": status == spec.expect,
                "detail": _json_safe(detail),
            }
        )
        print(f"[{scenario.name}] {spec.check}: {status} (expected {spec.expect})")

    statuses = [r["status"] for r in results]
    if any(s == "fail" for s in statuses):
        code = 1
    elif any(s == "inconclusive" for s in statuses):
        code = 2
    else:
        code = 0

    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario.name,
        "description": scenario.description,
        "mode": scenario.mode,
        "k": scenario.k,
        "kappa": scenario.kappa,
        "checks": results,
        "exit_code": code,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    meta = {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "package_version": __version__,
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    if "rates" in state:
        _write_rates_csv(out, state["rates"])
    if "chart" in state:
        _write_profile_csv(out, state["chart"], scenario)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gluecert",
        description="Certify intermediate curvature bounds of spline-glued collar metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run every check a scenario declares")
    p_run.add_argument("config", help="scenario file path or shipped scenario name")
    sub.add_parser("list", help="list shipped scenarios")
    p_desc = sub.add_parser("describe", help="explain a check")
    p_desc.add_argument("check")
    p_rates = sub.add_parser("rates", help="run only the rate suite of a scenario")
    p_rates.add_argument("config")
    p_cert = sub.add_parser("certify", help="run only the certification checks of a scenario")
    p_cert.add_argument("config")
    args = parser.parse_args(argv)

    try:
        if args.command == "list":
            for name in list_shipped():
                print(name)
            return 0
        if args.command == "describe":
            if args.check not in CHECK_DESCRIPTIONS:
                import difflib

                hint = difflib.get_close_matches(args.check, KNOWN_CHECKS, n=1)
                suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
                print(f"unknown check {args.check!r}{suggestion}", file=sys.stderr)
                return 3
            print(f"{args.check}: {CHECK_DESCRIPTIONS[args.check]}")
            return 0
        path = resolve_scenario_path(args.config)
        if args.command == "run":
            return run_scenario(path)
        if args.command == "rates":
            return run_scenario(path, only_checks={"rates"})
        if args.command == "certify":
            return run_scenario(path, only_checks={"boundary", "certify_c1", "smooth_certify"})
    except GluecertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 3


if __name__ == "__main__":
    sys.exit(main())
