"""Acceptance gate: the twelve release criteria at their pinned tolerances.

Each test records exactly one pass/fail line, echoed in the terminal summary.
"""

import numpy as np
import pytest
from scipy.linalg import eigh

from gluecert import (
    GluingParams,
    PiecewiseC1Scalar,
    SamplingPlan,
    assemble_glued,
    certify,
    diameter_estimate,
    epsilon_nu_search,
    make_diagonal_torus,
    make_warped_product,
    mirror_collar,
    mollify_c1,
    rate_suite,
    round_sphere_chart,
    smooth_glued,
    spline_family,
)
from gluecert.curvature import k_positive_sum
from gluecert.gluing import default_x_samples
from gluecert.scalars import affine, constant, polynomial
from gluecert.scenarios import list_shipped, load_scenario, shipped_scenario_dir
from gluecert.verifier import (
    almost_nonneg_check,
    gauss_check,
    totally_geodesic_check,
)

FAST_PLAN = SamplingPlan(
    x_per_axis=2, t_per_region=3, directions=64, refine_rounds=1, refine_directions=32
)
EPS_LADDER = (0.1, 0.05, 0.025, 0.0125)


def _random_xs(section, count, rng):
    lo, hi = section.lo, section.hi
    pad = 0.05 * (hi - lo)
    return lo + pad + rng.random((count, lo.shape[0])) * (hi - lo - 2 * pad)


def test_criterion_01_spline_exactness_on_product_collars(acceptance):
    rng = np.random.default_rng(1)
    worst = 0.0
    pairs = [
        make_diagonal_torus([constant(1.0), constant(2.0)], (-0.5, 0.0), side="left"),
        make_warped_product(constant(1.5), 4, (-0.5, 0.0), side="left"),
    ]
    for h1 in pairs:
        h2 = mirror_collar(h1)
        fam = spline_family(h1, h2, 0.1)
        xs = _random_xs(h1.section, 25, rng)
        ts = np.linspace(-0.1, 0.1, 20)
        for x in xs:  # 2 * 25 * 20 = 10^3 sampled (x, t)
            h = h1.value(x, 0.0)
            for t in ts:
                worst = max(worst, float(np.max(np.abs(fam.g(x, float(t)) - h))))
                worst = max(worst, float(np.max(np.abs(fam.g1(x, float(t))))))
                worst = max(worst, float(np.max(np.abs(fam.g2(x, float(t))))))
    ok = worst <= 1e-12
    acceptance(1, "spline exactness on product collars", ok, f"max dev {worst:.2e}")
    assert ok


def test_criterion_02_c1_interface_every_shipped_scenario(acceptance):
    worst = 0.0
    for name in list_shipped():
        sc = load_scenario(shipped_scenario_dir() / f"{name}.json")
        h1, h2 = sc.build_collars()
        eps = sc.params.eps if sc.params else 0.25 * min(h1.depth, h2.depth)
        fam = spline_family(h1, h2, eps)
        for x in default_x_samples(h1.section):
            worst = max(worst, float(np.max(np.abs(fam.g(x, -eps) - h1.value(x, -eps)))))
            worst = max(worst, float(np.max(np.abs(fam.g(x, eps) - h2.value(x, eps)))))
            worst = max(worst, float(np.max(np.abs(fam.g1(x, -eps) - h1.d1(x, -eps)))))
            worst = max(worst, float(np.max(np.abs(fam.g1(x, eps) - h2.d1(x, eps)))))
    ok = worst <= 1e-12
    acceptance(2, "C1 interface match for all shipped scenarios", ok, f"max dev {worst:.2e}")
    assert ok


def test_criterion_03_rate_suite_slopes(acceptance, generic_pair):
    h1, h2 = generic_pair
    reports = rate_suite(h1, h2, EPS_LADDER)
    ok = True
    details = []
    for r in reports:
        if r.note == "below noise floor":
            details.append(f"{r.name}: below noise floor")
            continue
        if r.classification == "O(eps)":
            ok &= 0.8 <= r.slope <= 1.2
        elif r.classification == "O(1)":
            ok &= abs(r.slope) <= 0.2
        else:
            ok &= r.passed
        details.append(f"{r.name}: slope {r.slope:.2f}")
    acceptance(3, "interpolation rate suite", ok, "; ".join(details))
    assert ok


def test_criterion_04_gauss_consistency(acceptance, generic_pair):
    h1, h2 = generic_pair
    fam = spline_family(h1, h2, 0.05)
    out = gauss_check(fam, n_planes=100)
    below_floor = min(out["order_residuals"]) < 1e-8
    ok = out["max_residual"] <= 1e-6 and (out["fitted_order"] >= 1.9 or below_floor)
    detail = f"residual {out['max_residual']:.2e}" + (
        ", identity holds below the finite-difference noise floor" if below_floor else ""
    )
    acceptance(4, "Gauss relation on tangential planes", ok, detail)
    assert ok


def test_criterion_05_convexity_kernel(acceptance, hemisphere_pair, generic_pair):
    rng = np.random.default_rng(5)
    cone = make_warped_product(affine(1.0, 0.5), 4, (-0.8, 0.0), side="left")
    strict_pairs = [hemisphere_pair, generic_pair, (cone, mirror_collar(cone))]
    worst = np.inf
    for h1, h2 in strict_pairs:
        eps = 0.1
        fam = spline_family(h1, h2, eps)
        m = h1.m
        xs = _random_xs(h1.section, 10, rng)
        for _ in range(1000):  # 10^3 random (u, v) pairs per scenario
            x = xs[rng.integers(len(xs))]
            u = rng.standard_normal(m)
            v = rng.standard_normal(m)
            t0 = float(rng.uniform(-0.85 * eps, 0.85 * eps))
            s = 0.05 * eps

            def phi_bar(t):
                hb = fam.linear_d1_model(x, t)
                return (u @ hb @ u) * (v @ hb @ v) - (u @ hb @ v) ** 2

            second_diff = phi_bar(t0 - s) - 2.0 * phi_bar(t0) + phi_bar(t0 + s)
            worst = min(worst, second_diff)
    ok = worst >= -1e-12
    acceptance(5, "convexity of the interpolated-form determinant", ok, f"min 2nd diff {worst:.2e}")
    assert ok


def test_criterion_06_k_eigensum_frame_trace_oracle(acceptance):
    rng = np.random.default_rng(6)
    max_eq_err = 0.0
    min_slack = np.inf
    for _ in range(100):
        a = rng.standard_normal((5, 5))
        form = a + a.T
        w, vecs = np.linalg.eigh(form)
        for k in range(1, 6):
            s_k = k_positive_sum(form, k)
            # equality at the eigenvector frame of the k smallest eigenvalues
            vk = vecs[:, :k]
            max_eq_err = max(max_eq_err, abs(s_k - float(np.trace(vk.T @ form @ vk))))
            # lower bound over random orthonormal k-frames (20 per matrix and k)
            for _ in range(20):
                q, _ = np.linalg.qr(rng.standard_normal((5, k)))
                min_slack = min(min_slack, float(np.trace(q.T @ form @ q)) - s_k)
    ok = max_eq_err <= 1e-10 and min_slack >= -1e-12
    acceptance(
        6,
        "k-eigensum lower-bounds frame traces",
        ok,
        f"equality err {max_eq_err:.2e}, min slack {min_slack:.2e}",
    )
    assert ok


def test_criterion_07_hemisphere_double_end_to_end(acceptance, hemisphere_pair):
    h1, h2 = hemisphere_pair
    res = epsilon_nu_search(h1, h2, "RicK", 1, kappa=0.0, plan=FAST_PLAN)
    ok = res.status == "pass" and res.certificate_smooth.min_value > 0.0
    detail = f"status {res.status}"
    if ok:
        # margin stability under grid doubling on the certified smooth metric
        gm = assemble_glued(h1, h2, res.params)
        sg = smooth_glued(gm, res.params.nu, res.params.mu)
        fine = certify(sg.chart, "RicK", 1, kappa=0.0, plan=FAST_PLAN.scaled(2))
        base = res.certificate_smooth.min_value
        ok = fine.passed and abs(fine.min_value - base) <= 0.2 * abs(base)
        detail = f"min {base:.5f}, doubled-grid min {fine.min_value:.5f}"
    acceptance(7, "hemisphere double certifies K > 0 end to end", ok, detail)
    assert ok


def test_criterion_08_positive_and_unreachable_floors(acceptance, hemisphere_pair):
    h1, h2 = hemisphere_pair
    res_half = epsilon_nu_search(h1, h2, "RicK", 1, kappa=0.5, plan=FAST_PLAN)
    ok_half = res_half.status == "pass" and res_half.certificate_smooth.min_value > 0.5
    res_two = epsilon_nu_search(
        h1, h2, "RicK", 1, kappa=2.0, eps_min=0.01, plan=FAST_PLAN
    )
    ok_two = res_two.status == "inconclusive"
    ok = ok_half and ok_two
    acceptance(
        8,
        "floor 0.5 certifies, floor 2 stays inconclusive",
        ok,
        f"kappa=0.5: {res_half.status}; kappa=2: {res_two.status}",
    )
    assert ok


def test_criterion_09_mirror_double_totally_geodesic(acceptance, hemisphere_pair):
    h1, h2 = hemisphere_pair
    out = totally_geodesic_check(
        h1, h2, GluingParams(eps=0.05, iota=0.3, nu=0.01, mu=1e-3), sym_tol=1e-10
    )
    ok = out["passed"] and out["symmetry_deviation"] <= 1e-10 and out["ii_at_zero"] <= 1e-8
    acceptance(
        9,
        "mirror double is t-symmetric with vanishing II",
        ok,
        f"sym dev {out.get('symmetry_deviation', 1):.1e}, II {out.get('ii_at_zero', 1):.1e}",
    )
    assert ok


def test_criterion_10_smoothing_contract_canonical_scalar(acceptance):
    h = PiecewiseC1Scalar(constant(0.0), polynomial([0.0, 0.0, 1.0]))
    nu, mu = 0.1, 0.01
    sm = mollify_c1(h, nu, mu)
    ts = np.linspace(-nu, nu, 801)
    c1_dist = max(
        float(np.max(np.abs(sm.f(ts) - h.f(ts)))),
        float(np.max(np.abs(sm.d1(ts) - h.d1(ts)))),
    )
    d2 = sm.d2(ts)
    ok = c1_dist <= 0.01 and float(np.min(d2)) >= -0.01 and float(np.max(d2)) <= 2.01
    acceptance(
        10,
        "smoothing keeps the C1 budget and d2 interval",
        ok,
        f"C1 dist {c1_dist:.2e}, d2 in [{np.min(d2):.4f}, {np.max(d2):.4f}]",
    )
    assert ok


def test_criterion_11_two_eps_ricci_spectrum_limit(acceptance, generic_pair):
    h1, h2 = generic_pair
    reports = rate_suite(h1, h2, (0.01, 0.004, 0.002, 0.001))
    rep = next(r for r in reports if r.name == "two_eps_ric_spectrum")
    # relative deviation at eps = 1e-3 against the predicted spectrum scale
    scale = 0.0
    for x in default_x_samples(h1.section, per_axis=2):
        p = h1.d1(x, 0.0) - h2.d1(x, 0.0)
        lam = 0.5 * np.sort(eigh(p, h1.value(x, 0.0), eigvals_only=True))
        scale = max(scale, float(np.max(np.abs(np.concatenate([lam, [np.sum(lam)]])))))
    rel = rep.deviations[-1] / scale
    ok = rep.passed and rel <= 0.10
    acceptance(
        11,
        "2*eps*Ric spectrum converges to its predicted limits",
        ok,
        f"relative deviation {rel:.3f} at eps=1e-3",
    )
    assert ok


def test_criterion_12_almost_nonnegativity_and_diameter(acceptance):
    h1 = make_warped_product(affine(1.0, 0.5), 4, (-0.8, 0.0), side="left")
    h2 = mirror_collar(h1)
    out = almost_nonneg_check(h1, h2, "RicK", 3, delta=0.1, resolution=6, plan=FAST_PLAN)
    d_sphere = diameter_estimate(round_sphere_chart(4), resolution=6)
    diam_ok = abs(d_sphere - np.pi) <= 0.1 * np.pi
    ok = out["passed"] and diam_ok
    acceptance(
        12,
        "almost-nonnegative double and sphere diameter",
        ok,
        f"min*diam^2 {out.get('min_times_diam2', float('nan')):.4f} >= -0.1; "
        f"S4 diameter {d_sphere:.3f} vs pi",
    )
    assert ok
