"""Acceptance criteria: one PASS/FAIL line per criterion, collected in the terminal summary."""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, corpus
from torsor.complex import (
    HilbertComplex,
    betti_numbers,
    closed_spectrum,
    coclosed_spectrum,
    euler_characteristic,
    heat_invariants,
    laplacian_spectrum,
    log_torsion,
    log_torsion_det,
    random_complex,
    random_gram,
    random_invertible,
    tensor_product,
)
from torsor.gluing import (
    finite_difference_check,
    gluing_residuals,
    one_sided_quotients,
    random_gluing,
    sweep,
    theta_complex,
    theta_grid,
)
from torsor.model import interval_zeta_prime_zero, IntervalSpectrum, cylinder_torsion, tan_integral, verify_zeta_constants
from torsor.sequences import ChainMap, chain_iso_transfer, milnor_residual, random_ses
from torsor.simplicial import circle, cochain_complex, interval, split

ANGLES = (math.pi / 8, math.pi / 4, 3 * math.pi / 8)
GLUING_DIMS = [((1, 2, 2), (2, 3, 1), (1, 2, 2)), ((1, 2, 1), (2, 3, 1), (1, 2, 2)), ((2, 1, 0), (1, 3, 2), (2, 2, 1))]


def verdict(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def complexes():
    return corpus()


def test_two_method_torsion(complexes):
    start = time.perf_counter()
    worst = max(log_torsion(c).residual / (1 + abs(log_torsion(c).value)) for c in complexes)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 5.0 and len(complexes) >= 50
    verdict("two-method torsion", ok, f"{len(complexes)} complexes, worst relative gap {worst:.2e} (< 1e-9), {elapsed:.2f} s (< 5 s)")


def test_mckean_singer(complexes):
    worst = max(
        abs(heat_invariants(c, t).alternating_sum - euler_characteristic(c)) for c in complexes for t in (0.1, 1.0, 10.0)
    )
    verdict("McKean-Singer", worst < 1e-10, f"worst {worst:.2e} (< 1e-10) at t in 0.1, 1, 10")


def test_closed_coclosed(complexes):
    match = 0.0
    heat = 0.0
    for c in complexes:
        for j in range(c.length):
            cl, ccl = np.sort(closed_spectrum(c, j + 1)), np.sort(coclosed_spectrum(c, j))
            if cl.shape != ccl.shape:
                match = math.inf
            elif cl.size:
                match = max(match, float(np.abs(cl - ccl).max() / max(1.0, cl.max())))
        betti = betti_numbers(c)
        for t in (0.1, 1.0, 10.0):
            lhs = sum((-1) ** j * j * (np.exp(-t * laplacian_spectrum(c, j)).sum() - betti[j]) for j in c.degrees())
            cl = sum((-1) ** j * np.exp(-t * closed_spectrum(c, j)).sum() for j in c.degrees())
            ccl = sum((-1) ** j * np.exp(-t * coclosed_spectrum(c, j)).sum() for j in c.degrees())
            heat = max(heat, abs(lhs - cl), abs(cl + ccl))
    ok = match < 1e-10 and heat < 1e-10
    verdict("closed/coclosed spectra", ok, f"spectral mismatch {match:.2e}, heat identity {heat:.2e} (< 1e-10)")


def test_milnor():
    res = []
    for seed in range(30):
        s = random_ses((1, 3, 4, 2), (2, 4, 3, 1), seed=seed, random_grams=seed % 2 == 1)
        res.append(milnor_residual(s))
    for seed in range(10):
        s = random_ses((2, 3, 2), (1, 3, 3), seed=100 + seed, alpha_scale=2.0, beta_scale=0.5 + seed / 4)
        res.append(milnor_residual(s))
    worst = max(res)
    verdict("Milnor identity", worst < 1e-8, f"{len(res)} sequences (10 with non-isometric maps), worst {worst:.2e} (< 1e-8)")


def test_chain_iso_transfer():
    rng = np.random.default_rng(25)
    res = []
    for i in range(20):
        c = random_complex((1, 3, 3, 1), seed=i, random_grams=True)
        f = [random_invertible(n, rng) for n in c.dims]
        target = HilbertComplex.build(
            [f[j + 1] @ c.diffs[j] @ np.linalg.inv(f[j]) for j in range(len(c.diffs))],
            [random_gram(n, rng) for n in c.dims],
            c.dims,
        )
        res.append(chain_iso_transfer(ChainMap.build(c, target, f)))
    worst = max(res)
    verdict("chain isomorphism transfer", worst < 1e-8, f"{len(res)} isomorphisms, worst {worst:.2e} (< 1e-8)")


def test_tensor_product():
    res = []
    for i in range(10):
        c1 = random_complex((1, 3, 2), seed=100 + i, random_grams=True)
        c2 = random_complex((2, 2, 1), seed=200 + i, random_grams=True)
        t = tensor_product(c1, c2)
        chi1, chi2 = euler_characteristic(c1), euler_characteristic(c2)
        res.append(abs(log_torsion_det(t) - chi1 * log_torsion_det(c2) - chi2 * log_torsion_det(c1)))
    worst = max(res)
    verdict("tensor product", worst < 1e-8, f"{len(res)} pairs, worst {worst:.2e} (< 1e-8)")


def test_theta_derivatives():
    start = time.perf_counter()
    worst, ratios = 0.0, []
    for seed in range(3):
        for dims in GLUING_DIMS:
            for iso in (True, False):
                g = random_gluing(*dims, seed=seed, isometric=iso)
                for th in ANGLES:
                    a = finite_difference_check(g, th, 1e-4)
                    worst = max(worst, a.worst)
                    coarse = finite_difference_check(g, th, 2e-3).worst
                    fine = finite_difference_check(g, th, 1e-3).worst
                    ratios.append(coarse / fine)
    rows = sweep(random_gluing((1, 2, 1), (2, 3, 1), (1, 2, 2), seed=7), theta_grid(1e-3, math.pi / 2 - 1e-3, 33))
    sweep_worst = max(max(r["res_ha7"], r["res_ha8"], r["res_ha9"]) for r in rows)
    elapsed = time.perf_counter() - start
    lo, hi = min(ratios), max(ratios)
    ok = worst < 1e-6 and sweep_worst < 1e-6 and 3.0 < lo and hi < 5.0 and elapsed < 30.0
    verdict(
        "theta derivatives",
        ok,
        f"h=1e-4 worst {worst:.2e} (< 1e-6), halving ratio {lo:.2f}..{hi:.2f} (about 4), "
        f"33-point sweep worst {sweep_worst:.2e}, {elapsed:.1f} s (< 30 s)",
    )


def test_gluing_identities():
    ha11 = max(
        gluing_residuals(random_gluing(*d, seed=s, isometric=False), 1.0, ["ha11"]).residuals["ha11"]
        for s in range(5) for d in GLUING_DIMS
    )
    ha12 = ha13 = corr = 0.0
    tau_b = 0.0
    for s in range(5):
        for d in GLUING_DIMS:
            g = random_gluing(*d, seed=s)
            for th in (0.4, math.pi / 4, 1.2):
                r = gluing_residuals(g, th, ["ha12", "ha13"])
                ha12, ha13 = max(ha12, r.residuals["ha12"]), max(ha13, r.residuals["ha13"])
                tau_b = max(tau_b, abs(r.terms["log_tau_B"]))
            r = gluing_residuals(g, math.pi / 4, ["ha13"])
            corr = max(corr, abs(r.terms["ha13_correction"] + 0.5 * math.log(2) * r.terms["chi_B"]))
    ok = max(ha11, ha12, ha13) < 1e-8 and corr < 1e-10
    verdict(
        "gluing identities",
        ok,
        f"ha11 {ha11:.2e}, ha12 {ha12:.2e} (largest |log tau(B)| {tau_b:.2e}), ha13 {ha13:.2e} (< 1e-8); "
        f"pi/4 correction {corr:.2e} (< 1e-10)",
    )


def test_differentiable_at_zero():
    gaps = {}
    for les in ("ha4", "ha5"):
        for s in range(3):
            for d in GLUING_DIMS:
                for iso in (True, False):
                    q = one_sided_quotients(random_gluing(*d, seed=s, isometric=iso), (1e-2, 1e-3, 1e-4), les)
                    key = (les, iso)
                    gaps[key] = max(gaps.get(key, 0.0), abs(q[0] - q[1]), abs(q[1] - q[2]))
    worst = max(gaps.values())
    detail = ", ".join(f"{les}{'' if iso else ' non-isometric'} {v:.2e}" for (les, iso), v in sorted(gaps.items()))
    verdict("one-sided quotients at 0", worst < 1e-3, f"worst successive gap {detail} (< 1e-3)")


def test_simplicial_gluing():
    cases = {"interval": (interval(3), [(1,)]), "circle": (circle(6), [(0,), (3,)])}
    worst, same = 0.0, True
    for k, interface in cases.values():
        g = split(k, k.subcomplex(interface))
        worst = max(worst, gluing_residuals(g, math.pi / 4, ["ha12"]).residuals["ha12"])
        same &= betti_numbers(theta_complex(g, math.pi / 4).compressed) == betti_numbers(cochain_complex(k))
    circ = abs(log_torsion_det(cochain_complex(circle(3))) - math.log(3))
    ok = worst < 1e-8 and same and circ < 1e-10
    verdict("simplicial gluing", ok, f"ha12 {worst:.2e} (< 1e-8), betti preserved {same}, circle torsion error {circ:.2e} (< 1e-10)")


def test_model_constants():
    zp = max(abs(interval_zeta_prime_zero(IntervalSpectrum(L)) + math.log(2 * L)) for L in (0.5, 1.0, 2.0))
    em = max(verify_zeta_constants().values())
    slope = 0.0
    for b in (cochain_complex(interval(2)), cochain_complex(circle(3)), HilbertComplex.build([], dims=[2])):
        eps = (0.25, 1.0, 3.0)
        xs, ys = [math.log(2 * e) for e in eps], [cylinder_torsion(b, e) for e in eps]
        fit = np.polyfit(xs, ys, 1)
        slope = max(slope, abs(fit[0] - 0.5 * euler_characteristic(b)), np.abs(np.polyval(fit, xs) - ys).max())
    quad = abs(tan_integral() + 0.5 * math.log(2))
    ok = zp < 1e-10 and em < 1e-10 and slope < 1e-12 and quad < 1e-10
    verdict(
        "model constants",
        ok,
        f"zeta'(0) {zp:.2e}, Euler-Maclaurin {em:.2e}, cylinder slope/fit {slope:.2e}, tan quadrature {quad:.2e}",
    )
