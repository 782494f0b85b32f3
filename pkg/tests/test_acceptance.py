"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Tolerances and budgets are pinned here, not configurable.  Run with
``pytest tests/test_acceptance.py -v -s`` for the per-criterion lines.
"""

import json
import math
import re
import time

import numpy as np
import pytest

from enhanced_zeta import functional_eq, polyalg, specfun, zetanum
from enhanced_zeta.cli import main as cli_main
from enhanced_zeta.errors import NotOpenOrbitError
from enhanced_zeta.invariants import (
    ComplexPair,
    classify_orbit,
    enumerate_orbits,
    orbit_representative,
)
from enhanced_zeta.linalg import EnhancedPoint, GroupElement, group_action
from enhanced_zeta.zetanum import GaussianTestFn, NumericConfig


def announce(num: int, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


BS_PAIRS = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]


class TestCriterion01BernsteinSato:
    def test_exact_identities_and_kappa_stability(self):
        t0 = time.time()
        ok = True
        kappas = {}
        for n, d in BS_PAIRS:
            grid = polyalg.bs_check_grid(n, d, mmax=2)
            ok &= grid["ok"]
            kappas[(n, d)] = (grid["kappa"]["first"], grid["kappa"]["second"])
        elapsed = time.time() - t0
        ok &= elapsed <= 300.0
        ok &= all(k1 == 1 for (k1, _) in kappas.values())
        ok &= all(k2 == 4 ** d for (n, d), (_, k2) in kappas.items())
        announce(1, ok, f"exact quotients constant on all grids, kappa stable "
                        f"(first=1, second=4^d), {elapsed:.1f}s <= 300s")


class TestCriterion02P2Vanishing:
    def test_zero_polynomial_above_diagonal(self):
        ok = polyalg.expand_P2(1, 2).is_zero() and polyalg.expand_P2(2, 3).is_zero()
        announce(2, ok, "second invariant expands to the zero polynomial for d > n")


class TestCriterion03GindikinGamma:
    @pytest.mark.slow
    def test_mc_matches_closed_form(self):
        t0 = time.time()
        cfg = NumericConfig(samples=1_000_000, seed=2024)
        points = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.75), (1.0, 1.0)]
        ok = True
        worst = 0.0
        for k, (n, d) in enumerate(BS_PAIRS):
            for j, (a, b) in enumerate(points):
                est = zetanum.gamma_const_integral_mc(n, d, a, b, cfg,
                                                      seed_offset=10 * k + j)
                closed = specfun.gindikin_gamma(n, d, a, b)
                ok &= abs(est.value - closed) <= 3.0 * max(est.stderr, 1e-13 * abs(closed))
                ok &= est.stderr <= 0.01 * abs(closed)
                if est.stderr > 0:
                    worst = max(worst, abs(est.value - closed) / est.stderr)
        elapsed = time.time() - t0
        ok &= elapsed <= 600.0
        announce(3, ok, f"cone Laplace integral vs closed form: all pulls <= 3 "
                        f"(worst {worst:.2f}), stderr <= 1%, {elapsed:.0f}s <= 600s")


class TestCriterion04PhiCovariance:
    @pytest.mark.slow
    def test_ratio_tests(self):
        cfg = NumericConfig(samples=400_000, seed=5)
        rng = np.random.default_rng(3)
        ok = True
        for n, d, a, b in [(2, 1, 0.5, 0.5), (3, 2, 0.5, 0.25), (2, 2, 1.0, 0.5)]:
            x = rng.standard_normal((n, d))
            for res in zetanum.phi_covariance_check(n, d, a, b, x, cfg):
                ok &= res.passed
        announce(4, ok, "cone functional covariant under right GL(d) and left "
                        "orthogonal action, reduces to the gamma constant (3 sigma)")


class TestCriterion05Clerc:
    def test_quadrature_and_mc(self):
        psi = GaussianTestFn(1, 1, 1.0, math.pi)
        ok = True
        for a in (-0.4, -0.25, -0.1):
            r = zetanum.clerc_check(1, 1, a, psi, tol=1e-4)
            ok &= r.passed and r.rel_err <= 1e-4
        psi2 = GaussianTestFn(2, 1, 1.0, 1.2)
        cfg = NumericConfig(samples=600_000, seed=11)
        r = zetanum.clerc_check(2, 1, -0.5, psi2, cfg, tol=0.02, method="monte-carlo")
        ok &= abs(r.lhs - r.rhs) <= 3.0 * r.stderr
        announce(5, ok, "quadratic-map Fourier identity: 1e-4 by quadrature at "
                        "three exponents (n=1), 3 sigma by MC (n=2, d=1)")


class TestCriterion06ShiftRelation:
    @pytest.mark.slow
    def test_continuation_mechanism(self):
        ok = True
        phi1 = GaussianTestFn(1, 1, 1.0, 1.0)
        for which in ("first", "second"):
            for s in (ComplexPair(1.0, 1.0), ComplexPair(1.5, 0.5)):
                r = zetanum.shift_relation_check(1, 1, phi1, s, which, tol=1e-3)
                ok &= r.passed and r.rel_err <= 1e-3
        phi2 = GaussianTestFn(2, 1, 1.0, 1.0)
        cfg = NumericConfig(samples=500_000, seed=17)
        for which in ("first", "second"):
            for s in (ComplexPair(1.0, 1.0), ComplexPair(1.5, 0.5)):
                r = zetanum.shift_relation_check(2, 1, phi2, s, which, cfg, tol=0.05)
                ok &= abs(r.lhs - r.rhs) <= 3.0 * max(r.stderr, 1e-12)

        # normalized pairing finite across the first pole line, one
        # continuation step past it
        pg = phi1.to_polygaussian()
        for s1 in (-0.9, -1.05, -1.3):
            s = ComplexPair(s1, 1.0)
            est = zetanum.zeta_integral(pg, s, 1, 1, margin=0.02, extend=True)
            try:
                gam = specfun.gamma_factor(1, 1).value(s)
                ratio = est.value / gam
            except specfun.GammaPoleError:
                ratio = 0.0
            ok &= np.isfinite(complex(ratio).real) and np.isfinite(complex(ratio).imag)
        announce(6, ok, "shift relation passes (1e-3 quadrature n=1; 3 sigma MC "
                        "n=2), normalized pairing finite one step past the pole line")


class TestCriterion07XiDecomposition:
    def test_pointwise_limit_vs_closed_form(self):
        ok = True
        worst = 0.0
        for n, d in [(1, 1), (2, 1)]:
            rng = np.random.default_rng(100 * n + d)
            for s in (ComplexPair(1, 1), ComplexPair(2, 1), ComplexPair(1, 2)):
                for rho in enumerate_orbits(n, d):
                    rep = orbit_representative(rho, n, d)
                    for _ in range(10):
                        g = rng.standard_normal((n, n))
                        while abs(np.linalg.det(g)) < 0.3:
                            g = rng.standard_normal((n, n))
                        h = rng.standard_normal((d, d))
                        while abs(np.linalg.det(h)) < 0.3:
                            h = rng.standard_normal((d, d))
                        pt = group_action(GroupElement(g, h), rep)
                        lim = functional_eq.xi_pointwise_limit(n, d, s, pt)
                        cf = functional_eq.xi_closed_form(n, d, s, pt)
                        rel = abs(lim - cf) / max(abs(cf), 1e-300)
                        worst = max(worst, rel)
                        ok &= rel <= 1e-6
        # path independence
        rng = np.random.default_rng(55)
        pt = EnhancedPoint.of([[0.5, 0.2], [0.2, -0.9]], [[1.1], [0.4]])
        s = ComplexPair(1.3, 0.7)
        base = functional_eq.xi_pointwise_limit(2, 1, s, pt)
        for _ in range(3):
            a = rng.standard_normal((2, 2))
            alt = functional_eq.xi_pointwise_limit(
                2, 1, s, pt, path_matrix=a @ a.T + 0.4 * np.eye(2))
            ok &= abs(alt - base) <= 1e-6 * abs(base)
        announce(7, ok, f"boundary value equals the orbit closed form at 10 points "
                        f"per orbit (worst rel {worst:.1e} <= 1e-6), path independent")


class TestCriterion08FourierTheorem:
    @pytest.mark.slow
    def test_pairing_level_equation(self):
        ok = True
        batt1 = functional_eq.battery(1, 1)
        for s in functional_eq.ft_window_points(1, 1, 3):
            for phi in (batt1[0], batt1[4]):
                r = functional_eq.ft_theorem_check(1, 1, s, phi, tol=1e-4)
                ok &= r.passed and r.rel_err <= 1e-4
        cfg = NumericConfig(samples=600_000, seed=29)
        phi2 = functional_eq.battery(2, 1)[1]
        for s in functional_eq.ft_window_points(2, 1, 2):
            r = functional_eq.ft_theorem_check(2, 1, s, phi2, cfg, tol=0.05)
            ok &= abs(r.lhs - r.rhs) <= 3.0 * r.stderr
        announce(8, ok, "kernel transform equation: 1e-4 at three admissible s "
                        "(n=1), 3 sigma at two s-points (n=2, d=1)")


class TestCriterion09DeltaResidue:
    def test_limit_recovers_value_at_origin(self):
        ok = True
        batt = functional_eq.battery(1, 1)
        for phi in (batt[0], batt[4]):
            r = functional_eq.delta_residue_check(1, 1, phi, tol=1e-3)
            target = phi.eval_point(EnhancedPoint.of([[0.0]], [[0.0]]))
            ok &= r.passed and abs(r.lhs - target) <= 1e-3 * abs(target)
        announce(9, ok, "normalized kernel family recovers the test value at the "
                        "origin within 1e-3 for two distinct test functions")


class TestCriterion10Corollary:
    def test_cone_supported_equation_and_prefactors(self):
        ok = True
        for s in (ComplexPair(-0.5, -0.25), ComplexPair(-0.625, -0.125)):
            for cut in functional_eq.cutoff_battery(1, 1):
                r = functional_eq.corollary_check(1, 1, s, cut, tol=1e-3)
                ok &= r.passed and r.rel_err <= 1e-3
        rng = np.random.default_rng(77)
        worst = 0.0
        for n, d in [(2, 1), (3, 2)]:
            checked = 0
            while checked < 20:
                s = ComplexPair(complex(rng.normal(), rng.normal()),
                                complex(rng.normal(), rng.normal()))
                a = specfun.corollary_prefactor(n, d, s, "gamma")
                b = specfun.corollary_prefactor(n, d, s, "sine")
                scale = max(abs(a), abs(b))
                if scale < 1e-12:
                    continue
                worst = max(worst, abs(a - b) / scale)
                checked += 1
        ok &= worst <= 1e-10
        announce(10, ok, f"cone-supported equation to 1e-3; the two prefactor "
                         f"forms agree to {worst:.1e} <= 1e-10 under the "
                         f"pi-in-sine reading")


class TestCriterion11OrbitMachinery:
    def test_enumeration_classification_invariance(self):
        ok = True
        expected_counts = {(1, 1): 2, (2, 1): 4, (2, 2): 3, (3, 2): 6}
        for (n, d), count in expected_counts.items():
            ok &= len(enumerate_orbits(n, d)) == count

        rng = np.random.default_rng(123)
        n, d = 2, 2
        orbits = set(enumerate_orbits(n, d))
        seen = set()
        for _ in range(10_000):
            z = rng.standard_normal((n, n))
            pt = EnhancedPoint.of((z + z.T) / 2, rng.standard_normal((n, d)))
            try:
                rho = classify_orbit(pt)
            except NotOpenOrbitError:
                continue
            ok &= rho in orbits
            seen.add(rho)
        ok &= seen == orbits

        for n, d in [(2, 1), (2, 2)]:
            for rho in enumerate_orbits(n, d):
                rep = orbit_representative(rho, n, d)
                for _ in range(100):
                    g = rng.standard_normal((n, n))
                    while abs(np.linalg.det(g)) < 0.1:
                        g = rng.standard_normal((n, n))
                    h = rng.standard_normal((d, d))
                    while abs(np.linalg.det(h)) < 0.1:
                        h = rng.standard_normal((d, d))
                    ok &= classify_orbit(group_action(GroupElement(g, h), rep)) == rho
        announce(11, ok, "orbit counts match hand enumeration, sampled points all "
                         "classify into enumerated orbits, classification is "
                         "action invariant (100 actions per orbit)")


class TestCriterion12Determinism:
    def test_quick_profile_fast_and_byte_identical(self, tmp_path):
        def strip(text):
            text = re.sub(r'"timestamp": "[^"]*"', '"timestamp": null', text)
            return re.sub(r'"runtime_s": [0-9.e+-]+', '"runtime_s": 0', text)

        t0 = time.time()
        outputs = []
        out = tmp_path / "quick.json"
        for _ in range(2):
            code = cli_main(["verify", "gamma-const", "--n", "2", "--d", "1",
                             "--seed", "7", "--profile", "quick", "--out", str(out)])
            assert code == 0
            outputs.append(strip(out.read_text()))
        code = cli_main(["verify", "ft-theorem", "--n", "1", "--d", "1",
                         "--profile", "quick", "--out", str(tmp_path / "ft.json")])
        elapsed = time.time() - t0
        ok = code == 0 and outputs[0] == outputs[1] and elapsed < 60.0
        announce(12, ok, f"quick profile ran in {elapsed:.1f}s < 60s with "
                         f"byte-identical reports for a fixed seed")
