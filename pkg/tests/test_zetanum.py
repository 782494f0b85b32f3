import cmath
import math

import numpy as np
import pytest
import scipy.integrate

from enhanced_zeta import specfun
from enhanced_zeta.errors import ConvergenceError, UnsupportedCaseError
from enhanced_zeta.invariants import ComplexPair, OrbitParam, enumerate_orbits
from enhanced_zeta.zetanum import (
    ConeCutoffFn,
    ConeProposal,
    GaussianTestFn,
    K_rho_pairing,
    MCEstimate,
    NumericConfig,
    clerc_check,
    combine_linear,
    fourier_gaussian,
    gamma_const_integral_mc,
    half_line_integral,
    half_moment,
    inverse_fourier,
    mc_run,
    phi_covariance_check,
    region_margin,
    shift_relation_check,
    smoothstep,
    zeta_integral,
)

CFG = NumericConfig(samples=150_000, seed=7)


class TestHalfMoment:
    def test_gaussian_halves(self):
        assert half_moment(0, 1.0, 0.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)
        assert half_moment(1, 1.0, 0.0) == pytest.approx(0.5, rel=1e-10)

    @pytest.mark.parametrize("c,a,b", [
        (0.5, 1.3, 0.7 + 1.2j),
        (-0.6, 2.0, -0.4 + 2.5j),
        (2.0, 0.8, 1.0j),
        (-0.95, 1.0, 0.3),
    ])
    def test_against_scipy_quad(self, c, a, b):
        # independent oracle: adaptive quadrature of each real part
        def f(u):
            return u ** c * np.exp(-a * u * u) * np.exp(b * u)

        re = scipy.integrate.quad(lambda u: f(u).real, 0, 40, limit=500)[0]
        im = scipy.integrate.quad(lambda u: f(u).imag, 0, 40, limit=500)[0]
        got = half_moment(c, a, b)
        assert got == pytest.approx(re + 1j * im, rel=1e-8)

    def test_divergence_guard(self):
        with pytest.raises(ConvergenceError):
            half_moment(-1.0, 1.0, 0.0)

    def test_callable_variant(self):
        got = half_line_integral(lambda u: u ** 1.5 * np.exp(-2.0 * u * u), 1.5, 2.0)
        want = scipy.integrate.quad(lambda u: u ** 1.5 * math.exp(-2 * u * u), 0, 20)[0]
        assert got == pytest.approx(want, rel=1e-9)


class TestFourierGaussian:
    def test_self_dual_scalar(self):
        phi = GaussianTestFn(1, 1, math.pi, math.pi)
        ft = fourier_gaussian(phi)
        pts = np.array([[0.3, -0.7], [0.0, 0.0], [1.2, 0.4]])
        np.testing.assert_allclose(ft.eval_coords(pts),
                                   phi.to_polygaussian().eval_coords(pts), rtol=1e-12)

    def test_offdiagonal_constant(self):
        # exp(-pi Tr z^2) transforms to 2^{-1/2} exp(-pi Tr w^2) for n = 2
        phi = GaussianTestFn(2, 1, math.pi, math.pi)
        ft = fourier_gaussian(phi)
        z = np.array([[0.2, 0.1], [0.1, -0.3]])
        y = np.array([[0.5], [-0.2]])
        expected = 2 ** -0.5 * math.exp(-math.pi * np.sum(z * z)) \
            * math.exp(-math.pi * np.sum(y * y))
        assert complex(ft.eval_zy(z, y)) == pytest.approx(expected, rel=1e-12)

    def test_inversion_roundtrip(self):
        phi = GaussianTestFn(2, 2, 1.3, 0.8,
                             center_z=0.2 * np.eye(2),
                             center_y=np.array([[0.1, 0.0], [-0.4, 0.3]]))
        rt = inverse_fourier(fourier_gaussian(phi))
        rng = np.random.default_rng(0)
        for _ in range(5):
            z = rng.standard_normal((2, 2))
            z = (z + z.T) / 2
            y = rng.standard_normal((2, 2))
            assert complex(rt.eval_zy(z, y)) == pytest.approx(
                float(phi.eval(z, y)), rel=1e-12, abs=1e-15)

    def test_transform_against_numeric_integral(self):
        # oracle: direct 2-d quadrature of the transform integral at one point
        phi = GaussianTestFn(1, 1, 1.0, 2.0, center_z=np.array([[0.3]]))
        ft = fourier_gaussian(phi)
        w, x = 0.4, -0.6

        def integrand_re(y, z):
            return (phi.eval(np.array([[z]]), np.array([[y]]))
                    * math.cos(2 * math.pi * (z * w + y * x)))

        def integrand_im(y, z):
            return -(phi.eval(np.array([[z]]), np.array([[y]]))
                     * math.sin(2 * math.pi * (z * w + y * x)))

        re = scipy.integrate.dblquad(integrand_re, -8, 8, -8, 8, epsabs=1e-12)[0]
        im = scipy.integrate.dblquad(integrand_im, -8, 8, -8, 8, epsabs=1e-12)[0]
        got = complex(ft.eval_coords(np.array([[w, x]]))[0])
        assert got == pytest.approx(re + 1j * im, rel=1e-9)

    def test_poly_gaussian_rejects_closed_form(self):
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        pg = phi.to_polygaussian().derivative(0)
        with pytest.raises(UnsupportedCaseError):
            pg.fourier()


class TestOperatorOnGaussian:
    def test_derivative_matches_finite_difference(self):
        phi = GaussianTestFn(2, 1, 0.9, 1.1, center_z=0.1 * np.eye(2))
        pg = phi.to_polygaussian()
        d0 = pg.derivative(0)
        pt = np.array([0.4, -0.2, 0.3, 0.6, -0.5])
        h = 1e-6
        up = pt.copy()
        up[0] += h
        dn = pt.copy()
        dn[0] -= h
        fd = (pg.eval_coords(up[None])[0] - pg.eval_coords(dn[None])[0]) / (2 * h)
        assert complex(d0.eval_coords(pt[None])[0]) == pytest.approx(complex(fd), rel=1e-8)


class TestMCEngine:
    def test_bit_for_bit_reproducible(self):
        def draw(rng, m):
            return (rng.standard_normal((m, 3)),)

        def integrand(x):
            return np.exp(-np.sum(x * x, axis=1)) * (1.0 + 0.5j)

        a = mc_run(draw, integrand, 100_000, seed=5)
        b = mc_run(draw, integrand, 100_000, seed=5)
        assert a.value == b.value and a.stderr == b.stderr

    def test_different_seeds_within_error(self):
        def draw(rng, m):
            return (rng.standard_normal((m, 2)),)

        def integrand(x):
            return np.exp(-0.5 * np.sum(x * x, axis=1))

        a = mc_run(draw, integrand, 200_000, seed=1)
        b = mc_run(draw, integrand, 200_000, seed=2)
        assert abs(a.value - b.value) < 4 * math.hypot(a.stderr, b.stderr)

    def test_combine_linear(self):
        ests = [MCEstimate(1.0 + 0j, 0.1, 10), MCEstimate(2.0 + 0j, 0.2, 10)]
        c = combine_linear([1.0, -2.0], ests)
        assert c.value == pytest.approx(-3.0)
        assert c.stderr == pytest.approx(math.hypot(0.1, 0.4))

    def test_cone_proposal_normalized(self):
        # logpdf integrates to 1 over its own samples (importance identity)
        prop = ConeProposal(2, 4.0, 0.7)

        def draw(rng, m):
            return (prop.sample(rng, m),)

        def integrand(z):
            return np.ones(z.shape[0])

        est = mc_run(draw, integrand, 1000, seed=3)
        assert est.value == pytest.approx(1.0)


class TestZetaIntegral:
    def test_scalar_closed_form(self):
        # int_0^inf int_R e^{-z^2-y^2} z |y|^2 dz dy = (1/2)(sqrt(pi)/2)
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        est = zeta_integral(phi, ComplexPair(1, 1), 1, 1)
        assert est.method == "tensor-quadrature"
        assert est.value == pytest.approx(0.5 * math.sqrt(math.pi) / 2, rel=1e-9)

    def test_plain_cone_gaussian(self):
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        est = zeta_integral(phi, ComplexPair(0, 0), 1, 1)
        assert est.value == pytest.approx(math.pi / 2, rel=1e-9)

    def test_mc_stable_across_seeds(self):
        phi = GaussianTestFn(2, 1, 1.0, 1.0)
        vals = []
        for seed in (1, 2, 3):
            cfg = NumericConfig(samples=120_000, seed=seed)
            vals.append(zeta_integral(phi, ComplexPair(1, 1), 2, 1, cfg))
        for a, b in [(0, 1), (0, 2), (1, 2)]:
            err = math.hypot(vals[a].stderr, vals[b].stderr)
            assert abs(vals[a].value - vals[b].value) <= 3 * err

    def test_convergence_guard(self):
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        with pytest.raises(ConvergenceError):
            zeta_integral(phi, ComplexPair(-2.5, 0.0), 1, 1, margin=0.25)

    def test_region_margin(self):
        assert region_margin(1, 1, ComplexPair(0, 0)) == pytest.approx(0.5)
        assert region_margin(2, 1, ComplexPair(-1, -1)) == pytest.approx(-0.5)


class TestGammaConstMC:
    def test_scalar_exponential(self):
        est = gamma_const_integral_mc(1, 1, 0.0, 0.0, CFG)
        assert est.value == pytest.approx(1.0, abs=1e-12)

    def test_scalar_gamma_three(self):
        est = gamma_const_integral_mc(1, 1, 1.0, 1.0, CFG)
        assert abs(est.value - 2.0) <= 3 * est.stderr

    def test_2_1_matches_closed_form(self):
        est = gamma_const_integral_mc(2, 1, 1.0, 0.5, CFG)
        closed = specfun.gindikin_gamma(2, 1, 1.0, 0.5)
        assert abs(est.value - closed) <= 3 * est.stderr
        assert est.stderr <= 0.01 * abs(closed)

    def test_beta_zero_is_exact(self):
        est = gamma_const_integral_mc(3, 2, 0.75, 0.0, CFG)
        closed = specfun.gindikin_gamma(3, 2, 0.75, 0.0)
        assert est.value == pytest.approx(closed, rel=1e-12)
        assert est.stderr <= 1e-12 * abs(closed)


class TestPhiCovariance:
    def test_identity_block_reduction_and_covariances(self):
        x = np.zeros((2, 1))
        x[0, 0] = 1.0
        results = phi_covariance_check(2, 1, 0.5, 0.5, x, CFG)
        for r in results:
            assert r.passed, (r.name, r.lhs, r.rhs, r.stderr)

    def test_generic_x(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((3, 2))
        results = phi_covariance_check(3, 2, 0.5, 0.25, x, CFG)
        for r in results:
            assert r.passed, (r.name, r.lhs, r.rhs, r.stderr)


class TestShiftRelation:
    def test_scalar_both_identities(self):
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        for which, s in [("first", ComplexPair(1, 1)), ("second", ComplexPair(1, 0.5))]:
            r = shift_relation_check(1, 1, phi, s, which)
            assert r.passed and r.rel_err < 1e-10

    def test_scalar_first_identity_hand_value(self):
        # int (-phi') z^{s1+1} |y|^{2 s2} = (s1+1) Z(phi, s) by parts
        phi = GaussianTestFn(1, 1, 1.0, 1.0)
        s = ComplexPair(2.0, 1.0)
        r = shift_relation_check(1, 1, phi, s, "first")
        z = zeta_integral(phi, s, 1, 1).value
        assert r.rhs == pytest.approx((s.s1 + 1) * z, rel=1e-9)

    def test_mc_2_1(self):
        phi = GaussianTestFn(2, 1, 1.0, 1.0)
        cfg = NumericConfig(samples=200_000, seed=13)
        for which in ("first", "second"):
            r = shift_relation_check(2, 1, phi, ComplexPair(1, 1), which, cfg, tol=0.02)
            assert r.passed, (which, r.lhs, r.rhs, r.stderr)


class TestClerc:
    def test_scalar_tate_window(self):
        # oracle: for psi = e^{-pi y^2} both sides have classical closed forms
        psi = GaussianTestFn(1, 1, 1.0, math.pi)
        for a in (-0.4, -0.25, -0.1):
            r = clerc_check(1, 1, a, psi)
            lhs_closed = math.pi ** (-a - 0.5) * specfun.gamma(a + 0.5).real
            assert r.lhs == pytest.approx(lhs_closed, rel=1e-8)
            assert r.passed and r.rel_err < 1e-8

    def test_2_1_quadrature_and_mc_agree(self):
        psi = GaussianTestFn(2, 1, 1.0, 1.2)
        rq = clerc_check(2, 1, -0.5, psi, method="quadrature")
        rm = clerc_check(2, 1, -0.5, psi, CFG, tol=0.02, method="monte-carlo")
        assert rq.passed and rq.rel_err < 1e-7
        assert rm.passed
        assert abs(rq.lhs - rm.lhs) <= 4 * rm.stderr

    def test_alpha_outside_strip(self):
        psi = GaussianTestFn(1, 1, 1.0, 1.0)
        with pytest.raises(ConvergenceError):
            clerc_check(1, 1, 0.3, psi)


class TestKRhoPairing:
    def test_positive_orbit_equals_zeta(self):
        phi = GaussianTestFn(1, 1, 1.0, 1.0).to_polygaussian()
        s = ComplexPair(0.7, 0.4)
        a = K_rho_pairing(OrbitParam(1, 0, 1, 0), s, phi, 1, 1)
        b = zeta_integral(GaussianTestFn(1, 1, 1.0, 1.0), s, 1, 1)
        assert a.value == pytest.approx(b.value, rel=1e-10)

    def test_orbit_sum_at_zero_is_total_integral(self):
        phi = GaussianTestFn(1, 1, 1.3, 0.8, center_z=np.array([[0.2]]))
        pg = phi.to_polygaussian()
        total = sum(K_rho_pairing(r, ComplexPair(0, 0), pg, 1, 1).value
                    for r in enumerate_orbits(1, 1))
        assert total == pytest.approx(pg.full_integral(), rel=1e-9)

    def test_orbit_sum_at_zero_mc(self):
        phi = GaussianTestFn(2, 1, 1.0, 1.0)
        pg = phi.to_polygaussian()
        cfg = NumericConfig(samples=150_000, seed=21)
        ests = [K_rho_pairing(r, ComplexPair(0, 0), pg, 2, 1, cfg, seed_offset=k)
                for k, r in enumerate(enumerate_orbits(2, 1))]
        total = sum(e.value for e in ests)
        err = math.sqrt(sum(e.stderr ** 2 for e in ests))
        assert abs(total - pg.full_integral()) <= 3.5 * err

    def test_sign_flip_symmetry(self):
        import dataclasses
        phi = GaussianTestFn(1, 1, 1.0, 1.0, center_z=np.array([[0.4]]),
                             center_y=np.array([[0.3]]))
        pg = phi.to_polygaussian()
        flipped = dataclasses.replace(
            pg, betas=np.array([-pg.betas[0], pg.betas[1]]))
        s = ComplexPair(0.7, 0.4)
        a = K_rho_pairing(OrbitParam(0, 1, 0, 1), s, pg, 1, 1)
        b = K_rho_pairing(OrbitParam(1, 0, 1, 0), s, flipped, 1, 1)
        assert a.value == pytest.approx(b.value, rel=1e-10)

    def test_descent_matches_direct_in_overlap(self):
        # continuation through one shift step must agree with the direct
        # value where both converge
        phi = GaussianTestFn(1, 1, 1.0, 1.0, center_y=np.array([[0.2]]))
        pg = phi.to_polygaussian()
        rho = OrbitParam(1, 0, 1, 0)
        s = ComplexPair(0.6, 0.3)
        direct = K_rho_pairing(rho, s, pg, 1, 1, margin=0.25)
        from enhanced_zeta.zetanum import pair_orbit_continued
        forced = pair_orbit_continued(rho, s, pg, 1, 1, NumericConfig(),
                                      margin=1.5)  # forces shift steps
        assert forced.value == pytest.approx(direct.value, rel=1e-8)


class TestConeCutoff:
    def test_smoothstep_endpoints(self):
        u = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
        out = smoothstep(u)
        assert out[0] == 0.0 and out[1] == 0.0
        assert out[3] == 1.0 and out[4] == 1.0
        assert 0.0 < out[2] < 1.0

    def test_support_in_closed_cone(self):
        cut = ConeCutoffFn(GaussianTestFn(2, 1, 1.0, 1.0), margin=0.5)
        z_bad = np.diag([1.0, -0.1])
        y = np.array([[1.0], [0.5]])
        assert cut.eval(z_bad, y) == 0.0
        z_good = np.diag([1.0, 0.8])
        assert cut.eval(z_good, y) > 0.0

    def test_scalar_factors(self):
        cut = ConeCutoffFn(GaussianTestFn(1, 1, 1.0, 1.0), margin=0.5)
        zv = np.array([-0.5, 0.1, 1.0])
        yv = np.array([0.1, 1.0])
        zp = cut.z_part(zv)
        assert zp[0] == 0.0 and zp[1] > 0.0
        prod = cut.z_part(np.array([0.7])) * cut.y_part(np.array([0.9]))
        full = cut.eval(np.array([[0.7]]), np.array([[0.9]]))
        assert prod[0] == pytest.approx(float(full), rel=1e-12)
