import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspmass import autoeval as ae
from cuspmass import coeffcore as cc
from cuspmass import kernels
from cuspmass.errors import DomainError, InfeasibleError, TableRangeError
from cuspmass.shiftsum import kappa_s
from cuspmass.specfun import scattering_m
from cuspmass.testfns import MU1, IncompleteEisensteinData, gauss_panels


class TestReduction:
    def test_translation(self):
        z, g = ae.reduce_to_fundamental_domain(5 + 1j)
        assert z == 1j and g == (1, -5, 0, 1)

    def test_inversion(self):
        z, _ = ae.reduce_to_fundamental_domain(0.5j)
        assert z == 2j

    def test_fixed_point(self):
        z0 = 0.25 + 1.5j
        z, g = ae.reduce_to_fundamental_domain(z0)
        assert z == z0 and g == (1, 0, 0, 1)

    @given(
        x=st.floats(min_value=-20, max_value=20),
        y=st.floats(min_value=1e-3, max_value=50),
    )
    @settings(max_examples=200, deadline=None)
    def test_reduction_properties(self, x, y):
        z0 = complex(x, y)
        z, (a, b, c, d) = ae.reduce_to_fundamental_domain(z0)
        assert a * d - b * c == 1
        assert abs((a * z0 + b) / (c * z0 + d) - z) < 1e-9 * max(1.0, abs(z))
        assert abs(z.real) <= 0.5 + 1e-12
        assert abs(z) >= 1 - 1e-9

    def test_gamma0_reduce_improves_height(self):
        w = 0.0901 + 0.001j
        z = ae.gamma0_reduce(w, 11)
        assert z.imag >= w.imag

    def test_lower_half_rejected(self):
        with pytest.raises(DomainError):
            ae.reduce_to_fundamental_domain(1 - 1j)


class TestCosets:
    def test_counts(self):
        assert len(ae.coset_representatives(1)) == 1
        assert len(ae.coset_representatives(11)) == 12
        assert len(ae.coset_representatives(6)) == 12

    def test_index_formula(self):
        for q in (2, 3, 5, 7, 10, 15, 30, 105):
            index = q
            for p, _ in cc.factorize(q) if q > 1 else ():
                index += index // p
            assert len(ae.coset_representatives(q)) == index

    def test_determinants(self):
        for a, b, c, d in ae.coset_representatives(30):
            assert a * d - b * c == 1

    def test_explosion_refused(self):
        with pytest.raises(InfeasibleError):
            ae.coset_representatives(3 * 5 * 7 * 11 * 13 * 17)


class TestMassEvaluation:
    def test_cusp_decay(self, delta_small):
        v1 = ae.eval_newform_mass(delta_small, 12, 0.3 + 4j)
        v2 = ae.eval_newform_mass(delta_small, 12, 0.3 + 8j)
        assert v2 < v1 * 1e-10

    def test_level_invariance(self, f11_small):
        z = 0.2 + 0.4j
        gz = z / (11 * z + 1)
        v1 = ae.eval_newform_mass(f11_small, 2, z)
        v2 = ae.eval_newform_mass(f11_small, 2, gz)
        assert v1 == pytest.approx(v2, rel=1e-9)

    def test_independent_partial_sum_at_i(self, delta_small):
        got = ae.eval_newform_mass(delta_small, 12, 1j)
        s = 0j
        for n in range(1, 41):
            amp = delta_small.lam_at(n) / math.sqrt(n) * n**6 * math.exp(-2 * math.pi * n)
            s += amp  # at z = i the phase is 1... e(n*0) = 1
        assert got == pytest.approx(abs(s) ** 2, abs=1e-10)

    def test_insufficient_range_names_required(self):
        t = cc.normalize_coefficients([1, -24], k=12, level=1)
        with pytest.raises(TableRangeError) as err:
            ae.eval_newform_mass(t, 12, 0.1 + 0.05j, reduce=False)
        assert err.value.required > 2


class TestEisenstein:
    def test_periodicity_exact(self):
        z = 0.25 + 1.4j  # dyadic x so the shifted point reduces to the same bits
        assert ae.eval_eisenstein(1.3, z) == ae.eval_eisenstein(1.3, z + 1)

    def test_modular_invariance_nonvacuous(self):
        z = 0.2 + 1.1j
        e1 = ae.eval_eisenstein(1.3, z, reduce=False)
        e2 = ae.eval_eisenstein(1.3, -1 / z, reduce=False)
        assert abs(e1 - e2) < 1e-10

    def test_large_y_constant_term(self):
        y = 20.0
        val = ae.eval_eisenstein(1.5, 1j * y)
        main = y**1.5 + scattering_m(1.5) * y**-0.5
        assert abs(val - main) < 1e-12

    def test_pole_and_domain(self):
        with pytest.raises(DomainError):
            ae.eval_eisenstein(1.0, 1j)
        with pytest.raises(DomainError):
            ae.eval_eisenstein(0.4, 1j)

    def test_residue_acceptance_values(self):
        target = 3.0 / math.pi
        r1 = ae.eisenstein_residue_check(1j, 1e-3)
        r2 = ae.eisenstein_residue_check(0.3 + 0.8j, 1e-3)
        assert abs(r1 - target) <= 5e-3
        assert abs(r2 - target) <= 5e-3
        assert abs(r1 - r2) <= 1e-2

    def test_residue_richardson_consistency(self):
        target = 3.0 / math.pi
        e1 = ae.eisenstein_residue_check(1j, 1e-3) - target
        e2 = ae.eisenstein_residue_check(1j, 5e-4) - target
        assert e2 / e1 == pytest.approx(0.5, abs=0.15)


class TestMaass:
    def test_fixture_modularity(self):
        phi = ae.load_maass_fixture()
        for z in (0.1 + 1.05j, 0.2 + 1.1j, -0.33 + 1.02j):
            a = ae.eval_maass(phi, z, reduce=False)
            b = ae.eval_maass(phi, -1 / z, reduce=False)
            assert abs(a - b) < 1e-13

    def test_periodicity(self):
        phi = ae.load_maass_fixture()
        z = 0.375 + 1.2j  # dyadic x so the shifted point reduces to the same bits
        assert ae.eval_maass(phi, z) == ae.eval_maass(phi, z + 1)

    def test_odd_vanishes_on_imaginary_axis(self):
        phi = ae.load_maass_fixture()
        odd = ae.MaassFormData(r=phi.r, parity=-1, lam=phi.lam, n_max=phi.n_max)
        assert ae.eval_maass(odd, 1.3j) == 0.0

    def test_rankin_selberg_constant_recorded(self):
        phi = ae.load_maass_fixture()
        c = phi.rankin_selberg_constant()
        assert 0.5 < c < 4.0

    def test_insufficient_coefficients(self):
        phi = ae.load_maass_fixture()
        with pytest.raises(TableRangeError):
            ae.eval_maass(phi, 0.1 + 0.05j, reduce=False)

    def test_csv_roundtrip(self, tmp_path):
        import json

        phi = ae.load_maass_fixture()
        p = tmp_path / "m.csv"
        lines = ["n,a_n"] + [f"{n},{float(phi.lam[n])!r}" for n in range(1, phi.n_max + 1)]
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        p.with_suffix(".meta.json").write_text(
            json.dumps({"spectral_r": phi.r, "parity": 1}), encoding="utf-8"
        )
        phi2 = ae.load_maass_csv(p)
        assert phi2.r == phi.r and np.array_equal(phi2.lam, phi.lam)


class TestIncompleteEisenstein:
    def test_nonnegative(self, bump_h):
        data = IncompleteEisensteinData(psi=bump_h)
        for z in (0.1 + 0.9j, -0.4 + 1.2j, 0.45 + 2.5j):
            assert ae.eval_incomplete_eisenstein(data, z) >= 0

    def test_periodicity(self, bump_h):
        data = IncompleteEisensteinData(psi=bump_h.scaled(2.0))
        z = 0.3 + 0.95j
        assert ae.eval_incomplete_eisenstein(data, z) == pytest.approx(
            ae.eval_incomplete_eisenstein(data, z + 1), rel=1e-14
        )

    def test_full_invariance(self, bump_h):
        data = IncompleteEisensteinData(psi=bump_h.scaled(2.0))
        z = 0.3 + 0.9j
        zr, _ = ae.reduce_to_fundamental_domain(z)
        assert ae.eval_incomplete_eisenstein(data, z) == pytest.approx(
            ae.eval_incomplete_eisenstein(data, zr), rel=1e-12
        )

    def test_constant_mode_against_contour_route(self, bump_h):
        # two representations of the zero Fourier mode: the direct orbit sum
        # (x-independent at this height) against the Mellin contour with the
        # volume residue plus the critical-line integral of the constant term
        psi = bump_h.scaled(0.2)  # support [3.03, 8.24]
        data = IncompleteEisensteinData(psi=psi)
        y = 3.3
        direct = ae.eval_incomplete_eisenstein(data, 0.37 + 1j * y)
        assert direct == pytest.approx(float(psi(np.array([y]))[0]), rel=1e-14)

        def integrand(ts):
            out = np.empty_like(ts)
            for i, tv in enumerate(ts):
                s = complex(0.5, tv)
                out[i] = (psi.mellin(s) * (y**s + scattering_m(s) * y ** (1 - s))).real
            return out

        # the real part is even in t, so fold the line integral onto [0, T]
        T = 500.0
        contour = 2.0 * gauss_panels(integrand, 0.0, T, 750) / (2 * math.pi)
        fourier_side = psi.mellin(1.0).real / MU1 + contour
        assert abs(fourier_side - direct) < 1e-8


class TestKernelBounds:
    def test_kappa_bounded_by_one(self):
        ys = np.linspace(0.05, 50.0, 300)
        for s in (0.0, 0.3, -0.3, 0.49, 0.2j, 5j):
            vals = np.abs(kappa_s(s, ys))
            assert np.max(vals) <= 1.0 + 1e-12


class TestPetersson:
    def test_positive(self, f11_big):
        num, _, _ = ae.petersson_norm(f11_big, 2, 11, ae.GridSpec(8, 8))
        assert num > 0

    def test_delta_identity(self, delta_big):
        _, _, rel = ae.petersson_norm(delta_big, 12, 1, ae.GridSpec(24, 24))
        assert rel <= 1e-2

    def test_f11_identity(self, f11_big):
        _, _, rel = ae.petersson_norm(f11_big, 2, 11, ae.GridSpec(32, 32))
        assert rel <= 1e-2

    def test_refinement_montone_against_converged(self, delta_big):
        # the formula side carries the truncated adjoint product's ~3e-4
        # error, so monotone shrinkage is measured against the converged
        # quadrature value instead
        reference, _, _ = ae.petersson_norm(delta_big, 12, 1, ae.GridSpec(48, 48))
        errs = []
        for g in (2, 4, 8, 16):
            num, _, _ = ae.petersson_norm(delta_big, 12, 1, ae.GridSpec(g, g))
            errs.append(abs(num - reference) / reference)
        assert errs[0] > errs[1] > errs[2] > errs[3]


class TestWeylPeriod:
    def test_discrepancy_triangle_bound(self, f11_big, bump_h):
        psi = bump_h.scaled(2.0)
        data = IncompleteEisensteinData(psi=psi)
        ratio, disc = ae.weyl_period(f11_big, 2, 11, psi, ae.GridSpec(16, 16))
        ys = np.linspace(0.05, 20, 2000)
        sup_phi = float(np.max(psi(ys))) * 10  # crude orbit-sum bound
        assert abs(disc) <= 2 * sup_phi

    def test_odd_maass_vanishes(self, f11_big):
        phi = ae.load_maass_fixture()
        odd = ae.MaassFormData(r=phi.r, parity=-1, lam=phi.lam, n_max=phi.n_max)
        ratio, _ = ae.weyl_period(f11_big, 2, 11, odd, ae.GridSpec(16, 16))
        assert abs(ratio) <= 1e-10

    def test_two_route_consistency(self, f11_big, bump_h):
        ratio, _ = ae.weyl_period(f11_big, 2, 11, bump_h.scaled(2.0), ae.GridSpec(48, 48))
        numeric, _, _ = ae.petersson_norm(f11_big, 2, 11, ae.GridSpec(48, 48, 3.3))
        lhs, _, _ = ae.unfolding_check(f11_big, 2, 11, 2.0, bump_h, ae.GridSpec(48, 48))
        assert abs(ratio - lhs / numeric) <= 1e-6


class TestUnfolding:
    def test_level_one(self, delta_big, bump_h):
        _, _, rel = ae.unfolding_check(delta_big, 12, 1, 2.0, bump_h, ae.GridSpec(24, 24))
        assert rel <= 1e-2

    def test_level_eleven(self, f11_big, bump_h):
        _, _, rel = ae.unfolding_check(f11_big, 2, 11, 2.0, bump_h, ae.GridSpec(32, 32))
        assert rel <= 1e-2

    def test_linearity(self, delta_big, bump_h):
        from cuspmass.testfns import TestFunctionH

        doubled = TestFunctionH(
            y0=bump_h.y0, y1=bump_h.y1, evaluator=lambda y: 2.0 * bump_h(y), label="2h"
        )
        l1, r1, _ = ae.unfolding_check(delta_big, 12, 1, 2.0, bump_h, ae.GridSpec(12, 12))
        l2, r2, _ = ae.unfolding_check(delta_big, 12, 1, 2.0, doubled, ae.GridSpec(12, 12))
        assert l2 == pytest.approx(2 * l1, rel=1e-12)
        assert r2 == pytest.approx(2 * r1, rel=1e-12)


class TestWhittakerCatalogue:
    def test_holomorphic_kernel(self):
        ys = np.array([0.5, 1.0, 2.0])
        got = ae.WhittakerKernels.holomorphic(12, ys)
        want = ys**6 * np.exp(-2 * math.pi * ys)
        assert np.allclose(got, want, rtol=1e-14)

    def test_maass_kernel_sign(self):
        y = np.array([-1.0, 1.0])
        even = ae.WhittakerKernels.maass(5.0, 1, y)
        assert even[0] == pytest.approx(-even[1])
        odd = ae.WhittakerKernels.maass(5.0, -1, y)
        assert odd[0] == pytest.approx(odd[1])
