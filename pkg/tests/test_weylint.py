import math
from collections import Counter, deque
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspmass import weylint as wi
from cuspmass.coeffcore import satake_from_lambda
from cuspmass.errors import ConsistencyError, DegenerateSatakeError, DomainError


# ------------------------------------------------------------ matrix oracle
#
# Independent enumeration: elements are projectivized monomial 2x2 matrices
# over p-powers, generated by the two reflections and the length-zero
# involution.  Word length in the reflections is a 0-1 shortest path; the
# diagonal coordinate is the exponent gap.  This never touches the
# closed-form parametrization under test.

def _normalize(mat):
    kind, e1, e2 = mat
    m = min(e1, e2)
    return (kind, e1 - m, e2 - m)


def _mul(a, b):
    # kind "d": diag(p^e1, p^e2); kind "a": antidiag with p^e1 upper-right,
    # p^e2 lower-left
    k1, a1, a2 = a
    k2, b1, b2 = b
    if k1 == "d" and k2 == "d":
        out = ("d", a1 + b1, a2 + b2)
    elif k1 == "d" and k2 == "a":
        out = ("a", a1 + b1, a2 + b2)
    elif k1 == "a" and k2 == "d":
        out = ("a", a1 + b2, a2 + b1)
    else:
        out = ("d", a1 + b2, a2 + b1)
    return _normalize(out)


W1 = ("a", 0, 0)
W2 = ("a", -1, 1)
OMEGA = ("a", 0, 1)
IDENT = ("d", 0, 0)


def oracle_multiset(lam_cap):
    """{(mu, lam): count} over all elements with word length <= lam_cap."""
    dist = {IDENT: 0}
    queue = deque([IDENT])
    while queue:
        cur = queue.popleft()
        d = dist[cur]
        for gen, w in ((W1, 1), (W2, 1), (OMEGA, 0)):
            nxt = _mul(cur, gen)
            nd = d + w
            if nd <= lam_cap and (nxt not in dist or dist[nxt] > nd):
                dist[nxt] = nd
                if w == 0:
                    queue.appendleft(nxt)  # 0-1 BFS
                else:
                    queue.append(nxt)
    out = Counter()
    for (kind, e1, e2), lam in dist.items():
        mu = abs(e1 - e2)
        out[(mu, lam)] += 1
    return out


class TestEnumeration:
    def test_lam_zero(self):
        elems = wi.enumerate_weyl(0)
        assert [(w.mu, w.lam) for w in elems] == [(0, 0), (1, 0)]

    def test_lam_one_multiset(self):
        got = sorted((w.mu, w.lam) for w in wi.enumerate_weyl(1))
        assert got == sorted([(0, 0), (1, 0), (0, 1), (2, 1), (1, 1), (1, 1)])

    @pytest.mark.parametrize("cap", [0, 1, 2, 5, 8])
    def test_against_matrix_oracle(self, cap):
        got = Counter((w.mu, w.lam) for w in wi.enumerate_weyl(cap))
        assert got == oracle_multiset(cap)

    def test_cardinality_formula(self):
        for cap in range(1, 30):
            assert len(wi.enumerate_weyl(cap)) == 2 + 4 * cap

    def test_no_duplicates_and_sorted(self):
        elems = wi.enumerate_weyl(12)
        assert len(set(elems)) == len(elems)
        keys = [(w.lam, w.mu, w.family, w.a) for w in elems]
        assert keys == sorted(keys)

    def test_noncanonical_rejected(self):
        with pytest.raises(DomainError):
            wi.WeylElement("V", 0, 0, 0)


class TestGeneratingFunction:
    def test_low_coefficients(self):
        series, _ = wi.weyl_generating_function(6)
        assert series.coeff(0, 0) == 1
        assert series.coeff(1, 1) == 2
        assert series.coeff(1, 0) == 1
        assert series.coeff(0, 1) == 1
        assert series.coeff(2, 0) == 0

    def test_residual_zero_through_50(self):
        _, resid = wi.weyl_generating_function(50)
        assert resid == Fraction(0)

    def test_specialization_counts(self):
        counts = wi.length_counts(40)
        assert counts == [2] + [4] * 40


class TestMacdonald:
    def test_identity_value(self):
        s = satake_from_lambda(0.7, 3)
        assert wi.macdonald_coefficient(s, 0) == pytest.approx(1.0, abs=1e-14)

    def test_antisymmetric_point(self):
        s = satake_from_lambda(0.0, 2)
        assert abs(wi.macdonald_coefficient(s, 1)) < 1e-14

    def test_trace_formula_m1(self):
        s = satake_from_lambda(1.0, 3)
        expect = (3.0 / 4.0) * 3**-0.5
        assert wi.macdonald_coefficient(s, 1) == pytest.approx(expect, abs=1e-14)

    def test_degenerate_rejected(self):
        s = wi.SatakeLocalData.__new__(wi.SatakeLocalData)
        object.__setattr__(s, "p", 5)
        object.__setattr__(s, "alpha", 1.0 + 0j)
        object.__setattr__(s, "beta", 1.0 + 0j)
        with pytest.raises(DegenerateSatakeError):
            wi.macdonald_coefficient(s, 3)

    @given(lam=st.floats(min_value=-1.9, max_value=1.9), m=st.integers(min_value=0, max_value=24))
    @settings(max_examples=120, deadline=None)
    def test_decay_envelope(self, lam, m):
        # |Phi(m)| <= (m+1) p^(-m/2) max(|alpha|,|beta|)^m within a modest constant
        if abs(abs(lam) - 2.0) < 1e-3:
            return
        p = 5
        s = satake_from_lambda(lam, p)
        val = abs(wi.macdonald_coefficient(s, m))
        rho = max(abs(s.alpha), abs(s.beta))
        c0 = (abs(s.alpha - s.beta / p) + abs(s.beta - s.alpha / p)) / abs(s.alpha - s.beta)
        assert val <= (m + 1) * p ** (-m / 2) * rho**m * max(c0, 1.0) + 1e-12


class TestLocalIntegral:
    def test_spot_value_one_third(self):
        s = satake_from_lambda(0.0, 2)
        assert wi.ip_closed_form(s).real == pytest.approx(1 / 3, abs=1e-14)
        bf, tail = wi.ip_brute_force(s, 60)
        assert abs(bf - 1 / 3) <= 1e-10

    def test_brute_matches_closed_within_tail(self, rng):
        for p in (2, 3, 5, 7, 11):
            for _ in range(20):
                lam = 2.0 * math.cos(rng.uniform(0.05, math.pi - 0.05))
                s = satake_from_lambda(lam, p)
                bf, tail = wi.ip_brute_force(s, 40)
                assert abs(bf - wi.ip_closed_form(s)) <= tail

    def test_tail_decreases_geometrically(self):
        s = satake_from_lambda(0.6, 3)
        tails = [wi.ip_brute_force(s, cap)[1] for cap in (4, 8, 16, 32)]
        assert all(t2 < t1 * 0.1 for t1, t2 in zip(tails, tails[1:]))

    def test_degenerate_closed_form_still_evaluates(self):
        s = wi.SatakeLocalData.__new__(wi.SatakeLocalData)
        object.__setattr__(s, "p", 7)
        object.__setattr__(s, "alpha", 1.0 + 0j)
        object.__setattr__(s, "beta", 1.0 + 0j)
        val = wi.ip_closed_form(s)
        direct = (1 / 7) * (1 - 1 / 7) * (1 + 7**-0.5) ** 2 / (1 - 7**-1.5) ** 2
        assert val.real == pytest.approx(direct, rel=1e-14)
        with pytest.raises(DegenerateSatakeError):
            wi.ip_brute_force(s, 10)

    def test_exact_brute_vs_closed(self):
        val, tail = wi.ip_brute_force_exact(5, Fraction(2), lam_max=30)
        closed = wi.ip_closed_form_exact(5, Fraction(2))
        assert abs(float(closed - val)) <= tail


class TestNormalizedIntegral:
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
    def test_input_independence(self, p, rng):
        for _ in range(10):
            lam = 2.0 * math.cos(rng.uniform(0.05, math.pi - 0.05))
            s = satake_from_lambda(lam, p)
            assert abs(wi.tilde_ip(s) - 1.0 / p) <= 1e-12

    def test_brute_route(self):
        s = satake_from_lambda(0.0, 2)
        assert abs(wi.tilde_ip(s, route="brute", lam_max=60) - 0.5) <= 1e-8

    def test_extended_precision_route(self):
        s = satake_from_lambda(1.2, 3)
        val = wi.tilde_ip(s, precision_bits=160)
        assert abs(val - 1 / 3) < 1e-14

    def test_exact_mode(self):
        assert wi.tilde_ip_exact(5, 2) == Fraction(1, 5)
        assert wi.tilde_ip_exact(2, Fraction(5, 4)) == Fraction(1, 2)
        assert wi.tilde_ip_exact(3, Fraction(3, 2)) == Fraction(1, 3)

    def test_nontempered_exact(self):
        # |alpha| > 1 but below sqrt(5): still exactly 1/5
        assert wi.tilde_ip_exact(5, Fraction(2)) == Fraction(1, 5)


class TestWatsonFactors:
    def test_case_none(self):
        assert wi.watson_local_factor(13, "none") == 1

    def test_case_two(self):
        assert wi.watson_local_factor(13, "two") == Fraction(1, 13)

    def test_case_three_kills(self):
        assert wi.watson_local_factor(2, "three", eps_p=-1) == 0

    def test_case_three_plus(self):
        assert wi.watson_local_factor(3, "three", eps_p=1) == Fraction(1, 3) * Fraction(4, 3) * 2

    def test_eps_argument_errors(self):
        with pytest.raises(DomainError):
            wi.watson_local_factor(5, "two", eps_p=1)
        with pytest.raises(DomainError):
            wi.watson_local_factor(5, "three")

    def test_finite_part_trivial_level(self):
        prod, const = wi.watson_finite_part(1)
        assert prod == 1 and const == Fraction(1, 8)

    def test_finite_part_products(self):
        for q in (6, 30, 210):
            prod, const = wi.watson_finite_part(q)
            assert prod == Fraction(1, q)
            assert const == Fraction(1, 8 * q)

    def test_finite_part_rejects_nonsquarefree(self):
        with pytest.raises(DomainError):
            wi.watson_finite_part(12)
