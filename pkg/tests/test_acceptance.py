"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Empirical-constant criteria compare against tests/data/calibration.json,
frozen from the first audited run; they are regression checks, not
theory-derived absolutes.
"""

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from cuspmass import autoeval as ae
from cuspmass import cli, coeffcore, shiftsum, weylint
from cuspmass.arith import factorize, prime_sieve
from cuspmass.testfns import default_h

_CALIBRATION = json.loads(
    (Path(__file__).parent / "data" / "calibration.json").read_text(encoding="utf-8")
)


def _line(num: int, name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} {name}: {detail}"


def test_criterion_01_normalized_local_integral():
    t0 = time.perf_counter()
    rng = random.Random(314159)
    worst = 0.0
    for p in (2, 3, 5, 7, 11):
        for _ in range(100):
            theta = rng.uniform(0.05, math.pi - 0.05)
            sat = coeffcore.satake_from_lambda(2.0 * math.cos(theta), p)
            worst = max(worst, abs(weylint.tilde_ip(sat, route="brute", lam_max=60) - 1.0 / p))
    exact_ok = all(
        weylint.tilde_ip_exact(p, weylint.default_exact_alpha(p)) == Fraction(1, p)
        for p in (2, 3, 5, 7, 11)
    )
    dt = time.perf_counter() - t0
    _line(1, "tilde_ip", worst <= 1e-8 and exact_ok and dt < 5.0,
          f"max |err| = {worst:.2e}, exact = {exact_ok}, {dt:.2f}s")


def test_criterion_02_bivariate_identity():
    t0 = time.perf_counter()
    _, resid = weylint.weyl_generating_function(50)
    counts = weylint.length_counts(50)
    dt = time.perf_counter() - t0
    ok = resid == 0 and counts == [2] + [4] * 50 and dt < 1.0
    _line(2, "bivariate_identity", ok, f"residual = {resid}, {dt:.2f}s")


def test_criterion_03_closed_vs_brute():
    rng = random.Random(271828)
    ok_all = True
    worst_slack = 0.0
    for p in (2, 3, 5, 7, 11):
        for _ in range(20):
            theta = rng.uniform(0.05, math.pi - 0.05)
            sat = coeffcore.satake_from_lambda(2.0 * math.cos(theta), p)
            bf, tail = weylint.ip_brute_force(sat, 40)
            diff = abs(bf - weylint.ip_closed_form(sat))
            ok_all &= diff <= tail
            worst_slack = max(worst_slack, diff / max(tail, 1e-300))
    spot = weylint.ip_brute_force(coeffcore.satake_from_lambda(0.0, 2), 60)[0]
    spot_ok = abs(spot - 1.0 / 3.0) <= 1e-10
    _line(3, "closed_vs_brute", ok_all and spot_ok,
          f"max diff/tail = {worst_slack:.2e}, |I_2 - 1/3| = {abs(spot - 1 / 3):.2e}")


def test_criterion_04_finite_part():
    t0 = time.perf_counter()
    ok = True
    for q in (6, 30, 210):
        prod, const = weylint.watson_finite_part(q)
        ok &= prod == Fraction(1, q) and const == Fraction(1, 8 * q)
    dt = time.perf_counter() - t0
    _line(4, "finite_part", ok and dt < 1.0, f"products exact, {dt:.2f}s")


def test_criterion_05_hecke_eta_consistency():
    t0 = time.perf_counter()
    ok = True
    for build, k, q in ((coeffcore.delta_table, 12, 1), (coeffcore.f11_table, 2, 11)):
        table = build(100_000)
        small = table.restricted(10_000)
        pv = {int(p): small.lam_at(int(p)) for p in prime_sieve(10_000)}
        rpv = {int(p): small.raw[int(p)] for p in prime_sieve(10_000)}
        ext = coeffcore.hecke_extend(pv, small.descriptor, 10_000, raw_prime_values=rpv)
        ok &= ext.raw == small.raw
        ok &= coeffcore.deligne_bound_margin(table, 100_000) <= 1e-9
    f11 = coeffcore.f11_table(200)
    ok &= abs(f11.lam_at(11) ** 2 - 1.0 / 11.0) <= 1e-12
    dt = time.perf_counter() - t0
    _line(5, "hecke_eta_oracle", ok and dt < 10.0, f"{dt:.2f}s")


def test_criterion_06_rankin_selberg(delta_big, f11_big):
    results = []
    for table, k, q, grid in ((delta_big, 12, 1, 24), (f11_big, 2, 11, 32)):
        t0 = time.perf_counter()
        _, _, rel = ae.petersson_norm(table, k, q, ae.GridSpec(grid, grid),
                                      prime_cutoff=100_000)
        dt = time.perf_counter() - t0
        results.append((k, q, rel, dt))
    ok = all(rel <= 1e-2 and dt < 120.0 for _, _, rel, dt in results)
    detail = "; ".join(f"(k={k},q={q}) rel={rel:.2e} in {dt:.1f}s" for k, q, rel, dt in results)
    _line(6, "rankin_selberg", ok, detail)


def test_criterion_07_unfolding(delta_big, f11_big):
    h = default_h()
    results = []
    for table, k, q, grid in ((delta_big, 12, 1, 24), (f11_big, 2, 11, 32)):
        t0 = time.perf_counter()
        _, _, rel = ae.unfolding_check(table, k, q, 2.0, h, ae.GridSpec(grid, grid))
        dt = time.perf_counter() - t0
        results.append((q, rel, dt))
    ok = all(rel <= 1e-2 and dt < 120.0 for _, rel, dt in results)
    _line(7, "unfolding", ok,
          "; ".join(f"q={q} rel={rel:.2e} in {dt:.1f}s" for q, rel, dt in results))


def test_criterion_08_eisenstein_residue():
    target = 3.0 / math.pi
    r1 = ae.eisenstein_residue_check(1j, 1e-3)
    r2 = ae.eisenstein_residue_check(0.3 + 0.8j, 1e-3)
    ok = abs(r1 - target) <= 5e-3 and abs(r2 - target) <= 5e-3 and abs(r1 - r2) <= 1e-2
    _line(8, "eisenstein_residue", ok,
          f"|r(i) - 3/pi| = {abs(r1 - target):.2e}, |r1 - r2| = {abs(r1 - r2):.2e}")


def test_criterion_09_psi_audits():
    ok = (
        shiftsum.psi_function(1) == 1
        and shiftsum.psi_function(2) == 20
        and shiftsum.psi_function(3) == Fraction(27, 2)
    )
    mismatch = None
    for l in range(1, 10_001):
        prod = Fraction(1)
        for p, a in factorize(l) if l > 1 else ():
            prod *= shiftsum.psi_prime_power(p, a)
        if prod != shiftsum.psi_function(l):
            mismatch = l
            break
    worst = max(
        (float(shiftsum.psi_prime_power(p, a)) - 1.0) * p
        for p in prime_sieve(100).tolist()
        for a in range(1, 11)
    )
    ok = ok and mismatch is None and worst <= 1e6
    _line(9, "psi_audits", ok, f"mismatch = {mismatch}, max (psi-1)p = {worst:.1f}")


def test_criterion_10_sieve_partition():
    ok = True
    for z in (5.0, 10.0):
        for l in (1, 4, 12):
            fibers = shiftsum.sieve_fibers(l, z, 10_000)
            ok &= sum(fibers.values()) == 10_000
            for (a, b, c) in fibers:
                shiftsum.SieveTriple(a=a, b=b, c=c, z=z)  # raises on violation
                ok &= l % c == 0
    _line(10, "sieve_partition", ok, "fibers partition [1, 1e4], class invariants hold")


def test_criterion_11_shifted_sum_ratio(delta_big, f11_big):
    t0 = time.perf_counter()
    cap = _CALIBRATION["shifted_sum_max_ratio_cap"]
    worst = 0.0
    for table in (delta_big, f11_big):
        for x in (1e3, 1e4, 1e5):
            bound = shiftsum.holowinsky_bound(table, x, 0.2)
            for l in range(1, 11):
                worst = max(worst, shiftsum.shifted_sum_exact(table, l, x) / bound)
    dt = time.perf_counter() - t0
    _line(11, "shifted_sum_ratio", worst <= cap and dt < 60.0,
          f"max ratio = {worst:.4f} <= cap {cap}, {dt:.1f}s")


def test_criterion_12_divisor_lemma():
    t0 = time.perf_counter()
    cap = _CALIBRATION["divisor_lemma_max_ratio_cap"]
    rng = random.Random(161803)
    primes = prime_sieve(10_000).tolist()
    worst = 0.0
    for _ in range(200):
        omega = rng.randint(1, 12)
        q = 1
        for p in sorted(rng.sample(primes, omega)):
            if q * p > 10**12:
                break
            q *= p
        for k in (2, 12):
            for eps in (0.1, 0.5):
                _, _, ratio = shiftsum.divisor_lemma_ratio(q, k, eps)
                worst = max(worst, ratio)
    dt = time.perf_counter() - t0
    _line(12, "divisor_lemma", worst <= cap and dt < 10.0,
          f"max ratio = {worst:.4f} <= cap {cap}, {dt:.1f}s")


def test_criterion_13_weight_integral_bound():
    cap = _CALIBRATION["is_integral_max_ratio_cap"]
    h = default_h()
    worst = 0.0
    for l in (1, 5):
        for n in (1, 10, 100):
            for x in (1.0, 10.0):
                for k in (2, 12):
                    v, b = shiftsum.shift_integral_Is(0.0, l, n, x, k, h, A=3)
                    worst = max(worst, abs(v) / b)
    _line(13, "weight_integral_bound", worst <= cap,
          f"max C_A = {worst:.4f} <= cap {cap}")


def test_criterion_14_report_determinism(tmp_path):
    cfg = tmp_path / "fast.json"
    cfg.write_text(json.dumps({"report-all": {"n_max": 4000, "grid": 10,
                                              "x_shift": 1000.0}}), encoding="utf-8")
    outs = []
    for par in ("1", "8"):
        out = tmp_path / f"rep_{par}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "cuspmass.cli", "--config", str(cfg),
             "report-all", "--parallelism", par, "-o", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr.decode()
        outs.append(out.read_bytes())
    _line(14, "report_determinism", outs[0] == outs[1],
          f"{len(outs[0])} bytes, parallelism 1 vs 8 byte-identical")
