"""Command-line front end: verification subcommands emitting canonical reports.

Exit codes: 0 all checks pass (recorded checks never fail a run), 2 usage,
3 input validation, 4 computation error.  A JSON config file supplies
defaults which explicit flags override; the only environment variable read
is CUSPMASS_PARALLELISM (default worker count for report-all).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import autoeval, coeffcore, shiftsum, weylint
from .arith import factorize, prime_sieve
from .errors import (
    CuspmassError,
    DomainError,
    IncompleteDataError,
    InfeasibleError,
    ParseError,
    QuadratureError,
    TableRangeError,
    ValidationError,
)
from .report import Report, emit_report, render_csv_summary, render_json
from .specfun import log_gamma
from .testfns import default_h

_VALIDATION_ERRORS = (DomainError, ValidationError, ParseError, IncompleteDataError)
_COMPUTE_ERRORS = (QuadratureError, TableRangeError, InfeasibleError, CuspmassError)


# ------------------------------------------------------------ table loading


def _load_table(spec: str, n_max: int) -> coeffcore.CoefficientTable:
    if spec == "delta":
        return coeffcore.delta_table(n_max)
    if spec == "f11":
        return coeffcore.f11_table(n_max)
    _, table = coeffcore.ingest_coefficients(spec)
    return table


def _is_prime(p: int) -> bool:
    return p >= 2 and len(factorize(p)) == 1 and factorize(p)[0][1] == 1


def _random_unit_satake(rng: random.Random, p: int) -> coeffcore.SatakeLocalData:
    # unit-circle parameters away from the degenerate points +-1
    theta = rng.uniform(0.05, math.pi - 0.05)
    lam = 2.0 * math.cos(theta)
    return coeffcore.satake_from_lambda(lam, p)


# ------------------------------------------------------------- subcommands


def _cmd_local_integral(args) -> Report:
    p = args.p
    if not _is_prime(p):
        raise DomainError(f"p = {p} is not prime")
    rep = Report("local-integral", {"p": p, "lambda_p": args.lambda_p, "mode": args.mode,
                                    "trunc": args.trunc, "exact_alpha": args.exact_alpha})
    if args.mode == "exact":
        alpha = Fraction(args.exact_alpha)
        val = weylint.tilde_ip_exact(p, alpha)
        rep.results["tilde_ip"] = val
        rep.check("tilde_ip", val == Fraction(1, p), val, 0,
                  anchor="normalized_local_integral_equals_1_over_p")
        ipc = weylint.ip_closed_form_exact(p, alpha)
        ipb, tail = weylint.ip_brute_force_exact(p, alpha, args.trunc)
        diff = abs(float((ipc - ipb).u) + float((ipc - ipb).v) * math.sqrt(p))
        rep.check("ip_brute_vs_closed", diff <= tail, diff, tail,
                  anchor="cell_sum_matches_closed_form_within_tail")
        return rep
    sat = coeffcore.satake_from_lambda(args.lambda_p, p)
    prec = 120 if args.mode == "extended" else None
    val = weylint.tilde_ip(sat, route="closed", precision_bits=prec)
    brute = weylint.tilde_ip(sat, route="brute", lam_max=args.trunc)
    rep.results["tilde_ip"] = val
    rep.results["tilde_ip_brute"] = brute
    tol = 1e-8
    rep.check("tilde_ip", abs(val - 1.0 / p) <= tol, val, tol,
              anchor="normalized_local_integral_equals_1_over_p")
    ipb, tail = weylint.ip_brute_force(sat, args.trunc)
    ipc = weylint.ip_closed_form(sat)
    rep.check("ip_brute_vs_closed", abs(ipb - ipc) <= tail, abs(ipb - ipc), tail,
              anchor="cell_sum_matches_closed_form_within_tail")
    return rep


def _cmd_weyl_gf(args) -> Report:
    rep = Report("weyl-gf", {"order": args.order})
    series, resid = weylint.weyl_generating_function(args.order)
    rep.results["max_residual"] = resid
    rep.check("bivariate_identity_residual", resid == 0, resid, 0,
              anchor="length_generating_series_matches_closed_form")
    counts = weylint.length_counts(args.order)
    expected = [2] + [4] * args.order
    rep.check("length_counts", counts == expected, counts[: min(8, len(counts))], None,
              anchor="specialized_series_counts_2_then_4_per_length")
    return rep


def _cmd_eta(args) -> Report:
    pattern = _parse_pattern(args.pattern)
    rep = Report("eta", {"pattern": {str(k): v for k, v in pattern.exponents.items()},
                         "n": args.n})
    coeffs = coeffcore.eta_product_expansion(pattern, args.n)
    rep.results["head"] = coeffs[: min(16, len(coeffs))]
    rep.check("leading_coefficient", coeffs[0] == 1, coeffs[0], None,
              anchor="eta_product_expansion_is_monic")
    return rep


def _parse_pattern(text: str) -> coeffcore.EtaPattern:
    try:
        entries = {}
        for part in text.split(","):
            d, e = part.split(":")
            entries[int(d)] = int(e)
        return coeffcore.EtaPattern(entries)
    except (ValueError, KeyError) as exc:
        raise DomainError(f"bad eta pattern {text!r}; expected like '1:24' or '1:2,11:2'") from exc


def _cmd_ingest(args) -> Report:
    rep = Report("ingest", {"path": str(args.path), "extended_bits": args.extended_bits})
    desc, table = coeffcore.ingest_coefficients(args.path)
    if args.extended_bits:
        coeffcore.validate_table_extended(table, precision_bits=args.extended_bits)
    rep.results["level"] = desc.level
    rep.results["weight"] = desc.weight
    rep.results["n_max"] = table.n_max
    rep.check("invariants", True, "all table invariants hold", None,
              anchor="coefficient_table_invariants")
    margin = coeffcore.deligne_bound_margin(table)
    rep.check("divisor_bound_margin", margin <= 1e-9, margin, 1e-9,
              anchor="coefficient_divisor_bound")
    return rep


def _cmd_shifted_sum(args) -> Report:
    table = _load_table(args.table, args.n_max)
    rep = Report("shifted-sum", {"table": args.table, "l": args.l, "x": args.x,
                                 "epsilon": args.epsilon, "n_max": args.n_max})
    value = shiftsum.shifted_sum_exact(table, args.l, args.x)
    bound = shiftsum.holowinsky_bound(table, args.x, args.epsilon)
    rep.results["sum"] = value
    rep.results["bound"] = bound
    rep.record("ratio", value / bound if bound else math.inf,
               anchor="shifted_sum_over_friable_product_bound")
    return rep


def _cmd_sieve_audit(args) -> Report:
    rep = Report("sieve-audit", {"x": args.x, "z": args.z, "l": args.l})
    fibers = shiftsum.sieve_fibers(args.l, args.z, args.x)
    total = sum(fibers.values())
    rep.results["fiber_count"] = len(fibers)
    rep.check("fibers_partition", total == math.floor(args.x), total, math.floor(args.x),
              anchor="friable_part_classes_partition_the_interval")
    bad = 0
    worst_ratio = 0.0
    for (a, b, c), count in sorted(fibers.items()):
        try:
            shiftsum.SieveTriple(a=a, b=b, c=c, z=args.z)
        except DomainError:
            bad += 1
            continue
        if args.l % c == 0:
            _, rhs = shiftsum.sieve_class_count(a, b, c, args.l, args.z, args.x)
            if rhs > 0:
                worst_ratio = max(worst_ratio, count / rhs)
    rep.check("class_invariants", bad == 0, bad, 0,
              anchor="friable_class_divisibility_and_coprimality")
    rep.record("max_count_over_majorant", worst_ratio,
               anchor="large_sieve_class_count_majorant")
    return rep


def _cmd_psi(args) -> Report:
    rep = Report("psi", {"l_max": args.l_max})
    specials = {1: Fraction(1), 2: Fraction(20), 3: Fraction(27, 2)}
    ok = all(shiftsum.psi_function(l) == v for l, v in specials.items())
    rep.check("psi_special_values", ok, {str(l): v for l, v in specials.items()}, 0,
              anchor="psi_at_1_2_3")
    mismatch = None
    for l in range(1, args.l_max + 1):
        prod = Fraction(1)
        for p, a in factorize(l) if l > 1 else ():
            prod *= shiftsum.psi_prime_power(p, a)
        if prod != shiftsum.psi_function(l):
            mismatch = l
            break
    rep.check("psi_definition_equals_closed_form", mismatch is None, mismatch, 0,
              anchor="psi_multiplicative_closed_form")
    worst = max(
        (float(shiftsum.psi_prime_power(p, a)) - 1.0) * p
        for p in prime_sieve(100).tolist()
        for a in range(1, 11)
    )
    rep.check("psi_prime_power_bound", worst <= 1e6, worst, 1e6,
              anchor="psi_prime_power_deficiency_constant")
    return rep


def _cmd_divisor_lemma(args) -> Report:
    rep = Report("divisor-lemma", {"count": args.count, "seed": args.seed,
                                   "omega_max": args.omega_max, "k": args.k,
                                   "epsilon": args.epsilon})
    rng = random.Random(args.seed)
    primes = prime_sieve(10_000).tolist()
    worst = 0.0
    for _ in range(args.count):
        omega = rng.randint(1, args.omega_max)
        chosen = rng.sample(primes, omega)
        q = 1
        for p in sorted(chosen):
            if q * p > 10**12:
                break
            q *= p
        _, _, ratio = shiftsum.divisor_lemma_ratio(q, args.k, args.epsilon)
        worst = max(worst, ratio)
    rep.results["max_ratio"] = worst
    rep.record("max_ratio", worst, anchor="divisor_distribution_ratio")
    rep.check("max_ratio_under_cap", worst <= args.cap, worst, args.cap,
              anchor="divisor_distribution_frozen_constant")
    return rep


def _cmd_is_integral(args) -> Report:
    s = complex(args.s.replace("i", "j")) if isinstance(args.s, str) else complex(args.s)
    rep = Report("is-integral", {"s": str(args.s), "l": args.l, "n": args.n,
                                 "x": args.x, "k": args.k, "A": args.A})
    h = default_h()
    value, bound = shiftsum.shift_integral_Is(s, args.l, args.n, args.x, args.k, h, A=args.A)
    rep.results["value"] = value
    rep.results["bound"] = bound
    rep.record("value_over_bound", abs(value) / bound if bound else math.inf,
               anchor="pair_weight_integral_decay_majorant")
    if s == 0 and args.l > 0:
        rep.check("nonnegative_at_s0", value >= 0, value, 0,
                  anchor="nonnegative_kernel_product")
    return rep


def _cmd_weighted_sum(args) -> Report:
    table = _load_table(args.table, args.n_max)
    s = complex(args.s.replace("i", "j")) if isinstance(args.s, str) else complex(args.s)
    rep = Report("weighted-sum", {"table": args.table, "s": str(args.s), "l": args.l,
                                  "x": args.x, "n_max": args.n_max})
    h = default_h()
    value = shiftsum.weighted_shifted_sum(table, s, args.l, args.x, h)
    rep.results["value"] = value
    k = table.descriptor.weight
    xk = args.x * k
    primes = prime_sieve(int(xk))
    log_prod = float(np.sum(np.log1p(2.0 * np.abs(table.lam[primes]) / primes))) if len(primes) else 0.0
    rhs = math.exp(
        math.log(xk) + log_prod - (2.0 - 0.2) * math.log(math.log(xk))
        + log_gamma(k - 1).real - (k - 1) * math.log(4 * math.pi)
    )
    rep.record("value_over_global_bound", abs(value) / rhs,
               anchor="weighted_shifted_sum_global_majorant")
    return rep


def _cmd_rankin_selberg(args) -> Report:
    table = _load_table(args.table, args.n_max)
    k = table.descriptor.weight
    q = table.descriptor.level
    rep = Report("rankin-selberg", {"table": args.table, "grid": args.grid,
                                    "n_max": args.n_max, "prime_cutoff": args.prime_cutoff})
    numeric, formula, rel = autoeval.petersson_norm(
        table, k, q, autoeval.GridSpec(args.grid, args.grid), prime_cutoff=args.prime_cutoff
    )
    rep.results.update({"numeric": numeric, "formula": formula, "rel_err": rel})
    rep.check("norm_identity", rel <= 1e-2, rel, 1e-2,
              anchor="mass_total_equals_gamma_factor_times_adjoint_value")
    return rep


def _cmd_unfold(args) -> Report:
    table = _load_table(args.table, args.n_max)
    k = table.descriptor.weight
    q = table.descriptor.level
    rep = Report("unfold", {"table": args.table, "Y": args.Y, "grid": args.grid,
                            "n_max": args.n_max})
    lhs, rhs, rel = autoeval.unfolding_check(
        table, k, q, args.Y, default_h(), autoeval.GridSpec(args.grid, args.grid)
    )
    rep.results.update({"lhs": lhs, "rhs": rhs, "rel_err": rel})
    rep.check("unfolding_identity", rel <= 1e-2, rel, 1e-2,
              anchor="incomplete_series_mass_equals_divisor_strip_sum")
    return rep


def _cmd_eisenstein_residue(args) -> Report:
    rep = Report("eisenstein-residue", {"delta": args.delta})
    target = 3.0 / math.pi
    z1 = complex(0.0, 1.0)
    z2 = complex(0.3, 0.8)
    r1 = autoeval.eisenstein_residue_check(z1, args.delta)
    r2 = autoeval.eisenstein_residue_check(z2, args.delta)
    rep.results.update({"at_i": r1, "at_second_point": r2})
    rep.check("residue_value", abs(r1 - target) <= 5e-3, r1, 5e-3,
              anchor="eisenstein_pole_residue_is_inverse_volume")
    rep.check("residue_z_independent", abs(r1 - r2) <= 1e-2, abs(r1 - r2), 1e-2,
              anchor="eisenstein_pole_residue_constant_in_z")
    return rep


def _cmd_weyl_period(args) -> Report:
    table = _load_table(args.table, args.n_max)
    k = table.descriptor.weight
    q = table.descriptor.level
    rep = Report("weyl-period", {"table": args.table, "phi": args.phi, "Y": args.Y,
                                 "grid": args.grid, "n_max": args.n_max})
    grid = autoeval.GridSpec(args.grid, args.grid)
    if args.phi == "eisenstein":
        psi = default_h().scaled(args.Y)
        ratio, disc = autoeval.weyl_period(table, k, q, psi, grid)
        rep.results.update({"period_ratio": ratio, "discrepancy": disc})
        lhs, _, _ = autoeval.unfolding_check(table, k, q, args.Y, default_h(), grid)
        numeric, _, _ = autoeval.petersson_norm(table, k, q, grid)
        two_route = abs(ratio - lhs / numeric)
        rep.check("two_route_consistency", two_route <= 1e-4, two_route, 1e-4,
                  anchor="period_ratio_matches_unfolded_route")
    else:
        phi = autoeval.load_maass_fixture()
        if args.phi == "maass-odd":
            phi = autoeval.MaassFormData(r=phi.r, parity=-1, lam=phi.lam, n_max=phi.n_max)
        ratio, disc = autoeval.weyl_period(table, k, q, phi, grid)
        rep.results.update({"period_ratio": ratio, "discrepancy": disc})
        if args.phi == "maass-odd":
            rep.check("odd_period_vanishes", abs(ratio) <= 1e-10, ratio, 1e-10,
                      anchor="odd_test_function_period_vanishes")
        else:
            rep.record("period_ratio", ratio, anchor="cusp_form_period")
    return rep


# ------------------------------------------------------------- report-all


def _battery(n_max: int, grid: int, seed: int, x_shift: float):
    """(name, thunk) list for the full verification battery, fixed order."""
    h = default_h()

    def t_local():
        rep = Report("local-integral", {})
        rng = random.Random(seed)
        worst = 0.0
        for p in (2, 3, 5, 7, 11):
            for _ in range(20):
                sat = _random_unit_satake(rng, p)
                worst = max(worst, abs(weylint.tilde_ip(sat, route="brute") - 1.0 / p))
        rep.check("tilde_ip_random_unit", worst <= 1e-8, worst, 1e-8,
                  anchor="normalized_local_integral_equals_1_over_p")
        exact_ok = all(weylint.tilde_ip_exact(p, weylint.default_exact_alpha(p)) == Fraction(1, p)
                       for p in (2, 3, 5, 7, 11))
        rep.check("tilde_ip_exact", exact_ok, exact_ok, 0,
                  anchor="normalized_local_integral_equals_1_over_p_exact")
        for q in (6, 30, 210):
            prod, const = weylint.watson_finite_part(q)
            rep.check(f"finite_part_q{q}", prod == Fraction(1, q) and const == Fraction(1, 8 * q),
                      prod, 0, anchor="finite_part_product_is_1_over_8q")
        return rep

    def t_gf():
        rep = Report("weyl-gf", {})
        _, resid = weylint.weyl_generating_function(50)
        rep.check("bivariate_identity_residual", resid == 0, resid, 0,
                  anchor="length_generating_series_matches_closed_form")
        counts = weylint.length_counts(50)
        rep.check("length_counts", counts == [2] + [4] * 50, counts[:5], None,
                  anchor="specialized_series_counts_2_then_4_per_length")
        return rep

    def t_eta():
        rep = Report("eta-hecke", {})
        lim = min(n_max, 5000)
        for name, table in (("delta", coeffcore.delta_table(lim)), ("f11", coeffcore.f11_table(lim))):
            pv = {int(p): table.lam_at(int(p)) for p in prime_sieve(lim)}
            rpv = {int(p): table.raw[int(p)] for p in prime_sieve(lim)}
            ext = coeffcore.hecke_extend(pv, table.descriptor, lim, raw_prime_values=rpv)
            rep.check(f"hecke_reproduces_{name}", ext.raw == table.raw, lim, 0,
                      anchor="prime_recursion_reproduces_exact_expansion")
            margin = coeffcore.deligne_bound_margin(table)
            rep.check(f"divisor_bound_{name}", margin <= 1e-9, margin, 1e-9,
                      anchor="coefficient_divisor_bound")
        f11 = coeffcore.f11_table(200)
        rep.check("ramified_square", abs(f11.lam_at(11) ** 2 - 1 / 11) <= 1e-12,
                  f11.lam_at(11) ** 2, 1e-12, anchor="ramified_prime_square_is_1_over_p")
        return rep

    def t_psi():
        args = argparse.Namespace(l_max=2000)
        return _cmd_psi(args)

    def t_sieve():
        rep = Report("sieve-audit", {})
        for z in (5, 10):
            for l in (1, 4, 12):
                fibers = shiftsum.sieve_fibers(l, z, 10_000)
                total = sum(fibers.values())
                rep.check(f"partition_z{z}_l{l}", total == 10_000, total, 10_000,
                          anchor="friable_part_classes_partition_the_interval")
        return rep

    def t_shift():
        rep = Report("shifted-sum", {})
        worst = 0.0
        for name, table in (("delta", coeffcore.delta_table(int(x_shift) + 16)),
                            ("f11", coeffcore.f11_table(int(x_shift) + 16))):
            for l in range(1, 11):
                v = shiftsum.shifted_sum_exact(table, l, x_shift)
                b = shiftsum.holowinsky_bound(table, x_shift, 0.2)
                worst = max(worst, v / b)
        rep.record("max_ratio", worst, anchor="shifted_sum_over_friable_product_bound")
        rep.check("max_ratio_under_frozen", worst <= 1.0, worst, 1.0,
                  anchor="shifted_sum_frozen_calibration")
        return rep

    def t_divlemma():
        args = argparse.Namespace(count=200, seed=seed, omega_max=12, k=2, epsilon=0.1, cap=8.0)
        rep1 = _cmd_divisor_lemma(args)
        return rep1

    def t_is():
        rep = Report("is-integral", {})
        worst = 0.0
        for l in (1, 5):
            for n in (1, 10, 100):
                for x in (1.0, 10.0):
                    for k in (2, 12):
                        v, b = shiftsum.shift_integral_Is(0.0, l, n, x, k, h, A=3)
                        worst = max(worst, abs(v) / b)
        rep.record("max_value_over_bound", worst, anchor="pair_weight_integral_decay_majorant")
        rep.check("bounded_constant", worst <= 4.0, worst, 4.0,
                  anchor="pair_weight_integral_frozen_constant")
        return rep

    def t_weighted():
        rep = Report("weighted-sum", {})
        table = coeffcore.f11_table(n_max)
        vals = {}
        for s in (0.0, 0.2j):
            for l in (1, 3):
                vals[f"s{s}_l{l}"] = shiftsum.weighted_shifted_sum(table, s, l, 10.0, h)
        rep.results["values"] = {k2: v for k2, v in vals.items()}
        rep.record("values_finite", all(math.isfinite(v) for v in vals.values()),
                   anchor="weighted_shifted_sum_finite")
        return rep

    def t_rs():
        rep = Report("rankin-selberg", {})
        for name, table in (("delta", coeffcore.delta_table(n_max)),
                            ("f11", coeffcore.f11_table(n_max))):
            k = table.descriptor.weight
            q = table.descriptor.level
            _, _, rel = autoeval.petersson_norm(
                table, k, q, autoeval.GridSpec(grid, grid), prime_cutoff=min(10_000, n_max)
            )
            rep.check(f"norm_identity_{name}", rel <= 1e-2, rel, 1e-2,
                      anchor="mass_total_equals_gamma_factor_times_adjoint_value")
        return rep

    def t_unfold():
        rep = Report("unfold", {})
        for name, table in (("delta", coeffcore.delta_table(n_max)),
                            ("f11", coeffcore.f11_table(n_max))):
            k = table.descriptor.weight
            q = table.descriptor.level
            _, _, rel = autoeval.unfolding_check(
                table, k, q, 2.0, h, autoeval.GridSpec(grid, grid)
            )
            rep.check(f"unfolding_identity_{name}", rel <= 1e-2, rel, 1e-2,
                      anchor="incomplete_series_mass_equals_divisor_strip_sum")
        return rep

    def t_residue():
        return _cmd_eisenstein_residue(argparse.Namespace(delta=1e-3))

    def t_period():
        rep = Report("weyl-period", {})
        table = coeffcore.f11_table(n_max)
        phi = autoeval.load_maass_fixture()
        odd = autoeval.MaassFormData(r=phi.r, parity=-1, lam=phi.lam, n_max=phi.n_max)
        ratio, _ = autoeval.weyl_period(table, 2, 11, odd, autoeval.GridSpec(grid, grid))
        rep.check("odd_period_vanishes", abs(ratio) <= 1e-10, ratio, 1e-10,
                  anchor="odd_test_function_period_vanishes")
        return rep

    return [
        ("local-integral", t_local),
        ("weyl-gf", t_gf),
        ("eta-hecke", t_eta),
        ("psi", t_psi),
        ("sieve-audit", t_sieve),
        ("shifted-sum", t_shift),
        ("divisor-lemma", t_divlemma),
        ("is-integral", t_is),
        ("weighted-sum", t_weighted),
        ("rankin-selberg", t_rs),
        ("unfold", t_unfold),
        ("eisenstein-residue", t_residue),
        ("weyl-period", t_period),
    ]


def _cmd_report_all(args) -> Report:
    # parallelism is execution plumbing: like wall time it stays out of the
    # canonical body so identical runs are byte-identical at any worker count
    rep = Report("report-all", {"n_max": args.n_max, "grid": args.grid,
                                "seed": args.seed, "x_shift": args.x_shift})
    tasks = _battery(args.n_max, args.grid, args.seed, args.x_shift)
    if args.parallelism > 1:
        with ThreadPoolExecutor(max_workers=args.parallelism) as pool:
            futures = [pool.submit(fn) for _, fn in tasks]
            results = [f.result() for f in futures]
    else:
        results = [fn() for _, fn in tasks]
    for (name, _), sub in zip(tasks, results):
        for c in sub.checks:
            rep.add_check(f"{name}.{c.name}", c.status, c.value, c.tolerance, c.anchor)
    return rep


# ----------------------------------------------------------------- plumbing


_DEFAULTS = {
    "local-integral": {"p": 2, "lambda_p": 0.0, "trunc": 60, "mode": "float",
                       "exact_alpha": "3/2"},
    "weyl-gf": {"order": 50},
    "eta": {"pattern": "1:24", "n": 10},
    "ingest": {},
    "shifted-sum": {"table": "delta", "l": 1, "x": 1000.0, "epsilon": 0.2, "n_max": 2000},
    "sieve-audit": {"x": 10_000.0, "z": 5.0, "l": 1},
    "psi": {"l_max": 2000},
    "divisor-lemma": {"count": 200, "seed": 20260810, "omega_max": 12, "k": 2,
                      "epsilon": 0.1, "cap": 8.0},
    "is-integral": {"s": "0", "l": 1, "n": 1, "x": 10.0, "k": 12, "A": 3},
    "weighted-sum": {"table": "f11", "s": "0", "l": 1, "x": 10.0, "n_max": 20_000},
    "rankin-selberg": {"table": "delta", "grid": 24, "n_max": 100_100,
                       "prime_cutoff": 100_000},
    "unfold": {"table": "f11", "Y": 2.0, "grid": 32, "n_max": 100_100},
    "eisenstein-residue": {"delta": 1e-3},
    "weyl-period": {"table": "f11", "phi": "eisenstein", "Y": 2.0, "grid": 32,
                    "n_max": 100_100},
    "report-all": {"n_max": 20_000, "grid": 20, "seed": 20260810, "x_shift": 10_000.0},
}

_HANDLERS = {
    "local-integral": _cmd_local_integral,
    "weyl-gf": _cmd_weyl_gf,
    "eta": _cmd_eta,
    "ingest": _cmd_ingest,
    "shifted-sum": _cmd_shifted_sum,
    "sieve-audit": _cmd_sieve_audit,
    "psi": _cmd_psi,
    "divisor-lemma": _cmd_divisor_lemma,
    "is-integral": _cmd_is_integral,
    "weighted-sum": _cmd_weighted_sum,
    "rankin-selberg": _cmd_rankin_selberg,
    "unfold": _cmd_unfold,
    "eisenstein-residue": _cmd_eisenstein_residue,
    "weyl-period": _cmd_weyl_period,
    "report-all": _cmd_report_all,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cuspmass",
                                     description="desk-scale verification toolkit")
    parser.add_argument("--config", type=str, default=None, help="JSON defaults file")
    sub = parser.add_subparsers(dest="subcommand")

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--output", "-o", type=str, default=None)
        p.add_argument("--format", choices=("json", "csv-summary"), default="json")
        return p

    p = add("local-integral")
    p.add_argument("--p", type=int)
    p.add_argument("--lambda-p", dest="lambda_p", type=float)
    p.add_argument("--trunc", type=int)
    p.add_argument("--mode", choices=("float", "extended", "exact"))
    p.add_argument("--exact-alpha", dest="exact_alpha", type=str)

    p = add("weyl-gf")
    p.add_argument("--order", type=int)

    p = add("eta")
    p.add_argument("--pattern", type=str)
    p.add_argument("--n", type=int)

    p = add("ingest")
    p.add_argument("--path", type=str, required=True)
    p.add_argument("--extended-bits", dest="extended_bits", type=int, default=0)

    p = add("shifted-sum")
    p.add_argument("--table", type=str)
    p.add_argument("--l", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)

    p = add("sieve-audit")
    p.add_argument("--x", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--l", type=int)

    p = add("psi")
    p.add_argument("--l-max", dest="l_max", type=int)

    p = add("divisor-lemma")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--omega-max", dest="omega_max", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cap", type=float)

    p = add("is-integral")
    p.add_argument("--s", type=str)
    p.add_argument("--l", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--A", type=int)

    p = add("weighted-sum")
    p.add_argument("--table", type=str)
    p.add_argument("--s", type=str)
    p.add_argument("--l", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)

    p = add("rankin-selberg")
    p.add_argument("--table", type=str)
    p.add_argument("--grid", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--prime-cutoff", dest="prime_cutoff", type=int)

    p = add("unfold")
    p.add_argument("--table", type=str)
    p.add_argument("--Y", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)

    p = add("eisenstein-residue")
    p.add_argument("--delta", type=float)

    p = add("weyl-period")
    p.add_argument("--table", type=str)
    p.add_argument("--phi", choices=("eisenstein", "maass-even", "maass-odd"))
    p.add_argument("--Y", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)

    p = add("report-all")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--x-shift", dest="x_shift", type=float)
    p.add_argument("--parallelism", type=int, default=None)

    return parser


def _apply_defaults(args: argparse.Namespace, config: dict) -> None:
    sub = args.subcommand
    merged = dict(_DEFAULTS.get(sub, {}))
    merged.update(config.get(sub, {}))
    for key, val in merged.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    if sub == "report-all" and args.parallelism is None:
        args.parallelism = int(os.environ.get("CUSPMASS_PARALLELISM", "1"))


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cuspmass: bad config: {exc}", file=sys.stderr)
            return 3
    _apply_defaults(args, config)
    handler = _HANDLERS[args.subcommand]
    t0 = time.monotonic()
    try:
        report = handler(args)
    except _VALIDATION_ERRORS as exc:
        print(f"cuspmass: validation error: {exc}", file=sys.stderr)
        return 3
    except _COMPUTE_ERRORS as exc:
        print(f"cuspmass: computation error: {exc}", file=sys.stderr)
        return 4
    report.wall_time_ms = int((time.monotonic() - t0) * 1000)
    text = render_json(report) if args.format == "json" else render_csv_summary(report)
    if args.output:
        try:
            emit_report(report, args.output, args.format)
        except OSError as exc:
            print(f"cuspmass: cannot write report: {exc}", file=sys.stderr)
            return 4
    else:
        sys.stdout.write(text)
    print(f"cuspmass: {args.subcommand} finished in {report.wall_time_ms} ms", file=sys.stderr)
    return 0 if report.all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
