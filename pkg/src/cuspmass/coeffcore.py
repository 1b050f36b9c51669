"""Newform Fourier coefficient data: generation, normalization, extension.

Coefficient sources are eta products with exact integer q-expansions; the two
built-ins (level 1 weight 12 and level 11 weight 2) double as self-contained
oracles for everything downstream.  Exact expansions use gmpy2 integers with
Kronecker-substitution polynomial multiplication, so n up to ~1e5 stays
well under a second per form.

Normalized coefficients lam(n) = a(n) / n^((k-1)/2) are stored as float64;
raw integers are kept alongside when available so Hecke-recursion checks can
be made with zero tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import gmpy2
import numpy as np

from .arith import divisor_count_table, factorize, is_squarefree, prime_sieve
from .errors import (
    DegenerateSatakeError,
    DomainError,
    IncompleteDataError,
    ParseError,
    ValidationError,
)

# --------------------------------------------------------------- data types


@dataclass(frozen=True)
class NewformDescriptor:
    weight: int
    level: int
    atkin_lehner_signs: dict[int, int] | None = None

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2 != 0:
            raise DomainError(f"weight must be a positive even integer, got {self.weight}")
        if self.level < 1 or not is_squarefree(self.level):
            raise DomainError(f"level must be a positive squarefree integer, got {self.level}")
        if self.atkin_lehner_signs:
            for p, eps in self.atkin_lehner_signs.items():
                if self.level % p != 0:
                    raise DomainError(f"Atkin-Lehner sign at p = {p} but p does not divide {self.level}")
                if eps not in (1, -1):
                    raise DomainError(f"Atkin-Lehner sign must be +-1, got {eps}")


@dataclass(frozen=True)
class CoefficientTable:
    descriptor: NewformDescriptor
    lam: np.ndarray  # lam[n] for 1 <= n <= n_max; lam[0] unused
    n_max: int
    raw: list[int] | None = None  # raw[n] = a(n), same indexing, raw[0] unused

    def lam_at(self, n: int) -> float:
        if not 1 <= n <= self.n_max:
            raise DomainError(f"n = {n} outside table range [1, {self.n_max}]")
        return float(self.lam[n])

    def restricted(self, n_max: int) -> "CoefficientTable":
        if n_max > self.n_max:
            raise DomainError(f"cannot extend table by restriction ({n_max} > {self.n_max})")
        raw = self.raw[: n_max + 1] if self.raw is not None else None
        return CoefficientTable(self.descriptor, self.lam[: n_max + 1], n_max, raw)


@dataclass(frozen=True)
class SatakeLocalData:
    p: int
    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(self.alpha * self.beta - 1.0) > 1e-12:
            raise DomainError(f"alpha*beta = {self.alpha * self.beta} != 1")
        bound = math.sqrt(self.p)
        if not (abs(self.alpha) < bound and abs(self.beta) < bound):
            raise DomainError(
                f"|alpha| = {abs(self.alpha):.6g}, |beta| = {abs(self.beta):.6g} "
                f"must be < sqrt({self.p}) for convergence"
            )

    @property
    def lambda_p(self) -> complex:
        return self.alpha + self.beta


@dataclass(frozen=True)
class EtaPattern:
    """Map d -> exponent e_d defining prod_d eta(d z)^(e_d)."""

    exponents: dict[int, int]

    def __post_init__(self):
        if not self.exponents:
            raise DomainError("eta pattern must be nonempty")
        for d, e in self.exponents.items():
            if d < 1 or e == 0:
                raise DomainError(f"bad eta pattern entry {d}: {e}")

    @property
    def implied_level(self) -> int:
        lvl = 1
        for d in self.exponents:
            lvl = lvl * d // math.gcd(lvl, d)
        return lvl

    @property
    def weight_offset_numerator(self) -> int:
        return sum(d * e for d, e in self.exponents.items())


DELTA_PATTERN = EtaPattern({1: 24})  # level 1, weight 12
F11_PATTERN = EtaPattern({1: 2, 11: 2})  # level 11, weight 2


# -------------------------------------------------- exact eta-product engine


def _eta3_sparse(n_max: int, step: int) -> dict[int, int]:
    # cube of the Euler product: sum_{j>=0} (-1)^j (2j+1) x^(step*j(j+1)/2)
    out: dict[int, int] = {}
    j = 0
    while step * j * (j + 1) // 2 <= n_max:
        out[step * j * (j + 1) // 2] = (-1) ** (j & 1) * (2 * j + 1)
        j += 1
    return out


def _pentagonal_sparse(n_max: int, step: int) -> dict[int, int]:
    out: dict[int, int] = {0: 1}
    j = 1
    while True:
        e1 = step * j * (3 * j - 1) // 2
        e2 = step * j * (3 * j + 1) // 2
        if e1 > n_max and e2 > n_max:
            break
        sign = (-1) ** (j & 1)
        if e1 <= n_max:
            out[e1] = out.get(e1, 0) + sign
        if e2 <= n_max:
            out[e2] = out.get(e2, 0) + sign
        j += 1
    return out


def _sparse_mul(a: dict[int, int], b: dict[int, int], n_max: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e <= n_max:
                out[e] = out.get(e, 0) + ca * cb
    return out


def _dense(d: dict[int, int], n_max: int) -> list:
    out = [0] * (n_max + 1)
    for e, c in d.items():
        out[e] = c
    return out


def _kron_encode(poly: list, width: int):
    pos = [int(c) if c > 0 else 0 for c in poly]
    neg = [int(-c) if c < 0 else 0 for c in poly]
    return gmpy2.pack(pos, width) - gmpy2.pack(neg, width)


def _kron_decode(big, n_out: int, width: int) -> list:
    negate = big < 0
    if negate:
        big = -big
    limbs = gmpy2.unpack(big, width)
    half = 1 << (width - 1)
    full = 1 << width
    out = [0] * n_out
    carry = 0
    for i in range(min(len(limbs), n_out)):
        v = int(limbs[i]) + carry
        if v >= half:
            v -= full
            carry = 1
        else:
            carry = 0
        out[i] = -v if negate else v
    return out


def _poly_mul(a: list, b: list, n_max: int) -> list:
    """Exact integer polynomial product truncated at degree n_max."""
    ma = max((abs(c) for c in a), default=0) or 1
    mb = max((abs(c) for c in b), default=0) or 1
    width = (min(len(a), len(b)) * ma * mb * 2).bit_length() + 2
    prod = _kron_encode(a, width) * _kron_encode(b, width)
    return _kron_decode(prod, n_max + 1, width)


def _poly_pow(base: list, e: int, n_max: int) -> list:
    result = None
    sq = base
    while e:
        if e & 1:
            result = sq if result is None else _poly_mul(result, sq, n_max)
        e >>= 1
        if e:
            sq = _poly_mul(sq, sq, n_max)
    return result if result is not None else [1] + [0] * n_max


def _poly_inverse(a: list, n_max: int) -> list:
    """Newton iteration for 1/a(x) mod x^(n_max+1); needs a[0] in {1, -1}."""
    if a[0] not in (1, -1):
        raise DomainError("power-series inverse needs unit constant term")
    inv = [a[0]]
    prec = 1
    while prec <= n_max:
        prec = min(2 * prec, n_max + 1)
        t = _poly_mul(a[:prec], inv, prec - 1)
        # inv <- inv * (2 - a*inv)
        t = [-c for c in t]
        t[0] += 2
        inv = _poly_mul(inv, t, prec - 1)
    return inv[: n_max + 1]


def _eta_power_series(step: int, e: int, n_max: int) -> list:
    """prod_{j>=1} (1 - x^(step*j))^e as a dense integer list through x^n_max."""
    mag = abs(e)
    if mag % 3 == 0:
        base_sparse = _eta3_sparse(n_max, step)
        exponent = mag // 3
    else:
        base_sparse = _pentagonal_sparse(n_max, step)
        exponent = mag
    if exponent == 1:
        dense = _dense(base_sparse, n_max)
    elif exponent == 2:
        dense = _dense(_sparse_mul(base_sparse, base_sparse, n_max), n_max)
    else:
        sq = _dense(_sparse_mul(base_sparse, base_sparse, n_max), n_max)
        dense = _poly_pow(sq, exponent // 2, n_max)
        if exponent & 1:
            dense = _poly_mul(dense, _dense(base_sparse, n_max), n_max)
    if e < 0:
        dense = _poly_inverse(dense, n_max)
    return dense


def eta_product_expansion(pattern: EtaPattern, n_max: int) -> list[int]:
    """Exact integer coefficients a(1..n_max) of the eta product.

    The expansion of prod_d eta(d z)^(e_d) begins at the power
    sum(d e_d)/24, which must be a nonnegative integer here (it is 1 for
    both built-in patterns); a(n) is the coefficient of q^n.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    num = pattern.weight_offset_numerator
    if num % 24 != 0 or num < 0:
        raise DomainError(
            f"eta pattern has leading power {num}/24; need a nonnegative integer"
        )
    offset = num // 24
    prod: list | None = None
    for d, e in sorted(pattern.exponents.items()):
        part = _eta_power_series(d, e, n_max)
        prod = part if prod is None else _poly_mul(prod, part, n_max)
    out = [0] * (n_max + 1)
    for n in range(max(offset, 1), n_max + 1):
        out[n] = int(prod[n - offset])
    return out[1:]


# ------------------------------------------------------------ normalization


def normalize_coefficients(
    a: list[int],
    k: int,
    level: int = 1,
    atkin_lehner_signs: dict[int, int] | None = None,
) -> CoefficientTable:
    """lam(n) = a(n) / n^((k-1)/2); raw integers retained."""
    if not a or a[0] != 1:
        raise ValidationError("lambda(1) = 1", witness=1, detail=f"a(1) = {a[0] if a else 'missing'}")
    desc = NewformDescriptor(weight=k, level=level, atkin_lehner_signs=atkin_lehner_signs)
    n_max = len(a)
    n = np.arange(0, n_max + 1, dtype=np.float64)
    n[0] = 1.0
    raw = [0] + [int(v) for v in a]
    lam = np.asarray(raw, dtype=np.float64) / n ** ((k - 1) / 2.0)
    lam[0] = 0.0
    return CoefficientTable(descriptor=desc, lam=lam, n_max=n_max, raw=raw)


def delta_table(n_max: int) -> CoefficientTable:
    """Level 1, weight 12 built-in, from its exact eta expansion."""
    return normalize_coefficients(eta_product_expansion(DELTA_PATTERN, n_max), k=12, level=1)


def f11_table(n_max: int) -> CoefficientTable:
    """Level 11, weight 2 built-in, from its exact eta expansion."""
    return normalize_coefficients(eta_product_expansion(F11_PATTERN, n_max), k=2, level=11)


# ------------------------------------------------------------ Hecke theory


def _prime_power_lams(lam_p: float, p: int, ramified: bool, top: int) -> list[float]:
    """[lam(p^0), ..., lam(p^top)] by the Hecke recursion."""
    out = [1.0, lam_p]
    for _ in range(top - 1):
        if ramified:
            out.append(out[-1] * lam_p)
        else:
            out.append(lam_p * out[-1] - out[-2])
    return out[: top + 1]


def _prime_power_raws(a_p: int, p: int, k: int, ramified: bool, top: int) -> list[int]:
    out = [1, a_p]
    pk = p ** (k - 1)
    for _ in range(top - 1):
        if ramified:
            out.append(out[-1] * a_p)
        else:
            out.append(a_p * out[-1] - pk * out[-2])
    return out[: top + 1]


def hecke_extend(
    prime_values: dict[int, float],
    descriptor: NewformDescriptor,
    n_max: int,
    raw_prime_values: dict[int, int] | None = None,
) -> CoefficientTable:
    """Extend prime eigenvalues to all n <= n_max.

    Unramified primes follow lam(p^(r+1)) = lam(p) lam(p^r) - lam(p^(r-1));
    primes dividing the level satisfy lam(p^r) = lam(p)^r.  Values at
    composite n are filled in multiplicatively.  When raw integer prime
    values are supplied the raw sequence is extended too, exactly, using
    a(p^(r+1)) = a(p) a(p^r) - p^(k-1) a(p^(r-1)) away from the level.
    """
    for p in prime_sieve(n_max).tolist():
        if p not in prime_values:
            raise IncompleteDataError(f"missing prime eigenvalue at p = {p} <= {n_max}")
        if raw_prime_values is not None and p not in raw_prime_values:
            raise IncompleteDataError(f"missing raw prime coefficient at p = {p} <= {n_max}")
    lam, raw = _multiplicative_fill(prime_values, descriptor, n_max, raw_prime_values)
    return CoefficientTable(descriptor=descriptor, lam=lam, n_max=n_max, raw=raw)


def _multiplicative_fill(prime_values, descriptor, n_max, raw_prime_values):
    q = descriptor.level
    k = descriptor.weight
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in prime_sieve(n_max).tolist():
        spf[p::p][spf[p::p] == 0] = p
    lam = np.zeros(n_max + 1)
    lam[0] = 0.0
    if n_max >= 1:
        lam[1] = 1.0
    raw = [0] * (n_max + 1) if raw_prime_values is not None else None
    if raw is not None and n_max >= 1:
        raw[1] = 1
    pw_lam_cache: dict[int, list[float]] = {}
    pw_raw_cache: dict[int, list[int]] = {}
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if p not in pw_lam_cache:
            top = int(math.log(n_max) / math.log(p) + 1e-9)
            ram = q % p == 0
            pw_lam_cache[p] = _prime_power_lams(float(prime_values[p]), p, ram, top)
            if raw is not None:
                pw_raw_cache[p] = _prime_power_raws(int(raw_prime_values[p]), p, k, ram, top)
        lam[n] = pw_lam_cache[p][e] * lam[m]
        if raw is not None:
            raw[n] = pw_raw_cache[p][e] * raw[m]
    return lam, raw


def satake_from_lambda(lambda_p: float, p: int) -> SatakeLocalData:
    """Roots of x^2 - lambda(p) x + 1; rejects the double-root case."""
    lam = float(lambda_p)
    if abs(abs(lam) - 2.0) < 1e-14:
        raise DegenerateSatakeError(f"lambda(p) = {lam} gives a double root alpha = beta")
    cap = math.sqrt(p) + 1.0 / math.sqrt(p)
    if abs(lam) >= cap:
        raise DomainError(f"|lambda(p)| = {abs(lam):.6g} >= sqrt(p) + 1/sqrt(p) = {cap:.6g}")
    disc = lam * lam - 4.0
    if disc < 0:
        root = complex(0.0, math.sqrt(-disc))
    else:
        root = complex(math.sqrt(disc), 0.0)
    alpha = (lam + root) / 2.0
    beta = (lam - root) / 2.0
    # enforce alpha*beta = 1 exactly up to rounding by dividing out
    beta = 1.0 / alpha
    return SatakeLocalData(p=p, alpha=alpha, beta=beta)


# ------------------------------------------------------------- adjoint L(1)

_ADJOINT_HORIZON = 10_000_000


def adjoint_L_at_1(
    table: CoefficientTable,
    q: int | None = None,
    prime_cutoff: int = 100_000,
    horizon: int = _ADJOINT_HORIZON,
) -> tuple[float, float]:
    """Truncated Euler product for the adjoint L-value at 1.

    The local factor is zeta_p(2) at primes dividing the level and
    [(1 - alpha^2/p)(1 - 1/p)(1 - beta^2/p)]^(-1) elsewhere, written in
    terms of lam(p)^2 = (alpha + beta)^2.  Returns (value, tail_bound)
    where tail_bound dominates |value(P') - value(P)| for any larger
    cutoff P' up to the stated horizon: each omitted factor lies between
    [(1 + 1/p)^2 (1 - 1/p)]^(-1) and (1 - 1/p)^(-3) by the coefficient
    bound |lam(p)| <= 2.
    """
    if q is None:
        q = table.descriptor.level
    if prime_cutoff > table.n_max:
        raise IncompleteDataError(
            f"adjoint product to P = {prime_cutoff} needs lam(p) for p <= P; table ends at {table.n_max}"
        )
    primes = prime_sieve(prime_cutoff)
    log_val = 0.0
    if len(primes):
        pf = primes.astype(np.float64)
        lamp = table.lam[primes]
        ram = np.array([q % int(p) == 0 for p in primes])
        u = lamp**2 - 1.0
        # (1-alpha^2/p)(1-1/p)(1-beta^2/p) = 1 - u/p + u/p^2 - 1/p^3, u = lam(p)^2 - 1
        unram_log = -np.log1p(-u / pf + u / pf**2 - 1.0 / pf**3)
        ram_log = -np.log1p(-1.0 / pf**2)
        log_val = float(np.sum(np.where(ram, ram_log, unram_log)))
    value = math.exp(log_val)

    hp = prime_sieve(min(horizon, _ADJOINT_HORIZON))
    tail_primes = hp[hp > prime_cutoff].astype(np.float64)
    if len(tail_primes) == 0:
        return value, 0.0
    s_hi = float(np.sum(-3.0 * np.log1p(-1.0 / tail_primes)))
    s_lo = float(np.sum(-(2.0 * np.log1p(1.0 / tail_primes) + np.log1p(-1.0 / tail_primes))))
    tail_bound = value * max(math.expm1(s_hi), -math.expm1(s_lo))
    return value, tail_bound


# ---------------------------------------------------------------- file I/O


def write_coefficients(path, table: CoefficientTable) -> None:
    """CSV `n,a_n` plus `.meta.json` sidecar, UTF-8 with LF endings."""
    if table.raw is None:
        raise DomainError("export requires raw integer coefficients")
    path = Path(path)
    lines = ["n,a_n"]
    for n in range(1, table.n_max + 1):
        lines.append(f"{n},{table.raw[n]}")
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    meta = {
        "level": table.descriptor.level,
        "weight": table.descriptor.weight,
    }
    if table.descriptor.atkin_lehner_signs:
        meta["atkin_lehner"] = {str(p): s for p, s in table.descriptor.atkin_lehner_signs.items()}
    sidecar = path.with_suffix(".meta.json")
    sidecar.write_bytes((json.dumps(meta, sort_keys=True, indent=2) + "\n").encode("utf-8"))


def ingest_coefficients(path, fmt: str = "csv") -> tuple[NewformDescriptor, CoefficientTable]:
    """Read a `n,a_n` CSV with its sidecar and validate every invariant."""
    if fmt != "csv":
        raise DomainError(f"unsupported format {fmt!r}")
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    sidecar = path.with_suffix(".meta.json")
    if not sidecar.exists():
        raise ParseError(f"missing sidecar {sidecar.name}")
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"sidecar is not valid JSON: {exc}") from exc
    for key in ("level", "weight"):
        if key not in meta:
            raise ParseError(f"sidecar missing required key {key!r}")
    al = None
    if "atkin_lehner" in meta and meta["atkin_lehner"] is not None:
        al = {int(p): int(s) for p, s in meta["atkin_lehner"].items()}

    a: list[int] = []
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "n,a_n":
            raise ParseError(f"expected header 'n,a_n', got {header!r}", line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected 'n,a_n', got {line!r}", line=lineno)
            try:
                n = int(parts[0])
                an = int(parts[1])
            except ValueError as exc:
                raise ParseError(f"non-integer entry {line!r}", line=lineno) from exc
            if n != len(a) + 1:
                raise ParseError(f"n must increase from 1 without gaps; got n = {n}", line=lineno)
            a.append(an)
    if not a:
        raise ParseError("no coefficient rows")
    table = normalize_coefficients(a, k=int(meta["weight"]), level=int(meta["level"]), atkin_lehner_signs=al)
    validate_table(table)
    return table.descriptor, table


# --------------------------------------------------------------- validation


def validate_table_extended(table: CoefficientTable, precision_bits: int = 120) -> None:
    """Re-check the tolerance-sensitive invariants at higher precision.

    Recomputes lam(n) = a(n)/n^((k-1)/2) from the raw integers with the
    requested significand width and verifies the ramified-prime square and
    the divisor bound with a tolerance scaled to that precision.
    """
    import mpmath

    if table.raw is None:
        raise DomainError("extended validation requires raw integer coefficients")
    k = table.descriptor.weight
    q = table.descriptor.level
    tau = divisor_count_table(table.n_max)
    with mpmath.workprec(precision_bits):
        tol = mpmath.mpf(2) ** (10 - precision_bits)
        for n in range(1, table.n_max + 1):
            lam_n = mpmath.mpf(table.raw[n]) / mpmath.mpf(n) ** (mpmath.mpf(k - 1) / 2)
            if abs(lam_n) > tau[n] + tol:
                raise ValidationError("|lambda(n)| <= tau(n)", witness=n)
        for p, _ in factorize(q):
            if p <= table.n_max:
                lam_p = mpmath.mpf(table.raw[p]) / mpmath.mpf(p) ** (mpmath.mpf(k - 1) / 2)
                if abs(lam_p**2 - mpmath.mpf(1) / p) > tol:
                    raise ValidationError("lambda(p)^2 = 1/p for p | level", witness=p)


def validate_table(table: CoefficientTable, deligne_limit: int | None = None) -> None:
    """Check every table invariant; raise on the first violation.

    Order: lam(1) = 1, the divisor bound |lam(n)| <= tau(n), coprime
    multiplicativity, and lam(p)^2 = 1/p at primes dividing the level.
    """
    n_max = table.n_max if deligne_limit is None else min(deligne_limit, table.n_max)
    lam = table.lam
    if abs(lam[1] - 1.0) > 1e-12:
        raise ValidationError("lambda(1) = 1", witness=1, detail=f"lambda(1) = {lam[1]}")
    tau = divisor_count_table(n_max)
    bad = np.nonzero(np.abs(lam[1 : n_max + 1]) > tau[1:] + 1e-9)[0]
    if len(bad):
        n = int(bad[0]) + 1
        raise ValidationError(
            "|lambda(n)| <= tau(n)", witness=n, detail=f"|{lam[n]:.12g}| > {tau[n]}"
        )
    for m in range(2, int(math.isqrt(n_max)) + 1):
        ns = np.arange(m + 1, n_max // m + 1)
        if len(ns) == 0:
            continue
        ns = ns[np.gcd(ns, m) == 1]
        if len(ns) == 0:
            continue
        resid = np.abs(lam[m * ns] - lam[m] * lam[ns])
        bad = np.nonzero(resid > 1e-9)[0]
        if len(bad):
            n = int(ns[bad[0]])
            raise ValidationError(
                "lambda(mn) = lambda(m)lambda(n) for coprime m, n",
                witness=m * n,
                detail=f"m = {m}, n = {n}, residual {resid[bad[0]]:.3g}",
            )
    q = table.descriptor.level
    for p, _ in factorize(q):
        if p <= n_max and abs(lam[p] ** 2 - 1.0 / p) > 1e-12:
            raise ValidationError(
                "lambda(p)^2 = 1/p for p | level",
                witness=p,
                detail=f"lambda({p})^2 = {lam[p] ** 2:.15g} != 1/{p}",
            )


def deligne_bound_margin(table: CoefficientTable, n_limit: int | None = None) -> float:
    """max over n of |lam(n)| - tau(n); <= ~1e-9 when the bound holds."""
    n_max = table.n_max if n_limit is None else min(n_limit, table.n_max)
    tau = divisor_count_table(n_max)
    return float(np.max(np.abs(table.lam[1 : n_max + 1]) - tau[1:]))
