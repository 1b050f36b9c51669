"""Shifted convolution sums, sieve decompositions, and weighted sum bounds.

Conventions for every inequality implemented here: the right-hand side is
coded with implied constant 1, and callers (tests, CLI audits) record the
empirical ratio instead of asserting an absolute constant the theory does
not name.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .arith import divisor_count_table, divisors, euler_phi, factorize, is_squarefree, prime_sieve
from .coeffcore import CoefficientTable
from .errors import DomainError, InfeasibleError, TableRangeError
from .specfun import log_gamma
from .testfns import TestFunctionH, adaptive_quadrature

_FOUR_PI = 4.0 * math.pi


# ---------------------------------------------------------------- queries


@dataclass(frozen=True)
class ShiftQuery:
    l: int
    x: float
    epsilon: float
    table: CoefficientTable

    def __post_init__(self):
        if self.l == 0:
            raise DomainError("shift l must be nonzero")
        if self.x < 1:
            raise DomainError("x must be >= 1")
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class WeightedQuery:
    s: complex
    l: int
    x: float
    k: int

    def __post_init__(self):
        _check_strip(self.s)
        if self.l == 0:
            raise DomainError("shift l must be nonzero")
        if self.x < 1:
            raise DomainError("x must be >= 1")
        if self.k < 2:
            raise DomainError("weight must be >= 2")


@dataclass(frozen=True)
class SieveTriple:
    a: int
    b: int
    c: int
    z: float

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 1:
            raise DomainError("triple entries must be positive")
        if math.gcd(self.a, self.b) != 1:
            raise DomainError(f"gcd({self.a}, {self.b}) != 1")
        for v in (self.a, self.b, self.c):
            for p, _ in factorize(v):
                if p > self.z:
                    raise DomainError(f"prime {p} | {v} exceeds z = {self.z}")


def _check_strip(s: complex) -> complex:
    s = complex(s)
    if s.imag != 0.0 and s.real != 0.0:
        raise DomainError(f"s = {s} must be purely imaginary or real in (-1/2, 1/2)")
    if s.imag == 0.0 and not -0.5 < s.real < 0.5:
        raise DomainError(f"real s = {s.real} outside (-1/2, 1/2)")
    return s


def kappa_s(s: complex, ys) -> np.ndarray:
    """Bessel kernel 2 |y|^(1/2) K_s(2 pi |y|), elementwise; 0 at y = 0."""
    s = _check_strip(s)
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    ay = np.abs(ys)
    out = np.zeros_like(ay)
    mask = ay > 0
    arg = 2.0 * math.pi * ay[mask]
    if s.imag != 0.0:
        kv = kernels.kbessel_imag(s.imag, arg)
    else:
        kv = kernels.kbessel_real(s.real, arg)
    out[mask] = 2.0 * np.sqrt(ay[mask]) * kv
    return out


def kappa_holo(k: int, ys) -> np.ndarray:
    """Holomorphic kernel y^(k/2) e^(-2 pi y) for y > 0, elementwise."""
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    out = np.zeros_like(ys)
    mask = ys > 0
    y = ys[mask]
    lg = 0.5 * k * np.log(y) - 2.0 * math.pi * y
    out[mask] = np.where(lg > -745.0, np.exp(np.maximum(lg, -745.0)), 0.0)
    return out


# ----------------------------------------------------------- exact sums


def shifted_sum_exact(table: CoefficientTable, l: int, x: float) -> float:
    """sum over n >= 1, m = n + l >= 1, max(m, n) <= x of |lam(m) lam(n)|."""
    if l == 0:
        raise DomainError("shift l must be nonzero")
    if x < 1:
        raise DomainError("x must be >= 1")
    if abs(l) > x:
        warnings.warn(f"|l| = {abs(l)} exceeds x = {x}: empty shifted sum", stacklevel=2)
        return 0.0
    fx = math.floor(x)
    n_lo = max(1, 1 - l)
    n_hi = fx - max(l, 0)
    if n_hi < n_lo:
        return 0.0
    if n_hi + max(l, 0) > table.n_max:
        raise TableRangeError(n_hi + max(l, 0), table.n_max, "shifted_sum_exact")
    n = np.arange(n_lo, n_hi + 1)
    vals = np.abs(table.lam[n + l] * table.lam[n])
    return float(np.sum(vals))


def holowinsky_bound(table: CoefficientTable, x: float, epsilon: float) -> float:
    """x prod_(p <= x) (1 + 2|lam(p)|/p) / log(e x)^(2 - epsilon), constant 1."""
    if x < 1:
        raise DomainError("x must be >= 1")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    primes = prime_sieve(int(x))
    if len(primes) and primes[-1] > table.n_max:
        raise TableRangeError(int(primes[-1]), table.n_max, "holowinsky_bound")
    log_prod = 0.0
    if len(primes):
        lamp = np.abs(table.lam[primes])
        log_prod = float(np.sum(np.log1p(2.0 * lamp / primes)))
    return x * math.exp(log_prod) / math.log(math.e * x) ** (2.0 - epsilon)


# --------------------------------------------------------------- sieve part


def z_part_triple(n: int, l: int, z: float) -> SieveTriple:
    """Decompose the friable parts of m = n + l and n as (a c, b c), gcd(a,b) = 1."""
    if n < 1 or n + l < 1:
        raise DomainError(f"need n >= 1 and n + l >= 1, got n = {n}, l = {l}")
    if z < 2:
        raise DomainError("z must be >= 2")
    zp = [int(p) for p in prime_sieve(int(z))]

    def friable(v: int) -> int:
        part = 1
        for p in zp:
            while v % p == 0:
                v //= p
                part *= p
        return part

    zm = friable(n + l)
    zn = friable(n)
    c = math.gcd(zm, zn)
    return SieveTriple(a=zm // c, b=zn // c, c=c, z=z)


def sieve_fibers(l: int, z: float, x: float) -> dict[tuple[int, int, int], int]:
    """Counts of n <= x by their (a, b, c) class; the fibers partition [1, x]."""
    n_max = math.floor(x)
    zp = prime_sieve(int(z))
    zn, zm = kernels.zparts(n_max, l, zp)
    out: dict[tuple[int, int, int], int] = {}
    for n in range(1, n_max + 1):
        if n + l < 1:
            continue
        c = math.gcd(int(zm[n]), int(zn[n]))
        key = (int(zm[n]) // c, int(zn[n]) // c, c)
        out[key] = out.get(key, 0) + 1
    return out


def sieve_class_count(
    a: int, b: int, c: int, l: int, z: float, x: float
) -> tuple[int, float]:
    """Exact fiber count and the large-sieve style majorant with constant 1."""
    if c < 1 or l % c != 0:
        raise DomainError(f"c = {c} must divide l = {l}")
    SieveTriple(a=a, b=b, c=c, z=z)  # validates the class shape
    fibers = sieve_fibers(l, z, x)
    exact = fibers.get((a, b, c), 0)
    y = max(a * c, b * c)
    lc = abs(l) // c
    rhs = (x + (y * z) ** 2) / math.log(z) ** 2 * abs(l) / (c**2 * euler_phi(a * b * lc))
    return exact, rhs


def psi_prime_power(p: int, a: int) -> Fraction:
    """Closed form at a prime power, derived by summing the definition:

        psi(p^a) = 1/(1 - 1/p) + 9 (a+1)^2 / p^a
                   + 9/(1 - 1/p) * sum_{i=1}^{a-1} (i+1)^2 / p^i.
    """
    if a < 1:
        raise DomainError("exponent must be >= 1")
    geom = 1 / (1 - Fraction(1, p))
    val = geom + Fraction(9 * (a + 1) ** 2, p**a)
    val += 9 * geom * sum(Fraction((i + 1) ** 2, p**i) for i in range(1, a))
    return val


def psi_function(l: int) -> Fraction:
    """sum over c | l of (1/c) (l/c)/phi(l/c) prod_(p^v || c) (3v + 3)^2, exact."""
    if l < 1:
        raise DomainError("l must be >= 1")
    total = Fraction(0)
    for c in divisors(l):
        lc = l // c
        weight = Fraction(1, c) * Fraction(lc, euler_phi(lc))
        for _, v in factorize(c) if c > 1 else ():
            weight *= (3 * v + 3) ** 2
        total += weight
    return total


# ------------------------------------------------------------- quality M_f


def mf_quality(
    table: CoefficientTable, x: float, prime_cutoff: int = 100_000
) -> tuple[float, tuple[float, float]]:
    """prod_(p <= x)(1 + 2|lam(p)|/p) / (log(e x)^2 L), L the adjoint value at 1.

    Returns (value, (lower, upper)) with the interval induced by the
    truncated adjoint product's tail bound.
    """
    from .coeffcore import adjoint_L_at_1

    if x < 1:
        raise DomainError("x must be >= 1")
    primes = prime_sieve(int(x))
    if len(primes) and primes[-1] > table.n_max:
        raise TableRangeError(int(primes[-1]), table.n_max, "mf_quality numerator")
    log_num = 0.0
    if len(primes):
        lamp = np.abs(table.lam[primes])
        log_num = float(np.sum(np.log1p(2.0 * lamp / primes)))
    lval, ltail = adjoint_L_at_1(table, prime_cutoff=min(prime_cutoff, table.n_max))
    denom_log2 = math.log(math.e * x) ** 2
    value = math.exp(log_num) / (denom_log2 * lval)
    hi = math.inf if ltail >= lval else math.exp(log_num) / (denom_log2 * (lval - ltail))
    lo = math.exp(log_num) / (denom_log2 * (lval + ltail))
    return value, (lo, hi)


# ------------------------------------------------------- weight integrals


def mellin_transform_h(h: TestFunctionH, s: complex) -> complex:
    """h^(s) over the compact support, adaptive to ~1e-12 relative."""
    return h.mellin(s)


def is_lemma_bound(n: int, l: int, x: float, k: int, A: int = 3) -> float:
    """Gamma(k-1)/(4 pi)^(k-1) sqrt(m n) max(1, max(m,n)/(x k))^(-A), constant 1."""
    if k < 2:
        raise DomainError("weight must be >= 2")
    m = n + l
    if m < 1 or n < 1:
        raise DomainError("need n >= 1 and m = n + l >= 1")
    lg = (
        log_gamma(k - 1).real
        - (k - 1) * math.log(_FOUR_PI)
        + 0.5 * (math.log(m) + math.log(n))
        - A * math.log(max(1.0, max(m, n) / (x * k)))
    )
    return math.exp(lg)


def shift_integral_Is(
    s: complex,
    l: int,
    n: int,
    x: float,
    k: int,
    h: TestFunctionH,
    A: int = 3,
) -> tuple[float, float]:
    """The weight integral of one shifted pair, with its decay majorant.

    value = integral of h(x y) kappa_s(l y) kappa(m y) kappa(n y) y^(-2) dy
    over the support of h(x .), by adaptive panel-doubling quadrature;
    the bound is ``is_lemma_bound`` at the same (n, l, x, k, A).
    """
    s = _check_strip(s)
    if k < 2:
        raise DomainError("weight must be >= 2")
    m = n + l
    if m < 1 or n < 1:
        raise DomainError("need n >= 1 and m = n + l >= 1")
    y_lo = h.y0 / x
    y_hi = h.y1 / x

    def integrand(y):
        return (
            h(np.asarray(y) * x)
            * np.real(kappa_s(s, l * np.asarray(y)))
            * kappa_holo(k, m * np.asarray(y))
            * kappa_holo(k, n * np.asarray(y))
            / np.asarray(y) ** 2
        )

    value = float(adaptive_quadrature(integrand, y_lo, y_hi, rel_tol=1e-11))
    return value, is_lemma_bound(n, l, x, k, A)


_CERT_EXPONENTS = (3, 4, 6, 8, 12, 16, 20, 24)


def _term_envelopes(l: int, x: float, k: int, n_lo: int, n_hi: int, tau: np.ndarray) -> np.ndarray:
    """Upper bounds tau(m) tau(n)/sqrt(mn) * min_A lemma_bound(n) per index."""
    n = np.arange(n_lo, n_hi + 1, dtype=np.float64)
    m = n + l
    valid = m >= 1
    lg_gamma = log_gamma(k - 1).real - (k - 1) * math.log(_FOUR_PI)
    ratio = np.log(np.maximum(1.0, np.maximum(m, n) / (x * k)))
    best = np.min(np.stack([A * ratio for A in _CERT_EXPONENTS]), axis=0)
    tau_m = np.where(valid, tau[np.maximum(m.astype(np.int64), 1)], 0)
    tau_n = tau[n.astype(np.int64)]
    env = tau_m * tau_n * np.exp(lg_gamma - best)
    return np.where(valid, env, 0.0)


def weighted_shifted_sum(
    table: CoefficientTable,
    s: complex,
    l: int,
    x: float,
    h: TestFunctionH,
    k: int | None = None,
    trunc_multiplier: float = 32.0,
    tail_fraction: float = 1e-10,
) -> float:
    """sum over pairs of lam(m) lam(n)/sqrt(mn) times the weight integral.

    Terms are accumulated in ascending n; the sum is cut where the decay
    majorant certifies the remaining tail below tail_fraction of the
    running value, never beyond trunc_multiplier * x * k.
    """
    s = _check_strip(s)
    if l == 0:
        raise DomainError("shift l must be nonzero")
    if k is None:
        k = table.descriptor.weight
    n_start = max(1, 1 - l)
    n_cap_policy = int(math.ceil(trunc_multiplier * x * k))
    n_cap_table = table.n_max - max(l, 0)
    n_cap = min(n_cap_policy, n_cap_table)
    if n_cap < n_start:
        raise TableRangeError(n_start + max(l, 0), table.n_max, "weighted_shifted_sum")

    tau = divisor_count_table(n_cap + max(l, 0)).astype(np.float64)
    env = _term_envelopes(l, x, k, n_start, n_cap, tau)
    suffix = np.concatenate([np.cumsum(env[::-1])[::-1], [0.0]])

    y_lo = h.y0 / x
    y_hi = h.y1 / x
    glx, glw = np.polynomial.legendre.leggauss(24)

    def node_set(panels: int):
        edges = np.linspace(y_lo, y_hi, panels + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        hw = 0.5 * (edges[1] - edges[0])
        ys = (mids[:, None] + hw * glx[None, :]).ravel()
        wts = np.tile(glw, panels) * hw
        outer = h(ys * x) * np.real(kappa_s(s, l * ys)) / ys**2
        return ys, wts * outer

    # pass 1: find the certified truncation point with a coarse node set,
    # accumulating coefficient blocks incrementally at fixed nodes
    ys8, w8 = node_set(8)
    n_hi = n_start - 1
    running = 0.0
    certified = False
    while n_hi < n_cap:
        nxt = min(n_hi + 8192, n_cap)
        inner = kernels.holo_pair_sums(table.lam, k, l, ys8, n_hi + 1, nxt)
        running += float(np.sum(w8 * inner))
        n_hi = nxt
        idx = n_hi - n_start + 1
        if suffix[idx] <= tail_fraction * max(abs(running), 1e-300):
            certified = True
            break
    if not certified and n_cap < n_cap_policy:
        raise TableRangeError(
            n_cap_policy + max(l, 0), table.n_max, "weighted_shifted_sum truncation"
        )
    n_star = n_hi

    # pass 2: adaptive in the node count at fixed n_star; the stopping floor
    # is tied to the uncancelled node mass so cancellation-heavy sums do not
    # chase roundoff
    def total_with(panels: int, with_absref: bool = False):
        ys, w = node_set(panels)
        vals = w * kernels.holo_pair_sums(table.lam, k, l, ys, n_start, n_star)
        if with_absref:
            return float(np.sum(vals)), float(np.sum(np.abs(vals)))
        return float(np.sum(vals))

    panels = 8
    prev, absref = total_with(8, with_absref=True)
    for _ in range(6):
        panels *= 2
        cur = total_with(panels)
        if abs(cur - prev) <= max(1e-9 * abs(cur), 1e-14 * absref):
            return cur
        prev = cur
    return prev


def shifted_sum_for_query(query: ShiftQuery) -> float:
    """Exact shifted sum of the query's own table at its (l, x)."""
    return shifted_sum_exact(query.table, query.l, query.x)


def weighted_shifted_sum_for_query(
    table: CoefficientTable, query: WeightedQuery, h: TestFunctionH
) -> float:
    return weighted_shifted_sum(table, query.s, query.l, query.x, h, k=query.k)


def divisor_lemma_ratio(q: int, k: int, epsilon: float) -> tuple[float, float, float]:
    """Divisor-distribution comparison: lhs sum, rhs majorant, their ratio."""
    if not is_squarefree(q):
        raise DomainError(f"q = {q} must be squarefree")
    if k < 2 or k % 2:
        raise DomainError("k must be even and >= 2")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    omega = len(factorize(q)) if q > 1 else 0
    if omega > 30:
        raise InfeasibleError(f"omega(q) = {omega} > 30: divisor explosion")
    lhs = sum(d / math.log(d * k) ** (2.0 - epsilon) for d in divisors(q))
    rhs = q * math.log(math.e + math.log(q)) / math.log(q * k) ** (2.0 - epsilon)
    return lhs, rhs, lhs / rhs


def divisor_weighted_sum(
    table: CoefficientTable,
    q: int,
    s: complex,
    l: int,
    big_y: float,
    h: TestFunctionH,
    k: int | None = None,
) -> float:
    """sum over d | q of the weighted shifted sum at shift d l and length d Y.

    Divisor terms are independent; they are combined in ascending-divisor
    order for reproducibility.
    """
    if not is_squarefree(q):
        raise DomainError(f"q = {q} must be squarefree")
    if big_y < 1:
        raise DomainError("Y must be >= 1")
    total = 0.0
    for d in divisors(q):
        total += weighted_shifted_sum(table, s, d * l, d * big_y, h, k=k)
    return total
