"""Iwahori-cell enumeration and local triple-product integrals at a prime p.

The extended Weyl group here is generated by two order-two reflections and
one length-zero involution; every element is canonically u_(a,b,n) or
v_(a,b,n) with the two families agreeing exactly when b = n = 0 (those
elements are stored only in family U).  Each element carries two lengths:
``lam`` (word length in the reflections, which sets the cell volume) and
``mu`` (the diagonal Cartan coordinate, which sets the spherical matrix
coefficient).

The local integral of one spherical and two squared special matrix
coefficients is a sum of Macdonald values over the cells; it collapses to a
rational closed form, and after dividing by the standard local-factor
normalizer the answer is 1/p independently of the Satake parameters.  That
identity is checked here in floating point, in arbitrary precision, and
exactly over Q(sqrt(p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .coeffcore import SatakeLocalData
from .errors import ConsistencyError, DegenerateSatakeError, DomainError
from .scalars import QuadExt
from .arith import factorize, is_squarefree

# --------------------------------------------------------------- Weyl group


@dataclass(frozen=True, order=True)
class WeylElement:
    family: str  # "U" or "V"
    a: int
    b: int
    n: int

    def __post_init__(self):
        if self.family not in ("U", "V"):
            raise DomainError(f"family must be U or V, got {self.family}")
        if self.a not in (0, 1) or self.b not in (0, 1) or self.n < 0:
            raise DomainError(f"bad element parameters {self}")
        if self.family == "V" and self.b == 0 and self.n == 0:
            raise DomainError("elements with b = n = 0 are canonical only in family U")

    @property
    def mu(self) -> int:
        if self.family == "U":
            return 2 * self.n + self.a
        return 2 * (self.n + self.b) - self.a

    @property
    def lam(self) -> int:
        return 2 * self.n + self.b


def enumerate_weyl(lam_max: int) -> list[WeylElement]:
    """All canonical elements with lam <= lam_max, sorted by (lam, mu, family, a)."""
    if lam_max < 0:
        raise DomainError("lam_max must be >= 0")
    out = []
    for n in range(0, lam_max // 2 + 1):
        for b in (0, 1):
            if 2 * n + b > lam_max:
                continue
            for a in (0, 1):
                out.append(WeylElement("U", a, b, n))
                if not (b == 0 and n == 0):
                    out.append(WeylElement("V", a, b, n))
    out.sort(key=lambda w: (w.lam, w.mu, w.family, w.a))
    return out


def length_counts(lam_max: int) -> list[int]:
    """Number of canonical elements of each word length 0..lam_max."""
    counts = [0] * (lam_max + 1)
    for w in enumerate_weyl(lam_max):
        counts[w.lam] += 1
    return counts


@dataclass(frozen=True)
class BivariateSeries:
    """Truncated exact series in (x, t); entries with i + j > order are unreliable."""

    order: int
    coeffs: tuple  # (order+1) x (order+1) nested tuples of Fraction

    def coeff(self, i: int, j: int) -> Fraction:
        return self.coeffs[i][j]


def _closed_form_grid(n: int):
    grid = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for k in range(n + 1):
        grid[k][k] += 1  # (xt)^k
        if k + 1 <= n:
            grid[k + 1][k] += 1  # x (xt)^k
            grid[k][k + 1] += 1  # t (xt)^k
            grid[k + 1][k + 1] += 1  # xt (xt)^k
    return grid


def weyl_generating_function(order: int) -> tuple[BivariateSeries, Fraction]:
    """Enumeration series sum x^mu t^lam and its residual against the closed form.

    The closed form is (1+x)(1+t)/(1-xt); the residual is the maximum
    absolute difference over all entries with i + j <= order, computed in
    exact rational arithmetic (it must vanish identically).
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    grid = [[Fraction(0)] * (order + 1) for _ in range(order + 1)]
    for w in enumerate_weyl(order):
        if w.mu <= order:
            grid[w.mu][w.lam] += 1
    closed = _closed_form_grid(order)
    residual = Fraction(0)
    for i in range(order + 1):
        for j in range(order + 1 - i):
            residual = max(residual, abs(grid[i][j] - closed[i][j]))
    series = BivariateSeries(order=order, coeffs=tuple(tuple(row) for row in grid))
    return series, residual


# ------------------------------------------------------------ scalar setups


def _float_env(satake: SatakeLocalData):
    p = satake.p
    isp = 1.0 / math.sqrt(p)
    return complex(satake.alpha), complex(satake.beta), complex(isp), p


def _exact_env(p: int, alpha) -> tuple:
    alpha = Fraction(alpha)
    if alpha == 0:
        raise DomainError("exact Satake parameter must be nonzero")
    if alpha * alpha >= p:
        raise DomainError(f"|alpha|^2 = {alpha * alpha} must be < p = {p}")
    if (1 / alpha) ** 2 >= p:
        raise DomainError(f"|beta|^2 = {(1 / alpha) ** 2} must be < p = {p}")
    a = QuadExt.from_rational(p, alpha)
    b = QuadExt.from_rational(p, 1 / alpha)
    isp = QuadExt(p, 0, Fraction(1, p))  # sqrt(p)/p = p^(-1/2)
    return a, b, isp, p


def _mp_env(satake: SatakeLocalData):
    p = satake.p
    isp = 1 / mpmath.sqrt(p)
    return mpmath.mpc(satake.alpha), mpmath.mpc(satake.beta), isp, p


# ------------------------------------------------------- matrix coefficient


def _macdonald_generic(alpha, beta, isp, m: int):
    # (1 + p^-1)^-1 p^(-m/2) [alpha^m (alpha - p^-1 beta) - beta^m (beta - p^-1 alpha)] / (alpha - beta)
    pinv = isp * isp
    diff = alpha - beta
    num = alpha**m * (alpha - pinv * beta) - beta**m * (beta - pinv * alpha)
    return (isp**m) * num / diff / (1 + pinv)


def macdonald_coefficient(satake: SatakeLocalData, m: int):
    """Spherical matrix coefficient at the diagonal element of valuation m."""
    if m < 0:
        raise DomainError("m must be >= 0")
    alpha, beta, isp, _ = _float_env(satake)
    if abs(alpha - beta) <= 1e-9:
        raise DegenerateSatakeError(f"alpha = beta = {alpha}: removable singularity rejected")
    return _macdonald_generic(alpha, beta, isp, m)


def macdonald_coefficient_exact(p: int, alpha, m: int) -> QuadExt:
    a, b, isp, _ = _exact_env(p, alpha)
    if a == b:
        raise DegenerateSatakeError("alpha = beta in exact mode")
    return _macdonald_generic(a, b, isp, m)


# ------------------------------------------------------------ local integral


def _ip_brute_generic(alpha, beta, isp, p: int, lam_max: int):
    pinv = isp * isp
    total = None
    for w in enumerate_weyl(lam_max):
        term = _macdonald_generic(alpha, beta, isp, w.mu) * pinv ** w.lam
        total = term if total is None else total + term
    total = total / (p + 1)
    # geometric tail: 4 elements per length, |Phi(mu)| <= C rho^mu p^(-mu/2)
    # with mu >= lam - 1 and rho = max(|alpha|, |beta|) < sqrt(p); a floor of
    # a few ulps covers float roundoff in the cell sum itself
    rho = max(abs(alpha), abs(beta))
    c0 = (abs(alpha - beta * pinv) + abs(beta - alpha * pinv)) / abs(alpha - beta)
    ratio = (rho / math.sqrt(p)) / p
    lead = 4.0 * float(c0) / ((p + 1) * (1 + 1.0 / p)) * (math.sqrt(p) / rho if rho > 0 else 1.0)
    tail = lead * ratio ** (lam_max + 1) / (1.0 - ratio)
    tail += 16.0 * 2.220446049250313e-16 * (1.0 + abs(total))
    return total, tail


def ip_brute_force(satake: SatakeLocalData, lam_max: int = 60) -> tuple[complex, float]:
    """Cell-by-cell truncated local integral and a rigorous geometric tail bound."""
    if lam_max < 2:
        raise DomainError("lam_max must be >= 2")
    alpha, beta, isp, p = _float_env(satake)
    if abs(alpha - beta) <= 1e-9:
        raise DegenerateSatakeError("alpha = beta")
    return _ip_brute_generic(alpha, beta, isp, p, lam_max)


def ip_brute_force_exact(p: int, alpha, lam_max: int = 60) -> tuple[QuadExt, float]:
    a, b, isp, _ = _exact_env(p, alpha)
    if a == b:
        raise DegenerateSatakeError("alpha = beta in exact mode")
    return _ip_brute_generic(a, b, isp, p, lam_max)


def _ip_closed_generic(alpha, beta, isp, p: int):
    pinv = isp * isp
    isp3 = isp * pinv
    num = (1 + alpha * isp) * (1 + beta * isp)
    den = (1 - alpha * isp3) * (1 - beta * isp3)
    return pinv * (1 - pinv) * num / den


def ip_closed_form(satake: SatakeLocalData) -> complex:
    """Closed form of the local integral (valid even at alpha = beta)."""
    alpha, beta, isp, p = _float_env(satake)
    return _ip_closed_generic(alpha, beta, isp, p)


def ip_closed_form_exact(p: int, alpha) -> QuadExt:
    a, b, isp, _ = _exact_env(p, alpha)
    return _ip_closed_generic(a, b, isp, p)


def _tilde_normalizer(alpha, beta, isp, p: int):
    """zeta_p(2)^3/zeta_p(2) * L_p(1/2, triple) / (L_p(1, ad phi) L_p(1, ad f)^2).

    Written exactly as displayed (the cubed-over-first zeta quotient is kept
    verbatim rather than simplified to the square).
    """
    pinv = isp * isp
    isp3 = isp * pinv
    one_m = 1 - pinv
    for name, val in (
        ("zeta_p(2)", one_m * (1 + pinv)),
        ("L_p(1, ad phi)", (1 - alpha * alpha * pinv) * one_m * (1 - beta * beta * pinv)),
        ("L_p(1/2, triple)", (1 - alpha * isp) * (1 - beta * isp) * (1 - alpha * isp3) * (1 - beta * isp3)),
    ):
        if abs(val) == 0.0:
            raise DomainError(f"pole in local factor {name}")
    zeta2 = 1 / (1 - pinv * pinv)
    l_adf = zeta2
    l_adphi = 1 / ((1 - alpha * alpha * pinv) * one_m * (1 - beta * beta * pinv))
    l_half = 1 / (
        (1 - alpha * isp) * (1 - beta * isp) * (1 - alpha * isp3) * (1 - beta * isp3)
    )
    return (zeta2**3 / zeta2) * l_half / (l_adphi * l_adf * l_adf)


def tilde_ip(
    satake: SatakeLocalData,
    route: str = "closed",
    lam_max: int = 60,
    precision_bits: int | None = None,
):
    """Normalized local integral; equals 1/p for every valid input.

    route="closed" uses the closed form; route="brute" uses the truncated
    cell sum (requires alpha != beta).  precision_bits switches the closed
    route to arbitrary-precision arithmetic.
    """
    if route not in ("closed", "brute"):
        raise DomainError(f"unknown route {route!r}")
    if precision_bits is not None and precision_bits > 53:
        with mpmath.workprec(precision_bits):
            alpha, beta, isp, p = _mp_env(satake)
            ip = _ip_closed_generic(alpha, beta, isp, p)
            val = ip / _tilde_normalizer(alpha, beta, isp, p)
            return complex(val)
    alpha, beta, isp, p = _float_env(satake)
    if route == "brute":
        if abs(alpha - beta) <= 1e-9:
            raise DegenerateSatakeError("alpha = beta: brute-force route rejected")
        ip, _ = _ip_brute_generic(alpha, beta, isp, p, lam_max)
    else:
        ip = _ip_closed_generic(alpha, beta, isp, p)
    return ip / _tilde_normalizer(alpha, beta, isp, p)


def tilde_ip_exact(p: int, alpha) -> Fraction:
    """Exact-mode normalized local integral over Q(sqrt(p)); returns a rational."""
    a, b, isp, _ = _exact_env(p, alpha)
    ip = _ip_closed_generic(a, b, isp, p)
    val = ip / _tilde_normalizer(a, b, isp, p)
    if not val.is_rational:
        raise ConsistencyError(f"normalized local integral not rational: {val!r}")
    return val.as_rational()


# --------------------------------------------------------- assembled factors


def watson_local_factor(p: int, split_case: str, eps_p: int | None = None) -> Fraction:
    """Local correction by how many of the three levels p divides."""
    if split_case not in ("none", "two", "three"):
        raise DomainError(f"split_case must be none/two/three, got {split_case!r}")
    if (eps_p is not None) != (split_case == "three"):
        raise DomainError("eps_p must be supplied exactly when split_case is 'three'")
    if split_case == "none":
        return Fraction(1)
    if split_case == "two":
        return Fraction(1, p)
    if eps_p not in (1, -1):
        raise DomainError(f"eps_p must be +-1, got {eps_p}")
    return Fraction(1, p) * (1 + Fraction(1, p)) * (1 + eps_p)


def default_exact_alpha(p: int) -> Fraction:
    """A nondegenerate rational Satake parameter with alpha^2 and alpha^(-2) below p."""
    return Fraction(5, 4) if p == 2 else Fraction(3, 2)


def watson_finite_part(
    q: int, exact_alphas: dict[int, Fraction] | None = None
) -> tuple[Fraction, Fraction]:
    """Exact product of normalized local integrals over p | q, plus 1/8 of it.

    The product must equal 1/q; any discrepancy is an internal bug, not an
    input problem, and raises ConsistencyError.
    """
    if q < 1 or not is_squarefree(q):
        raise DomainError(f"q must be squarefree positive, got {q}")
    product = Fraction(1)
    for p, _ in factorize(q) if q > 1 else ():
        alpha = (exact_alphas or {}).get(p, default_exact_alpha(p))
        val = tilde_ip_exact(p, alpha)
        if val != Fraction(1, p):
            raise ConsistencyError(f"exact normalized integral at p = {p} gave {val}, expected 1/{p}")
        product *= val
    return product, Fraction(1, 8) * product
