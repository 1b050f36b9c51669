"""Numerical evaluation of automorphic objects on the upper half-plane.

Evaluators (newform mass, real-analytic and incomplete Eisenstein series,
Maass forms) work from Fourier expansions with certified exponential tails.
Quadrature over a modular curve splits at a height Y_cut: below it, tensor
Gauss-Legendre on the curvilinear standard domain mapped to a rectangle;
above it, the cusp neighborhoods unfold to one-dimensional integrals of
Fourier-mode products, one per divisor of the level (the divisors are
exactly the cusp widths for squarefree level, and the scaling matrices act
on the mass with eigenvalue +-1, which squares away).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels
from .arith import divisors, factorize, is_squarefree
from .coeffcore import CoefficientTable, adjoint_L_at_1
from .errors import DomainError, InfeasibleError, ParseError, QuadratureError, TableRangeError
from .shiftsum import kappa_holo, kappa_s
from .specfun import log_gamma, scattering_m, upper_gamma_int, xi
from .testfns import IncompleteEisensteinData, TestFunctionH, adaptive_quadrature

# ----------------------------------------------------------- basic geometry


@dataclass(frozen=True)
class UpperHalfPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.y <= 0:
            raise DomainError(f"not an upper half-plane point: {self.x} + {self.y}i")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def _as_complex(z) -> complex:
    if isinstance(z, UpperHalfPoint):
        return z.z
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= 0:
        raise DomainError(f"not an upper half-plane point: {z}")
    return z


def _mobius(mat, z: complex) -> complex:
    a, b, c, d = mat
    return (a * z + b) / (c * z + d)


def reduce_to_fundamental_domain(z) -> tuple[complex, tuple[int, int, int, int]]:
    """Translate/invert into |Re| <= 1/2, |z| >= 1; returns (gamma z, gamma)."""
    z = _as_complex(z)
    a, b, c, d = 1, 0, 0, 1
    for _ in range(10_000):
        n = round(z.real)
        z -= n
        a, b = a - n * c, b - n * d
        if abs(z) < 1.0 - 1e-15:
            z = -1.0 / z
            a, b, c, d = -c, -d, a, b
        else:
            break
    else:
        raise QuadratureError(f"fundamental-domain reduction did not terminate at {z}")
    return z, (a, b, c, d)


def gamma0_reduce(z, q: int) -> complex:
    """Maximize Im within the level-q orbit (partial reduction; q = 1 is full)."""
    z = _as_complex(z)
    if q == 1:
        return reduce_to_fundamental_domain(z)[0]
    for _ in range(10_000):
        z -= round(z.real)
        y = z.imag
        best = None
        c = q
        while c * c * y * y < 1.0:
            d0 = -int(round(c * z.real))
            for d in (d0, d0 - 1, d0 + 1, d0 - 2, d0 + 2):
                if math.gcd(c, d) != 1:
                    continue
                norm = abs(c * z + d) ** 2
                if norm < 1.0 - 1e-14 and (best is None or norm < best[0]):
                    best = (norm, c, d)
            c += q
        if best is None:
            return z
        _, c, d = best
        g, a, b = _ext_gcd(d, -c)
        z = (a * z + b) / (c * z + d)
    raise QuadratureError("level-q reduction did not terminate")


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    """g, u, v with u x + v y = g.  Used to complete (c, d) to determinant 1."""
    if y == 0:
        return (x, 1, 0) if x > 0 else (-x, -1, 0)
    g, u, v = _ext_gcd(y, x % y)
    return g, v, u - (x // y) * v


def coset_representatives(q: int) -> list[tuple[int, int, int, int]]:
    """Matrices splitting the level-1 group into level-q right cosets.

    For squarefree q the classes are indexed by (c, j) with c | q and
    j mod q/c; the bottom row (c, d) has d = j mod q/c and d = 1 mod c.
    Pairwise inequivalence is verified by the lower-row test mod q.
    """
    if q < 1 or not is_squarefree(q):
        raise DomainError(f"q must be positive squarefree, got {q}")
    index = q
    for p, _ in factorize(q) if q > 1 else ():
        index += index // p
    if index > 100_000:
        raise InfeasibleError(f"index {index} > 1e5: quadrature infeasible")
    reps = []
    for c in divisors(q):
        w = q // c
        for j in range(w):
            # d = j (mod w), d = 1 (mod c); c, w coprime since q squarefree
            d = _crt(j, w, 1, c)
            if d == 0:
                d += q
            # balanced lift keeps |c z + d| small on the standard domain
            d -= q * round(d / q) if c > 1 else 0
            while math.gcd(c, d) != 1:
                d += w
            g, a, b = _ext_gcd(d, -c)
            assert g == 1 and a * d - b * c == 1
            reps.append((a, b, c, d))
    if len(reps) != index:
        raise QuadratureError(f"built {len(reps)} cosets, expected {index}")
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if _same_class(reps[i], reps[j], q):
                raise QuadratureError(f"cosets {i} and {j} coincide")
    return reps


def _same_class(r1, r2, q) -> bool:
    a1, b1, c1, d1 = r1
    a2, b2, c2, d2 = r2
    # r1 * r2^(-1) lower-left entry
    ll = c1 * d2 - d1 * c2
    return ll % q == 0


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    if m1 == 1:
        return r2 % m2 if m2 > 1 else 0
    if m2 == 1:
        return r1 % m1
    g, u, v = _ext_gcd(m1, m2)
    assert g == 1
    return (r1 * v * m2 + r2 * u * m1) % (m1 * m2)


# -------------------------------------------------------------- mass values


def required_terms_mass(k: int, y: float, tol: float) -> int:
    return max(4, math.ceil((0.5 * k + math.log(1.0 / tol)) / (2.0 * math.pi * y)))


def eval_newform_mass(
    table: CoefficientTable, k: int, z, tol: float = 1e-10, reduce: bool = True
) -> float:
    """y^k |f(z)|^2 from the truncated expansion, tail below tol."""
    z = _as_complex(z)
    if reduce:
        z = gamma0_reduce(z, table.descriptor.level)
    n_req = required_terms_mass(k, z.imag, tol)
    if n_req > table.n_max:
        raise TableRangeError(n_req, table.n_max, f"mass at y = {z.imag:.4g}")
    out = kernels.holo_fourier(
        table.lam, k, np.array([z.real]), np.array([z.imag]), n_req
    )
    return float(out[0])


def _mass_pushforward_grid(
    table: CoefficientTable,
    k: int,
    q: int,
    reps,
    zs: np.ndarray,
    tol: float,
) -> np.ndarray:
    """sum over cosets of y^k |f|^2 at gamma_i z for a flat array of points."""
    total = np.zeros(zs.shape[0])
    for a, b, c, d in reps:
        w = (a * zs + b) / (c * zs + d)
        if q > 1:
            w = np.array([gamma0_reduce(t, q) for t in w.tolist()])
        n_req = required_terms_mass(k, float(np.min(w.imag)), tol)
        if n_req > table.n_max:
            raise TableRangeError(n_req, table.n_max, "pushforward mass grid")
        total += kernels.holo_fourier(table.lam, k, np.ascontiguousarray(w.real), np.ascontiguousarray(w.imag), n_req)
    return total


# ------------------------------------------------------------- Eisenstein


def _divisor_power_sum(n: int, s: complex) -> complex:
    """lambda_s(n) = sum over ab = n of (a/b)^s."""
    return sum((a * a / n) ** s for a in divisors(n))


def eval_eisenstein(s: complex, z, tol: float = 1e-12, reduce: bool = True) -> complex:
    """Real-analytic Eisenstein series by its Fourier expansion, Re(s) > 1/2.

    The point is reduced first (disable via ``reduce`` to exercise the
    expansion at unreduced points); the constant term is y^s + M(s) y^(1-s)
    and the oscillatory part pairs divisor sums with Bessel kernels against
    the completed zeta at 2s.
    """
    s = complex(s)
    if s == 1.0:
        raise DomainError("pole at s = 1")
    if s.real <= 0.5:
        raise DomainError(f"Re(s) = {s.real} <= 1/2 outside implemented range")
    if reduce:
        z, _ = reduce_to_fundamental_domain(z)
    else:
        z = _as_complex(z)
    y = z.imag
    out = y**s + scattering_m(s) * y ** (1.0 - s)
    xi2s = xi(2.0 * s)
    nu = s - 0.5
    n_cut = max(3, math.ceil((math.log(1.0 / tol) + 8.0 + 2.0 * abs(nu)) / (2.0 * math.pi * y)))
    ns = np.arange(1, n_cut + 1, dtype=np.float64)
    if abs(nu.imag) < 1e-300:
        kv = kernels.kbessel_real(nu.real, 2.0 * math.pi * ns * y)
    else:
        kv = _kbessel_complex_order(nu, 2.0 * math.pi * ns * y)
    osc = 0.0 + 0.0j
    for n in range(1, n_cut + 1):
        lam_n = _divisor_power_sum(n, nu)
        kappa = 2.0 * math.sqrt(n * y) * kv[n - 1]
        osc += lam_n / math.sqrt(n) * kappa * 2.0 * math.cos(2.0 * math.pi * n * z.real)
    return out + osc / xi2s


def _kbessel_complex_order(nu: complex, xs: np.ndarray) -> np.ndarray:
    import mpmath

    out = np.empty(len(xs), dtype=np.complex128)
    with mpmath.workprec(80):
        for i, x in enumerate(xs):
            out[i] = complex(mpmath.besselk(mpmath.mpc(nu.real, nu.imag), x))
    return out


def eisenstein_residue_check(z, delta: float = 1e-3) -> float:
    """delta * E(1 + delta, z): first-order approximation of the residue 3/pi."""
    if not 0 < delta <= 0.1:
        raise DomainError("delta must lie in (0, 0.1]")
    val = eval_eisenstein(1.0 + delta, z)
    return float(delta * val.real)


def eval_incomplete_eisenstein(data: IncompleteEisensteinData, z) -> float:
    """Direct orbit sum of Psi(Im(gamma z)); finitely many nonzero terms."""
    z = _as_complex(z)
    psi = data.psi
    y = z.imag
    total = float(psi(np.array([y]))[0])
    c_max = math.sqrt(y / psi.y0) / y
    c = 1
    while c <= c_max:
        r2 = y / psi.y0 - c * c * y * y
        if r2 >= 0:
            r = math.sqrt(r2)
            d_lo = math.ceil(-c * z.real - r)
            d_hi = math.floor(-c * z.real + r)
            for d in range(d_lo, d_hi + 1):
                if math.gcd(c, d) != 1:
                    continue
                im = y / abs(c * z + d) ** 2
                total += float(psi(np.array([im]))[0])
        c += 1
    return total


# ------------------------------------------------------------- Maass forms


@dataclass(frozen=True)
class MaassFormData:
    """Spectral parameter, parity, and coefficients of a level-1 cusp form."""

    r: float
    parity: int  # +1 even (cosine expansion), -1 odd (sine expansion)
    lam: np.ndarray  # lam[n], lam[0] unused
    n_max: int

    def __post_init__(self):
        if self.parity not in (1, -1):
            raise DomainError("parity must be +-1")
        if abs(self.lam[1] - 1.0) > 1e-9:
            raise DomainError("Maass data must be normalized: lam(1) = 1")

    def rankin_selberg_constant(self) -> float:
        """max over x <= n_max of (sum_(n<=x) lam(n)^2)/x, recorded empirically."""
        csum = np.cumsum(self.lam[1:] ** 2)
        return float(np.max(csum / np.arange(1, self.n_max + 1)))


def required_terms_maass(r: float, y: float, tol: float) -> int:
    return max(3, math.ceil((abs(r) + math.log(1.0 / tol) + 8.0) / (2.0 * math.pi * y)))


def eval_maass(phi: MaassFormData, z, tol: float = 1e-10, reduce: bool = True) -> float:
    """Fourier evaluation; even data pairs cosines, odd data sines."""
    z = _as_complex(z)
    if reduce:
        z, _ = reduce_to_fundamental_domain(z)
    return float(_eval_maass_points(phi, np.array([z.real]), np.array([z.imag]), tol)[0])


def _eval_maass_points(phi: MaassFormData, xs: np.ndarray, ys: np.ndarray, tol: float) -> np.ndarray:
    n_req = required_terms_maass(phi.r, float(np.min(ys)), tol)
    if n_req > phi.n_max:
        raise TableRangeError(n_req, phi.n_max, "Maass evaluation")
    ns = np.arange(1, n_req + 1, dtype=np.float64)
    args = 2.0 * math.pi * np.outer(ys, ns)
    kv = kernels.kbessel_imag(phi.r, args.ravel()).reshape(args.shape)
    kapp = 2.0 * np.sqrt(args / (2.0 * math.pi)) * kv
    coef = phi.lam[1 : n_req + 1] / np.sqrt(ns)
    phase = 2.0 * math.pi * np.outer(xs, ns)
    trig = 2.0 * np.cos(phase) if phi.parity == 1 else 2.0 * np.sin(phase)
    return np.sum(coef[None, :] * kapp * trig, axis=1)


def load_maass_fixture() -> MaassFormData:
    """Even eigenform fixture (spectral parameter ~13.78), coefficients to n = 10.

    Coefficient provenance is validated at runtime: the evaluation must be
    invariant under z -> -1/z to ~1e-13 absolute, which fails for any
    perturbed data.
    """
    pkg = resources.files("cuspmass").joinpath("data")
    return load_maass_csv(pkg.joinpath("maass_even_r13p7797.csv"))


def load_maass_csv(path) -> MaassFormData:
    import json
    from pathlib import Path

    path = Path(str(path))
    sidecar = path.with_suffix(".meta.json")
    if not path.exists() or not sidecar.exists():
        raise ParseError(f"missing Maass fixture file or sidecar at {path}")
    meta = json.loads(sidecar.read_text(encoding="utf-8"))
    for key in ("spectral_r", "parity"):
        if key not in meta:
            raise ParseError(f"Maass sidecar missing {key!r}")
    vals = []
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "n,a_n":
            raise ParseError(f"expected header 'n,a_n', got {header!r}", line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            ns, vs = line.split(",")
            if int(ns) != len(vals) + 1:
                raise ParseError("n must increase from 1 without gaps", line=lineno)
            vals.append(float(vs))
    lam = np.zeros(len(vals) + 1)
    lam[1:] = vals
    return MaassFormData(r=float(meta["spectral_r"]), parity=int(meta["parity"]), lam=lam, n_max=len(vals))


# --------------------------------------------------- quadrature over curves


@dataclass(frozen=True)
class GridSpec:
    nx: int = 40
    ny: int = 40
    y_cut: float = 3.0

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid must have at least 2 nodes per direction")
        if self.y_cut <= 1.0:
            raise DomainError("y_cut must exceed 1")


def _bulk_nodes(grid: GridSpec):
    """Tensor Gauss-Legendre nodes on the standard domain below y_cut.

    x runs over [-1/2, 1/2]; at each x, y runs from the unit-circle arc
    sqrt(1 - x^2) up to y_cut, mapped linearly from [0, 1].
    """
    gx, gwx = np.polynomial.legendre.leggauss(grid.nx)
    gt, gwt = np.polynomial.legendre.leggauss(grid.ny)
    xs = 0.5 * gx
    wxs = 0.5 * gwx
    arc = np.sqrt(1.0 - xs**2)
    span = grid.y_cut - arc
    t = 0.5 * (gt + 1.0)
    wt = 0.5 * gwt
    X = np.repeat(xs, grid.ny)
    Y = (arc[:, None] + span[:, None] * t[None, :]).ravel()
    W = (wxs[:, None] * span[:, None] * wt[None, :]).ravel()
    return X, Y, W


def _mass_cusp_contribution(table: CoefficientTable, k: int, q: int, y_cut: float) -> float:
    """Integral of the pushforward mass above y_cut: exact unfolded form.

    One term per divisor-width cusp; each reduces by the x-integral to
    (4 pi)^(1-k) sum_n lam(n)^2 Gamma(k-1, 4 pi n y_cut / d).
    """
    total = 0.0
    for d in divisors(q):
        y0 = y_cut / d
        n = 1
        while True:
            g = upper_gamma_int(k - 1, 4.0 * math.pi * n * y0)
            term = table.lam[n] ** 2 * g
            total += term
            if n > 4 and g < 1e-22 * math.gamma(k - 1):
                break
            n += 1
            if n > table.n_max:
                raise TableRangeError(n, table.n_max, "cusp tail")
    return total * (4.0 * math.pi) ** (1 - k)


def petersson_norm_formula(table: CoefficientTable, k: int, q: int, prime_cutoff: int = 100_000):
    """q Gamma(k-1)/(4 pi)^(k-1) (k-1)/(2 pi^2) L, with the truncated adjoint L."""
    lval, ltail = adjoint_L_at_1(table, q=q, prime_cutoff=prime_cutoff)
    front = math.exp(log_gamma(k - 1).real - (k - 1) * math.log(4.0 * math.pi))
    scale = q * front * (k - 1) / (2.0 * math.pi**2)
    return scale * lval, scale * ltail


def petersson_norm(
    table: CoefficientTable,
    k: int,
    q: int,
    grid: GridSpec = GridSpec(),
    tol: float = 1e-10,
    prime_cutoff: int = 100_000,
) -> tuple[float, float, float]:
    """(numeric, formula, rel_err) for the total mass of the form.

    numeric: coset-sum Gauss-Legendre below y_cut plus exact cusp tails;
    formula: level times Gamma-factor times adjoint value.
    """
    reps = coset_representatives(q)
    X, Y, W = _bulk_nodes(grid)
    zs = X + 1j * Y
    dens = _mass_pushforward_grid(table, k, q, reps, zs, tol)
    bulk = float(np.sum(W * dens / Y**2))
    cusp = _mass_cusp_contribution(table, k, q, grid.y_cut)
    numeric = bulk + cusp
    formula, _ = petersson_norm_formula(table, k, q, prime_cutoff)
    rel_err = abs(numeric - formula) / abs(formula)
    return numeric, formula, rel_err


def weyl_period(
    table: CoefficientTable,
    k: int,
    q: int,
    phi,
    grid: GridSpec = GridSpec(),
    tol: float = 1e-10,
) -> tuple[float, float]:
    """(period_ratio, discrepancy) of a fixed test eigenfunction.

    period_ratio is the phi-integral of the pushforward mass over its total;
    the discrepancy subtracts the ambient average: psi^(1)/(pi/3) for an
    incomplete Eisenstein series, 0 for a cusp form.
    """
    if isinstance(phi, TestFunctionH):
        phi = IncompleteEisensteinData(psi=phi)
    reps = coset_representatives(q)
    if isinstance(phi, IncompleteEisensteinData):
        min_cut = max(phi.psi.y1, 1.0 / phi.psi.y0)
        if grid.y_cut < min_cut:
            grid = GridSpec(grid.nx, grid.ny, min_cut * 1.0001)
    X, Y, W = _bulk_nodes(grid)
    zs = X + 1j * Y
    dens = _mass_pushforward_grid(table, k, q, reps, zs, tol)

    cusp_mass = _mass_cusp_contribution(table, k, q, grid.y_cut)
    denom = float(np.sum(W * dens / Y**2)) + cusp_mass
    if isinstance(phi, IncompleteEisensteinData):
        # the series vanishes identically above y_cut >= max(y1, 1/y0)
        phi_vals = np.array([eval_incomplete_eisenstein(phi, z) for z in zs])
        ambient = phi.mean_value
    elif isinstance(phi, MaassFormData):
        phi_vals = _eval_maass_points(phi, X, Y, tol)
        ambient = 0.0
        # dropped cusp piece is below the first-mode envelope times the cusp mass
        env = abs(
            2.0
            * math.sqrt(grid.y_cut)
            * float(kernels.kbessel_imag(phi.r, np.array([2.0 * math.pi * grid.y_cut]))[0])
        ) * float(np.sum(np.abs(phi.lam[1:]) / np.sqrt(np.arange(1, phi.n_max + 1))))
        if env * cusp_mass > 1e-6 * denom:
            raise QuadratureError(
                f"cusp remainder bound {env * cusp_mass:.3g} too large; raise y_cut"
            )
    else:
        raise DomainError(f"unsupported test function {type(phi)!r}")

    numer = float(np.sum(W * dens * phi_vals / Y**2))
    ratio = numer / denom
    return ratio, ratio - ambient


def unfolding_check(
    table: CoefficientTable,
    k: int,
    q: int,
    big_y: float,
    h: TestFunctionH,
    grid: GridSpec = GridSpec(),
    tol: float = 1e-10,
) -> tuple[float, float, float]:
    """Two routes to the mass integral of an incomplete Eisenstein series.

    lhs: 2-d coset quadrature of E(h_Y, .) against the pushforward mass.
    rhs: sum over divisors d of the level of strip integrals
    int h(Y d y) [int_0^1 |f|^2 y^k dx] dy/y^2, trapezoid in x (periodic,
    spectrally accurate), panel-doubling in y.
    Returns (lhs, rhs, rel_err).
    """
    h_y = h.scaled(big_y)
    data = IncompleteEisensteinData(psi=h_y)
    min_cut = max(h_y.y1, 1.0 / h_y.y0) * 1.0001
    if grid.y_cut < min_cut:
        grid = GridSpec(grid.nx, grid.ny, min_cut)
    reps = coset_representatives(q)
    X, Y, W = _bulk_nodes(grid)
    zs = X + 1j * Y
    dens = _mass_pushforward_grid(table, k, q, reps, zs, tol)
    phi_vals = np.array([eval_incomplete_eisenstein(data, z) for z in zs])
    lhs = float(np.sum(W * dens * phi_vals / Y**2))

    rhs = 0.0
    for d in divisors(q):
        y_lo = h_y.y0 / d
        y_hi = h_y.y1 / d
        n_modes = required_terms_mass(k, y_lo, tol)
        if n_modes > table.n_max:
            raise TableRangeError(n_modes, table.n_max, "unfolding strip")
        m_x = 2 * n_modes + 8
        xs_grid = np.arange(m_x) / m_x

        def strip(ys):
            ys = np.atleast_1d(ys)
            xx = np.tile(xs_grid, len(ys))
            yy = np.repeat(ys, m_x)
            vals = kernels.holo_fourier(table.lam, k, xx, yy, n_modes)
            means = vals.reshape(len(ys), m_x).mean(axis=1)
            return h_y(ys * d) * means / ys**2

        rhs += float(
            adaptive_quadrature(strip, y_lo, y_hi, rel_tol=1e-9, max_doublings=9)
        )
    rel_err = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return lhs, rhs, rel_err


# --------------------------------------------------------- kernel catalogue


class WhittakerKernels:
    """The three Fourier kernels used by the evaluators."""

    @staticmethod
    def holomorphic(k: int, y) -> np.ndarray:
        return kappa_holo(k, y)

    @staticmethod
    def bessel(s: complex, y) -> np.ndarray:
        return kappa_s(s, y)

    @staticmethod
    def maass(r: float, delta: int, y) -> np.ndarray:
        """2 |y|^(1/2) K_(i r)(2 pi |y|) sgn(y)^((1+delta)/2)."""
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        base = kappa_s(complex(0.0, r), np.abs(y))
        sign = np.sign(y) if delta == 1 else np.ones_like(y)
        return base * sign
