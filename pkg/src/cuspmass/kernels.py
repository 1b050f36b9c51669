"""Hot numeric kernels, each with a numba @njit build and a pure-numpy build.

The active path is chosen at import time by :mod:`cuspmass.backend`
(env flag ``CUSPMASS_NO_NUMBA``).  Public dispatch functions:

* ``kbessel_imag(r, xs)``  -- K_(i r)(x) elementwise over an array
* ``kbessel_real(nu, xs)`` -- K_nu(x), real nu in (-1/2, 1/2) elementwise
* ``holo_fourier(lams, k, xs, ys, n_terms)`` -- truncated weight-k Whittaker
  sums at many points, returning the squared modulus (the mass density)
* ``holo_pair_sums(lams, k, l, ys, n_lo, n_hi)`` -- inner coefficient-pair
  sums of the weighted shifted-sum integrand at quadrature nodes
* ``zparts(n_max, l, primes)`` -- friable parts of n and n + l for all n

Both K-Bessel builds integrate e^(-x cosh t) cos(rt) (resp. cosh(nu t)) by
composite Gauss-Legendre, truncated where x(cosh t - 1) > 45 so the dropped
tail is below 1e-18 relative to the e^(-x) scale of the value.  Panel widths
shrink with |r| to resolve the cos(rt) oscillation.
"""

from __future__ import annotations

import math

import numpy as np

from .backend import USE_NUMBA, njit

_GL_N = 40
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)
_GL_X = np.ascontiguousarray(_GL_X)
_GL_W = np.ascontiguousarray(_GL_W)

_TAIL_LOG = 45.0  # x*(cosh t - 1) beyond this is dropped
_TWO_PI = 2.0 * math.pi


def _panel_count(tmax: float, r: float) -> int:
    width = min(0.75, 24.0 / max(abs(r), 1.0))
    return max(2, int(math.ceil(tmax / width)))


def _tmax_for(x: float) -> float:
    return math.acosh(1.0 + _TAIL_LOG / x)


# ---------------------------------------------------------------- K-Bessel

@njit
def _kbessel_imag_njit(r, xs, gx, gw):  # pragma: no cover - numba build
    out = np.empty(xs.shape[0])
    width = min(0.75, 24.0 / max(abs(r), 1.0))
    for i in range(xs.shape[0]):
        x = xs[i]
        if x <= 0.0:
            out[i] = np.nan
            continue
        if x > 600.0:
            out[i] = 0.0
            continue
        tmax = math.acosh(1.0 + 45.0 / x)
        npan = max(2, int(math.ceil(tmax / width)))
        total = 0.0
        for j in range(npan):
            a = tmax * j / npan
            b = tmax * (j + 1) / npan
            mid = 0.5 * (a + b)
            hw = 0.5 * (b - a)
            for m in range(gx.shape[0]):
                t = mid + hw * gx[m]
                total += hw * gw[m] * math.exp(-x * math.cosh(t)) * math.cos(r * t)
        out[i] = total
    return out


def _kbessel_imag_numpy(r, xs, gx, gw):
    out = np.empty(xs.shape[0])
    for i, x in enumerate(xs):
        if x <= 0.0:
            out[i] = np.nan
            continue
        if x > 600.0:
            out[i] = 0.0
            continue
        tmax = _tmax_for(x)
        npan = _panel_count(tmax, r)
        edges = np.linspace(0.0, tmax, npan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        hw = 0.5 * (edges[1] - edges[0])
        t = mid + hw * gx[None, :]
        vals = np.exp(-x * np.cosh(t)) * np.cos(r * t)
        out[i] = hw * float(np.sum(vals @ gw))
    return out


@njit
def _kbessel_real_njit(nu, xs, gx, gw):  # pragma: no cover - numba build
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        x = xs[i]
        if x <= 0.0:
            out[i] = np.nan
            continue
        if x > 600.0:
            out[i] = 0.0
            continue
        tmax = math.acosh(1.0 + 45.0 / x)
        npan = max(2, int(math.ceil(tmax / 0.75)))
        total = 0.0
        for j in range(npan):
            a = tmax * j / npan
            b = tmax * (j + 1) / npan
            mid = 0.5 * (a + b)
            hw = 0.5 * (b - a)
            for m in range(gx.shape[0]):
                t = mid + hw * gx[m]
                total += hw * gw[m] * math.exp(-x * math.cosh(t)) * math.cosh(nu * t)
        out[i] = total
    return out


def _kbessel_real_numpy(nu, xs, gx, gw):
    out = np.empty(xs.shape[0])
    for i, x in enumerate(xs):
        if x <= 0.0:
            out[i] = np.nan
            continue
        if x > 600.0:
            out[i] = 0.0
            continue
        tmax = _tmax_for(x)
        npan = max(2, int(math.ceil(tmax / 0.75)))
        edges = np.linspace(0.0, tmax, npan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        hw = 0.5 * (edges[1] - edges[0])
        t = mid + hw * gx[None, :]
        vals = np.exp(-x * np.cosh(t)) * np.cosh(nu * t)
        out[i] = hw * float(np.sum(vals @ gw))
    return out


def kbessel_imag(r: float, xs) -> np.ndarray:
    """K_(i r)(x) for each x in xs (float64)."""
    xs = np.ascontiguousarray(np.atleast_1d(np.asarray(xs, dtype=np.float64)))
    if USE_NUMBA:
        return _kbessel_imag_njit(float(r), xs, _GL_X, _GL_W)
    return _kbessel_imag_numpy(float(r), xs, _GL_X, _GL_W)


def kbessel_real(nu: float, xs) -> np.ndarray:
    """K_nu(x) for each x in xs; intended for |nu| < 1/2 but valid for |nu| < 1."""
    xs = np.ascontiguousarray(np.atleast_1d(np.asarray(xs, dtype=np.float64)))
    if USE_NUMBA:
        return _kbessel_real_njit(float(nu), xs, _GL_X, _GL_W)
    return _kbessel_real_numpy(float(nu), xs, _GL_X, _GL_W)


# -------------------------------------------------------- holomorphic mass

@njit
def _holo_fourier_njit(lams, k, xs, ys, n_terms):  # pragma: no cover
    out = np.empty(xs.shape[0])
    half_k = 0.5 * k
    for i in range(xs.shape[0]):
        x = xs[i]
        y = ys[i]
        re = 0.0
        im = 0.0
        for n in range(1, n_terms + 1):
            ny = n * y
            lg = half_k * math.log(ny) - _TWO_PI * ny
            if lg < -745.0:
                amp = 0.0
            else:
                amp = lams[n] / math.sqrt(n) * math.exp(lg)
            if amp == 0.0 and ny > half_k:
                break
            ang = _TWO_PI * n * x
            re += amp * math.cos(ang)
            im += amp * math.sin(ang)
        out[i] = re * re + im * im
    return out


def _holo_fourier_numpy(lams, k, xs, ys, n_terms):
    out = np.empty(xs.shape[0])
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    coef = lams[1 : n_terms + 1] / np.sqrt(n)
    chunk = max(1, int(4_000_000 // max(n_terms, 1)))
    for lo in range(0, xs.shape[0], chunk):
        hi = min(lo + chunk, xs.shape[0])
        ny = np.outer(ys[lo:hi], n)
        with np.errstate(divide="ignore", over="ignore"):
            lg = 0.5 * k * np.log(ny) - _TWO_PI * ny
        amp = coef[None, :] * np.exp(np.maximum(lg, -745.0))
        amp[lg < -745.0] = 0.0
        ang = _TWO_PI * np.outer(xs[lo:hi], n)
        re = np.sum(amp * np.cos(ang), axis=1)
        im = np.sum(amp * np.sin(ang), axis=1)
        out[lo:hi] = re * re + im * im
    return out


def holo_fourier(lams: np.ndarray, k: int, xs, ys, n_terms: int) -> np.ndarray:
    """y^k |f|^2 at points (x_i, y_i) from the first n_terms Fourier modes.

    ``lams`` is indexed so lams[n] is the n-th normalized coefficient
    (lams[0] unused).  Caller is responsible for choosing n_terms large
    enough for the smallest y in the batch.
    """
    xs = np.ascontiguousarray(np.atleast_1d(np.asarray(xs, dtype=np.float64)))
    ys = np.ascontiguousarray(np.atleast_1d(np.asarray(ys, dtype=np.float64)))
    if n_terms + 1 > lams.shape[0]:
        raise ValueError(f"need coefficients through n = {n_terms}, have {lams.shape[0] - 1}")
    if USE_NUMBA:
        return _holo_fourier_njit(lams, float(k), xs, ys, int(n_terms))
    return _holo_fourier_numpy(lams, float(k), xs, ys, int(n_terms))


# ------------------------------------------------- weighted shifted sums

@njit
def _holo_pair_sums_njit(lams, k, l, ys, n_lo, n_hi):  # pragma: no cover
    out = np.zeros(ys.shape[0])
    half_k = 0.5 * k
    for j in range(ys.shape[0]):
        y = ys[j]
        acc = 0.0
        for n in range(n_lo, n_hi + 1):
            m = n + l
            if m < 1:
                continue
            c = lams[m] * lams[n] / math.sqrt(float(m) * float(n))
            if c == 0.0:
                continue
            lg = half_k * (math.log(m * y) + math.log(n * y)) - _TWO_PI * (m + n) * y
            if lg < -745.0:
                continue
            acc += c * math.exp(lg)
        out[j] = acc
    return out


def _holo_pair_sums_numpy(lams, k, l, ys, n_lo, n_hi):
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    m = n + l
    keep = m >= 1
    n = n[keep]
    m = m[keep]
    c = lams[m] * lams[n] / np.sqrt(m.astype(np.float64) * n.astype(np.float64))
    out = np.zeros(ys.shape[0])
    chunk = max(1, int(4_000_000 // max(len(n), 1)))
    nf = n.astype(np.float64)
    mf = m.astype(np.float64)
    for lo in range(0, ys.shape[0], chunk):
        hi = min(lo + chunk, ys.shape[0])
        yb = ys[lo:hi, None]
        lg = 0.5 * k * (np.log(mf[None, :] * yb) + np.log(nf[None, :] * yb)) - _TWO_PI * (
            mf + nf
        )[None, :] * yb
        vals = c[None, :] * np.exp(np.maximum(lg, -745.0))
        vals[lg < -745.0] = 0.0
        out[lo:hi] = np.sum(vals, axis=1)
    return out


def holo_pair_sums(lams, k, l, ys, n_lo, n_hi) -> np.ndarray:
    """sum_n lam(n+l) lam(n) / sqrt((n+l) n) * kappa(m y) kappa(n y) at nodes.

    kappa is the weight-k Whittaker kernel u -> u^(k/2) e^(-2 pi u); indices
    run over n_lo <= n <= n_hi with n + l >= 1.
    """
    ys = np.ascontiguousarray(np.atleast_1d(np.asarray(ys, dtype=np.float64)))
    if n_hi + l + 1 > lams.shape[0] or n_hi + 1 > lams.shape[0]:
        raise ValueError(f"need coefficients through n = {max(n_hi, n_hi + l)}")
    if USE_NUMBA:
        return _holo_pair_sums_njit(lams, float(k), int(l), ys, int(n_lo), int(n_hi))
    return _holo_pair_sums_numpy(lams, float(k), int(l), ys, int(n_lo), int(n_hi))


# ----------------------------------------------------------- friable parts

@njit
def _zparts_njit(n_max, l, primes):  # pragma: no cover
    zn = np.empty(n_max + 1, dtype=np.int64)
    zm = np.empty(n_max + 1, dtype=np.int64)
    zn[0] = 1
    zm[0] = 1
    for n in range(1, n_max + 1):
        zpart = 1
        rest = n
        for ip in range(primes.shape[0]):
            p = primes[ip]
            while rest % p == 0:
                rest //= p
                zpart *= p
        zn[n] = zpart
        m = n + l
        if m < 1:
            zm[n] = 0
            continue
        zpart = 1
        rest = m
        for ip in range(primes.shape[0]):
            p = primes[ip]
            while rest % p == 0:
                rest //= p
                zpart *= p
        zm[n] = zpart
    return zn, zm


def _zpart_vector_numpy(values, primes):
    vals = values.copy()
    zpart = np.ones_like(vals)
    for p in primes:
        while True:
            mask = (vals % p == 0) & (vals > 0)
            if not mask.any():
                break
            vals[mask] //= p
            zpart[mask] *= p
    return zpart


def _zparts_numpy(n_max, l, primes):
    n = np.arange(0, n_max + 1, dtype=np.int64)
    zn = _zpart_vector_numpy(n, primes)
    zn[0] = 1
    m = n + l
    zm = np.where(m >= 1, _zpart_vector_numpy(np.maximum(m, 1), primes), 0)
    zm[0] = 1
    return zn, zm


def zparts(n_max: int, l: int, primes) -> tuple[np.ndarray, np.ndarray]:
    """Friable parts (largest divisor supported on the given primes).

    Returns arrays (zn, zm) with zn[n] the friable part of n and zm[n] that
    of n + l (0 where n + l < 1), for 0 <= n <= n_max.
    """
    primes = np.ascontiguousarray(np.asarray(primes, dtype=np.int64))
    if USE_NUMBA:
        return _zparts_njit(int(n_max), int(l), primes)
    return _zparts_numpy(int(n_max), int(l), primes)
