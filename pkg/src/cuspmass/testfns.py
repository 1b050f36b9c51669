"""Smooth compactly supported test functions and their Mellin transforms.

The default weight function is the bump

    h(y) = scale * exp(-1 / (1 - u^2)),   u = 2 log y,

supported on [e^(-1/2), e^(1/2)], with ``scale`` chosen once so that
h^(1) = pi/3, the volume of the level-one modular curve.  Only smoothness,
nonnegativity, compact support in (0, inf), and that normalization are
relied on downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MU1 = math.pi / 3.0  # hyperbolic area of the level-one modular curve

_GLN = 24
_GLX, _GLW = np.polynomial.legendre.leggauss(_GLN)


def gauss_panels(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int):
    """Composite Gauss-Legendre with a fixed panel count (vectorized f)."""
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1] - edges[0])
    t = (mids[:, None] + hw * _GLX[None, :]).ravel()
    vals = np.asarray(f(t)).reshape(panels, _GLN)
    return hw * np.sum(vals @ _GLW)

def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_floor: float = 1e-300,
    max_doublings: int = 14,
):
    """Integrate a smooth vectorized integrand by panel doubling.

    Doubles the composite Gauss-Legendre panel count until two successive
    estimates agree to rel_tol relative or abs_floor absolute, whichever is
    weaker.  Deterministic: the refinement path depends only on the
    integrand values.
    """
    if not b > a:
        return 0.0 * np.asarray(f(np.array([a]))).ravel()[0]
    panels = 1
    prev = gauss_panels(f, a, b, panels)
    for _ in range(max_doublings):
        panels *= 2
        cur = gauss_panels(f, a, b, panels)
        if abs(cur - prev) <= max(rel_tol * abs(cur), abs_floor):
            return cur
        prev = cur
    return prev


@dataclass(frozen=True)
class TestFunctionH:
    """Smooth nonnegative bump with compact support [y0, y1] and Mellin data."""

    __test__ = False  # "Test" prefix is domain vocabulary, not a pytest class

    y0: float
    y1: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = "bump"
    _mellin_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        return self.evaluator(y)

    def mellin(self, s: complex) -> complex:
        """h^(s) = integral of h(y) y^(-s-1) dy over the support.

        Adaptive to 1e-12 relative with an absolute floor at the scale of
        sup|h| (the transform decays fast on vertical lines, and chasing
        relative accuracy on its tail is hopeless in fixed precision).
        """
        s = complex(s)
        key = (s.real, s.imag)
        if key in self._mellin_cache:
            return self._mellin_cache[key]
        scale = float(np.max(self.evaluator(np.linspace(self.y0, self.y1, 65))))
        floor = 1e-15 * max(scale, 1e-300)
        re = adaptive_quadrature(
            lambda y: self.evaluator(y) * np.real(y ** (-s - 1.0)),
            self.y0, self.y1, rel_tol=1e-12, abs_floor=floor,
        )
        if s.imag == 0.0:
            val = complex(re, 0.0)
        else:
            im = adaptive_quadrature(
                lambda y: self.evaluator(y) * np.imag(y ** (-s - 1.0)),
                self.y0, self.y1, rel_tol=1e-12, abs_floor=floor,
            )
            val = complex(re, im)
        if len(self._mellin_cache) < 4096:
            self._mellin_cache[key] = val
        return val

    def scaled(self, factor: float) -> "TestFunctionH":
        """y -> h(factor * y); support and Mellin transform rescale accordingly."""
        if factor <= 0:
            raise ValueError("scaling factor must be positive")
        base = self.evaluator
        return TestFunctionH(
            y0=self.y0 / factor,
            y1=self.y1 / factor,
            evaluator=lambda y, _b=base, _f=factor: _b(np.asarray(y) * _f),
            label=f"{self.label}/scaled{factor:g}",
        )


def _raw_bump(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    u = 2.0 * np.log(np.where(y > 0, y, 1.0))
    inside = (np.abs(u) < 1.0) & (y > 0)
    out = np.zeros_like(u)
    uu = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - uu * uu))
    return out


def _make_default_h() -> TestFunctionH:
    y0 = math.exp(-0.5)
    y1 = math.exp(0.5)
    raw = TestFunctionH(y0=y0, y1=y1, evaluator=_raw_bump, label="raw")
    scale = MU1 / raw.mellin(1.0).real
    return TestFunctionH(
        y0=y0,
        y1=y1,
        evaluator=lambda y, _s=scale: _s * _raw_bump(y),
        label="bump-pi3",
    )


_DEFAULT_H: TestFunctionH | None = None


def default_h() -> TestFunctionH:
    """The toolkit-wide weight function, normalized so h^(1) = pi/3."""
    global _DEFAULT_H
    if _DEFAULT_H is None:
        _DEFAULT_H = _make_default_h()
    return _DEFAULT_H


@dataclass(frozen=True)
class IncompleteEisensteinData:
    """Test-function data defining an incomplete Eisenstein series."""

    psi: TestFunctionH

    def mellin(self, s: complex) -> complex:
        return self.psi.mellin(s)

    @property
    def mean_value(self) -> float:
        """mu(phi)/mu(1) for the attached series: psi^(1) / (pi/3)."""
        return self.psi.mellin(1.0).real / MU1
