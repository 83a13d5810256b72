"""Twice-differentiable paths and small fixed-step ODE helpers.

Curves are maps s -> Vec3 with two derivatives.  Where a derivative callable
is not supplied it is obtained by 4th-order central differences of the next
lower derivative.  Dense ODE tables integrate a state with classical RK4 on a
fixed node grid and answer point queries by re-integrating from the nearest
node, which keeps evaluation deterministic and interpolation-free.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

from .algebra import Vec3
from .errors import OutOfDomain

# Steps for the fallback difference quotients.  First derivatives from values
# tolerate a smaller step than second derivatives (roundoff grows like 1/h^2).
FD_H1 = 1e-4
FD_H2 = 1e-3


def fd1(f: Callable[[float], Vec3], s: float, h: float = FD_H1) -> Vec3:
    """4th-order central first derivative of a Vec3-valued function."""
    return (f(s - 2 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2 * h)) / (12.0 * h)


def fd2(f: Callable[[float], Vec3], s: float, h: float = FD_H2) -> Vec3:
    """4th-order central second derivative of a Vec3-valued function."""
    return (
        -f(s - 2 * h)
        + 16.0 * f(s - h)
        - 30.0 * f(s)
        + 16.0 * f(s + h)
        - f(s + 2 * h)
    ) / (12.0 * h * h)


def fd1_scalar(f: Callable[[float], float], s: float, h: float = FD_H1) -> float:
    """4th-order central first derivative of a scalar function."""
    return (f(s - 2 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2 * h)) / (12.0 * h)


class Curve:
    """A path s -> Vec3 with value and two derivatives."""

    def __init__(self, value, d1=None, d2=None):
        self._value = value
        self._d1 = d1
        self._d2 = d2

    def value(self, s: float) -> Vec3:
        return self._value(s)

    def d1(self, s: float) -> Vec3:
        if self._d1 is not None:
            return self._d1(s)
        return fd1(self._value, s)

    def d2(self, s: float) -> Vec3:
        if self._d2 is not None:
            return self._d2(s)
        if self._d1 is not None:
            return fd1(self._d1, s)
        return fd2(self._value, s)

    def translated(self, offset: Vec3) -> "Curve":
        """The same curve shifted by a constant vector (derivatives unchanged)."""
        return Curve(lambda s: self._value(s) + offset, self.d1, self.d2)


def constant_curve(v: Vec3) -> Curve:
    zero = Vec3(0.0, 0.0, 0.0)
    return Curve(lambda s: v, lambda s: zero, lambda s: zero)


def line_curve(a: Vec3, b: Vec3) -> Curve:
    """The affine path s -> a*s + b."""
    zero = Vec3(0.0, 0.0, 0.0)
    return Curve(lambda s: a * s + b, lambda s: a, lambda s: zero)


def rk4_step(f, s: float, y: tuple, h: float) -> tuple:
    """One classical Runge-Kutta step for a tuple-valued state."""
    k1 = f(s, y)
    half = 0.5 * h
    y2 = tuple(yi + half * ki for yi, ki in zip(y, k1))
    k2 = f(s + half, y2)
    y3 = tuple(yi + half * ki for yi, ki in zip(y, k2))
    k3 = f(s + half, y3)
    y4 = tuple(yi + h * ki for yi, ki in zip(y, k3))
    k4 = f(s + h, y4)
    w = h / 6.0
    return tuple(
        yi + w * (a + 2.0 * (b + c) + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def rk4_integrate(f, s0: float, y0: tuple, s1: float, n_steps: int) -> tuple:
    """Integrate y' = f(s, y) from s0 to s1 with n_steps fixed RK4 steps."""
    h = (s1 - s0) / n_steps
    y = y0
    s = s0
    for i in range(n_steps):
        y = rk4_step(f, s, y, h)
        s = s0 + (i + 1) * h
    return y


class DenseODE:
    """Fixed-grid RK4 solution of y' = f(s, y) with deterministic point queries.

    Node states are precomputed once.  state_at(s) restarts from the nearest
    node below s and takes two RK4 substeps, so every query costs O(1) and
    carries full integrator accuracy instead of interpolation error.  Queries
    slightly outside [s0, s1] (up to ``overhang`` times the range length) are
    allowed so that difference stencils near the endpoints stay usable.
    """

    def __init__(self, f, s0: float, s1: float, y0: Sequence[float], n_steps: int = 1024,
                 overhang: float = 0.02):
        if not s1 > s0:
            raise ValueError("DenseODE needs s1 > s0")
        self.f = f
        self.s0 = float(s0)
        self.s1 = float(s1)
        self.n_steps = int(n_steps)
        self.h = (self.s1 - self.s0) / self.n_steps
        self.overhang = overhang * (self.s1 - self.s0)
        nodes = [tuple(float(v) for v in y0)]
        y = nodes[0]
        for i in range(self.n_steps):
            y = rk4_step(f, self.s0 + i * self.h, y, self.h)
            nodes.append(y)
        self.nodes = nodes
        self._last: tuple[float, tuple] | None = None

    def state_at(self, s: float) -> tuple:
        # callers typically ask for value and several derivatives at the same s
        if self._last is not None and self._last[0] == s:
            return self._last[1]
        out = self._state_at(s)
        self._last = (s, out)
        return out

    def _state_at(self, s: float) -> tuple:
        if s < self.s0 - self.overhang or s > self.s1 + self.overhang:
            raise OutOfDomain(f"s={s} outside [{self.s0}, {self.s1}] (+overhang)")
        if s <= self.s0:
            return self._march(self.s0, self.nodes[0], s)
        if s >= self.s1:
            return self._march(self.s1, self.nodes[-1], s)
        idx = int((s - self.s0) / self.h)
        idx = min(idx, self.n_steps - 1)
        s_node = self.s0 + idx * self.h
        return self._march(s_node, self.nodes[idx], s)

    def _march(self, s_from: float, y: tuple, s_to: float) -> tuple:
        ds = s_to - s_from
        if ds == 0.0:
            return y
        half = 0.5 * ds
        y = rk4_step(self.f, s_from, y, half)
        return rk4_step(self.f, s_from + half, y, half)


class CenteredODE:
    """Dense solution over [center-half, center+half] seeded at the center.

    Integrating outward from the middle halves the growth of unstable modes
    compared to seeding at an endpoint, which keeps hyperbolically growing
    states (de Sitter frames) small over the whole range.
    """

    def __init__(self, f, center: float, half: float, y0: Sequence[float],
                 n_steps: int = 1024):
        self.center = float(center)
        self.fwd = DenseODE(f, center, center + half, y0, max(2, n_steps // 2))

        def back(tau, z):
            return tuple(-d for d in f(center - tau, z))

        self.bwd = DenseODE(back, 0.0, half, y0, max(2, n_steps // 2))

    def state_at(self, s: float) -> tuple:
        if s >= self.center:
            return self.fwd.state_at(s)
        return self.bwd.state_at(self.center - s)


class FourierSeries:
    """Low-order real Fourier series c0 + sum_k (a_k cos(k w s) + b_k sin(k w s))."""

    def __init__(self, c0: float, cos_amps: Sequence[float], sin_amps: Sequence[float],
                 omega: float = 1.0):
        assert len(cos_amps) == len(sin_amps)
        self.c0 = float(c0)
        self.cos_amps = [float(a) for a in cos_amps]
        self.sin_amps = [float(b) for b in sin_amps]
        self.omega = float(omega)
        self._terms = tuple(
            ((k + 1) * self.omega, a, b)
            for k, (a, b) in enumerate(zip(self.cos_amps, self.sin_amps))
        )

    def __call__(self, s: float) -> float:
        out = self.c0
        for kw, a, b in self._terms:
            ks = kw * s
            out += a * math.cos(ks) + b * math.sin(ks)
        return out

    def deriv(self, s: float) -> float:
        out = 0.0
        for kw, a, b in self._terms:
            ks = kw * s
            out += kw * (b * math.cos(ks) - a * math.sin(ks))
        return out

    def bound_below(self) -> float:
        """A lower bound for |series| assuming |c0| > sum of amplitudes."""
        return abs(self.c0) - sum(abs(a) + abs(b) for a, b in zip(self.cos_amps, self.sin_amps))
