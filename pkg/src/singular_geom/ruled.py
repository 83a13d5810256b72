"""Ruled surfaces X(s,t) = base(s) + t * director(s) and their invariants.

A normalized non-cylindrical ruled surface carries the frame functions P, Q
of its director class:

* Euclidean standard:  <g',w> = <g',w'> = 0, |w| = |w'| = 1; then
  g' = P (w x w') and w'' = -w + Q (w x w').
* Lorentz nondegenerate (delta = <w',w'>_L = +-1):  the same orthogonality
  relations with g' = -delta P (w x_L w') and w'' = -delta (w + Q w x_L w').
* Lorentz lightlike director:  <g',g'>_L = 1, <g',w>_L = 0, |w|_L = 1,
  <w',w'>_L = 0 with w' != 0; then Q = <g',w'>_L never vanishes and
  w x_L w' = -w'.

Substituting the ruled form into the singular minimal/maximal equation and
clearing denominators yields a polynomial in the ruling parameter t whose
coefficients are evaluated by :func:`coefficients`;
:func:`residual_polynomial_consistency` replays that polynomial against the
raw-jet residual as an independent oracle, and :func:`falsification_sweep`
searches randomized normalized surfaces for a vanishing coefficient vector.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .algebra import Metric, Vec3, cross, inner, norm, triple
from .curves import (
    CenteredODE,
    Curve,
    DenseODE,
    FourierSeries,
    constant_curve,
    fd1,
    fd1_scalar,
    line_curve,
)
from .errors import (
    ConfigError,
    CylindricalInput,
    DegenerateMetric,
    NonSpacelikeInput,
    NotNormalized,
    ODEBreakdown,
    ZeroDirection,
    ZeroQ,
)
from .surface import Jet2, ParamSurface, fundamental_forms, require_unit_direction

# |Q| floor for the lightlike class; valid data always has Q bounded away from 0.
ZERO_Q_FLOOR = 1e-10

# step of the central-difference stencils for P'(s) and Q'(s)
DERIV_STEP = 1e-4

_NORMALIZATION_TOL = {
    "euclid": 1e-9,
    "lorentz": 1e-8,
}


class DirectorClass(Enum):
    EUCLID_STANDARD = "euclid_standard"
    LORENTZ_NONDEGENERATE = "lorentz_nondegenerate"
    LORENTZ_LIGHTLIKE = "lorentz_lightlike"


@dataclass(frozen=True, slots=True)
class RuledFrame:
    """Per-s frame data of a normalized ruled surface."""

    w: Vec3
    wp: Vec3
    wxwp: Vec3
    P: float
    Q: float
    delta: int  # +-1; 0 marks the lightlike-director class


@dataclass(frozen=True, slots=True)
class CoefficientVector:
    """Values of the residual polynomial coefficients at one s."""

    A: tuple[float, ...]
    s: float
    director_class: DirectorClass

    def poly(self, t: float) -> float:
        out = 0.0
        for a in reversed(self.A):
            out = out * t + a
        return out

    def max_abs(self) -> float:
        return max(abs(a) for a in self.A)


# Overall sign relating sum A_n t^n to the cleared-denominator residual
# D = <X,v> * LHS - eps * alpha * (EG - F^2) * (Xs, Xt, v).  Fixed per class by
# expanding D in powers of t on the reference surfaces; only the common
# vanishing locus carries geometric meaning.
ORACLE_SIGN = {
    DirectorClass.EUCLID_STANDARD: -1.0,
    DirectorClass.LORENTZ_NONDEGENERATE: 1.0,
    DirectorClass.LORENTZ_LIGHTLIKE: 1.0,
}


class RuledSurface:
    """Ruled surface with twice-differentiable base and director curves."""

    def __init__(self, base: Curve, director: Curve, s_range: tuple[float, float],
                 metric: Metric, director_class: DirectorClass, delta: int = 1,
                 normalized: bool = False, label: str = ""):
        self.base = base
        self.director = director
        self.s_range = (float(s_range[0]), float(s_range[1]))
        self.metric = metric
        self.director_class = director_class
        self.delta = int(delta)
        self.normalized = normalized
        self.label = label

    @classmethod
    def build(cls, base: Curve, director: Curve, s_range, metric: Metric,
              director_class: DirectorClass, delta: int = 1, label: str = "",
              trust_normalized: bool = False, n_check: int = 33) -> "RuledSurface":
        """Construct and mark the surface normalized iff its class relations hold.

        ``trust_normalized`` skips the sampled verification; generators whose
        construction enforces the relations exactly use it.
        """
        rs = cls(base, director, s_range, metric, director_class, delta, False, label)
        if trust_normalized:
            rs.normalized = True
            return rs
        tol = _NORMALIZATION_TOL["euclid" if metric is Metric.EUCLIDEAN else "lorentz"]
        rs.normalized = verify_normalization(rs, n_check) <= tol
        return rs

    def point(self, s: float, t: float) -> Vec3:
        return self.base.value(s) + t * self.director.value(s)

    def jet(self, s: float, t: float) -> Jet2:
        g = self.base.value(s)
        gp = self.base.d1(s)
        gpp = self.base.d2(s)
        w = self.director.value(s)
        wp = self.director.d1(s)
        wpp = self.director.d2(s)
        zero = Vec3(0.0, 0.0, 0.0)
        return Jet2(g + t * w, gp + t * wp, w, gpp + t * wpp, wp, zero)

    def as_param_surface(self, t_window: tuple[float, float]) -> ParamSurface:
        s0, s1 = self.s_range
        return ParamSurface.exact((s0, s1, float(t_window[0]), float(t_window[1])), self.jet)

    def s_samples(self, n: int, inset: float = 0.03) -> np.ndarray:
        s0, s1 = self.s_range
        pad = inset * (s1 - s0)
        return np.linspace(s0 + pad, s1 - pad, n)


def verify_normalization(rs: RuledSurface, n_samples: int = 33) -> float:
    """Largest violation of the class normalization relations over a sample grid."""
    m = rs.metric
    worst = 0.0
    for s in rs.s_samples(n_samples, inset=0.0):
        gp = rs.base.d1(s)
        w = rs.director.value(s)
        wp = rs.director.d1(s)
        if rs.director_class is DirectorClass.EUCLID_STANDARD:
            rels = (
                inner(m, gp, w),
                inner(m, gp, wp),
                inner(m, w, w) - 1.0,
                inner(m, wp, wp) - 1.0,
            )
        elif rs.director_class is DirectorClass.LORENTZ_NONDEGENERATE:
            rels = (
                inner(m, gp, w),
                inner(m, gp, wp),
                inner(m, w, w) - 1.0,
                inner(m, wp, wp) - rs.delta,
            )
        else:
            if wp.max_abs() < 1e-8:
                return math.inf
            rels = (
                inner(m, gp, gp) - 1.0,
                inner(m, gp, w),
                inner(m, w, w) - 1.0,
                inner(m, wp, wp),
            )
        worst = max(worst, max(abs(r) for r in rels))
    return worst


def _min_director_speed(rs: RuledSurface, n_samples: int = 33) -> float:
    return min(
        norm(Metric.EUCLIDEAN, rs.director.d1(s)) for s in rs.s_samples(n_samples, inset=0.0)
    )


def make_cylinder(base: Curve, direction: Vec3, m: Metric,
                  s_range: tuple[float, float] = (0.0, 1.0)) -> RuledSurface:
    """Cylinder over a base curve: the director is constant, so w' = 0."""
    if direction.max_abs() < 1e-12:
        raise ZeroDirection("cylinder direction is numerically zero")
    n = norm(m, direction)
    w = direction / n if n > 1e-12 * direction.max_abs() else direction
    klass = (DirectorClass.EUCLID_STANDARD if m is Metric.EUCLIDEAN
             else DirectorClass.LORENTZ_NONDEGENERATE)
    return RuledSurface(base, constant_curve(w), s_range, m, klass, delta=1,
                        normalized=False, label="cylinder")


def helicoid(pitch: float = 1.0, s_range: tuple[float, float] = (0.3, 2.3)) -> RuledSurface:
    """Normalized Euclidean helicoid: vertical axis base, rotating director."""
    c = float(pitch)
    base = Curve(
        lambda s: Vec3(0.0, 0.0, c * s),
        lambda s: Vec3(0.0, 0.0, c),
        lambda s: Vec3(0.0, 0.0, 0.0),
    )
    director = Curve(
        lambda s: Vec3(math.cos(s), math.sin(s), 0.0),
        lambda s: Vec3(-math.sin(s), math.cos(s), 0.0),
        lambda s: Vec3(-math.cos(s), -math.sin(s), 0.0),
    )
    return RuledSurface.build(base, director, s_range, Metric.EUCLIDEAN,
                              DirectorClass.EUCLID_STANDARD, label=f"helicoid(c={c})")


def lightlike_reference(offset: Vec3 = Vec3(0.0, 0.0, -2.0),
                        s_range: tuple[float, float] = (-1.0, 1.0)) -> RuledSurface:
    """Canonical lightlike-director surface with w(s) = (1, s, s) and Q = -1.

    The base is the cubic with g'(s) = (s, s^2/2 - 1, s^2/2), which is unit
    spacelike and orthogonal to w for every s.
    """
    ox, oy, oz = offset.as_tuple()
    base = Curve(
        lambda s: Vec3(ox + 0.5 * s * s, oy + s ** 3 / 6.0 - s, oz + s ** 3 / 6.0),
        lambda s: Vec3(s, 0.5 * s * s - 1.0, 0.5 * s * s),
        lambda s: Vec3(1.0, s, s),
    )
    director = line_curve(Vec3(0.0, 1.0, 1.0), Vec3(1.0, 0.0, 0.0))
    return RuledSurface.build(base, director, s_range, Metric.LORENTZIAN,
                              DirectorClass.LORENTZ_LIGHTLIKE, delta=0,
                              label="lightlike_reference")


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def normalize_euclidean(base: Curve, director: Curve, s_range: tuple[float, float],
                        n_steps: int = 2048) -> RuledSurface:
    """Reparametrize a raw non-cylindrical ruled surface to the standard form.

    The director (which must already be unit length) is reparametrized by its
    arclength; the base is slid along the rulings to the curve orthogonal to
    the director derivative.  The four standard relations are then verified;
    inputs that do not admit the normalization raise NotNormalized.
    """
    a, b = float(s_range[0]), float(s_range[1])
    samples = np.linspace(a, b, 33)
    for u in samples:
        if abs(norm(Metric.EUCLIDEAN, director.value(u)) - 1.0) > 1e-9:
            raise ValueError("director must be unit length before normalization")
    speeds = [norm(Metric.EUCLIDEAN, director.d1(u)) for u in samples]
    if min(speeds) < 1e-8:
        raise CylindricalInput(f"min |w'| = {min(speeds)}; surface is cylindrical")

    def speed(u: float) -> float:
        return norm(Metric.EUCLIDEAN, director.d1(u))

    length_table = DenseODE(lambda u, y: (speed(u),), a, b, (0.0,), n_steps)
    total = length_table.nodes[-1][0]
    u_of_s = DenseODE(lambda s, y: (1.0 / speed(y[0]),), 0.0, total, (a,), n_steps)

    def chain(s: float):
        u = u_of_s.state_at(s)[0]
        wu = director.d1(u)
        wuu = director.d2(u)
        g = norm(Metric.EUCLIDEAN, wu)
        u1 = 1.0 / g
        u2 = -inner(Metric.EUCLIDEAN, wu, wuu) / g ** 4
        return u, wu, wuu, u1, u2

    def d_value(s: float) -> Vec3:
        u = u_of_s.state_at(s)[0]
        return director.value(u)

    def d_d1(s: float) -> Vec3:
        u, wu, _, u1, _ = chain(s)
        return wu * u1

    def d_d2(s: float) -> Vec3:
        u, wu, wuu, u1, u2 = chain(s)
        return wuu * (u1 * u1) + wu * u2

    new_director = Curve(d_value, d_d1, d_d2)

    def _slide(u: float) -> tuple[float, float]:
        """Ruling slide mu(u) = -<g1_u, w_u>/<w_u, w_u> and its u-derivative."""
        wu = director.d1(u)
        wuu = director.d2(u)
        g1u = base.d1(u)
        g1uu = base.d2(u)
        m = Metric.EUCLIDEAN
        wu2 = inner(m, wu, wu)
        num = inner(m, g1u, wu)
        mu = -num / wu2
        mup = (-(inner(m, g1uu, wu) + inner(m, g1u, wuu)) / wu2
               + num * 2.0 * inner(m, wu, wuu) / (wu2 * wu2))
        return mu, mup

    def g_value(s: float) -> Vec3:
        u = u_of_s.state_at(s)[0]
        mu, _ = _slide(u)
        return base.value(u) + mu * director.value(u)

    def g_d1(s: float) -> Vec3:
        u, wu, _, u1, _ = chain(s)
        mu, mup = _slide(u)
        return base.d1(u) * u1 + (mup * u1) * director.value(u) + mu * (wu * u1)

    new_base = Curve(g_value, g_d1, lambda s: fd1(g_d1, s))

    rs = RuledSurface.build(new_base, new_director, (0.0, total), Metric.EUCLIDEAN,
                            DirectorClass.EUCLID_STANDARD, label="normalized_euclid")
    if not rs.normalized:
        raise NotNormalized(
            "input does not admit the standard normalization "
            f"(violation {verify_normalization(rs):.3e}); its striction curve is "
            "not orthogonal to the rulings"
        )
    return rs


def normalize_lorentz(base: Curve, director: Curve, delta: int,
                      s_range: tuple[float, float], n_steps: int = 512) -> RuledSurface:
    """Reparametrize a spacelike ruled surface so the base is orthogonal to w and w'.

    The input must satisfy <g1', w>_L = 0, <w, w>_L = 1, <w', w'>_L = delta
    with spacelike g1'.  The new base y1(s) g1(s) + y2(s) w(s) is obtained by
    integrating  f1 y1' + y2' = 0,  f2 y1 + f3 y1' + delta y2 = 0  (with
    f1 = <g1,w>_L, f2 = <g1',w'>_L, f3 = <g1,w'>_L) from (y1, y2) = (1, 0)
    with a 4th-order scheme; the sign on y2 is tied to delta and is validated
    after the solve.
    """
    if delta not in (-1, 1):
        raise ConfigError("delta must be +1 or -1")
    a, b = float(s_range[0]), float(s_range[1])
    m = Metric.LORENTZIAN
    for u in np.linspace(a, b, 33):
        gp = base.d1(u)
        w = director.value(u)
        wp = director.d1(u)
        if abs(inner(m, w, w) - 1.0) > 1e-8 or abs(inner(m, wp, wp) - delta) > 1e-8:
            raise NonSpacelikeInput("director fails <w,w>_L = 1, <w',w'>_L = delta")
        if abs(inner(m, gp, w)) > 1e-8:
            raise NonSpacelikeInput("base fails <g1',w>_L = 0")
        if inner(m, gp, gp) <= 0.0:
            raise NonSpacelikeInput("base curve is not spacelike")

    def fs(s: float) -> tuple[float, float, float]:
        g = base.value(s)
        gp = base.d1(s)
        wp = director.d1(s)
        w = director.value(s)
        return (inner(m, g, w), inner(m, gp, wp), inner(m, g, wp))

    def _y1p(f1: float, f2: float, f3: float, y1: float, y2: float, s: float) -> float:
        num = f2 * y1 + delta * y2
        if abs(f3) < 1e-9 * (1.0 + abs(f1) + abs(f2)):
            if abs(num) <= 1e-9 * (1.0 + abs(y1) + abs(y2)):
                return 0.0
            raise ODEBreakdown(f"f3 vanishes at s = {s} with inconsistent state")
        return -num / f3

    def rhs(s: float, y: tuple) -> tuple:
        f1, f2, f3 = fs(s)
        d1 = _y1p(f1, f2, f3, y[0], y[1], s)
        return (d1, -f1 * d1)

    table = DenseODE(rhs, a, b, (1.0, 0.0), n_steps)
    for node in table.nodes:
        if not all(math.isfinite(v) for v in node) or abs(node[0]) > 1e6:
            raise ODEBreakdown("reparametrization state blew up")

    def g_value(s: float) -> Vec3:
        y1, y2 = table.state_at(s)
        return y1 * base.value(s) + y2 * director.value(s)

    def g_d1(s: float) -> Vec3:
        y1, y2 = table.state_at(s)
        f1, f2, f3 = fs(s)
        d1 = _y1p(f1, f2, f3, y1, y2, s)
        return (d1 * base.value(s) + y1 * base.d1(s)
                + (-f1 * d1) * director.value(s) + y2 * director.d1(s))

    new_base = Curve(g_value, g_d1, lambda s: fd1(g_d1, s))
    rs = RuledSurface.build(new_base, director, (a, b), m,
                            DirectorClass.LORENTZ_NONDEGENERATE, delta=delta,
                            label=f"normalized_lorentz(delta={delta})")
    if not rs.normalized:
        raise NotNormalized(
            f"post-solve relations violated by {verify_normalization(rs):.3e}"
        )
    return rs


# ---------------------------------------------------------------------------
# frame and coefficient polynomials
# ---------------------------------------------------------------------------

def _require_normalized(rs: RuledSurface) -> None:
    if not rs.normalized:
        raise NotNormalized(
            f"surface '{rs.label or rs.director_class.value}' is not a normalized "
            "non-cylindrical ruled surface"
        )


def _P_func(rs: RuledSurface) -> Callable[[float], float]:
    if rs.director_class is DirectorClass.EUCLID_STANDARD:
        return lambda s: triple(rs.director.value(s), rs.director.d1(s), rs.base.d1(s))
    return lambda s: triple(rs.base.d1(s), rs.director.value(s), rs.director.d1(s))


def _Q_lightlike_func(rs: RuledSurface) -> Callable[[float], float]:
    return lambda s: inner(Metric.LORENTZIAN, rs.base.d1(s), rs.director.d1(s))


def frame(rs: RuledSurface, s: float) -> RuledFrame:
    """Frame data (w, w', w x w', P, Q, delta) of a normalized surface at s."""
    _require_normalized(rs)
    w = rs.director.value(s)
    wp = rs.director.d1(s)
    wxwp = cross(rs.metric, w, wp)
    if rs.director_class is DirectorClass.LORENTZ_LIGHTLIKE:
        Q = inner(Metric.LORENTZIAN, rs.base.d1(s), wp)
        if abs(Q) < ZERO_Q_FLOOR:
            raise ZeroQ(f"|Q| = {abs(Q)} at s = {s}")
        return RuledFrame(w, wp, wxwp, 0.0, Q, 0)
    wpp = rs.director.d2(s)
    gp = rs.base.d1(s)
    Q = triple(w, wp, wpp)
    if rs.director_class is DirectorClass.EUCLID_STANDARD:
        P = triple(w, wp, gp)
        return RuledFrame(w, wp, wxwp, P, Q, 1)
    P = triple(gp, w, wp)
    return RuledFrame(w, wp, wxwp, P, Q, rs.delta)


def coefficients(rs: RuledSurface, s: float, v: Vec3, alpha: float) -> CoefficientVector:
    """Coefficient vector of the residual polynomial in t at one s.

    The derivative P'(s) (and Q'(s) in the lightlike class) is taken by a
    4th-order central difference with step 1e-4, since only values of the
    frame functions are available numerically.
    """
    _require_normalized(rs)
    require_unit_direction(rs.metric, v)
    m = rs.metric
    cls = rs.director_class

    if cls is DirectorClass.LORENTZ_LIGHTLIKE:
        qf = _Q_lightlike_func(rs)
        Q = qf(s)
        if abs(Q) < ZERO_Q_FLOOR:
            raise ZeroQ(f"|Q| = {abs(Q)} at s = {s}")
        Qp = fd1_scalar(qf, s, DERIV_STEP)
        gam = rs.base.value(s)
        gp = rs.base.d1(s)
        w = rs.director.value(s)
        gv = inner(m, gam, v)
        wv = inner(m, w, v)
        gpv = inner(m, gp, v)
        trip = triple(gp, w, v)
        a0 = (Qp / Q) * gv + alpha * trip
        a1 = (Qp / Q) * wv + Qp * gv + alpha * Q * (gpv + 3.0 * trip)
        a2 = Qp * wv + 2.0 * alpha * Q * Q * (gpv + trip)
        return CoefficientVector((a0, a1, a2), s, cls)

    fr = frame(rs, s)
    pf = _P_func(rs)
    Pp = fd1_scalar(pf, s, DERIV_STEP)
    gam = rs.base.value(s)
    P, Q = fr.P, fr.Q
    wv = inner(m, fr.w, v)
    wpv = inner(m, fr.wp, v)
    gv = inner(m, gam, v)
    dv = triple(fr.w, fr.wp, v)

    if cls is DirectorClass.EUCLID_STANDARD:
        a0 = alpha * P ** 3 * wpv + P * P * Q * gv
        a1 = -alpha * P * P * dv + P * P * Q * wv + Pp * gv
        a2 = alpha * P * wpv + Q * gv + Pp * wv
        a3 = -alpha * dv + Q * wv
    else:
        d = float(rs.delta)
        a0 = -alpha * P ** 3 * wpv + P * P * Q * gv
        a1 = alpha * d * P * P * dv + P * P * Q * wv - Pp * gv
        a2 = alpha * P * wpv - Q * gv - Pp * wv
        a3 = -alpha * d * dv - Q * wv
    return CoefficientVector((a0, a1, a2, a3), s, cls)


def default_t_samples(rs: RuledSurface, s: float, n: int = 8) -> list[float]:
    """Ruling-parameter samples inside the class-appropriate admissible window.

    Lorentzian surfaces are only spacelike on part of each ruling (|t| < |P|
    when the director derivative is timelike, |t| > |P| when it is spacelike,
    and 1 + 2Qt > 0 in the lightlike class), so the sample window adapts to
    the frame at s.
    """
    _require_normalized(rs)
    if rs.director_class is DirectorClass.EUCLID_STANDARD:
        lo, hi = -1.0, 1.0
    elif rs.director_class is DirectorClass.LORENTZ_NONDEGENERATE:
        p = abs(frame(rs, s).P)
        if rs.delta == -1:
            lo, hi = -0.8 * p, 0.8 * p
        else:
            lo, hi = p + 0.15, p + 1.15
    else:
        q = frame(rs, s).Q
        bound = 0.45 / abs(q)
        if q > 0:
            lo, hi = max(-1.0, -bound), 1.0
        else:
            lo, hi = -1.0, min(1.0, bound)
    return list(np.linspace(lo, hi, n))


def residual_polynomial_consistency(rs: RuledSurface, s: float, v: Vec3, alpha: float,
                                    t_samples: Sequence[float]) -> float:
    """Max over t of |sum A_n t^n - D(s,t)| against the raw-jet oracle.

    D is computed entirely by the surface module from the jets of the ruled
    parametrization: D = <X,v> * [G(Xs,Xt,Xss) - 2F(Xs,Xt,Xst) + E(Xs,Xt,Xtt)]
    - eps * alpha * (EG-F^2) * (Xs,Xt,v), up to the documented per-class sign.
    Samples outside the admissible window (halfspace or spacelike violations)
    are skipped; at least 4 must survive.
    """
    cv = coefficients(rs, s, v, alpha)
    sign = ORACLE_SIGN[rs.director_class]
    m = rs.metric
    worst = 0.0
    valid = 0
    for t in t_samples:
        j = rs.jet(s, t)
        q = inner(m, j.X, v)
        if m is Metric.EUCLIDEAN:
            if q <= 0.0:
                continue
        elif abs(q) <= 1e-9 * (1.0 + j.X.max_abs()):
            continue
        try:
            forms = fundamental_forms(m, j)
        except DegenerateMetric:
            continue
        if m is Metric.LORENTZIAN and forms.eps != -1:
            continue
        lhs = (
            forms.G * triple(j.Xs, j.Xt, j.Xss)
            - 2.0 * forms.F * triple(j.Xs, j.Xt, j.Xst)
            + forms.E * triple(j.Xs, j.Xt, j.Xtt)
        )
        eps_hat = 1.0 if m is Metric.EUCLIDEAN else -1.0
        oracle = q * lhs - eps_hat * alpha * forms.W2 * triple(j.Xs, j.Xt, v)
        worst = max(worst, abs(sign * cv.poly(t) - oracle))
        valid += 1
    if valid < 4:
        raise ConfigError(f"only {valid} admissible t samples at s = {s}; need >= 4")
    return worst


# ---------------------------------------------------------------------------
# randomized surface generation (normalized by construction)
# ---------------------------------------------------------------------------

def _cross_e(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _cross_l(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], -(a[0] * b[1] - a[1] * b[0]))


def _fourier(rng: np.random.Generator, c0_range: tuple[float, float], amp: float,
             omega: float, modes: int = 2, signed: bool = True) -> FourierSeries:
    c0 = rng.uniform(*c0_range)
    if signed and rng.uniform() < 0.5:
        c0 = -c0
    raw = rng.uniform(-1.0, 1.0, size=2 * modes)
    total = np.sum(np.abs(raw))
    scale = amp * abs(c0) / total if total > 0 else 0.0
    return FourierSeries(c0, list(raw[:modes] * scale), list(raw[modes:] * scale), omega)


def _rand_unit3(rng: np.random.Generator) -> Vec3:
    while True:
        g = rng.normal(size=3)
        n = float(np.linalg.norm(g))
        if n > 1e-6:
            return Vec3(g[0] / n, g[1] / n, g[2] / n)


def random_unit_vector(rng: np.random.Generator) -> Vec3:
    """Uniform unit vector of R^3."""
    return _rand_unit3(rng)


def random_unit_timelike(rng: np.random.Generator, rapidity: float = 1.2) -> Vec3:
    """Unit timelike vector in the future cone with bounded rapidity."""
    r = rng.uniform(0.0, rapidity)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return Vec3(math.sinh(r) * math.cos(phi), math.sinh(r) * math.sin(phi), math.cosh(r))


def _lorentz_triad(rng: np.random.Generator) -> tuple[Vec3, Vec3, Vec3]:
    """Orthonormal triad (T, S1, S2) with T unit timelike, S1, S2 unit spacelike."""
    m = Metric.LORENTZIAN
    T = random_unit_timelike(rng, rapidity=0.8)
    while True:
        raw = _rand_unit3(rng)
        s1 = raw + inner(m, raw, T) * T  # projection off T since <T,T> = -1
        q = inner(m, s1, s1)
        if q > 1e-3:
            S1 = s1 / math.sqrt(q)
            break
    S2 = cross(m, T, S1)
    return T, S1, S2


def random_euclidean_ruled(rng: np.random.Generator, s_len: float = 2.0,
                           n_steps: int = 1024) -> RuledSurface:
    """Random normalized non-cylindrical Euclidean ruled surface.

    The director solves w'' = -w + Q(s) (w x w') on the unit sphere from a
    random orthonormal frame with a random low-order Fourier geodesic
    curvature Q, which keeps the normalization relations exact up to
    integrator drift; the base integrates g' = P(s) (w x w') with a random
    nonvanishing Fourier profile P.
    """
    omega = 2.0 * math.pi / s_len
    Q = _fourier(rng, (0.1, 1.0), 0.9, omega)
    P = _fourier(rng, (0.8, 1.5), 0.4, omega)
    w0 = _rand_unit3(rng)
    raw = _rand_unit3(rng)
    proj = raw - inner(Metric.EUCLIDEAN, raw, w0) * w0
    wp0 = proj / norm(Metric.EUCLIDEAN, proj)
    g0 = rng.normal(scale=0.5, size=3)

    def rhs(s: float, y: tuple) -> tuple:
        w = y[0:3]
        wp = y[3:6]
        c = _cross_e(w, wp)
        q = Q(s)
        p = P(s)
        return (
            wp[0], wp[1], wp[2],
            -w[0] + q * c[0], -w[1] + q * c[1], -w[2] + q * c[2],
            p * c[0], p * c[1], p * c[2],
        )

    table = DenseODE(rhs, 0.0, s_len, (*w0.as_tuple(), *wp0.as_tuple(), *g0), n_steps)

    def w_value(s):
        y = table.state_at(s)
        return Vec3(y[0], y[1], y[2])

    def w_d1(s):
        y = table.state_at(s)
        return Vec3(y[3], y[4], y[5])

    def w_d2(s):
        y = table.state_at(s)
        c = _cross_e(y[0:3], y[3:6])
        q = Q(s)
        return Vec3(-y[0] + q * c[0], -y[1] + q * c[1], -y[2] + q * c[2])

    def g_value(s):
        y = table.state_at(s)
        return Vec3(y[6], y[7], y[8])

    def g_d1(s):
        y = table.state_at(s)
        c = _cross_e(y[0:3], y[3:6])
        p = P(s)
        return Vec3(p * c[0], p * c[1], p * c[2])

    def g_d2(s):
        # (w x w')' = w x w'' = -Q w', hence g'' = P'(w x w') - P Q w'
        y = table.state_at(s)
        c = _cross_e(y[0:3], y[3:6])
        p, pp, q = P(s), P.deriv(s), Q(s)
        return Vec3(
            pp * c[0] - p * q * y[3],
            pp * c[1] - p * q * y[4],
            pp * c[2] - p * q * y[5],
        )

    return RuledSurface.build(Curve(g_value, g_d1, g_d2), Curve(w_value, w_d1, w_d2),
                              (0.0, s_len), Metric.EUCLIDEAN, DirectorClass.EUCLID_STANDARD,
                              label="random_euclid", trust_normalized=True)


def random_lorentz_ruled(rng: np.random.Generator, delta: int, s_len: float = 2.0,
                         n_steps: int = 1024) -> RuledSurface:
    """Random normalized nondegenerate Lorentzian ruled surface for delta = +-1.

    Same construction as the Euclidean generator, on the unit de Sitter
    surface: w'' = -delta (w + Q w x_L w') and g' = -delta P (w x_L w').
    """
    if delta not in (-1, 1):
        raise ConfigError("delta must be +1 or -1")
    half = 0.5 * s_len
    omega = 2.0 * math.pi / s_len
    Q = _fourier(rng, (0.1, 0.45), 0.7, omega)
    P = _fourier(rng, (0.8, 1.5), 0.4, omega)
    T, S1, S2 = _lorentz_triad(rng)
    w0 = S1
    wp0 = S2 if delta == 1 else T
    g0 = rng.normal(scale=0.5, size=3)
    d = float(delta)

    def rhs(s: float, y: tuple) -> tuple:
        w = y[0:3]
        wp = y[3:6]
        c = _cross_l(w, wp)
        q = Q(s)
        p = P(s)
        return (
            wp[0], wp[1], wp[2],
            -d * (w[0] + q * c[0]), -d * (w[1] + q * c[1]), -d * (w[2] + q * c[2]),
            -d * p * c[0], -d * p * c[1], -d * p * c[2],
        )

    table = CenteredODE(rhs, 0.0, half, (*w0.as_tuple(), *wp0.as_tuple(), *g0), n_steps)

    def w_value(s):
        y = table.state_at(s)
        return Vec3(y[0], y[1], y[2])

    def w_d1(s):
        y = table.state_at(s)
        return Vec3(y[3], y[4], y[5])

    def w_d2(s):
        y = table.state_at(s)
        c = _cross_l(y[0:3], y[3:6])
        q = Q(s)
        return Vec3(-d * (y[0] + q * c[0]), -d * (y[1] + q * c[1]), -d * (y[2] + q * c[2]))

    def g_value(s):
        y = table.state_at(s)
        return Vec3(y[6], y[7], y[8])

    def g_d1(s):
        y = table.state_at(s)
        c = _cross_l(y[0:3], y[3:6])
        p = P(s)
        return Vec3(-d * p * c[0], -d * p * c[1], -d * p * c[2])

    def g_d2(s):
        # (w x_L w')' = w x_L w'' = -delta Q w', hence g'' = -delta P'(w x_L w') + P Q w'
        y = table.state_at(s)
        c = _cross_l(y[0:3], y[3:6])
        p, pp, q = P(s), P.deriv(s), Q(s)
        return Vec3(
            -d * pp * c[0] + p * q * y[3],
            -d * pp * c[1] + p * q * y[4],
            -d * pp * c[2] + p * q * y[5],
        )

    return RuledSurface.build(Curve(g_value, g_d1, g_d2), Curve(w_value, w_d1, w_d2),
                              (-half, half), Metric.LORENTZIAN,
                              DirectorClass.LORENTZ_NONDEGENERATE, delta=delta,
                              label=f"random_lorentz(delta={delta})", trust_normalized=True)


def random_lightlike_ruled(rng: np.random.Generator, s_len: float = 2.0,
                           n_steps: int = 1024) -> RuledSurface:
    """Random normalized lightlike-director surface with w(s) = (1, s, s).

    The base tangent is solved in closed form from a random nonvanishing
    profile m(s):  g' = (s m, (s^2 m^2 - 1)/(2m) - m/2, (s^2 m^2 - 1)/(2m) + m/2)
    is unit spacelike, orthogonal to w, and has Q = <g', w'>_L = -m(s).
    """
    half = 0.5 * s_len
    omega = 2.0 * math.pi / s_len
    mf = _fourier(rng, (0.7, 1.2), 0.35, omega)
    g0 = rng.normal(scale=0.5, size=3)

    def gp_tuple(s: float) -> tuple[float, float, float]:
        mv = mf(s)
        a = (s * s * mv * mv - 1.0) / mv
        return (s * mv, 0.5 * (a - mv), 0.5 * (a + mv))

    def rhs(s: float, y: tuple) -> tuple:
        return gp_tuple(s)

    table = DenseODE(rhs, -half, half, tuple(g0), n_steps)

    def g_value(s):
        y = table.state_at(s)
        return Vec3(y[0], y[1], y[2])

    def g_d1(s):
        return Vec3(*gp_tuple(s))

    def g_d2(s):
        mv = mf(s)
        mp = mf.deriv(s)
        ap = 2.0 * s * mv + s * s * mp + mp / (mv * mv)
        return Vec3(mv + s * mp, 0.5 * (ap - mp), 0.5 * (ap + mp))

    director = line_curve(Vec3(0.0, 1.0, 1.0), Vec3(1.0, 0.0, 0.0))
    return RuledSurface.build(Curve(g_value, g_d1, g_d2), director, (-half, half),
                              Metric.LORENTZIAN, DirectorClass.LORENTZ_LIGHTLIKE, delta=0,
                              label="random_lightlike", trust_normalized=True)


def random_prenormalization_input(rng: np.random.Generator, delta: int,
                                  s_len: float = 1.5, n_steps: int = 512,
                                  max_tries: int = 60):
    """Random admissible (base, director) input for :func:`normalize_lorentz`.

    The director is a de Sitter frame-ODE solution; the base tangent
    a(s) w' + b(s) (w x_L w') is orthogonal to w but not to w', so the
    normalization has actual work to do.  Draws are retried until
    <g1, w'>_L stays away from zero (the solvability condition).
    """
    if delta not in (-1, 1):
        raise ConfigError("delta must be +1 or -1")
    m = Metric.LORENTZIAN
    half = 0.5 * s_len
    omega = 2.0 * math.pi / s_len
    d = float(delta)
    for _ in range(max_tries):
        Q = _fourier(rng, (0.1, 0.45), 0.7, omega)
        fa = _fourier(rng, (1.0, 1.3), 0.25, omega, signed=False)
        fb = FourierSeries(0.0, [0.35 * rng.uniform(-1, 1)], [0.35 * rng.uniform(-1, 1)], omega)
        if delta == 1:
            av, bv = fa, fb  # |a| > |b| keeps g1' spacelike
        else:
            av, bv = fb, fa  # |b| > |a| does, since <w x w', w x w'> = -delta

        T, S1, S2 = _lorentz_triad(rng)
        w0 = S1
        wp0 = S2 if delta == 1 else T
        # seed the base so f3 = <g1, w'>_L starts well away from zero: the
        # reparametrization ODE divides by f3, so small values make it stiff
        boost = (1.6 + 0.4 * rng.uniform()) * (1.0 if rng.uniform() < 0.5 else -1.0)
        x, y = rng.normal(scale=0.35, size=2)
        if delta == 1:
            g0v = x * T + y * S1 + boost * S2
        else:
            g0v = (-boost) * T + x * S1 + y * S2
        g0 = g0v.as_tuple()

        def rhs(s: float, y: tuple) -> tuple:
            w = y[0:3]
            wp = y[3:6]
            c = _cross_l(w, wp)
            q = Q(s)
            a = av(s)
            b = bv(s)
            return (
                wp[0], wp[1], wp[2],
                -d * (w[0] + q * c[0]), -d * (w[1] + q * c[1]), -d * (w[2] + q * c[2]),
                a * wp[0] + b * c[0], a * wp[1] + b * c[1], a * wp[2] + b * c[2],
            )

        table = CenteredODE(rhs, 0.0, half, (*w0.as_tuple(), *wp0.as_tuple(), *g0), n_steps)

        # solvability: f3 = <g1, w'>_L must stay away from zero
        ok = True
        for node in list(table.fwd.nodes) + list(table.bwd.nodes):
            g1 = Vec3(node[6], node[7], node[8])
            wp = Vec3(node[3], node[4], node[5])
            if abs(inner(m, g1, wp)) < 0.45:
                ok = False
                break
        if not ok:
            continue

        def w_value(s, table=table):
            y = table.state_at(s)
            return Vec3(y[0], y[1], y[2])

        def w_d1(s, table=table):
            y = table.state_at(s)
            return Vec3(y[3], y[4], y[5])

        def w_d2(s, table=table, Q=Q):
            y = table.state_at(s)
            c = _cross_l(y[0:3], y[3:6])
            q = Q(s)
            return Vec3(-d * (y[0] + q * c[0]), -d * (y[1] + q * c[1]), -d * (y[2] + q * c[2]))

        def g1_value(s, table=table):
            y = table.state_at(s)
            return Vec3(y[6], y[7], y[8])

        def g1_d1(s, table=table, av=av, bv=bv):
            y = table.state_at(s)
            c = _cross_l(y[0:3], y[3:6])
            a = av(s)
            b = bv(s)
            return Vec3(a * y[3] + b * c[0], a * y[4] + b * c[1], a * y[5] + b * c[2])

        base = Curve(g1_value, g1_d1, lambda s: fd1(g1_d1, s))
        director = Curve(w_value, w_d1, w_d2)
        return base, director, (-half, half)
    raise ODEBreakdown("could not draw an admissible pre-normalization input")


# ---------------------------------------------------------------------------
# falsification sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepConfig:
    n_surfaces: int
    n_s_samples: int = 10
    seed: int = 0
    metric: Metric = Metric.EUCLIDEAN
    director_class: DirectorClass = DirectorClass.EUCLID_STANDARD
    delta: int = 1
    alpha_range: tuple[float, float] = (-3.0, 3.0)
    threshold: float = 1e-6
    s_len: float = 2.0

    def validate(self) -> None:
        if self.n_surfaces < 1:
            raise ConfigError("n_surfaces must be >= 1")
        if self.n_s_samples < 1:
            raise ConfigError("n_s_samples must be >= 1")
        lo, hi = self.alpha_range
        if not lo <= hi:
            raise ConfigError("alpha_range must be ordered")
        if max(abs(lo), abs(hi)) < 0.25:
            raise ConfigError("alpha_range excludes every |alpha| >= 0.25")
        if self.metric is Metric.EUCLIDEAN:
            if self.director_class is not DirectorClass.EUCLID_STANDARD:
                raise ConfigError("Euclidean sweeps use the standard director class")
        elif self.director_class is DirectorClass.EUCLID_STANDARD:
            raise ConfigError("Lorentzian sweeps need a Lorentzian director class")
        if self.director_class is DirectorClass.LORENTZ_NONDEGENERATE and self.delta not in (-1, 1):
            raise ConfigError("delta must be +1 or -1")
        if self.threshold <= 0.0:
            raise ConfigError("threshold must be positive")
        if self.s_len <= 0.0:
            raise ConfigError("s_len must be positive")

    def to_dict(self) -> dict:
        return {
            "n_surfaces": self.n_surfaces,
            "n_s_samples": self.n_s_samples,
            "seed": int(self.seed),
            "metric": self.metric.value,
            "director_class": self.director_class.value,
            "delta": self.delta,
            "alpha_range": [self.alpha_range[0], self.alpha_range[1]],
            "threshold": self.threshold,
            "s_len": self.s_len,
        }


@dataclass
class SweepReport:
    config: dict
    per_surface: list[dict] = field(default_factory=list)
    counterexamples: list[int] = field(default_factory=list)
    min_max_abs_coeff: float | None = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "per_surface": self.per_surface,
            "counterexamples": self.counterexamples,
            "min_max_abs_coeff": self.min_max_abs_coeff,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _is_cylindrical(rs: RuledSurface, n_samples: int = 17) -> bool:
    return _min_director_speed(rs, n_samples) < 1e-8


def _halfspace_window(rs: RuledSurface, s_values: Sequence[float]) -> tuple[float, float]:
    """Class-appropriate ruling window used for the halfspace translation."""
    if rs.director_class is DirectorClass.EUCLID_STANDARD:
        return (-1.0, 1.0)
    if rs.director_class is DirectorClass.LORENTZ_NONDEGENERATE:
        ps = [abs(frame(rs, s).P) for s in s_values]
        if rs.delta == -1:
            p = min(ps)
            return (-0.8 * p, 0.8 * p)
        p = max(ps)
        return (p + 0.15, p + 1.15)
    qs = [abs(frame(rs, s).Q) for s in s_values]
    bound = min(1.0, 0.45 / max(qs))
    return (-bound, bound)


def translate_into_halfspace(rs: RuledSurface, v: Vec3, s_values: Sequence[float],
                             t_window: tuple[float, float], margin: float = 0.5) -> RuledSurface:
    """Shift the base along +-v until <X, v> >= margin over the sampled box."""
    m = rs.metric
    lo = min(
        inner(m, rs.point(s, t), v) for s in s_values for t in t_window
    )
    if lo >= margin:
        return rs
    shift = margin - lo
    offset = shift * v if m is Metric.EUCLIDEAN else (-shift) * v
    out = RuledSurface(rs.base.translated(offset), rs.director, rs.s_range, rs.metric,
                       rs.director_class, rs.delta, rs.normalized, rs.label)
    return out


def sweep_surface(rs: RuledSurface, v: Vec3, alpha: float, s_values: Sequence[float],
                  threshold: float = 1e-6) -> dict:
    """Row of the sweep report for one surface.

    max_abs_coeff is max over s of max_i |A_i| scaled by max(1, |P|^3)
    (max(1, |Q|^3) in the lightlike class) so the flag is scale invariant.
    """
    worst = 0.0
    for s in s_values:
        cv = coefficients(rs, s, v, alpha)
        fr = frame(rs, s)
        ref = fr.Q if rs.director_class is DirectorClass.LORENTZ_LIGHTLIKE else fr.P
        scale = max(1.0, abs(ref) ** 3)
        worst = max(worst, cv.max_abs() / scale)
    return {
        "id": -1,
        "class": rs.director_class.value,
        "alpha": alpha,
        "max_abs_coeff": worst,
        "flagged": bool(worst <= threshold),
        "excluded": False,
    }


def _draw_alpha(rng: np.random.Generator, lo: float, hi: float) -> float:
    for _ in range(256):
        a = float(rng.uniform(lo, hi))
        if abs(a) >= 0.25:
            return a
    raise ConfigError("alpha_range too close to zero to exclude alpha = 0")


def falsification_sweep(cfg: SweepConfig, planted: Sequence[RuledSurface] = ()) -> SweepReport:
    """Randomized search for a normalized ruled surface with vanishing coefficients.

    Generates cfg.n_surfaces random normalized non-cylindrical surfaces of the
    configured class, draws a random direction and alpha (|alpha| >= 0.25) per
    surface, translates the surface into the admissible halfspace over its
    sampled box, and records the scaled coefficient maxima.  Surfaces whose
    maxima stay below the threshold at every sample are counterexample
    candidates.  ``planted`` surfaces join the report but cylindrical ones are
    excluded by the w' filter rather than flagged.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    report = SweepReport(config=cfg.to_dict())
    rows = report.per_surface

    idx = 0
    for rs in planted:
        row = {"id": idx, "class": rs.director_class.value, "alpha": 0.0,
               "max_abs_coeff": None, "flagged": False, "excluded": True}
        if not _is_cylindrical(rs):
            v = (random_unit_vector(rng) if rs.metric is Metric.EUCLIDEAN
                 else random_unit_timelike(rng))
            alpha = _draw_alpha(rng, *cfg.alpha_range)
            s_values = rs.s_samples(cfg.n_s_samples)
            window = _halfspace_window(rs, s_values)
            rs_t = translate_into_halfspace(rs, v, s_values, window)
            row = sweep_surface(rs_t, v, alpha, s_values, cfg.threshold)
            row["id"] = idx
            if row["flagged"]:
                report.counterexamples.append(idx)
        rows.append(row)
        idx += 1

    for _ in range(cfg.n_surfaces):
        if cfg.director_class is DirectorClass.EUCLID_STANDARD:
            rs = random_euclidean_ruled(rng, cfg.s_len)
            v = random_unit_vector(rng)
        elif cfg.director_class is DirectorClass.LORENTZ_NONDEGENERATE:
            rs = random_lorentz_ruled(rng, cfg.delta, cfg.s_len)
            v = random_unit_timelike(rng)
        else:
            rs = random_lightlike_ruled(rng, cfg.s_len)
            v = random_unit_timelike(rng)
        alpha = _draw_alpha(rng, *cfg.alpha_range)
        s_values = rs.s_samples(cfg.n_s_samples)
        window = _halfspace_window(rs, s_values)
        rs = translate_into_halfspace(rs, v, s_values, window)
        row = sweep_surface(rs, v, alpha, s_values, cfg.threshold)
        row["id"] = idx
        rows.append(row)
        if row["flagged"]:
            report.counterexamples.append(idx)
        idx += 1

    maxima = [r["max_abs_coeff"] for r in rows if r["max_abs_coeff"] is not None]
    report.min_max_abs_coeff = min(maxima) if maxima else None
    return report
